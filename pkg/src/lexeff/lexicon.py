"""Data model and ingestion for concepts, forms, lexicons and encodings.

File formats
------------
concepts    JSON-lines, one object per line: {"id": ..., "gloss": ...,
            "need_weight": ...}; need_weight is optional and defaults to 1.0.
embeddings  JSON-lines, one object per line: {"id": ..., "vec": [...]};
            all vectors must share one dimension.
lexicon     Tab-separated with header: surface, concept_id, form_freq,
            sense_freq, word_classes (comma-separated), constituents
            (pipe-separated, empty for atomic forms). An optional ``length``
            column supplies per-form lengths for length_mode="provided".
encoding    Tab-separated with header: concept_id, surface, constituents
            (pipe-separated), strategy (R for reuse, C for combination).

All files are UTF-8.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

HEAD_FINAL = "final"
HEAD_INITIAL = "initial"
LENGTH_ORTHOGRAPHIC = "orthographic"
LENGTH_PROVIDED = "provided"
STRATEGY_REUSE = "reuse"
STRATEGY_COMBINATION = "combination"

_LEXICON_COLUMNS = ("surface", "concept_id", "form_freq", "sense_freq",
                    "word_classes", "constituents")
_ENCODING_COLUMNS = ("concept_id", "surface", "constituents", "strategy")


class LexiconError(ValueError):
    """An input file or structure violates the data contracts."""


def round_half_up(x: float) -> int:
    """Round a non-negative frequency to an integer count, halves up."""
    return int(math.floor(x + 0.5))


def smoothed_count(x: float) -> int:
    """Add-one smoothing on an integerized count."""
    return round_half_up(x) + 1


@dataclass(frozen=True, eq=False)
class Concept:
    """A lexicalized or emerging sense with its gloss embedding."""

    id: str
    gloss: str
    embedding: np.ndarray
    need_weight: float = 1.0


class Universe:
    """All concepts an analysis knows about: existing senses plus emerging ones.

    Immutable after construction; embeddings share one dimension and are all
    nonzero. ``unit_matrix`` holds the row-normalized embeddings used for
    cosine similarity.
    """

    def __init__(self, concepts):
        concepts = list(concepts)
        if not concepts:
            raise LexiconError("universe is empty")
        seen = {}
        for concept in concepts:
            if concept.id in seen:
                raise LexiconError(f"duplicate concept id {concept.id!r}")
            seen[concept.id] = concept
            if concept.need_weight < 0:
                raise LexiconError(f"concept {concept.id!r} has negative need_weight")
        dims = {len(c.embedding) for c in concepts}
        if len(dims) != 1:
            raise LexiconError(f"embedding dimension mismatch: found dims {sorted(dims)}")
        self.dim = dims.pop()
        if self.dim == 0:
            raise LexiconError("embeddings have dimension 0")
        self.concepts = seen
        self.ids = tuple(c.id for c in concepts)
        self.index = {cid: i for i, cid in enumerate(self.ids)}
        matrix = np.array([c.embedding for c in concepts], dtype=np.float64)
        if not np.all(np.isfinite(matrix)):
            raise LexiconError("embeddings contain non-finite values")
        norms = np.linalg.norm(matrix, axis=1)
        zero = np.nonzero(norms == 0.0)[0]
        if zero.size:
            raise LexiconError(f"zero-norm embedding for concept {self.ids[zero[0]]!r}")
        matrix.setflags(write=False)
        self.matrix = matrix
        unit = matrix / norms[:, None]
        unit.setflags(write=False)
        self.unit_matrix = unit

    def __len__(self):
        return len(self.ids)

    def __contains__(self, concept_id):
        return concept_id in self.concepts

    def concept(self, concept_id: str) -> Concept:
        try:
            return self.concepts[concept_id]
        except KeyError:
            raise LexiconError(f"unknown concept id {concept_id!r}") from None

    def embedding(self, concept_id: str) -> np.ndarray:
        return self.matrix[self.index_of(concept_id)]

    def need_weight(self, concept_id: str) -> float:
        return self.concept(concept_id).need_weight

    def index_of(self, concept_id: str) -> int:
        try:
            return self.index[concept_id]
        except KeyError:
            raise LexiconError(f"unknown concept id {concept_id!r}") from None


@dataclass(frozen=True)
class Form:
    """A word form: an atomic surface or a two-constituent combination.

    ``length_units`` is the orthographic character count of the surface by
    default, or a provided (e.g. phonemic) length.
    """

    surface: str
    constituents: tuple[str, ...]
    length_units: int
    word_classes: frozenset[str] = frozenset()

    def __post_init__(self):
        if not self.surface:
            raise LexiconError("form surface is empty")
        if len(self.constituents) not in (1, 2):
            raise LexiconError(
                f"form {self.surface!r} must have 1 or 2 constituents, "
                f"got {len(self.constituents)}")
        if self.length_units < 1:
            raise LexiconError(f"form {self.surface!r} has length_units < 1")

    @property
    def is_combination(self) -> bool:
        return len(self.constituents) == 2


@dataclass(frozen=True)
class LexiconEntry:
    """One form-concept pair with its form and sense frequencies."""

    form: Form
    concept_id: str
    form_frequency: float
    sense_frequency: float


class Lexicon:
    """The existing lexicon: form-concept entries shared by all speakers.

    ``head_position`` fixes which constituent of a combination is the
    syntactic head ("final" for languages like English and Finnish,
    "initial" for languages like French). ``separator`` is the single
    character inserted when synthesizing combination surfaces.
    """

    def __init__(self, entries, universe: Universe, separator: str = " ",
                 head_position: str = HEAD_FINAL,
                 length_mode: str = LENGTH_ORTHOGRAPHIC):
        if len(separator) != 1:
            raise LexiconError("separator must be a single character")
        if head_position not in (HEAD_FINAL, HEAD_INITIAL):
            raise LexiconError(f"unknown head_position {head_position!r}")
        if length_mode not in (LENGTH_ORTHOGRAPHIC, LENGTH_PROVIDED):
            raise LexiconError(f"unknown length_mode {length_mode!r}")
        self.separator = separator
        self.head_position = head_position
        self.length_mode = length_mode
        self.universe = universe

        entries = tuple(entries)
        if not entries:
            raise LexiconError("lexicon is empty")
        pairs = set()
        forms: dict[str, Form] = {}
        senses: dict[str, list[tuple[str, float]]] = {}
        form_freq: dict[str, float] = {}
        for entry in entries:
            surface = entry.form.surface
            if entry.concept_id not in universe:
                raise LexiconError(
                    f"lexicon entry {surface!r} references unknown concept "
                    f"{entry.concept_id!r}")
            if entry.form_frequency < 0 or entry.sense_frequency < 0:
                raise LexiconError(f"negative frequency for {surface!r}")
            pair = (surface, entry.concept_id)
            if pair in pairs:
                raise LexiconError(f"duplicate (form, concept) pair {pair!r}")
            pairs.add(pair)
            if surface in forms:
                if entry.form.constituents != forms[surface].constituents:
                    raise LexiconError(
                        f"conflicting constituents for form {surface!r}")
            else:
                forms[surface] = entry.form
                form_freq[surface] = entry.form_frequency
                senses[surface] = []
            senses[surface].append((entry.concept_id, entry.sense_frequency))
        self.entries = entries
        self._forms = forms
        self._senses = {s: tuple(v) for s, v in senses.items()}
        self._form_freq = form_freq
        self.atomic_surfaces = tuple(sorted(
            s for s, f in forms.items() if not f.is_combination))

    def __contains__(self, surface: str) -> bool:
        return surface in self._forms

    def form(self, surface: str) -> Form:
        try:
            return self._forms[surface]
        except KeyError:
            raise LexiconError(f"form {surface!r} not in lexicon") from None

    def surfaces(self):
        return self._forms.keys()

    def senses(self, surface: str) -> tuple[tuple[str, float], ...]:
        """(concept_id, sense_frequency) pairs for a surface, in file order."""
        if surface not in self._senses:
            raise LexiconError(f"form {surface!r} not in lexicon")
        return self._senses[surface]

    def form_frequency(self, surface: str) -> float:
        return self._form_freq[surface]

    def concept_ids(self) -> frozenset[str]:
        return frozenset(e.concept_id for e in self.entries)

    def head_constituent(self, form: Form) -> str:
        if not form.is_combination:
            return form.constituents[0]
        return form.constituents[-1 if self.head_position == HEAD_FINAL else 0]

    def modifier_constituent(self, form: Form):
        """The non-head constituent, or None for an atomic form."""
        if not form.is_combination:
            return None
        return form.constituents[0 if self.head_position == HEAD_FINAL else 1]

    def combination_length(self, first: str, second: str) -> int:
        """Length units of the synthesized combination of two atomic surfaces.

        Orthographic mode counts every character of the synthesized surface
        including the one inserted separator; provided mode sums the
        constituents' supplied lengths (a separator carries no length unit).
        """
        if self.length_mode == LENGTH_ORTHOGRAPHIC:
            return len(first) + 1 + len(second)
        return self.form(first).length_units + self.form(second).length_units

    def make_combination(self, first: str, second: str) -> Form:
        """Synthesize the combination form ``first + separator + second``."""
        for surface in (first, second):
            form = self.form(surface)
            if form.is_combination:
                raise LexiconError(
                    f"constituent {surface!r} is itself a combination")
        head = second if self.head_position == HEAD_FINAL else first
        return Form(
            surface=first + self.separator + second,
            constituents=(first, second),
            length_units=self.combination_length(first, second),
            word_classes=self.form(head).word_classes,
        )


@dataclass(frozen=True)
class EncodingItem:
    """One emerging concept paired with its label."""

    concept_id: str
    form: Form
    strategy: str
    joint_weight: float | None = None


@dataclass(frozen=True)
class Encoding:
    """Labels for a set of emerging concepts, one label per concept."""

    items: tuple[EncodingItem, ...]

    def __len__(self):
        return len(self.items)

    def concept_ids(self) -> tuple[str, ...]:
        return tuple(item.concept_id for item in self.items)

    def forms(self) -> tuple[Form, ...]:
        return tuple(item.form for item in self.items)


def make_encoding(items, lexicon: Lexicon, universe: Universe) -> Encoding:
    """Validate and build an encoding against its lexicon and universe."""
    items = tuple(items)
    seen = set()
    for item in items:
        if item.concept_id in seen:
            raise LexiconError(
                f"concept {item.concept_id!r} has more than one label; "
                "encodings pair each emerging concept with exactly one form")
        seen.add(item.concept_id)
        if item.concept_id not in universe:
            raise LexiconError(f"unknown concept id {item.concept_id!r}")
        if item.strategy not in (STRATEGY_REUSE, STRATEGY_COMBINATION):
            raise LexiconError(f"unknown strategy {item.strategy!r}")
        for constituent in item.form.constituents:
            if constituent not in lexicon:
                raise LexiconError(
                    f"item {item.concept_id!r}: constituent {constituent!r} "
                    f"of {item.form.surface!r} is not a form surface in the "
                    "lexicon")
            if lexicon.form(constituent).is_combination:
                raise LexiconError(
                    f"item {item.concept_id!r}: constituent {constituent!r} "
                    f"of {item.form.surface!r} must be atomic")
    return Encoding(items)


@dataclass(frozen=True)
class NeedProductionModel:
    """How need and production probabilities are estimated.

    In "corpus" mode sense shares come from per-pair sense frequencies
    (uniform across a combination's senses); in "relabeled" mode they are
    proportional to the concepts' need weights, the prior of a speaker
    carrying frequencies over from a reference language. Add-one smoothing
    integerizes counts (halves round up) and adds one, which keeps every
    pair in the expanded lexicon strictly positive.
    """

    mode: str = "corpus"
    smoothing: bool = True

    def __post_init__(self):
        if self.mode not in ("corpus", "relabeled"):
            raise LexiconError(f"unknown need/production mode {self.mode!r}")


def _sense_distribution(surface: str, form: Form, lexicon: Lexicon,
                        encoding: Encoding, universe: Universe,
                        model: NeedProductionModel) -> dict[str, float]:
    """p(c | w, L') over the senses of a surface in the expanded lexicon."""
    lex_senses = lexicon.senses(surface) if surface in lexicon else ()
    enc_senses = tuple(item.concept_id for item in encoding.items
                       if item.form.surface == surface)
    sense_ids = [cid for cid, _ in lex_senses]
    sense_ids += [cid for cid in enc_senses if cid not in set(sense_ids)]
    if not sense_ids:
        raise LexiconError(f"form {surface!r} has no senses in L'")

    if model.mode == "relabeled":
        base = {cid: universe.need_weight(cid) for cid in sense_ids}
        if model.smoothing:
            # Need weights are priors, not corpus counts: add one without
            # integer truncation so probability-scale weights survive.
            base = {cid: w + 1.0 for cid, w in base.items()}
    elif form.is_combination:
        # No sense disambiguation for combinations: uniform over senses.
        base = {cid: 1.0 for cid in sense_ids}
    else:
        base = {cid: 0.0 for cid in sense_ids}
        for cid, freq in lex_senses:
            base[cid] = freq
        if model.smoothing:
            base = {cid: float(smoothed_count(f)) for cid, f in base.items()}
    total = sum(base.values())
    if total <= 0:
        raise LexiconError(
            f"all sense weights for {surface!r} are zero with smoothing off")
    return {cid: w / total for cid, w in base.items()}


def joint_distribution(encoding: Encoding, lexicon: Lexicon,
                       universe: Universe,
                       model: NeedProductionModel) -> np.ndarray:
    """Normalized joint need/production weights over an encoding's items.

    Each item's weight is proportional to p(w | L') * p(c | w, L'): the
    form's (smoothed) corpus frequency times its sense share among the
    senses of that surface in the expanded lexicon, renormalized over the
    encoding's items.
    """
    if not encoding.items:
        raise LexiconError("encoding is empty")
    sense_cache: dict[str, dict[str, float]] = {}
    weights = np.zeros(len(encoding.items))
    for i, item in enumerate(encoding.items):
        surface = item.form.surface
        f_w = lexicon.form_frequency(surface) if surface in lexicon else 0.0
        form_count = float(smoothed_count(f_w)) if model.smoothing else f_w
        if surface not in sense_cache:
            sense_cache[surface] = _sense_distribution(
                surface, item.form, lexicon, encoding, universe, model)
        weights[i] = form_count * sense_cache[surface][item.concept_id]
    total = weights.sum()
    if total <= 0:
        raise LexiconError(
            "all joint weights are zero; enable smoothing or supply "
            "nonzero frequencies")
    return weights / total


def need_marginal(encoding: Encoding, lexicon: Lexicon, universe: Universe,
                  model: NeedProductionModel) -> dict[str, float]:
    """Need distribution over the encoding's concepts.

    Marginalizes the joint weights over forms. Because an encoding pairs
    each concept with exactly one form, this is the joint weight reindexed
    by concept. The distribution depends only on the frequency structure,
    never on surface spellings, and is meant to be held fixed when costing
    alternative encodings of the same concept set.
    """
    weights = joint_distribution(encoding, lexicon, universe, model)
    marginal: dict[str, float] = {}
    for item, weight in zip(encoding.items, weights):
        marginal[item.concept_id] = marginal.get(item.concept_id, 0.0) + weight
    return marginal


# ---------------------------------------------------------------------------
# File ingestion
# ---------------------------------------------------------------------------

def _read_jsonl(path):
    path = Path(path)
    if not path.exists():
        raise LexiconError(f"file not found: {path}")
    rows = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise LexiconError(f"{path}:{lineno}: invalid JSON: {exc}") from None
    return rows


def load_universe(concepts_path, embeddings_path) -> Universe:
    """Load and validate the concept universe from its two JSON-lines files."""
    concept_rows = _read_jsonl(concepts_path)
    embedding_rows = _read_jsonl(embeddings_path)

    vectors: dict[str, np.ndarray] = {}
    for row in embedding_rows:
        if "id" not in row or "vec" not in row:
            raise LexiconError(f"{embeddings_path}: embedding row missing id or vec")
        cid = str(row["id"])
        if cid in vectors:
            raise LexiconError(f"duplicate embedding row for id {cid!r}")
        vectors[cid] = np.asarray(row["vec"], dtype=np.float64)

    concepts = []
    seen = set()
    for row in concept_rows:
        if "id" not in row or "gloss" not in row:
            raise LexiconError(f"{concepts_path}: concept row missing id or gloss")
        cid = str(row["id"])
        if cid in seen:
            raise LexiconError(f"duplicate concept id {cid!r}")
        seen.add(cid)
        if cid not in vectors:
            raise LexiconError(f"missing embedding for concept {cid!r}")
        need = float(row.get("need_weight", 1.0))
        concepts.append(Concept(id=cid, gloss=str(row["gloss"]),
                                embedding=vectors[cid], need_weight=need))
    return Universe(concepts)


def _read_tsv(path, required, optional=()):
    path = Path(path)
    if not path.exists():
        raise LexiconError(f"file not found: {path}")
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle, delimiter="\t")
        try:
            header = next(reader)
        except StopIteration:
            raise LexiconError(f"{path}: empty file") from None
        for column in required:
            if column not in header:
                raise LexiconError(f"{path}: missing column {column!r}")
        for column in header:
            if column not in required and column not in optional:
                raise LexiconError(f"{path}: unexpected column {column!r}")
        index = {column: header.index(column) for column in header}
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(header):
                raise LexiconError(
                    f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            rows.append((lineno, {column: row[index[column]] for column in header}))
    return rows


def _parse_float(path, lineno, name, text):
    try:
        return float(text)
    except ValueError:
        raise LexiconError(f"{path}:{lineno}: {name} is not a number: {text!r}") from None


def load_lexicon(lexicon_path, universe: Universe, separator: str = " ",
                 head_position: str = HEAD_FINAL,
                 length_mode: str = LENGTH_ORTHOGRAPHIC) -> Lexicon:
    """Load and validate the existing lexicon from its TSV file."""
    rows = _read_tsv(lexicon_path, _LEXICON_COLUMNS, optional=("length",))
    entries = []
    for lineno, row in rows:
        surface = row["surface"]
        constituents = tuple(c for c in row["constituents"].split("|") if c) \
            if row["constituents"] else ()
        if not constituents:
            constituents = (surface,)
        classes = frozenset(c.strip() for c in row["word_classes"].split(",")
                            if c.strip())
        if length_mode == LENGTH_PROVIDED:
            if "length" not in row:
                raise LexiconError(
                    f"{lexicon_path}: length_mode=provided requires a "
                    "'length' column")
            length = int(_parse_float(lexicon_path, lineno, "length", row["length"]))
        else:
            length = len(surface)
        form = Form(surface=surface, constituents=constituents,
                    length_units=length, word_classes=classes)
        entries.append(LexiconEntry(
            form=form,
            concept_id=row["concept_id"],
            form_frequency=_parse_float(lexicon_path, lineno, "form_freq",
                                        row["form_freq"]),
            sense_frequency=_parse_float(lexicon_path, lineno, "sense_freq",
                                         row["sense_freq"]),
        ))
    return Lexicon(entries, universe, separator=separator,
                   head_position=head_position, length_mode=length_mode)


def load_encoding(encoding_path, lexicon: Lexicon, universe: Universe) -> Encoding:
    """Load and validate an encoding of emerging concepts from its TSV file."""
    rows = _read_tsv(encoding_path, _ENCODING_COLUMNS)
    items = []
    for lineno, row in rows:
        strategy_code = row["strategy"].strip().upper()
        if strategy_code not in ("R", "C"):
            raise LexiconError(
                f"{encoding_path}:{lineno}: strategy must be R or C, "
                f"got {row['strategy']!r}")
        constituents = tuple(c for c in row["constituents"].split("|") if c) \
            if row["constituents"] else ()
        surface = row["surface"]
        if strategy_code == "R":
            # Reuse of an existing form: the label resolves in the lexicon.
            if not surface:
                raise LexiconError(f"{encoding_path}:{lineno}: empty surface")
            if surface not in lexicon:
                raise LexiconError(
                    f"{encoding_path}:{lineno}: reused form {surface!r} is "
                    "not in the lexicon")
            form = lexicon.form(surface)
            strategy = STRATEGY_REUSE
        else:
            if len(constituents) != 2:
                raise LexiconError(
                    f"{encoding_path}:{lineno}: combinations take exactly "
                    f"two constituents, got {len(constituents)}")
            if not surface:
                surface = constituents[0] + lexicon.separator + constituents[1]
            if lexicon.length_mode == LENGTH_PROVIDED:
                length = sum(lexicon.form(c).length_units for c in constituents
                             if c in lexicon)
            else:
                length = len(surface)
            form = Form(surface=surface, constituents=constituents,
                        length_units=length)
            strategy = STRATEGY_COMBINATION
        items.append(EncodingItem(concept_id=row["concept_id"], form=form,
                                  strategy=strategy))
    return make_encoding(items, lexicon, universe)


def save_lexicon(lexicon: Lexicon, path) -> None:
    """Write a lexicon back to its TSV format (round-trips exactly)."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, delimiter="\t", lineterminator="\n")
        header = list(_LEXICON_COLUMNS)
        if lexicon.length_mode == LENGTH_PROVIDED:
            header.append("length")
        writer.writerow(header)
        for entry in lexicon.entries:
            form = entry.form
            row = [
                form.surface,
                entry.concept_id,
                repr(entry.form_frequency),
                repr(entry.sense_frequency),
                ",".join(sorted(form.word_classes)),
                "|".join(form.constituents) if form.is_combination else "",
            ]
            if lexicon.length_mode == LENGTH_PROVIDED:
                row.append(str(form.length_units))
            writer.writerow(row)


def save_encoding(encoding: Encoding, path) -> None:
    """Write an encoding to its TSV format."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, delimiter="\t", lineterminator="\n")
        writer.writerow(_ENCODING_COLUMNS)
        for item in encoding.items:
            writer.writerow([
                item.concept_id,
                item.form.surface,
                "|".join(item.form.constituents) if item.form.is_combination else "",
                "R" if item.strategy == STRATEGY_REUSE else "C",
            ])
