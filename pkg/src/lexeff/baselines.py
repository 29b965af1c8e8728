"""Near-synonym and random baseline encodings with reproducible sampling.

A near-synonym baseline replaces each attested label with a draw from its
near-synonym set: the k nearest atomic forms per constituent by prototype
cosine distance, excluding antonyms, with head replacements required to
share a word class with the head; the set holds the modifier/head
combinations plus the head synonyms alone. A random baseline replaces each
label with a uniform draw over all atomic forms and ordered two-form
combinations.

Every draw is a pure function of (seed, concept id, replicate index) via the
counter-based streams in :mod:`lexeff.rng`, so replicate r can be produced
alone, in vectorized blocks, or from any number of worker threads, always
with identical results.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from lexeff import rng, stats
from lexeff.frontier import (CandidateSpace, FrontierResult,
                             NEGATIVE_LOSS_TOLERANCE, batch_efficiency_gaps)
from lexeff.lexicon import (Encoding, EncodingItem, Form, Lexicon,
                            LexiconError, NeedProductionModel,
                            STRATEGY_COMBINATION, STRATEGY_REUSE, Universe)
from lexeff.semantics import ListenerParams, bit_scores, log2_normalizers

logger = logging.getLogger(__name__)

KIND_NEAR_SYNONYM = "near-synonym"
KIND_RANDOM = "random"


@dataclass(frozen=True)
class NearSynonymParams:
    """Construction parameters for near-synonym sets."""

    k: int = 5
    antonym_pairs: frozenset[tuple[str, str]] = frozenset()
    respect_word_class: bool = True

    def __post_init__(self):
        if self.k < 1:
            raise LexiconError("k must be >= 1")

    def are_antonyms(self, a: str, b: str) -> bool:
        return (a, b) in self.antonym_pairs or (b, a) in self.antonym_pairs


def load_antonyms(path) -> frozenset[tuple[str, str]]:
    """Antonym pairs from a two-column TSV (one unordered pair per line)."""
    pairs = set()
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise LexiconError(
                    f"{path}:{lineno}: expected two tab-separated surfaces")
            pairs.add(tuple(sorted((fields[0], fields[1]))))
    return frozenset(pairs)


@dataclass(frozen=True)
class ReplicateSpec:
    """How many baseline replicates to draw and from which seed."""

    n_replicates: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if self.n_replicates < 1:
            raise LexiconError("n_replicates must be >= 1")


def _nearest_forms(constituent: str, lexicon: Lexicon,
                   space: CandidateSpace, params: NearSynonymParams,
                   check_classes: bool) -> list[str]:
    """The k nearest atomic surfaces to a constituent's prototype."""
    target = space.cache.vector(constituent)
    norm = np.linalg.norm(target)
    if norm == 0.0:
        raise LexiconError(f"zero-norm prototype for {constituent!r}")
    proto_norms = np.linalg.norm(space.prototypes, axis=1)
    distances = 1.0 - (space.prototypes @ target) / (proto_norms * norm)
    own_classes = lexicon.form(constituent).word_classes
    ranked = sorted(range(space.n_atomic),
                    key=lambda i: (distances[i], space.surfaces[i]))
    chosen = []
    for i in ranked:
        surface = space.surfaces[i]
        if params.are_antonyms(surface, constituent):
            continue
        if check_classes and params.respect_word_class:
            classes = lexicon.form(surface).word_classes
            # Unclassified forms act as wildcards rather than matching nothing.
            if own_classes and classes and not (classes & own_classes):
                continue
        chosen.append(surface)
        if len(chosen) == params.k:
            break
    if not chosen:
        raise LexiconError(
            f"no near-synonym candidates for {constituent!r} after filtering")
    return chosen


def near_synonym_set(item: EncodingItem, lexicon: Lexicon, universe: Universe,
                     params: NearSynonymParams,
                     space: CandidateSpace | None = None) -> tuple[Form, ...]:
    """Alternate labels for one item: modifier/head synonym combinations
    plus the head synonyms alone, ordered by surface for reproducible draws.
    """
    if space is None:
        space = CandidateSpace(lexicon, universe,
                               ListenerParams(gamma=0.0))  # gamma unused here
    form = item.form
    head = lexicon.head_constituent(form)
    modifier = lexicon.modifier_constituent(form)
    head_syns = _nearest_forms(head, lexicon, space, params, check_classes=True)
    candidates: dict[str, Form] = {}
    for surface in head_syns:
        head_form = lexicon.form(surface)
        candidates.setdefault(head_form.surface, head_form)
    if modifier is not None:
        modifier_syns = _nearest_forms(modifier, lexicon, space, params,
                                       check_classes=False)
        for mod_surface in modifier_syns:
            for head_surface in head_syns:
                if lexicon.head_position == "final":
                    combo = lexicon.make_combination(mod_surface, head_surface)
                else:
                    combo = lexicon.make_combination(head_surface, mod_surface)
                candidates.setdefault(combo.surface, combo)
    ordered = tuple(candidates[s] for s in sorted(candidates))
    if not ordered:
        raise LexiconError(f"empty near-synonym set for {form.surface!r}")
    return ordered


def _as_item(concept_id: str, form: Form) -> EncodingItem:
    strategy = STRATEGY_COMBINATION if form.is_combination else STRATEGY_REUSE
    return EncodingItem(concept_id=concept_id, form=form, strategy=strategy)


def sample_near_synonym_encoding(encoding: Encoding, lexicon: Lexicon,
                                 universe: Universe,
                                 params: NearSynonymParams,
                                 spec: ReplicateSpec, replicate_index: int,
                                 ns_sets=None,
                                 space: CandidateSpace | None = None) -> Encoding:
    """Replicate ``replicate_index`` of the near-synonym baseline."""
    if ns_sets is None:
        ns_sets = [near_synonym_set(item, lexicon, universe, params, space)
                   for item in encoding.items]
    items = []
    for item, candidates in zip(encoding.items, ns_sets):
        key = rng.stream_key(spec.seed, KIND_NEAR_SYNONYM, item.concept_id)
        pick = rng.uniform_index(key, replicate_index, len(candidates))
        items.append(_as_item(item.concept_id, candidates[pick]))
    return Encoding(tuple(items))


def sample_random_encoding(encoding: Encoding, lexicon: Lexicon,
                           spec: ReplicateSpec, replicate_index: int,
                           space: CandidateSpace | None = None,
                           universe: Universe | None = None,
                           params: ListenerParams | None = None) -> Encoding:
    """Replicate ``replicate_index`` of the uniform random baseline.

    Draws are uniform over the |F| atomic forms plus |F|^2 ordered
    combinations; the combination set is indexed arithmetically, never
    materialized.
    """
    if space is None:
        if universe is None:
            raise LexiconError("sample_random_encoding needs a universe or space")
        space = CandidateSpace(lexicon, universe,
                               params or ListenerParams(gamma=0.0))
    items = []
    for item in encoding.items:
        key = rng.stream_key(spec.seed, KIND_RANDOM, item.concept_id)
        pick = rng.uniform_index(key, replicate_index, space.n_candidates)
        items.append(_as_item(item.concept_id, space.candidate_form(pick)))
    return Encoding(tuple(items))


@dataclass
class BaselineSummary:
    """Mean efficiency loss of a baseline with its bootstrap 95% CI."""

    kind: str
    mean_loss: float
    ci_lo: float
    ci_hi: float
    n_replicates: int
    mean_avg_length: float
    mean_info_loss: float
    epsilons: np.ndarray | None = field(default=None, repr=False)
    avg_lengths: np.ndarray | None = field(default=None, repr=False)
    info_losses: np.ndarray | None = field(default=None, repr=False)


def _ns_candidate_tables(encoding, lexicon, universe, params, ns_params, space):
    """Per item: (lengths, surprisals, count) over its near-synonym set."""
    tables = []
    for item in encoding.items:
        forms = near_synonym_set(item, lexicon, universe, ns_params, space)
        vectors = []
        for form in forms:
            if form.surface in lexicon:
                vectors.append(space.cache.vector(form.surface))
            else:
                first, second = form.constituents
                vectors.append(space.cache.vector(first)
                               + space.cache.vector(second))
        scores = bit_scores(np.array(vectors), universe, params.gamma)
        lse = log2_normalizers(scores)
        s = lse - scores[:, universe.index_of(item.concept_id)]
        lengths = np.array([f.length_units for f in forms], dtype=np.float64)
        tables.append((lengths, s, len(forms)))
    return tables


def baseline_summary(encoding: Encoding, lexicon: Lexicon, universe: Universe,
                     model: NeedProductionModel, params: ListenerParams,
                     frontier: FrontierResult, kind: str, spec: ReplicateSpec,
                     ns_params: NearSynonymParams | None = None,
                     bootstrap_resamples: int = 1000, threads: int = 1,
                     space: CandidateSpace | None = None,
                     return_replicates: bool = False) -> BaselineSummary:
    """Generate baseline replicates, cost them, and summarize their losses.

    Replicates are costed under the frontier's fixed need distribution and
    reduced in replicate-index order, so the summary is bit-identical for
    any thread count.
    """
    if kind not in (KIND_NEAR_SYNONYM, KIND_RANDOM):
        raise LexiconError(f"unknown baseline kind {kind!r}")
    if set(encoding.concept_ids()) != set(frontier.concept_ids):
        raise LexiconError(
            "encoding concept set does not match the frontier's concept set")
    if space is None:
        space = CandidateSpace(lexicon, universe, params)
    concept_ids = encoding.concept_ids()
    weights = np.array([frontier.need[c] for c in concept_ids])

    if kind == KIND_NEAR_SYNONYM:
        if ns_params is None:
            ns_params = NearSynonymParams()
        tables = _ns_candidate_tables(encoding, lexicon, universe, params,
                                      ns_params, space)
    else:
        table = space.surprisal_table(concept_ids)
        lengths = space.candidate_lengths()
        tables = [(lengths, table[:, i], space.n_candidates)
                  for i in range(len(concept_ids))]

    keys = [rng.stream_key(spec.seed, kind, cid) for cid in concept_ids]
    n_rep = spec.n_replicates

    def run_chunk(start: int, stop: int):
        count = stop - start
        avg_len = np.zeros(count)
        info = np.zeros(count)
        for (lens, surps, n_cand), key, weight in zip(tables, keys, weights):
            picks = rng.uniform_indices(key, start, count, n_cand)
            avg_len += weight * lens[picks]
            info += weight * surps[picks]
        return avg_len, info

    bounds = np.linspace(0, n_rep, max(1, min(threads, n_rep)) + 1).astype(int)
    chunks = [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda c: run_chunk(*c), chunks))
    else:
        results = [run_chunk(*c) for c in chunks]
    avg_lengths = np.concatenate([r[0] for r in results])
    info_losses = np.concatenate([r[1] for r in results])

    raw = batch_efficiency_gaps(avg_lengths, info_losses, frontier)
    bad = int((raw < NEGATIVE_LOSS_TOLERANCE).sum())
    if bad:
        logger.warning("%d %s replicates had negative loss beyond tolerance; "
                       "clamped to 0", bad, kind)
    epsilons = np.maximum(raw, 0.0)

    ci_lo, ci_hi = stats.bootstrap_ci(epsilons, statistic="mean",
                                      resamples=bootstrap_resamples,
                                      seed=spec.seed,
                                      stream=("bootstrap", kind))
    return BaselineSummary(
        kind=kind,
        mean_loss=float(epsilons.mean()),
        ci_lo=ci_lo,
        ci_hi=ci_hi,
        n_replicates=n_rep,
        mean_avg_length=float(avg_lengths.mean()),
        mean_info_loss=float(info_losses.mean()),
        epsilons=epsilons if return_replicates else None,
        avg_lengths=avg_lengths if return_replicates else None,
        info_losses=info_losses if return_replicates else None,
    )
