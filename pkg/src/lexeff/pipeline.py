"""End-to-end analysis pipeline: validation, stage orchestration, reports.

``run_pipeline`` produces a report bundle in the output directory:

    costs.tsv            encoding-level average length and information loss
    cost_items.tsv       per-item length, surprisal and joint weight
    frontier.tsv         optimal cost per tradeoff parameter (plus
                         frontier_pareto.tsv, the dominance-filtered curve)
    loss.tsv             encoding-level and per-item efficiency losses
    baselines.tsv        near-synonym and random baseline summaries
    classifications.tsv  literal / endocentric classifications per item
    comparisons.tsv      strategy and literalness t-test comparisons
    manifest.json        all parameters plus input content hashes

Every output is a pure function of (inputs, config); rerunning an identical
config reproduces the bundle byte for byte. A stage failure removes the
files written so far and surfaces a stage-tagged error.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from lexeff import __version__
from lexeff.baselines import (KIND_NEAR_SYNONYM, KIND_RANDOM,
                              NearSynonymParams, ReplicateSpec,
                              baseline_summary, load_antonyms)
from lexeff.config import AnalysisConfig, ConfigError
from lexeff.costs import CostPoint, item_surprisals
from lexeff.frontier import (CandidateSpace, FrontierParams,
                             efficiency_loss, estimate_frontier,
                             item_efficiency_loss)
from lexeff.lexicon import (Encoding, Lexicon, LexiconError,
                            NeedProductionModel, STRATEGY_COMBINATION,
                            STRATEGY_REUSE, Universe, joint_distribution,
                            load_encoding, load_lexicon, load_universe,
                            need_marginal)
from lexeff.semantics import ListenerParams, PrototypeCache
from lexeff.stats import StatsError, bootstrap_ci, t_test_pooled
from lexeff.taxonomy import (ENDOCENTRIC, TaxonomyError, TaxonomyGraph,
                             augment_reuse_with_heads, classify_compound,
                             is_literal, leacock_chodorow, wu_palmer)


class StageError(RuntimeError):
    """A pipeline stage failed; carries the stage name and exit semantics."""

    def __init__(self, stage: str, message: str, exit_code: int = 2):
        super().__init__(f"{stage}: {message}")
        self.stage = stage
        self.exit_code = exit_code


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def write_tsv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, delimiter="\t", lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(65536), b""):
            digest.update(block)
    return digest.hexdigest()


@dataclass
class LoadedInputs:
    universe: Universe
    lexicon: Lexicon
    encoding: Encoding
    graph: TaxonomyGraph | None
    antonym_pairs: frozenset
    model: NeedProductionModel
    params: ListenerParams
    cache: PrototypeCache


def load_inputs(config: AnalysisConfig) -> LoadedInputs:
    """Load and cross-validate every input named by the config."""
    for name in ("concepts", "embeddings", "lexicon", "encoding"):
        if getattr(config, name) is None:
            raise ConfigError(f"missing required input path: {name}")
    universe = load_universe(config.concepts, config.embeddings)
    lexicon = load_lexicon(config.lexicon, universe,
                           separator=config.separator,
                           head_position=config.head_position,
                           length_mode=config.length_mode)
    encoding = load_encoding(config.encoding, lexicon, universe)
    graph = TaxonomyGraph.load(config.taxonomy, universe) \
        if config.taxonomy else None
    antonyms = load_antonyms(config.antonyms) if config.antonyms else frozenset()
    model = NeedProductionModel(mode=config.mode, smoothing=config.smoothing)
    params = ListenerParams(gamma=config.gamma)
    cache = PrototypeCache(lexicon, universe)
    return LoadedInputs(universe=universe, lexicon=lexicon, encoding=encoding,
                        graph=graph, antonym_pairs=antonyms, model=model,
                        params=params, cache=cache)


def validate(config: AnalysisConfig) -> list[str]:
    """Diagnostics for every input problem found; empty means valid."""
    diagnostics = []
    try:
        config.validate()
    except ConfigError as exc:
        return [f"config: {exc}"]
    for name in ("concepts", "embeddings", "lexicon", "encoding"):
        path = getattr(config, name)
        if path is None:
            diagnostics.append(f"config: missing required input path: {name}")
        elif not Path(path).exists():
            diagnostics.append(f"{name}: file not found: {path}")
    for name in ("taxonomy", "antonyms"):
        path = getattr(config, name)
        if path is not None and not Path(path).exists():
            diagnostics.append(f"{name}: file not found: {path}")
    if diagnostics:
        return diagnostics
    try:
        universe = load_universe(config.concepts, config.embeddings)
    except LexiconError as exc:
        return [f"concepts: {exc}"]
    try:
        lexicon = load_lexicon(config.lexicon, universe,
                               separator=config.separator,
                               head_position=config.head_position,
                               length_mode=config.length_mode)
    except LexiconError as exc:
        return [f"lexicon: {exc}"]
    try:
        load_encoding(config.encoding, lexicon, universe)
    except LexiconError as exc:
        diagnostics.append(f"encoding: {exc}")
    if config.taxonomy:
        try:
            TaxonomyGraph.load(config.taxonomy, universe)
        except TaxonomyError as exc:
            diagnostics.append(f"taxonomy: {exc}")
    if config.antonyms:
        try:
            load_antonyms(config.antonyms)
        except LexiconError as exc:
            diagnostics.append(f"antonyms: {exc}")
    return diagnostics


class _Bundle:
    """Tracks written artifacts so a failed run leaves nothing behind."""

    def __init__(self, out_dir: Path):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.paths: dict[str, Path] = {}

    def path(self, name: str) -> Path:
        path = self.out_dir / name
        self.paths[name] = path
        return path

    def discard_all(self):
        for path in self.paths.values():
            try:
                path.unlink(missing_ok=True)
            except OSError:
                pass


def _cost_stage(bundle, inputs, config):
    weights = joint_distribution(inputs.encoding, inputs.lexicon,
                                 inputs.universe, inputs.model)
    surprisals = item_surprisals(inputs.encoding, inputs.lexicon,
                                 inputs.universe, inputs.params, inputs.cache)
    lengths = np.array([item.form.length_units
                        for item in inputs.encoding.items], dtype=np.float64)
    cost = CostPoint(avg_length=float(weights @ lengths),
                     info_loss=float(weights @ surprisals))
    write_tsv(bundle.path("costs.tsv"), ("avg_length", "info_loss"),
              [(cost.avg_length, cost.info_loss)])
    write_tsv(bundle.path("cost_items.tsv"),
              ("surface", "concept_id", "length", "surprisal", "weight"),
              [(item.form.surface, item.concept_id, item.form.length_units,
                s, w)
               for item, s, w in zip(inputs.encoding.items, surprisals, weights)])
    return cost


def _frontier_stage(bundle, inputs, config, space):
    need = need_marginal(inputs.encoding, inputs.lexicon, inputs.universe,
                         inputs.model)
    frontier_params = FrontierParams(beta_grid=config.beta_grid,
                                     search_mode=config.search_mode)
    frontier = estimate_frontier(inputs.encoding.concept_ids(), inputs.lexicon,
                                 inputs.universe, inputs.params,
                                 frontier_params, need, space=space)
    write_tsv(bundle.path("frontier.tsv"),
              ("beta", "avg_length", "info_loss"),
              [(p.beta, p.cost.avg_length, p.cost.info_loss)
               for p in frontier.points])
    write_tsv(bundle.path("frontier_pareto.tsv"), ("avg_length", "info_loss"),
              [(p.avg_length, p.info_loss) for p in frontier.pareto_points])
    return frontier


def _loss_stage(bundle, inputs, frontier):
    encoding_loss = efficiency_loss(inputs.encoding, frontier, inputs.lexicon,
                                    inputs.universe, inputs.model,
                                    inputs.params, inputs.cache)
    rows = [("encoding", encoding_loss.epsilon, encoding_loss.argmin_beta)]
    item_losses = {}
    for item in inputs.encoding.items:
        loss = item_efficiency_loss(item.form, item.concept_id, frontier,
                                    inputs.lexicon, inputs.universe,
                                    inputs.params, inputs.cache)
        item_losses[item.concept_id] = loss
        rows.append((item.concept_id, loss.epsilon, loss.argmin_beta))
    write_tsv(bundle.path("loss.tsv"), ("id", "epsilon", "argmin_beta"), rows)
    return encoding_loss, item_losses


def _baseline_stage(bundle, inputs, config, frontier, space):
    spec = ReplicateSpec(n_replicates=config.replicates, seed=config.seed)
    ns_params = NearSynonymParams(k=config.k,
                                  antonym_pairs=inputs.antonym_pairs)
    summaries = []
    for kind in (KIND_NEAR_SYNONYM, KIND_RANDOM):
        summaries.append(baseline_summary(
            inputs.encoding, inputs.lexicon, inputs.universe, inputs.model,
            inputs.params, frontier, kind, spec, ns_params=ns_params,
            bootstrap_resamples=config.bootstrap_resamples,
            threads=config.threads, space=space))
    write_tsv(bundle.path("baselines.tsv"),
              ("kind", "mean_loss", "ci_lo", "ci_hi", "n"),
              [(s.kind, s.mean_loss, s.ci_lo, s.ci_hi, s.n_replicates)
               for s in summaries])
    return summaries


def _nearest_sense_distances(concept_id, senses, graph):
    wup = lch = None
    for sense, _ in senses:
        try:
            w = wu_palmer(concept_id, sense, graph)
            l = leacock_chodorow(concept_id, sense, graph)
        except TaxonomyError:
            continue
        wup = w if wup is None else max(wup, w)
        lch = l if lch is None else max(lch, l)
    return wup, lch


def _classification_stage(bundle, inputs):
    graph = inputs.graph
    rows = []
    classes = {}
    for item in inputs.encoding.items:
        if item.form.is_combination:
            head = inputs.lexicon.head_constituent(item.form)
            compound_class = classify_compound(item.concept_id, item.form,
                                               inputs.lexicon, graph)
            literal = compound_class == ENDOCENTRIC
            senses = inputs.lexicon.senses(head) if head in inputs.lexicon else ()
        else:
            literal = is_literal(item.concept_id, item.form, inputs.lexicon,
                                 graph)
            compound_class = ""
            senses = inputs.lexicon.senses(item.form.surface)
        wup, lch = _nearest_sense_distances(item.concept_id, senses, graph)
        classes[item.concept_id] = (literal, compound_class)
        rows.append((item.concept_id, int(literal), compound_class,
                     "" if wup is None else wup, "" if lch is None else lch))
    write_tsv(bundle.path("classifications.tsv"),
              ("item_id", "literal", "compound_class", "wup_to_nearest_sense",
               "lch_to_nearest_sense"), rows)
    return classes


def _comparison_rows(name, group_a, group_b, seed, resamples):
    if len(group_a) < 2 or len(group_b) < 2:
        return []
    try:
        result = t_test_pooled(group_a, group_b)
    except StatsError:
        return []
    ci_a = bootstrap_ci(group_a, resamples=resamples, seed=seed,
                        stream=("compare", name, "a"))
    ci_b = bootstrap_ci(group_b, resamples=resamples, seed=seed,
                        stream=("compare", name, "b"))
    return [(name, len(group_a), len(group_b),
             float(np.mean(group_a)), float(np.mean(group_b)),
             result.t, result.df, result.p_two_sided,
             ci_a[0], ci_a[1], ci_b[0], ci_b[1])]


def _comparison_stage(bundle, inputs, config, frontier, item_losses, classes):
    reuse = [i for i in inputs.encoding.items if i.strategy == STRATEGY_REUSE]
    compound = [i for i in inputs.encoding.items
                if i.strategy == STRATEGY_COMBINATION]
    eps = {cid: loss.epsilon for cid, loss in item_losses.items()}
    rows = []
    rows += _comparison_rows(
        "strategy_length",
        [float(i.form.length_units) for i in reuse],
        [float(i.form.length_units) for i in compound],
        config.seed, config.bootstrap_resamples)
    rows += _comparison_rows(
        "strategy_loss",
        [eps[i.concept_id] for i in reuse],
        [eps[i.concept_id] for i in compound],
        config.seed, config.bootstrap_resamples)
    if classes is not None:
        literal_eps = [eps[i.concept_id] for i in reuse
                       if classes[i.concept_id][0]]
        nonliteral_eps = [eps[i.concept_id] for i in reuse
                          if not classes[i.concept_id][0]]
        rows += _comparison_rows("literal_loss", literal_eps, nonliteral_eps,
                                 config.seed, config.bootstrap_resamples)
        rows += _comparison_rows(
            "endocentric_loss",
            [eps[i.concept_id] for i in compound
             if classes[i.concept_id][1] == ENDOCENTRIC],
            [eps[i.concept_id] for i in compound
             if classes[i.concept_id][1] != ENDOCENTRIC],
            config.seed, config.bootstrap_resamples)
        if compound:
            # Head words of attested compounds give extra reuse-style items.
            heads, _dropped = augment_reuse_with_heads(
                Encoding(tuple(compound)), inputs.lexicon)
            literal_heads, nonliteral_heads = [], []
            for item in heads.items:
                loss = item_efficiency_loss(item.form, item.concept_id,
                                            frontier, inputs.lexicon,
                                            inputs.universe, inputs.params,
                                            inputs.cache)
                if is_literal(item.concept_id, item.form, inputs.lexicon,
                              inputs.graph):
                    literal_heads.append(loss.epsilon)
                else:
                    nonliteral_heads.append(loss.epsilon)
            rows += _comparison_rows("literal_heads_loss", literal_heads,
                                     nonliteral_heads, config.seed,
                                     config.bootstrap_resamples)
    write_tsv(bundle.path("comparisons.tsv"),
              ("comparison", "n_a", "n_b", "mean_a", "mean_b", "t", "df", "p",
               "ci_a_lo", "ci_a_hi", "ci_b_lo", "ci_b_hi"), rows)


def _manifest_stage(bundle, config: AnalysisConfig):
    inputs = {}
    for name in ("concepts", "embeddings", "lexicon", "encoding", "taxonomy",
                 "antonyms"):
        path = getattr(config, name)
        if path is not None:
            inputs[name] = {"path": str(path), "sha256": sha256_file(path)}
    manifest = {
        "tool": {"name": "lexeff", "version": __version__},
        "parameters": {
            "gamma": config.gamma,
            "beta_grid": {"start": config.beta_grid[0],
                          "stop": config.beta_grid[-1],
                          "size": len(config.beta_grid)},
            "separator": config.separator,
            "head_position": config.head_position,
            "length_mode": config.length_mode,
            "mode": config.mode,
            "smoothing": config.smoothing,
            "k": config.k,
            "replicates": config.replicates,
            "seed": config.seed,
            "bootstrap_resamples": config.bootstrap_resamples,
            "search_mode": config.search_mode,
            "threads": config.threads,
        },
        "inputs": inputs,
    }
    with open(bundle.path("manifest.json"), "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _plot_stage(bundle, inputs, config, cost, frontier, encoding_loss,
                item_losses, summaries):
    from lexeff import plots
    plots.save_frontier_plot(frontier, cost, summaries,
                             bundle.path("frontier.svg"))
    plots.save_loss_plot(encoding_loss.epsilon, summaries,
                         bundle.path("losses.svg"))
    plots.save_item_loss_plot(
        [cid for cid in item_losses],
        [loss.epsilon for loss in item_losses.values()],
        bundle.path("item_losses.svg"))


def run_pipeline(config: AnalysisConfig) -> dict[str, Path]:
    """Run every stage and return the artifact paths, keyed by file name."""
    def staged(stage, fn, *args, exit_code=2, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ConfigError, LexiconError, TaxonomyError, StatsError) as exc:
            raise StageError(stage, str(exc),
                             exit_code=1 if exit_code == 1 else 2) from exc
        except StageError:
            raise
        except Exception as exc:
            raise StageError(stage, f"{type(exc).__name__}: {exc}") from exc

    inputs = staged("load", load_inputs, config, exit_code=1)
    bundle = _Bundle(config.out_dir)
    try:
        space = staged("frontier", CandidateSpace, inputs.lexicon,
                       inputs.universe, inputs.params, inputs.cache)
        cost = staged("costs", _cost_stage, bundle, inputs, config)
        frontier = staged("frontier", _frontier_stage, bundle, inputs, config,
                          space)
        encoding_loss, item_losses = staged("loss", _loss_stage, bundle,
                                            inputs, frontier)
        summaries = staged("baselines", _baseline_stage, bundle, inputs,
                           config, frontier, space)
        classes = None
        if inputs.graph is not None:
            classes = staged("taxonomy", _classification_stage, bundle, inputs)
        staged("compare", _comparison_stage, bundle, inputs, config, frontier,
               item_losses, classes)
        staged("manifest", _manifest_stage, bundle, config)
        if config.plot:
            staged("plot", _plot_stage, bundle, inputs, config, cost, frontier,
                   encoding_loss, item_losses, summaries)
    except StageError:
        bundle.discard_all()
        raise
    return dict(bundle.paths)
