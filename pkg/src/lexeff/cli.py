"""Command-line interface.

Subcommands: validate, costs, frontier, loss, baselines, taxonomy, compare,
run. Options may come from a --config file of key=value lines; explicit
flags override file values. Exit codes: 0 ok, 1 validation failure,
2 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from lexeff import __version__, pipeline
from lexeff.baselines import (KIND_NEAR_SYNONYM, KIND_RANDOM,
                              NearSynonymParams, ReplicateSpec,
                              baseline_summary)
from lexeff.config import (AnalysisConfig, ConfigError, build_config,
                           parse_beta_grid, read_config_file)
from lexeff.costs import CostPoint, item_surprisals
from lexeff.frontier import (CandidateSpace, FrontierParams, efficiency_loss,
                             estimate_frontier, item_efficiency_loss)
from lexeff.lexicon import LexiconError, joint_distribution, need_marginal
from lexeff.pipeline import StageError, validate, write_tsv
from lexeff.stats import StatsError, bootstrap_ci, t_test_pooled
from lexeff.taxonomy import TaxonomyError, leacock_chodorow, wu_palmer

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


def _config_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path,
                        help="key=value config file; flags override it")
    paths = parser.add_argument_group("inputs")
    for name in ("concepts", "embeddings", "lexicon", "encoding", "taxonomy",
                 "antonyms"):
        paths.add_argument(f"--{name}", type=Path)
    model = parser.add_argument_group("model")
    model.add_argument("--gamma", type=float)
    model.add_argument("--beta-grid", dest="beta_grid", type=parse_beta_grid,
                       metavar="START:STOP:STEP|B1,B2,...")
    model.add_argument("--separator")
    model.add_argument("--head-position", dest="head_position",
                       choices=("final", "initial"))
    model.add_argument("--length-mode", dest="length_mode",
                       choices=("orthographic", "provided"))
    model.add_argument("--mode", choices=("corpus", "relabeled"))
    model.add_argument("--smoothing", dest="smoothing", action="store_const",
                       const=True)
    model.add_argument("--no-smoothing", dest="smoothing",
                       action="store_const", const=False)
    model.add_argument("--search-mode", dest="search_mode",
                       choices=("greedy", "exhaustive"))
    sampling = parser.add_argument_group("sampling")
    sampling.add_argument("--k", type=int)
    sampling.add_argument("--replicates", type=int)
    sampling.add_argument("--seed", type=int)
    sampling.add_argument("--bootstrap-resamples", dest="bootstrap_resamples",
                          type=int)
    sampling.add_argument("--threads", type=int)
    parser.add_argument("--out-dir", dest="out_dir", type=Path)


_CONFIG_KEYS = ("concepts", "embeddings", "lexicon", "encoding", "taxonomy",
                "antonyms", "gamma", "beta_grid", "separator", "head_position",
                "length_mode", "mode", "smoothing", "search_mode", "k",
                "replicates", "seed", "bootstrap_resamples", "threads",
                "out_dir")


def _resolve_config(args) -> AnalysisConfig:
    file_values = read_config_file(args.config) if args.config else {}
    overrides = {key: getattr(args, key, None) for key in _CONFIG_KEYS}
    if getattr(args, "plot", False):
        overrides["plot"] = True
    return build_config(file_values, overrides)


def _fail(message: str, code: int) -> int:
    print(f"lexeff: error: {message}", file=sys.stderr)
    return code


def cmd_validate(args) -> int:
    config = _resolve_config(args)
    diagnostics = validate(config)
    for line in diagnostics:
        print(line)
    if diagnostics:
        return EXIT_VALIDATION
    print("ok")
    return EXIT_OK


def cmd_costs(args) -> int:
    config = _resolve_config(args)
    inputs = pipeline.load_inputs(config)
    weights = joint_distribution(inputs.encoding, inputs.lexicon,
                                 inputs.universe, inputs.model)
    surprisals = item_surprisals(inputs.encoding, inputs.lexicon,
                                 inputs.universe, inputs.params, inputs.cache)
    lengths = np.array([i.form.length_units for i in inputs.encoding.items],
                       dtype=np.float64)
    cost = CostPoint(avg_length=float(weights @ lengths),
                     info_loss=float(weights @ surprisals))
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_tsv(out / "costs.tsv", ("avg_length", "info_loss"),
              [(cost.avg_length, cost.info_loss)])
    write_tsv(out / "cost_items.tsv",
              ("surface", "concept_id", "length", "surprisal", "weight"),
              [(i.form.surface, i.concept_id, i.form.length_units, s, w)
               for i, s, w in zip(inputs.encoding.items, surprisals, weights)])
    print(out / "costs.tsv")
    print(out / "cost_items.tsv")
    return EXIT_OK


def _frontier_from_inputs(inputs, config):
    need = need_marginal(inputs.encoding, inputs.lexicon, inputs.universe,
                         inputs.model)
    params = FrontierParams(beta_grid=config.beta_grid,
                            search_mode=config.search_mode)
    space = CandidateSpace(inputs.lexicon, inputs.universe, inputs.params,
                           inputs.cache)
    return estimate_frontier(inputs.encoding.concept_ids(), inputs.lexicon,
                             inputs.universe, inputs.params, params, need,
                             space=space), space


def cmd_frontier(args) -> int:
    config = _resolve_config(args)
    inputs = pipeline.load_inputs(config)
    frontier, _space = _frontier_from_inputs(inputs, config)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_tsv(out / "frontier.tsv", ("beta", "avg_length", "info_loss"),
              [(p.beta, p.cost.avg_length, p.cost.info_loss)
               for p in frontier.points])
    write_tsv(out / "frontier_pareto.tsv", ("avg_length", "info_loss"),
              [(p.avg_length, p.info_loss) for p in frontier.pareto_points])
    print(out / "frontier.tsv")
    print(out / "frontier_pareto.tsv")
    if args.dump_labels:
        write_tsv(out / "frontier_labels.tsv",
                  ("beta", "concept_id", "surface"),
                  [(p.beta, cid, form.surface)
                   for p in frontier.points for cid, form in p.labels])
        print(out / "frontier_labels.tsv")
    return EXIT_OK


def cmd_loss(args) -> int:
    config = _resolve_config(args)
    inputs = pipeline.load_inputs(config)
    frontier, _space = _frontier_from_inputs(inputs, config)
    rows = []
    loss = efficiency_loss(inputs.encoding, frontier, inputs.lexicon,
                           inputs.universe, inputs.model, inputs.params,
                           inputs.cache)
    rows.append(("encoding", loss.epsilon, loss.argmin_beta))
    if args.per_item:
        for item in inputs.encoding.items:
            item_loss = item_efficiency_loss(item.form, item.concept_id,
                                             frontier, inputs.lexicon,
                                             inputs.universe, inputs.params,
                                             inputs.cache)
            rows.append((item.concept_id, item_loss.epsilon,
                         item_loss.argmin_beta))
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_tsv(out / "loss.tsv", ("id", "epsilon", "argmin_beta"), rows)
    print(out / "loss.tsv")
    return EXIT_OK


def cmd_baselines(args) -> int:
    config = _resolve_config(args)
    inputs = pipeline.load_inputs(config)
    frontier, space = _frontier_from_inputs(inputs, config)
    spec = ReplicateSpec(n_replicates=config.replicates, seed=config.seed)
    ns_params = NearSynonymParams(k=config.k,
                                  antonym_pairs=inputs.antonym_pairs)
    summary = baseline_summary(
        inputs.encoding, inputs.lexicon, inputs.universe, inputs.model,
        inputs.params, frontier, args.kind, spec, ns_params=ns_params,
        bootstrap_resamples=config.bootstrap_resamples, threads=config.threads,
        space=space, return_replicates=args.dump is not None)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_tsv(out / "baselines.tsv",
              ("kind", "mean_loss", "ci_lo", "ci_hi", "n"),
              [(summary.kind, summary.mean_loss, summary.ci_lo, summary.ci_hi,
                summary.n_replicates)])
    print(out / "baselines.tsv")
    if args.dump is not None:
        write_tsv(args.dump,
                  ("replicate", "epsilon", "avg_length", "info_loss"),
                  [(r, e, l, i) for r, (e, l, i) in enumerate(
                      zip(summary.epsilons, summary.avg_lengths,
                          summary.info_losses))])
        print(args.dump)
    return EXIT_OK


def cmd_taxonomy(args) -> int:
    config = _resolve_config(args)
    if config.taxonomy is None:
        return _fail("taxonomy: no taxonomy file configured", EXIT_VALIDATION)
    inputs = pipeline.load_inputs(config)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    bundle = pipeline._Bundle(out)
    pipeline._classification_stage(bundle, inputs)
    print(out / "classifications.tsv")
    if args.per_sense:
        rows = []
        for item in inputs.encoding.items:
            if item.form.is_combination:
                surface = inputs.lexicon.head_constituent(item.form)
            else:
                surface = item.form.surface
            if surface not in inputs.lexicon:
                continue
            for sense, _ in inputs.lexicon.senses(surface):
                try:
                    wup = wu_palmer(item.concept_id, sense, inputs.graph)
                    lch = leacock_chodorow(item.concept_id, sense, inputs.graph)
                except TaxonomyError:
                    continue
                rows.append((item.concept_id, sense, wup, lch))
        write_tsv(out / "taxonomy_senses.tsv",
                  ("item_id", "sense_id", "wup", "lch"), rows)
        print(out / "taxonomy_senses.tsv")
    return EXIT_OK


def _read_column(path, column):
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle, delimiter="\t")
        if reader.fieldnames is None or column not in reader.fieldnames:
            raise LexiconError(f"{path}: no column {column!r}")
        values = []
        for row in reader:
            # loss.tsv mixes one whole-encoding row with the item rows.
            if "id" in row and row["id"] == "encoding":
                continue
            values.append(float(row[column]))
    return values


def cmd_compare(args) -> int:
    a = _read_column(args.file_a, args.column)
    b = _read_column(args.file_b, args.column)
    result = t_test_pooled(a, b)
    ci_a = bootstrap_ci(a, resamples=args.bootstrap_resamples or 1000,
                        seed=args.seed or 0, stream=("compare", "a"))
    ci_b = bootstrap_ci(b, resamples=args.bootstrap_resamples or 1000,
                        seed=args.seed or 0, stream=("compare", "b"))
    header = ("t", "df", "p", "mean_a", "mean_b", "ci_a_lo", "ci_a_hi",
              "ci_b_lo", "ci_b_hi", "n_a", "n_b")
    row = (result.t, result.df, result.p_two_sided, float(np.mean(a)),
           float(np.mean(b)), ci_a[0], ci_a[1], ci_b[0], ci_b[1],
           len(a), len(b))
    if args.out:
        write_tsv(args.out, header, [row])
        print(args.out)
    else:
        print("\t".join(header))
        print("\t".join(pipeline._fmt(v) for v in row))
    return EXIT_OK


def cmd_run(args) -> int:
    config = _resolve_config(args)
    artifacts = pipeline.run_pipeline(config)
    for name in sorted(artifacts):
        print(artifacts[name])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lexeff",
        description="Communicative-efficiency analysis of lexicalization "
                    "strategies (word reuse vs. combination).")
    parser.add_argument("--version", action="version",
                        version=f"lexeff {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check input files and configuration")
    _config_options(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("costs", help="encoding and per-item communicative costs")
    _config_options(p)
    p.set_defaults(func=cmd_costs)

    p = sub.add_parser("frontier", help="estimate the optimal-cost frontier")
    _config_options(p)
    p.add_argument("--dump-labels", action="store_true",
                   help="also write per-beta optimal labels")
    p.set_defaults(func=cmd_frontier)

    p = sub.add_parser("loss", help="efficiency loss against the frontier")
    _config_options(p)
    p.add_argument("--per-item", action="store_true",
                   help="also write per-item losses")
    p.set_defaults(func=cmd_loss)

    p = sub.add_parser("baselines", help="baseline encodings and their losses")
    _config_options(p)
    p.add_argument("--kind", choices=(KIND_NEAR_SYNONYM, KIND_RANDOM),
                   required=True)
    p.add_argument("--dump", type=Path, help="per-replicate dump TSV path")
    p.set_defaults(func=cmd_baselines)

    p = sub.add_parser("taxonomy", help="literal/endocentric classification")
    _config_options(p)
    p.add_argument("--per-sense", action="store_true",
                   help="also write per-sense distance table")
    p.set_defaults(func=cmd_taxonomy)

    p = sub.add_parser("compare", help="two-sample comparison of item losses")
    p.add_argument("file_a", type=Path)
    p.add_argument("file_b", type=Path)
    p.add_argument("--column", default="epsilon")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bootstrap-resamples", dest="bootstrap_resamples",
                   type=int, default=1000)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("run", help="run the full pipeline and write the bundle")
    _config_options(p)
    p.add_argument("--plot", action="store_true",
                   help="render frontier and loss figures alongside the TSVs")
    p.set_defaults(func=cmd_run)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StageError as exc:
        print(f"lexeff: error[{exc.stage}]: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ConfigError, LexiconError, TaxonomyError, StatsError) as exc:
        return _fail(str(exc), EXIT_VALIDATION)
    except OSError as exc:
        return _fail(str(exc), EXIT_RUNTIME)


if __name__ == "__main__":
    sys.exit(main())
