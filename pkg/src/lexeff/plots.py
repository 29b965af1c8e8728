"""Report figures rendered next to the delimited outputs.

SVG output is made byte-reproducible: a fixed hash salt for element ids and
no creation-date metadata.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

FRONTIER_COLOR = "black"
ATTESTED_COLOR = "#1f77b4"
NEAR_SYNONYM_COLOR = "#87bdd8"
RANDOM_COLOR = "#9a9a9a"

_KIND_COLORS = {"near-synonym": NEAR_SYNONYM_COLOR, "random": RANDOM_COLOR}


def _new_figure(width=5.0, height=4.0):
    plt.rcParams["svg.hashsalt"] = "lexeff"
    return plt.subplots(figsize=(width, height), dpi=100)


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def save_frontier_plot(frontier, attested_cost, summaries, path) -> None:
    """Frontier curve with the attested encoding and baseline means."""
    fig, ax = _new_figure()
    pareto = sorted(frontier.pareto_points, key=lambda p: p.avg_length)
    ax.plot([p.avg_length for p in pareto], [p.info_loss for p in pareto],
            color=FRONTIER_COLOR, lw=1.5, label="frontier")
    ax.fill_between([p.avg_length for p in pareto],
                    0, [p.info_loss for p in pareto],
                    color="0.9", zorder=0)
    for summary in summaries:
        ax.scatter([summary.mean_avg_length], [summary.mean_info_loss],
                   color=_KIND_COLORS.get(summary.kind, "0.5"), s=36,
                   label=f"{summary.kind} mean")
    ax.scatter([attested_cost.avg_length], [attested_cost.info_loss],
               color=ATTESTED_COLOR, s=60, zorder=3, label="attested")
    ax.set_xlabel("average length (units)")
    ax.set_ylabel("information loss (bits)")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def save_loss_plot(attested_epsilon, summaries, path) -> None:
    """Efficiency loss of the attested encoding next to baseline means."""
    fig, ax = _new_figure(4.0, 3.5)
    labels = ["attested"] + [s.kind for s in summaries]
    values = [attested_epsilon] + [s.mean_loss for s in summaries]
    colors = [ATTESTED_COLOR] + [_KIND_COLORS.get(s.kind, "0.5")
                                 for s in summaries]
    ax.bar(range(len(values)), values, color=colors)
    for i, summary in enumerate(summaries, start=1):
        ax.errorbar([i], [summary.mean_loss],
                    yerr=[[summary.mean_loss - summary.ci_lo],
                          [summary.ci_hi - summary.mean_loss]],
                    fmt="none", ecolor="black", capsize=3, lw=1)
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, fontsize=8)
    ax.set_ylabel("efficiency loss (bits)")
    fig.tight_layout()
    _save(fig, path)


def save_item_loss_plot(item_ids, epsilons, path) -> None:
    """Per-item efficiency losses, one bar per encoded concept."""
    fig, ax = _new_figure(max(4.0, 0.45 * len(item_ids) + 1.5), 3.5)
    ax.bar(range(len(item_ids)), epsilons, color=ATTESTED_COLOR)
    ax.set_xticks(range(len(item_ids)))
    ax.set_xticklabels(item_ids, rotation=45, ha="right", fontsize=7)
    ax.set_ylabel("efficiency loss (bits)")
    fig.tight_layout()
    _save(fig, path)
