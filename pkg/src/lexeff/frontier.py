"""Pareto frontier estimation and efficiency-loss computation.

The candidate space for labeling one emerging concept is every atomic form
of the lexicon plus every ordered two-form concatenation (including
self-concatenation), |F| + |F|^2 candidates in all. For each tradeoff
parameter beta on a grid, the optimal encoding labels each concept with the
candidate minimizing surprisal + beta * length, found either greedily (pick
the best single form, then the best second form or the empty string) or by
exhaustive scan. Because need probabilities are held fixed, concepts
optimize independently. The efficiency loss of any encoding of the same
concept set is its smallest scalarized-cost gap to the optimal encodings
across the grid.

Ties in the search break toward the shorter candidate, then the
lexicographically smaller surface; candidates are pre-sorted in that order
so the first minimum found is the tie-break winner.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from lexeff.costs import CostPoint, encoding_cost, surprisal
from lexeff.lexicon import (Encoding, EncodingItem, Form, Lexicon,
                            LexiconError, NeedProductionModel,
                            STRATEGY_COMBINATION, STRATEGY_REUSE, Universe)
from lexeff.semantics import (ListenerParams, PrototypeCache, bit_scores,
                              log2_normalizers)

logger = logging.getLogger(__name__)

NEGATIVE_LOSS_TOLERANCE = -1e-9
SEARCH_GREEDY = "greedy"
SEARCH_EXHAUSTIVE = "exhaustive"

_PAIR_CHUNK = 512  # pair-prototype rows scored per block


def default_beta_grid(start: float = 0.0, stop: float = 10.0,
                      step: float = 0.01) -> tuple[float, ...]:
    """Evenly spaced tradeoff grid, 0 to 10 in steps of 0.01 by default."""
    count = int(round((stop - start) / step)) + 1
    return tuple(float(b) for b in np.linspace(start, stop, count))


@dataclass(frozen=True)
class FrontierParams:
    beta_grid: tuple[float, ...] = field(default_factory=default_beta_grid)
    search_mode: str = SEARCH_GREEDY

    def __post_init__(self):
        grid = np.asarray(self.beta_grid, dtype=np.float64)
        if grid.size == 0:
            raise LexiconError("beta grid is empty")
        if not np.all(np.isfinite(grid)) or grid[0] < 0:
            raise LexiconError("beta grid values must be finite and >= 0")
        if grid.size > 1 and not np.all(np.diff(grid) > 0):
            raise LexiconError("beta grid must be strictly increasing")
        if self.search_mode not in (SEARCH_GREEDY, SEARCH_EXHAUSTIVE):
            raise LexiconError(f"unknown search mode {self.search_mode!r}")


@dataclass(frozen=True)
class EfficiencyLoss:
    """Deviation of an encoding from the frontier, and where it is smallest."""

    epsilon: float
    argmin_beta: float


@dataclass(frozen=True)
class FrontierPoint:
    """Optimal labels and cost at one grid beta."""

    beta: float
    labels: tuple[tuple[str, Form], ...]
    cost: CostPoint

    def as_encoding(self) -> Encoding:
        items = tuple(
            EncodingItem(concept_id=cid, form=form,
                         strategy=STRATEGY_COMBINATION if form.is_combination
                         else STRATEGY_REUSE)
            for cid, form in self.labels)
        return Encoding(items)


class CandidateSpace:
    """Precomputed lengths and surprisal scores for one lexicon's candidates.

    Candidates are indexed in a base order: atomic forms first (surfaces
    sorted), then ordered pairs row-major, pair k = n + i * n + j. The
    random baseline draws uniformly over this base index without ever
    materializing the pair set. A separate search order, sorted by
    (length, surface), makes first-occurrence argmin implement the
    tie-break rule. Read-only after construction.
    """

    def __init__(self, lexicon: Lexicon, universe: Universe,
                 params: ListenerParams,
                 cache: PrototypeCache | None = None):
        if not lexicon.atomic_surfaces:
            raise LexiconError("lexicon has no atomic forms")
        self.lexicon = lexicon
        self.universe = universe
        self.params = params
        self.cache = cache if cache is not None else PrototypeCache(lexicon, universe)
        self.surfaces = lexicon.atomic_surfaces
        n = len(self.surfaces)
        self.n_atomic = n
        self.n_candidates = n + n * n
        self.prototypes = np.array([self.cache.vector(s) for s in self.surfaces])
        self.atomic_lengths = np.array(
            [lexicon.form(s).length_units for s in self.surfaces],
            dtype=np.float64)
        self._pair_extra = (1 if lexicon.length_mode == "orthographic" else 0)
        self._atomic_scores = None
        self._atomic_lse = None
        self._lengths = None
        self._search_order = None
        self._form_cache: dict[int, Form] = {}

    # -- candidate decoding -------------------------------------------------

    def pair_indices(self, k: int) -> tuple[int, int]:
        return divmod(k - self.n_atomic, self.n_atomic)

    def candidate_surface(self, k: int) -> str:
        if k < self.n_atomic:
            return self.surfaces[k]
        i, j = self.pair_indices(k)
        return self.surfaces[i] + self.lexicon.separator + self.surfaces[j]

    def candidate_form(self, k: int) -> Form:
        form = self._form_cache.get(k)
        if form is None:
            if k < self.n_atomic:
                form = self.lexicon.form(self.surfaces[k])
            else:
                i, j = self.pair_indices(k)
                form = self.lexicon.make_combination(self.surfaces[i],
                                                     self.surfaces[j])
            self._form_cache[k] = form
        return form

    def candidate_lengths(self) -> np.ndarray:
        if self._lengths is None:
            if self.lexicon.length_mode == "orthographic":
                atom = np.array([len(s) for s in self.surfaces], dtype=np.float64)
            else:
                atom = self.atomic_lengths
            pair = (atom[:, None] + self._pair_extra + atom[None, :]).ravel()
            self._lengths = np.concatenate([self.atomic_lengths, pair])
            self._lengths.setflags(write=False)
        return self._lengths

    # -- scoring ------------------------------------------------------------

    def _atomic_score_table(self):
        if self._atomic_scores is None:
            self._atomic_scores = bit_scores(self.prototypes, self.universe,
                                             self.params.gamma)
            self._atomic_lse = log2_normalizers(self._atomic_scores)
        return self._atomic_scores, self._atomic_lse

    def atomic_surprisals(self, concept_ids) -> np.ndarray:
        """(n_atomic, m) surprisal of each atomic form for each concept."""
        scores, lse = self._atomic_score_table()
        columns = np.array([self.universe.index_of(c) for c in concept_ids])
        return lse[:, None] - scores[:, columns]

    def pair_surprisals_for(self, i: int, concept_ids) -> np.ndarray:
        """(n_atomic, m) surprisal of pairs (i, j) over j, for each concept."""
        vectors = self.prototypes[i] + self.prototypes
        scores = bit_scores(vectors, self.universe, self.params.gamma)
        lse = log2_normalizers(scores)
        columns = np.array([self.universe.index_of(c) for c in concept_ids])
        return lse[:, None] - scores[:, columns]

    def surprisal_table(self, concept_ids) -> np.ndarray:
        """(n + n^2, m) surprisal of every candidate, in base order."""
        concept_ids = tuple(concept_ids)
        n = self.n_atomic
        columns = np.array([self.universe.index_of(c) for c in concept_ids])
        table = np.empty((self.n_candidates, len(concept_ids)))
        table[:n] = self.atomic_surprisals(concept_ids)
        for start in range(0, n, max(1, _PAIR_CHUNK // n)):
            stop = min(start + max(1, _PAIR_CHUNK // n), n)
            block = (self.prototypes[start:stop, None, :]
                     + self.prototypes[None, :, :]).reshape(-1, self.universe.dim)
            scores = bit_scores(block, self.universe, self.params.gamma)
            lse = log2_normalizers(scores)
            table[n + start * n: n + stop * n] = lse[:, None] - scores[:, columns]
        return table

    # -- search order -------------------------------------------------------

    def search_order(self) -> np.ndarray:
        """Candidate indices sorted by (length, surface), the tie-break order."""
        if self._search_order is None:
            lengths = self.candidate_lengths()
            order = sorted(range(self.n_candidates),
                           key=lambda k: (lengths[k], self.candidate_surface(k)))
            self._search_order = np.array(order)
            self._search_order.setflags(write=False)
        return self._search_order

    def atomic_search_order(self) -> np.ndarray:
        """Atomic indices sorted by (length, surface)."""
        order = sorted(range(self.n_atomic),
                       key=lambda k: (self.atomic_lengths[k], self.surfaces[k]))
        return np.array(order)


def _argmin_rows(costs: np.ndarray, order: np.ndarray) -> np.ndarray:
    """Index of the tie-break minimum per column, given the sorted order."""
    permuted = costs[order]
    return order[permuted.argmin(axis=0)]


def optimal_label(concept_id: str, lexicon: Lexicon, universe: Universe,
                  params: ListenerParams, beta: float,
                  mode: str = SEARCH_GREEDY,
                  space: CandidateSpace | None = None) -> Form:
    """The cost-minimizing label for one concept at one beta.

    Greedy mode picks the best single form u, then the best of u alone and
    every concatenation of u with a second form. Exhaustive mode scans the
    full candidate space and is the small-instance correctness oracle.
    """
    if space is None:
        space = CandidateSpace(lexicon, universe, params)
    if mode == SEARCH_EXHAUSTIVE:
        surprisals = space.surprisal_table([concept_id])[:, 0]
        costs = surprisals + beta * space.candidate_lengths()
        winner = int(_argmin_rows(costs[:, None], space.search_order())[0])
        return space.candidate_form(winner)
    if mode != SEARCH_GREEDY:
        raise LexiconError(f"unknown search mode {mode!r}")
    winner = _greedy_winners(space, concept_id, np.array([beta]))[0]
    return space.candidate_form(int(winner))


def _greedy_winners(space: CandidateSpace, concept_id: str,
                    betas: np.ndarray) -> np.ndarray:
    """Base candidate index chosen greedily for one concept at each beta."""
    atomic_s = space.atomic_surprisals([concept_id])[:, 0]
    atomic_order = space.atomic_search_order()
    costs = atomic_s[:, None] + betas[None, :] * space.atomic_lengths[:, None]
    first_pick = _argmin_rows(costs, atomic_order)

    winners = np.empty(betas.size, dtype=np.int64)
    n = space.n_atomic
    extra = 1 if space.lexicon.length_mode == "orthographic" else 0
    for u in np.unique(first_pick):
        mask = first_pick == u
        pair_s = space.pair_surprisals_for(int(u), [concept_id])[:, 0]
        pair_lengths = space.atomic_lengths[u] + extra + space.atomic_lengths
        # Second-pick candidates: u alone, then every (u, j) pair.
        stage_s = np.concatenate([[atomic_s[u]], pair_s[atomic_order]])
        stage_l = np.concatenate([[space.atomic_lengths[u]],
                                  pair_lengths[atomic_order]])
        stage_costs = stage_s[:, None] + betas[None, mask] * stage_l[:, None]
        picks = stage_costs.argmin(axis=0)
        base = np.where(picks == 0, u, n + u * n + atomic_order[
            np.maximum(picks - 1, 0)])
        winners[mask] = base
    return winners


@dataclass
class FrontierResult:
    """Optimal encodings across the beta grid and their dominance-filtered curve."""

    concept_ids: tuple[str, ...]
    need: dict[str, float]
    params: FrontierParams
    points: list[FrontierPoint]
    pareto_points: list[CostPoint]
    beta_grid: np.ndarray
    opt_item_lengths: np.ndarray     # (n_concepts, n_betas)
    opt_item_surprisals: np.ndarray  # (n_concepts, n_betas)
    opt_avg_lengths: np.ndarray      # (n_betas,)
    opt_info_losses: np.ndarray      # (n_betas,)
    scalars: np.ndarray              # (n_betas,) optimal scalarized cost per beta
    search_mode: str

    def item_scalars(self, concept_id: str) -> np.ndarray:
        """Optimal single-item scalarized cost per beta for one concept."""
        row = self.concept_ids.index(concept_id)
        return (self.opt_item_surprisals[row]
                + self.beta_grid * self.opt_item_lengths[row])


def dominates(a: CostPoint, b: CostPoint) -> bool:
    """True if a is at least as good on both axes and better on one."""
    return (a.avg_length <= b.avg_length and a.info_loss <= b.info_loss
            and (a.avg_length < b.avg_length or a.info_loss < b.info_loss))


def pareto_filter(points) -> list[CostPoint]:
    """Dominance-filtered, deduplicated subset of cost points."""
    unique = []
    seen = set()
    for point in points:
        key = (point.avg_length, point.info_loss)
        if key not in seen:
            seen.add(key)
            unique.append(point)
    return [p for p in unique
            if not any(dominates(q, p) for q in unique if q is not p)]


def estimate_frontier(concept_ids, lexicon: Lexicon, universe: Universe,
                      params: ListenerParams,
                      frontier_params: FrontierParams,
                      need: dict[str, float],
                      space: CandidateSpace | None = None) -> FrontierResult:
    """Optimal encodings of a concept set for every beta on the grid.

    ``need`` is the fixed need distribution over the concepts (normally the
    marginal of the attested encoding's joint weights); each concept then
    contributes independently and is optimized on its own.
    """
    concept_ids = tuple(concept_ids)
    if not concept_ids:
        raise LexiconError("concept set is empty")
    missing = [c for c in concept_ids if c not in need]
    if missing:
        raise LexiconError(f"need distribution missing concepts {missing!r}")
    if space is None:
        space = CandidateSpace(lexicon, universe, params)
    betas = np.asarray(frontier_params.beta_grid, dtype=np.float64)
    weights = np.array([need[c] for c in concept_ids], dtype=np.float64)
    if abs(weights.sum() - 1.0) > 1e-6:
        raise LexiconError("need distribution does not sum to 1")

    m = len(concept_ids)
    winners = np.empty((m, betas.size), dtype=np.int64)
    if frontier_params.search_mode == SEARCH_EXHAUSTIVE:
        table = space.surprisal_table(concept_ids)
        lengths = space.candidate_lengths()
        order = space.search_order()
        table_sorted = table[order]
        lengths_sorted = lengths[order]
        for b, beta in enumerate(betas):
            costs = table_sorted + beta * lengths_sorted[:, None]
            winners[:, b] = order[costs.argmin(axis=0)]
        item_surprisal = np.array([table[winners[i], i] for i in range(m)])
        item_length = lengths[winners]
    else:
        lengths = space.candidate_lengths()
        table_rows = []
        for i, cid in enumerate(concept_ids):
            winners[i] = _greedy_winners(space, cid, betas)
            row_s = np.empty(betas.size)
            atomic_s = space.atomic_surprisals([cid])[:, 0]
            pair_cache: dict[int, np.ndarray] = {}
            for b, w in enumerate(winners[i]):
                w = int(w)
                if w < space.n_atomic:
                    row_s[b] = atomic_s[w]
                else:
                    u, j = space.pair_indices(w)
                    if u not in pair_cache:
                        pair_cache[u] = space.pair_surprisals_for(u, [cid])[:, 0]
                    row_s[b] = pair_cache[u][j]
            table_rows.append(row_s)
        item_surprisal = np.array(table_rows)
        item_length = lengths[winners]

    opt_avg_lengths = weights @ item_length
    opt_info_losses = weights @ item_surprisal
    scalars = opt_info_losses + betas * opt_avg_lengths

    points = []
    for b, beta in enumerate(betas):
        labels = tuple((cid, space.candidate_form(int(winners[i, b])))
                       for i, cid in enumerate(concept_ids))
        cost = CostPoint(avg_length=float(opt_avg_lengths[b]),
                         info_loss=float(opt_info_losses[b]))
        points.append(FrontierPoint(beta=float(beta), labels=labels, cost=cost))

    return FrontierResult(
        concept_ids=concept_ids,
        need={c: float(need[c]) for c in concept_ids},
        params=frontier_params,
        points=points,
        pareto_points=pareto_filter(p.cost for p in points),
        beta_grid=betas,
        opt_item_lengths=item_length,
        opt_item_surprisals=item_surprisal,
        opt_avg_lengths=opt_avg_lengths,
        opt_info_losses=opt_info_losses,
        scalars=scalars,
        search_mode=frontier_params.search_mode,
    )


def _finish_loss(raw_gaps: np.ndarray, betas: np.ndarray,
                 search_mode: str, what: str) -> EfficiencyLoss:
    k = int(raw_gaps.argmin())
    raw = float(raw_gaps[k])
    if raw < NEGATIVE_LOSS_TOLERANCE:
        # Possible when greedy missed an optimum or when the encoding's
        # attested surfaces are shorter than any synthesized candidate.
        logger.warning("negative efficiency loss %.3g for %s clamped to 0 "
                       "(search_mode=%s)", raw, what, search_mode)
    return EfficiencyLoss(epsilon=max(raw, 0.0), argmin_beta=float(betas[k]))


def efficiency_loss(encoding: Encoding, frontier: FrontierResult,
                    lexicon: Lexicon, universe: Universe,
                    model: NeedProductionModel, params: ListenerParams,
                    cache: PrototypeCache | None = None) -> EfficiencyLoss:
    """Smallest scalarized-cost gap between an encoding and the frontier.

    The encoding is costed under the frontier's fixed need distribution, so
    it must encode exactly the frontier's concept set.
    """
    if set(encoding.concept_ids()) != set(frontier.concept_ids):
        raise LexiconError(
            "encoding concept set does not match the frontier's concept set")
    point = encoding_cost(encoding, lexicon, universe, model, params,
                          need=frontier.need, cache=cache)
    gaps = (point.info_loss + frontier.beta_grid * point.avg_length
            - frontier.scalars)
    return _finish_loss(gaps, frontier.beta_grid, frontier.search_mode,
                        f"encoding of {len(encoding)} items")


def item_efficiency_loss(form: Form, concept_id: str,
                         frontier: FrontierResult, lexicon: Lexicon,
                         universe: Universe, params: ListenerParams,
                         cache: PrototypeCache | None = None) -> EfficiencyLoss:
    """Efficiency loss of a single item against its own singleton frontier.

    The per-concept optimum does not depend on the need distribution, so the
    full frontier's per-item optima are exactly the singleton frontier.
    """
    s = surprisal(form, concept_id, lexicon, universe, params, cache)
    gaps = (s + frontier.beta_grid * form.length_units
            - frontier.item_scalars(concept_id))
    return _finish_loss(gaps, frontier.beta_grid, frontier.search_mode,
                        f"item {form.surface!r}")


def batch_efficiency_gaps(avg_lengths, info_losses,
                          frontier: FrontierResult,
                          chunk: int = 4096) -> np.ndarray:
    """Raw (unclamped) efficiency-loss gaps for many cost points at once."""
    avg_lengths = np.asarray(avg_lengths, dtype=np.float64)
    info_losses = np.asarray(info_losses, dtype=np.float64)
    out = np.empty(avg_lengths.size)
    for start in range(0, avg_lengths.size, chunk):
        stop = min(start + chunk, avg_lengths.size)
        gaps = (info_losses[start:stop, None]
                + frontier.beta_grid[None, :] * avg_lengths[start:stop, None]
                - frontier.scalars[None, :])
        out[start:stop] = gaps.min(axis=1)
    return out
