"""Semantic space: form prototypes and the listener's interpretation model.

A listener who knows only the existing lexicon interprets a form through its
prototype vector: for a known form, the sense-frequency-weighted average of
its sense embeddings; for a two-constituent combination, the sum of the
constituents' prototypes. The listener distribution over the concept
universe is a similarity choice rule, softmax(-gamma * cosine distance to
the prototype). All information quantities are in bits, and the softmax is
evaluated in the log2 domain with a max shift so that probabilities and
surprisals stay finite and exact in the flat gamma=0 limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from lexeff.lexicon import Form, Lexicon, LexiconError, Universe, smoothed_count

LOG2_E = math.log2(math.e)


@dataclass(frozen=True)
class ListenerParams:
    """Sensitivity of the listener's similarity choice rule."""

    gamma: float = 10.0

    def __post_init__(self):
        if self.gamma < 0:
            raise LexiconError("gamma must be >= 0")


@dataclass(frozen=True, eq=False)
class Prototype:
    form_surface: str
    vector: np.ndarray


def cosine_distance(a, b) -> float:
    """1 - cos(a, b), in [0, 2]. Raises on a zero-norm input."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise LexiconError("cosine distance of a zero-norm vector is undefined")
    return 1.0 - float(np.dot(a, b) / (na * nb))


def sense_weights(surface: str, lexicon: Lexicon) -> tuple[tuple[str, float], ...]:
    """Add-one smoothed relative sense frequencies of a form in the lexicon."""
    senses = lexicon.senses(surface)
    counts = [smoothed_count(freq) for _, freq in senses]
    total = sum(counts)
    return tuple((cid, count / total) for (cid, _), count in zip(senses, counts))


class PrototypeCache:
    """Immutable per-lexicon cache of form prototype vectors.

    Construction is single-threaded; lookups afterwards are read-only and
    safe to share across threads.
    """

    def __init__(self, lexicon: Lexicon, universe: Universe):
        self.lexicon = lexicon
        self.universe = universe
        self._vectors: dict[str, np.ndarray] = {}
        for surface in lexicon.surfaces():
            vector = np.zeros(universe.dim)
            for cid, weight in sense_weights(surface, lexicon):
                vector += weight * universe.embedding(cid)
            vector.setflags(write=False)
            self._vectors[surface] = vector

    def vector(self, surface: str) -> np.ndarray:
        try:
            return self._vectors[surface]
        except KeyError:
            raise LexiconError(f"form {surface!r} not in lexicon") from None

    def matrix(self, surfaces) -> np.ndarray:
        return np.array([self._vectors[s] for s in surfaces])


def prototype(form: Form, lexicon: Lexicon, universe: Universe,
              cache: PrototypeCache | None = None) -> Prototype:
    """Prototype vector of a form under the existing lexicon.

    A form present in the lexicon gets the weighted average of its sense
    embeddings, whatever its shape; only combinations unknown to the
    lexicon are composed additively from their constituents' prototypes.
    """
    if cache is None:
        cache = PrototypeCache(lexicon, universe)
    if form.surface in lexicon:
        return Prototype(form.surface, cache.vector(form.surface))
    if form.is_combination:
        first, second = form.constituents
        vector = cache.vector(first) + cache.vector(second)
        vector.setflags(write=False)
        return Prototype(form.surface, vector)
    raise LexiconError(f"form {form.surface!r} is not resolvable in the lexicon")


def bit_scores(vectors, universe: Universe, gamma: float) -> np.ndarray:
    """log2 softmax scores, -gamma * log2(e) * cosine_distance, per prototype.

    ``vectors`` is (k, dim) or (dim,); the result is (k, n_concepts).
    """
    V = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
    norms = np.linalg.norm(V, axis=1)
    if np.any(norms == 0.0):
        raise LexiconError("zero-norm prototype vector")
    similarity = (V / norms[:, None]) @ universe.unit_matrix.T
    return (-gamma * LOG2_E) * (1.0 - similarity)


def log2_normalizers(scores: np.ndarray) -> np.ndarray:
    """Row-wise log2 of the softmax normalizer, with a max shift."""
    scores = np.atleast_2d(scores)
    shift = scores.max(axis=1)
    return shift + np.log2(np.exp2(scores - shift[:, None]).sum(axis=1))


def distribution_from_scores(scores: np.ndarray) -> np.ndarray:
    """Probabilities from log2 scores; rows sum to 1 up to float error."""
    scores = np.atleast_2d(scores)
    lse = log2_normalizers(scores)
    probabilities = np.exp2(scores - lse[:, None])
    return probabilities[0] if probabilities.shape[0] == 1 else probabilities


def listener_distribution(form: Form, lexicon: Lexicon, universe: Universe,
                          params: ListenerParams,
                          cache: PrototypeCache | None = None) -> np.ndarray:
    """Listener probabilities over the universe, in ``universe.ids`` order.

    Everywhere positive for finite gamma, and uniform at gamma = 0.
    """
    proto = prototype(form, lexicon, universe, cache)
    scores = bit_scores(proto.vector, universe, params.gamma)
    return distribution_from_scores(scores)
