"""Communicative cost functionals for encodings of emerging concepts.

An encoding is scored on two axes: expected word length (speaker effort) and
expected information loss in bits (listener surprisal of the intended
concept). The scalarized cost info_loss + beta * avg_length combines them
under a tradeoff parameter beta >= 0; the same combination per single item
is the objective the frontier search minimizes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from lexeff.lexicon import (Encoding, Form, Lexicon, LexiconError,
                            NeedProductionModel, Universe, joint_distribution)
from lexeff.semantics import (ListenerParams, PrototypeCache, bit_scores,
                              log2_normalizers, prototype)


@dataclass(frozen=True)
class CostPoint:
    """An encoding's position in the (length, information loss) plane."""

    avg_length: float
    info_loss: float

    def scalarized(self, beta: float) -> float:
        return self.info_loss + beta * self.avg_length


def surprisal(form: Form, concept_id: str, lexicon: Lexicon,
              universe: Universe, params: ListenerParams,
              cache: PrototypeCache | None = None) -> float:
    """-log2 of the listener probability of the intended concept, in bits.

    Computed in the log2 domain (normalizer minus score) so the result is
    finite for any finite gamma and exactly log2(|universe|) at gamma = 0.
    """
    proto = prototype(form, lexicon, universe, cache)
    scores = bit_scores(proto.vector, universe, params.gamma)
    lse = log2_normalizers(scores)
    return float(lse[0] - scores[0, universe.index_of(concept_id)])


def item_surprisals(encoding: Encoding, lexicon: Lexicon, universe: Universe,
                    params: ListenerParams,
                    cache: PrototypeCache | None = None) -> np.ndarray:
    """Surprisal of each encoding item, in item order."""
    if cache is None:
        cache = PrototypeCache(lexicon, universe)
    vectors = np.array([prototype(item.form, lexicon, universe, cache).vector
                        for item in encoding.items])
    scores = bit_scores(vectors, universe, params.gamma)
    lse = log2_normalizers(scores)
    columns = np.array([universe.index_of(item.concept_id)
                        for item in encoding.items])
    return lse - scores[np.arange(len(encoding.items)), columns]


def _item_weights(encoding: Encoding, lexicon: Lexicon, universe: Universe,
                  model: NeedProductionModel, need) -> np.ndarray:
    if need is None:
        return joint_distribution(encoding, lexicon, universe, model)
    concept_ids = encoding.concept_ids()
    if set(need) != set(concept_ids):
        raise LexiconError(
            "need distribution does not cover the encoding's concept set")
    weights = np.array([need[cid] for cid in concept_ids], dtype=np.float64)
    if abs(weights.sum() - 1.0) > 1e-6:
        raise LexiconError("need distribution does not sum to 1")
    return weights


def encoding_cost(encoding: Encoding, lexicon: Lexicon, universe: Universe,
                  model: NeedProductionModel, params: ListenerParams,
                  need: dict[str, float] | None = None,
                  cache: PrototypeCache | None = None) -> CostPoint:
    """Expected length and expected information loss of an encoding.

    Item weights come from the encoding's own joint need/production
    distribution, or from a fixed ``need`` distribution over its concepts
    when costing alternative encodings of the same concept set.
    """
    weights = _item_weights(encoding, lexicon, universe, model, need)
    lengths = np.array([item.form.length_units for item in encoding.items],
                       dtype=np.float64)
    losses = item_surprisals(encoding, lexicon, universe, params, cache)
    return CostPoint(avg_length=float(weights @ lengths),
                     info_loss=float(weights @ losses))


def scalarized_cost(encoding: Encoding, lexicon: Lexicon, universe: Universe,
                    model: NeedProductionModel, params: ListenerParams,
                    beta: float,
                    need: dict[str, float] | None = None,
                    cache: PrototypeCache | None = None) -> float:
    """info_loss + beta * avg_length of an encoding."""
    return encoding_cost(encoding, lexicon, universe, model, params,
                         need=need, cache=cache).scalarized(beta)


def item_cost(form: Form, concept_id: str, lexicon: Lexicon,
              universe: Universe, params: ListenerParams, beta: float,
              cache: PrototypeCache | None = None) -> float:
    """Single-item objective: surprisal(form, concept) + beta * length."""
    return (surprisal(form, concept_id, lexicon, universe, params, cache)
            + beta * form.length_units)
