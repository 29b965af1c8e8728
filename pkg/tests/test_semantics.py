"""Prototype construction and the listener distribution."""

import math

import numpy as np
import pytest

from conftest import make_lexicon, make_universe
from lexeff.lexicon import Form, LexiconError
from lexeff.semantics import (ListenerParams, PrototypeCache, bit_scores,
                              cosine_distance, distribution_from_scores,
                              listener_distribution, prototype)


class TestCosineDistance:
    def test_identity(self):
        assert cosine_distance([1, 0], [1, 0]) == 0.0

    def test_orthogonality(self):
        assert cosine_distance([1, 0], [0, 1]) == 1.0

    def test_hand_value(self):
        expected = 1.0 - 1.0 / math.sqrt(2.0)
        assert cosine_distance([1, 0], [1, 1]) == pytest.approx(expected, abs=1e-12)

    def test_zero_norm_rejected(self):
        with pytest.raises(LexiconError):
            cosine_distance([0, 0], [1, 0])

    def test_scale_invariance(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            a = rng.normal(size=5)
            b = rng.normal(size=5)
            d1 = cosine_distance(a, b)
            d2 = cosine_distance(3.7 * a, 0.2 * b)
            assert d1 == pytest.approx(d2, abs=1e-12)
            assert -1e-12 <= d1 <= 2 + 1e-12


@pytest.fixture
def axis_world():
    universe = make_universe({
        "c1": [1.0, 0.0],
        "c2": [0.0, 1.0],
        "c3": [1.0, 1.0],
    })
    lexicon = make_lexicon(universe, [
        ("solo", "c1", 10.0, 10.0),
        ("duo", "c1", 10.0, 5.0),
        ("duo", "c2", 10.0, 5.0),
        ("other", "c2", 5.0, 5.0),
    ])
    return universe, lexicon


class TestPrototype:
    def test_single_sense_equals_embedding(self, axis_world):
        universe, lexicon = axis_world
        proto = prototype(lexicon.form("solo"), lexicon, universe)
        np.testing.assert_array_equal(proto.vector, [1.0, 0.0])

    def test_two_equal_senses_average(self, axis_world):
        universe, lexicon = axis_world
        proto = prototype(lexicon.form("duo"), lexicon, universe)
        np.testing.assert_allclose(proto.vector, [0.5, 0.5], atol=1e-12)

    def test_combination_is_additive(self, axis_world):
        universe, lexicon = axis_world
        combo = lexicon.make_combination("solo", "other")
        proto = prototype(combo, lexicon, universe)
        np.testing.assert_allclose(proto.vector, [1.0, 1.0], atol=1e-12)

    def test_convex_hull_membership(self):
        # Senses in general position (4 vectors, 4 dims) so the combination
        # weights are uniquely recoverable; they must form a distribution.
        rng = np.random.default_rng(1)
        for trial in range(20):
            vectors = {f"s{i}": rng.normal(size=4) for i in range(4)}
            universe = make_universe(vectors)
            rows = [("word", f"s{i}", 10.0, float(rng.integers(0, 50)))
                    for i in range(4)]
            lexicon = make_lexicon(universe, rows)
            proto = prototype(lexicon.form("word"), lexicon, universe)
            matrix = np.array([vectors[f"s{i}"] for i in range(4)]).T
            weights = np.linalg.solve(matrix, proto.vector)
            assert weights.sum() == pytest.approx(1.0, abs=1e-8)
            assert (weights > -1e-8).all()

    def test_unresolvable_form(self, axis_world):
        universe, lexicon = axis_world
        stranger = Form(surface="zzz", constituents=("zzz",), length_units=3)
        with pytest.raises(LexiconError, match="not resolvable"):
            prototype(stranger, lexicon, universe)


class TestListenerDistribution:
    def test_gamma_zero_uniform(self):
        universe = make_universe({f"c{i}": [1.0, float(i)] for i in range(4)})
        lexicon = make_lexicon(universe, [("w", "c0", 1.0, 1.0)])
        probs = listener_distribution(lexicon.form("w"), lexicon, universe,
                                      ListenerParams(gamma=0.0))
        np.testing.assert_array_equal(probs, [0.25, 0.25, 0.25, 0.25])

    def test_hand_softmax(self, axis_world):
        universe, lexicon = axis_world
        probs = listener_distribution(lexicon.form("solo"), lexicon, universe,
                                      ListenerParams(gamma=10.0))
        raw = np.array([math.exp(0.0), math.exp(-10.0),
                        math.exp(-10.0 * (1 - 1 / math.sqrt(2)))])
        np.testing.assert_allclose(probs, raw / raw.sum(), rtol=1e-12)

    def test_normalized_and_positive(self):
        rng = np.random.default_rng(2)
        for trial in range(20):
            universe = make_universe(
                {f"c{i}": rng.normal(size=4) for i in range(8)})
            lexicon = make_lexicon(universe, [("w", "c0", 3.0, 2.0),
                                              ("w", "c3", 3.0, 1.0)])
            probs = listener_distribution(
                lexicon.form("w"), lexicon, universe,
                ListenerParams(gamma=float(rng.uniform(0, 30))))
            assert abs(probs.sum() - 1.0) < 1e-9
            assert (probs > 0).all()

    def test_monotone_in_distance(self, axis_world):
        universe, lexicon = axis_world
        probs = listener_distribution(lexicon.form("solo"), lexicon, universe,
                                      ListenerParams(gamma=5.0))
        # distances from (1,0): c1 at 0, c3 at 1-1/sqrt(2), c2 at 1
        assert probs[0] > probs[2] > probs[1]

    def test_shift_invariance(self):
        rng = np.random.default_rng(3)
        universe = make_universe({f"c{i}": rng.normal(size=3) for i in range(6)})
        vector = rng.normal(size=3)
        scores = bit_scores(vector, universe, gamma=8.0)
        shifted = scores - 4.321  # constant distance offset, in score units
        p1 = distribution_from_scores(scores)
        p2 = distribution_from_scores(shifted)
        assert np.abs(p1 - p2).max() < 1e-12

    def test_constituent_order_invariance(self, axis_world):
        universe, lexicon = axis_world
        params = ListenerParams(gamma=10.0)
        ab = lexicon.make_combination("solo", "other")
        ba = lexicon.make_combination("other", "solo")
        assert ab.surface != ba.surface
        pa = listener_distribution(ab, lexicon, universe, params)
        pb = listener_distribution(ba, lexicon, universe, params)
        np.testing.assert_array_equal(pa, pb)

    def test_gamma_increase_never_hurts_nearest(self, axis_world):
        universe, lexicon = axis_world
        form = lexicon.form("solo")
        last = 0.0
        for gamma in (0.0, 1.0, 5.0, 10.0, 20.0):
            probs = listener_distribution(form, lexicon, universe,
                                          ListenerParams(gamma=gamma))
            assert probs[0] >= last - 1e-12
            last = probs[0]


class TestPrototypeCache:
    def test_cache_matches_direct(self, axis_world):
        universe, lexicon = axis_world
        cache = PrototypeCache(lexicon, universe)
        for surface in lexicon.surfaces():
            direct = prototype(lexicon.form(surface), lexicon, universe)
            np.testing.assert_array_equal(cache.vector(surface), direct.vector)

    def test_gamma_must_be_nonnegative(self):
        with pytest.raises(LexiconError):
            ListenerParams(gamma=-1.0)
