"""Loading, validation, and the need/production machinery."""

import json

import numpy as np
import pytest

from conftest import combo_item, make_lexicon, make_universe, reuse_item
from lexeff.lexicon import (EncodingItem, Form, LexiconError,
                            NeedProductionModel, joint_distribution,
                            load_encoding, load_lexicon, load_universe,
                            make_encoding, need_marginal, round_half_up,
                            save_encoding, save_lexicon, smoothed_count)


def write_jsonl(path, rows):
    path.write_text("".join(json.dumps(r) + "\n" for r in rows),
                    encoding="utf-8")


def write_tsv(path, header, rows):
    lines = ["\t".join(header)]
    lines += ["\t".join(str(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


@pytest.fixture
def files(tmp_path):
    write_jsonl(tmp_path / "concepts.jsonl", [
        {"id": "c1", "gloss": "first sense"},
        {"id": "c2", "gloss": "second sense", "need_weight": 2.0},
        {"id": "urban_renewal",
         "gloss": "the clearing and rebuilding and redevelopment of city areas"},
    ])
    write_jsonl(tmp_path / "embeddings.jsonl", [
        {"id": "c1", "vec": [1.0, 0.0]},
        {"id": "c2", "vec": [0.0, 1.0]},
        {"id": "urban_renewal", "vec": [0.5, 0.5]},
    ])
    write_tsv(tmp_path / "lexicon.tsv",
              ("surface", "concept_id", "form_freq", "sense_freq",
               "word_classes", "constituents"),
              [("card", "c1", 100, 40, "n", ""),
               ("urban", "c2", 50, 50, "adj", "")])
    return tmp_path


class TestLoadUniverse:
    def test_well_formed(self, files):
        universe = load_universe(files / "concepts.jsonl",
                                 files / "embeddings.jsonl")
        assert len(universe) == 3
        assert universe.dim == 2
        assert universe.need_weight("c2") == 2.0
        # Long free-text glosses are plain data.
        assert "redevelopment" in universe.concept("urban_renewal").gloss

    def test_missing_embedding(self, files, tmp_path):
        write_jsonl(tmp_path / "emb2.jsonl", [{"id": "c1", "vec": [1, 0]}])
        with pytest.raises(LexiconError, match="missing embedding"):
            load_universe(files / "concepts.jsonl", tmp_path / "emb2.jsonl")

    def test_duplicate_id(self, files, tmp_path):
        write_jsonl(tmp_path / "dup.jsonl", [
            {"id": "c1", "gloss": "a"}, {"id": "c1", "gloss": "b"},
        ])
        with pytest.raises(LexiconError, match="duplicate concept id"):
            load_universe(tmp_path / "dup.jsonl", files / "embeddings.jsonl")

    def test_dimension_mismatch(self, files, tmp_path):
        write_jsonl(tmp_path / "emb3.jsonl", [
            {"id": "c1", "vec": [1, 0]},
            {"id": "c2", "vec": [1, 0, 0]},
            {"id": "urban_renewal", "vec": [1, 0]},
        ])
        with pytest.raises(LexiconError, match="dimension mismatch"):
            load_universe(files / "concepts.jsonl", tmp_path / "emb3.jsonl")

    def test_zero_norm_vector(self, files, tmp_path):
        write_jsonl(tmp_path / "emb4.jsonl", [
            {"id": "c1", "vec": [0.0, 0.0]},
            {"id": "c2", "vec": [0, 1]},
            {"id": "urban_renewal", "vec": [1, 0]},
        ])
        with pytest.raises(LexiconError, match="zero-norm"):
            load_universe(files / "concepts.jsonl", tmp_path / "emb4.jsonl")


class TestLoadLexicon:
    def test_accepts_entries(self, files):
        universe = load_universe(files / "concepts.jsonl",
                                 files / "embeddings.jsonl")
        lexicon = load_lexicon(files / "lexicon.tsv", universe)
        assert "card" in lexicon
        assert lexicon.form_frequency("card") == 100.0
        assert lexicon.senses("card") == (("c1", 40.0),)

    def test_unknown_concept(self, files, tmp_path):
        universe = load_universe(files / "concepts.jsonl",
                                 files / "embeddings.jsonl")
        write_tsv(tmp_path / "bad.tsv",
                  ("surface", "concept_id", "form_freq", "sense_freq",
                   "word_classes", "constituents"),
                  [("card", "nope", 1, 1, "n", "")])
        with pytest.raises(LexiconError, match="unknown concept"):
            load_lexicon(tmp_path / "bad.tsv", universe)

    def test_negative_frequency(self, files, tmp_path):
        universe = load_universe(files / "concepts.jsonl",
                                 files / "embeddings.jsonl")
        write_tsv(tmp_path / "bad.tsv",
                  ("surface", "concept_id", "form_freq", "sense_freq",
                   "word_classes", "constituents"),
                  [("card", "c1", -1, 1, "n", "")])
        with pytest.raises(LexiconError, match="negative frequency"):
            load_lexicon(tmp_path / "bad.tsv", universe)

    def test_duplicate_pair(self, files, tmp_path):
        universe = load_universe(files / "concepts.jsonl",
                                 files / "embeddings.jsonl")
        write_tsv(tmp_path / "bad.tsv",
                  ("surface", "concept_id", "form_freq", "sense_freq",
                   "word_classes", "constituents"),
                  [("card", "c1", 1, 1, "n", ""),
                   ("card", "c1", 1, 2, "n", "")])
        with pytest.raises(LexiconError, match="duplicate"):
            load_lexicon(tmp_path / "bad.tsv", universe)

    def test_unexpected_column_rejected(self, files, tmp_path):
        universe = load_universe(files / "concepts.jsonl",
                                 files / "embeddings.jsonl")
        write_tsv(tmp_path / "bad.tsv",
                  ("surface", "concept_id", "form_freq", "sense_freq",
                   "word_classes", "constituents", "bogus"),
                  [("card", "c1", 1, 1, "n", "", "x")])
        with pytest.raises(LexiconError, match="bogus"):
            load_lexicon(tmp_path / "bad.tsv", universe)


class TestFormInvariants:
    def test_constituent_count(self):
        with pytest.raises(LexiconError):
            Form(surface="a b c", constituents=("a", "b", "c"), length_units=5)

    def test_positive_length(self):
        with pytest.raises(LexiconError):
            Form(surface="a", constituents=("a",), length_units=0)

    def test_synthesized_combination_surface_and_length(self, simple_world):
        universe, lexicon = simple_world
        combo = lexicon.make_combination("ax", "bee")
        assert combo.surface == "ax bee"
        assert combo.length_units == len("ax bee")
        assert combo.constituents == ("ax", "bee")


class TestEncoding:
    def test_one_label_per_concept(self, simple_world):
        universe, lexicon = simple_world
        items = [reuse_item(lexicon, "new", "ax"),
                 reuse_item(lexicon, "new", "bee")]
        with pytest.raises(LexiconError, match="exactly one form"):
            make_encoding(items, lexicon, universe)

    def test_constituents_must_resolve(self, simple_world):
        universe, lexicon = simple_world
        ghost = Form(surface="ghost", constituents=("ghost",), length_units=5)
        with pytest.raises(LexiconError, match="not a form surface"):
            make_encoding([EncodingItem("new", ghost, "reuse")],
                          lexicon, universe)


class TestJointDistribution:
    def test_single_item_is_one(self, simple_world):
        universe, lexicon = simple_world
        encoding = make_encoding([reuse_item(lexicon, "new", "cedar")],
                                 lexicon, universe)
        weights = joint_distribution(encoding, lexicon, universe,
                                     NeedProductionModel())
        assert weights.tolist() == [1.0]

    def test_hand_normalization_relabeled(self):
        # Two forms, frequencies 10 and 30; every concept has need weight 1
        # so each form's two senses split evenly: weights 0.25 / 0.75.
        universe = make_universe({
            "s1": [1.0, 0.0], "s2": [0.0, 1.0],
            "n1": [0.5, 0.5], "n2": [0.7, 0.3],
        })
        lexicon = make_lexicon(universe, [
            ("one", "s1", 10.0, 5.0),
            ("three", "s2", 30.0, 5.0),
        ])
        encoding = make_encoding([reuse_item(lexicon, "n1", "one"),
                                  reuse_item(lexicon, "n2", "three")],
                                 lexicon, universe)
        model = NeedProductionModel(mode="relabeled", smoothing=False)
        weights = joint_distribution(encoding, lexicon, universe, model)
        np.testing.assert_allclose(weights, [0.25, 0.75], atol=1e-12)

    def test_hand_normalization_corpus_uniform_senses(self):
        # Corpus mode: combinations get uniform sense shares, so the weights
        # reduce to the form-frequency ratio.
        universe = make_universe({
            "s1": [1.0, 0.0], "s2": [0.0, 1.0], "s3": [1.0, 1.0],
            "n1": [0.5, 0.5], "n2": [0.7, 0.3],
        })
        lexicon = make_lexicon(universe, [
            ("alpha", "s1", 10.0, 5.0),
            ("beta", "s2", 30.0, 5.0),
            ("gap", "s3", 2.0, 2.0),
        ])
        items = [combo_item(lexicon, "n1", "alpha", "gap"),
                 combo_item(lexicon, "n2", "beta", "gap")]
        encoding = make_encoding(items, lexicon, universe)
        model = NeedProductionModel(mode="corpus", smoothing=False)
        # Combinations are not lexicon forms: frequency 0 with smoothing off.
        with pytest.raises(LexiconError, match="all joint weights are zero"):
            joint_distribution(encoding, lexicon, universe, model)
        weights = joint_distribution(encoding, lexicon, universe,
                                     NeedProductionModel(mode="corpus"))
        np.testing.assert_allclose(weights, [0.5, 0.5], atol=1e-12)

    def test_smoothing_keeps_zero_frequency_item_positive(self):
        universe = make_universe({
            "s1": [1.0, 0.0], "n1": [0.5, 0.5], "n2": [0.7, 0.3],
        })
        lexicon = make_lexicon(universe, [
            ("word", "s1", 100.0, 100.0),
            ("rare", "n2", 0.0, 0.0),
        ])
        encoding = make_encoding([reuse_item(lexicon, "n1", "word"),
                                  reuse_item(lexicon, "n2", "rare")],
                                 lexicon, universe)
        weights = joint_distribution(encoding, lexicon, universe,
                                     NeedProductionModel())
        assert weights.min() > 0
        np.testing.assert_allclose(weights.sum(), 1.0, atol=1e-9)

    def test_weights_sum_to_one(self, simple_world):
        universe, lexicon = simple_world
        encoding = make_encoding(
            [reuse_item(lexicon, "new", "ax"),
             combo_item(lexicon, "c2", "bee", "cedar")], lexicon, universe)
        for model in (NeedProductionModel(), NeedProductionModel("relabeled")):
            weights = joint_distribution(encoding, lexicon, universe, model)
            np.testing.assert_allclose(weights.sum(), 1.0, atol=1e-9)
            assert (weights > 0).all()


class TestNeedMarginal:
    def test_single_concept(self, simple_world):
        universe, lexicon = simple_world
        encoding = make_encoding([reuse_item(lexicon, "new", "ax")],
                                 lexicon, universe)
        need = need_marginal(encoding, lexicon, universe,
                             NeedProductionModel())
        assert need == {"new": 1.0}

    def test_marginal_equals_joint_for_one_to_one(self, simple_world):
        universe, lexicon = simple_world
        encoding = make_encoding(
            [reuse_item(lexicon, "new", "ax"),
             combo_item(lexicon, "c2", "bee", "cedar")], lexicon, universe)
        model = NeedProductionModel()
        weights = joint_distribution(encoding, lexicon, universe, model)
        need = need_marginal(encoding, lexicon, universe, model)
        for item, w in zip(encoding.items, weights):
            assert need[item.concept_id] == pytest.approx(w, abs=1e-12)

    def test_invariant_under_surface_renaming(self):
        """Renaming every surface (same frequencies) leaves need unchanged."""
        universe = make_universe({
            "s1": [1.0, 0.0], "s2": [0.0, 1.0],
            "n1": [0.5, 0.5], "n2": [0.7, 0.3],
        })
        rows = [("one", "s1", 10.0, 5.0), ("three", "s2", 30.0, 4.0)]
        lexicon = make_lexicon(universe, rows)
        encoding = make_encoding([reuse_item(lexicon, "n1", "one"),
                                  reuse_item(lexicon, "n2", "three")],
                                 lexicon, universe)
        renamed_rows = [(s + "_x", cid, fw, fcw) for s, cid, fw, fcw in rows]
        renamed_lexicon = make_lexicon(universe, renamed_rows)
        renamed = make_encoding([reuse_item(renamed_lexicon, "n1", "one_x"),
                                 reuse_item(renamed_lexicon, "n2", "three_x")],
                                renamed_lexicon, universe)
        for model in (NeedProductionModel(), NeedProductionModel("relabeled")):
            need_a = need_marginal(encoding, lexicon, universe, model)
            need_b = need_marginal(renamed, renamed_lexicon, universe, model)
            assert need_a["n1"] == need_b["n1"]
            assert need_a["n2"] == need_b["n2"]


class TestRounding:
    def test_round_half_up(self):
        assert round_half_up(0.5) == 1
        assert round_half_up(1.49) == 1
        assert round_half_up(2.5) == 3
        assert round_half_up(0.0) == 0

    def test_smoothed_count(self):
        assert smoothed_count(0.0) == 1
        assert smoothed_count(2.5) == 4


class TestRoundTrip:
    def test_lexicon_save_load_identical(self, files, tmp_path):
        universe = load_universe(files / "concepts.jsonl",
                                 files / "embeddings.jsonl")
        lexicon = load_lexicon(files / "lexicon.tsv", universe)
        save_lexicon(lexicon, tmp_path / "again.tsv")
        reloaded = load_lexicon(tmp_path / "again.tsv", universe)
        assert reloaded.entries == lexicon.entries
        assert reloaded.separator == lexicon.separator
        assert reloaded.head_position == lexicon.head_position

    def test_encoding_save_load_identical(self, files, tmp_path):
        universe = load_universe(files / "concepts.jsonl",
                                 files / "embeddings.jsonl")
        lexicon = load_lexicon(files / "lexicon.tsv", universe)
        encoding = make_encoding(
            [reuse_item(lexicon, "urban_renewal", "card")], lexicon, universe)
        save_encoding(encoding, tmp_path / "enc.tsv")
        reloaded = load_encoding(tmp_path / "enc.tsv", lexicon, universe)
        assert reloaded == encoding
