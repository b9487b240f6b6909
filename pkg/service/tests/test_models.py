from __future__ import annotations

import json
import math

import pytest

from nli_service.config import ServiceConfig, parse_label_map
from nli_service.models import StubModel, TableModel, TransformersModel, build_model

PAIRS = [
    ("Some apples are red.", "30% apples are red."),
    ("Few tomatoes are green.", "5% tomatoes are green."),
    ("All rocks have minerals.", "All rocks have minerals."),
]


class TestStubModel:
    def test_deterministic_across_instances(self):
        assert StubModel().score_pairs(PAIRS) == StubModel().score_pairs(PAIRS)

    def test_simplex(self):
        for triple in StubModel().score_pairs(PAIRS):
            assert all(0 <= v <= 1 for v in triple)
            assert math.isclose(sum(triple), 1.0, abs_tol=1e-9)

    def test_identical_pair_prefers_entail(self):
        entail, neutral, contradict = StubModel().score_pairs([("X is X.", "X is X.")])[0]
        assert entail > neutral and entail > contradict

    def test_distinct_pairs_differ(self):
        a, b = StubModel().score_pairs(PAIRS[:2])
        assert a != b


class TestTableModel:
    @pytest.fixture
    def table_path(self, tmp_path):
        rows = [
            {
                "premise": "Some apples are red.",
                "hypothesis": "30% apples are red.",
                "entail": 0.8,
                "neutral": 0.15,
                "contradict": 0.05,
            }
        ]
        path = tmp_path / "table.json"
        path.write_text(json.dumps(rows))
        return path

    def test_replays_table(self, table_path):
        model = TableModel(table_path)
        assert model.score_pairs(PAIRS[:1]) == [(0.8, 0.15, 0.05)]

    def test_fallbacks_match_engine_mock(self, table_path):
        model = TableModel(table_path)
        reflexive, unknown = model.score_pairs(
            [("Same.", "Same."), ("Other.", "Thing.")]
        )
        assert reflexive == (0.99, 0.005, 0.005)
        assert unknown == (1 / 3, 1 / 3, 1 / 3)

    def test_model_id_tracks_content(self, table_path, tmp_path):
        other = tmp_path / "other.json"
        other.write_text("[]")
        assert TableModel(table_path).model_id != TableModel(other).model_id


class TestLabelMapping:
    def test_standard_roberta_layout(self):
        index = TransformersModel._labels_from_config(
            {0: "CONTRADICTION", 1: "NEUTRAL", 2: "ENTAILMENT"}
        )
        assert index == {"contradict": 0, "neutral": 1, "entail": 2}

    def test_alternate_layout(self):
        index = TransformersModel._labels_from_config(
            {0: "entailment", 1: "neutral", 2: "contradiction"}
        )
        assert index == {"entail": 0, "neutral": 1, "contradict": 2}

    def test_unknown_labels_require_override(self):
        with pytest.raises(ValueError, match="NLI_LABEL_MAP"):
            TransformersModel._labels_from_config({0: "LABEL_0", 1: "LABEL_1", 2: "LABEL_2"})

    def test_parse_label_map(self):
        assert parse_label_map("entail=2,neutral=1,contradict=0") == {
            "entail": 2,
            "neutral": 1,
            "contradict": 0,
        }


class TestConfig:
    def test_rejects_bad_batch_and_label_map(self):
        with pytest.raises(ValueError):
            ServiceConfig(max_batch=0)
        with pytest.raises(ValueError):
            ServiceConfig(label_map={"entail": 0})

    def test_build_model_dispatch(self, tmp_path):
        assert isinstance(build_model(ServiceConfig(model_id="stub")), StubModel)
        table = tmp_path / "t.json"
        table.write_text("[]")
        assert isinstance(
            build_model(ServiceConfig(model_id=f"table:{table}")), TableModel
        )
