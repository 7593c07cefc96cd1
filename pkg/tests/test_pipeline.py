"""Full stub-mode pipeline behavior: determinism, overrides, timings."""

import json

import pytest

from scorerag.config import load_config
from scorerag.errors import InvalidInput
from scorerag.pipeline import Pipeline

QUERY = "美中官員會晤"


def fresh_pipeline(demo_workspace) -> Pipeline:
    return Pipeline.from_config(load_config(demo_workspace / "config.yaml"))


def test_run_produces_article_with_references(demo_pipeline):
    response = demo_pipeline.run(QUERY)
    payload = response.to_dict()
    assert payload["query"] == QUERY
    assert payload["body"]
    assert 1 <= len(payload["references"]) <= 4
    # references numbered contiguously in score order
    numbers = [r["ref_number"] for r in payload["references"]]
    assert numbers == list(range(1, len(numbers) + 1))
    scores = [r["score"] for r in payload["references"]]
    assert scores == sorted(scores, reverse=True)
    # every citation in range
    for c in payload["citations"]:
        assert 1 <= c["ref_number"] <= len(payload["references"])


def test_stub_mode_is_deterministic(demo_workspace):
    runs = [fresh_pipeline(demo_workspace).run(QUERY).canonical_json() for _ in range(3)]
    assert runs[0] == runs[1] == runs[2]
    assert runs[0].encode("utf-8") == runs[1].encode("utf-8")


def test_canonical_json_excludes_timings(demo_pipeline):
    response = demo_pipeline.run(QUERY)
    canonical = json.loads(response.canonical_json())
    assert "timings" not in canonical
    assert "timings" in response.to_dict()


def test_timings_non_negative_and_bounded(demo_pipeline):
    response = demo_pipeline.run(QUERY)
    timings = response.timings
    assert all(v >= 0 for v in timings.values())
    stage_sum = sum(v for k, v in timings.items() if k != "total")
    assert stage_sum <= timings["total"] + 1e-6


def test_threshold_override_100_falls_back(demo_pipeline):
    response = demo_pipeline.run(QUERY, threshold=100)
    assert response.article.references == []
    assert any(w.startswith("no grounded references") for w in response.article.warnings)
    payload = response.to_dict()
    assert all(not s["kept"] for s in payload["scored_articles"])
    assert all(
        s["drop_reason"] == "below threshold 100" for s in payload["scored_articles"]
    )


def test_scored_articles_include_dropped_with_reason(demo_pipeline):
    response = demo_pipeline.run(QUERY, threshold=60)
    payload = response.to_dict()
    kept = [s for s in payload["scored_articles"] if s["kept"]]
    dropped = [s for s in payload["scored_articles"] if not s["kept"]]
    assert len(kept) == len(payload["references"])
    for s in dropped:
        assert s["drop_reason"] == "below threshold 60"
        assert s["mean_score"] < 60
    for s in kept:
        assert s["drop_reason"] is None
        assert s["mean_score"] >= 60


def test_override_bounds(demo_pipeline):
    with pytest.raises(InvalidInput):
        demo_pipeline.run(QUERY, k=0)
    with pytest.raises(InvalidInput):
        demo_pipeline.run(QUERY, k=51)
    with pytest.raises(InvalidInput):
        demo_pipeline.run(QUERY, threshold=-0.1)
    with pytest.raises(InvalidInput):
        demo_pipeline.run(QUERY, threshold=100.5)
    with pytest.raises(InvalidInput):
        demo_pipeline.run("")


def test_k_override_bounds_output(demo_pipeline):
    response = demo_pipeline.run(QUERY, k=2)
    assert len(response.article.references) <= 2


def test_raising_threshold_never_increases_references(demo_workspace):
    counts = []
    for threshold in (0, 20, 40, 60, 80, 100):
        response = fresh_pipeline(demo_workspace).run(QUERY, threshold=threshold)
        counts.append(len(response.article.references))
    assert counts == sorted(counts, reverse=True)


def test_raw_scores_match_stub_script(demo_pipeline):
    """Self-consistency wiring: three judge calls per article, averaged."""
    response = demo_pipeline.run(QUERY)
    for s in response.to_dict()["scored_articles"]:
        assert len(s["raw_scores"]) == 3
        assert s["mean_score"] == pytest.approx(sum(s["raw_scores"]) / 3, abs=0.005)
