"""Hill climbing: pinned climb path, incremental exactness, restart plumbing."""
from __future__ import annotations

import numpy as np
import pytest

from conftest import CALIBRATED_SMOOTHING
from tagmax import (
    UNDESIRABLE,
    HCConfig,
    ModelError,
    Query,
    SyntheticSpec,
    TagSelection,
    climb_from,
    exact_score,
    generate_synthetic,
    solve_hc,
    train,
)


def test_demo_climb_path(demo_model, demo_query):
    res = climb_from(demo_model, demo_query, 0b1010)
    assert res.bits == 0b1110
    assert res.trace_bits == (0b1010, 0b1110)
    assert res.steps == 1
    assert res.score == exact_score(demo_model, demo_query, 0b1110)
    assert res.score == pytest.approx(1.7677, abs=5e-5)
    # four neighbors evaluated at the start and four at the optimum
    assert res.neighbor_evals == 8
    assert res.trace_scores[0] == exact_score(demo_model, demo_query, 0b1010)


def test_climb_start_validation(demo_model, demo_query):
    with pytest.raises(ModelError, match="out of range"):
        climb_from(demo_model, demo_query, 16)


def test_incremental_deltas_equal_full_rescore():
    ds = generate_synthetic(SyntheticSpec(n=200, m=14, r=5, seed=19))
    model = train(ds, CALIBRATED_SMOOTHING)
    rng = np.random.default_rng(1)
    bits = rng.integers(0, 1 << 14, size=10_000, dtype=np.uint64)
    flips = rng.integers(0, 14, size=10_000)
    for b, i in zip(bits.tolist(), flips.tolist()):
        flipped = int(b) ^ (1 << (14 - 1 - int(i)))
        for j in range(model.r):
            delta = int(model.fp_step[j, int(i)])
            if flipped & (1 << (14 - 1 - int(i))):
                want = model.fp_state(j, int(b)) + delta
            else:
                want = model.fp_state(j, int(b)) - delta
            assert model.fp_state(j, flipped) == want


def test_local_optima_survive_neighbor_recheck():
    ds = generate_synthetic(SyntheticSpec(n=150, m=10, r=4, seed=27))
    model = train(ds, CALIBRATED_SMOOTHING)
    query = Query(selections=(
        TagSelection(tag=0), TagSelection(tag=1, weight=2.0),
        TagSelection(tag=2, polarity=UNDESIRABLE), TagSelection(tag=3)), k=3)
    got = solve_hc(model, query, HCConfig(restarts=12, seed=4))
    assert got.stats.detail["local_optima"]
    for bits in got.stats.detail["local_optima"]:
        score = exact_score(model, query, bits)
        for i in range(10):
            nbits = bits ^ (1 << (10 - 1 - i))
            nscore = exact_score(model, query, nbits)
            # no strictly better neighbor, no equal neighbor with smaller bits
            assert nscore < score or (nscore == score and nbits > bits)


def test_demo_restarts_find_global(demo_model, demo_query):
    got = solve_hc(demo_model, demo_query)
    assert got.entries[0].bits == 0b1110
    assert got.stats.algorithm == "hc"
    assert got.stats.candidates_examined >= 16
    detail = got.stats.detail
    assert detail["restarts"] == 16
    assert detail["seed"] == 0
    assert detail["max_steps"] == 40
    assert len(detail["starts"]) == 16
    assert all(0 <= s < 16 for s in detail["starts"])


def test_deterministic_given_seed(demo_model, demo_query):
    a = solve_hc(demo_model, demo_query, HCConfig(seed=9))
    b = solve_hc(demo_model, demo_query, HCConfig(seed=9))
    assert a.stats.detail["starts"] == b.stats.detail["starts"]
    assert [(e.bits, e.score) for e in a.entries] == [(e.bits, e.score) for e in b.entries]
    c = solve_hc(demo_model, demo_query, HCConfig(seed=10))
    assert c.stats.detail["starts"] != a.stats.detail["starts"]


def test_underfilled_flag(demo_model, demo_query):
    query = Query(selections=demo_query.selections, k=8)
    got = solve_hc(demo_model, query, HCConfig(restarts=2, seed=0))
    assert len(got.entries) <= 2
    assert got.stats.detail["underfilled"] is (len(got.entries) < 8)
    assert got.stats.detail["underfilled"]


def test_max_steps_zero_scores_starts_only(demo_model, demo_query):
    got = solve_hc(demo_model, demo_query, HCConfig(restarts=4, max_steps=0, seed=2))
    for tr in solve_hc(demo_model, demo_query,
                       HCConfig(restarts=4, max_steps=0, seed=2),
                       trace=True).stats.detail["traces"]:
        assert len(tr["bits"]) == 1
    assert got.entries  # starts themselves are still ranked


def test_trace_paths_improve_monotonically(demo_model, demo_query):
    got = solve_hc(demo_model, demo_query, HCConfig(restarts=8, seed=3), trace=True)
    for tr in got.stats.detail["traces"]:
        scores = tr["scores"]
        assert all(a < b for a, b in zip(scores, scores[1:])) or len(scores) == 1
        assert len(tr["bits"]) == len(scores)


def test_examined_counts_restarts_plus_neighbors(demo_model, demo_query):
    cfg = HCConfig(restarts=3, seed=5)
    got = solve_hc(demo_model, demo_query, cfg)
    climbs = [climb_from(demo_model, demo_query, s)
              for s in got.stats.detail["starts"]]
    assert got.stats.candidates_examined == 3 + sum(c.neighbor_evals for c in climbs)


def test_config_validation():
    with pytest.raises(ModelError, match="at least one restart"):
        HCConfig(restarts=0).validate()
    with pytest.raises(ModelError, match="max_steps"):
        HCConfig(max_steps=-1).validate()
    HCConfig(max_steps=0).validate()
