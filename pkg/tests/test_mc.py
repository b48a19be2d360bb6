import math

import numpy as np
import pytest

from igdiff.ig import IGParams, PhysicalChannel, ig_cdf, physical_to_ig
from igdiff.mc import SimConfig, first_passage_ladder, first_passage_sim, pmap, sample_diff, stream
from igdiff.metrics import ks_distance
from igdiff.nig import diff_cumulants


def test_config_validation():
    for bad in ({"n_samples": 0}, {"dt": 0.0}, {"max_steps": 0}, {"seed": -1}, {"seed": 2**64}):
        with pytest.raises(ValueError):
            SimConfig(**bad)


def test_streams_independent_and_reproducible():
    a = stream(1, 2, 3).random(5)
    np.testing.assert_array_equal(a, stream(1, 2, 3).random(5))
    assert not np.array_equal(a, stream(1, 2, 4).random(5))
    assert not np.array_equal(a, stream(2, 2, 3).random(5))


def test_pmap_order():
    assert pmap(abs, [-3, 1, -2], workers=1) == [3, 1, 2]
    assert pmap(abs, [-3, 1, -2], workers=2) == [3, 1, 2]


def test_sample_diff_mean():
    p1, p2 = IGParams(1.0, 1.0), IGParams(2.0, 1.0)
    z = sample_diff(p1, p2, SimConfig(n_samples=1_000_000, seed=3))
    c = diff_cumulants(p1, p2)
    assert z.size == 1_000_000
    assert abs(z.mean() - c.k1) < 5 * math.sqrt(c.k2 / z.size)


def test_sample_diff_deterministic_and_worker_invariant():
    p = IGParams(3.0, 3.0)
    cfg = SimConfig(n_samples=150_000, seed=17)
    a = sample_diff(p, p, cfg)
    np.testing.assert_array_equal(a, sample_diff(p, p, cfg))
    np.testing.assert_array_equal(a, sample_diff(p, p, cfg, workers=3))
    assert not np.array_equal(a[:100], sample_diff(p, p, SimConfig(n_samples=100, seed=18)))


def test_substreams_decorrelated():
    p = IGParams(3.0, 3.0)
    from igdiff.mc import _diff_block

    # if both substreams were equal every draw would be exactly zero
    z = _diff_block(p, p, 0, (0, 10_000))
    assert np.count_nonzero(z == 0.0) == 0


def test_horizon_check():
    ch = PhysicalChannel(1.0, 1.0, 0.5)
    with pytest.raises(ValueError, match="horizon"):
        first_passage_sim(ch, SimConfig(n_samples=10, dt=1e-3, max_steps=5000))


def test_deterministic_limit():
    # with vanishing diffusion every path hits at ceil(d / (v dt)) steps
    ch = PhysicalChannel(1.0, 1.0, 1e-14)
    cfg = SimConfig(n_samples=200, seed=0, dt=1e-3, max_steps=20_000)
    res = first_passage_sim(ch, cfg)
    assert res.n_censored == 0
    np.testing.assert_allclose(res.times, 1.0, atol=1.5e-3)


def test_censoring_reported():
    # slow drift and a short horizon: many paths have not arrived
    ch = PhysicalChannel(1.0, 1.0, 2.0)
    res = first_passage_sim(ch, SimConfig(n_samples=2000, seed=1, dt=1e-3, max_steps=10_001))
    assert res.n_paths == 2000
    assert res.n_censored > 0
    assert res.censored_fraction == res.n_censored / 2000
    assert np.all(res.times <= 10_001 * 1e-3 + 1e-12)


def test_ladder_levels_consistent():
    ch = PhysicalChannel(1.0, 1.0, 0.5)
    cfg = SimConfig(n_samples=4000, seed=5, dt=1e-3, max_steps=20_000)
    fine, mid, coarse = first_passage_ladder(ch, cfg, levels=3)
    assert (fine.dt, mid.dt, coarse.dt) == (1e-3, 2e-3, 4e-3)
    # a coarser observer of the same path can only notice the crossing later
    assert fine.times.size == mid.times.size == coarse.times.size
    assert np.all(mid.times >= fine.times) and np.all(coarse.times >= mid.times)


def test_ladder_worker_invariant():
    ch = PhysicalChannel(1.0, 1.0, 0.5)
    cfg = SimConfig(n_samples=20_000, seed=6, dt=1e-3, max_steps=20_000)
    a = first_passage_ladder(ch, cfg, levels=2)
    b = first_passage_ladder(ch, cfg, levels=2, workers=2)
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x.times, y.times)


@pytest.mark.slow
def test_first_passage_matches_ig():
    ch = PhysicalChannel(1.0, 1.0, 0.5)
    p = physical_to_ig(ch)
    cfg = SimConfig(n_samples=100_000, seed=2, dt=1e-4, max_steps=100_000)
    fine, mid, coarse = first_passage_ladder(ch, cfg, levels=3, workers=4)
    se = fine.times.std(ddof=1) / math.sqrt(fine.times.size)
    assert abs(fine.mean - p.mean) < 5 * se
    ks = [ks_distance(np.sort(r.times), lambda v: ig_cdf(p, v)) for r in (coarse, mid, fine)]
    assert ks[2] < ks[1] < ks[0]
    assert fine.censored_fraction < 1e-3
