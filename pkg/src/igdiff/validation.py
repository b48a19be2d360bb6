"""Oracle suites run by ``igdiff validate``.

Each suite returns a JSON-ready report::

    {"suite": str, "seed": int, "passed": bool,
     "checks": [{"name": str, "value": float, "bound": [lo, hi], "passed": bool}, ...]}
"""

from __future__ import annotations

import math

import numpy as np
from scipy import optimize

from .diff import conv_cdf, log_asymptotic_tail, log_conv_tail
from .ig import IGParams, PhysicalChannel, ig_cdf, ig_sample, physical_to_ig
from .mc import SimConfig, first_passage_ladder, sample_diff, stream
from .metrics import chi_square_equiprobable, ks_critical, ks_distance
from .nig import approx_diff, diff_cumulants, nig_cdf_sorted, nig_sample
from .quadrature import DEFAULT_QUAD, QuadratureSpec

__all__ = [
    "SUITES",
    "run_suite",
    "diff_quantiles",
    "tail_point",
    "asymptotic_ratio",
    "asymptotic_zmax",
]

_TAG_SAMPLER = 10


def _check(name, value, lo=-math.inf, hi=math.inf):
    ok = bool(lo <= value <= hi)
    bound = [b if math.isfinite(b) else None for b in (lo, hi)]
    return {"name": name, "value": float(value), "bound": bound, "passed": ok}


def diff_quantiles(p1: IGParams, p2: IGParams, probs, q: QuadratureSpec = DEFAULT_QUAD) -> np.ndarray:
    """Quantiles of ``X1 - X2`` by root finding on the quadrature CDF."""
    c = diff_cumulants(p1, p2)
    sd = math.sqrt(c.k2)
    out = []
    for pr in probs:
        f = lambda z: conv_cdf(p1, p2, z, q) - pr  # noqa: E731
        lo, hi = c.k1 - sd, c.k1 + sd
        while f(lo) > 0:
            lo -= 2.0 * (hi - lo)
        while f(hi) < 0:
            hi += 2.0 * (hi - lo)
        out.append(optimize.brentq(f, lo, hi, xtol=1e-13, rtol=1e-13))
    return np.array(out)


def tail_point(p1: IGParams, p2: IGParams, level: float, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """``z`` with ``P(X1 - X2 > z) == level``."""
    c = diff_cumulants(p1, p2)
    sd = math.sqrt(c.k2)
    target = math.log(level)
    g = lambda z: log_conv_tail(p1, p2, z, q) - target  # noqa: E731
    lo, hi = c.k1 - sd, c.k1 + sd
    while g(hi) > 0:
        hi += 2.0 * (hi - lo)
    while g(lo) < 0:
        lo -= 2.0 * (hi - lo)
    return optimize.brentq(g, lo, hi, xtol=1e-12)


def asymptotic_ratio(p1: IGParams, p2: IGParams, z: float, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """``P(Z > z)`` divided by its large-``z`` approximation."""
    return math.exp(log_conv_tail(p1, p2, z, q) - log_asymptotic_tail(p1, p2, z))


def asymptotic_zmax(p1: IGParams, p2: IGParams, level: float = 1e-25, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    return tail_point(p1, p2, level, q)


def suite_sampler(seed: int, n: int = 100_000, **_) -> dict:
    checks = []
    p = IGParams(3.0, 3.0)
    x = np.sort(ig_sample(p, stream(seed, _TAG_SAMPLER, 0), n))
    checks.append(_check("ig_ks_statistic(a=b=3)", ks_distance(x, lambda v: ig_cdf(p, v)), 0.0, ks_critical(n)))
    fit = approx_diff(p, p)
    y = np.sort(nig_sample(fit, stream(seed, _TAG_SAMPLER, 1), n))
    checks.append(_check("nig_ks_statistic(fit of a=b=3)", ks_distance(y, lambda v: nig_cdf_sorted(fit, v)), 0.0, ks_critical(n)))
    return _report("sampler", seed, checks)


def suite_convolution(seed: int, n: int = 1_000_000, bins: int = 50, workers: int = 1, **_) -> dict:
    p = IGParams(3.0, 3.0)
    z = sample_diff(p, p, SimConfig(n_samples=n, seed=seed), workers=workers)
    cuts = diff_quantiles(p, p, np.arange(1, bins) / bins)
    stat, pval = chi_square_equiprobable(z, cuts)
    checks = [_check(f"chi2_pvalue({bins} equiprobable bins)", pval, 0.01, 1.0)]
    zt = tail_point(p, p, 1e-2)
    emp = float(np.mean(z > zt))
    se = math.sqrt(1e-2 * (1 - 1e-2) / n)
    checks.append(_check("empirical_tail_at_1e-2_point / binomial_se", (emp - 1e-2) / se, -4.0, 4.0))
    return _report("convolution", seed, checks)


def suite_theorem1(seed: int, **_) -> dict:
    checks = []
    one = IGParams(1.0, 1.0)
    checks.append(_check("ratio(a=b=1, z=40)", asymptotic_ratio(one, one, 40.0), 0.95, 1.05))
    for p1, p2 in ((IGParams(2.0, 2.0), IGParams(2.0, 2.0)), (one, IGParams(2.0, 2.0))):
        zm = asymptotic_zmax(p1, p2)
        label = f"({p1.a:g},{p1.b:g})x({p2.a:g},{p2.b:g})"
        checks.append(_check(f"ratio{label} at z={zm:.4g} (tail 1e-25)", asymptotic_ratio(p1, p2, zm), 0.95, 1.05))
    return _report("theorem1", seed, checks)


def suite_physics(seed: int, n: int = 100_000, dt: float = 1e-4, workers: int = 1, **_) -> dict:
    ch = PhysicalChannel(1.0, 1.0, 0.5)
    p = physical_to_ig(ch)
    cfg = SimConfig(n_samples=n, seed=seed, dt=dt, max_steps=int(round(10.0 / dt)))
    fine, coarse, coarsest = first_passage_ladder(ch, cfg, levels=3, workers=workers)
    se = fine.times.std(ddof=1) / math.sqrt(fine.times.size)
    checks = [_check(f"(mean - d/v) / se at dt={dt:g}", (fine.mean - p.mean) / se, -5.0, 5.0)]
    ks = [ks_distance(np.sort(r.times), lambda v: ig_cdf(p, v)) for r in (coarsest, coarse, fine)]
    checks.append(_check("ks(dt) - ks(2 dt)", ks[2] - ks[1], -math.inf, 0.0))
    checks.append(_check("ks(2 dt) - ks(4 dt)", ks[1] - ks[0], -math.inf, 0.0))
    bias = [abs(r.mean - p.mean) for r in (coarsest, coarse, fine)]
    checks.append(_check("|bias(dt)| - |bias(2 dt)|", bias[2] - bias[1], -math.inf, 0.0))
    checks.append(_check("|bias(2 dt)| - |bias(4 dt)|", bias[1] - bias[0], -math.inf, 0.0))
    checks.append(_check("censored fraction", fine.censored_fraction, 0.0, 1e-3))
    return _report("physics", seed, checks)


SUITES = {
    "sampler": suite_sampler,
    "convolution": suite_convolution,
    "theorem1": suite_theorem1,
    "physics": suite_physics,
}


def _report(name, seed, checks):
    return {"suite": name, "seed": seed, "passed": all(c["passed"] for c in checks), "checks": checks}


def run_suite(name: str, seed: int = 0, **kwargs) -> dict:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return SUITES[name](seed, **kwargs)
