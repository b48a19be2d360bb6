"""Distances between laws and channel-level quantities built on them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize, stats

from .diff import conv_tail, log_asymptotic_tail, log_conv_pdf
from .ig import IGParams
from .nig import approx_diff, diff_cumulants, nig_logpdf, nig_tail
from .quadrature import DEFAULT_QUAD, AccuracyError, QuadratureSpec

__all__ = [
    "SupportMismatchError",
    "KLReport",
    "kl_divergence",
    "kl_exact_vs_nig",
    "diff_support",
    "crossover_probability",
    "CROSSOVER_METHODS",
    "ks_distance",
    "ks_critical",
    "chi_square_equiprobable",
]

CROSSOVER_METHODS = ("exact", "nig", "asymptotic")

# two-sided KS acceptance constant used throughout the validation harness
KS_CONSTANT = 1.95
MASS_TOL = 1e-4
KL_FLOOR_RATIO = 1e-12


class SupportMismatchError(ValueError):
    """The approximating density vanishes where the reference density does not."""


def _quad(f, lo, hi, q: QuadratureSpec, points=None):
    val, err, info, *rest = integrate.quad(
        f, lo, hi, epsabs=q.abs_tol, epsrel=q.rel_tol, limit=q.max_refinements, points=points, full_output=1
    )
    if err > max(q.abs_tol, q.rel_tol * abs(val)):
        raise AccuracyError(f"quadrature error {err:.3g} exceeds tolerance on [{lo}, {hi}]")
    return val


def kl_divergence(
    exact: Callable[[float], float],
    approx: Callable[[float], float],
    support: tuple[float, float],
    q: QuadratureSpec = DEFAULT_QUAD,
    *,
    log_density: bool = False,
    floor_ratio: float = KL_FLOOR_RATIO,
    grid: int = 401,
) -> float:
    """``KL(exact || approx) = int exact ln(exact / approx)`` on a finite support.

    The integral is restricted to where ``exact`` exceeds ``floor_ratio`` times
    its peak value on ``support``; below that the integrand is quadrature noise.
    Both densities must carry unit mass on ``support`` to within 1e-4.  With
    ``log_density=True`` the callables return log densities.
    """
    lo, hi = support
    if not (math.isfinite(lo) and math.isfinite(hi) and hi > lo):
        raise ValueError("support must be a finite interval")
    if log_density:
        log_e, log_a = exact, approx
    else:
        log_e = lambda z: _safe_log(exact(z))  # noqa: E731
        log_a = lambda z: _safe_log(approx(z))  # noqa: E731

    xs = np.linspace(lo, hi, grid)
    le = np.array([log_e(x) for x in xs])
    ipk = int(np.argmax(le))
    peak, log_peak = float(xs[ipk]), float(le[ipk])
    log_floor = log_peak + math.log(floor_ratio)

    dx = xs[1] - xs[0]
    pts = sorted({min(max(peak + s * dx, lo), hi) for s in (-8, -4, -2, -1, 0, 1, 2, 4, 8)} - {lo, hi})

    for name, lf in (("exact", log_e), ("approx", log_a)):
        mass = _quad(lambda z: math.exp(lf(z)), lo, hi, q, pts)
        if abs(mass - 1.0) > MASS_TOL:
            raise ValueError(f"{name} density has mass {mass:.8g} on {support}, expected 1 +- {MASS_TOL}")

    zl, zr = _floor_crossings(log_e, xs, le, ipk, log_floor)

    def integrand(z):
        lez = log_e(z)
        if lez <= log_floor:
            return 0.0
        laz = log_a(z)
        if laz == -math.inf:
            raise SupportMismatchError(f"approximating density vanishes at z={z} where the reference is {math.exp(lez):.3g}")
        return math.exp(lez) * (lez - laz)

    inner = [p for p in pts if zl < p < zr]
    val = _quad(integrand, zl, zr, q, inner or None)
    if val < -1e-10:
        raise AccuracyError(f"KL divergence came out negative ({val:.3g}); densities are inconsistent")
    return max(val, 0.0)


def _safe_log(v: float) -> float:
    return math.log(v) if v > 0 else -math.inf


def _floor_crossings(log_e, xs, le, ipk, log_floor):
    def g(z):
        return log_e(z) - log_floor

    left = ipk
    while left > 0 and le[left - 1] > log_floor:
        left -= 1
    right = ipk
    while right < len(xs) - 1 and le[right + 1] > log_floor:
        right += 1
    zl = float(xs[0]) if left == 0 else optimize.brentq(g, xs[left - 1], xs[left], xtol=1e-12)
    zr = float(xs[-1]) if right == len(xs) - 1 else optimize.brentq(g, xs[right], xs[right + 1], xtol=1e-12)
    return zl, zr


def diff_support(p1: IGParams, p2: IGParams, floor_ratio: float = 1e-14, q: QuadratureSpec = DEFAULT_QUAD):
    """Interval outside which the density of ``X1 - X2`` is below ``floor_ratio`` times its value at the mean."""
    c = diff_cumulants(p1, p2)
    sd = math.sqrt(c.k2)
    ref = log_conv_pdf(p1, p2, c.k1, q) + math.log(floor_ratio)

    def edge(direction):
        step = sd
        z = c.k1 + direction * step
        while log_conv_pdf(p1, p2, z, q) > ref:
            step *= 1.5
            z = c.k1 + direction * step
        return z

    return edge(-1.0), edge(1.0)


@dataclass(frozen=True)
class KLReport:
    forward: float  # KL(exact || nig)
    reverse: float  # KL(nig || exact)
    support: tuple[float, float]


def kl_exact_vs_nig(p1: IGParams, p2: IGParams, q: QuadratureSpec = DEFAULT_QUAD) -> KLReport:
    """KL divergence in both directions between the quadrature density and its NIG fit."""
    fit = approx_diff(p1, p2)
    support = diff_support(p1, p2, q=q)
    log_e = lambda z: log_conv_pdf(p1, p2, z, q)  # noqa: E731
    log_a = lambda z: nig_logpdf(fit, z)  # noqa: E731
    fwd = kl_divergence(log_e, log_a, support, q, log_density=True)
    rev = kl_divergence(log_a, log_e, support, q, log_density=True)
    return KLReport(fwd, rev, support)


def crossover_probability(p1: IGParams, p2: IGParams, T: float, method: str = "exact", q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Probability that two molecules released ``T`` apart arrive out of order, ``P(X1 - X2 > T)``."""
    if T < 0:
        raise ValueError("release spacing T must be nonnegative")
    if method == "exact":
        return conv_tail(p1, p2, T, q)
    if method == "nig":
        return nig_tail(approx_diff(p1, p2), T, q)
    if method == "asymptotic":
        return math.exp(log_asymptotic_tail(p1, p2, T))
    raise ValueError(f"unknown method {method!r}; choose from {CROSSOVER_METHODS}")


def ks_distance(samples: Sequence[float], cdf: Callable) -> float:
    """Two-sided Kolmogorov-Smirnov statistic of sorted ``samples`` against ``cdf``.

    ``cdf`` is called once with the whole sample array.
    """
    x = np.asarray(samples, dtype=float)
    n = x.size
    if n == 0:
        raise ValueError("need at least one sample")
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def ks_critical(n: int) -> float:
    return KS_CONSTANT / math.sqrt(n)


def chi_square_equiprobable(samples, quantiles) -> tuple[float, float]:
    """Pearson statistic and p-value for bins cut at the given interior quantiles.

    ``quantiles`` are the ``k - 1`` cut points of ``k`` equal-probability bins.
    """
    x = np.asarray(samples, dtype=float)
    cuts = np.asarray(quantiles, dtype=float)
    k = cuts.size + 1
    counts = np.bincount(np.searchsorted(cuts, x, side="right"), minlength=k)
    expected = x.size / k
    stat = float(np.sum((counts - expected) ** 2) / expected)
    return stat, float(stats.chi2.sf(stat, k - 1))
