"""Law of ``Z = X1 - X2`` for independent IG first-hitting times.

Reference values come from adaptive quadrature:

* density    ``f_Z(z) = int_{u > max(0, z)} f1(u) f2(u - z) du``
* upper tail ``P(Z > z) = int_0^inf f2(w) (1 - F1(w + z)) dw``

Both are evaluated in log space (see :mod:`igdiff.quadrature`), so tails far
below the double-precision floor are still available through the ``log_``
functions.  The linear-value wrappers return ``0.0`` once ``exp`` underflows;
callers that care (the CLI) check the log value to tell underflow from zero.

The large-``z`` tail approximation is ``P(Z > z) ~ (1 - F1(z)) M2(-b1^2 / 2)``
with ``M2`` the MGF of ``X2``; the constant ``M2(-b1^2/2)`` is the level the
approximation flattens to for small ``z``.
"""

from __future__ import annotations

import math
from typing import NamedTuple

from .ig import IGParams, ig_dlogpdf, ig_hazard, ig_logpdf, log_ig_mgf, log_ig_tail
from .nig import diff_cumulants
from .quadrature import DEFAULT_QUAD, QuadratureSpec, curvature_width, find_peak, integrate_log

__all__ = [
    "QuadratureSpec",
    "TailFloor",
    "log_conv_pdf",
    "conv_pdf",
    "log_conv_tail",
    "conv_tail",
    "conv_cdf",
    "log_asymptotic_tail",
    "asymptotic_tail",
    "tail_floor",
    "log_soa_tail",
    "soa_tail",
    "integrate_over_z",
]

_SQRT2 = math.sqrt(2.0)


class TailFloor(NamedTuple):
    value: float
    log_value: float


def _std(p: IGParams) -> float:
    return math.sqrt(p.a / p.b**3)


def log_conv_pdf(p1: IGParams, p2: IGParams, z: float, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    lo = max(0.0, z)

    def logf(u):
        return ig_logpdf(p1, u) + ig_logpdf(p2, u - z)

    def dlog(u):
        return ig_dlogpdf(p1, u) + ig_dlogpdf(p2, u - z)

    scale = min(_std(p1), _std(p2))
    x0 = lo + max(min(p1.mode, p2.mode), 1e-3 * scale)
    peak = find_peak(dlog, lo, x0, scale)
    width = curvature_width(dlog, peak, lo, scale)
    logval, _ = integrate_log(logf, lo, math.inf, peak, width, q)
    return logval


def conv_pdf(p1: IGParams, p2: IGParams, z: float, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Density of ``X1 - X2`` at ``z`` by quadrature of the convolution integral."""
    return math.exp(log_conv_pdf(p1, p2, z, q))


def log_conv_tail(p1: IGParams, p2: IGParams, z: float, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    if z == -math.inf:
        return 0.0

    def logf(w):
        return ig_logpdf(p2, w) + log_ig_tail(p1, w + z)

    def dlog(w):
        return ig_dlogpdf(p2, w) - ig_hazard(p1, w + z)

    scale = min(_std(p1), _std(p2))
    x0 = max(p2.mode, 1e-3 * scale)
    peak = find_peak(dlog, 0.0, x0, scale)
    width = curvature_width(dlog, peak, 0.0, scale)
    bps = (-z,) if z < 0 else ()
    logval, _ = integrate_log(logf, 0.0, math.inf, peak, width, q, breakpoints=bps)
    return min(logval, 0.0)


def conv_tail(p1: IGParams, p2: IGParams, z: float, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """``P(X1 - X2 > z)``."""
    return math.exp(log_conv_tail(p1, p2, z, q))


def conv_cdf(p1: IGParams, p2: IGParams, z: float, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """``P(X1 - X2 <= z)``, computed as the upper tail of ``X2 - X1`` at ``-z``."""
    return conv_tail(p2, p1, -z, q)


def tail_floor(p1: IGParams, p2: IGParams) -> TailFloor:
    """``M2(-b1^2/2)``, returned with its logarithm (the value may underflow)."""
    lv = log_ig_mgf(p2, -0.5 * p1.b * p1.b)
    return TailFloor(math.exp(lv), lv)


def log_asymptotic_tail(p1: IGParams, p2: IGParams, z: float) -> float:
    return log_ig_tail(p1, z) + tail_floor(p1, p2).log_value


def asymptotic_tail(p1: IGParams, p2: IGParams, z: float) -> float:
    """Large-``z`` form ``(1 - F1(z)) * M2(-b1^2/2)`` of the upper tail."""
    return math.exp(log_asymptotic_tail(p1, p2, z))


def log_soa_tail(a: float, b: float, z: float) -> float:
    if z <= 0:
        return -math.inf
    return math.log(2.0 / (b * b)) - (_SQRT2 - 1.0) * a * b + ig_logpdf(IGParams(a, b), z)


def soa_tail(a: float, b: float, z: float) -> float:
    """Earlier equal-parameter tail approximation ``(2/b^2) exp(-(sqrt2 - 1) a b) f(z)``.

    Only meaningful when both hitting times share ``(a, b)``.  The density is
    evaluated at ``z``.
    """
    return math.exp(log_soa_tail(a, b, z))


def integrate_over_z(p1: IGParams, p2: IGParams, log_g, lo=-math.inf, hi=math.inf, q: QuadratureSpec = DEFAULT_QUAD):
    """``log int exp(log_g(z)) dz`` for integrands concentrated like ``X1 - X2``.

    Splits around the mean of ``Z`` on its standard-deviation scale.
    """
    c = diff_cumulants(p1, p2)
    sd = math.sqrt(c.k2)
    center = min(max(c.k1, lo), hi)
    return integrate_log(log_g, lo, hi, center, sd, q, breakpoints=(0.0,) if lo < 0 < hi else ())
