"""Normal inverse Gaussian law and four-moment matching for IG differences.

NIG(alpha, beta, mu, delta) density::

    f(y) = (alpha delta / pi) exp(delta gamma + beta (y - mu)) K1(alpha q) / q,
    q = sqrt(delta^2 + (y - mu)^2),  gamma = sqrt(alpha^2 - beta^2)

The approximation of ``Z = X1 - X2`` takes the first four cumulants of ``Z``
(cumulants of independent sums add, odd ones flip sign for ``-X2``), turns
them into mean / variance / skewness / excess kurtosis, and inverts the NIG
moment map.  The closed forms for the two equal-parameter and equal-ratio
cases are kept alongside as independent cross-checks.

``beta > 0`` means a longer right tail: the sign of ``beta`` in the density is
the one that agrees with the moment map and with the mixture representation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sc

from .ig import IGParams, ig_cumulants, ig_sample
from .quadrature import DEFAULT_QUAD, QuadratureSpec, curvature_width, find_peak, integrate_log
from .special import Accuracy, log_bessel_k1

__all__ = [
    "NIGParams",
    "MomentSet",
    "CumulantSet",
    "InfeasibleMomentsError",
    "SYMMETRY_EPS",
    "nig_pdf",
    "nig_logpdf",
    "nig_tail",
    "log_nig_tail",
    "nig_cdf",
    "nig_cdf_sorted",
    "nig_mode",
    "nig_moments",
    "fit_from_moments",
    "diff_cumulants",
    "moments_of_diff",
    "approx_diff",
    "usecase1_params",
    "usecase2_params",
    "detect_use_case",
    "nig_sample",
]

# |skewness| below this is treated as exactly symmetric
SYMMETRY_EPS = 1e-8


class InfeasibleMomentsError(ValueError):
    """The moment set admits no NIG law (needs rho = 3K/S^2 - 4 > 1)."""


@dataclass(frozen=True)
class NIGParams:
    alpha: float
    beta: float
    mu: float
    delta: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.delta > 0 and abs(self.beta) < self.alpha):
            raise ValueError(
                f"need alpha > 0, delta > 0, |beta| < alpha; got {self.alpha}, {self.beta}, {self.delta}"
            )
        if not all(map(math.isfinite, (self.alpha, self.beta, self.mu, self.delta))):
            raise ValueError("NIG parameters must be finite")

    @property
    def gamma(self) -> float:
        return math.sqrt((self.alpha - self.beta) * (self.alpha + self.beta))

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.alpha, self.beta, self.mu, self.delta)


@dataclass(frozen=True)
class MomentSet:
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float

    def __post_init__(self):
        if not self.variance > 0:
            raise ValueError("variance must be positive")


@dataclass(frozen=True)
class CumulantSet:
    k1: float
    k2: float
    k3: float
    k4: float

    def __post_init__(self):
        if not self.k2 > 0:
            raise ValueError("k2 must be positive")

    def to_moments(self) -> MomentSet:
        return MomentSet(
            mean=self.k1,
            variance=self.k2,
            skewness=self.k3 / self.k2**1.5,
            excess_kurtosis=self.k4 / self.k2**2,
        )


# -- density -----------------------------------------------------------------


def _logpdf_scalar(p: NIGParams, y: float) -> float:
    dy = y - p.mu
    q = math.hypot(p.delta, dy)
    return (
        math.log(p.alpha * p.delta / math.pi)
        + p.delta * p.gamma
        + p.beta * dy
        + float(log_bessel_k1(p.alpha * q))
        - math.log(q)
    )


def nig_logpdf(p: NIGParams, y):
    if np.ndim(y) == 0:
        return _logpdf_scalar(p, float(y))
    y = np.asarray(y, dtype=float)
    dy = y - p.mu
    q = np.hypot(p.delta, dy)
    return (
        math.log(p.alpha * p.delta / math.pi) + p.delta * p.gamma + p.beta * dy + log_bessel_k1(p.alpha * q) - np.log(q)
    )


def nig_pdf(p: NIGParams, y):
    return np.exp(nig_logpdf(p, y))


def _dlogpdf(p: NIGParams, y: float) -> float:
    # d/dy log K1(alpha q) = -alpha (K0/K1 + 1/(alpha q)) dq/dy; scaled Bessels cancel in the ratio
    dy = y - p.mu
    q = math.hypot(p.delta, dy)
    x = p.alpha * q
    return p.beta - (dy / q) * (p.alpha * sc.k0e(x) / sc.k1e(x) + 2.0 / q)


def nig_mode(p: NIGParams) -> float:
    m = nig_moments(p)
    return find_peak(lambda y: _dlogpdf(p, y), -math.inf, m.mean, math.sqrt(m.variance))


def log_nig_tail(p: NIGParams, y: float, acc: Accuracy | QuadratureSpec = DEFAULT_QUAD) -> float:
    if y == -math.inf:
        return 0.0
    q = acc if isinstance(acc, QuadratureSpec) else QuadratureSpec(acc.abs_tol, acc.rel_tol)
    m = nig_moments(p)
    sd = math.sqrt(m.variance)
    dlog = lambda t: _dlogpdf(p, t)  # noqa: E731
    mode = find_peak(dlog, -math.inf, m.mean, sd)
    if y < mode - sd:
        # most of the mass lies above y: take 1 - P(Y <= y) from the mirrored law
        mirror = NIGParams(p.alpha, -p.beta, -p.mu, p.delta)
        return math.log1p(-math.exp(log_nig_tail(mirror, -y, q)))
    if y <= mode:
        peak, width = mode, curvature_width(dlog, mode, -math.inf, sd)
    else:
        # maximum sits on the boundary; use the local decay length
        peak, width = y, min(sd, 1.0 / max(-dlog(y), 1e-300))
    logval, _ = integrate_log(lambda t: _logpdf_scalar(p, t), y, math.inf, peak, width, q)
    return min(logval, 0.0)


def nig_tail(p: NIGParams, y: float, acc: Accuracy | QuadratureSpec = DEFAULT_QUAD) -> float:
    """``P(Y > y)`` by adaptive quadrature of the density over ``(y, inf)``.

    Raises :class:`~igdiff.quadrature.AccuracyError` when the error estimate
    exceeds the tolerance at the refinement limit.
    """
    return math.exp(log_nig_tail(p, y, acc))


def nig_cdf(p: NIGParams, y: float, acc: Accuracy | QuadratureSpec = DEFAULT_QUAD) -> float:
    """``P(Y <= y)`` via the tail of the mirrored law (no ``1 - tail`` cancellation)."""
    mirror = NIGParams(p.alpha, -p.beta, -p.mu, p.delta)
    return nig_tail(mirror, -y, acc)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


def nig_cdf_sorted(p: NIGParams, ys) -> np.ndarray:
    """CDF at many sorted points: one quadrature at ``ys[0]``, then 20-point
    Gauss-Legendre panels between consecutive points."""
    ys = np.asarray(ys, dtype=float)
    if ys.size == 0:
        return ys.copy()
    lo, hi = ys[:-1], ys[1:]
    half = 0.5 * (hi - lo)
    nodes = (0.5 * (hi + lo))[:, None] + half[:, None] * _GL_NODES[None, :]
    panels = half * (nig_pdf(p, nodes) @ _GL_WEIGHTS)
    out = np.empty_like(ys)
    out[0] = nig_cdf(p, float(ys[0]))
    out[1:] = out[0] + np.cumsum(panels)
    return np.minimum(out, 1.0)


# -- moments and the moment-matching fit ------------------------------------


def nig_moments(p: NIGParams) -> MomentSet:
    a, b, d = p.alpha, p.beta, p.delta
    g = p.gamma
    return MomentSet(
        mean=p.mu + d * b / g,
        variance=d * a * a / g**3,
        skewness=3.0 * b / (a * math.sqrt(d * g)),
        excess_kurtosis=3.0 * (1.0 + 4.0 * b * b / (a * a)) / (d * g),
    )


def fit_from_moments(m: MomentSet) -> NIGParams:
    """Invert the NIG moment map.

    With ``rho = 3K/S^2 - 4``::

        alpha = 3 sqrt(rho) / ((rho - 1) sqrt(V) |S|)
        beta  = 3 / ((rho - 1) sqrt(V) S)
        mu    = M - 3 sqrt(V) / (rho S)
        delta = 3 sqrt(rho - 1) sqrt(V) / (rho |S|)

    For ``|S| < SYMMETRY_EPS`` the ``S -> 0`` limit is used:
    ``beta = 0, mu = M, alpha = sqrt(3 / (K V)), delta = V alpha``.
    """
    M, V, S, K = m.mean, m.variance, m.skewness, m.excess_kurtosis
    if not V > 0:
        raise InfeasibleMomentsError("variance must be positive")
    if not K > 0:
        raise InfeasibleMomentsError("excess kurtosis must be positive")
    if not 3.0 * K > 5.0 * S * S:
        rho = 3.0 * K / (S * S) - 4.0
        raise InfeasibleMomentsError(f"rho = 3K/S^2 - 4 = {rho:.6g} <= 1: no NIG law matches these moments")
    if abs(S) < SYMMETRY_EPS:
        alpha = math.sqrt(3.0 / (K * V))
        return NIGParams(alpha, 0.0, M, V * alpha)
    rho = 3.0 * K / (S * S) - 4.0
    sv = math.sqrt(V)
    return NIGParams(
        alpha=3.0 * math.sqrt(rho) / ((rho - 1.0) * sv * abs(S)),
        beta=3.0 / ((rho - 1.0) * sv * S),
        mu=M - 3.0 * sv / (rho * S),
        delta=3.0 * math.sqrt(rho - 1.0) * sv / (rho * abs(S)),
    )


def diff_cumulants(p1: IGParams, p2: IGParams) -> CumulantSet:
    c1 = ig_cumulants(p1)
    c2 = ig_cumulants(p2)
    return CumulantSet(c1[0] - c2[0], c1[1] + c2[1], c1[2] - c2[2], c1[3] + c2[3])


def moments_of_diff(p1: IGParams, p2: IGParams) -> MomentSet:
    return diff_cumulants(p1, p2).to_moments()


def approx_diff(p1: IGParams, p2: IGParams) -> NIGParams:
    """NIG law matching the first four moments of ``X1 - X2``."""
    return fit_from_moments(moments_of_diff(p1, p2))


def usecase1_params(a: float, b: float) -> NIGParams:
    """Closed form for ``a1 = a2 = a``, ``b1 = b2 = b``."""
    if not (a > 0 and b > 0):
        raise ValueError("a and b must be positive")
    return NIGParams(b * b / math.sqrt(5.0), 0.0, 0.0, 2.0 * a / (math.sqrt(5.0) * b))


def usecase2_params(a1: float, a2: float, c: float) -> NIGParams:
    """Closed form for ``b1/a1 = b2/a2 = c`` with ``a1 != a2``."""
    if not (a1 > 0 and a2 > 0 and c > 0):
        raise ValueError("a1, a2 and c must be positive")
    if a1 == a2:
        raise ValueError("a1 == a2 makes tau vanish; use usecase1_params(a, a * c)")
    s1, s2 = a1 * a1, a2 * a2
    poly = s1 * s1 + 3.0 * s1 * s2 + s2 * s2
    dsq = s1 - s2
    inv_sum = 1.0 / s1 + 1.0 / s2
    tau = (1.0 / s1**2 - 1.0 / s2**2) / (inv_sum**1.5 * math.sqrt(c))
    root = math.sqrt(inv_sum / c**3)
    alpha = dsq * dsq * math.sqrt(poly / dsq**2) / (5.0 * s1 * s2 * root * abs(tau))
    beta = -dsq * c * c / 5.0
    mu = (s1 * s1 - s2 * s2) / (poly * c)
    delta = math.sqrt(5.0) * s1 * s2 * root / (math.sqrt(s1 * s2 / dsq**2) * poly * abs(tau))
    return NIGParams(alpha, beta, mu, delta)


def detect_use_case(p1: IGParams, p2: IGParams, rtol: float = 1e-12) -> tuple[int | None, float | None]:
    """``(1, None)``, ``(2, c)`` or ``(None, None)``."""
    if math.isclose(p1.a, p2.a, rel_tol=rtol) and math.isclose(p1.b, p2.b, rel_tol=rtol):
        return 1, None
    c1, c2 = p1.b / p1.a, p2.b / p2.a
    if math.isclose(c1, c2, rel_tol=rtol):
        return 2, c1
    return None, None


def nig_sample(p: NIGParams, rng: np.random.Generator, size=None):
    """Draws via the variance-mean mixture ``mu + beta W + sqrt(W) N``, ``W ~ IG(delta, gamma)``."""
    w = ig_sample(IGParams(p.delta, p.gamma), rng, size)
    n = rng.standard_normal(size)
    out = p.mu + p.beta * w + np.sqrt(w) * n
    if size is None:
        return float(out)
    return out
