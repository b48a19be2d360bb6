"""Adaptive quadrature of peaked, possibly tiny, log-domain integrands.

Every integral in the package has the form ``int exp(L(u)) du`` with a single
dominant peak, where ``exp(L)`` may sit far below the smallest double.  The
integrand is rescaled by ``exp(-L(peak))`` so QUADPACK's relative tolerance
acts on O(1) numbers, and the domain is split at ``peak +- {1, 4, 16} * width``
so the adaptive Gauss-Kronrod (21-point) refiner never has to discover the
peak on its own.  Unbounded pieces go through QUADPACK's ``qagi`` mapping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

from scipy import integrate, optimize

__all__ = ["QuadratureSpec", "AccuracyError", "find_peak", "curvature_width", "integrate_log"]

_SPLITS = (1.0, 4.0, 16.0)
_MIN_EPSREL = 1.2e-14  # QUADPACK rejects epsrel below 50 machine epsilons when epsabs == 0


class AccuracyError(RuntimeError):
    """Raised when the quadrature error estimate exceeds the requested tolerance."""


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-9
    max_refinements: int = 200

    def __post_init__(self):
        if self.abs_tol < 0 or self.rel_tol < 0 or self.abs_tol + self.rel_tol <= 0:
            raise ValueError("need abs_tol, rel_tol >= 0 with abs_tol + rel_tol > 0")
        if self.max_refinements < 1:
            raise ValueError("max_refinements must be >= 1")


DEFAULT_QUAD = QuadratureSpec()


def find_peak(dlog: Callable[[float], float], lo: float, x0: float, step: float) -> float:
    """Root of the log-derivative ``dlog`` on ``(lo, inf)``, bracketed from ``x0``.

    ``lo`` may be ``-inf``.  Returns ``lo`` when ``dlog`` is nonpositive all the
    way down to the boundary (monotone decreasing integrand).
    """
    finite_lo = math.isfinite(lo)

    def toward_lo(x, k):
        return lo + (x - lo) / 4.0 if finite_lo else x - step * 2.0**k

    g0 = dlog(x0)
    if g0 == 0:
        return x0
    left = right = x0
    if g0 > 0:
        k = 0
        while not dlog(right) < 0:
            right = right + step * 2.0**k
            k += 1
            if k > 200:
                raise AccuracyError("could not bracket the integrand peak")
    else:
        k = 0
        while not dlog(left) > 0:
            left = toward_lo(left, k)
            k += 1
            if k > 200 or (finite_lo and left - lo <= 1e-300):
                return lo
    return optimize.brentq(dlog, left, right, xtol=1e-15 * max(1.0, abs(right)), rtol=1e-15, maxiter=200)


def curvature_width(dlog: Callable[[float], float], peak: float, lo: float, fallback: float) -> float:
    """``1 / sqrt(-L''(peak))`` by central differences, else ``fallback``."""
    room = peak - lo if math.isfinite(lo) else math.inf
    h = min(1e-4 * fallback, 0.5 * room)
    if not h > 0:
        return fallback
    try:
        c = -(dlog(peak + h) - dlog(peak - h)) / (2.0 * h)
    except (ZeroDivisionError, OverflowError, ValueError):
        return fallback
    if not (c > 0 and math.isfinite(c)):
        return fallback
    return 1.0 / math.sqrt(c)


def integrate_log(
    logf: Callable[[float], float],
    lo: float,
    hi: float,
    peak: float,
    width: float,
    q: QuadratureSpec = DEFAULT_QUAD,
    breakpoints: Iterable[float] = (),
) -> tuple[float, float]:
    """``log int_lo^hi exp(logf(u)) du`` and the relative error estimate.

    ``peak`` only needs to be near the maximum of ``logf``; it sets the scale
    factor and the split points.
    """
    if not hi > lo:
        return -math.inf, 0.0
    peak = min(max(peak, lo), hi)
    ref = logf(peak)
    if not math.isfinite(ref):
        raise AccuracyError(f"integrand reference value is not finite at {peak}")

    def g(u):
        v = logf(u) - ref
        return math.exp(v) if v > -745.0 else 0.0

    edges = {lo, hi, peak}
    for s in _SPLITS:
        edges.add(peak - s * width)
        edges.add(peak + s * width)
    edges.update(breakpoints)
    edges = sorted(e for e in edges if lo <= e <= hi)
    pieces = list(zip(edges[:-1], edges[1:]))
    core = [(x, y) for x, y in pieces if math.isfinite(x) and math.isfinite(y) and y - x <= 2.0 * width + 1e-300]
    outer = [pc for pc in pieces if pc not in core]

    epsrel = max(0.5 * q.rel_tol, _MIN_EPSREL)
    total = 0.0
    err = 0.0
    for x, y in core:
        val, e, *_ = integrate.quad(g, x, y, epsabs=0.0, epsrel=epsrel, limit=q.max_refinements, full_output=1)
        total += val
        err += e
    core_total = total if total > 0 else width
    outer_abs = max(0.5 * q.rel_tol, _MIN_EPSREL) * core_total / max(1, len(outer))
    for x, y in outer:
        val, e, *_ = integrate.quad(g, x, y, epsabs=outer_abs, epsrel=epsrel, limit=q.max_refinements, full_output=1)
        total += val
        err += e

    if not total > 0:
        return -math.inf, 0.0
    # abs_tol is in units of the unscaled integral
    abs_scaled = q.abs_tol * math.exp(min(-ref, 700.0))
    if err > max(q.rel_tol * total, abs_scaled):
        raise AccuracyError(
            f"quadrature error estimate {err / total:.3g} (relative) exceeds tolerance "
            f"rel_tol={q.rel_tol:g}, abs_tol={q.abs_tol:g}"
        )
    return ref + math.log(total), err / total
