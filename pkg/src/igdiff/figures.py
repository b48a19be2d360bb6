"""Curve generation for the evaluation figures.

Figure families (one CSV per curve, i.e. per parameter set and method):

====  ======  =================================  ==================================
 id   kind    parameter sets                     methods
====  ======  =================================  ==================================
 1    pdf     a = b in {1, 3, 10, 30}            exact, nig
 2    tail    a = b in {1, 3, 10, 30}            exact, nig, asymptotic
 3    pdf     (a, b) in {(1,3),(3,1),(2,5),(5,2)} exact, nig
 4    tail    same as 3                          exact, nig, asymptotic
 5    pdf     (a1, a2, c) in {(2,4,1),(4,2,1),   exact, nig
              (1,3,2)}, b_i = c a_i
 6    tail    same as 5                          exact, nig, asymptotic
 7    tail    a = b = 3                          exact, asymptotic, soa
====  ======  =================================  ==================================

Figures 1-4 and 7 use equal parameters for both molecules.  These sets are a
documented desk-scale grid, not values read off any published plot.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from .diff import log_asymptotic_tail, log_conv_pdf, log_conv_tail, log_soa_tail
from .ig import IGParams
from .mc import pmap
from .nig import approx_diff, detect_use_case, diff_cumulants, log_nig_tail, nig_logpdf
from .quadrature import DEFAULT_QUAD, QuadratureSpec

__all__ = [
    "FigureSpec",
    "FIGURES",
    "KINDS",
    "METHODS",
    "log_curve_value",
    "evaluate_curve",
    "curve_rows",
    "rows_to_csv",
    "default_grid",
    "parse_grid",
    "sha256",
]

KINDS = ("pdf", "tail")
METHODS = ("exact", "nig", "asymptotic", "soa")
_LOG_TINY = math.log(np.finfo(float).tiny)


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    methods: tuple[str, ...]
    pairs: tuple[tuple[IGParams, IGParams], ...]


def _same(a, b):
    p = IGParams(a, b)
    return (p, p)


def _ratio(a1, a2, c):
    return (IGParams(a1, c * a1), IGParams(a2, c * a2))


_UC1 = tuple(_same(a, a) for a in (1.0, 3.0, 10.0, 30.0))
_UNEQUAL = tuple(_same(a, b) for a, b in ((1.0, 3.0), (3.0, 1.0), (2.0, 5.0), (5.0, 2.0)))
_UC2 = tuple(_ratio(*t) for t in ((2.0, 4.0, 1.0), (4.0, 2.0, 1.0), (1.0, 3.0, 2.0)))

FIGURES = {
    1: FigureSpec("pdf", ("exact", "nig"), _UC1),
    2: FigureSpec("tail", ("exact", "nig", "asymptotic"), _UC1),
    3: FigureSpec("pdf", ("exact", "nig"), _UNEQUAL),
    4: FigureSpec("tail", ("exact", "nig", "asymptotic"), _UNEQUAL),
    5: FigureSpec("pdf", ("exact", "nig"), _UC2),
    6: FigureSpec("tail", ("exact", "nig", "asymptotic"), _UC2),
    7: FigureSpec("tail", ("exact", "asymptotic", "soa"), (_same(3.0, 3.0),)),
}


def check_method(kind: str, method: str, p1: IGParams, p2: IGParams) -> None:
    if kind not in KINDS:
        raise ValueError(f"unknown curve kind {kind!r}")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if kind == "pdf" and method in ("asymptotic", "soa"):
        raise ValueError(f"method {method!r} is a tail approximation; no pdf curve exists")
    if method == "soa" and detect_use_case(p1, p2)[0] != 1:
        raise ValueError("method 'soa' needs a1 == a2 and b1 == b2")


def log_curve_value(kind, method, p1, p2, q, z):
    if kind == "pdf":
        if method == "exact":
            return log_conv_pdf(p1, p2, z, q)
        return float(nig_logpdf(approx_diff(p1, p2), z))
    if method == "exact":
        return log_conv_tail(p1, p2, z, q)
    if method == "nig":
        return log_nig_tail(approx_diff(p1, p2), z, q)
    if method == "asymptotic":
        return log_asymptotic_tail(p1, p2, z)
    return log_soa_tail(p1.a, p1.b, z)


def evaluate_curve(kind, method, p1, p2, zs, q: QuadratureSpec = DEFAULT_QUAD, workers: int = 1) -> list[float]:
    check_method(kind, method, p1, p2)
    fn = partial(log_curve_value, kind, method, p1, p2, q)
    return pmap(fn, [float(z) for z in zs], workers)


def _fmt(x: float) -> str:
    # shortest round-trip repr; locale independent
    return repr(float(x))


def curve_rows(zs, logs) -> list[tuple[str, str, str]]:
    """Rows ``(z, value, log10_value)``; ``value`` is left empty when it underflows."""
    rows = []
    for z, lv in zip(zs, logs):
        if lv == -math.inf:
            rows.append((_fmt(z), "0", "-inf"))
        elif lv < _LOG_TINY:
            rows.append((_fmt(z), "", _fmt(lv / math.log(10.0))))
        else:
            rows.append((_fmt(z), _fmt(math.exp(lv)), _fmt(lv / math.log(10.0))))
    return rows


def rows_to_csv(rows) -> str:
    lines = ["z,value,log10_value"]
    lines += [",".join(r) for r in rows]
    return "\n".join(lines) + "\n"


def parse_grid(spec: str) -> np.ndarray:
    """``start:stop:step`` with both endpoints included."""
    try:
        start, stop, step = (float(s) for s in spec.split(":"))
    except ValueError:
        raise ValueError(f"grid must look like start:stop:step, got {spec!r}") from None
    if not step > 0 or stop < start:
        raise ValueError("need step > 0 and stop >= start")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    zs = start + step * np.arange(n)
    if stop - zs[-1] > 1e-9 * step:
        zs = np.append(zs, stop)
    return zs


def default_grid(kind: str, p1: IGParams, p2: IGParams, points: int = 201, q: QuadratureSpec = DEFAULT_QUAD) -> np.ndarray:
    """pdf: mean +- 6 sd.  tail: 0 up to where the exact tail reaches 1e-30."""
    c = diff_cumulants(p1, p2)
    sd = math.sqrt(c.k2)
    if kind == "pdf":
        return np.linspace(c.k1 - 6.0 * sd, c.k1 + 6.0 * sd, points)
    target = math.log(1e-30)
    hi = max(c.k1, 0.0) + sd
    while log_conv_tail(p1, p2, hi, q) > target:
        hi *= 2.0
    return np.linspace(0.0, hi, points)


def pair_label(p1: IGParams, p2: IGParams) -> str:
    return f"a1={p1.a:g}_b1={p1.b:g}_a2={p2.a:g}_b2={p2.b:g}"


def sha256(data: str | bytes) -> str:
    if isinstance(data, str):
        data = data.encode()
    return hashlib.sha256(data).hexdigest()
