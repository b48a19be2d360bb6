"""Command-line interface.

Every subcommand accepts ``--abs-tol``, ``--rel-tol``, ``--seed``, ``--out``,
``--format`` and ``--workers``.  Whenever output goes to a file a
``<file>.manifest.json`` is written next to it (``figure`` writes one manifest
for its bundle).  Exit codes: 0 ok, 1 validation failure, 2 usage or input
error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from .figures import (
    FIGURES,
    KINDS,
    METHODS,
    check_method,
    curve_rows,
    default_grid,
    evaluate_curve,
    pair_label,
    parse_grid,
    rows_to_csv,
    sha256,
)
from .ig import IGParams
from .mc import SimConfig, sample_diff
from .metrics import CROSSOVER_METHODS, crossover_probability, kl_exact_vs_nig
from .nig import InfeasibleMomentsError, approx_diff, detect_use_case, diff_cumulants
from .quadrature import AccuracyError, QuadratureSpec
from .validation import SUITES, run_suite

_FLOAT_OPTS_WITH_VALUES = ("--z", "--T")


class UsageError(Exception):
    pass


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--abs-tol", type=float, default=1e-12)
    g.add_argument("--rel-tol", type=float, default=1e-9)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=None, help="output file (directory for `figure`); stdout if omitted")
    g.add_argument("--format", choices=("csv", "json"), default=None)
    g.add_argument("--workers", type=int, default=1, help="process count for grid / block evaluation")
    return p


def _pair_args(p: argparse.ArgumentParser, positional: bool) -> None:
    for name in ("a1", "b1", "a2", "b2"):
        if positional:
            p.add_argument(name, type=float)
        else:
            p.add_argument(f"--{name}", type=float, required=True)


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="igdiff", description="Arrival-time difference of two IG first-hitting times.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", parents=[common], help="NIG moment-matching fit")
    _pair_args(p, positional=True)

    p = sub.add_parser("curve", parents=[common], help="pdf / tail curve as CSV")
    p.add_argument("kind", choices=KINDS)
    p.add_argument("method", choices=METHODS)
    _pair_args(p, positional=False)
    p.add_argument("--z", default=None, help="start:stop:step, endpoints included")
    p.add_argument("--points", type=int, default=201, help="grid size when --z is omitted")

    p = sub.add_parser("figure", parents=[common], help="curve bundle for one figure family")
    p.add_argument("id", type=int)
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--no-kl", action="store_true", help="skip the KL divergences in the manifest")

    p = sub.add_parser("kl", parents=[common], help="KL divergence between quadrature density and NIG fit")
    _pair_args(p, positional=True)

    p = sub.add_parser("crossover", parents=[common], help="out-of-order arrival probability P(X1 - X2 > T)")
    _pair_args(p, positional=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--method", choices=CROSSOVER_METHODS + ("all",), default="all")

    p = sub.add_parser("sample", parents=[common], help="Monte-Carlo draws of X1 - X2")
    _pair_args(p, positional=True)
    p.add_argument("--n", type=int, default=10_000)

    p = sub.add_parser("validate", parents=[common], help="run an oracle suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--n", type=int, default=None, help="sample / path count override")
    return parser


def _rejoin_negative_values(argv: list[str]) -> list[str]:
    # lets `--z -3:3:0.01` through argparse, which would read -3:3:0.01 as a flag
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _FLOAT_OPTS_WITH_VALUES and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def _replay_argv(argv: list[str]) -> list[str]:
    """argv without --out / --workers: those do not affect the output bytes."""
    out = []
    skip = False
    for tok in argv:
        if skip:
            skip = False
            continue
        if tok in ("--out", "--workers"):
            skip = True
            continue
        if tok.startswith(("--out=", "--workers=")):
            continue
        out.append(tok)
    return out


def _quad(args) -> QuadratureSpec:
    return QuadratureSpec(abs_tol=args.abs_tol, rel_tol=args.rel_tol)


def _pair(args) -> tuple[IGParams, IGParams]:
    try:
        return IGParams(args.a1, args.b1), IGParams(args.a2, args.b2)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _manifest(args, argv, checksum: str, extra: dict | None = None) -> dict:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "workers")}
    m = {
        "command": args.command,
        "argv": _replay_argv(argv),
        "parameters": params,
        "seed": args.seed,
        "tolerances": {"abs_tol": args.abs_tol, "rel_tol": args.rel_tol},
        "library_version": __version__,
        "output_sha256": checksum,
    }
    if extra:
        m.update(extra)
    return m


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, allow_nan=False) + "\n"


def _emit(args, argv, text: str, extra: dict | None = None) -> None:
    if args.out is None:
        sys.stdout.write(text)
        return
    path = Path(args.out)
    path.write_text(text, encoding="utf-8", newline="\n")
    manifest = _manifest(args, argv, sha256(text), extra)
    Path(str(path) + ".manifest.json").write_text(_dump_json(manifest), encoding="utf-8", newline="\n")


def _cell(text: str):
    # CSV cell -> JSON number; empty (underflow) and -inf become null
    return float(text) if text and text != "-inf" else None


def _json_float(x: float):
    return x if math.isfinite(x) else None


# -- commands -----------------------------------------------------------------


def cmd_fit(args, argv):
    p1, p2 = _pair(args)
    cum = diff_cumulants(p1, p2)
    mom = cum.to_moments()
    try:
        fit = approx_diff(p1, p2)
    except InfeasibleMomentsError as e:
        raise UsageError(f"infeasible moments: {e}") from None
    uc, c = detect_use_case(p1, p2)
    s = mom.skewness
    rho = 3.0 * mom.excess_kurtosis / (s * s) - 4.0 if s != 0 else math.inf
    report = {
        "alpha": fit.alpha,
        "beta": fit.beta,
        "mu": fit.mu,
        "delta": fit.delta,
        "moments": {
            "mean": mom.mean,
            "variance": mom.variance,
            "skewness": mom.skewness,
            "excess_kurtosis": mom.excess_kurtosis,
        },
        "cumulants": {"k1": cum.k1, "k2": cum.k2, "k3": cum.k3, "k4": cum.k4},
        "rho": _json_float(rho),
        "use_case_detected": uc,
        "c": c,
    }
    if args.format == "csv":
        flat = [("alpha", fit.alpha), ("beta", fit.beta), ("mu", fit.mu), ("delta", fit.delta)]
        flat += [(k, v) for k, v in report["moments"].items()] + [(k, v) for k, v in report["cumulants"].items()]
        flat += [("use_case_detected", "" if uc is None else uc)]
        text = "key,value\n" + "".join(f"{k},{v!r}\n" if isinstance(v, float) else f"{k},{v}\n" for k, v in flat)
    else:
        text = _dump_json(report)
    _emit(args, argv, text)


def cmd_curve(args, argv):
    p1, p2 = _pair(args)
    try:
        check_method(args.kind, args.method, p1, p2)
        zs = parse_grid(args.z) if args.z else default_grid(args.kind, p1, p2, args.points, _quad(args))
    except ValueError as e:
        raise UsageError(str(e)) from None
    logs = evaluate_curve(args.kind, args.method, p1, p2, zs, _quad(args), args.workers)
    rows = curve_rows(zs, logs)
    if args.format == "json":
        text = _dump_json([{"z": float(z), "value": _cell(v), "log10_value": _cell(lv)} for z, v, lv in rows])
    else:
        text = rows_to_csv(rows)
    _emit(args, argv, text)


def cmd_figure(args, argv):
    spec = FIGURES.get(args.id)
    if spec is None:
        raise UsageError(f"unknown figure id {args.id}; choose from {sorted(FIGURES)}")
    if args.out is None:
        raise UsageError("figure needs --out DIR")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    q = _quad(args)
    curves = []
    for p1, p2 in spec.pairs:
        zs = default_grid(spec.kind, p1, p2, args.points, q)
        entry = {"a1": p1.a, "b1": p1.b, "a2": p2.a, "b2": p2.b, "use_case": detect_use_case(p1, p2)[0], "files": {}}
        for method in spec.methods:
            logs = evaluate_curve(spec.kind, method, p1, p2, zs, q, args.workers)
            text = rows_to_csv(curve_rows(zs, logs))
            name = f"fig{args.id}_{spec.kind}_{method}_{pair_label(p1, p2)}.csv"
            (out / name).write_text(text, encoding="utf-8", newline="\n")
            entry["files"][method] = {"file": name, "sha256": sha256(text)}
        entry["z_grid"] = {"start": float(zs[0]), "stop": float(zs[-1]), "points": int(zs.size)}
        if not args.no_kl:
            kl = kl_exact_vs_nig(p1, p2, q)
            entry["kl_exact_nig"] = kl.forward
            entry["kl_nig_exact"] = kl.reverse
        curves.append(entry)
    bundle = {"figure": args.id, "kind": spec.kind, "methods": list(spec.methods), "curves": curves}
    checksum = sha256(_dump_json(bundle))
    manifest = _manifest(args, argv, checksum, {"bundle": bundle})
    (out / f"fig{args.id}_manifest.json").write_text(_dump_json(manifest), encoding="utf-8", newline="\n")
    sys.stdout.write(str(out / f"fig{args.id}_manifest.json") + "\n")


def cmd_kl(args, argv):
    p1, p2 = _pair(args)
    rep = kl_exact_vs_nig(p1, p2, _quad(args))
    payload = {
        "kl_exact_nig": rep.forward,
        "kl_nig_exact": rep.reverse,
        "support": list(rep.support),
        "reported_direction": "KL(exact || nig)",
    }
    if args.format == "csv":
        text = "direction,value\n" + f"exact||nig,{rep.forward!r}\nnig||exact,{rep.reverse!r}\n"
    else:
        text = _dump_json(payload)
    _emit(args, argv, text)


def cmd_crossover(args, argv):
    p1, p2 = _pair(args)
    if args.T < 0:
        raise UsageError("--T must be nonnegative")
    methods = CROSSOVER_METHODS if args.method == "all" else (args.method,)
    vals = {m: crossover_probability(p1, p2, args.T, m, _quad(args)) for m in methods}
    if args.format == "csv":
        text = "method,probability\n" + "".join(f"{m},{v!r}\n" for m, v in vals.items())
    else:
        text = _dump_json({"T": args.T, "probability": vals})
    _emit(args, argv, text)


def cmd_sample(args, argv):
    p1, p2 = _pair(args)
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    z = sample_diff(p1, p2, SimConfig(n_samples=args.n, seed=args.seed), workers=args.workers)
    if args.format == "json":
        text = _dump_json({"n": int(z.size), "mean": float(z.mean()), "variance": float(z.var()), "samples": z.tolist()})
    else:
        text = "z\n" + "".join(f"{v!r}\n" for v in z.tolist())
    _emit(args, argv, text)


def cmd_validate(args, argv):
    kwargs = {"workers": args.workers}
    if args.n is not None:
        kwargs["n"] = args.n
    report = run_suite(args.suite, args.seed, **kwargs)
    _emit(args, argv, _dump_json(report))
    return 0 if report["passed"] else 1


COMMANDS = {
    "fit": cmd_fit,
    "curve": cmd_curve,
    "figure": cmd_figure,
    "kl": cmd_kl,
    "crossover": cmd_crossover,
    "sample": cmd_sample,
    "validate": cmd_validate,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(_rejoin_negative_values(argv))
    try:
        code = COMMANDS[args.command](args, argv)
    except (UsageError, AccuracyError) as e:
        print(f"igdiff {args.command}: error: {e}", file=sys.stderr)
        return 2
    return code or 0


if __name__ == "__main__":
    raise SystemExit(main())
