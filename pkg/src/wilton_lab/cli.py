"""Command-line front end: ``wilton-lab {eval,cotangent,scan,moments,verify}``.

Exit codes: 0 success, 1 invariant failure, 2 usage or parse error,
3 domain error, 4 calibration failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence

from . import __version__
from .errors import CalibrationError, DomainError, ParseError

EXIT_OK, EXIT_INVARIANT, EXIT_USAGE, EXIT_DOMAIN, EXIT_CALIBRATION = 0, 1, 2, 3, 4

EVAL_TARGETS = ("g", "wilton", "H", "G", "A", "F", "phi2", "L-partial")
REAL_TARGETS = ("A", "F", "phi2")
DEFAULT_TOL = 1e-10
DEFAULT_BUDGET = 10**6
CALIBRATION_L = 5
CALIBRATION_REL = 1e-3


@dataclass
class RunConfig:
    """Everything that determines a run's output.

    ``threads`` is carried for dispatch but left out of the echoed config:
    results do not depend on it, and artifacts must be byte-identical
    across thread counts.
    """

    command: str
    target: Optional[str] = None
    x: Optional[str] = None
    n: Optional[int] = None
    tol: Optional[float] = None
    r: Optional[int] = None
    b: Optional[int] = None
    a0: Optional[float] = None
    a1: Optional[float] = None
    K: List[int] = field(default_factory=list)
    budget: Optional[int] = None
    seed: Optional[int] = None
    method: Optional[str] = None
    g_tol: Optional[float] = None
    suite: Optional[str] = None
    format: str = "text"
    output: Optional[str] = None
    threads: int = 1
    timing: bool = False
    version: str = __version__

    def to_dict(self):
        d = asdict(self)
        del d["threads"]
        return d


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _budget(text: str) -> int:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"budget must be a number, got {text!r}") from None
    if not (math.isfinite(v) and v == int(v) and v >= 4):
        raise argparse.ArgumentTypeError(f"budget must be an integer >= 4, got {text!r}")
    return int(v)


def _k_list(text: str) -> List[int]:
    try:
        ks = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"K must be a comma-separated list of integers, got {text!r}") from None
    if not ks:
        raise argparse.ArgumentTypeError("K list is empty")
    return ks


def _seed(text: str) -> int:
    v = int(text, 0)
    if not (0 <= v < 2**64):
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wilton-lab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, formats=("text", "json")):
        sp.add_argument("--format", choices=formats, default=formats[0])
        sp.add_argument("--output", "-o", help="write the artifact here (atomically)")
        sp.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: $WILTON_LAB_THREADS or 1)")

    e = sub.add_parser("eval", help="evaluate one function at one point")
    e.add_argument("target", choices=EVAL_TARGETS)
    e.add_argument("--x", required=True,
                   help="point: 13/29, 0x.../2^64, dyadic:SEED, [0;2,4,3], [0;(1)]; "
                        "for A, F, phi2 a real such as 1, 1/2 or 0.37")
    e.add_argument("--tol", type=float, default=DEFAULT_TOL)
    e.add_argument("--n", type=int, default=None, help="index for L-partial")
    common(e)

    c = sub.add_parser("cotangent", help="c0(r/b)")
    c.add_argument("--r", type=int, required=True)
    c.add_argument("--b", type=int, required=True)
    common(c)

    s = sub.add_parser("scan", help="c0(r/b) for coprime r in [a0 b, a1 b]")
    s.add_argument("--b", type=int, required=True)
    s.add_argument("--a0", type=float, required=True)
    s.add_argument("--a1", type=float, required=True)
    common(s, formats=("csv", "json", "text"))

    m = sub.add_parser("moments", help="table of M_K = int |g|^K against 2 e^{-A} K!")
    m.add_argument("--K", type=_k_list, required=True, help="comma-separated, e.g. 2,4,6,8")
    m.add_argument("--budget", type=_budget, default=DEFAULT_BUDGET)
    m.add_argument("--seed", type=_seed, default=0)
    m.add_argument("--method", choices=("importance_mc", "stratified_mc", "oracle_quadrature"),
                   default="importance_mc")
    m.add_argument("--g-tol", type=float, default=None, help="per-sample accuracy of g (default 1e-4)")
    m.add_argument("--timing", action="store_true", help="record wall_seconds (breaks byte identity)")
    common(m, formats=("json", "csv", "text"))

    v = sub.add_parser("verify", help="run an invariant suite")
    v.add_argument("suite", choices=("cf", "special", "wilton", "gfun", "measure", "all"))
    common(v)
    return p


def config_from_args(args) -> RunConfig:
    from .streams import resolve_threads

    cfg = RunConfig(command=args.command, format=args.format, output=args.output,
                    threads=resolve_threads(args.threads))
    if args.command == "eval":
        cfg.target, cfg.x, cfg.tol, cfg.n = args.target, args.x, args.tol, args.n
        if cfg.target == "L-partial" and cfg.n is None:
            raise ParseError("L-partial needs --n")
        if not (cfg.tol > 0):
            raise DomainError("--tol must be positive")
    elif args.command == "cotangent":
        cfg.r, cfg.b = args.r, args.b
    elif args.command == "scan":
        cfg.b, cfg.a0, cfg.a1 = args.b, args.a0, args.a1
    elif args.command == "moments":
        from .moments import DEFAULT_G_TOL

        cfg.K, cfg.budget, cfg.seed, cfg.method = args.K, args.budget, args.seed, args.method
        cfg.g_tol = args.g_tol if args.g_tol is not None else DEFAULT_G_TOL
        cfg.timing = args.timing
    elif args.command == "verify":
        cfg.suite = args.suite
    return cfg


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def _emit(cfg: RunConfig, text: str, summary: Optional[str] = None) -> None:
    """Artifact to --output (atomic) or stdout; the summary goes where the artifact does not."""
    from .artifacts import atomic_write_text

    if cfg.output:
        atomic_write_text(cfg.output, text)
        if summary:
            sys.stdout.write(summary)
    else:
        sys.stdout.write(text)
        if summary:
            sys.stderr.write(summary)


def _fmt(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def _text_block(pairs) -> str:
    return "".join(f"{k}: {_fmt(v)}\n" for k, v in pairs)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _parse_real(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"cannot parse real number {text!r}") from None


def cmd_eval(cfg: RunConfig) -> int:
    from . import gfun, special
    from .wilton import g_big, h_func, partial_sum_L
    from .wilton import wilton as wilton_value
    from .realspec import parse_realspec

    t = cfg.target
    terminated = False
    if t in REAL_TARGETS:
        lam = _parse_real(cfg.x)
        if t == "A":
            res, route = special.a_lambda(lam, cfg.tol), "A(lam) = lam/2 log(1/lam) + (1+A(1))/2 lam + lam^2/2 phi2(1/lam) - J(lam)"
            if lam == 1:
                res, route = special.a_one(), "A(1): per-interval series with Hurwitz-zeta tail"
        elif t == "F":
            res, route = special.f_func(lam, cfg.tol), "F(x) = A(1)/2 - x/2 - x^2/2 phi2(1/x) + J(x)"
        else:
            res, route = special.phi2(lam, cfg.tol), "phi2: residue-class summation"
        value, bound, terms = res.value, res.abs_error_bound, res.terms_used
    else:
        x = parse_realspec(cfg.x)
        if t == "wilton":
            w = wilton_value(x, cfg.tol)
            value, bound, terms, terminated = w.value, w.abs_error_bound, w.depth, w.terminated
            route = "W = sum (-1)^k gamma_k over the continued-fraction orbit"
        elif t == "L-partial":
            value, bound, terms = partial_sum_L(x, cfg.n), 0.0, cfg.n + 1
            route = "L(x, n) = sum_{v<=n} (-1)^v gamma_v (128-bit)"
        else:
            fn = {"g": gfun.g_fast, "H": h_func, "G": g_big}[t]
            res = fn(x, cfg.tol)
            value, bound, terms, terminated = res.value, res.abs_error_bound, res.terms_used, res.terminated
            route = {"g": "g = W + H over the continued-fraction orbit",
                     "H": "H = -2G", "G": "G = sum (-1)^j beta_{j-1} F(alpha_j)"}[t]
    result = {"target": t, "x": cfg.x, "value": value, "abs_error_bound": bound,
              "terms_used": terms, "terminated": terminated, "route": route}
    if cfg.format == "json":
        text = json.dumps({"config": cfg.to_dict(), "result": result}, indent=2) + "\n"
    else:
        text = _text_block(result.items())
    _emit(cfg, text)
    return EXIT_OK


def cmd_cotangent(cfg: RunConfig) -> int:
    from .gfun import cotangent_sum

    v = cotangent_sum(cfg.r, cfg.b)
    result = {"r": cfg.r, "b": cfg.b, "c0": v, "c0_over_b": v / cfg.b}
    if cfg.format == "json":
        text = json.dumps({"config": cfg.to_dict(), "result": result}, indent=2) + "\n"
    else:
        text = _text_block(result.items())
    _emit(cfg, text)
    return EXIT_OK


def cmd_scan(cfg: RunConfig) -> int:
    from .artifacts import rows_to_csv
    from .gfun import SCAN_HEADER, scan_cotangent

    recs = scan_cotangent(cfg.b, cfg.a0, cfg.a1, threads=cfg.threads)
    rows = [{"r": r.r, "b": r.b, "c0": r.value, "c0_over_b": r.normalized} for r in recs]
    if cfg.format == "csv":
        text = rows_to_csv(SCAN_HEADER, rows, cfg.to_dict())
    elif cfg.format == "json":
        text = json.dumps({"config": cfg.to_dict(), "rows": rows}, indent=2) + "\n"
    else:
        text = "".join(f"{r['r']}/{r['b']}  {_fmt(r['c0'])}  {_fmt(r['c0_over_b'])}\n" for r in rows)
    _emit(cfg, text, f"{len(rows)} records\n")
    return EXIT_OK


def cmd_moments(cfg: RunConfig) -> int:
    from . import moments
    from .artifacts import MOMENT_COLUMNS, moment_row, moment_table_json, rows_to_csv

    cal = moments.calib_moment_l(CALIBRATION_L, seed=cfg.seed, threads=cfg.threads)
    if cal.rel_error > CALIBRATION_REL:
        raise CalibrationError(
            f"calibration int l^{CALIBRATION_L} = {cal.value!r} misses {cal.exact!r} "
            f"by {cal.rel_error:.3g} (> {CALIBRATION_REL})")
    for K in cfg.K:
        if not (1 <= K <= moments.K_MAX):
            raise DomainError(f"K must be in 1..{moments.K_MAX}, got {K}")
    rows = []
    ests = []
    for K in cfg.K:
        t0 = time.perf_counter()
        est = moments.moment_g(K, cfg.budget, cfg.seed, cfg.method, cfg.g_tol, cfg.threads)
        wall = time.perf_counter() - t0 if cfg.timing else None
        ests.append(est)
        rows.append(moment_row(est, wall))
    const = moments.limit_constant()
    checks = {
        "limit_constant": const,
        "sandwich_ok": {str(k): v for k, v in moments.sandwich_check(ests).items()},
        "trend_toward_constant": moments.trend_toward_constant(ests),
        "calibration": cal.to_dict(),
    }
    if cfg.format == "json":
        text = moment_table_json(cfg.to_dict(), rows, {"checks": checks})
    elif cfg.format == "csv":
        text = rows_to_csv(MOMENT_COLUMNS, rows, cfg.to_dict())
    else:
        text = _moment_text(rows)
    summary = _moment_summary(rows, const, checks)
    _emit(cfg, text, summary if cfg.format != "text" else None)
    if cfg.format == "text":
        sys.stdout.write(summary)
    return EXIT_OK


def _moment_text(rows) -> str:
    lines = ["K  value  std_error  M_K/K!  M_K/prediction  M_K/pi^K"]
    for r in rows:
        lines.append(f"{r['K']}  {_fmt(r['value'])}  {_fmt(r['std_error'])}  {_fmt(r['ratio_to_gamma'])}  "
                     f"{_fmt(r['ratio'])}  {_fmt(r['value_over_pi_k'])}")
    return "\n".join(lines) + "\n"


def _moment_summary(rows, const, checks) -> str:
    out = [f"reference: M_K / K! -> 2 exp(-A) = {const:.6f}"]
    for r in rows:
        rel = r["std_error"] / r["value"]
        out.append(f"  K={r['K']:>2}  M_K/K! = {r['ratio_to_gamma']:.6f}  (rel. s.e. {rel:.2e})  "
                   f"M_K/prediction = {r['ratio']:.6f}")
    out.append(f"  bounded in (0.2, 2) for K >= 4: {all(checks['sandwich_ok'].values())}; "
               f"gap to the constant decreasing: {checks['trend_toward_constant']}")
    return "\n".join(out) + "\n"


def cmd_verify(cfg: RunConfig) -> int:
    from .verify import all_hard_pass, run_suite

    checks = run_suite(cfg.suite)
    ok = all_hard_pass(checks)
    lines = []
    for c in checks:
        tag = "INFO" if not c.hard else ("PASS" if c.passed else "FAIL")
        extra = f"  {c.detail}" if c.detail else ""
        lines.append(f"{tag}  [{c.suite}] {c.name}: observed={c.observed:.6g} limit={c.limit:.6g} "
                     f"margin={c.margin:.3g}{extra}")
    lines.append(f"{'ALL HARD CHECKS PASSED' if ok else 'HARD CHECK FAILURE'} ({len(checks)} checks)")
    report = "\n".join(lines) + "\n"
    if cfg.format == "json":
        text = json.dumps({"config": cfg.to_dict(), "passed": ok,
                           "checks": [c.to_dict() for c in checks]}, indent=2) + "\n"
        _emit(cfg, text, report)
    else:
        _emit(cfg, report)
    return EXIT_OK if ok else EXIT_INVARIANT


COMMANDS = {"eval": cmd_eval, "cotangent": cmd_cotangent, "scan": cmd_scan,
            "moments": cmd_moments, "verify": cmd_verify}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.command](cfg)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CalibrationError as exc:
        print(f"calibration failure: {exc}", file=sys.stderr)
        return EXIT_CALIBRATION
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
