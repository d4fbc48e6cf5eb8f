"""Command-line front end.

Three exact subcommands (compute, verify, table) plus one deliberately
inexact one (xi-check, the floating-point convergence probe).  All exact
output renders fractions as strings; ordering is fixed by parameter tuples
so repeated runs are byte-identical at any parallelism degree.
"""
from __future__ import annotations

import argparse
import cmath
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from .exact import QHarmonicError, TPoly, parse_rational, render_rational
from .genfun import eval_constant_index, u_poly, xi_ones_coeff
from .identities import (
    InvalidParams,
    UnknownIdentity,
    check_identity,
    default_instances,
    list_identities,
    q_value,
)
from .indices import HeightProfile
from .qseries import (
    L_poly,
    SeriesParams,
    g_sum,
    z_t,
    z_t_float,
    zbar,
    zbar_star,
    zbar_t,
    zeta_params,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3
CAP_GUARD = 8


class UsageError(Exception):
    pass


def _parse_int_list(text: str) -> list[int]:
    """INT, "a..b" inclusive range, or comma list."""
    out: list[int] = []
    try:
        for piece in text.split(","):
            piece = piece.strip()
            if not piece:
                continue
            if ".." in piece:
                lo_s, hi_s = piece.split("..", 1)
                lo, hi = int(lo_s), int(hi_s)
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(piece))
    except ValueError:
        raise UsageError(f"cannot parse integer list {text!r}")
    return out


def _parse_index(text: str) -> tuple[int, ...]:
    if not text.strip():
        return ()
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError:
        raise UsageError(f"cannot parse index {text!r}")


def _json_line(obj) -> str:
    return json.dumps(obj, separators=(",", ":"))


def _series_json(s) -> dict:
    names = s.ring.variables
    out = {}
    for exps, tp in sorted(s.terms.items(), key=lambda kv: (sum(kv[0]), kv[0])):
        parts = [f"{v}^{e}" if e > 1 else v for v, e in zip(names, exps) if e]
        out["*".join(parts) if parts else "1"] = tp.to_json()
    return out


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _guard_cap(value: int, allow: bool) -> int:
    if value > CAP_GUARD and not allow:
        raise UsageError(
            f"cap {value} exceeds the soft limit {CAP_GUARD}; "
            "pass --allow-large-cap to override")
    return value


# ---------------------------------------------------------------------------
# compute
# ---------------------------------------------------------------------------

def _cmd_compute(args: argparse.Namespace) -> int:
    kind = args.kind.replace("-", "_")
    need_nq = kind in ("zbar", "zbar_star", "zbar_t", "z_t", "g_sum", "L")

    def params() -> SeriesParams:
        if args.n is None:
            raise UsageError("--n is required for this kind")
        ns = _parse_int_list(args.n)
        if len(ns) != 1:
            raise UsageError("compute takes a single --n")
        try:
            qv = q_value(args.q, ns[0])
        except ValueError:
            raise UsageError(f"cannot parse q spec {args.q!r}")
        return SeriesParams(ns[0], qv)

    if need_nq:
        sp = params()
    if kind in ("zbar", "zbar_star"):
        parts = _parse_index(args.index)
        fn = zbar if kind == "zbar" else zbar_star
        payload = json.dumps(_scalar_json(fn(parts, sp)), separators=(",", ":"))
    elif kind in ("zbar_t", "z_t"):
        parts = _parse_index(args.index)
        fn = zbar_t if kind == "zbar_t" else z_t
        payload = _json_line(fn(parts, sp).to_json())
    elif kind == "g_sum":
        if args.k is None or args.l is None:
            raise UsageError("g_sum needs --k and --l")
        h = tuple(_parse_int_list(args.h)) if args.h else ()
        profile = HeightProfile(args.k, args.l, h, args.j)
        payload = _json_line(g_sum(profile, sp).to_json())
    elif kind == "L":
        parts = _parse_index(args.index)
        payload = _json_line(L_poly(parts, sp, "interp").to_json())
    elif kind == "eval_const":
        if args.k is None or args.l is None or args.n is None:
            raise UsageError("eval_const needs --k, --l and --n")
        ns = _parse_int_list(args.n)
        if len(ns) != 1:
            raise UsageError("compute takes a single --n")
        payload = _json_line(eval_constant_index(args.k, args.l, ns[0]).to_json())
    elif kind == "u_poly":
        if args.n is None:
            raise UsageError("u_poly needs --n")
        ns = _parse_int_list(args.n)
        if len(ns) != 1:
            raise UsageError("compute takes a single --n")
        payload = _json_line(_series_json(u_poly(ns[0])))
    elif kind == "xi_coeff":
        if args.l is None:
            raise UsageError("xi_coeff needs --l")
        payload = _json_line(xi_ones_coeff(args.l).to_json())
    else:
        raise UsageError(f"unknown compute kind {args.kind!r}")

    if args.format == "csv":
        payload = _compute_csv(payload)
    _emit(payload + "\n", args.out)
    return EXIT_OK


def _scalar_json(value):
    from .exact import scalar_to_json
    return scalar_to_json(value)


def _compute_csv(payload: str) -> str:
    """Flatten the JSON payload into key,value CSV lines (exact strings)."""
    obj = json.loads(payload)
    lines = []
    if isinstance(obj, str):
        lines.append(obj)
    elif isinstance(obj, dict):
        for key, val in obj.items():
            cell = val if isinstance(val, str) else json.dumps(val, separators=(",", ":"))
            lines.append(f"{key},{cell}")
    else:
        lines.append(json.dumps(obj, separators=(",", ":")))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _verify_worker(item: tuple[str, dict]) -> dict:
    ident, params = item
    return check_identity(ident, params).to_json()


def _select_instances(args: argparse.Namespace) -> list[tuple[str, dict]]:
    if args.suite == "all":
        idents = list(list_identities())
    else:
        name = args.suite.replace("-", "_")
        if name not in list_identities():
            raise UnknownIdentity(
                f"unknown suite {args.suite!r}; known: all, "
                + ", ".join(list_identities()))
        idents = [name]
    ns = set(_parse_int_list(args.n)) if args.n else None
    rs = set(_parse_int_list(args.r)) if args.r else None
    out = []
    for ident in idents:
        for params in default_instances(ident):
            if ns is not None and "n" in params and params["n"] not in ns:
                continue
            if rs is not None and "r" in params and params["r"] not in rs:
                continue
            if args.q is not None and "q" in params and params["q"] != args.q:
                continue
            if "cap" in params:
                cap = args.cap if args.cap is not None else params["cap"]
                if args.max_cap is not None:
                    cap = min(cap, args.max_cap)
                params = dict(params, cap=_guard_cap(cap, args.allow_large_cap))
            out.append((ident, params))
    return out


def _cmd_verify(args: argparse.Namespace) -> int:
    if args.cap is not None:
        _guard_cap(args.cap, args.allow_large_cap)
    instances = _select_instances(args)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_verify_worker, instances, chunksize=1))
    else:
        reports = [_verify_worker(item) for item in instances]

    counts = {"pass": 0, "fail": 0, "skip": 0}
    for rep in reports:
        counts[rep["status"]] += 1
    if args.format == "csv":
        import io
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["identity", "status", "params", "mismatch"])
        for rep in reports:
            writer.writerow([
                rep["identity"],
                rep["status"],
                _json_line(rep["params"]),
                _json_line(rep["mismatch"]) if rep["mismatch"] else "",
            ])
        body = buf.getvalue()
    else:
        body = "".join(_json_line(rep) + "\n" for rep in reports)
    _emit(body, args.out)
    print(f"{counts['pass']} passed / {counts['fail']} failed / "
          f"{counts['skip']} skipped")
    return EXIT_OK if counts["fail"] == 0 else EXIT_FAIL


# ---------------------------------------------------------------------------
# table
# ---------------------------------------------------------------------------

def _cmd_table(args: argparse.Namespace) -> int:
    ns = _parse_int_list(args.n) if args.n else []
    rows: list[tuple[tuple[int, ...], TPoly]] = []
    if args.kind == "gsum":
        for n in ns:
            zp = zeta_params(n)
            for k in range(args.k + 1):
                for l in range(k + 1):
                    rows.append(((n, k, l),
                                 g_sum(HeightProfile(k, l), zp).rationalized()))
    elif args.kind == "eval":
        for n in ns:
            for k in range(1, min(args.k, 3) + 1):
                for l in range(args.l + 1):
                    rows.append(((n, k, l), eval_constant_index(k, l, n)))
    else:
        raise UsageError(f"unknown table kind {args.kind!r}")

    width = max((tp.degree() + 1 for _, tp in rows if not tp.is_zero()), default=0)
    columns = ["n", "k", "l"] + [f"t^{e}" for e in range(width)]
    cells = [[str(v) for v in key] + [render_rational(Fraction(c))
                                      for c in _dense(tp, width)]
             for key, tp in rows]
    if args.format == "csv":
        lines = [",".join(columns)] + [",".join(row) for row in cells]
        body = "\n".join(lines) + "\n"
    else:
        body = _json_line({"columns": columns, "rows": cells}) + "\n"
    _emit(body, args.out)
    return EXIT_OK


def _dense(tp: TPoly, width: int) -> list[Fraction]:
    out = [Fraction(0)] * width
    for e, c in tp.coeffs.items():
        out[e] = Fraction(c)
    return out


# ---------------------------------------------------------------------------
# xi-check
# ---------------------------------------------------------------------------

def _cmd_xi_check(args: argparse.Namespace) -> int:
    ls = _parse_int_list(args.l)
    ts = [float(parse_rational(p)) if "/" in p else float(p)
          for p in args.t.split(",")]
    ns = _parse_int_list(args.n)
    if sorted(ns) != ns:
        raise UsageError("--n values must be increasing for the convergence check")
    rows = []
    ok = True
    for l in ls:
        coeff = xi_ones_coeff(l)
        for t in ts:
            target = complex(float(coeff.eval(Fraction(t)))) * (-2j * cmath.pi) ** l
            errs = [abs(z_t_float((1,) * l, n, t) - target) for n in ns]
            # relative error degenerates at a zero target; fall back to absolute
            rel = errs[-1] / abs(target) if target != 0 else errs[-1]
            conv = all(a > b for a, b in zip(errs, errs[1:])) and rel < 0.1
            ok = ok and conv
            rows.append({
                "l": l, "t": t,
                "errors": [f"{e:.6e}" for e in errs],
                "final_rel_err": f"{rel:.6e}",
                "converging": conv,
            })
    if args.format == "csv":
        lines = ["l,t,errors,final_rel_err,converging"]
        for row in rows:
            lines.append(",".join([
                str(row["l"]), str(row["t"]),
                ";".join(row["errors"]), row["final_rel_err"],
                str(row["converging"]).lower(),
            ]))
        body = "\n".join(lines) + "\n"
    else:
        body = "".join(_json_line(row) + "\n" for row in rows)
    _emit(body, args.out)
    print("converged" if ok else "not converged")
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="qharmonic",
        description="Exact finite multiple harmonic q-series calculator "
                    "and identity verifier.")
    sub = top.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("compute", help="compute one exact value")
    pc.add_argument("kind", help="zbar|zbar-star|zbar-t|z-t|g-sum|L|"
                                 "eval-const|u-poly|xi-coeff")
    pc.add_argument("--n", help="modulus (single integer)")
    pc.add_argument("--q", default="zeta", help='"zeta" or a rational "p/q"')
    pc.add_argument("--index", default="", help="comma-separated multi-index")
    pc.add_argument("--k", type=int, help="weight")
    pc.add_argument("--l", type=int, help="depth")
    pc.add_argument("--h", default="", help="comma-separated i-heights")
    pc.add_argument("--j", type=int, default=-1, help="head bound (-1 for none)")
    pc.add_argument("--format", choices=("json", "csv"), default="json")
    pc.add_argument("--out", help="write output to this path")
    pc.set_defaults(fn=_cmd_compute)

    pv = sub.add_parser("verify", help="run identity suites")
    pv.add_argument("--suite", default="all", help="identity id or 'all'")
    pv.add_argument("--n", help="restrict to these n (INT, a..b, or list)")
    pv.add_argument("--r", help="restrict to these r (comma list)")
    pv.add_argument("--q", help="restrict to this q spec")
    pv.add_argument("--cap", type=int, help="override truncation order")
    pv.add_argument("--max-cap", type=int, help="clamp truncation order")
    pv.add_argument("--allow-large-cap", action="store_true",
                    help=f"lift the cap <= {CAP_GUARD} guard")
    pv.add_argument("--jobs", type=int, default=1, help="worker processes")
    pv.add_argument("--format", choices=("json", "csv"), default="json")
    pv.add_argument("--out", help="write per-instance reports to this path")
    pv.set_defaults(fn=_cmd_verify)

    pt = sub.add_parser("table", help="emit a value table")
    pt.add_argument("kind", help="gsum|eval")
    pt.add_argument("--n", default="", help="moduli (INT, a..b, or list)")
    pt.add_argument("--k", type=int, default=3, help="max weight")
    pt.add_argument("--l", type=int, default=4, help="max depth (eval)")
    pt.add_argument("--format", choices=("json", "csv"), default="csv")
    pt.add_argument("--out", help="write table to this path")
    pt.set_defaults(fn=_cmd_table)

    px = sub.add_parser("xi-check", help="floating-point convergence probe")
    px.add_argument("--l", default="1,2,3", help="depths to probe")
    px.add_argument("--t", default="0,0.5,1", help="t samples (floats allowed)")
    px.add_argument("--n", default="50,400", help="moduli, increasing")
    px.add_argument("--format", choices=("json", "csv"), default="json")
    px.add_argument("--out", help="write rows to this path")
    px.set_defaults(fn=_cmd_xi_check)
    return top


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if not exc.code else EXIT_USAGE
    try:
        return args.fn(args)
    except (UsageError, UnknownIdentity) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidParams, QHarmonicError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
