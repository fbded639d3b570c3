"""Command-line driver: ``nonvanishing <verb> [options]``.

Tables go out as CSV (to ``--out`` or stdout), single results as JSON
records when ``--emit-json`` is given; every record carries the resolved
configuration. Floats are written with 17 significant digits. Progress and
human-readable summaries go to stderr.

Exit codes: 0 success, 1 a checked property failed, 2 usage or domain
error, 3 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .errors import BudgetExceeded, ConvergenceError, DomainError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NONCONV = 0, 1, 2, 3

log = logging.getLogger("nonvanishing")


# ------------------------------------------------------------------ output


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return str(x)


def _json(obj) -> str:
    """JSON with every float at 17 significant digits; complex as {re, im}."""
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "null"
        t = f"{x:.17g}"
        return t if any(ch in t for ch in ".en") else t + ".0"
    if isinstance(obj, complex):
        return _json({"re": obj.real, "im": obj.imag})
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


class Output:
    def __init__(self, args):
        self.args = args
        self.out_path = args.out
        self.emit_json = args.emit_json
        self._fh = None
        self.rows = []

    def _stream(self):
        if self._fh is None:
            self._fh = open(self.out_path, "w", newline="") if self.out_path else sys.stdout
        return self._fh

    def table(self, header, rows):
        """Write rows as CSV; rows may be a generator (streamed, flushed per row)."""
        embed = self.emit_json and not self.out_path
        writer = None if embed else csv.writer(self._stream())
        if writer:
            writer.writerow(header)
        for row in rows:
            if embed:
                self.rows.append(dict(zip(header, row)))
            else:
                writer.writerow([fmt(v) for v in row])
                self._fh.flush()

    def record(self, result: dict, human: list[str]):
        rec = {"command": self.args.command, "config": config_of(self.args), "result": result}
        if self.rows:
            rec["rows"] = self.rows
        if self.emit_json:
            text = _json(rec) + "\n"
            if self.out_path and self._fh is None:
                with open(self.out_path, "w") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
        for line in human:
            print(line, file=sys.stderr if (self._fh is sys.stdout or self.emit_json) else sys.stdout)

    def close(self):
        if self._fh is not None and self._fh is not sys.stdout:
            self._fh.close()


def config_of(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}


def _floats(text: str) -> list[float]:
    text = text.strip()
    if not text:
        return []
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _families(text: str) -> list[tuple]:
    """';'-separated Hermite coefficient tuples; an empty item is the cubic."""
    return [tuple(_floats(item)) for item in text.split(";")]


def _map(fn, jobs, threads: int, chunksize: int = 64):
    """Order-preserving map, parallel when threads > 1."""
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(threads) as ex:
            return list(ex.map(fn, jobs, chunksize=chunksize))
    return [fn(j) for j in jobs]


def _sample(ds: np.ndarray, n: int | None, seed: int) -> np.ndarray:
    if n is None or n >= len(ds):
        return ds
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(ds, size=n, replace=False))


# --------------------------------------------------------------- commands


def _chowla_row(job):
    from .lfun import positivity_check

    d, step = job
    r = positivity_check(d, grid_step=step)
    return (r.d, r.min_value, r.min_location, r.positive)


def cmd_verify_chowla(args, out: Output) -> int:
    from .arith import sieve_squarefree

    if args.max > args.budget:
        raise BudgetExceeded(f"--max {args.max} exceeds --budget {args.budget}")
    ds = sieve_squarefree(max(args.max, 1)).odd_squarefree_array(args.min, args.max)
    ds = _sample(ds, args.sample, args.seed)
    t0 = time.perf_counter()
    rows = _map(_chowla_row, [(int(d), args.grid_step) for d in ds], args.threads)
    out.table(["d", "min_value", "min_location", "positive"], rows)
    n = len(rows)
    n_pos = sum(1 for r in rows if r[3])
    prop = n_pos / n if n else None
    result = {"count": n, "positive": n_pos, "proportion": prop,
              "failures": [r[0] for r in rows if not r[3]]}
    human = [f"odd square-free d in [{args.min}, {args.max}]: {n} checked, {n_pos} positive",
             "proportion: " + ("undefined (empty range)" if prop is None else fmt(prop)),
             f"elapsed {time.perf_counter() - t0:.1f} s"]
    out.record(result, human)
    if prop is None:
        return EXIT_OK
    return EXIT_OK if (n_pos == n and prop >= 0.20) else EXIT_FAIL


def cmd_reproduce_bound(args, out: Output) -> int:
    from .mollify import hermite_polynomial
    from .special import QuadratureSpec
    from .theory import BoundParams, bound_report

    if args.S is None:
        args.S = BoundParams.default_S(args.b)
    S = args.S
    params = BoundParams(args.R, S, args.b, hermite_polynomial(args.b, tuple(args.extra)), args.rho)
    tol = args.tol if args.tol is not None else 1e-12
    q = QuadratureSpec(abs_tol=tol, rel_tol=min(1e-10, max(tol, 1e-14)))
    rep = bound_report(params, q)
    result = {"J1": rep.J1, "J2": rep.J2, "J2_tail": rep.J2_tail, "U_max": rep.U_max,
              "threshold": rep.threshold, "c": rep.c, "one_minus_c": 1 - rep.c,
              "quadrature_error": rep.error, "P": list(params.P)}
    human = [f"J1 = {fmt(rep.J1)}", f"J2 = {fmt(rep.J2)} (tail beyond U={rep.U_max:g}: {rep.J2_tail:.3e})",
             f"threshold 8 S sinh(pi R/2S) = {fmt(rep.threshold)}",
             f"c = {fmt(rep.c)}", f"1 - c = {fmt(1 - rep.c)}"]
    out.record(result, human)
    return EXIT_OK


def _ks_row(job):
    from .lfun import low_zero_statistic

    d, S, logX = job
    return low_zero_statistic(d, S, logX)


def cmd_ks(args, out: Output) -> int:
    from .special import QuadratureSpec
    from .theory import ks_density_integral

    tol = args.tol if args.tol is not None else 1e-12
    val = ks_density_integral(args.S, QuadratureSpec(abs_tol=tol, rel_tol=max(tol, 1e-14)))
    result = {"S": args.S, "integral": val}
    human = [f"density integral at S = {fmt(args.S)}: {fmt(val)}"]
    if args.empirical is not None:
        from .mollify import odd_squarefree_window

        X = float(args.empirical)
        ds = _sample(odd_squarefree_window(X), args.sample, args.seed)
        stats = _map(_ks_row, [(int(d), args.S, math.log(X)) for d in ds], args.threads, 8)
        mean = math.fsum(stats) / len(stats) if stats else None
        result.update({"X": X, "sample_count": len(stats), "empirical_mean": mean})
        human.append(f"empirical mean over {len(stats)} d in [X, 2X], X = {X:g}: "
                     + ("n/a" if mean is None else fmt(mean)))
    out.record(result, human)
    return EXIT_OK


def _sign_row(job):
    from .lfun import real_sign_changes

    d, step = job
    return d, real_sign_changes(d, step)


def cmd_zero_density(args, out: Output) -> int:
    from .arith import sieve_squarefree

    if args.X > args.budget:
        raise BudgetExceeded(f"--X {args.X} exceeds --budget {args.budget}")
    sigmas = args.sigma
    if not sigmas or any(not 0.5 <= s <= 1 for s in sigmas):
        raise DomainError("sigma grid must be non-empty and inside [1/2, 1]")
    ds = sieve_squarefree(max(args.X, 1)).odd_squarefree_array(1, args.X)
    ds = _sample(ds, args.sample, args.seed)
    found = _map(_sign_row, [(int(d), args.grid_step) for d in ds], args.threads)
    rows = []
    for s in sigmas:
        count = sum(1 for _, br in found if any(hi >= s for _, hi in br))
        rows.append((s, count, 1 - (1 - args.eps) * (s - 0.5)))
    out.table(["sigma", "count", "bound_exponent"], rows)
    total = sum(1 for _, br in found if br)
    out.record({"checked": len(found), "with_sign_change": total,
                "counts": {fmt(s): c for s, c, _ in rows}},
               [f"{len(found)} discriminants checked, {total} with a sign change on [1/2, 1]"])
    return EXIT_OK


def cmd_scan(args, out: Output) -> int:
    from .special import QuadratureSpec
    from .theory import param_scan

    if not args.R or not args.b or not args.extra:
        raise DomainError("empty scan grid")
    tol = args.tol if args.tol is not None else 1e-10
    res = param_scan(args.R, args.b, args.extra, QuadratureSpec(abs_tol=tol, rel_tol=max(tol, 1e-14)),
                     rho=args.rho, threads=args.threads)
    rows = ((r.R, r.b, r.S, " ".join(fmt(c) for c in r.extra), " ".join(fmt(c) for c in r.P), r.c,
             r.pinned) for r in res.rows)
    out.table(["R", "b", "S", "extra", "P", "c", "pinned"], rows)
    best = res.rows[0]
    out.record({"best": {"R": best.R, "b": best.b, "extra": list(best.extra), "c": best.c},
                "rows": len(res.rows), "skipped": [list(s) for s in res.skipped]},
               [f"{len(res.rows)} rows; best c = {fmt(best.c)} at R = {best.R:g}, b = {best.b:g}"])
    return EXIT_OK


def cmd_selberg_demo(args, out: Output) -> int:
    from .selberg import selberg_lhs, selberg_rhs, synthetic_suite

    tol = args.tol if args.tol is not None else 1e-6
    rows, bad = [], 0
    for case in synthetic_suite():
        lhs = selberg_lhs(case.zeros, case.box)
        rhs = selberg_rhs(case.f, case.box).total
        err = abs(rhs - lhs)
        ok = err <= tol * (1 + abs(lhs))
        bad += not ok
        rows.append((case.f.name, lhs, rhs, err, ok))
    out.table(["function", "lhs", "rhs", "abs_error", "ok"], rows)
    out.record({"cases": len(rows), "failed": bad, "tol": tol},
               [f"{len(rows) - bad}/{len(rows)} synthetic functions satisfy the identity"])
    return EXIT_FAIL if bad else EXIT_OK


def cmd_afe_check(args, out: Output) -> int:
    from .lfun import afe_cases, afe_product, xi_value

    tol = args.tol if args.tol is not None else 1e-8
    rows, bad = [], 0
    for d, sh in afe_cases(args.cases, args.d_max, args.seed):
        a = afe_product(d, sh)
        x = xi_value(0.5 + sh.delta1, d) * xi_value(0.5 + sh.delta2, d)
        err = abs(a.value - x)
        ok = err <= tol * (1 + abs(x))
        bad += not ok
        rows.append((d, sh.delta1.real, sh.delta1.imag, sh.delta2.real, sh.delta2.imag,
                     a.value.real, a.value.imag, x.real, x.imag, err, ok))
    out.table(["d", "delta1_re", "delta1_im", "delta2_re", "delta2_im", "afe_re", "afe_im",
               "xixi_re", "xixi_im", "abs_error", "ok"], rows)
    out.record({"cases": len(rows), "failed": bad, "tol": tol},
               [f"{len(rows) - bad}/{len(rows)} cases satisfy the AFE identity"])
    return EXIT_FAIL if bad else EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="tolerance (command specific)")
    common.add_argument("--out", default=None, help="write the table (or JSON record) here")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common.add_argument("--seed", type=int, default=0, help="seed for --sample subsets")
    common.add_argument("--emit-json", action="store_true", help="emit a JSON record")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="nonvanishing",
                                 description="Real zeros of quadratic Dirichlet L-functions.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-chowla", parents=[common],
                       help="check L(sigma) > 0 on [0, 1] for odd square-free d")
    p.add_argument("--max", type=int, default=10_000)
    p.add_argument("--min", type=int, default=1)
    p.add_argument("--grid-step", type=float, default=1e-3)
    p.add_argument("--sample", type=int, default=None)
    p.add_argument("--budget", type=int, default=1_000_000)
    p.set_defaults(func=cmd_verify_chowla)

    p = sub.add_parser("reproduce-bound", parents=[common], help="J1, J2 and the constant c")
    p.add_argument("--R", type=float, default=6.8)
    p.add_argument("--b", type=float, default=0.64)
    p.add_argument("--S", type=float, default=None, help="default pi / (2 (1 - b))")
    p.add_argument("--rho", type=float, default=2.0)
    p.add_argument("--extra", type=_floats, default=[],
                   help="Hermite coefficients added to the cubic, comma separated")
    p.set_defaults(func=cmd_reproduce_bound)

    p = sub.add_parser("ks", parents=[common], help="low-lying zero density integral")
    p.add_argument("--S", type=float, default=math.pi / 0.72)
    p.add_argument("--empirical", type=float, default=None, metavar="X")
    p.add_argument("--sample", type=int, default=None)
    p.set_defaults(func=cmd_ks)

    p = sub.add_parser("zero-density", parents=[common], help="count real sign changes")
    p.add_argument("--X", type=int, default=10_000)
    p.add_argument("--sigma", type=_floats, default=[round(0.5 + 0.05 * k, 10) for k in range(11)])
    p.add_argument("--grid-step", type=float, default=1e-3)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--sample", type=int, default=None)
    p.add_argument("--budget", type=int, default=1_000_000)
    p.set_defaults(func=cmd_zero_density)

    p = sub.add_parser("scan", parents=[common], help="bound constant over a parameter grid")
    p.add_argument("--R", type=_floats, default=[6.3, 6.8, 7.3])
    p.add_argument("--b", type=_floats, default=[0.60, 0.64, 0.68])
    p.add_argument("--extra", type=_families, default=[()],
                   help="';'-separated Hermite coefficient lists; empty item = cubic")
    p.add_argument("--rho", type=float, default=2.0)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("selberg-demo", parents=[common], help="zero-count identity on test functions")
    p.set_defaults(func=cmd_selberg_demo)

    p = sub.add_parser("afe-check", parents=[common], help="approximate functional equation suite")
    p.add_argument("--cases", type=int, default=20)
    p.add_argument("--d-max", type=int, default=200)
    p.set_defaults(func=cmd_afe_check)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    out = Output(args)
    try:
        return args.func(args, out)
    except (DomainError, BudgetExceeded, argparse.ArgumentTypeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as e:
        print(f"error: {e} (estimate {e.estimate}, error {e.error})", file=sys.stderr)
        return EXIT_NONCONV
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        out.close()


if __name__ == "__main__":
    sys.exit(main())
