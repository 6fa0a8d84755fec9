"""Command-line entry point: ``ffql <subcommand> [options]``.

Exit status is 0 on success, 1 when a checked inequality or identity fails,
and 2 on a configuration error (bad q, unparsable polynomial, missing file).
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

from ffql import batch, reports
from ffql import momentslab as ml
from ffql import mollifier as mol
from ffql import verify
from ffql.algebra.family import FamilySpec, mertens_sums, prime_count
from ffql.algebra.field import check_q
from ffql.algebra.poly import Polynomial
from ffql.cache import fill_cache, resolve_cache_dir
from ffql.errors import ConfigError, DegenerateSchedule, DomainError, FFQLError
from ffql.lfunc import central_value, l_coefficients, perron_check, zeros

log = logging.getLogger("ffql")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
_TABLE_COMMANDS = {"enumerate", "moments", "twisted", "theta-profile", "mertens"}


class CheckFailed(Exception):
    """A verification ran to completion and found a violation."""


# -- helpers ------------------------------------------------------------------


def _q(args) -> int:
    try:
        return check_q(args.q, args.experimental)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


def _spec(kind: str, args, g: int) -> FamilySpec:
    _q(args)
    return FamilySpec.of_genus(kind, args.q, g, args.experimental)


def _poly(text: str, q: int, what: str) -> Polynomial:
    try:
        return Polynomial.parse(text, q)
    except (ValueError, FFQLError) as exc:
        raise ConfigError(f"cannot parse {what} {text!r}: {exc}") from exc


def _families(choice: str) -> list[str]:
    return ["H", "P"] if choice == "both" else [choice]


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_rows(args, rows, columns=None, payload=None) -> None:
    if args.format == "json":
        _emit(args, reports.to_json(payload if payload is not None else rows))
    else:
        _emit(args, reports.to_csv(rows, columns))


def _schedule(args, q: int, g: int) -> mol.MollifierSchedule:
    if getattr(args, "schedule", None):
        try:
            s = mol.MollifierSchedule.from_json(Path(args.schedule).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read schedule file {args.schedule}: {exc}") from exc
        if s.q is None:
            s = mol.schedule(q=q, g=g, M=s.M, mode="desk", alphas=s.alphas, cap=s.cap)
        return s
    if getattr(args, "alphas", None):
        return mol.schedule(q=q, g=g, mode="desk", alphas=args.alphas, cap=args.cap)
    if getattr(args, "mode", "desk") == "asymptotic":
        return mol.schedule(q=q, g=g, M=args.M, mode="asymptotic", cap=args.cap)
    return mol.desk_schedule(q, g, cap=args.cap)


# -- subcommands --------------------------------------------------------------------


def cmd_lvalue(args) -> None:
    q = _q(args)
    D = _poly(args.d, q, "modulus")
    L = l_coefficients(D)
    out = {"modulus": D.to_text(), "q": q, "coefficients": list(L.coefficients)}
    if L.g is not None:
        cv = central_value(L)
        out["central_value"] = cv.as_dict()
        out["central_value_nonnegative"] = cv.is_nonnegative()
        out["reflection"] = L.reflection_holds()
        out["zeros"] = [{"re": z.root.real, "im": z.root.imag, "rh_residual": z.rh_residual} for z in zeros(L)]
    _emit(args, reports.to_json(out))


def cmd_enumerate(args) -> None:
    _q(args)
    spec = FamilySpec(args.family, args.q, args.n, args.experimental)
    if args.count:
        _emit(args, reports.to_json({"family": spec.label(), "count": spec.size()}))
        return
    members = [f.to_text() for f in batch.rows_to_polys(batch.family_array(spec, args.cache_dir), args.q)]
    if args.format == "json":
        _emit(args, reports.to_json(members))
    else:
        _emit(args, reports.to_csv([{"member": m} for m in members], ("member",)))


def cmd_moments(args) -> None:
    rows = []
    for kind in _families(args.family):
        for g in args.g:
            spec = _spec(kind, args, g)
            for k in args.k:
                rows.append(ml.moment(spec, k, args.workers, args.cache_dir).row())
    _emit_rows(args, rows, reports.MOMENT_COLUMNS)


def cmd_twisted(args) -> None:
    q = _q(args)
    rows, full = [], []
    for kind in _families(args.family):
        if args.order == "second" and kind == "H":
            raise ConfigError("twisted second moment has a main term only over the P family")
        for g in args.g:
            _spec(kind, args, g)
            for text in args.l:
                l = _poly(text, q, "twist")
                if args.order == "first" and kind == "P":
                    r = ml.twisted_first_moment_P(q, g, l, args.workers, args.cache_dir)
                elif args.order == "first":
                    r = ml.twisted_first_moment_H(q, g, l, args.C1, None, args.workers, args.cache_dir)
                else:
                    r = ml.twisted_second_moment_P(q, g, l, args.workers, args.cache_dir)
                rows.append(r.row())
                full.append(r.as_dict())
    _emit_rows(args, rows, reports.MOMENT_COLUMNS, full)


def cmd_verify(args) -> None:
    q = _q(args)
    results = []
    gs = args.g or [1]
    if args.rh:
        results += [verify.check_rh(_spec("H", args, g), args.workers, args.cache_dir) for g in gs]
    if args.nonneg:
        results += [verify.check_nonneg(_spec("H", args, g), args.workers, args.cache_dir) for g in gs]
    if args.oracle:
        results += [verify.check_oracle(_spec("H", args, g), args.samples, args.seed, args.cache_dir) for g in gs]
    if args.afe:
        results += [verify.check_afe(_spec("H", args, g), args.samples or 20, seed=args.seed,
                                     workers=args.workers, cache_dir=args.cache_dir) for g in gs]
    if args.reciprocity:
        results.append(verify.check_reciprocity(q, seed=args.seed))
    if not results:
        raise ConfigError("verify needs at least one of --rh --afe --oracle --reciprocity --nonneg")
    _emit(args, reports.to_json(results))
    bad = [r["check"] + " " + r.get("family", f"q={q}") for r in results if not r["ok"]]
    if bad:
        raise CheckFailed("failed: " + "; ".join(bad))


def cmd_theta(args) -> None:
    q = _q(args)
    if args.thetas:
        grid = args.thetas
    else:
        grid = [2 * math.pi * i / args.grid for i in range(args.grid)]
    bad = [t for t in grid if not 0 <= t < 2 * math.pi]
    if bad:
        raise ConfigError(f"theta values must lie in [0, 2pi): {bad}")
    out = []
    for g in args.g:
        _spec("P", args, g)
        out.append(ml.second_moment_theta(q, g, grid, args.eps, args.workers, args.cache_dir).as_dict())
    if args.format == "json":
        _emit(args, reports.to_json(out))
    else:
        rows = [dict(r, q=p["q"], g=p["g"]) for p in out for r in p["rows"]]
        _emit(args, reports.to_csv(rows, ("q", "g", "theta", "theta_bar_2theta", "empirical", "bound", "ratio")))


def cmd_mollifier(args) -> None:
    q = _q(args)
    g = args.g
    if args.action == "schedule":
        s = _schedule(args, q, g)
        _emit(args, reports.to_json(s.describe()))
        return
    kinds = _families(args.family)
    s = _schedule(args, q, g)
    if args.action == "classify":
        out = []
        for kind in kinds:
            spec = _spec(kind, args, g)
            fd = ml.family_data(spec, args.workers, args.cache_dir)
            cls = mol.family_classify(mol.family_degree_sums(fd.F, q, s.degrees()), s, len(fd.F))
            counts = {j: int((cls == j).sum()) for j in range(s.J + 1)}
            out.append({"family": spec.label(), "members": len(cls), "classes": counts,
                        "partition": sum(counts.values()) == len(cls)})
        _emit(args, reports.to_json({"schedule": s.describe(), "results": out}))
        if not all(r["partition"] for r in out):
            raise CheckFailed("classification is not a partition")
    elif args.action == "holder":
        out = []
        for kind in kinds:
            r = mol.holder_check(_spec(kind, args, g), args.two_k / 2, s, args.c, args.workers, args.cache_dir)
            out.append(dict(r.as_dict(), family=kind))
        _emit(args, reports.to_json(out))
        failed = [r["family"] for r in out if not r["holds"]]
        if failed:
            raise CheckFailed(f"Hölder bound violated on family {', '.join(failed)}")
    else:
        if args.two_k == 1:
            raise ConfigError("mollified sums need 2k != 1")
        out = [dict(ml.mollified_sums(_spec(kind, args, g), args.two_k / 2, s, args.workers,
                                      args.cache_dir).as_dict(), family=kind) for kind in kinds]
        _emit(args, reports.to_json(out))


def cmd_mertens(args) -> None:
    q = _q(args)
    rows = []
    for m in range(1, args.m + 1):
        s_log, s_recip = mertens_sums(q, q**m)
        rows.append({"q": q, "m": m, "prime_count": prime_count(q, m), "sum_log_over_norm": s_log,
                     "sum_recip": s_recip, "log_x": m * math.log(q)})
    _emit_rows(args, rows)


_SERIES = {
    "ones": lambda q: (lambda n: 1.0),
    "monic": lambda q: (lambda n: float(q) ** n),
    "primes": lambda q: (lambda n: float(prime_count(q, n)) if n >= 1 else 0.0),
}


def cmd_perron(args) -> None:
    q = _q(args)
    a = _SERIES[args.series](q)
    try:
        direct, contour = perron_check(a, args.N, args.r, args.nodes)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    diff = abs(direct - contour)
    ok = diff <= args.tol * (1 + abs(direct))
    _emit(args, reports.to_json({"series": args.series, "q": q, "N": args.N, "r": args.r,
                                 "direct": direct, "contour": contour, "abs_diff": diff, "ok": ok}))
    if not ok:
        raise CheckFailed(f"contour and direct partial sums differ by {diff:g}")


def cmd_cache(args) -> None:
    q = _q(args)
    if args.cache_dir is None:
        raise ConfigError("cache needs --cache-dir or FFQL_CACHE_DIR")
    paths = fill_cache(q, args.n_max, args.cache_dir)
    _emit(args, reports.to_json([str(p) for p in paths]))


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=int, default=5, help="field size, a prime (default 5)")
    common.add_argument("--experimental", action="store_true", help="allow q = 3 mod 4")
    common.add_argument("--workers", type=int, default=1, help="worker processes for family sweeps")
    common.add_argument("--cache-dir", default=None, help="prime cache directory (overrides FFQL_CACHE_DIR)")
    common.add_argument("--format", choices=("csv", "json"), default=None,
                        help="report format (default csv for tables, json otherwise)")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="ffql", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("lvalue", parents=[common], help="L-polynomial, zeros and central value of one modulus")
    s.add_argument("--d", required=True, help='modulus, e.g. "0,1,0,1" or "T^3+T"')
    s.set_defaults(func=cmd_lvalue)

    s = sub.add_parser("enumerate", parents=[common], help="list a family in canonical order")
    s.add_argument("--family", choices=("H", "P", "M"), default="H")
    s.add_argument("--n", type=int, required=True, help="degree")
    s.add_argument("--count", action="store_true", help="only print the family size")
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("moments", parents=[common], help="sum of |L(1/2)|^k over a family")
    s.add_argument("--family", choices=("H", "P", "both"), default="H")
    s.add_argument("--g", type=int, nargs="+", required=True)
    s.add_argument("--k", type=float, nargs="+", required=True)
    s.set_defaults(func=cmd_moments)

    s = sub.add_parser("twisted", parents=[common], help="twisted first or second moment")
    s.add_argument("--order", choices=("first", "second"), default="first")
    s.add_argument("--family", choices=("H", "P", "both"), default="P")
    s.add_argument("--g", type=int, nargs="+", required=True)
    s.add_argument("--l", nargs="+", default=["1"], help="twists (polynomial text)")
    s.add_argument("--C1", type=float, default=0.0, help="constant in the H-family main term")
    s.set_defaults(func=cmd_twisted)

    s = sub.add_parser("verify", parents=[common], help="family-wide identity checks")
    for flag in ("rh", "afe", "oracle", "reciprocity", "nonneg"):
        s.add_argument(f"--{flag}", action="store_true")
    s.add_argument("--g", type=int, nargs="+")
    s.add_argument("--samples", type=int, default=None, help="sample this many moduli (oracle, afe)")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("theta-profile", parents=[common], help="sum |L(e^{i theta}/sqrt q)|^2 over primes")
    s.add_argument("--g", type=int, nargs="+", required=True)
    s.add_argument("--thetas", type=float, nargs="+")
    s.add_argument("--grid", type=int, default=16, help="uniform grid size when --thetas is absent")
    s.add_argument("--eps", type=float, default=0.1)
    s.set_defaults(func=cmd_theta)

    s = sub.add_parser("mollifier", parents=[common], help="mollifier schedules and checks")
    s.add_argument("action", choices=("schedule", "classify", "holder", "mollified-sums"))
    s.add_argument("--g", type=int, default=1)
    s.add_argument("--family", choices=("H", "P", "both"), default="both")
    s.add_argument("--mode", choices=("asymptotic", "desk"), default="desk")
    s.add_argument("--M", type=int, default=None)
    s.add_argument("--alphas", type=float, nargs="+")
    s.add_argument("--schedule", help="JSON schedule file {q, g, M, mode, alphas}")
    s.add_argument("--cap", type=int, default=mol.DEFAULT_CAP)
    s.add_argument("--two-k", type=float, default=1.5, help="the exponent 2k")
    s.add_argument("--c", type=float, default=None, help="Hölder parameter when 2k < 1")
    s.set_defaults(func=cmd_mollifier)

    s = sub.add_parser("mertens", parents=[common], help="exact Mertens-type prime sums")
    s.add_argument("--m", type=int, default=6, help="largest degree")
    s.set_defaults(func=cmd_mertens)

    s = sub.add_parser("perron", parents=[common], help="partial sums directly and by contour integral")
    s.add_argument("--series", choices=sorted(_SERIES), default="primes")
    s.add_argument("--N", type=int, default=5)
    s.add_argument("--r", type=float, default=None, help="contour radius (default 1/(2q))")
    s.add_argument("--nodes", type=int, default=512)
    s.add_argument("--tol", type=float, default=1e-8)
    s.set_defaults(func=cmd_perron)

    s = sub.add_parser("cache", parents=[common], help="fill the prime cache")
    s.add_argument("--n-max", type=int, default=7)
    s.set_defaults(func=cmd_cache)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    args.cache_dir = resolve_cache_dir(args.cache_dir)
    if getattr(args, "r", 0) is None:
        args.r = 1 / (2 * args.q)
    if args.format is None:
        args.format = "csv" if args.command in _TABLE_COMMANDS else "json"
    try:
        args.func(args)
    except CheckFailed as exc:
        print(f"ffql: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (ConfigError, DomainError, DegenerateSchedule) as exc:
        print(f"ffql: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
