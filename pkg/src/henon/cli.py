"""Command-line front end.

    henon <command> [--config FILE] [--n N --a A --b B --nu NU --alpha AL --beta BE]
                    [--k-spec FILE] [--seed S] [--out PATH] [--format csv|json] [--jobs J]

Commands: bubble, sync, solve-ode, groundstate, spectrum, sweep, verify-all.
Flags override fields of the JSON config.  Exit status is 0 on success, 2
for invalid input and 3 for a numerical failure or a failed check.  The
log level comes from ``HENON_LOG`` (error, info or debug).
"""

from __future__ import annotations

import argparse
import itertools
import math
import logging
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import bubble as bb
from . import groundstate as gs
from . import radial_ode as ro
from . import spectrum as spc
from .coupling import solve_sync_2, solve_sync_k
from .errors import ConstraintViolation, HenonError, IoError, NumericalFailure, TailNotResolved
from .params import (ProblemParams, classify_regime, critical_exponent,
                     felli_schneider, load_json, spec_from_mapping, validate_params)
from .report import emit_report
from .verify import run_checks, spec_checks

log = logging.getLogger("henon")

PARAM_KEYS = ("n", "a", "b", "nu", "alpha", "beta")
EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


# ---------------------------------------------------------------------------
# Parameter values and grids


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` (inclusive), ``v1|v2|...`` or a single number."""
    text = str(text).strip()
    try:
        if ":" in text:
            start, stop, step = (float(s) for s in text.split(":"))
            if step == 0 or (stop - start) / step < 0:
                raise ConstraintViolation(f"range {text!r} is empty")
            count = int(np.floor((stop - start) / step + 1e-9)) + 1
            return [round(start + i * step, 12) for i in range(count)]
        return [float(s) for s in text.split("|")]
    except ValueError:
        raise ConstraintViolation(f"cannot read {text!r} as a number, range or list") from None


def _single(name: str, value) -> float:
    vals = parse_grid(value)
    if len(vals) != 1:
        raise ConstraintViolation(f"--{name} takes a single value for this command")
    return vals[0]


def complete_params(raw: dict) -> ProblemParams:
    """Fill defaults (``a = b = 0``, ``nu = 1``) and the missing exponent.

    Without ``alpha`` and ``beta`` both are ``p/2``; with one of them the
    other is ``p`` minus it.
    """
    if raw.get("n") is None:
        raise ConstraintViolation("the dimension n is required (--n or config key 'n')")
    try:
        n = float(raw["n"])
        n = int(n) if n.is_integer() else n
    except (TypeError, ValueError):
        raise ConstraintViolation(f"n = {raw['n']!r} is not a number") from None
    a = float(raw.get("a") if raw.get("a") is not None else 0.0)
    b = float(raw.get("b") if raw.get("b") is not None else 0.0)
    nu = float(raw.get("nu") if raw.get("nu") is not None else 1.0)
    al, be = raw.get("alpha"), raw.get("beta")
    if al is None or be is None:
        p = critical_exponent(n, a, b)
        if al is None and be is None:
            al = be = p / 2
        elif al is None:
            al = p - float(be)
        else:
            be = p - float(al)
    return validate_params(n, a, b, nu, al, be)


def _raw_params(args, config: dict) -> dict:
    raw = {k: config.get(k) for k in PARAM_KEYS}
    for k in PARAM_KEYS:
        v = getattr(args, k, None)
        if v is not None:
            raw[k] = v
    return raw


def resolve_params(args, config: dict) -> ProblemParams:
    raw = _raw_params(args, config)
    return complete_params({k: (None if v is None else _single(k, v) if isinstance(v, str) else v)
                            for k, v in raw.items()})


def resolve_spec(args, config: dict, params: ProblemParams):
    table = None
    if getattr(args, "k_spec", None):
        table = load_json(args.k_spec)
    elif isinstance(config.get("k_spec"), dict):
        table = config["k_spec"]
    return None if table is None else spec_from_mapping(params, table)


def _sweep_points(raw: dict) -> list[dict]:
    """Cartesian grid over the parameter values; ``alpha/p`` is kept fixed when ``p`` varies."""
    grids = {k: ([None] if raw.get(k) is None else
                 parse_grid(raw[k]) if isinstance(raw[k], str) else [float(raw[k])]) for k in PARAM_KEYS}
    grids["n"] = [None if v is None else int(v) for v in grids["n"]]
    return [dict(zip(PARAM_KEYS, combo)) for combo in itertools.product(*(grids[k] for k in PARAM_KEYS))]


def _scaled_exponents(point: dict, base: dict) -> dict:
    """Rescale given ``alpha``/``beta`` from the ``p`` of ``base`` (the first grid point) to this point's."""
    out = dict(point)
    if base.get("n") is None:
        return out
    try:
        p0 = critical_exponent(int(base["n"]), float(base.get("a") or 0.0), float(base.get("b") or 0.0))
        p = critical_exponent(int(point["n"]), float(point.get("a") or 0.0), float(point.get("b") or 0.0))
    except (HenonError, ValueError, ZeroDivisionError):
        return out
    for k in ("alpha", "beta"):
        if point.get(k) is not None:
            out[k] = point[k] * p / p0
    return out


# ---------------------------------------------------------------------------
# Commands


def cmd_bubble(args, config):
    P = resolve_params(args, config)
    bp = bb.BubbleParams(P, args.mu)
    prof = bb.bubble_profile(bp, args.t_min, args.t_max, args.points)
    r = np.exp(-prof.t_grid)
    doc = {"params": P.to_dict(), "mu": args.mu, "K": bb.bubble_constant(P),
           "exponents": dict(zip(("q", "m"), bb.bubble_exponents(P))),
           "residual": float(np.max(bb.bubble_residual(bp, r[(r > 1e-6) & (r < 1e6)]))),
           "regime": classify_regime(P).tag.value}
    if args.format == "csv":
        text = emit_report([prof], args.out, "csv", header=doc)
        if args.out is None:
            print(text, end="")
    else:
        _emit({**doc, "profile": {"t": prof.t_grid, "values": prof.values}}, args, summary=doc)
    return EXIT_OK


def cmd_sync(args, config):
    P = resolve_params(args, config)
    spec = resolve_spec(args, config, P)
    if spec is not None:
        roots = solve_sync_k(spec, starts=args.starts, seed=args.seed)
        doc = {"params": P.to_dict(), "k": spec.k, "roots": roots}
        if not roots:
            log.warning("no positive synchronisation vector found from %d starts", args.starts + 1)
    else:
        roots = solve_sync_2(P)
        doc = {"params": P.to_dict(), "k": 2, "roots": roots}
    _emit(doc, args)
    return EXIT_OK


def _default_init(P: ProblemParams, spec):
    K = bb.bubble_constant(P)
    if spec is not None:
        roots = solve_sync_k(spec)
        if not roots:
            raise ConstraintViolation("no synchronisation vector to launch from; pass --init")
        return roots[0].c * K
    return next(r.c for r in solve_sync_2(P) if r.kind == "positive") * K


def cmd_solve_ode(args, config):
    P = resolve_params(args, config)
    spec = resolve_spec(args, config, P)
    system = spec if spec is not None else P
    if args.init:
        init = [float(v) for v in args.init.split(",")]
    else:
        init = _default_init(P, spec)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ro.VanishedSolution)
        sol = ro.picard_solve(system, init, args.rmax, args.tol)
    prs = sol.profiles()
    doc = {"params": P.to_dict(), "init": list(np.atleast_1d(init)), "r_max": args.rmax,
           **sol.report(), "residual": ro.residual(system, prs)}
    try:
        # the tails are read out to rho = 1e12, where the next-order decay terms are negligible;
        # a run that stopped short is repeated with that reach (the far field makes this cheap)
        r_far = 1e12 ** (1 / P.sigma)
        long = sol
        if sol.far is None and not sol.vanished:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ro.VanishedSolution)
                long = ro.picard_solve(system, init, r_far, args.tol)
        if long.far is None:
            raise TailNotResolved("the solution has no resolved decay at infinity")
        doc["asymptotics"] = ro.asymptotics(long.profiles(t_min=-math.log(max(long.r_end, r_far))))
    except NumericalFailure as exc:
        doc["asymptotics"] = None
        doc["asymptotics_error"] = f"{type(exc).__name__}: {exc}"
    if args.format == "csv":
        emit_report(prs, args.out, "csv", header=doc)
        if args.out is None:
            print(emit_report(prs, None, "csv"), end="")
    else:
        _emit(doc, args)
    return EXIT_OK


def groundstate_row(point: dict) -> dict:
    """One sweep row; failures are recorded in ``error`` instead of raising."""
    row = {k: point.get(k) for k in ("a", "b", "nu")}
    try:
        P = complete_params(point)
        row.update(a=P.a, b=P.b, nu=P.nu)
        rep = gs.ground_state_report(P)
        row.update(case=rep.case_label.value, f_min=rep.f_min, S=rep.S, S_bar=rep.S_bar,
                   energy=rep.energy, error="")
    except HenonError as exc:
        row.update(case="", f_min=None, S=None, S_bar=None, energy=None,
                   error=f"{type(exc).__name__}: {exc}")
    return row


def _parse_sweep(text: str) -> dict:
    out = {}
    for part in text.split(","):
        if "=" not in part:
            raise ConstraintViolation(f"sweep entry {part!r} is not of the form key=values")
        key, val = part.split("=", 1)
        key = key.strip()
        if key not in PARAM_KEYS:
            raise ConstraintViolation(f"unknown sweep key {key!r}; use one of {', '.join(PARAM_KEYS)}")
        out[key] = val
    return out


def _map(fn, items, jobs: int):
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


def cmd_groundstate(args, config):
    if args.sweep:
        raw = _raw_params(args, config)
        raw.update(_parse_sweep(args.sweep))
        grid = _sweep_points(raw)
        points = [_scaled_exponents(pt, grid[0]) for pt in grid]
        rows = _map(groundstate_row, points, args.jobs)
        columns = ["a", "b", "nu", "case", "f_min", "S", "S_bar", "energy", "error"]
        text = emit_report(rows, args.out, "csv", columns=columns)
        if args.out is None:
            print(text, end="")
        return EXIT_OK
    P = resolve_params(args, config)
    rep = gs.ground_state_report(P)
    _emit({"params": P.to_dict(), **rep.to_dict()}, args)
    return EXIT_OK


def cmd_spectrum(args, config):
    P = resolve_params(args, config)
    res = spc.radial_eigen(P, args.modes, spc.GridSpec(args.grid))
    doc = {"params": P.to_dict(), **res.to_dict()}
    if args.format == "csv":
        rows = [{"t": float(t), **{f"psi_{j + 1}": float(v[i]) for j, v in enumerate(res.eigenvectors)}}
                for i, t in enumerate(res.t)]
        text = emit_report(rows, args.out, "csv", header=doc)
        if args.out is None:
            print(text, end="")
    else:
        _emit(doc, args)
    return EXIT_OK


def sync_row(point: dict) -> dict:
    row = {k: point.get(k) for k in ("a", "b", "nu", "alpha")}
    try:
        P = complete_params(point)
        roots = [r for r in solve_sync_2(P) if r.kind == "positive"]
        row.update(p=P.p, roots=len(roots), error="",
                   c=[r.c.tolist() for r in roots],
                   gaps=[spc.nondegeneracy_lhs(P, *r.c) - (P.p - 2) for r in roots])
    except HenonError as exc:
        row.update(p=None, roots=0, c=[], gaps=[], error=f"{type(exc).__name__}: {exc}")
    return row


def cmd_sweep(args, config):
    raw = _raw_params(args, config)
    if args.curve == "fs":
        if raw.get("n") is None:
            raw["n"] = 3
        n = int(_single("n", raw["n"]) if isinstance(raw["n"], str) else raw["n"])
        a_vals = parse_grid(raw["a"]) if raw.get("a") is not None else parse_grid("-2:0:0.05")
        rows = [{"a": a, "b_fs": felli_schneider(n, a)} for a in a_vals]
        columns = ["a", "b_fs"]
    else:
        grid = _sweep_points(raw)
        points = [_scaled_exponents(pt, grid[0]) for pt in grid]
        rows = _map(sync_row, points, args.jobs)
        columns = ["a", "b", "nu", "alpha", "p", "roots", "c", "gaps", "error"]
    fmt = args.format or "csv"
    text = emit_report(rows, args.out, fmt, columns=columns if fmt == "csv" else None)
    if args.out is None:
        print(text, end="")
    return EXIT_OK


def cmd_verify_all(args, config):
    P = resolve_params(args, config)
    spec = resolve_spec(args, config, P)
    checks = run_checks(P, seed=args.seed, n_trials=args.trials)
    if spec is not None:
        checks += spec_checks(spec, seed=args.seed)
    for c in checks:
        print(c.line())
    failed = [c for c in checks if c.passed is False]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks did not fail"
          + (f"; failed: {', '.join(c.name for c in failed)}" if failed else ""))
    if args.out:
        emit_report({"params": P.to_dict(), "checks": checks}, args.out, args.format)
    return EXIT_NUMERIC if failed else EXIT_OK


def _emit(doc, args, summary=None):
    text = emit_report(doc, args.out, "json")
    if args.out is None:
        print(text, end="")
    elif summary is not None:
        log.info("wrote %s", args.out)


COMMANDS = {"bubble": cmd_bubble, "sync": cmd_sync, "solve-ode": cmd_solve_ode,
            "groundstate": cmd_groundstate, "spectrum": cmd_spectrum, "sweep": cmd_sweep,
            "verify-all": cmd_verify_all}


# ---------------------------------------------------------------------------
# Argument parsing and error mapping


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with n, a, b, nu, alpha, beta (and optionally k_spec)")
    for k in PARAM_KEYS:
        common.add_argument(f"--{k}", default=None, metavar="VALUE")
    common.add_argument("--k-spec", dest="k_spec", help="JSON file with kappa, alpha_ij, beta_ij")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", default=None, help="output path (stdout when omitted)")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")

    parser = argparse.ArgumentParser(prog="henon", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bubble", parents=[common], help="closed-form bubble profile")
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--t-min", dest="t_min", type=float, default=None)
    p.add_argument("--t-max", dest="t_max", type=float, default=None)
    p.add_argument("--points", type=int, default=2001)

    p = sub.add_parser("sync", parents=[common], help="synchronisation constants")
    p.add_argument("--starts", type=int, default=32)

    p = sub.add_parser("solve-ode", parents=[common], help="radial solution from data at the origin")
    p.add_argument("--init", default=None, help="comma list of u_i(0); default c K from the first sync root")
    p.add_argument("--rmax", type=float, default=10.0)
    p.add_argument("--tol", type=float, default=1e-13)

    p = sub.add_parser("groundstate", parents=[common], help="minimiser of f, sharp constants, energy")
    p.add_argument("--sweep", default=None, help="e.g. a=0:1:0.25,b=0.5,nu=0.5|1")

    p = sub.add_parser("spectrum", parents=[common], help="radial linearisation at the bubble")
    p.add_argument("--modes", type=int, default=3)
    p.add_argument("--grid", type=int, default=3000)

    p = sub.add_parser("sweep", parents=[common], help="curves over parameter grids")
    p.add_argument("--curve", choices=("fs", "sync"), default="fs",
                   help="fs: (a, b_FS(a)); sync: positive roots and degeneracy gaps")

    p = sub.add_parser("verify-all", parents=[common], help="run every consistency check")
    p.add_argument("--trials", type=int, default=1000, help="random Rayleigh quotients")
    return parser


def _configure_logging():
    level = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}.get(
        os.environ.get("HENON_LOG", "").strip().lower(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def run(argv=None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        config = load_json(args.config) if args.config else {}
        if not isinstance(config, dict):
            raise ConstraintViolation(f"{args.config}: the config must be a JSON object")
        if args.seed is None:
            args.seed = int(config.get("seed", 0))
        if args.out is None and config.get("out"):
            args.out = config["out"]
        if args.format is None:
            args.format = config.get("format") or (
                "csv" if args.out and str(args.out).lower().endswith(".csv") else
                None if args.command == "sweep" else "json")
        return COMMANDS[args.command](args, config)
    except NumericalFailure as exc:
        print(f"henon: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (HenonError, IoError) as exc:
        print(f"henon: invalid input: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as exc:
        print(f"henon: invalid input: cannot open {exc.filename}", file=sys.stderr)
        return EXIT_INPUT


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
