"""Command-line interface.

Exit codes: 0 success (``analyze``: hypotheses verified), 1 numerical
failure, 2 unreadable or invalid input, 3 ``analyze`` with hypotheses unmet.
"""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from .analysis import EXIT_NUMERIC, EXIT_OK, EXIT_PARSE, analyze
from .blocks import block_lie_closure
from .errors import ConfigError, HorizonExhausted, LarcError
from .io import (SystemConfig, dumps, load_config, load_json, parse_schedule, parse_vectors,
                 schedule_to_json, system_to_config)
from .lie import larc_check
from .linop import (PROPAGATOR_ORDER, ControlSchedule, ControlSystem, commutator, commutator_product,
                    herm_exp, is_unitary, propagate, trotter_product)
from .models import (make_harmonic_oscillator, make_jaynes_cummings, make_thm2_model,
                     tridiagonal_coupling)
from .spectral import check_rational_independence
from .torus import (DEFAULT_MAX_CANDIDATES, NeighborhoodSpec, TorusElement, random_unit_vectors,
                    recurrence_time, solve_with_doubling, torus_approx)


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {exc}") from exc


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {exc}") from exc


def _tol_pair(text: str) -> tuple[str, str]:
    key, sep, val = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError("expected KEY=VAL")
    return key.strip(), val.strip()


def _common(p: argparse.ArgumentParser, config: bool = True) -> None:
    if config:
        p.add_argument("--config", required=True, help="system description (JSON)")
    p.add_argument("--out", help="write the JSON result here instead of stdout")
    p.add_argument("--trunc", type=_ints, help="truncations, e.g. 2,4,8")
    p.add_argument("--tol", type=_tol_pair, action="append", default=[], metavar="KEY=VAL",
                   help="tolerance override (repeatable)")
    p.add_argument("--seed", type=int, help="RNG seed (default: config seed, else 0)")
    p.add_argument("--csv", help="write a CSV convergence table here")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="larckit", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full hypothesis check, closure history and certificate")
    _common(p)
    p.add_argument("--no-certificate", action="store_true", help="skip bracket-word certificates")

    p = sub.add_parser("closure", help="Lie closure dimension per truncation")
    _common(p)

    p = sub.add_parser("kronecker", help="approximate a torus element by the drift flow")
    _common(p)
    p.add_argument("--target", type=_floats, required=True, help="phases lambda_k (mod 1)")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--delta", type=float, help="per-mode residual bound")
    g.add_argument("--eps", type=float, help="operator-norm bound on the first modes")
    p.add_argument("--modes", type=int, help="number of leading modes (default: all target phases)")
    p.add_argument("--horizon", type=float, help="initial search horizon")
    p.add_argument("--max-candidates", type=int, default=DEFAULT_MAX_CANDIDATES)

    p = sub.add_parser("recurrence", help="return time of the drift flow into a strong neighbourhood")
    _common(p)
    p.add_argument("--t-minus", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--n-vectors", type=int, default=3, help="random unit test vectors")
    p.add_argument("--vectors", help="JSON list of test vectors (overrides --n-vectors)")
    p.add_argument("--horizon", type=float)
    p.add_argument("--max-candidates", type=int, default=DEFAULT_MAX_CANDIDATES)

    p = sub.add_parser("blocks", help="block decomposition and per-block closure")
    _common(p)
    p.add_argument("--generators", type=_ints, help="indices into H0,H1,... (default 0,1)")

    p = sub.add_parser("simulate", help="propagator of a piecewise-constant schedule")
    _common(p)
    p.add_argument("--schedule", help="JSON schedule; omitted means the empty schedule")
    p.add_argument("--vectors", help="JSON list of initial vectors")
    p.add_argument("--max-power", type=int, default=10,
                   help="product-formula curve for n = 2^0..2^k (with --csv)")

    p = sub.add_parser("model", help="write a built-in model as a system description")
    _common(p, config=False)
    p.add_argument("kind", choices=["thm2", "jc", "ho"])
    p.add_argument("--n", type=int, default=4, help="thm2: dimension")
    p.add_argument("--spectrum", type=_floats, help="thm2: eigenvalues instead of sqrt(primes)")
    p.add_argument("--cutoff", type=int, default=6, help="jc/ho: photon cutoff")
    p.add_argument("--omega", type=_floats, default=[1.0, 0.7, 0.3], help="jc: omega_A,omega_C,omega_I")
    return ap


def _overrides(args) -> dict:
    return dict(args.tol)


def _load(args) -> SystemConfig:
    cfg = load_config(args.config, _overrides(args))
    if args.trunc:
        if not all(1 <= n <= cfg.system.dim for n in args.trunc):
            raise ConfigError(f"--trunc values must lie in 1..{cfg.system.dim}")
        cfg.truncations = list(args.trunc)
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def _emit(args, payload) -> None:
    text = dumps(payload)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([format(v, ".17g") if isinstance(v, float) else v for v in r])


def cmd_analyze(args) -> int:
    cfg = _load(args)
    result = analyze(cfg, with_certificate=not args.no_certificate)
    if args.csv:
        _write_csv(args.csv, ["n", "closure_dim", "ambient_dim", "verdict"],
                   [(h["n"], h["closure_dim"], h["ambient_dim"], h["verdict"])
                    for h in result.report["larc"]["history"]])
    _emit(args, result.report)
    return result.exit_code


def cmd_closure(args) -> int:
    cfg = _load(args)
    tol = cfg.tolerances
    rep = larc_check(cfg.system, cfg.truncations or [cfg.system.dim], tol.rank, tol.max_passes)
    if args.csv:
        _write_csv(args.csv, ["n", "closure_dim", "ambient_dim", "verdict"],
                   [(h["n"], h["closure_dim"], h["ambient_dim"], h["verdict"]) for h in rep.history])
    _emit(args, {"larc": rep.to_json(), "rank_tol": tol.rank, "max_passes": tol.max_passes})
    return EXIT_OK


def cmd_kronecker(args) -> int:
    cfg = _load(args)
    spec = cfg.system.drift
    n = args.modes or len(args.target)
    if not 1 <= n <= spec.n_levels or len(args.target) < n:
        raise ConfigError(f"need 1 <= modes <= {spec.n_levels} and at least that many target phases")
    out = {"xhat": [float(v) for v in spec.xhat[:n]], "target": args.target[:n],
           "independence": check_rational_independence(spec.levels(range(n)), cfg.tolerances.coeff_bound,
                                                       cfg.tolerances.independence).to_json()}
    try:
        if args.delta is not None:
            cert = solve_with_doubling(spec.xhat[:n], args.target[:n], args.delta,
                                       horizon=args.horizon, max_candidates=args.max_candidates)
            out["certificate"] = cert.to_json()
        else:
            phases = list(args.target[:n]) + [0.0] * (spec.n_levels - n)
            res = torus_approx(spec, TorusElement(phases), args.eps, n, horizon=args.horizon,
                               max_candidates=args.max_candidates, check_independence=False)
            out.update(eps=args.eps, achieved=res.achieved, certificate=res.certificate.to_json())
    except HorizonExhausted as exc:
        out["error"] = str(exc)
        out["best"] = exc.best.to_json() if exc.best is not None else None
        _emit(args, out)
        return EXIT_NUMERIC
    _emit(args, out)
    return EXIT_OK


def cmd_recurrence(args) -> int:
    cfg = _load(args)
    spec = cfg.system.drift
    rng = np.random.default_rng(cfg.seed)
    if args.vectors:
        vecs = parse_vectors(load_json(args.vectors), spec.dim)
        vecs = [v / np.linalg.norm(v) for v in vecs]
    else:
        vecs = random_unit_vectors(spec.dim, args.n_vectors, rng)
    nbhd = NeighborhoodSpec(spec.evolution(args.t_minus), vecs, args.eps)
    out = {"t_minus": args.t_minus, "eps": args.eps, "seed": cfg.seed, "n_vectors": len(vecs)}
    try:
        rec = recurrence_time(spec, args.t_minus, nbhd, horizon=args.horizon,
                              max_candidates=args.max_candidates)
    except HorizonExhausted as exc:
        out["error"] = str(exc)
        out["best"] = exc.best.to_json() if exc.best is not None else None
        _emit(args, out)
        return EXIT_NUMERIC
    out.update(t_plus=rec.t_plus, achieved=rec.achieved, n_modes=rec.n_modes,
               certificate=rec.certificate.to_json())
    _emit(args, out)
    return EXIT_OK


def cmd_blocks(args) -> int:
    cfg = _load(args)
    gens = args.generators or ([0, 1] if cfg.system.n_controls >= 1 else [0])
    if not all(0 <= g <= cfg.system.n_controls for g in gens):
        raise ConfigError(f"generator indices must lie in 0..{cfg.system.n_controls}")
    rep = block_lie_closure(cfg.system, gens, seed=cfg.seed, rank_tol=cfg.tolerances.rank,
                            max_passes=cfg.tolerances.max_passes)
    out = rep.to_json()
    out["block_dims"] = list(rep.decomposition.block_dims)
    out["note"] = ("closure_dim: closure compressed to the block; derived_dim: its commutator "
                   "ideal (su part); local_dim: elements supported on the block alone")
    _emit(args, out)
    return EXIT_OK


def product_formula_curve(a: np.ndarray, b: np.ndarray, max_power: int) -> list[tuple[int, float, float]]:
    """Errors of the Trotter and commutator formulas for ``n = 2^k``."""
    exact_sum = herm_exp(a + b)
    ia, ib = 1j * a, 1j * b
    exact_comm = herm_exp(-1j * commutator(ia, ib))
    rows = []
    for k in range(max_power + 1):
        n = 2 ** k
        t_err = float(np.linalg.norm(trotter_product(a, b, n) - exact_sum, 2))
        c_err = float(np.linalg.norm(commutator_product(ia, ib, n) - exact_comm, 2))
        rows.append((n, t_err, c_err))
    return rows


def cmd_simulate(args) -> int:
    cfg = _load(args)
    system = cfg.system
    sched = parse_schedule(load_json(args.schedule)) if args.schedule else ControlSchedule()
    u = propagate(system, sched)
    out = {"propagator_order": PROPAGATOR_ORDER, "schedule": schedule_to_json(sched),
           "total_time": sched.total_time, "unitary": is_unitary(u, 1e-9),
           "propagator": [[[z.real, z.imag] for z in row] for row in u]}
    if args.vectors:
        vecs = parse_vectors(load_json(args.vectors), system.dim)
        out["states"] = [{"initial": [[z.real, z.imag] for z in v],
                          "final": [[z.real, z.imag] for z in u @ v]} for v in vecs]
    if args.csv:
        if system.n_controls < 1:
            raise ConfigError("product-formula curves need at least one control")
        rows = product_formula_curve(system.drift_matrix(), system.controls[0], args.max_power)
        _write_csv(args.csv, ["n", "trotter_error", "commutator_error"], rows)
    _emit(args, out)
    return EXIT_OK


def cmd_model(args) -> int:
    seed = args.seed or 0
    if args.kind == "thm2":
        system = make_thm2_model(args.n, args.spectrum if args.spectrum else "sqrt_primes")
    elif args.kind == "jc":
        if len(args.omega) != 3:
            raise ConfigError("--omega needs three values")
        system = make_jaynes_cummings(*args.omega, args.cutoff)
    else:
        drift = make_harmonic_oscillator(args.cutoff)
        system = ControlSystem(drift, (tridiagonal_coupling(drift.dim),))
    _emit(args, system_to_config(system, truncations=args.trunc, seed=seed))
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "closure": cmd_closure, "kronecker": cmd_kronecker,
            "recurrence": cmd_recurrence, "blocks": cmd_blocks, "simulate": cmd_simulate,
            "model": cmd_model}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"larckit: invalid input: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (LarcError, ArithmeticError, np.linalg.LinAlgError, ValueError) as exc:
        print(f"larckit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
