"""Command-line driver.

Subcommands: run, converge, twin, fuzz, sweep. Every subcommand takes a
config file; outputs land in --out (default ./out), overridden by the
VISCO2D_OUT environment variable when set. Exit codes: 0 success,
1 validation or usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

from . import io
from .config import ConfigError, ValidatedConfig, load_config
from .diagnostics import eps_energy_audit
from .dynamics import regularize_initial_B
from .fields import State
from .harness import (
    default_case,
    epsilon_sweep,
    equilibrium_state,
    positivity_fuzz,
    random_state,
    spatial_convergence,
    taylor_green_state,
    temporal_convergence,
    twin_run,
)
from .io import CorruptSnapshotError, DiagnosticsWriter
from .spectral import SpectralGrid
from .timeloop import NonFiniteError, StepperOptions, integrate


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--quiet", action="store_true", help="suppress progress output")

    parser = _Parser(prog="visco2d", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", parents=[common], help="integrate one configuration")
    p_run.add_argument("config")
    p_run.add_argument("--ic", choices=("taylor_green", "random", "equilibrium"),
                       default="taylor_green", help="initial condition family")
    p_run.add_argument("--restore", default=None, metavar="SNAPSHOT",
                       help="resume from a checkpoint instead of --ic")

    p_conv = sub.add_parser("converge", parents=[common],
                            help="spatial and temporal convergence studies")
    p_conv.add_argument("config")

    p_twin = sub.add_parser("twin", parents=[common], help="twin-run stability experiment")
    p_twin.add_argument("config")
    p_twin.add_argument("--amp", type=float, default=1e-6, help="perturbation amplitude")

    p_fuzz = sub.add_parser("fuzz", parents=[common], help="eigenvalue-positivity fuzzing")
    p_fuzz.add_argument("config")
    p_fuzz.add_argument("--cases", type=int, default=20, help="number of seeded cases")

    p_sweep = sub.add_parser("sweep", parents=[common], help="cutoff-regularization sweep")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--eps", default="1e-2,1e-3,1e-4",
                         help="comma-separated cutoff ladder")
    return parser


def _out_dir(args) -> Path:
    out = os.environ.get("VISCO2D_OUT") or args.out
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _say(args, message: str) -> None:
    if not args.quiet:
        print(message)


def _initial_state(cfg: ValidatedConfig, ic: str, grid: SpectralGrid) -> State:
    if ic == "taylor_green":
        state = taylor_green_state(grid)
    elif ic == "random":
        state = random_state(grid, cfg.run.seed)
    else:
        state = equilibrium_state(grid)
    if cfg.params.epsilon > 0.0:
        state = State(t=state.t, v=state.v,
                      B=regularize_initial_B(state.B, cfg.params.epsilon))
    return state


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    out = _out_dir(args)
    grid = SpectralGrid(cfg.run.grid_size)
    if args.restore:
        state = io.restore(args.restore, grid)
    else:
        state = _initial_state(cfg, args.ic, grid)
    options = StepperOptions(dt=cfg.run.dt, cfl=cfg.run.cfl)

    io.write_snapshot(state, out / "snapshot_initial.v2ds")
    t0 = time.perf_counter()
    with DiagnosticsWriter(out / "diagnostics.csv") as writer:
        result = integrate(
            state, None, cfg.run.t_end, options, cfg.params, sinks=(writer,),
            output_every=cfg.run.output_every, dealias=cfg.run.dealias,
            galerkin_k=cfg.run.galerkin_k,
        )
    io.write_snapshot(result.state, out / "snapshot_final.v2ds")
    io.checkpoint(result.state, out / "checkpoint.v2ds")
    elapsed = time.perf_counter() - t0
    _say(args, f"{result.steps} steps to t = {result.state.t:.6g} "
               f"in {elapsed:.2f} s; wrote {out}/diagnostics.csv")
    if cfg.params.epsilon > 0.0 and len(result.records) > 1:
        _, rel = eps_energy_audit(result.records, cfg.params)
        _say(args, f"regularized energy audit: max relative gap {max(abs(rel)):.3e}")
    return 0


def _write_convergence_csv(path: Path, reports) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("case,N,dt,eps,error_l2_v,error_l2_B,order,pass\n")
        for report in reports:
            for row in report.rows:
                fh.write(
                    f"{row.case}-{report.kind},{row.N},{io.format_float(row.dt)},"
                    f"{io.format_float(row.eps)},{io.format_float(row.error_l2_v)},"
                    f"{io.format_float(row.error_l2_B)},{io.format_float(row.order)},"
                    f"{'true' if row.passed else 'false'}\n"
                )


def _cmd_converge(args) -> int:
    cfg = load_config(args.config)
    out = _out_dir(args)
    case = default_case(cfg.params)
    spatial = spatial_convergence(case)
    euler = temporal_convergence(case, scheme="imex_euler")
    midpoint = temporal_convergence(case, scheme="imex_midpoint")
    _write_convergence_csv(out / "convergence.csv", (spatial, euler, midpoint))
    ok = all(r.passed for rep in (spatial, euler, midpoint) for r in rep.rows)
    for rep in (spatial, euler, midpoint):
        for row in rep.rows:
            _say(args, f"{rep.kind:9s} N={row.N:3d} dt={row.dt:g} "
                       f"err_v={row.error_l2_v:.3e} err_B={row.error_l2_B:.3e} "
                       f"order={row.order:.3f} pass={row.passed}")
    _say(args, f"wrote {out}/convergence.csv")
    return 0 if ok else 2


def _cmd_twin(args) -> int:
    cfg = load_config(args.config)
    out = _out_dir(args)
    result = twin_run(cfg.params, cfg.run, args.amp)
    with open(out / "separation.csv", "w", encoding="utf-8") as fh:
        fh.write("t,separation,envelope,g_twin\n")
        for k in range(len(result.t)):
            fh.write(",".join(io.format_float(v) for v in (
                result.t[k], result.separation[k], result.envelope[k],
                result.g_twin[k])) + "\n")
    _say(args, f"C_fit = {result.c_fit:.4g}; envelope holds at "
               f"{100 * result.hold_fraction:.1f}% of output times")
    _say(args, f"wrote {out}/separation.csv")
    return 0 if result.hold_fraction >= 0.95 else 2


def _cmd_fuzz(args) -> int:
    cfg = load_config(args.config)
    out = _out_dir(args)
    report = positivity_fuzz(args.cases, cfg.params, N=cfg.run.grid_size,
                             cfl=cfg.run.cfl)
    with open(out / "fuzz.csv", "w", encoding="utf-8") as fh:
        fh.write("seed,min_lambda,retried,pass\n")
        for c in report.cases:
            fh.write(f"{c.seed},{io.format_float(c.min_lambda)},"
                     f"{'true' if c.retried else 'false'},"
                     f"{'true' if c.passed else 'false'}\n")
    _say(args, f"positivity floor over {args.cases} cases: {report.floor:.6f} "
               f"({'PASS' if report.passed else 'FAIL'})")
    _say(args, f"wrote {out}/fuzz.csv")
    return 0 if report.passed else 2


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    out = _out_dir(args)
    try:
        eps_values = [float(v) for v in args.eps.split(",") if v.strip()]
    except ValueError:
        raise _UsageError(f"--eps expects comma-separated floats, got {args.eps!r}") from None
    result = epsilon_sweep(cfg.params, cfg.run, eps_values)
    with open(out / "sweep.csv", "w", encoding="utf-8") as fh:
        fh.write("eps,distance,flagged\n")
        for row in result.rows:
            fh.write(f"{io.format_float(row.eps)},{io.format_float(row.distance)},"
                     f"{'true' if row.flagged else 'false'}\n")
    for row in result.rows:
        _say(args, f"eps={row.eps:g} distance={row.distance:.6e}"
                   + (" [degenerate]" if row.flagged else ""))
    _say(args, f"wrote {out}/sweep.csv")
    ordered = all(a.distance > b.distance for a, b in zip(result.rows, result.rows[1:])
                  if not (a.flagged or b.flagged))
    return 0 if ordered else 2


_COMMANDS = {
    "run": _cmd_run,
    "converge": _cmd_converge,
    "twin": _cmd_twin,
    "fuzz": _cmd_fuzz,
    "sweep": _cmd_sweep,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NonFiniteError, CorruptSnapshotError, RuntimeError) as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
