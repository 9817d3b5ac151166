"""Command-line front end.

Subcommands:

* ``stagdg case <name> [key=value ...]``  -- run a preconfigured benchmark
  and write its diagnostics (tables, probe series, final field snapshot).
* ``stagdg converge [key=value ...]``     -- vortex accuracy study over a
  mesh sequence, emitting the error/order table.
* ``stagdg solve --config FILE``          -- run a case described by a flat
  key=value configuration file.

Config files are plain text, one ``key = value`` pair per line; ``#``
comments allowed.  Command-line ``key=value`` arguments override file
entries.  Every emitted table carries a provenance header with the config
hash and solver tolerances.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .cases import CASE_NAMES, RUNNERS, run_vortex_convergence
from .io import config_hash, write_csv, write_vtk

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RUNTIME = 1


def parse_config_text(text: str) -> dict:
    """Flat key=value lines -> dict of strings (comments/blank lines skipped)."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, val = line.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def _coerce(val: str):
    for cast in (int, float):
        try:
            return cast(val)
        except ValueError:
            pass
    low = val.lower()
    if low in ("true", "false"):
        return low == "true"
    return val


def _case_kwargs(case: str, overrides: dict) -> dict:
    """Keep only overrides the case runner accepts, coerced to numbers."""
    import inspect

    sig = inspect.signature(RUNNERS[case])
    kwargs = {}
    for key, val in overrides.items():
        if key in ("case", "out", "vtk"):
            continue
        if key not in sig.parameters:
            raise ValueError(f"case {case!r} does not accept option {key!r}")
        kwargs[key] = _coerce(val) if isinstance(val, str) else val
    return kwargs


def _emit(result, config: dict, out_prefix: str, vtk: bool) -> None:
    header = {"config_hash": config_hash(config),
              **{k: str(v) for k, v in sorted(config.items())}}
    m = result.metrics
    name = result.name
    if name == "womersley":
        cols = {"y": m["y"]}
        for t, prof in zip(result.history["times"], result.history["profiles"]):
            cols[f"u_t{t}"] = prof
        write_csv(f"{out_prefix}_profiles.csv", cols, header)
    elif name == "blasius":
        cols = {"xi": m["xi"], "reference": m["reference"]}
        for x, prof in m["profiles"].items():
            cols[f"u_x{x}"] = prof
        write_csv(f"{out_prefix}_profiles.csv", cols, header)
    elif name == "cavity":
        write_csv(f"{out_prefix}_centerline.csv",
                  {"y": m["y"], "u": m["u_centerline"]}, header)
    elif name == "cylinder-vortexstreet":
        write_csv(f"{out_prefix}_probe.csv",
                  {"t": result.history["times"],
                   "v": result.history["signal"]}, header)
    scalars = {k: v for k, v in m.items()
               if isinstance(v, (int, float, np.floating))}
    if scalars:
        write_csv(f"{out_prefix}_metrics.csv",
                  {k: np.array([v]) for k, v in scalars.items()}, header)
    if vtk:
        write_vtk(f"{out_prefix}.vtk", result.ops, result.state.P,
                  result.state.V)


def _progress(state, rep):
    print(f"  t={state.t:9.4f}  dt={rep.dt:.3e}  substeps={rep.substeps:3d}  "
          f"cg_it={rep.pressure.iterations:4d}  cont={rep.continuity:.2e}",
          flush=True)


def cmd_case(args) -> int:
    overrides = dict(kv.split("=", 1) for kv in args.options)
    config = {"case": args.name, **overrides}
    kwargs = _case_kwargs(args.name, overrides)
    if args.verbose:
        kwargs["progress"] = _progress
    result = RUNNERS[args.name](**kwargs)
    print(f"case {args.name}: {result.steps} steps, "
          f"max continuity residual {result.max_continuity:.2e}")
    for key, val in result.metrics.items():
        if isinstance(val, (int, float, np.floating, dict, str, type(None))):
            print(f"  {key}: {val}")
    _emit(result, config, args.out or args.name, args.vtk)
    return EXIT_OK


def cmd_converge(args) -> int:
    levels = tuple(range(args.meshes))
    config = {"case": "vortex-convergence", "p": args.p, "meshes": args.meshes}
    table = run_vortex_convergence(levels=levels, p=args.p,
                                   progress=_progress if args.verbose else None)
    print(f"{'N_i':>6} {'eps(p)':>12} {'eps(v)':>12} {'O(p)':>6} {'O(v)':>6}")
    for k, n in enumerate(table["n_tri"]):
        op = f"{table['order_p'][k-1]:6.2f}" if k else "     -"
        ov = f"{table['order_v'][k-1]:6.2f}" if k else "     -"
        print(f"{n:6d} {table['eps_p'][k]:12.4e} {table['eps_v'][k]:12.4e} "
              f"{op} {ov}")
    header = {"config_hash": config_hash(config), "p": str(args.p)}
    pad = [float("nan")]
    write_csv(args.out or "vortex_convergence.csv",
              {"n_tri": np.array(table["n_tri"], dtype=float),
               "eps_p": np.array(table["eps_p"]),
               "eps_v": np.array(table["eps_v"]),
               "order_p": np.array(pad + table["order_p"]),
               "order_v": np.array(pad + table["order_v"])}, header)
    return EXIT_OK


def cmd_solve(args) -> int:
    with open(args.config) as f:
        config = parse_config_text(f.read())
    for kv in args.options:
        key, val = kv.split("=", 1)
        config[key] = val
    case = config.get("case")
    if case not in CASE_NAMES:
        print(f"error: config must set case to one of {CASE_NAMES}",
              file=sys.stderr)
        return EXIT_USAGE
    overrides = {k: v for k, v in config.items() if k != "case"}
    kwargs = _case_kwargs(case, overrides)
    if args.verbose:
        kwargs["progress"] = _progress
    result = RUNNERS[case](**kwargs)
    print(f"case {case}: {result.steps} steps, "
          f"max continuity residual {result.max_continuity:.2e}")
    _emit(result, config, config.get("out", case), args.vtk)
    return EXIT_OK


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="stagdg",
        description="Staggered semi-implicit DG solver for the 2D "
                    "incompressible Navier-Stokes equations.")
    sub = ap.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("case", help="run a preconfigured benchmark case")
    pc.add_argument("name", choices=CASE_NAMES)
    pc.add_argument("options", nargs="*", metavar="key=value",
                    help="case-parameter overrides")
    pc.add_argument("--out", help="output file prefix (default: case name)")
    pc.add_argument("--vtk", action="store_true",
                    help="also write the final field snapshot")
    pc.add_argument("-v", "--verbose", action="store_true")
    pc.set_defaults(func=cmd_case)

    pv = sub.add_parser("converge", help="vortex accuracy study")
    pv.add_argument("--p", type=int, default=1, choices=(0, 1, 2, 3))
    pv.add_argument("--meshes", type=int, default=2)
    pv.add_argument("--out", help="output CSV path")
    pv.add_argument("-v", "--verbose", action="store_true")
    pv.set_defaults(func=cmd_converge)

    ps = sub.add_parser("solve", help="run a case from a config file")
    ps.add_argument("--config", required=True)
    ps.add_argument("options", nargs="*", metavar="key=value")
    ps.add_argument("--vtk", action="store_true")
    ps.add_argument("-v", "--verbose", action="store_true")
    ps.set_defaults(func=cmd_solve)

    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # runtime failure inside the solver
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
