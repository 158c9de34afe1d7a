"""Command-line front end.

Subcommands
-----------
``solve CONFIG``
    Run one configured problem; writes ``solution.csv``, ``errors.csv`` when
    a reference is configured, and ``run_meta.json``.
``bench EXAMPLE``
    Reproduce the tables of a worked example; writes one CSV per table with
    a ``paper_value`` column, a plot-data file per table and ``run_meta.json``.
``weights NS``
    Print the Stehfest weights.

Exit codes: 0 success, 2 configuration error, 3 solver error.
"""
import argparse
import csv
import hashlib
import json
import math
import os
import platform
import sys
import time

import numpy as np

from . import __version__
from ._backend import BACKEND
from .errors import ConfigError, DomainError, GeometryError, MeshlessError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
THREADS_ENV = "MESHLESS_HELM_THREADS"


def fmt(value):
    """Ten significant digits, ``'.'`` decimal point, empty for ``None``."""
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    if value == 0.0:
        return "0"
    return format(value, ".10g")


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) if not isinstance(v, str) else v for v in row])


def _versions():
    import scipy
    return {"meshless_helm": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version(), "backend": BACKEND}


def write_meta(out, payload):
    with open(os.path.join(out, "run_meta.json"), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _threads(value):
    if value is not None:
        return value
    env = os.environ.get(THREADS_ENV, "").strip()
    if not env:
        return 0
    try:
        value = int(env)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {env!r}")
    if value < 0:
        raise ConfigError(f"{THREADS_ENV} must be >= 0, got {value}")
    return value


def _make_out(path):
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {path!r}: {exc.strerror}")
    return path


# solve

def _build_and_solve(cfg, args):
    """Returns ``(numeric_values, reference_values_or_None)`` at the evaluation points."""
    from .analytic import diffusion_series, wave_series
    from .drm import HelmholtzProblem, MfsConfig, MpsConfig, solve_bvp
    from .rbf import Rbf
    from .specialfn import WaveNumber
    from .stehfest import HelmConfig, solve_diffusion_lt, solve_wave_lt
    from .timestep import IbvpProblem, TimeScheme, march_diffusion, march_wave

    reg = cfg.mfs["regularization"] if args.reg is None else args.reg
    mfs = MfsConfig(cfg.mfs["n_points"], cfg.fictitious, reg)
    mps = None
    if cfg.mps is not None:
        m = cfg.mps
        rbf = Rbf.bump() if m["rbf"] == "bump" else Rbf.gaussian(m["c"])
        mps = MpsConfig(rbf, m["n"], m["gamma"], m["delta"], normalize=m["normalize"])
    prob = cfg.problem
    pts = cfg.points
    threads = _threads(args.threads)

    if cfg.kind == "helmholtz":
        kappa = (WaveNumber.modified(prob["wavenumber"]) if prob["operator"] == "modified"
                 else WaveNumber.oscillatory(prob["wavenumber"]))
        sol = solve_bvp(HelmholtzProblem(cfg.domain, kappa, prob["dirichlet"], mfs,
                                         prob["source"], mps))
        ref = prob["exact"](pts) if prob["exact"] is not None else None
        return sol(pts), ref

    kind = "diffusion" if cfg.kind.startswith("diffusion") else "wave"
    g = prob.get("g")
    ibvp = IbvpProblem(kind, prob["coefficient"], cfg.domain, u0=prob["u0"], v0=prob.get("v0"),
                       g=g, boundary_transform=prob.get("boundary_transform"),
                       offset=prob["offset"])
    helm = HelmConfig(mfs, mps, threads, cfg.time.get("extension", "reflect"))
    if cfg.kind.endswith("_lt"):
        t_end = cfg.time["t"]
        if kind == "diffusion":
            sol = solve_diffusion_lt(ibvp, t_end, cfg.time["ns"], helm)
        else:
            sign = args.stehfest_sign or cfg.time["sign"]
            sol = solve_wave_lt(ibvp, t_end, cfg.time["ns"], helm, sign)
        values = sol(pts)
    else:
        t_end = cfg.time["T"]
        convention = args.lambda_convention or cfg.time["lambda_convention"]
        scheme = TimeScheme.to_time(kind, t_end, cfg.time["steps"], convention)
        march = march_diffusion if kind == "diffusion" else march_wave
        values = march(ibvp, scheme, helm)[-1](pts)

    ref = None
    if prob["exact"] is not None:
        ref = prob["exact"](pts, t_end)
    elif prob["series"] == "diffusion":
        ref = diffusion_series(pts[:, 0], pts[:, 1], t_end, prob["coefficient"],
                               half_width=prob["series_half_width"])
    elif prob["series"] == "wave":
        ref = np.array([wave_series(x, y, t_end)[0] for x, y in pts])
    return values, ref


def cmd_solve(args):
    from .config import load

    start = time.perf_counter()
    cfg = load(args.config)
    out = _make_out(args.out or cfg.out_dir)
    values, ref = _build_and_solve(cfg, args)
    values = np.asarray(values, dtype=np.float64)
    coords = ["x", "y", "z"][:cfg.dim]
    write_csv(os.path.join(out, "solution.csv"), coords + ["value"],
              [list(p) + [v] for p, v in zip(cfg.points, values)])
    summary = {}
    if ref is not None:
        ref = np.asarray(ref, dtype=np.float64)
        err = np.abs(values - ref)
        write_csv(os.path.join(out, "errors.csv"),
                  coords + ["numeric", "reference", "abs_error"],
                  [list(p) + [v, r, e] for p, v, r, e in zip(cfg.points, values, ref, err)])
        summary["max_abs_error"] = float(err.max())
        print(f"max_abs_error {fmt(err.max())}")
    wall = time.perf_counter() - start
    print(f"wall_time_s {wall:.3f}")
    write_meta(out, {"command": "solve", "config": os.path.abspath(args.config),
                     "config_sha256": cfg.digest, "versions": _versions(),
                     "wall_time_s": round(wall, 3), **summary})
    return EXIT_OK


# bench

def _label(value):
    if isinstance(value, tuple):
        return " ".join(fmt(v) for v in value)
    return value if isinstance(value, str) else fmt(value)


def _plot_rows(result):
    """Blocks of ``(x, y)`` pairs, one per curve."""
    lay = result.layout
    by_cell = {(c.row, c.col): c.value for c in result.cells}
    blocks = []
    if lay.row_axis[0] == "point":
        pts = np.array(result.rows, dtype=np.float64)
        axis = int(np.argmax(np.ptp(pts, axis=0))) if len(pts) > 1 else 0
        for col in result.cols:
            blocks.append((f"{lay.col_axis[0]}={_label(col)}", lay.row_axis[0] + "_" + "xyz"[axis],
                           [(row[axis], by_cell[(row, col)]) for row in result.rows]))
    else:
        for row in result.rows:
            blocks.append((f"{lay.row_axis[0]}={_label(row)}", lay.col_axis[0],
                           [(col, by_cell[(row, col)]) for col in result.cols]))
    return blocks


def write_table(out, result):
    lay = result.layout
    name = lay.table_id.lower()
    rows = [[lay.row_axis[0], _label(c.row), lay.col_axis[0], _label(c.col), c.value,
             c.paper_value, c.regularization] for c in result.cells]
    write_csv(os.path.join(out, f"{name}.csv"),
              ["row_key", "row", "column_key", "column", "value", "paper_value",
               "regularization"], rows)
    with open(os.path.join(out, f"{name}_plot.dat"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# {lay.table_id}: {lay.title}\n")
        for i, (curve, xname, pairs) in enumerate(_plot_rows(result)):
            if i:
                fh.write("\n\n")
            fh.write(f"# curve {curve}\n# {xname} value\n")
            for x, y in pairs:
                fh.write(f"{fmt(x)} {fmt(y)}\n")


def cmd_bench(args):
    from .catalog import OVERRIDES, Options, run_tables

    start = time.perf_counter()
    overrides = {k: getattr(args, k) for k in OVERRIDES if getattr(args, k) is not None}
    opts = Options(regularization=args.reg or 0.0, threads=_threads(args.threads),
                   lambda_convention=args.lambda_convention or "pde",
                   stehfest_sign=args.stehfest_sign or "derived")
    progress = (lambda msg: print(f"running {msg}", file=sys.stderr)) if args.verbose else None
    # validate the selection before creating any output
    from .catalog import select
    select(args.example, overrides)
    out = _make_out(args.out or os.path.join("bench_out", args.example))
    results = run_tables(args.example, overrides, opts, progress)
    files = []
    for res in results:
        write_table(out, res)
        files.append(res.layout.table_id.lower() + ".csv")
        worst = max(c.value for c in res.cells)
        print(f"{res.layout.table_id} {res.layout.title}: max value {fmt(worst)}")
    wall = time.perf_counter() - start
    print(f"wall_time_s {wall:.3f}")
    digest = hashlib.sha256(json.dumps(
        {"example": args.example, "overrides": overrides, "options": vars(opts)},
        sort_keys=True).encode()).hexdigest()
    write_meta(out, {"command": "bench", "example": args.example,
                     "overrides": overrides, "options": vars(opts), "config_sha256": digest,
                     "tables": files, "versions": _versions(), "wall_time_s": round(wall, 3)})
    return EXIT_OK


# weights

def cmd_weights(args):
    from .stehfest import exact_weights, weights

    if args.exact:
        for l, w in enumerate(exact_weights(args.ns), start=1):
            print(f"{l} {w}")
    else:
        for l, w in enumerate(weights(args.ns), start=1):
            print(f"{l} {fmt(w)}")
    return EXIT_OK


def _nonnegative_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _nonnegative_float(text):
    value = float(text)
    if not value >= 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output directory")
    common.add_argument("--threads", type=_nonnegative_int,
                        help=f"worker threads, 0 = auto (fallback: ${THREADS_ENV})")
    common.add_argument("--lambda-convention", choices=("pde", "paper"),
                        help="diffusion step coefficient: 1/(k tau) (pde) or k/tau (paper)")
    common.add_argument("--stehfest-sign", choices=("derived", "paper"),
                        help="source sign of the wave transform equation")
    common.add_argument("--reg", type=_nonnegative_float, help="MFS ridge parameter")

    parser = argparse.ArgumentParser(prog="meshless-helm", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="run one configured problem")
    p.add_argument("config", help="TOML configuration file")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", parents=[common], help="reproduce a worked example's tables")
    p.add_argument("example", help="example id, one of 5.1 .. 5.7")
    p.add_argument("--a", type=float, nargs="+", help="fictitious radii")
    p.add_argument("--N", type=int, nargs="+", help="collocation counts")
    p.add_argument("--c", type=float, nargs="+", help="gaussian shape parameters")
    p.add_argument("--n", type=int, nargs="+", help="lattice densities")
    p.add_argument("--ns", type=int, nargs="+", help="Stehfest orders")
    p.add_argument("--M", type=int, nargs="+", help="time step counts")
    p.add_argument("--T", type=float, nargs="+", help="final times")
    p.add_argument("-v", "--verbose", action="store_true", help="report progress on stderr")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("weights", help="print Stehfest weights")
    p.add_argument("ns", type=int, help="even order in [2, 20]")
    p.add_argument("--exact", action="store_true", help="print exact rationals")
    p.set_defaults(func=cmd_weights)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (ConfigError, DomainError, GeometryError) as exc:
        # invalid parameters or geometry, detected before or during setup
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MeshlessError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
