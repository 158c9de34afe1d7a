"""Worked examples: problem setups, runners and table layouts for ``bench``.

A runner takes a parameter dict and returns the measured quantities for
that configuration.  Table layouts map each cell to runner parameters and a
metric, so one solve can feed several tables.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .analytic import diffusion_series, error_report, helm_exact, wave_series
from .drm import HelmholtzProblem, MfsConfig, MpsConfig, solve_bvp
from .errors import ConfigError, RankDeficientError
from .geometry import Ball, Disk, PolarStar, Rect, spiral_points
from .rbf import Rbf
from .reference_data import (BALL_INTERIOR, HEAT_POINTS, STAR_INTERIOR, TABLES, WAVE_POINTS,
                             paper_value)
from .specialfn import WaveNumber
from .stehfest import HelmConfig, solve_diffusion_lt, solve_wave_lt
from .timestep import IbvpProblem, TimeScheme, march_diffusion, march_wave

FALLBACK_REG = 1e-12
HEAT_K = 5.8e-7
HEAT_T = 9000.0


@dataclass
class Options:
    """Run-wide settings shared by every runner."""
    regularization: float = 0.0
    threads: int = 0
    lambda_convention: str = "pde"
    stehfest_sign: str = "derived"
    extension: str = "reflect"


def with_fallback(run, reg):
    """Call ``run(reg)``; on rank deficiency without a ridge retry with
    :data:`FALLBACK_REG`.  Returns ``(result, reg_used)``."""
    try:
        return run(reg), reg
    except RankDeficientError:
        if reg > 0:
            raise
        return run(FALLBACK_REG), FALLBACK_REG


# steady problems

def star_domain():
    return PolarStar.cosine(1.0, -1.0 / 3.0, 4)


def run_star(p, opts):
    """Homogeneous modified problem (lambda^2 = 3) on the four-petal star."""
    dom = star_domain()
    exact = lambda x: helm_exact("5.1", x)

    def run(reg):
        prob = HelmholtzProblem(dom, WaveNumber.modified(math.sqrt(3.0)), exact,
                                MfsConfig(int(p["N"]), Disk((0.0, 0.0), float(p["a"])), reg))
        return solve_bvp(prob)

    sol, reg = with_fallback(run, opts.regularization)
    z = dom.boundary_points(150)
    ip = np.array(STAR_INTERIOR)
    return {"boundary": error_report(sol, exact, z).max_abs,
            "points": error_report(sol, exact, ip).per_point, "reg": reg}


def disk_evaluation_points():
    return np.vstack([spiral_points(350), Disk().boundary_points(100)])


def run_disk(p, opts):
    """``Delta u - u = 2 x e^y`` on the unit disk."""
    exact = lambda x: helm_exact("5.2", x)
    source = lambda x: 2.0 * x[:, 0] * np.exp(x[:, 1])
    rbf = Rbf.bump() if p["rbf"] == "bump" else Rbf.gaussian(float(p["c"]))
    mps = MpsConfig(rbf, int(p["n"]), 0.5, float(p["delta"]))

    def run(reg):
        prob = HelmholtzProblem(Disk(), WaveNumber.modified(1.0), exact,
                                MfsConfig(int(p["N"]), PolarStar.cosine(5.0, -1.0, 6), reg),
                                source, mps)
        return solve_bvp(prob)

    sol, reg = with_fallback(run, opts.regularization)
    return {"max": error_report(sol, exact, disk_evaluation_points()).max_abs, "reg": reg}


def run_ball(p, opts):
    """``Delta u - u = 2 y e^z`` on the unit ball."""
    exact = lambda x: helm_exact("5.3", x)
    source = lambda x: 2.0 * x[:, 1] * np.exp(x[:, 2])
    mps = MpsConfig(Rbf.gaussian(0.1), int(p["n"]), 0.5, 0.2)

    def run(reg):
        prob = HelmholtzProblem(Ball(), WaveNumber.modified(1.0), exact,
                                MfsConfig(int(p["N"]), Ball((0.0, 0.0, 0.0), 4.0), reg),
                                source, mps)
        return solve_bvp(prob)

    sol, reg = with_fallback(run, opts.regularization)
    return {"boundary": error_report(sol, exact, Ball().boundary_points(686)).max_abs,
            "points": error_report(sol, exact, np.array(BALL_INTERIOR)).per_point, "reg": reg}


# diffusion on (-0.1, 0.1)^2 with unit initial temperature

def heat_square():
    return Rect((-0.1, 0.1), (-0.1, 0.1))


def heat_reference():
    pts = np.array(HEAT_POINTS)
    return diffusion_series(pts[:, 0], pts[:, 1], HEAT_T, HEAT_K)


def heat_lt_problem():
    """Shifted by the initial state: ``v = u - 1`` with ``v = -1`` on the boundary."""
    return IbvpProblem("diffusion", HEAT_K, heat_square(),
                       boundary_transform=lambda x, s: np.full(np.atleast_2d(x).shape[0], -1.0 / s),
                       offset=1.0)


def run_heat_lt(p, opts):
    mfs = lambda reg: MfsConfig(40, Disk((0.0, 0.0), 2.0), reg)
    pts = np.array(HEAT_POINTS)

    def run(reg):
        sol = solve_diffusion_lt(heat_lt_problem(), HEAT_T, int(p["ns"]),
                                 HelmConfig(mfs(reg), threads=opts.threads))
        return sol(pts)

    values, reg = with_fallback(run, opts.regularization)
    return {"numerical": values, "true": heat_reference(), "reg": reg}


def heat_step_problem():
    return IbvpProblem("diffusion", HEAT_K, heat_square(), u0=lambda x: np.ones(x.shape[0]))


def run_heat_step(p, opts):
    pts = np.array(HEAT_POINTS)
    scheme = TimeScheme.to_time("diffusion", HEAT_T, int(p["M"]), opts.lambda_convention)

    def run(reg):
        cfg = HelmConfig(MfsConfig(40, Disk((0.0, 0.0), 2.0), reg),
                         MpsConfig(Rbf.gaussian(3.0), 14, 0.5, 0.2), opts.threads,
                         opts.extension)
        return march_diffusion(heat_step_problem(), scheme, cfg)[-1](pts)

    values, reg = with_fallback(run, opts.regularization)
    return {"numerical": values, "true": heat_reference(), "reg": reg}


# membrane on the unit square released with velocity x y

def wave_reference(T, points=WAVE_POINTS):
    return np.array([wave_series(x, y, float(T))[0] for x, y in points])


def wave_problem():
    return IbvpProblem("wave", 1.0, Rect(), v0=lambda x: x[:, 0] * x[:, 1],
                       boundary_transform=lambda x, s: np.zeros(np.atleast_2d(x).shape[0]))


def run_wave_lt(p, opts, sign=None):
    pts = np.array(WAVE_POINTS)
    sign = sign or opts.stehfest_sign

    def run(reg):
        cfg = HelmConfig(MfsConfig(int(p["N"]), Disk((0.5, 0.5), 1.2), reg),
                         MpsConfig(Rbf.gaussian(10.0), 16, 0.5, 0.1), opts.threads)
        return solve_wave_lt(wave_problem(), float(p["T"]), int(p.get("ns", 10)), cfg, sign)(pts)

    values, reg = with_fallback(run, opts.regularization)
    ref = wave_reference(p["T"])
    return {"numerical": values, "reference": ref, "errors": np.abs(values - ref), "reg": reg}


def run_wave_step(p, opts):
    pts = np.array(WAVE_POINTS)
    scheme = TimeScheme.to_time("wave", float(p["T"]), int(p["M"]))

    def run(reg):
        cfg = HelmConfig(MfsConfig(int(p["N"]), Disk((0.5, 0.5), 1.2), reg),
                         MpsConfig(Rbf.gaussian(3.0), 14, 0.5, 0.2), opts.threads,
                         opts.extension)
        return march_wave(wave_problem(), scheme, cfg)[-1](pts)

    values, reg = with_fallback(run, opts.regularization)
    ref = wave_reference(p["T"])
    return {"numerical": values, "reference": ref, "errors": np.abs(values - ref), "reg": reg}


# table layouts

def _boundary(res, row, col, rows):
    return res["boundary"]


def _interior(k):
    return lambda res, row, col, rows: res["points"][k]


def _max(res, row, col, rows):
    return res["max"]


def _heat_cell(res, row, col, rows):
    i = rows.index(row)
    if col == "error":
        return abs(res["numerical"][i] - res["true"][i])
    return res[col][i]


def _wave_cell(res, row, col, rows):
    return res["errors"][rows.index(row)]


@dataclass
class TableLayout:
    table_id: str
    example: str
    runner: object
    metric: object
    fixed: dict = field(default_factory=dict)
    params: tuple = ()

    @property
    def row_axis(self):
        return TABLES[self.table_id]["rows"]

    @property
    def col_axis(self):
        return TABLES[self.table_id]["cols"]

    @property
    def title(self):
        return TABLES[self.table_id]["title"]


LAYOUTS = [
    TableLayout("T1", "5.1", run_star, _boundary, {}, ("a", "N")),
    TableLayout("T2", "5.1", run_star, _interior(0), {}, ("a", "N")),
    TableLayout("T3", "5.1", run_star, _interior(1), {}, ("a", "N")),
    TableLayout("T4", "5.1", run_star, _interior(2), {}, ("a", "N")),
    TableLayout("T5", "5.2", run_disk, _max, {"rbf": "gaussian", "n": 14, "delta": 0.2},
                ("c", "N")),
    TableLayout("T6", "5.2", run_disk, _max, {"rbf": "gaussian", "n": 24, "delta": 0.1},
                ("c", "N")),
    TableLayout("T7", "5.2", run_disk, _max, {"rbf": "bump", "delta": 0.2}, ("n", "N")),
    TableLayout("T8", "5.3", run_ball, _boundary, {}, ("n", "N")),
    TableLayout("T9", "5.3", run_ball, _interior(0), {}, ("n", "N")),
    TableLayout("T10", "5.3", run_ball, _interior(1), {}, ("n", "N")),
    TableLayout("T11", "5.3", run_ball, _interior(2), {}, ("n", "N")),
    TableLayout("T13", "5.4", run_heat_lt, _heat_cell, {"ns": 10}),
    TableLayout("T14", "5.4", run_heat_lt, _heat_cell, {"ns": 18}),
    TableLayout("T15", "5.5", run_heat_step, _heat_cell, {"M": 10}),
    TableLayout("T16", "5.5", run_heat_step, _heat_cell, {"M": 30}),
    TableLayout("T18", "5.6", run_wave_lt, _wave_cell, {"N": 29}, ("T",)),
    TableLayout("T19", "5.6", run_wave_lt, _wave_cell, {"N": 37}, ("T",)),
    TableLayout("T21", "5.7", run_wave_step, _wave_cell, {"N": 21, "M": 15}, ("T",)),
    TableLayout("T22", "5.7", run_wave_step, _wave_cell, {"N": 157, "M": 10}, ("T",)),
    TableLayout("T23", "5.7", run_wave_step, _wave_cell, {"N": 157, "M": 15}, ("T",)),
]
EXAMPLES = tuple(sorted({lay.example for lay in LAYOUTS}))
OVERRIDES = ("a", "N", "c", "n", "ns", "M", "T")


@dataclass
class Cell:
    row: object
    col: object
    value: float
    paper_value: float
    regularization: float


@dataclass
class TableResult:
    layout: TableLayout
    rows: tuple
    cols: tuple
    cells: list


def _matches(value, wanted):
    return any(math.isclose(float(value), float(w), rel_tol=1e-12) for w in wanted)


def select(example, overrides=None):
    """Layouts of ``example`` restricted by ``overrides`` (name -> values).

    Returns a list of ``(layout, rows, cols)``.

    Raises
    ------
    ConfigError
        Unknown example, an override that applies to none of its tables, or
        an empty selection.
    """
    if example not in EXAMPLES:
        raise ConfigError(f"unknown example {example!r}; expected one of {', '.join(EXAMPLES)}")
    overrides = {k: v for k, v in (overrides or {}).items() if v}
    layouts = [lay for lay in LAYOUTS if lay.example == example]
    for key in overrides:
        if not any(key in lay.fixed or key in lay.params for lay in layouts):
            raise ConfigError(f"option --{key} does not apply to example {example}")
    chosen = []
    for lay in layouts:
        rows, cols = lay.row_axis[1], lay.col_axis[1]
        keep = True
        for key, wanted in overrides.items():
            if key in lay.fixed:
                keep &= _matches(lay.fixed[key], wanted)
            elif key == lay.row_axis[0]:
                rows = tuple(r for r in rows if _matches(r, wanted))
            elif key == lay.col_axis[0]:
                cols = tuple(c for c in cols if _matches(c, wanted))
        if keep and rows and cols:
            chosen.append((lay, rows, cols))
    if not chosen:
        raise ConfigError(f"the options select no table of example {example}")
    return chosen


def _params(lay, row, col):
    p = dict(lay.fixed)
    names = {lay.row_axis[0]: row, lay.col_axis[0]: col}
    for name in lay.params:
        p[name] = names[name]
    return p


def run_tables(example, overrides=None, opts=None, progress=None):
    """Run the selected tables; configurations shared by tables run once."""
    opts = opts or Options()
    cache = {}
    results = []
    for lay, rows, cols in select(example, overrides):
        cells = []
        for row in rows:
            for col in cols:
                p = _params(lay, row, col)
                key = (lay.runner.__name__, tuple(sorted(p.items())))
                if key not in cache:
                    if progress:
                        progress(f"{example} {lay.table_id} " +
                                 " ".join(f"{k}={v}" for k, v in sorted(p.items())))
                    cache[key] = lay.runner(p, opts)
                res = cache[key]
                cells.append(Cell(row, col, float(lay.metric(res, row, col, lay.row_axis[1])),
                                  paper_value(lay.table_id, row, col), res["reg"]))
        results.append(TableResult(lay, rows, cols, cells))
    return results
