"""Stehfest inversion and the Laplace-domain diffusion and wave drivers.

``f(t) ~ (ln 2 / t) sum_l alpha_l F(l ln 2 / t)``.  The weights are computed
in exact rational arithmetic and rounded once.
"""
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .drm import DrmSolver
from .errors import DomainError
from .specialfn import WaveNumber

DERIVED = "derived"
PAPER = "paper"
MAX_NS = 20


def _check_ns(ns):
    if int(ns) != ns or ns < 2 or ns > MAX_NS or ns % 2:
        raise DomainError(f"ns must be an even integer in [2, {MAX_NS}], got {ns}")
    return int(ns)


@lru_cache(maxsize=None)
def exact_weights(ns):
    """Weights ``alpha_1 .. alpha_ns`` as :class:`fractions.Fraction`."""
    ns = _check_ns(ns)
    half = ns // 2
    out = []
    for l in range(1, ns + 1):
        total = Fraction(0)
        for i in range((l + 1) // 2, min(l, half) + 1):
            num = i ** half * math.factorial(2 * i)
            den = (math.factorial(half - i) * math.factorial(i) * math.factorial(i - 1)
                   * math.factorial(l - i) * math.factorial(2 * i - l))
            total += Fraction(num, den)
        out.append((-1) ** (half + l) * total)
    return tuple(out)


def weights(ns):
    return np.array([float(w) for w in exact_weights(ns)])


@dataclass(frozen=True)
class StehfestPlan:
    ns: int
    t: float

    def __post_init__(self):
        _check_ns(self.ns)
        if not (np.isfinite(self.t) and self.t > 0):
            raise DomainError(f"time must be positive, got {self.t}")

    @property
    def nodes(self):
        return np.arange(1, self.ns + 1) * (math.log(2.0) / self.t)

    @property
    def weights(self):
        return weights(self.ns)


def invert(plan, values):
    """Stehfest sum for transform values at ``plan.nodes``.

    ``values`` may carry trailing axes (one inversion per column).
    """
    values = np.asarray(values)
    if values.shape[0] != plan.ns:
        raise DomainError(f"expected {plan.ns} transform values, got {values.shape[0]}")
    # fixed summation order, so a point gives the same bits alone or in a batch
    total = np.zeros(values.shape[1:], dtype=np.result_type(values, np.float64))
    for w, v in zip(plan.weights, values):
        total = total + w * v
    return (math.log(2.0) / plan.t) * total


def resolve_threads(threads=0):
    """Worker count: explicit value, else ``MESHLESS_HELM_THREADS``, else CPUs."""
    if threads and threads > 0:
        return int(threads)
    env = os.environ.get("MESHLESS_HELM_THREADS", "").strip()
    if env:
        try:
            value = int(env)
        except ValueError:
            raise DomainError(f"MESHLESS_HELM_THREADS must be an integer, got {env!r}")
        if value > 0:
            return value
    return os.cpu_count() or 1


@dataclass(frozen=True, eq=False)
class HelmConfig:
    """Discretization shared by every per-node or per-step Helmholtz solve.

    ``extension`` selects how time-stepping sources are sampled at lattice
    nodes outside the closed domain; see
    :class:`meshless_helm.timestep.NodeSampler`.
    """
    mfs: object
    mps: object = None
    threads: int = 0
    extension: str = "reflect"


class LaplaceSolution:
    """Evaluator over the ``ns`` solved transform fields."""

    def __init__(self, plan, fields, offset=0.0):
        self.plan = plan
        self.fields = fields
        self.offset = offset

    def __call__(self, x):
        single = np.asarray(x).ndim == 1
        vals = np.array([f(np.atleast_2d(x)) for f in self.fields])
        out = invert(self.plan, vals) + self.offset
        return out[0] if single else out


def _run(tasks, threads):
    workers = min(resolve_threads(threads), len(tasks))
    if workers <= 1:
        return [task() for task in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda task: task(), tasks))


def _solve_nodes(problem, plan, config, wavenumber, source, boundary):
    def task_for(s):
        def task():
            solver = DrmSolver(problem.domain, wavenumber(s), config.mfs,
                               config.mps if source is not None else None)
            g = np.asarray(boundary(solver.collocation, s), dtype=np.float64)
            if np.ndim(g) == 0:
                g = np.full(solver.collocation.shape[0], float(g))
            samples = None
            if source is not None:
                samples = np.broadcast_to(
                    np.asarray(source(solver.nodes, s), dtype=np.float64),
                    (solver.nodes.shape[0],)).copy()
            return solver.solve(g, samples)
        return task
    return _run([task_for(s) for s in plan.nodes], config.threads)


def solve_diffusion_lt(problem, t, ns, config):
    """Diffusion ``(1/k) u_t = Delta u`` at time ``t`` by Stehfest inversion.

    Each node ``s`` solves ``(Delta - s/k) U = -u0/k`` with ``U = G(x, s)``
    on the boundary, where ``problem.boundary_transform(x, s)`` supplies
    ``G``.  ``problem.offset`` is added to the inverted value, which covers
    the usual shift by a harmonic initial state.
    """
    plan = StehfestPlan(ns, t)
    k = problem.coefficient
    if problem.boundary_transform is None:
        raise DomainError("the Laplace-domain driver needs boundary_transform(x, s)")
    source = None
    if problem.u0 is not None:
        source = lambda x, s: -np.asarray(problem.u0(x)) / k
    fields = _solve_nodes(problem, plan, config,
                          lambda s: WaveNumber.modified(math.sqrt(s / k)),
                          source, problem.boundary_transform)
    return LaplaceSolution(plan, fields, problem.offset)


def solve_wave_lt(problem, t, ns, config, sign=DERIVED):
    """Wave ``u_tt = c^2 Delta u`` at time ``t`` by Stehfest inversion.

    Each node ``s`` solves ``(Delta - (s/c)^2) U = -(s u0 + v0) / c^2``;
    ``sign="paper"`` flips the source sign for comparison.
    """
    if sign not in (DERIVED, PAPER):
        raise DomainError(f"sign must be {DERIVED!r} or {PAPER!r}, got {sign!r}")
    plan = StehfestPlan(ns, t)
    c = problem.coefficient
    if problem.boundary_transform is None:
        raise DomainError("the Laplace-domain driver needs boundary_transform(x, s)")
    factor = (-1.0 if sign == DERIVED else 1.0) / (c * c)
    source = None
    if problem.u0 is not None or problem.v0 is not None:
        def source(x, s):
            total = np.zeros(x.shape[0])
            if problem.u0 is not None:
                total = total + s * np.asarray(problem.u0(x))
            if problem.v0 is not None:
                total = total + np.asarray(problem.v0(x))
            return factor * total
    fields = _solve_nodes(problem, plan, config,
                          lambda s: WaveNumber.modified(s / c),
                          source, problem.boundary_transform)
    return LaplaceSolution(plan, fields, problem.offset)
