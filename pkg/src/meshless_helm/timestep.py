"""Time-difference marching for diffusion and wave problems.

Each step is a modified Helmholtz problem ``(Delta - mu) u_n = h_n`` with
``mu`` fixed by the step size, so one :class:`~meshless_helm.drm.DrmSolver`
serves every step.  The source of step ``n`` is sampled at the lattice
nodes by evaluating earlier steps there.
"""
import math
from dataclasses import dataclass

import numpy as np

from .drm import DrmSolver
from .errors import DomainError, SolverError
from .specialfn import WaveNumber

DIFFUSION = "diffusion"
WAVE = "wave"
PDE = "pde"
PAPER = "paper"
PROJECT = "project"
REFLECT = "reflect"
FIELD = "field"
EXTENSIONS = (REFLECT, PROJECT, FIELD)


@dataclass(frozen=True, eq=False)
class IbvpProblem:
    """Initial-boundary value problem with Dirichlet data.

    Attributes
    ----------
    kind : {"diffusion", "wave"}
        ``(1/k) u_t = Delta u`` or ``u_tt = c^2 Delta u``.
    coefficient : float
        Diffusivity ``k`` or wave speed ``c``.
    domain : Domain
    u0, v0 : callable or None
        Initial value and (wave only) initial velocity on ``(m, dim)`` points.
        ``None`` means zero.
    g : callable or None
        Dirichlet data ``g(x, t)``; ``None`` means zero.
    boundary_transform : callable or None
        Laplace transform ``G(x, s)`` of ``g``, for the Laplace-domain drivers.
    forcing : callable or None
        Extra step source ``forcing(u_prev_values, x)``.
    offset : float
        Constant added to the Laplace-domain result.
    """
    kind: str
    coefficient: float
    domain: object
    u0: object = None
    v0: object = None
    g: object = None
    boundary_transform: object = None
    forcing: object = None
    offset: float = 0.0

    def __post_init__(self):
        if self.kind not in (DIFFUSION, WAVE):
            raise DomainError(f"unknown problem kind {self.kind!r}")
        if not (np.isfinite(self.coefficient) and self.coefficient > 0):
            raise DomainError("diffusivity or wave speed must be positive")


@dataclass(frozen=True)
class TimeScheme:
    """``steps`` equal steps of size ``tau`` up to ``T = tau * steps``."""
    kind: str
    tau: float
    steps: int
    convention: str = PDE

    def __post_init__(self):
        if self.kind not in (DIFFUSION, WAVE):
            raise DomainError(f"unknown scheme kind {self.kind!r}")
        if not self.tau > 0:
            raise DomainError("tau must be positive")
        if int(self.steps) != self.steps or self.steps < 1:
            raise DomainError("steps must be a positive integer")
        if self.convention not in (PDE, PAPER):
            raise DomainError(f"unknown lambda convention {self.convention!r}")

    @classmethod
    def to_time(cls, kind, T, steps, convention=PDE):
        return cls(kind, float(T) / steps, int(steps), convention)

    def coefficient(self, c_or_k):
        """The ``mu`` in ``(Delta - mu) u_n = h_n``."""
        if self.kind == WAVE:
            return 1.0 / (c_or_k * c_or_k * self.tau * self.tau)
        if self.convention == PAPER:
            return c_or_k / self.tau
        return 1.0 / (c_or_k * self.tau)


class FunctionField:
    """Wraps an initial-data callable so it can stand in for a solved step."""

    def __init__(self, fun):
        self.fun = fun

    def __call__(self, x):
        single = np.asarray(x).ndim == 1
        out = np.asarray(self.fun(np.atleast_2d(x)), dtype=np.float64)
        out = np.broadcast_to(out, (np.atleast_2d(x).shape[0],)).copy()
        return out[0] if single else out


def _zero(x, *_):
    return np.zeros(np.atleast_2d(x).shape[0])


def _values(fun, x, *args):
    out = np.asarray(fun(x, *args), dtype=np.float64)
    return np.broadcast_to(out, (x.shape[0],)).copy()


def _solver(problem, scheme, config):
    if scheme.kind != problem.kind:
        raise DomainError(f"{scheme.kind} scheme cannot march a {problem.kind} problem")
    if config.mps is None:
        raise DomainError("time marching needs particular-solution parameters")
    mu = scheme.coefficient(problem.coefficient)
    solver = DrmSolver(problem.domain, WaveNumber.modified(math.sqrt(mu)), config.mfs,
                       config.mps)
    return solver, mu


class NodeSampler:
    """Values of a solved step at the lattice nodes.

    Nodes outside the closed domain need an extension of the step.  Modes:

    ``reflect``
        ``2 u(p*) - u(q)`` with ``p*`` the projection of the node onto the
        domain and ``q`` the projection of its mirror image ``2 p* - p``;
        continuous with continuous normal derivative across the boundary.
    ``project``
        ``u(p*)``, the constant extension along the projection.
    ``field``
        the solved field evaluated at the node itself.  Its homogeneous part
        grows like ``exp(lambda d)`` at distance ``d`` outside the domain, so
        this is only usable for small ``lambda``.
    """

    def __init__(self, problem, solver, mode):
        if mode not in EXTENSIONS:
            raise DomainError(f"unknown extension mode {mode!r}")
        nodes = solver.nodes
        self.mode = mode
        if mode == FIELD:
            self.near = solver.evaluator(nodes)
            return
        foot = problem.domain.project(nodes)
        self.near = solver.evaluator(foot)
        self.far = None
        if mode == REFLECT:
            outside = np.any(foot != nodes, axis=1)
            self.outside = outside
            self.far = solver.evaluator(problem.domain.project(2.0 * foot[outside] - nodes[outside]))
        self.points = foot

    def initial(self, fun):
        """Apply the same extension to initial data given as a function."""
        if self.mode == FIELD:
            return _values(fun, self.near.points)
        return self._combine(_values(fun, self.near.points),
                             None if self.far is None else _values(fun, self.far.points))

    def _combine(self, near, far):
        if far is None:
            return near
        out = near.copy()
        out[self.outside] = 2.0 * near[self.outside] - far
        return out

    def __call__(self, field):
        if self.mode == FIELD or self.far is None:
            return self.near(field)
        return self._combine(self.near(field), self.far(field))


def _step(solver, g, samples, n):
    try:
        return solver.solve(g, samples)
    except SolverError as exc:
        raise SolverError(f"step {n}: {exc}") from exc


def march_diffusion(problem, scheme, config):
    """Backward Euler: ``(Delta - mu) u_n = -mu u_{n-1} + forcing(u_{n-1})``.

    Returns the list of solved fields for steps ``1 .. M``.
    """
    solver, mu = _solver(problem, scheme, config)
    at_nodes = NodeSampler(problem, solver, getattr(config, "extension", REFLECT))
    u0 = problem.u0 or _zero
    g = problem.g or _zero
    prev = at_nodes.initial(u0)
    fields = []
    for n in range(1, scheme.steps + 1):
        h = -mu * prev
        if problem.forcing is not None:
            h = h + np.asarray(problem.forcing(prev, solver.nodes), dtype=np.float64)
        field = _step(solver, _values(g, solver.collocation, n * scheme.tau), h, n)
        fields.append(field)
        prev = at_nodes(field)
    return fields


def march_wave(problem, scheme, config):
    """Central differences: ``(Delta - mu) u_n = mu (u_{n-2} - 2 u_{n-1})``
    with ``u_1 = u_0 + tau v_0``.

    Returns fields for steps ``1 .. M``; the first is the initial-data
    extrapolation itself.
    """
    if scheme.steps < 2:
        raise DomainError("the wave scheme needs at least two steps")
    solver, mu = _solver(problem, scheme, config)
    at_nodes = NodeSampler(problem, solver, getattr(config, "extension", REFLECT))
    u0 = problem.u0 or _zero
    v0 = problem.v0 or _zero
    g = problem.g or _zero
    tau = scheme.tau
    first = FunctionField(lambda x: _values(u0, x) + tau * _values(v0, x))
    older = at_nodes.initial(u0)
    old = at_nodes.initial(first)
    fields = [first]
    for n in range(2, scheme.steps + 1):
        h = mu * (older - 2.0 * old)
        field = _step(solver, _values(g, solver.collocation, n * tau), h, n)
        fields.append(field)
        older, old = old, at_nodes(field)
    return fields
