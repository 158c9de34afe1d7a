"""Dual reciprocity driver for ``(Delta + kappa^2) u = f`` with Dirichlet data.

The solution is split as ``u = u_n + v`` where ``u_n`` is the particular
solution of the quasi-interpolated source and ``v`` solves the homogeneous
equation with boundary data ``g - u_n`` by the method of fundamental
solutions.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, GeometryError, UnsupportedFeatureError
from .geometry import Domain, lattice_indices, Lattice
from .mfs import Factorization, MfsField, kernel_matrix
from .particular import DERIVED, ParticularField, ParticularPlan
from .quad import DEFAULT_SPEC, QuadratureSpec
from .rbf import Rbf
from .specialfn import WaveNumber

DIRICHLET = "dirichlet"
NEUMANN = "neumann"


@dataclass(frozen=True)
class MfsConfig:
    """Collocation count, fictitious surface and ridge parameter."""
    n_points: int
    fictitious: Domain
    regularization: float = 0.0

    def __post_init__(self):
        if int(self.n_points) != self.n_points or self.n_points < 1:
            raise DomainError(f"n_points must be a positive integer, got {self.n_points}")
        if not self.regularization >= 0:
            raise DomainError("regularization must be >= 0")


@dataclass(frozen=True)
class MpsConfig:
    """Quasi-interpolation parameters for the particular solution."""
    rbf: Rbf
    n: int
    gamma: float = 0.5
    delta: float = 0.2
    quad_spec: QuadratureSpec = DEFAULT_SPEC
    normalize: bool = True
    convention: str = DERIVED


@dataclass(frozen=True, eq=False)
class HelmholtzProblem:
    """``(Delta + kappa^2) u = source`` in ``domain``, ``u = dirichlet`` on the boundary.

    ``source`` and ``dirichlet`` map an ``(m, dim)`` array to ``m`` values.
    ``source=None`` means a zero source, in which case ``mps`` may be omitted.
    """
    domain: Domain
    kappa: WaveNumber
    dirichlet: object
    mfs: MfsConfig
    source: object = None
    mps: MpsConfig = None
    boundary_operator: str = DIRICHLET


def check_enclosure(domain, fictitious, samples=2048):
    """Raise unless the fictitious surface strictly encloses the closed domain."""
    if fictitious.dim != domain.dim:
        raise GeometryError("fictitious surface and domain differ in dimension")
    surf = fictitious.boundary_points(samples)
    if np.any(domain.contains(surf)):
        raise GeometryError("fictitious surface passes through the closed domain")
    if not domain.enclosed_by(fictitious, samples):
        raise GeometryError("fictitious surface does not enclose the domain")


class DrmSolver:
    """Everything about a problem that does not depend on the data.

    The collocation matrix is factored once and the particular-solution
    weights at the collocation points are built once, so repeated solves
    with new sources or boundary data (time stepping, superposition) cost a
    matrix-vector product and a triangular solve.
    """

    def __init__(self, domain, kappa, mfs, mps=None):
        self.domain = domain
        self.kappa = kappa
        self.dim = domain.dim
        self.mfs = mfs
        self.mps = mps
        check_enclosure(domain, mfs.fictitious)
        self.collocation = domain.boundary_points(mfs.n_points)
        self.sources = mfs.fictitious.boundary_points(mfs.n_points)
        self.matrix = kernel_matrix(kappa, self.dim, self.collocation, self.sources)
        self.factorization = Factorization(self.matrix, mfs.regularization)
        self.plan = None
        self._collocation_weights = None
        if mps is not None:
            idx = lattice_indices(domain, int(mps.n), float(mps.delta))
            if idx.shape[0] == 0:
                raise GeometryError("lattice is empty")
            lat = Lattice(int(mps.n), float(mps.gamma), float(mps.delta), idx,
                          np.zeros(idx.shape[0]))
            self.plan = ParticularPlan(lat, mps.rbf, kappa, mps.quad_spec, mps.normalize,
                                       mps.convention)

    @property
    def nodes(self):
        return None if self.plan is None else self.plan.lattice.nodes

    @property
    def collocation_weights(self):
        if self._collocation_weights is None:
            self._collocation_weights = ParticularField(self.plan).weights(self.collocation)
        return self._collocation_weights

    def solve(self, boundary_values, samples=None):
        """Solve for node samples of the source and boundary values at the
        collocation points."""
        g = np.asarray(boundary_values)
        particular = None
        rhs = g
        if samples is not None:
            if self.plan is None:
                raise DomainError("a nonzero source needs particular-solution parameters")
            samples = np.asarray(samples, dtype=np.float64)
            particular = ParticularField(self.plan.with_samples(samples))
            rhs = g - self.collocation_weights @ samples
        coef, diag = self.factorization.solve(rhs)
        hom = MfsField(self.kappa, self.dim, self.sources, coef, diag)
        return SolutionField(particular, hom)

    def evaluator(self, points):
        return PointEvaluator(self, points)


@dataclass(frozen=True, eq=False)
class SolutionField:
    """``u = u_n + v``; real-valued output."""
    particular: ParticularField
    homogeneous: MfsField

    def __call__(self, x):
        single = np.asarray(x).ndim == 1
        out = self.homogeneous(np.atleast_2d(x))
        if self.particular is not None:
            out = out + self.particular(np.atleast_2d(x))
        out = np.real(out)
        return out[0] if single else out

    eval = __call__

    @property
    def diagnostics(self):
        return self.homogeneous.diagnostics


class PointEvaluator:
    """Fixed point set with cached kernel matrices, for repeated evaluation
    of fields produced by one solver."""

    def __init__(self, solver, points):
        self.points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        self.g = kernel_matrix(solver.kappa, solver.dim, self.points, solver.sources)
        self.w = None
        if solver.plan is not None:
            self.w = ParticularField(solver.plan).weights(self.points)

    def __call__(self, field):
        out = self.g @ field.homogeneous.coefficients
        if field.particular is not None:
            out = out + self.w @ field.particular.plan.lattice.samples
        return np.real(out)


def solve_bvp(problem):
    """Solve a Helmholtz boundary value problem; returns a :class:`SolutionField`."""
    if problem.boundary_operator != DIRICHLET:
        raise UnsupportedFeatureError(
            f"boundary operator {problem.boundary_operator!r} is not supported; "
            "only Dirichlet data can be imposed")
    mps = problem.mps if problem.source is not None else None
    if problem.source is not None and mps is None:
        raise DomainError("a nonzero source needs particular-solution parameters")
    solver = DrmSolver(problem.domain, problem.kappa, problem.mfs, mps)
    g = np.asarray(problem.dirichlet(solver.collocation), dtype=np.float64)
    samples = None
    if mps is not None:
        samples = np.asarray(problem.source(solver.nodes), dtype=np.float64)
    return solver.solve(g, samples)
