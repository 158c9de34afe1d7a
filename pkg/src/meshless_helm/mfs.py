"""Method of fundamental solutions: collocation system, solve, evaluation."""
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DomainError, GeometryError, RankDeficientError
from .specialfn import WaveNumber, fundamental_solution


def _as_points(p, dim, name):
    p = np.atleast_2d(np.asarray(p, dtype=np.float64))
    if p.shape[1] != dim:
        raise DomainError(f"{name}: expected {dim}-dimensional points, got shape {p.shape}")
    return p


def _pairwise(x, y):
    d2 = np.zeros((x.shape[0], y.shape[0]))
    for ax in range(x.shape[1]):
        d2 += (x[:, ax, None] - y[None, :, ax]) ** 2
    return np.sqrt(d2)


def kernel_matrix(kappa, dim, points, sources):
    """``Gamma(points[i], sources[j])``; real for the modified kind."""
    r = _pairwise(points, sources)
    if np.any(r == 0.0):
        raise GeometryError("evaluation point coincides with a source point")
    return fundamental_solution(kappa, dim, r)


@dataclass(frozen=True, eq=False)
class MfsSystem:
    kappa: WaveNumber
    dim: int
    collocation: np.ndarray
    sources: np.ndarray
    matrix: np.ndarray
    rhs: np.ndarray


@dataclass(frozen=True)
class SolveDiagnostics:
    residual_norm: float
    condition_indicator: float
    rank: int
    regularization: float


@dataclass(frozen=True, eq=False)
class MfsField:
    """``u_N(x) = sum_k c_k Gamma(x, sources[k])``."""
    kappa: WaveNumber
    dim: int
    sources: np.ndarray
    coefficients: np.ndarray
    diagnostics: SolveDiagnostics = None

    def matrix(self, x):
        return kernel_matrix(self.kappa, self.dim, _as_points(x, self.dim, "eval"), self.sources)

    def __call__(self, x):
        single = np.asarray(x).ndim == 1
        out = self.matrix(x) @ self.coefficients
        return out[0] if single else out

    eval = __call__


def assemble(kappa, dim, collocation, sources, boundary_values):
    """Dense collocation system ``A[k, m] = Gamma(x_k, source_m)``."""
    col = _as_points(collocation, dim, "collocation")
    src = _as_points(sources, dim, "sources")
    rhs = np.atleast_1d(np.asarray(boundary_values))
    if not (col.shape[0] == src.shape[0] == rhs.shape[0]) or col.shape[0] < 1:
        raise DomainError(
            f"size mismatch: {col.shape[0]} collocation points, {src.shape[0]} sources, "
            f"{rhs.shape[0]} boundary values")
    return MfsSystem(kappa, dim, col, src, kernel_matrix(kappa, dim, col, src), rhs)


class Factorization:
    """Pivoted QR of the column-equilibrated matrix, optionally ridge-augmented.

    The ridge term penalizes the equilibrated coefficients, i.e. it minimizes
    ``|A c - b|^2 + reg^2 |D^-1 c|^2`` with ``D`` the inverse column norms.
    Penalizing raw coefficients would be meaningless when columns span tens
    of orders of magnitude, as they do for large modified wave numbers.
    """

    def __init__(self, matrix, regularization=0.0):
        if regularization < 0 or not np.isfinite(regularization):
            raise DomainError(f"regularization must be finite and >= 0, got {regularization}")
        self.matrix = matrix
        self.regularization = float(regularization)
        m, n = matrix.shape
        norms = np.linalg.norm(matrix, axis=0)
        if np.any(norms == 0):
            raise RankDeficientError("a source column vanishes at every collocation point")
        self.scale = 1.0 / norms
        scaled = matrix * self.scale
        if self.regularization > 0:
            scaled = np.vstack([scaled, self.regularization * np.eye(n, dtype=scaled.dtype)])
        self.q, self.r, self.perm = scipy.linalg.qr(scaled, mode="economic", pivoting=True)
        diag = np.abs(np.diag(self.r))
        tol = max(scaled.shape) * np.finfo(np.float64).eps * diag[0]
        self.rank = int(np.sum(diag > tol))
        self.condition_indicator = float(diag[0] / diag[-1]) if diag[-1] > 0 else np.inf
        if self.rank < n and self.regularization == 0:
            raise RankDeficientError(
                f"collocation matrix is numerically rank deficient (rank {self.rank} of {n}); "
                "use a positive regularization")
        self.rows = m

    def solve(self, rhs):
        rhs = np.asarray(rhs)
        n = self.matrix.shape[1]
        b = rhs
        if self.regularization > 0:
            b = np.concatenate([rhs, np.zeros(n, dtype=rhs.dtype)])
        y = scipy.linalg.solve_triangular(self.r, self.q.conj().T @ b)
        coef = np.empty_like(y)
        coef[self.perm] = y
        coef = coef * self.scale
        residual = float(np.linalg.norm(self.matrix @ coef - rhs))
        diag = SolveDiagnostics(residual, self.condition_indicator, self.rank,
                                self.regularization)
        return coef, diag


def solve(system, regularization=0.0):
    """Least-squares coefficients for an assembled system.

    Raises
    ------
    RankDeficientError
        If the matrix is numerically rank deficient and ``regularization`` is 0.
    """
    fac = Factorization(system.matrix, regularization)
    coef, diag = fac.solve(system.rhs)
    return MfsField(system.kappa, system.dim, system.sources, coef, diag)
