import math

import numpy as np
import pytest

from meshless_helm.analytic import error_report, helm_exact
from meshless_helm.catalog import disk_evaluation_points
from meshless_helm.drm import (DrmSolver, HelmholtzProblem, MfsConfig, MpsConfig, SolutionField,
                               solve_bvp)
from meshless_helm.errors import DomainError, GeometryError, UnsupportedFeatureError
from meshless_helm.geometry import Disk, PolarStar
from meshless_helm.mfs import MfsField
from meshless_helm.particular import ParticularField
from meshless_helm.rbf import Rbf
from meshless_helm.specialfn import WaveNumber

STAR = PolarStar.cosine(1.0, -1.0 / 3.0, 4)
FICT = PolarStar.cosine(5.0, -1.0, 6)
MOD1 = WaveNumber.modified(1.0)


def exact_52(x):
    return helm_exact("5.2", x)


def source_52(x):
    return 2 * x[:, 0] * np.exp(x[:, 1])


def disk_problem(n_points=40, rbf=Rbf.gaussian(3.82), n=14):
    return HelmholtzProblem(Disk(), MOD1, exact_52, MfsConfig(n_points, FICT), source_52,
                            MpsConfig(rbf, n, 0.5, 0.2))


def test_pure_mfs_path():
    exact = lambda x: helm_exact("5.1", x)
    prob = HelmholtzProblem(STAR, WaveNumber.modified(math.sqrt(3.0)), exact,
                            MfsConfig(30, Disk((0.0, 0.0), 5.0)))
    sol = solve_bvp(prob)
    assert sol.particular is None
    assert error_report(sol, exact, STAR.boundary_points(150)).max_abs <= 1e-5


def test_inhomogeneous_disk():
    pts = disk_evaluation_points()
    assert pts.shape == (450, 2)
    assert np.all(np.linalg.norm(pts, axis=1) <= 1 + 1e-12)
    sol = solve_bvp(disk_problem())
    assert error_report(sol, exact_52, pts).max_abs <= 5e-3


def test_zero_data_gives_zero_field():
    zero = lambda x: np.zeros(len(x))
    prob = HelmholtzProblem(Disk(), MOD1, zero, MfsConfig(20, FICT), zero,
                            MpsConfig(Rbf.gaussian(3.0), 6))
    sol = solve_bvp(prob)
    np.testing.assert_array_equal(sol(np.array([[0.1, 0.2], [0.0, -0.5]])), 0.0)


def test_both_components_zero():
    hom = MfsField(MOD1, 2, np.array([[3.0, 0.0]]), np.zeros(1))
    assert SolutionField(None, hom)(np.array([0.2, 0.2])) == 0.0


def test_boundary_values_match_data_to_misfit():
    prob = disk_problem(n=8)
    solver = DrmSolver(prob.domain, prob.kappa, prob.mfs, prob.mps)
    sol = solve_bvp(prob)
    misfit = sol.diagnostics.residual_norm
    np.testing.assert_allclose(sol(solver.collocation), exact_52(solver.collocation),
                               atol=misfit + 1e-13)


def test_superposition_is_bitwise():
    prob = disk_problem(n=8)
    solver = DrmSolver(prob.domain, prob.kappa, prob.mfs, prob.mps)
    g = exact_52(solver.collocation)
    samples = source_52(solver.nodes)
    full = solver.solve(g, samples)
    shifted = solver.solve(g - solver.collocation_weights @ samples)
    np.testing.assert_array_equal(full.homogeneous.coefficients,
                                  shifted.homogeneous.coefficients)
    # the same through the public problem type
    trace = ParticularField(solver.plan.with_samples(samples))
    hom = HelmholtzProblem(Disk(), MOD1, lambda x: exact_52(x) - trace(x), prob.mfs)
    np.testing.assert_allclose(solve_bvp(hom).homogeneous.coefficients,
                               full.homogeneous.coefficients, rtol=1e-10)


def test_discrete_maximum_principle():
    # g >= 0 and f <= 0 force u >= 0 for the modified operator
    g = lambda x: 1.0 + x[:, 0] ** 2
    f = lambda x: -np.ones(len(x))
    prob = HelmholtzProblem(Disk(), WaveNumber.modified(2.0), g, MfsConfig(40, FICT), f,
                            MpsConfig(Rbf.gaussian(3.82), 14))
    sol = solve_bvp(prob)
    z = Disk().boundary_points(150)
    misfit = np.max(np.abs(sol(z) - g(z)))
    assert np.min(sol(disk_evaluation_points())) >= -misfit


def test_unsupported_and_invalid_setups():
    exact = lambda x: helm_exact("5.1", x)
    mfs = MfsConfig(20, Disk((0.0, 0.0), 5.0))
    with pytest.raises(UnsupportedFeatureError):
        solve_bvp(HelmholtzProblem(STAR, MOD1, exact, mfs, boundary_operator="neumann"))
    with pytest.raises(GeometryError):
        solve_bvp(HelmholtzProblem(STAR, MOD1, exact, MfsConfig(20, Disk((0.0, 0.0), 0.8))))
    with pytest.raises(DomainError):
        solve_bvp(HelmholtzProblem(STAR, MOD1, exact, mfs, source=source_52))
    with pytest.raises(DomainError):
        MfsConfig(0, Disk())
