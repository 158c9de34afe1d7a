import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meshless_helm.analytic import helm_exact
from meshless_helm.errors import DomainError, GeometryError, RankDeficientError
from meshless_helm.geometry import Ball, Disk, PolarStar
from meshless_helm.mfs import MfsField, assemble, solve
from meshless_helm.specialfn import WaveNumber, fundamental_solution

MOD1 = WaveNumber.modified(1.0)
STAR = PolarStar.cosine(1.0, -1.0 / 3.0, 4)


def star_system(n=30, a=5.0):
    col = STAR.boundary_points(n)
    src = Disk((0.0, 0.0), a).boundary_points(n)
    g = helm_exact("5.1", col)
    return assemble(WaveNumber.modified(math.sqrt(3.0)), 2, col, src, g)


def test_single_entry_matrix():
    sys1 = assemble(MOD1, 2, [[1.0, 0.0]], [[3.0, 0.0]], [1.0])
    want = float(mpmath.besselk(0, 2)) / (2 * math.pi)
    assert sys1.matrix.shape == (1, 1)
    assert sys1.matrix[0, 0] == pytest.approx(want, rel=1e-14)
    field = solve(sys1)
    assert field.coefficients[0] == pytest.approx(1.0 / want, rel=1e-14)


def test_symmetric_pair():
    m = assemble(MOD1, 2, [[1.0, 0.0], [-1.0, 0.0]], [[3.0, 0.0], [-3.0, 0.0]], [0.0, 0.0]).matrix
    assert m[0, 0] == m[1, 1]
    assert m[0, 1] == m[1, 0]
    assert m[0, 0] > m[0, 1]


def test_coincident_points_and_size_mismatch():
    with pytest.raises(GeometryError):
        assemble(MOD1, 2, [[1.0, 0.0]], [[1.0, 0.0]], [1.0])
    with pytest.raises(DomainError):
        assemble(MOD1, 2, [[1.0, 0.0], [0.0, 1.0]], [[3.0, 0.0]], [1.0, 2.0])


def test_zero_rhs_gives_zero_field():
    sys0 = star_system()
    sys0 = assemble(sys0.kappa, 2, sys0.collocation, sys0.sources, np.zeros(30))
    field = solve(sys0)
    np.testing.assert_array_equal(field.coefficients, 0.0)
    assert field.diagnostics.residual_norm == 0.0
    assert field(np.array([0.1, 0.2])) == 0.0


def test_single_source_field():
    field = MfsField(MOD1, 2, np.array([[3.0, 0.0]]), np.array([1.0]))
    x = np.array([0.5, 0.5])
    assert field(x) == pytest.approx(fundamental_solution(MOD1, 2, math.hypot(2.5, 0.5)),
                                     rel=1e-15)
    with pytest.raises(GeometryError):
        field(np.array([3.0, 0.0]))


def test_homogeneous_star_problem():
    field = solve(star_system())
    assert field.diagnostics.residual_norm <= 1e-10
    z = STAR.boundary_points(150)
    assert np.max(np.abs(field(z) - helm_exact("5.1", z))) <= 1e-5
    x = np.array([0.5, 0.5])
    assert abs(field(x) - math.exp(-1) * math.sin(0.5)) <= 1e-4


def test_maximum_principle_consistency():
    field = solve(star_system())
    z = STAR.boundary_points(150)
    misfit = np.max(np.abs(field(z) - helm_exact("5.1", z)))
    rng = np.random.default_rng(5)
    p = rng.uniform(-1, 1, size=(400, 2))
    p = p[STAR.contains(p)]
    bound = np.max(np.abs(helm_exact("5.1", STAR.boundary_points(4096))))
    assert np.max(np.abs(field(p))) <= bound * (1 + 10 * misfit)


@pytest.mark.parametrize("kappa,dim", [(WaveNumber.modified(2.0), 2),
                                       (WaveNumber.modified(2.0), 3),
                                       (WaveNumber.oscillatory(1.5), 2)])
def test_planted_source_is_recovered(kappa, dim):
    if dim == 2:
        col = Disk().boundary_points(12)
        src = Disk((0.0, 0.0), 2.0).boundary_points(12)
    else:
        col = Ball().boundary_points(20)
        src = Ball((0.0, 0.0, 0.0), 2.0).boundary_points(20)
    k = 3
    g = fundamental_solution(kappa, dim, np.linalg.norm(col - src[k], axis=1))
    field = solve(assemble(kappa, dim, col, src, g))
    want = np.zeros(len(src))
    want[k] = 1.0
    np.testing.assert_allclose(field.coefficients, want, atol=1e-8)


def test_oscillatory_matrix_is_complex():
    col = Disk().boundary_points(6)
    src = Disk((0.0, 0.0), 2.0).boundary_points(6)
    assert assemble(WaveNumber.oscillatory(1.0), 2, col, src, np.ones(6)).matrix.dtype \
        == np.complex128
    assert assemble(MOD1, 2, col, src, np.ones(6)).matrix.dtype == np.float64


def test_rank_deficiency_needs_regularization():
    col = Disk().boundary_points(4)
    src = np.array([[3.0, 0.0], [3.0, 1e-14], [0.0, 3.0], [-3.0, 0.0]])
    system = assemble(MOD1, 2, col, src, np.ones(4))
    with pytest.raises(RankDeficientError, match="regularization"):
        solve(system, 0.0)
    field = solve(system, 1e-8)
    assert field.diagnostics.regularization == 1e-8
    with pytest.raises(DomainError):
        solve(system, -1.0)


@settings(max_examples=30, deadline=None)
@given(r1=st.floats(-14, 0), r2=st.floats(-14, 0), seed=st.integers(0, 1000))
def test_residual_monotone_in_regularization(r1, r2, seed):
    rng = np.random.default_rng(seed)
    col = Disk().boundary_points(20)
    src = Disk((0.0, 0.0), 3.0).boundary_points(20)
    system = assemble(WaveNumber.modified(1.5), 2, col, src, rng.normal(size=20))
    lo, hi = sorted((10.0 ** r1, 10.0 ** r2))
    f_lo, f_hi = solve(system, lo), solve(system, hi)
    # a backward-stable solve fixes residuals only to eps |A| |c|
    floor = 100 * np.finfo(float).eps * (np.linalg.norm(system.matrix, 2)
                                         * np.linalg.norm(f_lo.coefficients)
                                         + np.linalg.norm(system.rhs))
    assert f_hi.diagnostics.residual_norm >= f_lo.diagnostics.residual_norm - floor
