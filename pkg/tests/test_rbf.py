import math

import numpy as np
import pytest

from meshless_helm.errors import DomainError
from meshless_helm.quad import CompactSupport, GaussianDecay, integrate, integrate_tail
from meshless_helm.rbf import Rbf


def test_examples():
    assert Rbf.gaussian(3).eval(0.0) == pytest.approx(0.9772050238058398, rel=1e-14)
    assert Rbf.bump().eval(0.5) == 0.46142578125
    assert Rbf.bump().eval(1.5) == 0.0
    assert Rbf.bump().eval(1.0) == 0.0


def test_decay_descriptor():
    assert Rbf.gaussian(3).decay_descriptor() == GaussianDecay(3.0)
    assert Rbf.gaussian(0.1).decay_descriptor() == GaussianDecay(0.1)
    assert Rbf.bump().decay_descriptor() == CompactSupport(1.0)


@pytest.mark.parametrize("rbf", [Rbf.gaussian(3.82), Rbf.gaussian(0.1), Rbf.bump()])
def test_unit_mass_on_line(rbf):
    half = integrate_tail(rbf.eval, 0.0, rbf.decay_descriptor())
    assert 2 * half == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("rbf", [Rbf.gaussian(3.82), Rbf.bump()])
@pytest.mark.parametrize("dim", [2, 3])
def test_mass_matches_radial_integral(rbf, dim):
    surface = 2 * math.pi if dim == 2 else 4 * math.pi
    radial = integrate_tail(lambda t: t ** (dim - 1) * rbf.eval(t), 0.0,
                            rbf.decay_descriptor())
    assert rbf.mass(dim) == pytest.approx(surface * radial, rel=1e-10)


def test_gaussian_planar_mass_closed_form():
    assert Rbf.gaussian(3.82).mass(2) == pytest.approx(math.sqrt(math.pi / 3.82), rel=1e-12)


def test_even_and_smooth():
    r = np.linspace(0, 2, 41)
    for rbf in (Rbf.gaussian(2.0), Rbf.bump()):
        np.testing.assert_array_equal(rbf.eval(r), rbf.eval(-r))
    # bump is C2 at t = 1: value, slope and curvature vanish from the left
    b = Rbf.bump()
    for h in (1e-2, 1e-3):
        t = 1 - h
        assert b.eval(t) <= 35 / 32 * (2 * h) ** 3
        d1 = (b.eval(t + h / 2) - b.eval(t - h / 2)) / h
        assert abs(d1) <= 35 / 32 * 3 * 4 * (2 * h) ** 2
    assert integrate(lambda t: b.eval(t), 0.999, 1.0) < 1e-9


def test_validation():
    with pytest.raises(DomainError):
        Rbf.gaussian(0.0)
    with pytest.raises(DomainError):
        Rbf("multiquadric", 1.0)
