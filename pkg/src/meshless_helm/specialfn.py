"""Bessel and Hankel functions of order zero and the Helmholtz kernels.

All public functions accept a float or an array and return the same shape.
Arguments are validated here; the numeric work happens in the selected
backend (:mod:`meshless_helm._backend`).

Accuracy, measured against 40-digit references:

* ``bessel_j0``/``bessel_y0``: power series summed in extended precision for
  ``x <= 18``, Hankel asymptotic expansion above.  Absolute error is below
  ``1e-12`` of the local amplitude; relative error is ``<= 1e-10`` except in
  the immediate neighbourhood of a zero.
* ``bessel_i0``: power series for ``x <= 30``, asymptotic expansion above,
  relative error ``<= 1e-13``.  Overflows past ``x ~ 713.98``.
* ``bessel_k0``: series for ``x <= 2``, trapezoid rule on
  ``int_0^inf exp(-x cosh t) dt`` above, relative error ``<= 1e-15``.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._backend import kernels
from .errors import BesselOverflowError, DomainError


class Kind(Enum):
    OSCILLATORY = "oscillatory"
    MODIFIED = "modified"


@dataclass(frozen=True)
class WaveNumber:
    """Helmholtz coefficient of ``Delta u + kappa^2 u``.

    ``OSCILLATORY`` means ``kappa = magnitude``; ``MODIFIED`` means
    ``kappa = i * magnitude``, i.e. the operator ``Delta - magnitude**2``.
    """

    kind: Kind
    magnitude: float

    def __post_init__(self):
        if not isinstance(self.kind, Kind):
            object.__setattr__(self, "kind", Kind(self.kind))
        m = float(self.magnitude)
        if not (np.isfinite(m) and m > 0.0):
            raise DomainError(f"wave number magnitude must be positive, got {self.magnitude!r}")
        object.__setattr__(self, "magnitude", m)

    @classmethod
    def oscillatory(cls, kappa):
        return cls(Kind.OSCILLATORY, kappa)

    @classmethod
    def modified(cls, lam):
        return cls(Kind.MODIFIED, lam)

    @property
    def is_modified(self):
        return self.kind is Kind.MODIFIED

    @property
    def kappa_squared(self):
        """Coefficient of ``u`` in ``Delta u + kappa^2 u``."""
        return -self.magnitude ** 2 if self.is_modified else self.magnitude ** 2

    @property
    def complex_value(self):
        return 1j * self.magnitude if self.is_modified else complex(self.magnitude)


def _prepare(x, name, strict):
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name}: argument must be finite")
    bad = arr <= 0.0 if strict else arr < 0.0
    if np.any(bad):
        bound = "positive" if strict else "non-negative"
        raise DomainError(f"{name}: argument must be {bound}")
    return arr


def _apply(fun, arr):
    flat = np.ascontiguousarray(arr.ravel())
    out = np.asarray(fun(flat)).reshape(arr.shape)
    return out[()] if out.ndim == 0 else out


def bessel_j0(x):
    """J0(x) for x >= 0."""
    return _apply(kernels.j0, _prepare(x, "bessel_j0", strict=False))


def bessel_y0(x):
    """Y0(x) for x > 0; Y0 has a logarithmic singularity at 0."""
    return _apply(kernels.y0, _prepare(x, "bessel_y0", strict=True))


def bessel_i0(x):
    """I0(x) for x >= 0.

    Raises
    ------
    BesselOverflowError
        If any result exceeds the double range (x larger than about 713.98).
    """
    out = _apply(kernels.i0, _prepare(x, "bessel_i0", strict=False))
    if not np.all(np.isfinite(out)):
        raise BesselOverflowError("bessel_i0: result overflows double precision")
    return out


def bessel_k0(x):
    """K0(x) for x > 0."""
    return _apply(kernels.k0, _prepare(x, "bessel_k0", strict=True))


def hankel1_0(kappa, r):
    """H0^(1)(kappa r) as a complex number (or array).

    For the modified kind the identity ``H0(i z) = -(2i/pi) K0(z)`` is used,
    so the result is purely imaginary and its imaginary part comes straight
    from K0 without complex arithmetic.
    """
    arr = _prepare(r, "hankel1_0", strict=True)
    z = kappa.magnitude * arr
    if kappa.is_modified:
        out = -1j * (2.0 / np.pi) * _apply(kernels.k0, z)
    else:
        out = _apply(kernels.j0, z) + 1j * _apply(kernels.y0, z)
    return out


def fundamental_solution(kappa, dim, r):
    """Free-space kernel ``Gamma(r)`` of ``Delta + kappa^2``.

    ``dim == 2``: ``(i/4) H0^(1)(kappa r)``; ``dim == 3``:
    ``exp(i kappa r) / (4 pi r)``.  The modified kind returns a real float64
    result (``K0(lam r)/(2 pi)`` and ``exp(-lam r)/(4 pi r)``), the
    oscillatory kind a complex one.
    """
    if dim not in (2, 3):
        raise DomainError(f"fundamental_solution: dim must be 2 or 3, got {dim!r}")
    arr = _prepare(r, "fundamental_solution", strict=True)
    m = kappa.magnitude
    if kappa.is_modified:
        if dim == 2:
            return _apply(kernels.k0, m * arr) / (2.0 * np.pi)
        return np.exp(-m * arr) / (4.0 * np.pi * arr)
    if dim == 2:
        return 0.25j * hankel1_0(kappa, arr)
    return np.exp(1j * m * arr) / (4.0 * np.pi * arr)
