"""Radial generating functions for the quasi-interpolant.

Both functions carry the prefactor that gives them unit integral over the
real line.  The quasi-interpolant additionally divides by :meth:`Rbf.mass`,
the integral over the full ambient space, so that it reproduces constants.
"""
from dataclasses import dataclass

import numpy as np

from . import _fallback
from .errors import DomainError
from .quad import CompactSupport, GaussianDecay

GAUSSIAN = "gaussian"
BUMP = "bump"


@dataclass(frozen=True)
class Rbf:
    """Radial function ``phi(t)`` for ``t >= 0``.

    Parameters
    ----------
    kind : {"gaussian", "bump"}
        ``gaussian`` is ``sqrt(c/pi) exp(-c t^2)``; ``bump`` is
        ``(35/32) (1 - t^2)^3`` on ``t < 1`` and zero beyond.
    c : float
        Gaussian shape parameter.  Ignored for the bump.
    """
    kind: str = GAUSSIAN
    c: float = 1.0

    def __post_init__(self):
        if self.kind not in (GAUSSIAN, BUMP):
            raise DomainError(f"unknown rbf kind {self.kind!r}")
        if self.kind == GAUSSIAN and not (np.isfinite(self.c) and self.c > 0):
            raise DomainError(f"gaussian shape parameter must be positive, got {self.c}")

    @classmethod
    def gaussian(cls, c):
        return cls(GAUSSIAN, float(c))

    @classmethod
    def bump(cls):
        return cls(BUMP, 0.0)

    @property
    def prefactor(self):
        if self.kind == GAUSSIAN:
            return float(np.sqrt(self.c / np.pi))
        return 35.0 / 32.0

    @property
    def code(self):
        return _fallback.RBF_GAUSSIAN if self.kind == GAUSSIAN else _fallback.RBF_BUMP

    def eval(self, t):
        """``phi`` at radii ``t`` (any shape)."""
        t = np.asarray(t, dtype=np.float64)
        return _fallback._phi(t, self.code, self.c, self.prefactor)

    __call__ = eval

    def decay_descriptor(self):
        if self.kind == GAUSSIAN:
            return GaussianDecay(self.c)
        return CompactSupport(1.0)

    def mass(self, dim):
        """Integral of ``phi(|x|)`` over ``R^dim``."""
        if dim not in (1, 2, 3):
            raise DomainError(f"dimension must be 1, 2 or 3, got {dim}")
        if self.kind == GAUSSIAN:
            return float((np.pi / self.c) ** ((dim - 1) / 2.0))
        return {1: 1.0, 2: 35.0 * np.pi / 128.0, 3: 2.0 * np.pi / 9.0}[dim]
