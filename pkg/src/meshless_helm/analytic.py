"""Closed-form and series reference solutions for the worked examples."""
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class SeriesSpec:
    max_index: int = 400
    tail_tol: float = 1e-12

    def __post_init__(self):
        if self.max_index < 1:
            raise DomainError("max_index must be at least 1")


_EXACT = {
    "5.1": lambda p: np.exp(-2.0 * p[:, 0]) * np.sin(p[:, 1]),
    "5.2": lambda p: p[:, 0] * p[:, 1] * np.exp(p[:, 1]),
    "5.3": lambda p: p[:, 0] ** 2 * p[:, 1] * np.exp(p[:, 2]),
}


def helm_exact(example_id, x):
    """Exact solution of the steady examples ``"5.1"``, ``"5.2"``, ``"5.3"``."""
    try:
        fun = _EXACT[str(example_id)]
    except KeyError:
        raise DomainError(f"no closed-form solution for example {example_id!r}")
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    out = fun(np.atleast_2d(x))
    return out[0] if single else out


def diffusion_series(x, y, t, k, spec=SeriesSpec(), half_width=0.1):
    """Unit initial temperature on ``(-w, w)^2`` with a zero boundary.

    Double cosine series over odd modes, indices from 0.  For ``t > 0``
    terms are dropped once the decay factor falls below ``spec.tail_tol``;
    at ``t = 0`` the series is summed to ``spec.max_index`` per index.
    """
    width = 2.0 * half_width
    rate = k * math.pi ** 2 / width ** 2
    if t > 0:
        # (2n+1)^2 + (2m+1)^2 <= K keeps exp(-rate K t) >= tail_tol
        kmax = -math.log(spec.tail_tol) / (rate * t)
        top = int(min(spec.max_index, max(0, (math.sqrt(kmax) - 1) / 2))) + 1
    else:
        top = spec.max_index
    odd = 2.0 * np.arange(top) + 1.0
    sign = np.where(np.arange(top) % 2, -1.0, 1.0)
    ax = sign / odd * np.cos(odd * math.pi * np.asarray(x, dtype=np.float64)[..., None] / width)
    ay = sign / odd * np.cos(odd * math.pi * np.asarray(y, dtype=np.float64)[..., None] / width)
    decay = np.exp(-rate * t * (odd[:, None] ** 2 + odd[None, :] ** 2))
    value = np.einsum("...i,ij,...j->...", ax, decay, ay)
    return 16.0 / math.pi ** 2 * value


def _kahan(values):
    total = 0.0
    comp = 0.0
    for v in values:
        yv = v - comp
        tv = total + yv
        comp = (tv - total) - yv
        total = tv
    return total


def wave_series(x, y, t, spec=SeriesSpec()):
    """Membrane on the unit square released from rest with velocity ``xy``.

    Summed over bands ``m + n = const`` with compensated accumulation.
    Returns ``(value, last_band)`` where ``last_band`` is the magnitude of
    the final band's contribution.
    """
    m = np.arange(1, spec.max_index + 1, dtype=np.float64)
    lam = math.pi * np.sqrt(m[:, None] ** 2 + m[None, :] ** 2)
    sign = np.where((m[:, None] + m[None, :]) % 2, -1.0, 1.0)
    terms = (4.0 * sign / (math.pi ** 2 * m[:, None] * m[None, :] * lam)
             * np.sin(lam * t) * np.sin(m[:, None] * math.pi * x)
             * np.sin(m[None, :] * math.pi * y))
    band_index = (np.arange(spec.max_index)[:, None] + np.arange(spec.max_index)[None, :]).ravel()
    bands = np.bincount(band_index, weights=terms.ravel())
    return _kahan(bands.tolist()), abs(bands[-1]) if bands.size else 0.0


@dataclass(frozen=True)
class ErrorReport:
    max_abs: float
    per_point: np.ndarray


def error_report(numeric, reference, points):
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if points.shape[0] == 0:
        raise DomainError("error_report needs at least one point")
    err = np.abs(np.asarray(numeric(points)) - np.asarray(reference(points)))
    return ErrorReport(float(err.max()), err)
