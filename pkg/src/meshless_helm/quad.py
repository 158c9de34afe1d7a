"""Adaptive Gauss-Kronrod quadrature on an interval and on Gaussian tails.

Every panel is integrated with the 15-point Kronrod rule; the embedded
7-point Gauss rule gives the error estimate.  Integrands are called with a
1-D numpy array of abscissae and may return real or complex values.
"""
import heapq
from dataclasses import dataclass

import numpy as np

from ._fallback import G7_WEIGHTS, GK15_NODES, GK15_WEIGHTS
from .errors import DomainError, QuadratureError


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-13
    max_subdivisions: int = 200
    tail_exponent_cutoff: float = 36.0

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be at least 1")
        if self.tail_exponent_cutoff <= 0:
            raise DomainError("tail_exponent_cutoff must be positive")


DEFAULT_SPEC = QuadratureSpec()


@dataclass(frozen=True)
class GaussianDecay:
    """Integrand decays at least like ``exp(-c t^2)``."""
    c: float


@dataclass(frozen=True)
class CompactSupport:
    """Integrand vanishes for ``t >= radius``."""
    radius: float


def gk15(f, a, b):
    """Kronrod estimates and error bounds on the panels ``[a[i], b[i]]``.

    Returns ``(values, errors, abs_values)`` where ``abs_values`` is the
    Kronrod estimate of the integral of ``|f|``.
    """
    a = np.atleast_1d(np.asarray(a, dtype=np.float64))
    b = np.atleast_1d(np.asarray(b, dtype=np.float64))
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    t = mid[:, None] + half[:, None] * GK15_NODES[None, :]
    vals = np.asarray(f(t.ravel())).reshape(t.shape)
    kron = half * (vals @ GK15_WEIGHTS)
    gauss = half * (vals @ G7_WEIGHTS)
    mass = np.abs(half) * (np.abs(vals) @ GK15_WEIGHTS)
    return kron, np.abs(kron - gauss), mass


def integrate(f, a, b, spec=DEFAULT_SPEC):
    """Integral of ``f`` over ``[a, b]`` by globally adaptive bisection.

    Raises
    ------
    QuadratureError
        When ``spec.max_subdivisions`` bisections do not bring the error
        estimate below ``max(abs_tol, rel_tol * |value|)``.  The exception
        carries the best estimate and its error bound.
    """
    a = float(a)
    b = float(b)
    if not (np.isfinite(a) and np.isfinite(b)) or a > b:
        raise DomainError(f"integrate: need finite a <= b, got [{a}, {b}]")
    if a == b:
        return 0.0
    v, e, _ = gk15(f, [a], [b])
    value, err = v[0], e[0]
    # max-heap on error; the counter breaks ties deterministically
    heap = [(-err, 0, a, b, value)]
    counter = 1
    total, total_err = value, err
    for _ in range(spec.max_subdivisions):
        if total_err <= max(spec.abs_tol, spec.rel_tol * abs(total)):
            return total
        neg_err, _, lo, hi, pval = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        v, e, _ = gk15(f, [lo, mid], [mid, hi])
        total += v[0] + v[1] - pval
        total_err += e[0] + e[1] + neg_err
        heapq.heappush(heap, (-e[0], counter, lo, mid, v[0]))
        heapq.heappush(heap, (-e[1], counter + 1, mid, hi, v[1]))
        counter += 2
    # re-sum to shed the drift of the running totals
    total = sum(item[4] for item in heap)
    total_err = sum(-item[0] for item in heap)
    if total_err <= max(spec.abs_tol, spec.rel_tol * abs(total)):
        return total
    raise QuadratureError(
        f"integrate: tolerance not met after {spec.max_subdivisions} subdivisions "
        f"(estimate {total!r}, error {total_err:.3e})",
        estimate=total, error=total_err)


def gaussian_cutoff(c, growth, cutoff):
    """Positive root of ``c t^2 - growth t = cutoff``."""
    return (growth + np.sqrt(growth * growth + 4.0 * c * cutoff)) / (2.0 * c)


def tail_limit(decay, growth=0.0, spec=DEFAULT_SPEC):
    """Upper integration limit that stands in for infinity."""
    if isinstance(decay, CompactSupport):
        return float(decay.radius)
    if isinstance(decay, GaussianDecay):
        return float(gaussian_cutoff(decay.c, growth, spec.tail_exponent_cutoff))
    raise DomainError(f"unknown decay descriptor {decay!r}")


def integrate_tail(f, a, decay, spec=DEFAULT_SPEC, growth=0.0):
    """Integral of ``f`` over ``[a, inf)`` for an integrand with known decay.

    ``growth`` bounds the exponential growth rate of whatever multiplies the
    radial function inside ``f`` (e.g. ``mu`` for an ``I0(mu t)`` factor).
    Gaussian tails are cut where the exponent reaches
    ``-spec.tail_exponent_cutoff``; compactly supported ones at the radius.
    """
    a = float(a)
    if not a >= 0.0:
        raise DomainError(f"integrate_tail: need a >= 0, got {a}")
    top = tail_limit(decay, growth, spec)
    if a >= top:
        return 0.0
    return integrate(f, a, top, spec)


def partition(funcs, a, b, spec=DEFAULT_SPEC, max_width=np.inf, max_rounds=60):
    """Split ``[a, b]`` into panels on which one gk15 pass is accurate.

    A panel is accepted when, for every integrand in ``funcs``, the embedded
    error is within ``rel_tol`` of the panel's integral of ``|f|``.  Returns
    the breakpoints and, per integrand, the panel integrals.  Used to build
    cumulative tables whose partial sums keep relative accuracy.
    """
    n0 = max(1, int(np.ceil((b - a) / max_width))) if np.isfinite(max_width) else 1
    edges = np.linspace(a, b, n0 + 1)
    done_lo, done_hi = [], []
    done_vals = [[] for _ in funcs]
    lo, hi = edges[:-1], edges[1:]
    min_width = (b - a) * 1e-12
    for _ in range(max_rounds):
        if lo.size == 0:
            break
        ok = np.ones(lo.size, dtype=bool)
        vals = []
        for f in funcs:
            v, e, m = gk15(f, lo, hi)
            ok &= e <= spec.rel_tol * m + 1e-300
            vals.append(v)
        ok |= (hi - lo) <= min_width
        done_lo.append(lo[ok])
        done_hi.append(hi[ok])
        for store, v in zip(done_vals, vals):
            store.append(v[ok])
        mid = 0.5 * (lo[~ok] + hi[~ok])
        lo, hi = np.concatenate([lo[~ok], mid]), np.concatenate([mid, hi[~ok]])
    if lo.size:
        raise QuadratureError("partition: panels did not converge", None, None)
    los = np.concatenate(done_lo)
    order = np.argsort(los, kind="stable")
    breaks = np.concatenate([los[order], [np.concatenate(done_hi)[order][-1]]])
    panel_values = [np.concatenate(store)[order] for store in done_vals]
    return breaks, panel_values
