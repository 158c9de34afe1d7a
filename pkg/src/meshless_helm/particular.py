"""Approximate particular solutions from a radial quasi-interpolant.

The source term is replaced by

    f_n(x) = n^{-s(1-gamma)} / m_s * sum_j f(j/n) phi(|n^gamma x - j n^{gamma-1}|)

where ``m_s`` is the mass of ``phi`` over ``R^s``.  Convolving each radial
bump with the free-space Green's function and splitting the radial integral
at ``r = |x - j/n|`` gives ``u_n`` with ``(Delta + kappa^2) u_n = f_n``
exactly.  With ``a = n^gamma`` and ``mu = kappa / a``, in two dimensions

    u_n(x) = -(i pi / 2) n^{-2} sum_j f_j [H0(kappa r) A(a r) + J0(kappa r) B(a r)],
    A(rho) = int_0^rho t phi(t) J0(mu t) dt,   B(rho) = int_rho^inf t phi(t) H0(mu t) dt,

and in three dimensions

    u_n(x) = -n^{-3+gamma} / (kappa r) sum_j f_j [e^{i kappa r} A3(a r) + sin(kappa r) B3(a r)],
    A3(rho) = int_0^rho t phi(t) sin(mu t) dt, B3(rho) = int_rho^inf t phi(t) e^{i mu t} dt.

The modified kind (``kappa = i lambda``) is evaluated on a purely real path
with ``K0, I0`` and ``exp, sinh``.

The radial integrals for all split points share one precomputed panel
table per plan: cumulative integrals at verified breakpoints plus one
partial Gauss-Kronrod panel per split point.
"""
import threading
from dataclasses import dataclass, field, replace

import numpy as np

from . import _fallback
from ._backend import kernels
from .errors import DomainError
from .geometry import Lattice
from .quad import DEFAULT_SPEC, QuadratureSpec, gk15, integrate, partition, tail_limit
from .rbf import Rbf
from .specialfn import WaveNumber

DERIVED = "derived"
PAPER = "paper"
_CHUNK = 1 << 21


def _key(rho):
    # round to 40 mantissa bits (about 12 significant digits)
    bits = np.ascontiguousarray(rho, dtype=np.float64).view(np.int64)
    return (bits + (1 << 11)) & ~np.int64((1 << 12) - 1)


class _SplitCache:
    """Sorted-array memo of (inner, tail) per rounded split radius."""

    def __init__(self):
        self.keys = np.empty(0, dtype=np.int64)
        self.inner = np.empty(0)
        self.tail = np.empty(0)
        self.lock = threading.Lock()

    def lookup(self, keys):
        with self.lock:
            pos = np.searchsorted(self.keys, keys)
            pos_c = np.minimum(pos, max(len(self.keys) - 1, 0))
            if len(self.keys) == 0:
                hit = np.zeros(len(keys), dtype=bool)
            else:
                hit = self.keys[pos_c] == keys
            return hit, self.inner[pos_c[hit]] if hit.any() else None, \
                self.tail[pos_c[hit]] if hit.any() else None

    def insert(self, keys, inner, tail):
        with self.lock:
            all_keys = np.concatenate([self.keys, keys])
            all_keys, first = np.unique(all_keys, return_index=True)
            self.inner = np.concatenate([self.inner, inner])[first]
            self.tail = np.concatenate([self.tail, tail])[first]
            self.keys = all_keys


class RadialTable:
    """Inner and tail radial integrals as functions of the split point.

    Parameters
    ----------
    rbf : Rbf
    dim : {2, 3}
    kappa : WaveNumber
    scale : float
        ``a = n^gamma``; the kernel argument is ``kappa t / a``.
    weight : float
        Constant multiplying ``phi`` (its prefactor over the mass).
    spec : QuadratureSpec
    """

    def __init__(self, rbf, dim, kappa, scale, weight, spec=DEFAULT_SPEC):
        self.rbf = rbf
        self.dim = dim
        self.kappa = kappa
        self.mu = kappa.magnitude / scale
        self.weight = weight
        self.spec = spec
        self.modified = kappa.is_modified
        growth = self.mu if self.modified else 0.0
        self.top = tail_limit(rbf.decay_descriptor(), growth, spec)
        width = self.top / 16.0
        if not self.modified:
            width = min(width, 1.5 / self.mu)
        breaks, (inner, tail) = partition(
            [self._inner_f, self._tail_f], 0.0, self.top, spec, max_width=width)
        self.breaks = breaks
        self.inner_cum = np.concatenate([[0.0], np.cumsum(inner)])
        self.tail_cum = np.concatenate([np.cumsum(tail[::-1])[::-1], [0.0]])
        self.cache = _SplitCache()

    def _args(self):
        return (self.dim, self.rbf.code, self.rbf.c, self.weight, self.mu)

    def _inner_f(self, t):
        if self.modified:
            return _fallback._inner_integrand(t, *self._args())
        tphi = t * _fallback._phi(t, self.rbf.code, self.rbf.c, self.weight)
        if self.dim == 2:
            return tphi * _fallback.j0(self.mu * t)
        return tphi * np.sin(self.mu * t)

    def _tail_f(self, t):
        if self.modified:
            return _fallback._tail_integrand(t, *self._args())
        tphi = t * _fallback._phi(t, self.rbf.code, self.rbf.c, self.weight)
        if self.dim == 2:
            x = np.where(t > 0, self.mu * t, 1.0)
            h = _fallback.j0(x) + 1j * _fallback.y0(x)
            return np.where(t > 0, tphi * h, 0.0)
        return tphi * np.exp(1j * self.mu * t)

    def _compute(self, rho):
        if self.modified:
            inner, tail, err = kernels.radial_integrals(
                np.ascontiguousarray(rho), self.breaks, self.inner_cum, self.tail_cum,
                *self._args())
        else:
            inner, tail, err = self._oscillatory(rho)
        spec = self.spec
        bad = err > np.maximum(spec.abs_tol,
                               spec.rel_tol * np.maximum(np.abs(inner), np.abs(tail)))
        for i in np.flatnonzero(bad):
            inner[i] = integrate(self._inner_f, 0.0, rho[i], spec)
            tail[i] = integrate(self._tail_f, rho[i], self.top, spec)
        return inner, tail

    def _oscillatory(self, rho):
        r = np.minimum(rho, self.top)
        k = np.clip(np.searchsorted(self.breaks, r, side="right") - 1, 0,
                    len(self.breaks) - 2)
        pin, ein, _ = gk15(self._inner_f, self.breaks[k], r)
        ptl, etl, _ = gk15(self._tail_f, r, self.breaks[k + 1])
        beyond = rho >= self.top
        inner = np.where(beyond, self.inner_cum[-1], self.inner_cum[k] + pin)
        tail = np.where(beyond, 0.0, self.tail_cum[k + 1] + ptl)
        return inner, tail, np.where(beyond, 0.0, np.maximum(ein, etl))

    def __call__(self, rho):
        """Inner and tail integrals at split points ``rho`` (any shape)."""
        rho = np.asarray(rho, dtype=np.float64)
        flat = rho.ravel()
        keys = _key(flat)
        ukeys, inverse = np.unique(keys, return_inverse=True)
        hit, hin, htl = self.cache.lookup(ukeys)
        dtype = np.float64 if self.modified else np.complex128
        inner = np.empty(len(ukeys), dtype=dtype)
        tail = np.empty(len(ukeys), dtype=dtype)
        if hit.any():
            inner[hit], tail[hit] = hin, htl
        miss = ~hit
        if miss.any():
            rho_u = ukeys[miss].view(np.float64)
            inner[miss], tail[miss] = self._compute(rho_u)
            self.cache.insert(ukeys[miss], inner[miss], tail[miss])
        inverse = inverse.ravel()
        return inner[inverse].reshape(rho.shape), tail[inverse].reshape(rho.shape)


@dataclass(frozen=True, eq=False)
class ParticularPlan:
    """Everything needed to evaluate ``f_n`` and ``u_n``.

    Parameters
    ----------
    lattice : Lattice
        Nodes ``j/n`` and samples ``f(j/n)``.
    rbf : Rbf
    kappa : WaveNumber
    quad_spec : QuadratureSpec
    normalize : bool
        Divide ``phi`` by its mass over ``R^dim`` so that ``f_n`` tends to
        ``f``.  Without it the quasi-interpolant of a constant in two
        dimensions is off by the factor ``sqrt(pi / c)``.
    convention : {"derived", "paper"}
        ``"paper"`` drops the ``n^-2`` factor in two dimensions and flips
        the sign between the two 3-D terms; kept for comparison only, the
        result then no longer satisfies the equation.
    """
    lattice: Lattice
    rbf: Rbf
    kappa: WaveNumber
    quad_spec: QuadratureSpec = DEFAULT_SPEC
    normalize: bool = True
    convention: str = DERIVED
    _table: RadialTable = field(default=None, repr=False)

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise DomainError(f"dimension must be 2 or 3, got {self.dim}")
        if not 0.0 <= self.lattice.gamma <= 1.0:
            raise DomainError("gamma must lie in [0, 1]")
        if self.convention not in (DERIVED, PAPER):
            raise DomainError(f"unknown convention {self.convention!r}")
        if self._table is None:
            weight = self.rbf.prefactor / (self.rbf.mass(self.dim) if self.normalize else 1.0)
            table = RadialTable(self.rbf, self.dim, self.kappa, self.a, weight,
                                self.quad_spec)
            object.__setattr__(self, "_table", table)

    @property
    def dim(self):
        return self.lattice.dim

    @property
    def n(self):
        return self.lattice.n

    @property
    def a(self):
        return float(self.n) ** self.lattice.gamma

    @property
    def table(self):
        return self._table

    def with_samples(self, samples):
        """Same plan with new node values; shares the radial table."""
        return replace(self, lattice=self.lattice.with_samples(samples))

    @property
    def fn_scale(self):
        s = self.dim
        mass = self.rbf.mass(s) if self.normalize else 1.0
        return float(self.n) ** (-s * (1.0 - self.lattice.gamma)) / mass

    @property
    def un_scale(self):
        if self.dim == 2:
            return 1.0 if self.convention == PAPER else float(self.n) ** -2
        return float(self.n) ** (-3.0 + self.lattice.gamma)


def _targets(x, dim):
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if x.shape[1] != dim:
        raise DomainError(f"expected points of dimension {dim}, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise DomainError("evaluation points must be finite")
    return x, single


def _distances(x, nodes):
    d2 = np.zeros((x.shape[0], nodes.shape[0]))
    for ax in range(x.shape[1]):
        d2 += (x[:, ax, None] - nodes[None, :, ax]) ** 2
    return np.sqrt(d2)


def _kernel_block(plan, r):
    """Green's-function weights for a block of target-node distances."""
    table = plan.table
    kap = plan.kappa.magnitude
    inner, tail = table(plan.a * r)
    flat = r.ravel()
    zero = flat == 0.0
    x = np.where(zero, 1.0, kap * flat)
    sign = -1.0 if (plan.convention == PAPER and plan.dim == 3) else 1.0
    inner = inner.ravel()
    tail = tail.ravel()
    if plan.kappa.is_modified:
        if plan.dim == 2:
            live = tail != 0.0
            grow = np.zeros_like(x)
            grow[live] = kernels.i0(np.ascontiguousarray(x[live]))
            out = kernels.k0(x) * inner + grow * tail
            out[zero] = tail[zero]
        else:
            with np.errstate(over="ignore"):
                out = (np.exp(-x) * inner + sign * np.where(tail != 0.0, np.sinh(x), 0.0) * tail) / x
            out[zero] = sign * tail[zero]
        return -plan.un_scale * out.reshape(r.shape)
    if plan.dim == 2:
        j0 = kernels.j0(x)
        h0 = j0 + 1j * kernels.y0(x)
        out = h0 * inner + j0 * tail
        out[zero] = tail[zero]
        return (-0.5j * np.pi * plan.un_scale) * out.reshape(r.shape)
    out = (np.exp(1j * x) * inner + sign * np.sin(x) * tail) / x
    out[zero] = sign * tail[zero]
    return -plan.un_scale * out.reshape(r.shape)


class ParticularField:
    """The approximate particular solution ``u_n`` of a plan."""

    def __init__(self, plan):
        self.plan = plan

    def fn(self, x):
        """Quasi-interpolant ``f_n`` at points ``x``."""
        plan = self.plan
        x, single = _targets(x, plan.dim)
        nodes = plan.lattice.nodes
        out = np.empty(x.shape[0])
        step = max(1, _CHUNK // max(1, nodes.shape[0]))
        for i in range(0, x.shape[0], step):
            r = _distances(x[i:i + step], nodes)
            out[i:i + step] = plan.rbf.eval(plan.a * r) @ plan.lattice.samples
        out *= plan.fn_scale
        return out[0] if single else out

    def weights(self, x):
        """Matrix ``W`` with ``u_n(x) = W @ samples``; independent of the samples."""
        plan = self.plan
        x, _ = _targets(x, plan.dim)
        nodes = plan.lattice.nodes
        dtype = np.float64 if plan.kappa.is_modified else np.complex128
        out = np.empty((x.shape[0], nodes.shape[0]), dtype=dtype)
        step = max(1, _CHUNK // max(1, nodes.shape[0]))
        for i in range(0, x.shape[0], step):
            out[i:i + step] = _kernel_block(plan, _distances(x[i:i + step], nodes))
        return out

    def __call__(self, x):
        plan = self.plan
        x, single = _targets(x, plan.dim)
        nodes = plan.lattice.nodes
        samples = plan.lattice.samples
        dtype = np.float64 if plan.kappa.is_modified else np.complex128
        out = np.empty(x.shape[0], dtype=dtype)
        step = max(1, _CHUNK // max(1, nodes.shape[0]))
        for i in range(0, x.shape[0], step):
            out[i:i + step] = _kernel_block(plan, _distances(x[i:i + step], nodes)) @ samples
        return out[0] if single else out

    evaluate = __call__


def eval_fn(plan, x):
    return ParticularField(plan).fn(x)


def eval_un(plan, x):
    return ParticularField(plan)(x)


def eval_un_2d(plan, x):
    if plan.dim != 2:
        raise DomainError("eval_un_2d needs a two-dimensional plan")
    return eval_un(plan, x)


def eval_un_3d(plan, x):
    if plan.dim != 3:
        raise DomainError("eval_un_3d needs a three-dimensional plan")
    return eval_un(plan, x)
