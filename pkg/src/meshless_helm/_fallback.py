"""Pure numpy kernels.

This module mirrors the compiled ``_speedups`` extension function for
function.  ``_backend`` imports one or the other; nothing else should import
this module directly.

All routines take and return contiguous ``float64`` arrays and assume their
inputs have already been validated (positivity, finiteness).
"""
import numpy as np

EULER_GAMMA = 0.57721566490153286060651209008240243
LD = np.longdouble

# Crossovers between the convergent series and the large-argument forms.
J0Y0_CROSSOVER = 18.0
I0_CROSSOVER = 30.0
K0_CROSSOVER = 2.0

_SERIES_TERMS_J = 64
_SERIES_TERMS_I = 80
_SERIES_TERMS_K = 32
_ASYMPTOTIC_TERMS = 48
_TRAPEZOID_NODES = 40

# gk15 abscissae/weights on [-1, 1]; Gauss-7 weights are on the odd nodes.
GK15_NODES = np.array([
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144845693013, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
    0.207784955007898467600689403773245, 0.405845151377397166906606412076961,
    0.586087235467691130294144845693013, 0.741531185599394439863864773280788,
    0.864864423359769072789712788640926, 0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
])
GK15_WEIGHTS = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
])
G7_WEIGHTS = np.array([
    0.0, 0.129484966168869693270611432679082, 0.0,
    0.279705391489276667901467771423780, 0.0,
    0.381830050505118944950369775488975, 0.0,
    0.417959183673469387755102040816327, 0.0,
    0.381830050505118944950369775488975, 0.0,
    0.279705391489276667901467771423780, 0.0,
    0.129484966168869693270611432679082, 0.0,
])


def _asymptotic_pq(x):
    """Hankel large-argument sums P(x), Q(x) for order zero."""
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    prev = np.full_like(x, np.inf)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, _ASYMPTOTIC_TERMS):
        # a_k(0) / x^k with a_k(0) = a_{k-1}(0) * (-(2k-1)^2) / (8k)
        term = term * (-(2.0 * k - 1.0) ** 2) / (8.0 * k * x)
        mag = np.abs(term)
        active &= mag < prev
        prev = mag
        t = np.where(active, term, 0.0)
        if k % 2 == 0:
            p += t * (-1.0 if (k // 2) % 2 else 1.0)
        else:
            q += t * (-1.0 if ((k - 1) // 2) % 2 else 1.0)
        if not active.any():
            break
    return p, q


def _asymptotic_jy(x):
    p, q = _asymptotic_pq(x)
    c, s = np.cos(x), np.sin(x)
    cchi = (c + s) / np.sqrt(2.0)
    schi = (s - c) / np.sqrt(2.0)
    amp = np.sqrt(2.0 / (np.pi * x))
    return amp * (p * cchi - q * schi), amp * (p * schi + q * cchi)


def _j0_series(x):
    z = -(x.astype(LD) ** 2) / 4
    term = np.ones_like(z)
    total = np.ones_like(z)
    for k in range(1, _SERIES_TERMS_J):
        term = term * z / (k * k)
        total += term
    return total


def _y0_series(x, j0):
    xl = x.astype(LD)
    z = xl * xl / 4
    term = np.ones_like(z)
    h = LD(0)
    total = np.zeros_like(z)
    for k in range(1, _SERIES_TERMS_J):
        term = -term * z / (k * k)
        h += LD(1) / k
        total -= h * term
    lead = (np.log(xl / 2) + LD(EULER_GAMMA)) * j0
    return (LD(2) / LD(np.pi)) * (lead + total)


def j0(x):
    out = np.empty_like(x)
    small = x <= J0Y0_CROSSOVER
    if small.any():
        out[small] = _j0_series(x[small]).astype(np.float64)
    if (~small).any():
        out[~small] = _asymptotic_jy(x[~small])[0]
    return out


def y0(x):
    out = np.empty_like(x)
    small = x <= J0Y0_CROSSOVER
    if small.any():
        xs = x[small]
        out[small] = _y0_series(xs, _j0_series(xs)).astype(np.float64)
    if (~small).any():
        out[~small] = _asymptotic_jy(x[~small])[1]
    return out


def _i0_series(x):
    z = x * x / 4.0
    term = np.ones_like(z)
    total = np.ones_like(z)
    for k in range(1, _SERIES_TERMS_I):
        term = term * z / (k * k)
        total += term
    return total


def _i0_asymptotic(x):
    total = np.ones_like(x)
    term = np.ones_like(x)
    prev = np.full_like(x, np.inf)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, _ASYMPTOTIC_TERMS):
        term = term * (2.0 * k - 1.0) ** 2 / (8.0 * k * x)
        active &= term < prev
        prev = term
        total += np.where(active, term, 0.0)
    with np.errstate(over="ignore"):
        return np.exp(x - 0.5 * np.log(2.0 * np.pi * x)) * total


def i0(x):
    out = np.empty_like(x)
    small = x <= I0_CROSSOVER
    if small.any():
        out[small] = _i0_series(x[small])
    if (~small).any():
        out[~small] = _i0_asymptotic(x[~small])
    return out


def _k0_series(x):
    xl = x.astype(LD)
    z = xl * xl / 4
    term = np.ones_like(z)
    i0s = np.ones_like(z)
    h = LD(0)
    tail = np.zeros_like(z)
    for k in range(1, _SERIES_TERMS_K):
        term = term * z / (k * k)
        h += LD(1) / k
        i0s += term
        tail += h * term
    return (-(np.log(xl / 2) + LD(EULER_GAMMA)) * i0s + tail).astype(np.float64)


def k0e(x):
    """exp(x) * K0(x) for x > K0_CROSSOVER via the trapezoid rule on the
    integral of exp(-2 x sinh^2(t/2)) over t >= 0."""
    h = np.minimum(0.2, 0.6 / np.sqrt(x))
    total = 0.5 * np.ones_like(x)
    for j in range(1, _TRAPEZOID_NODES):
        s = np.sinh(0.5 * j * h)
        total += np.exp(-2.0 * x * s * s)
    return h * total


def k0(x):
    out = np.empty_like(x)
    small = x <= K0_CROSSOVER
    if small.any():
        out[small] = _k0_series(x[small])
    if (~small).any():
        xs = x[~small]
        out[~small] = k0e(xs) * np.exp(-xs)
    return out


# ---------------------------------------------------------------------------
# radial kernels of the particular solution (modified kind only)

KERNEL_2D = 2
KERNEL_3D = 3
RBF_GAUSSIAN = 0
RBF_BUMP = 1


def _phi(t, rbf_kind, c, weight):
    if rbf_kind == RBF_GAUSSIAN:
        return weight * np.exp(-c * t * t)
    s = 1.0 - t * t
    return np.where(np.abs(t) < 1.0, weight * s * s * s, 0.0)


def _inner_integrand(t, dim, rbf_kind, c, weight, mu):
    phi = t * _phi(t, rbf_kind, c, weight)
    if dim == KERNEL_2D:
        return phi * i0(mu * t)
    return phi * np.sinh(mu * t)


def _tail_integrand(t, dim, rbf_kind, c, weight, mu):
    phi = t * _phi(t, rbf_kind, c, weight)
    if dim == KERNEL_2D:
        # K0 is singular at 0 but t*K0(t) -> 0; gk15 never samples t = 0.
        safe = np.where(t > 0.0, mu * t, 1.0)
        return np.where(t > 0.0, phi * k0(safe), 0.0)
    return phi * np.exp(-mu * t)


def _gk15(fun, a, b, *args):
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    t = mid[:, None] + half[:, None] * GK15_NODES[None, :]
    vals = fun(t.ravel(), *args).reshape(t.shape)
    kron = half * (vals @ GK15_WEIGHTS)
    gauss = half * (vals @ G7_WEIGHTS)
    return kron, np.abs(kron - gauss)


def radial_integrals(rho, breaks, inner_cum, tail_cum, dim, rbf_kind, c,
                     weight, mu):
    """Inner and tail integrals at split points ``rho``.

    ``breaks`` is a verified panel partition of the integration range with
    cumulative inner integrals from 0 and cumulative tail integrals down from
    the top breakpoint.  Each value costs one partial gk15 panel per
    integral.  The returned error array holds the larger of the two
    embedded-rule estimates so the caller can refine outliers.
    """
    top = breaks[-1]
    r = np.minimum(rho, top)
    k = np.clip(np.searchsorted(breaks, r, side="right") - 1, 0, len(breaks) - 2)
    lo = breaks[k]
    hi = breaks[k + 1]
    args = (dim, rbf_kind, c, weight, mu)
    pin, ein = _gk15(_inner_integrand, lo, r, *args)
    ptl, etl = _gk15(_tail_integrand, r, hi, *args)
    inner = inner_cum[k] + pin
    tail = tail_cum[k + 1] + ptl
    beyond = rho >= top
    tail = np.where(beyond, 0.0, tail)
    inner = np.where(beyond, inner_cum[-1], inner)
    err = np.where(beyond, 0.0, np.maximum(ein, etl))
    return inner, tail, err
