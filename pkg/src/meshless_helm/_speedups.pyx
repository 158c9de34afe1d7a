# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; a drop-in replacement for ``_fallback``.

Same algorithms, same crossovers, scalar C loops instead of numpy
broadcasting.  Series are summed in ``long double``.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, exp, log, cos, sin, sinh, fabs, INFINITY

cnp.import_array()

cdef double EULER_GAMMA = 0.57721566490153286060651209008240243
cdef double PI = 3.14159265358979323846264338327950288
cdef double J0Y0_CROSSOVER = 18.0
cdef double I0_CROSSOVER = 30.0
cdef double K0_CROSSOVER = 2.0
cdef int SERIES_TERMS_J = 64
cdef int SERIES_TERMS_I = 80
cdef int SERIES_TERMS_K = 32
cdef int ASYMPTOTIC_TERMS = 48
cdef int TRAPEZOID_NODES = 40

cdef double[15] GK_X
cdef double[15] GK_W
cdef double[15] G7_W
_gkx = [
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144845693013, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.0,
    0.207784955007898467600689403773245, 0.405845151377397166906606412076961,
    0.586087235467691130294144845693013, 0.741531185599394439863864773280788,
    0.864864423359769072789712788640926, 0.949107912342758524526189684047851,
    0.991455371120812639206854697526329]
_gkw = [
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970]
_g7w = [
    0.0, 0.129484966168869693270611432679082, 0.0,
    0.279705391489276667901467771423780, 0.0,
    0.381830050505118944950369775488975, 0.0,
    0.417959183673469387755102040816327, 0.0,
    0.381830050505118944950369775488975, 0.0,
    0.279705391489276667901467771423780, 0.0,
    0.129484966168869693270611432679082, 0.0]
for _i in range(15):
    GK_X[_i] = _gkx[_i]
    GK_W[_i] = _gkw[_i]
    G7_W[_i] = _g7w[_i]


cdef void _asym_pq(double x, double* p, double* q) noexcept nogil:
    cdef double term = 1.0, prev = INFINITY, mag
    cdef int k
    p[0] = 1.0
    q[0] = 0.0
    for k in range(1, ASYMPTOTIC_TERMS):
        term = term * (-(2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * x)
        mag = fabs(term)
        if mag >= prev:
            break
        prev = mag
        if k % 2 == 0:
            p[0] += -term if (k // 2) % 2 else term
        else:
            q[0] += -term if ((k - 1) // 2) % 2 else term


cdef long double _j0_series(double x) noexcept nogil:
    cdef long double z = -(<long double>x) * x / 4.0
    cdef long double term = 1.0, total = 1.0
    cdef int k
    for k in range(1, SERIES_TERMS_J):
        term = term * z / (<long double>k * k)
        total += term
        if k > 4 and fabs(<double>term) < 1e-22:
            break
    return total


cdef double c_j0(double x) noexcept nogil:
    cdef double p, q, c, s
    if x <= J0Y0_CROSSOVER:
        return <double>_j0_series(x)
    _asym_pq(x, &p, &q)
    c = cos(x)
    s = sin(x)
    return sqrt(2.0 / (PI * x)) * (p * (c + s) - q * (s - c)) / sqrt(2.0)


cdef double c_y0(double x) noexcept nogil:
    cdef long double z, term, h, total, lead
    cdef double p, q, c, s
    cdef int k
    if x <= J0Y0_CROSSOVER:
        z = (<long double>x) * x / 4.0
        term = 1.0
        h = 0.0
        total = 0.0
        for k in range(1, SERIES_TERMS_J):
            term = -term * z / (<long double>k * k)
            h += 1.0 / (<long double>k)
            total -= h * term
            if k > 4 and fabs(<double>term) < 1e-23:
                break
        lead = (log(x / 2.0) + <long double>EULER_GAMMA) * _j0_series(x)
        return <double>((2.0 / <long double>PI) * (lead + total))
    _asym_pq(x, &p, &q)
    c = cos(x)
    s = sin(x)
    return sqrt(2.0 / (PI * x)) * (p * (s - c) + q * (c + s)) / sqrt(2.0)


cdef double c_i0(double x) noexcept nogil:
    cdef double z, term, total, prev
    cdef int k
    if x <= I0_CROSSOVER:
        z = x * x / 4.0
        term = 1.0
        total = 1.0
        for k in range(1, SERIES_TERMS_I):
            term = term * z / (<double>k * k)
            total += term
            if term < 1e-17 * total:
                break
        return total
    total = 1.0
    term = 1.0
    prev = INFINITY
    for k in range(1, ASYMPTOTIC_TERMS):
        term = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x)
        if term >= prev:
            break
        prev = term
        total += term
    return exp(x - 0.5 * log(2.0 * PI * x)) * total


cdef double c_k0e(double x) noexcept nogil:
    cdef double h = 0.6 / sqrt(x)
    cdef double total = 0.5, s
    cdef int j
    if h > 0.2:
        h = 0.2
    for j in range(1, TRAPEZOID_NODES):
        s = sinh(0.5 * j * h)
        s = exp(-2.0 * x * s * s)
        total += s
        if s < 1e-18:
            break
    return h * total


cdef double c_k0(double x) noexcept nogil:
    cdef long double z, term, i0s, h, tail
    cdef int k
    if x > K0_CROSSOVER:
        return c_k0e(x) * exp(-x)
    z = (<long double>x) * x / 4.0
    term = 1.0
    i0s = 1.0
    h = 0.0
    tail = 0.0
    for k in range(1, SERIES_TERMS_K):
        term = term * z / (<long double>k * k)
        h += 1.0 / (<long double>k)
        i0s += term
        tail += h * term
        if term < 1e-22:
            break
    return <double>(-(log(x / 2.0) + <long double>EULER_GAMMA) * i0s + tail)


def j0(double[::1] x):
    out = np.empty(x.shape[0])
    cdef double[::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(x.shape[0]):
            o[i] = c_j0(x[i])
    return out


def y0(double[::1] x):
    out = np.empty(x.shape[0])
    cdef double[::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(x.shape[0]):
            o[i] = c_y0(x[i])
    return out


def i0(double[::1] x):
    out = np.empty(x.shape[0])
    cdef double[::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(x.shape[0]):
            o[i] = c_i0(x[i])
    return out


def k0(double[::1] x):
    out = np.empty(x.shape[0])
    cdef double[::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(x.shape[0]):
            o[i] = c_k0(x[i])
    return out


def k0e(double[::1] x):
    out = np.empty(x.shape[0])
    cdef double[::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(x.shape[0]):
            o[i] = c_k0e(x[i])
    return out


# ---------------------------------------------------------------------------
# radial kernels of the particular solution (modified kind only)

cdef inline double _phi(double t, int rbf_kind, double c, double weight) noexcept nogil:
    cdef double s
    if rbf_kind == 0:
        return weight * exp(-c * t * t)
    if fabs(t) >= 1.0:
        return 0.0
    s = 1.0 - t * t
    return weight * s * s * s


cdef inline double _inner(double t, int dim, int rbf_kind, double c,
                          double weight, double mu) noexcept nogil:
    cdef double f = t * _phi(t, rbf_kind, c, weight)
    if dim == 2:
        return f * c_i0(mu * t)
    return f * sinh(mu * t)


cdef inline double _tail(double t, int dim, int rbf_kind, double c,
                         double weight, double mu) noexcept nogil:
    cdef double f = t * _phi(t, rbf_kind, c, weight)
    if dim == 2:
        if t <= 0.0:
            return 0.0
        return f * c_k0(mu * t)
    return f * exp(-mu * t)


cdef void _gk15(bint inner, double a, double b, int dim, int rbf_kind,
                double c, double weight, double mu,
                double* value, double* err) noexcept nogil:
    cdef double half = 0.5 * (b - a), mid = 0.5 * (b + a)
    cdef double kron = 0.0, gauss = 0.0, v, t
    cdef int i
    for i in range(15):
        t = mid + half * GK_X[i]
        if inner:
            v = _inner(t, dim, rbf_kind, c, weight, mu)
        else:
            v = _tail(t, dim, rbf_kind, c, weight, mu)
        kron += GK_W[i] * v
        gauss += G7_W[i] * v
    value[0] = half * kron
    err[0] = fabs(half * (kron - gauss))


cdef Py_ssize_t _locate(const double[::1] breaks, double r) noexcept nogil:
    # largest k with breaks[k] <= r, clipped to the last panel
    cdef Py_ssize_t lo = 0, hi = breaks.shape[0] - 1, mid
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if breaks[mid] <= r:
            lo = mid
        else:
            hi = mid
    return lo


def radial_integrals(double[::1] rho, double[::1] breaks, double[::1] inner_cum,
                     double[::1] tail_cum, int dim, int rbf_kind, double c,
                     double weight, double mu):
    cdef Py_ssize_t n = rho.shape[0], i, k
    cdef Py_ssize_t last = breaks.shape[0] - 1
    inner_out = np.empty(n)
    tail_out = np.empty(n)
    err_out = np.empty(n)
    cdef double[::1] pin = inner_out
    cdef double[::1] ptl = tail_out
    cdef double[::1] perr = err_out
    cdef double top = breaks[last], r, v1, e1, v2, e2
    with nogil:
        for i in range(n):
            r = rho[i]
            if r >= top:
                pin[i] = inner_cum[last]
                ptl[i] = 0.0
                perr[i] = 0.0
                continue
            k = _locate(breaks, r)
            _gk15(True, breaks[k], r, dim, rbf_kind, c, weight, mu, &v1, &e1)
            _gk15(False, r, breaks[k + 1], dim, rbf_kind, c, weight, mu, &v2, &e2)
            pin[i] = inner_cum[k] + v1
            ptl[i] = tail_cum[k + 1] + v2
            perr[i] = e1 if e1 > e2 else e2
    return inner_out, tail_out, err_out
