# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: spherical functions on (lambda, t) grids, pair-ratio scan.

Mirrors titchmarsh._purepy; see that module for the conventions.
"""

import numpy as np

from libc.math cimport (M_PI, ceil, cos, exp, expm1, fabs, log, log2, sin,
                        sinh, sqrt, tgamma, isfinite, INFINITY)
from libc.stdlib cimport free, malloc
from scipy.special.cython_special cimport jv

cdef double GLX[16]
cdef double GLW[16]

_x, _w = np.polynomial.legendre.leggauss(16)
for _i in range(16):
    GLX[_i] = _x[_i]
    GLW[_i] = _w[_i]

cdef double SERIES_EUCLID_Z = 1.0
cdef double SERIES_HYP_SINH2 = 0.25
cdef double SERIES_RATIO = 0.5
cdef int SERIES_MAX_TERMS = 80
cdef double SQRT2_OVER_PI = sqrt(2.0) / M_PI
cdef double LOG2 = log(2.0)


cdef inline bint _in_series(int hyperbolic, int n, double lam, double t) nogil:
    cdef double rho, s
    if not hyperbolic:
        return lam * t <= SERIES_EUCLID_Z
    if t > 1.0:
        return False
    rho = 0.5 * (n - 1)
    s = sinh(t)
    s = s * s
    return s <= SERIES_HYP_SINH2 and (lam * lam + rho * rho) * s / (2.0 * n) <= SERIES_RATIO


cdef inline void _series(int hyperbolic, int n, double lam, double t,
                         double* phi, double* om) nogil:
    cdef double rho = 0.5 * (n - 1) if hyperbolic else 0.0
    cdef double half_n = 0.5 * n
    cdef double x, term = 1.0, acc = 0.0, num, sh
    cdef int k
    if hyperbolic:
        sh = sinh(t)
        x = -sh * sh
    else:
        x = -0.25 * (lam * t) * (lam * t)
    for k in range(SERIES_MAX_TERMS):
        if hyperbolic:
            num = (0.5 * rho + k) * (0.5 * rho + k) + 0.25 * lam * lam
        else:
            num = 1.0
        term = term * x * num / ((half_n + k) * (k + 1))
        acc = acc - term
        if fabs(term) <= 1e-18 * fabs(acc):
            break
    phi[0] = 1.0 - acc
    om[0] = acc


cdef inline void _closed(int hyperbolic, int n, double lam, double t,
                         double gam, double* phi, double* om) nogil:
    cdef double z = lam * t, nu, sh, s
    if not hyperbolic:
        if n == 1:
            s = sin(0.5 * z)
            phi[0] = cos(z)
            om[0] = 2.0 * s * s
            return
        if n == 3:
            phi[0] = sin(z) / z
        else:
            nu = 0.5 * (n - 2)
            phi[0] = gam * (2.0 / z) ** nu * jv(nu, z)
        om[0] = 1.0 - phi[0]
        return
    sh = sinh(t)
    if not isfinite(sh):
        phi[0] = 0.0
    elif lam > 0:
        phi[0] = sin(z) / lam / sh
    else:
        phi[0] = t / sh
    om[0] = 1.0 - phi[0]


cdef inline double _log_sinh(double x) nogil:
    return x + log(-expm1(-2.0 * x)) - LOG2


cdef int _mehler_panels(double lam, double t) nogil:
    cdef double lt = lam * t
    cdef double w = M_PI / 8.0
    cdef double w2 = 0.5 * sqrt(4.0 * M_PI / t)
    cdef int m, p
    if w2 < w:
        w = w2
    if lt > 0 and 6.0 / lt < w:
        w = 6.0 / lt
    m = <int>ceil(0.5 * M_PI / w)
    p = <int>ceil(log2(<double>m))
    if p < 2:
        p = 2
    return 1 << p


cdef void _mehler_nodes(double t, int panels, double* s_out, double* w_out) nogil:
    cdef double h = 0.5 * M_PI / panels
    cdef double mid, th, s, c, a, b, g
    cdef int p, q, k
    for p in range(panels):
        mid = (p + 0.5) * h
        for q in range(16):
            k = p * 16 + q
            th = mid + 0.5 * h * GLX[q]
            s = sin(th)
            c = cos(th)
            a = 0.5 * t * (1.0 + s)
            b = t * c * c / (2.0 * (1.0 + s))
            g = t * c * exp(-0.5 * (_log_sinh(a) + _log_sinh(b) + LOG2))
            s_out[k] = t * s
            w_out[k] = SQRT2_OVER_PI * 0.5 * h * GLW[q] * g


def phi_pair_grid(int hyperbolic, int n, lam, t):
    cdef double[::1] lv = np.ascontiguousarray(lam, dtype=float)
    cdef double[::1] tv = np.ascontiguousarray(t, dtype=float)
    cdef Py_ssize_t nl = lv.shape[0], nt = tv.shape[0]
    phi_arr = np.empty((nl, nt))
    om_arr = np.empty((nl, nt))
    cdef double[:, ::1] phi = phi_arr
    cdef double[:, ::1] om = om_arr
    cdef long[::1] order = np.argsort(lam, kind="stable").astype(np.int_)
    cdef double gam = tgamma(0.5 * n)
    cdef Py_ssize_t i, j, ii, k, nodes
    cdef int panels, cur_panels
    cdef double tt, ll, acc
    cdef double* s_buf = NULL
    cdef double* w_buf = NULL
    cdef bint mehler = hyperbolic and n == 2
    with nogil:
        for j in range(nt):
            tt = tv[j]
            cur_panels = -1
            for ii in range(nl):
                i = order[ii]
                ll = lv[i]
                if _in_series(hyperbolic, n, ll, tt):
                    _series(hyperbolic, n, ll, tt, &phi[i, j], &om[i, j])
                elif not mehler:
                    _closed(hyperbolic, n, ll, tt, gam, &phi[i, j], &om[i, j])
                else:
                    panels = _mehler_panels(ll, tt)
                    if panels != cur_panels:
                        free(s_buf)
                        free(w_buf)
                        s_buf = <double*>malloc(16 * panels * sizeof(double))
                        w_buf = <double*>malloc(16 * panels * sizeof(double))
                        _mehler_nodes(tt, panels, s_buf, w_buf)
                        cur_panels = panels
                    nodes = 16 * panels
                    acc = 0.0
                    for k in range(nodes):
                        acc = acc + w_buf[k] * cos(ll * s_buf[k])
                    phi[i, j] = acc
                    om[i, j] = 1.0 - acc
        free(s_buf)
        free(w_buf)
    return phi_arr, om_arr


def max_pair_ratio(v):
    cdef double[::1] vv = np.ascontiguousarray(v, dtype=float)
    cdef Py_ssize_t n = vv.shape[0], i, j
    cdef double best = -INFINITY, r
    with nogil:
        for j in range(n):
            for i in range(j + 1):
                r = vv[i] / vv[j]
                if r > best:
                    best = r
    return best
