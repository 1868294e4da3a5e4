"""Pure numpy implementations of the hot kernels.

This module is the reference the compiled ``_kernels`` extension mirrors; the
two are selected in :mod:`titchmarsh._backend` and must agree to rounding.

Conventions shared by both backends
-----------------------------------
``hyperbolic`` is 0 for R^n and 1 for H^n.  ``phi_pair_grid`` returns the
spherical function and ``1 - phi`` on the outer grid ``lam x t`` (shape
``(len(lam), len(t))``).  ``1 - phi`` is computed separately so that it keeps
full relative accuracy when ``phi`` is close to 1.
"""

import math

import numpy as np
from scipy.special import gamma as _gamma
from scipy.special import jv as _jv

GL16_X, GL16_W = np.polynomial.legendre.leggauss(16)

SERIES_EUCLID_Z = 1.0
SERIES_HYP_SINH2 = 0.25
SERIES_RATIO = 0.5
SERIES_MAX_TERMS = 80

_SQRT2_OVER_PI = math.sqrt(2.0) / math.pi


def in_series_region(hyperbolic, n, lam, t):
    rho = 0.5 * (n - 1) if hyperbolic else 0.0
    if not hyperbolic:
        return lam * t <= SERIES_EUCLID_Z
    s = np.sinh(np.minimum(t, 1.0)) ** 2
    return (t <= 1.0) & (s <= SERIES_HYP_SINH2) & (
        (lam * lam + rho * rho) * s / (2.0 * n) <= SERIES_RATIO
    )


def _series(hyperbolic, n, lam, t):
    """Hypergeometric series about t = 0.

    R^n:  phi = 0F1(; n/2; -(lam t)^2 / 4)
    H^n:  phi = 2F1((rho + i lam)/2, (rho - i lam)/2; n/2; -sinh(t)^2)
    Returns (phi, 1 - phi); the second is summed from k = 1 so it is exact in
    relative terms as t -> 0.
    """
    lam = np.asarray(lam, dtype=float)
    t = np.asarray(t, dtype=float)
    rho = 0.5 * (n - 1) if hyperbolic else 0.0
    half_n = 0.5 * n
    if hyperbolic:
        x = -np.sinh(t) ** 2
    else:
        x = -0.25 * (lam * t) ** 2
    term = np.ones_like(x)
    om = np.zeros_like(x)
    for k in range(SERIES_MAX_TERMS):
        if hyperbolic:
            num = (0.5 * rho + k) ** 2 + 0.25 * lam * lam
        else:
            num = 1.0
        term = term * x * num / ((half_n + k) * (k + 1))
        om = om - term
        if np.all(np.abs(term) <= 1e-18 * np.abs(om)):
            break
    return 1.0 - om, om


def _log_sinh(x):
    return x + np.log(-np.expm1(-2.0 * x)) - math.log(2.0)


def mehler_panels(lam, t):
    """Number of Gauss panels on [0, pi/2] for the H^2 integral (power of 2)."""
    lt = lam * t
    w = min(math.pi / 8.0, 0.5 * math.sqrt(4.0 * math.pi / t))
    if lt > 0:
        w = min(w, 6.0 / lt)
    m = int(math.ceil(0.5 * math.pi / w))
    return 1 << max(2, int(math.ceil(math.log2(m))))


def mehler_nodes(t, panels):
    """Nodes s_k = t sin(theta_k) and weights of the H^2 Mehler-Dirichlet rule.

    phi_lam(t) = sum_k W_k cos(lam s_k).
    """
    h = 0.5 * math.pi / panels
    mid = (np.arange(panels) + 0.5) * h
    th = (mid[:, None] + 0.5 * h * GL16_X[None, :]).ravel()
    wq = np.tile(0.5 * h * GL16_W, panels)
    s = np.sin(th)
    c = np.cos(th)
    a = 0.5 * t * (1.0 + s)
    b = t * c * c / (2.0 * (1.0 + s))
    g = t * c * np.exp(-0.5 * (_log_sinh(a) + _log_sinh(b) + math.log(2.0)))
    return t * s, _SQRT2_OVER_PI * wq * g


def _closed_form(hyperbolic, n, lam, t):
    z = lam * t
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        if not hyperbolic:
            if n == 1:
                return np.cos(z), 2.0 * np.sin(0.5 * z) ** 2
            if n == 3:
                phi = np.sin(z) / z
                return phi, 1.0 - phi
            nu = 0.5 * (n - 2)
            phi = _gamma(0.5 * n) * (2.0 / z) ** nu * _jv(nu, z)
            return phi, 1.0 - phi
        # H^3
        sh = np.sinh(t)
        phi = np.where(lam > 0, np.sin(z) / np.where(lam > 0, lam, 1.0) / sh, t / sh)
        phi = np.where(np.isfinite(sh), phi, 0.0)
        return phi, 1.0 - phi


def _mehler_column(lam, t):
    out = np.empty_like(lam)
    panels = np.array([mehler_panels(l, t) for l in lam])
    for p in np.unique(panels):
        idx = np.nonzero(panels == p)[0]
        s, w = mehler_nodes(t, int(p))
        for start in range(0, idx.size, 2048):
            blk = idx[start:start + 2048]
            out[blk] = np.cos(np.outer(lam[blk], s)) @ w
    return out


def phi_pair_grid(hyperbolic, n, lam, t):
    lam = np.ascontiguousarray(lam, dtype=float)
    t = np.ascontiguousarray(t, dtype=float)
    L, T = np.meshgrid(lam, t, indexing="ij")
    phi = np.empty_like(L)
    om = np.empty_like(L)
    ser = in_series_region(hyperbolic, n, L, T)
    if ser.any():
        phi[ser], om[ser] = _series(hyperbolic, n, L[ser], T[ser])
    rest = ~ser
    if rest.any():
        if hyperbolic and n == 2:
            for j in range(t.size):
                col = rest[:, j]
                if col.any():
                    v = _mehler_column(lam[col], t[j])
                    phi[col, j] = v
                    om[col, j] = 1.0 - v
        else:
            phi[rest], om[rest] = _closed_form(hyperbolic, n, L[rest], T[rest])
    return phi, om


def max_pair_ratio(v):
    """sup over i <= j of v[i] / v[j] by exhaustive pairwise scan."""
    v = np.ascontiguousarray(v, dtype=float)
    best = -np.inf
    block = 512
    for start in range(0, v.size, block):
        cols = v[start:start + block]
        rows = v[:start + cols.size]
        r = rows[:, None] / cols[None, :]
        i = np.arange(rows.size)[:, None]
        j = start + np.arange(cols.size)[None, :]
        r = np.where(i <= j, r, -np.inf)
        best = max(best, float(r.max()))
    return best
