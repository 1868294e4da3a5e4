"""Composite 16-point Gauss-Legendre quadrature with panel-halving error control."""

import math

import numpy as np

from .errors import DivergenceError, QuadratureError

GL16_X, GL16_W = np.polynomial.legendre.leggauss(16)

# a panel whose error is at this level relative to int |f| is at roundoff
ROUNDOFF = 64 * np.finfo(float).eps
MAX_LIVE_PANELS = 1 << 18


def gauss_grid(edges):
    """Nodes and weights of GL16 on every panel [edges[i], edges[i+1]]."""
    edges = np.asarray(edges, dtype=float)
    return gauss_grid_pairs(edges[:-1], edges[1:])


def _panel_sums(f, a, b):
    m = 0.5 * (a + b)
    lo = np.concatenate([a, a, m])
    hi = np.concatenate([b, m, b])
    x, w = gauss_grid_pairs(lo, hi)
    vals = np.asarray(f(x), dtype=float)
    if vals.shape != x.shape:
        vals = np.broadcast_to(vals, x.shape)
    if not np.all(np.isfinite(vals)):
        raise QuadratureError("integrand is not finite on a quadrature node")
    sums = (vals * w).reshape(3, a.size, 16).sum(axis=2)
    mags = (np.abs(vals) * w).reshape(3, a.size, 16).sum(axis=2)
    coarse = sums[0]
    fine = sums[1] + sums[2]
    return fine, np.abs(fine - coarse), mags[1] + mags[2]


def gauss_grid_pairs(lo, hi):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = (mid[:, None] + half[:, None] * GL16_X[None, :]).ravel()
    weights = (half[:, None] * GL16_W[None, :]).ravel()
    return nodes, weights


def integrate_panels(f, edges, rtol=1e-12, atol=0.0, max_rounds=40, per_panel=False):
    """Integrate a vectorised ``f`` over the union of panels given by ``edges``.

    Each panel is evaluated with GL16 on the whole panel and on its two halves;
    the difference is the panel error.  Panels failing their share of the
    tolerance are bisected.  Returns ``(value, error_estimate)``, or arrays of
    per-panel values and errors when ``per_panel`` is set.
    """
    edges = np.asarray(edges, dtype=float)
    npan = max(edges.size - 1, 0)
    out_val = np.zeros(npan)
    out_err = np.zeros(npan)
    a, b = edges[:-1].copy(), edges[1:].copy()
    owner = np.arange(npan)
    live = b > a
    a, b, owner = a[live], b[live], owner[live]
    done_abs = 0.0
    n_done = 0
    for _ in range(max_rounds):
        if a.size == 0:
            break
        fine, err, mag = _panel_sums(f, a, b)
        abs_total = done_abs + float(np.abs(fine).sum())
        share = max(atol, rtol * abs_total) / (n_done + a.size)
        ok = (err <= share) | (err <= ROUNDOFF * mag)
        np.add.at(out_val, owner[ok], fine[ok])
        np.add.at(out_err, owner[ok], err[ok])
        done_abs += float(np.abs(fine[ok]).sum())
        n_done += int(ok.sum())
        if ok.all():
            break
        bad = ~ok
        if 2 * int(bad.sum()) > MAX_LIVE_PANELS:
            raise QuadratureError("adaptive quadrature needs too many panels")
        a_bad, b_bad, o_bad = a[bad], b[bad], owner[bad]
        m = 0.5 * (a_bad + b_bad)
        if np.any((m <= a_bad) | (m >= b_bad)):
            raise QuadratureError("panel bisection reached floating-point resolution")
        a = np.concatenate([a_bad, m])
        b = np.concatenate([m, b_bad])
        owner = np.concatenate([o_bad, o_bad])
    else:
        raise QuadratureError(f"adaptive quadrature did not converge in {max_rounds} rounds")
    if per_panel:
        return out_val, out_err
    order = np.argsort(np.abs(out_val), kind="stable")
    return math.fsum(out_val[order]), math.fsum(out_err)


def integrate_to_infinity(f, a, tail_bound, rtol=1e-12, atol=0.0, first_width=1.0,
                          max_doublings=1100):
    """Integrate ``f`` over [a, inf) on doubling panels.

    ``tail_bound(x)`` must bound |int_x^inf f|; integration stops once it falls
    under the tolerance.  The bound at the stopping point is added to the error.
    """
    total = 0.0
    err = 0.0
    lo = float(a)
    width = lo if lo > 0 else float(first_width)
    for _ in range(max_doublings // 8 + 1):
        edges = [lo]
        for _ in range(8):
            edges.append(edges[-1] + width)
            width *= 2.0
        v, e = integrate_panels(f, edges, rtol=rtol, atol=atol)
        total += v
        err += e
        lo = edges[-1]
        tb = float(tail_bound(lo))
        if math.isnan(tb) or tb == math.inf:
            raise DivergenceError(f"tail bound is infinite at {lo:g}")
        if tb <= max(atol, rtol * abs(total)) or not math.isfinite(lo):
            return total, err + tb
    raise DivergenceError("tail did not become negligible")
