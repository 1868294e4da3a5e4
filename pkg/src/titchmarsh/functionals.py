"""Lipschitz and Fourier-tail functionals of a radial profile, with diagnostics.

``L(t)^2 = int (1 - phi_lam(t))^2 H(lam) dmu(lam)`` is the spectral form of
``||S^t f - f||_2^2``; ``T(t) = int_{1/t}^inf H(lam) dlam`` uses the flat
measure.  Every value carries a quadrature error estimate.
"""

import csv
import enum
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError, InapplicableError, ParameterError, QuadratureError
from .modulus import mo_indices
from .profiles import RadialProfile
from .quadrature import gauss_grid_pairs, integrate_panels
from .spaces import truncation_radius

DEFAULT_RTOL = 1e-11
OSC_PERIODS = 1024
OSC_PERIODS_MEHLER = 64
FLAG_LEVEL = 1e-6


def _H(profile):
    return profile.H if isinstance(profile, RadialProfile) else profile


def density_power(space):
    """m with |c(lam)|^-2 <= lam^m, used by the analytic tail bounds."""
    if not space.is_hyperbolic:
        return space.n - 1
    return 1 if space.n == 2 else 2


@dataclass(frozen=True)
class Integral:
    """A quadrature result with its error estimate; ``float()`` gives the value."""

    value: float
    error: float

    def __float__(self):
        return float(self.value)

    def __add__(self, other):
        return Integral(self.value + other.value, self.error + other.error)


# -- panel layout ------------------------------------------------------------------

def _geometric_edges(a, b, H):
    """Edges on [a, b]: doubling from a (or from a small seed at 0), with the
    profile's breakpoints inserted and widths capped at its scale."""
    seed = min(b, 1.0, H.scale)
    pts = [a]
    x = a if a > 0 else seed
    if a == 0:
        # a few halvings below the seed keep the first panel well resolved
        pts.extend(seed * 2.0 ** -np.arange(6, 0, -1))
    while x < b:
        pts.append(x)
        x *= 2.0
    pts.append(b)
    pts.extend(p for p in H.breakpoints if a < p < b)
    pts = np.unique(np.asarray(pts, dtype=float))
    pts = pts[(pts >= a) & (pts <= b)]
    if math.isfinite(H.scale):
        out = [pts[0]]
        for lo, hi in zip(pts[:-1], pts[1:]):
            k = max(1, int(math.ceil((hi - lo) / H.scale)))
            k = min(k, 4096)
            out.extend(np.linspace(lo, hi, k + 1)[1:])
        pts = np.asarray(out)
    return pts


def spectral_integral(space, profile, a=0.0, b=math.inf, weight=None, weight_bound=1.0,
                      weight_power=0.0, flat=False, rtol=DEFAULT_RTOL):
    """int_a^b H(lam) w(lam) dmu(lam) (or dlam when ``flat``).

    ``weight_bound * lam**weight_power`` must dominate |w| for the tail bound.
    """
    H = _H(profile)
    lo = max(a, H.support[0])
    hi = min(b, H.support[1])
    if not lo < hi:
        return Integral(0.0, 0.0)
    m = weight_power + (0 if flat else density_power(space))

    def f(lam):
        v = H(lam)
        if weight is not None:
            v = v * weight(lam)
        return v if flat else v * space.density_shape(lam)

    if math.isfinite(hi):
        v, e = integrate_panels(f, _geometric_edges(lo, hi, H), rtol=rtol, atol=1e-300)
        return Integral(v, e)

    # finite head through the breakpoints, then doubling chunks to infinity
    head_end = max([lo * 2.0 if lo > 0 else 1.0] + [p * 2.0 for p in H.breakpoints if p >= lo])
    v, e = integrate_panels(f, _geometric_edges(lo, head_end, H), rtol=rtol, atol=1e-300)
    total, err = v, e
    x = head_end
    for _ in range(160):
        tb = weight_bound * float(H.tail_bound(x, m))
        if not math.isfinite(tb):
            raise DivergenceError(f"H is not integrable against lam^{m:g} (tail bound infinite)")
        if tb <= rtol * abs(total) or tb == 0.0:
            return Integral(total, err + tb)
        edges = _geometric_edges(x, 256.0 * x, H)
        v, e = integrate_panels(f, edges, rtol=rtol, atol=1e-300)
        total += v
        err += e
        x = edges[-1]
    tb = weight_bound * float(H.tail_bound(x, m))
    if tb <= 1e-8 * abs(total) or tb == 0.0:
        return Integral(total, err + tb)
    raise DivergenceError("spectral integral did not converge")


def oscillation_periods(space):
    return OSC_PERIODS_MEHLER if (space.is_hyperbolic and space.n == 2) else OSC_PERIODS


def lipschitz_piece(space, profile, t, a=0.0, b=math.inf, rtol=DEFAULT_RTOL, periods=None):
    """int_a^b (1 - phi_lam(t))^2 H dmu.

    Panels double up to the quarter period pi/(2t), then run at that width
    for ``periods`` full periods; beyond, (1 - phi)^2 is replaced by its local
    mean 1 + <phi^2>, with the neglected oscillation bounded separately.
    """
    if t <= 0:
        raise ParameterError("t must be positive")
    H = _H(profile)
    lo = max(a, H.support[0])
    hi = min(b, H.support[1])
    if not lo < hi:
        return Integral(0.0, 0.0)
    m = density_power(space)
    q = 0.5 * math.pi / t
    periods = periods or oscillation_periods(space)

    def f(lam):
        _, om = space.phi_grid(lam, [t])
        return om[:, 0] ** 2 * H(lam) * space.density_shape(lam)

    total = err = 0.0
    x = lo
    g_end = min(q, hi)
    if x < g_end:
        v, e = integrate_panels(f, _geometric_edges(x, g_end, H), rtol=rtol, atol=1e-300)
        total, err, x = v, e, g_end
    osc_end = min(hi, max(x, q) + 2.0 * math.pi * periods / t)
    step = min(q, H.scale)
    while x < osc_end:
        edges = np.minimum(x + step * np.arange(65), osc_end)
        edges = np.unique(np.concatenate([edges, [p for p in H.breakpoints if edges[0] < p < edges[-1]]]))
        v, e = integrate_panels(f, edges, rtol=rtol, atol=1e-300)
        total += v
        err += e
        x = float(edges[-1])
        if not math.isfinite(hi):
            tb = 4.0 * float(H.tail_bound(x, m))
            if not math.isfinite(tb):
                raise DivergenceError("H is not integrable against the Plancherel density")
            if tb <= rtol * abs(total) or tb == 0.0:
                return Integral(total, err + tb)
    if x >= hi:
        return Integral(total, err)

    def mean_square(lam):
        return 1.0 + space.phi_square_mean(lam, t)

    tail = spectral_integral(space, H, x, hi, weight=mean_square, weight_bound=1.5, rtol=rtol)
    # the dropped terms -2 phi and phi^2 - <phi^2> oscillate with frequency t
    # and 2t; one integration by parts bounds them by amplitude * g(x) / t
    xa = np.array([x])
    g = float(H(xa)[0] * space.density_shape(xa)[0])
    msq = float(np.broadcast_to(space.phi_square_mean(xa, t), xa.shape)[0])
    amp = math.sqrt(2.0 * msq)
    osc = g * (4.0 * amp + msq) / t
    return Integral(total + tail.value, err + tail.error + osc)


# -- curves ------------------------------------------------------------------------

class CurveKind(str, enum.Enum):
    LIPSCHITZ = "lipschitz"
    TAIL = "tail"
    WEIGHTED_TAIL = "weighted_tail"
    PHYSICAL_LIPSCHITZ = "physical_lipschitz"


def dyadic_grid(t_max, J):
    if not t_max > 0:
        raise ParameterError("t_max must be positive")
    if J < 0:
        raise ParameterError("J must be nonnegative")
    return t_max * 2.0 ** -np.arange(J + 1, dtype=float)


@dataclass(frozen=True)
class FunctionalCurve:
    t_values: np.ndarray
    values: np.ndarray
    errors: np.ndarray
    kind: str
    flagged: np.ndarray = field(default=None)

    def __post_init__(self):
        for name in ("t_values", "values", "errors"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if np.any(~np.isfinite(self.values)) or np.any(self.values < 0):
            raise QuadratureError(f"{self.kind} curve has negative or non-finite values")
        object.__setattr__(self, "flagged", self.errors > FLAG_LEVEL * (1.0 + self.values))

    @property
    def j(self):
        return np.arange(self.t_values.size)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["j", "t", "value", "est_error", "kind"])
        for j, t, v, e in zip(self.j, self.t_values, self.values, self.errors):
            w.writerow([int(j), format(t, ".17g"), format(v, ".17g"), format(e, ".17g"), self.kind])
        return buf.getvalue()


def _curve(kind, t_grid, fn):
    t = np.asarray(t_grid, dtype=float)
    res = [fn(float(tj)) for tj in t]
    return FunctionalCurve(t, [r.value for r in res], [r.error for r in res], kind)


def lipschitz_squared(space, profile, t, rtol=DEFAULT_RTOL):
    return lipschitz_piece(space, profile, t, rtol=rtol)


def lipschitz_value(space, profile, t, rtol=DEFAULT_RTOL):
    sq = lipschitz_squared(space, profile, t, rtol)
    v = math.sqrt(max(sq.value, 0.0))
    # d sqrt(x) = dx / (2 sqrt(x)), capped by sqrt(dx) near zero
    e = min(sq.error / (2.0 * v), math.sqrt(sq.error)) if v > 0 else math.sqrt(sq.error)
    return Integral(v, e)


def lipschitz_curve(space, profile, t_grid, rtol=DEFAULT_RTOL):
    """L(t) = ||S^t f - f||_2 on each grid point, through the Plancherel identity."""
    return _curve(CurveKind.LIPSCHITZ.value, t_grid, lambda t: lipschitz_value(space, profile, t, rtol))


def tail_value(space, profile, t, rtol=DEFAULT_RTOL):
    if t <= 0:
        raise ParameterError("t must be positive")
    return spectral_integral(space, profile, 1.0 / t, flat=True, rtol=rtol)


def tail_curve(space, profile, t_grid, rtol=DEFAULT_RTOL):
    """T(t) = int_{1/t}^inf H dlam."""
    return _curve(CurveKind.TAIL.value, t_grid, lambda t: tail_value(space, profile, t, rtol))


def weighted_tail(space, profile, t, rtol=DEFAULT_RTOL):
    """int_{1/t}^inf H dmu."""
    if t <= 0:
        raise ParameterError("t must be positive")
    return spectral_integral(space, profile, 1.0 / t, rtol=rtol)


def weighted_tail_curve(space, profile, t_grid, rtol=DEFAULT_RTOL):
    return _curve(CurveKind.WEIGHTED_TAIL.value, t_grid,
                  lambda t: weighted_tail(space, profile, t, rtol))


# -- proof diagnostics -------------------------------------------------------------

@dataclass(frozen=True)
class DyadicSum:
    sum: float
    bound_constant: float
    partial: float
    tail_estimate: float
    exponent: float


def dyadic_sum_check(m, t, J=32):
    """sum_j omega(t/2^j)^2 over j >= 0, closed by a geometric tail.

    The tail beyond J uses omega(s) <= omega(t_J) (s/t_J)^delta with delta the
    measured lower index, which bounds the remaining terms by a geometric series.
    """
    if not 0 < t <= m.delta0:
        raise ParameterError("t must lie in (0, delta0]")
    if J < 8:
        raise ParameterError("J must be at least 8")
    idx = mo_indices(m)
    delta = idx.m_lower
    if delta <= 0.05:
        raise InapplicableError(f"lower index {delta:.3g} <= 0.05: geometric decay not certified")
    terms = np.asarray(m(t * 2.0 ** -np.arange(J, dtype=float)), dtype=float) ** 2
    partial = math.fsum(terms)
    last = float(m(t * 2.0 ** -J)) ** 2
    q = 4.0 ** -delta
    tail = last / (1.0 - q)
    total = partial + tail
    return DyadicSum(total, total / float(m(t)) ** 2, partial, tail, delta)


@dataclass(frozen=True)
class JSplit:
    t: float
    J1: float
    J2: float
    J1_error: float
    J2_error: float

    @property
    def total(self):
        return self.J1 + self.J2


def j_split(space, profile, t, rtol=DEFAULT_RTOL):
    """J1 = int_0^{1/t} (1-phi)^2 H dmu and J2 = the rest."""
    a = lipschitz_piece(space, profile, t, 0.0, 1.0 / t, rtol)
    b = lipschitz_piece(space, profile, t, 1.0 / t, math.inf, rtol)
    return JSplit(t, a.value, b.value, a.error, b.error)


@dataclass(frozen=True)
class KSplit:
    t: float
    K1: float
    K2: float
    K1_error: float
    K2_error: float


def k_split(space, profile, t, rtol=DEFAULT_RTOL):
    """K1 = t^4 int_0^{1/t} lam^4 H dmu, K2 = t^4 rho^4 int_0^{1/t} H dmu."""
    if t <= 0:
        raise ParameterError("t must be positive")
    x = 1.0 / t
    k1 = spectral_integral(space, profile, 0.0, x, weight=lambda l: l ** 4, weight_power=4, rtol=rtol)
    t4 = t ** 4
    rho4 = space.rho ** 4
    if rho4 == 0:
        return KSplit(t, t4 * k1.value, 0.0, t4 * k1.error, 0.0)
    k2 = spectral_integral(space, profile, 0.0, x, rtol=rtol)
    return KSplit(t, t4 * k1.value, t4 * rho4 * k2.value, t4 * k1.error, t4 * rho4 * k2.error)


def aux_tail_phi(space, profile, s, rtol=DEFAULT_RTOL):
    """phi(s) = int_s^inf H dmu."""
    if s < 0:
        raise ParameterError("s must be nonnegative")
    return spectral_integral(space, profile, s, rtol=rtol)


class _AuxTail:
    """Vectorised s -> int_s^inf H dmu on [0, X], built once from panel sums."""

    def __init__(self, space, H, X, rtol):
        self.space, self.H = space, H
        self.edges = _geometric_edges(0.0, X, H)
        vals, errs = integrate_panels(self._g, self.edges, rtol=rtol, atol=1e-300, per_panel=True)
        self.beyond = aux_tail_phi(space, H, X, rtol)
        # suffix[i] = int_{edges[i]}^inf
        self.suffix = np.concatenate([np.cumsum(vals[::-1])[::-1], [0.0]]) + self.beyond.value
        self.error = float(np.sum(errs)) + self.beyond.error

    def _g(self, lam):
        return self.H(lam) * self.space.density_shape(lam)

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        i = np.clip(np.searchsorted(self.edges, s, side="right") - 1, 0, self.edges.size - 2)
        right = self.edges[i + 1]
        # int_s^{right}: four GL16 sub-panels per point
        k = 4
        lo = s[:, None] + (right - s)[:, None] * np.arange(k)[None, :] / k
        hi = lo + ((right - s) / k)[:, None]
        x, w = gauss_grid_pairs(lo.ravel(), hi.ravel())
        part = (self._g(x) * w).reshape(s.size, -1).sum(axis=1)
        return self.suffix[i + 1] + part


@dataclass(frozen=True)
class IBPCheck:
    t: float
    direct: float
    by_parts: float
    rel_error: float


def aux_ibp_check(space, profile, t, rtol=DEFAULT_RTOL):
    """int_0^X s^4 H dmu against 4 int_0^X s^3 phi(s) ds - X^4 phi(X), X = 1/t."""
    H = _H(profile)
    X = 1.0 / t
    direct = spectral_integral(space, H, 0.0, X, weight=lambda l: l ** 4, weight_power=4, rtol=rtol)
    # phi vanishes past the support, so the s-integral stops there
    top = min(X, H.support[1])
    aux = _AuxTail(space, H, top, rtol)
    inner, _ = integrate_panels(lambda s: s ** 3 * aux(s), _geometric_edges(0.0, top, H),
                                rtol=rtol, atol=1e-300)
    by_parts = 4.0 * inner - (X ** 4 * aux.beyond.value if top == X else 0.0)
    scale = max(abs(direct.value), abs(by_parts))
    rel = abs(direct.value - by_parts) / scale if scale > 0 else 0.0
    return IBPCheck(t, direct.value, by_parts, rel)


# -- physical route ----------------------------------------------------------------

_N2_ANGLES = 128
_N3_PANELS = 4


def physical_lipschitz(space, profile, t, rtol=1e-8):
    """||S^t f - f||_2 by quadrature in physical space (Euclidean n <= 3).

    The sphere average of f(sqrt(r^2 + t^2 + 2 r t c)) - f(r) uses the
    profile's cancellation-free increment; the radial integral is adaptive.
    """
    if not isinstance(profile, RadialProfile) or profile.physical is None:
        raise InapplicableError("the physical route needs a physical profile")
    if space.is_hyperbolic or space.n not in (1, 2, 3):
        raise InapplicableError("the physical route is implemented for R^1, R^2, R^3")
    f = profile.physical
    n = space.n
    if n == 1:
        cs, cw = np.array([-1.0, 1.0]), np.array([0.5, 0.5])
    elif n == 2:
        th = np.linspace(0.0, math.pi, _N2_ANGLES + 1)
        cw = np.full(th.size, 1.0 / _N2_ANGLES)
        cw[[0, -1]] *= 0.5
        cs = np.cos(th)
    else:
        cs, cw = gauss_grid_pairs(np.linspace(-1, 1, _N3_PANELS + 1)[:-1],
                                  np.linspace(-1, 1, _N3_PANELS + 1)[1:])
        cw = 0.5 * cw

    def diff(r):
        d = t * t + 2.0 * t * r[:, None] * cs[None, :]
        inc = f.increment(np.broadcast_to(r[:, None], d.shape), d)
        return inc @ cw

    R = truncation_radius(space, f, 1e-18) + t
    v, e = integrate_panels(lambda r: diff(r) ** 2 * space.area_shape(r),
                            np.linspace(0.0, R, 33), rtol=rtol, atol=1e-300)
    sq = space.sphere_area * v
    val = math.sqrt(max(sq, 0.0))
    return Integral(val, space.sphere_area * e / (2.0 * val) if val > 0 else 0.0)


def physical_lipschitz_curve(space, profile, t_grid, rtol=1e-8):
    return _curve(CurveKind.PHYSICAL_LIPSCHITZ.value, t_grid,
                  lambda t: physical_lipschitz(space, profile, t, rtol))
