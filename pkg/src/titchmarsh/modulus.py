"""k-th order moduli of continuity and their classification.

A modulus is an abstract gauge ``omega`` on ``[0, delta0]`` extended by the
constant ``W`` beyond ``delta0``.  The classification routines decide almost
monotonicity, the two Zygmund conditions, the Matuszewska-Orlicz indices and
the tail assumptions on ``[delta0, inf)``.

The logarithmic families are shifted so that they are positive on the whole
of ``(0, delta0]``::

    power_log     t**gamma * (1 + log(delta0 / t))**lam
    power_loglog  t**gamma * (1 + log(1 + log(delta0 / t)))**lam
"""

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _backend
from .errors import (
    ConfigError,
    DegenerateModulusError,
    DomainError,
    InvalidExtensionError,
    InvalidPromotionError,
    NonConvergenceError,
    ParameterError,
)
from .quadrature import integrate_panels

MIN_TABULATED_SAMPLES = 64


class Family(str, enum.Enum):
    POWER = "power"
    POWER_LOG = "power_log"
    POWER_LOGLOG = "power_loglog"
    TABULATED = "tabulated"


class ZygmundKind(str, enum.Enum):
    Z0 = "Z0"
    ZK = "Zk"


@dataclass(frozen=True)
class Modulus:
    family: Family
    gamma: float = 0.0
    log_exponent: float = 0.0
    order_k: float = 1.0
    delta0: float = 1.0
    W: float = None
    samples: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not self.order_k > 0:
            raise ParameterError("order_k must be positive")
        if not self.delta0 > 0:
            raise ParameterError("delta0 must be positive")
        if self.family is Family.TABULATED:
            if self.samples is None or len(self.samples) < 2:
                raise ParameterError("tabulated modulus needs at least two samples")
            pts = np.array(self.samples, dtype=float)
            if pts.ndim != 2 or pts.shape[1] != 2:
                raise ParameterError("samples must be (t, omega) pairs")
            if np.any(np.diff(pts[:, 0]) <= 0) or pts[0, 0] <= 0:
                raise ParameterError("sample abscissae must be positive and increasing")
            if np.any(pts[:, 1] <= 0):
                raise ParameterError("tabulated omega values must be positive")
            object.__setattr__(self, "samples", tuple(map(tuple, pts.tolist())))
        else:
            if self.gamma < 0 or (self.gamma == 0 and self.log_exponent >= 0):
                raise ParameterError("omega(0) = 0 needs gamma > 0, or gamma = 0 with a negative log exponent")
        if self.W is None:
            top = self.delta0
            if self.family is Family.TABULATED:
                top = min(self.delta0, self.samples[-1][0])
            object.__setattr__(self, "W", float(self._core(np.array([top]))[0]))

    # -- evaluation ---------------------------------------------------------

    def _core(self, t):
        fam = self.family
        if fam is Family.POWER:
            return t ** self.gamma
        if fam is Family.POWER_LOG:
            return t ** self.gamma * (1.0 + np.log(self.delta0 / t)) ** self.log_exponent
        if fam is Family.POWER_LOGLOG:
            return t ** self.gamma * (1.0 + np.log1p(np.log(self.delta0 / t))) ** self.log_exponent
        pts = np.asarray(self.samples)
        lo, hi = pts[0, 0], pts[-1, 0]
        if np.any((t < lo) | (t > hi)):
            raise DomainError(f"t outside tabulated hull [{lo:g}, {hi:g}]")
        return np.exp(np.interp(np.log(t), np.log(pts[:, 0]), np.log(pts[:, 1])))

    def eval(self, t):
        """omega(t), with omega(0) = 0 and omega = W beyond delta0."""
        arr = np.asarray(t, dtype=float)
        if np.any(arr < 0) or np.any(np.isnan(arr)):
            raise DomainError("modulus evaluated at negative t")
        flat = np.atleast_1d(arr).ravel()
        out = np.zeros_like(flat)
        inner = (flat > 0) & (flat <= self.delta0)
        out[flat > self.delta0] = self.W
        if inner.any():
            out[inner] = self._core(flat[inner])
        out = out.reshape(np.shape(arr))
        return float(out) if arr.ndim == 0 else out

    __call__ = eval

    @property
    def hull(self):
        """Interval of (0, delta0] on which the modulus is defined by data."""
        if self.family is Family.TABULATED:
            return self.samples[0][0], min(self.samples[-1][0], self.delta0)
        return 0.0, self.delta0

    # -- (de)serialisation ----------------------------------------------------

    _KEYS = {"family", "gamma", "lambda", "k", "delta0", "W", "samples"}

    @classmethod
    def from_dict(cls, d, path="modulus"):
        if not isinstance(d, dict):
            raise ConfigError(f"{path}: expected an object")
        unknown = set(d) - cls._KEYS
        if unknown:
            raise ConfigError(f"{path}.{sorted(unknown)[0]}: unknown field")
        if "family" not in d:
            raise ConfigError(f"{path}.family: missing required field")
        try:
            fam = Family(d["family"])
        except ValueError:
            raise ConfigError(f"{path}.family: unknown family {d['family']!r}") from None
        need = {
            Family.POWER: ["gamma"],
            Family.POWER_LOG: ["gamma", "lambda"],
            Family.POWER_LOGLOG: ["gamma", "lambda"],
            Family.TABULATED: ["samples"],
        }[fam]
        for key in need:
            if key not in d:
                raise ConfigError(f"{path}.{key}: missing required field")
        try:
            return cls(
                family=fam,
                gamma=float(d.get("gamma", 0.0)),
                log_exponent=float(d.get("lambda", 0.0)),
                order_k=float(d.get("k", 1.0)),
                delta0=float(d.get("delta0", 1.0)),
                W=None if d.get("W") is None else float(d["W"]),
                samples=None if "samples" not in d else tuple(tuple(p) for p in d["samples"]),
            )
        except ParameterError as exc:
            raise ConfigError(f"{path}: {exc}") from None

    def to_dict(self):
        d = {"family": self.family.value, "k": self.order_k, "delta0": self.delta0, "W": self.W}
        if self.family is Family.TABULATED:
            d["samples"] = [list(p) for p in self.samples]
        else:
            d["gamma"] = self.gamma
            if self.family is not Family.POWER:
                d["lambda"] = self.log_exponent
        return d


def power(gamma, k=1.0, delta0=1.0, W=None):
    return Modulus(Family.POWER, gamma=gamma, order_k=k, delta0=delta0, W=W)


def power_log(gamma, lam, k=1.0, delta0=1.0, W=None):
    return Modulus(Family.POWER_LOG, gamma=gamma, log_exponent=lam, order_k=k, delta0=delta0, W=W)


def power_loglog(gamma, lam, k=1.0, delta0=1.0, W=None):
    return Modulus(Family.POWER_LOGLOG, gamma=gamma, log_exponent=lam, order_k=k, delta0=delta0, W=W)


def tabulated(samples, k=1.0, delta0=1.0, W=None):
    return Modulus(Family.TABULATED, samples=tuple(samples), order_k=k, delta0=delta0, W=W)


def promote_order(m, new_k):
    """The same gauge viewed as a modulus of order ``new_k >= m.order_k``."""
    if new_k < m.order_k:
        raise InvalidPromotionError(f"cannot lower the order from {m.order_k} to {new_k}")
    return replace(m, order_k=float(new_k))


def _require_samples(m):
    if m.family is Family.TABULATED and len(m.samples) < MIN_TABULATED_SAMPLES:
        raise ParameterError(
            f"classification needs at least {MIN_TABULATED_SAMPLES} samples, got {len(m.samples)}"
        )


# -- almost monotonicity ------------------------------------------------------

@dataclass(frozen=True)
class MonotonicityReport:
    is_almost_increasing: bool
    constant_up: float
    is_ratio_almost_decreasing: bool
    constant_down: float
    exponent_tested: float

    def to_dict(self):
        return dict(self.__dict__)


def _log_grid(m, n, decades):
    lo, hi = m.hull
    if lo == 0.0:
        lo = hi * 10.0 ** (-decades)
    return np.geomspace(lo, hi, n)


def _monotone_constants(t, v, exponent, exhaustive):
    if np.any(v <= 0):
        bad = t[np.argmax(v <= 0)]
        raise DegenerateModulusError(f"modulus vanishes at interior point t={bad:g}")
    r = v / t ** exponent
    if exhaustive:
        up = _backend.max_pair_ratio(v)
        down = _backend.max_pair_ratio(1.0 / r)
    else:
        # sup_{s <= u} v(s)/v(u) is the running maximum over the running value
        up = float(np.max(np.maximum.accumulate(v) / v))
        down = float(np.max(r / np.minimum.accumulate(r)))
    return max(1.0, up), max(1.0, down)


def check_monotonicity(m, grid_size=8192, ratio_exponent=None, exhaustive=False, decades=12):
    """Almost-increase of omega and almost-decrease of omega / t**exponent.

    Constants are suprema of the defining ratios over all ordered pairs of a
    log-spaced grid.  A property is declared to hold when its constant is
    stable (< 10 % growth) when the grid is pushed ``decades`` further
    towards 0.  ``exhaustive`` switches to the O(N^2) pairwise scan.
    """
    if grid_size < 16:
        raise ParameterError("grid_size must be at least 16")
    _require_samples(m)
    exponent = m.order_k if ratio_exponent is None else float(ratio_exponent)
    t = _log_grid(m, grid_size, decades)
    up, down = _monotone_constants(t, m.eval(t), exponent, exhaustive)
    if m.family is Family.TABULATED:
        up_x, down_x = up, down
    else:
        tx = _log_grid(m, grid_size, 2 * decades)
        up_x, down_x = _monotone_constants(tx, m.eval(tx), exponent, exhaustive)
    return MonotonicityReport(
        is_almost_increasing=bool(np.isfinite(up) and up_x <= 1.1 * up),
        constant_up=up,
        is_ratio_almost_decreasing=bool(np.isfinite(down) and down_x <= 1.1 * down),
        constant_down=down,
        exponent_tested=exponent,
    )


# -- Matuszewska-Orlicz indices -----------------------------------------------

DEFAULT_EPS_GRID = tuple(2.0 ** (-32 * j) for j in range(1, 31))
DEFAULT_MO_T_GRID = tuple(2.0 ** (-j) for j in range(8, 0, -1)) + tuple(2.0 ** j for j in range(1, 9))
MO_CONVERGED = 0.01
MO_BAND = 0.05


@dataclass(frozen=True)
class MOIndices:
    m_lower: float
    M_upper: float
    eps_grid: tuple
    t_grid: tuple
    converged: bool = True

    def to_dict(self):
        return {"m_lower": self.m_lower, "M_upper": self.M_upper, "converged": self.converged,
                "eps_grid": list(self.eps_grid), "t_grid": list(self.t_grid)}


def _index_at(m, t, eps, tail):
    eps = eps[eps * max(t, 1.0) <= m.hull[1]]
    if m.family is Family.TABULATED:
        eps = eps[eps * min(t, 1.0) >= m.hull[0]]
    num = m.eval(eps * t)
    den = m.eval(eps)
    ok = (num > 1e-290) & (den > 1e-290)
    ratio = num[ok] / den[ok]
    if ratio.size < tail + 1:
        raise NonConvergenceError(f"too few usable eps values at t={t:g}")
    cur = math.log(np.max(ratio[-tail:])) / math.log(t)
    prev = math.log(np.max(ratio[-tail - 1:-1])) / math.log(t)
    return cur, prev


def _default_eps(m):
    if m.family is not Family.TABULATED:
        return np.array(DEFAULT_EPS_GRID)
    lo, hi = m.hull
    return np.geomspace(hi * 2.0 ** -9, lo * 2.0 ** 9, 16)


def mo_indices(m, eps_grid=None, t_grid=None, tail=3):
    """Lower and upper Matuszewska-Orlicz indices.

    For each t the inner limsup over eps -> 0 of omega(eps t)/omega(eps) is
    taken as the maximum over the ``tail`` smallest admissible eps; the index
    estimate at the smallest t (for m) and the largest t (for M) is reported.
    Dropping the smallest eps gives the previous estimate: a change above 0.05
    raises :class:`NonConvergenceError`, one below 0.01 marks convergence.
    """
    _require_samples(m)
    eps = np.asarray(_default_eps(m) if eps_grid is None else eps_grid, dtype=float)
    if eps.size < tail + 1 or np.any(np.diff(eps) >= 0) or np.any(eps <= 0):
        raise ParameterError("eps_grid must be positive and strictly decreasing")
    tg = np.asarray(DEFAULT_MO_T_GRID if t_grid is None else t_grid, dtype=float)
    low, high = tg[tg < 1], tg[tg > 1]
    if low.size == 0 or high.size == 0:
        raise ParameterError("t_grid must contain points below and above 1")
    m_cur, m_prev = _index_at(m, float(low.min()), eps, tail)
    M_cur, M_prev = _index_at(m, float(high.max()), eps, tail)
    drift = max(abs(m_cur - m_prev), abs(M_cur - M_prev))
    if m_cur > M_cur:
        # both estimate the same quantity from opposite sides
        if m_cur - M_cur > MO_BAND:
            drift = max(drift, m_cur - M_cur)
        else:
            m_cur = M_cur = 0.5 * (m_cur + M_cur)
    result = MOIndices(m_cur, M_cur, tuple(eps.tolist()), tuple(tg.tolist()), drift < MO_CONVERGED)
    if drift > MO_BAND:
        raise NonConvergenceError(f"index estimates drift by {drift:.3g}", partial=result)
    return result


# -- Zygmund conditions -------------------------------------------------------

DEFAULT_ZYGMUND_DEPTH = 160
REFINE_GROWTH = 1.1


@dataclass(frozen=True)
class ZygmundReport:
    kind: ZygmundKind
    holds: object  # True, False or None (inconclusive)
    constant: float
    worst_t: float
    level_constants: tuple = ()
    t_values: tuple = field(default=(), repr=False)
    ratios: tuple = field(default=(), repr=False)

    def to_dict(self):
        return {"kind": self.kind.value, "holds": self.holds, "constant": self.constant,
                "worst_t": self.worst_t, "level_constants": list(self.level_constants)}


def default_t_grid(m, depth=DEFAULT_ZYGMUND_DEPTH):
    lo, hi = m.hull
    if lo > 0:
        n = int(math.floor(math.log2(hi / lo)))
        return hi * 2.0 ** -np.arange(n + 1)
    return hi * 2.0 ** -np.arange(depth + 1)


def _z0_base(m, t0, tol):
    """int_0^t0 omega(x)/x dx via x = exp(-u)."""
    if m.family is Family.TABULATED:
        (t1, w1), (t2, w2) = m.samples[0], m.samples[1]
        slope = math.log(w2 / w1) / math.log(t2 / t1)
        return m.eval(t0) / slope if slope > 0 else math.inf
    u0 = -math.log(t0)
    edges = [u0]
    width = 1.0
    while edges[-1] < 700.0:
        edges.append(min(edges[-1] + width, 700.0))
        width *= 2.0
    return integrate_panels(lambda u: m.eval(np.exp(-u)), edges, rtol=tol)[0]


def zygmund_check(m, kind, t_grid=None, quad_tol=1e-10):
    """Decide Z0 (int_0^t omega/x <= C omega(t)) or Zk (t^k int_t^delta0 omega/x^(1+k) <= C omega(t)).

    The constant is the supremum of the ratio over the grid.  The grid is cut
    at a quarter, half and full depth (in log t); the condition holds when the
    last refinement changes the constant by less than 10 %, fails when both
    refinements grow it by 10 % or more, and is inconclusive otherwise.
    """
    _require_samples(m)
    kind = ZygmundKind(kind)
    t = np.sort(np.asarray(default_t_grid(m) if t_grid is None else t_grid, dtype=float))
    if t.size < 3:
        raise ParameterError("t_grid needs at least three points")
    lo, hi = m.hull
    if np.any(t <= 0) or np.any(t > m.delta0) or t[0] < lo or t[-1] > hi:
        raise DomainError("Zygmund test points must lie in the modulus hull within (0, delta0]")
    w = m.eval(t)
    if np.any(w <= 0):
        raise DegenerateModulusError(f"omega vanishes at t={t[np.argmax(w <= 0)]:g}")
    logs = np.log(t)
    k = m.order_k
    if kind is ZygmundKind.Z0:
        pieces, _ = integrate_panels(lambda u: m.eval(np.exp(u)), logs, rtol=quad_tol, per_panel=True)
        integral = _z0_base(m, t[0], quad_tol) + np.concatenate([[0.0], np.cumsum(pieces)])
        ratio = integral / w
    else:
        edges = np.append(logs, math.log(m.delta0)) if t[-1] < m.delta0 else logs
        pieces, _ = integrate_panels(lambda u: m.eval(np.exp(u)) * np.exp(-k * u), edges,
                                     rtol=quad_tol, per_panel=True)
        tail = np.cumsum(pieces[::-1])[::-1]
        if tail.size < t.size:
            tail = np.append(tail, 0.0)
        ratio = t ** k * tail[:t.size] / w
    depth = math.log(t[-1] / t[0])
    levels = []
    for frac in (0.25, 0.5, 1.0):
        sel = np.log(t[-1] / t) <= frac * depth + 1e-12
        levels.append(float(np.max(ratio[sel])))
    c1, c2, c3 = levels
    if not np.isfinite(c3):
        holds = False
    elif c3 < REFINE_GROWTH * c2:
        holds = True
    elif c2 >= REFINE_GROWTH * c1:
        holds = False
    else:
        holds = None
    i = int(np.argmax(ratio))
    return ZygmundReport(kind, holds, c3, float(t[i]), tuple(levels),
                         tuple(t.tolist()), tuple(ratio.tolist()))


def bary_stechkin(m):
    """True when both Zygmund conditions hold on the default grid."""
    return (zygmund_check(m, ZygmundKind.Z0).holds is True
            and zygmund_check(m, ZygmundKind.ZK).holds is True)


@dataclass(frozen=True)
class TailReport:
    holds: bool
    integral: float
    lower_bound: float

    def to_dict(self):
        return dict(self.__dict__)


def tail_assumptions_check(m):
    """Lower bound on [delta0, inf) and integrability of omega^2 / t^5 there."""
    if not m.W > 0:
        raise InvalidExtensionError(f"extension value W={m.W} must be positive")
    integral = m.W ** 2 / (4.0 * m.delta0 ** 4)
    return TailReport(True, integral, m.W)
