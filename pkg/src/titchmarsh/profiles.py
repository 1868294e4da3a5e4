"""Radial test functions: physical profiles f(t) and spectral profiles H(lambda).

Spectral profiles follow the normalisation used throughout the package:
Plancherel reads ``||f||^2 = int_0^inf H(lam) |c(lam)|^-2 dlam`` with the bare
density ``|c(lam)|^-2`` (``lam**(n-1)``, ``lam*tanh(pi*lam)`` or ``lam**2``),
so ``H = plancherel_normalization * |f_hat|^2``.

Each spectrum exposes ``tail_bound(x, m)``, a bound on
``int_x^inf H(lam) lam**m dlam`` used to stop quadratures to infinity.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import gamma as gamma_fn
from scipy.special import gammaincc

from .errors import ConfigError, InapplicableError


class AnalyticSide(str, enum.Enum):
    PHYSICAL = "physical"
    SPECTRAL = "spectral"
    BOTH = "both"


# -- spectral side -------------------------------------------------------------

def _smoothstep(s):
    s = np.clip(s, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)
        b = np.where(s < 1, np.exp(-1.0 / np.where(s < 1, 1.0 - s, 1.0)), 0.0)
    return a / (a + b)


class Spectrum:
    support = (0.0, math.inf)
    breakpoints = ()
    scale = math.inf
    name = "spectrum"

    def __call__(self, lam):
        raise NotImplementedError

    def tail_bound(self, x, m):
        raise NotImplementedError

    def params(self):
        return {}

    def scaled(self, c):
        return ScaledSpectrum(self, c)


class ZeroSpectrum(Spectrum):
    name = "zero"
    support = (0.0, 0.0)

    def __call__(self, lam):
        return np.zeros_like(np.asarray(lam, dtype=float))

    def tail_bound(self, x, m):
        return 0.0


class PowerSpectrum(Spectrum):
    """H = coef * lam**-(2 alpha + n) for lam >= 1.

    ``cut="smooth"`` multiplies by a C-infinity ramp on [1/2, 1] instead of the
    hard indicator; either way H is the pure power on [1, inf).
    """

    name = "power"

    def __init__(self, alpha, n, cut="hard", coef=1.0):
        if cut not in ("hard", "smooth"):
            raise ValueError("cut must be 'hard' or 'smooth'")
        self.alpha, self.n, self.cut, self.coef = float(alpha), int(n), cut, float(coef)
        self.exponent = 2.0 * self.alpha + self.n
        lo = 1.0 if cut == "hard" else 0.5
        self.support = (lo, math.inf)
        self.breakpoints = (lo, 1.0) if cut == "smooth" else (1.0,)

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        with np.errstate(divide="ignore"):
            h = self.coef * np.where(lam > 0, lam, 1.0) ** -self.exponent
        if self.cut == "hard":
            return np.where(lam >= 1.0, h, 0.0)
        return h * _smoothstep(2.0 * lam - 1.0)

    def tail_bound(self, x, m):
        q = self.exponent - m - 1.0
        if q <= 0:
            return math.inf
        x = max(float(x), self.support[0])
        if x >= 1.0:
            return self.coef * x ** -q / q
        # below 1 the ramp is at most 1
        if q == 1.0:
            head = math.log(1.0 / x)
        else:
            head = (x ** (1.0 - q) - 1.0) / (q - 1.0)
        return self.coef * (head + 1.0 / q)

    def params(self):
        return {"alpha": self.alpha, "n": self.n, "cut": self.cut, "coef": self.coef}


class GaussianSpectrum(Spectrum):
    """H = coef * exp(-c lam^2)."""

    name = "gaussian"

    def __init__(self, coef, c):
        self.coef, self.c = float(coef), float(c)
        self.scale = 1.0 / math.sqrt(self.c)
        # exp(-c lam^2) is exactly zero in double precision past this point
        self.support = (0.0, math.sqrt(746.0 / self.c))

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        return self.coef * np.exp(-self.c * lam * lam)

    def tail_bound(self, x, m):
        s = 0.5 * (m + 1.0)
        return self.coef * 0.5 * self.c ** -s * gamma_fn(s) * gammaincc(s, self.c * x * x)

    def params(self):
        return {"coef": self.coef, "c": self.c}


class RationalSpectrum(Spectrum):
    """H = coef / (1 + lam^2)**q."""

    name = "rational"

    def __init__(self, coef, q):
        self.coef, self.q = float(coef), float(q)

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        return self.coef / (1.0 + lam * lam) ** self.q

    def tail_bound(self, x, m):
        p = 2.0 * self.q - m - 1.0
        if p <= 0 or x <= 0:
            return math.inf
        return self.coef * x ** -p / p

    def params(self):
        return {"coef": self.coef, "q": self.q}


class BumpSpectrum(Spectrum):
    """Smooth compactly supported H = coef * exp(1 - 1/(1 - s^2)) on (lo, hi)."""

    name = "bump"

    def __init__(self, lo, hi, coef=1.0):
        if not 0 <= lo < hi:
            raise ValueError("need 0 <= lo < hi")
        self.lo, self.hi, self.coef = float(lo), float(hi), float(coef)
        self.support = (self.lo, self.hi)
        self.breakpoints = (self.lo, self.hi)
        self.scale = 0.125 * (self.hi - self.lo)

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        s = (2.0 * lam - (self.lo + self.hi)) / (self.hi - self.lo)
        inside = np.abs(s) < 1
        with np.errstate(divide="ignore", over="ignore"):
            v = np.exp(1.0 - 1.0 / np.where(inside, 1.0 - s * s, 1.0))
        return np.where(inside, self.coef * v, 0.0)

    def tail_bound(self, x, m):
        if x >= self.hi:
            return 0.0
        return self.coef * self.hi ** max(m, 0) * (self.hi - max(x, self.lo))

    def params(self):
        return {"lo": self.lo, "hi": self.hi, "coef": self.coef}


class ScaledSpectrum(Spectrum):
    def __init__(self, base, c):
        self.base, self.c = base, float(c)
        self.support, self.breakpoints, self.scale = base.support, base.breakpoints, base.scale
        self.name = base.name

    def __call__(self, lam):
        return self.c * self.base(lam)

    def tail_bound(self, x, m):
        return self.c * self.base.tail_bound(x, m)

    def params(self):
        return dict(self.base.params(), scale=self.c)


class TabulatedSpectrum(Spectrum):
    """Cubic-spline interpolant of sampled H on [0, cutoff], zero beyond."""

    name = "tabulated"

    def __init__(self, lam, values):
        lam = np.asarray(lam, dtype=float)
        values = np.asarray(values, dtype=float)
        self._spline = CubicSpline(lam, values)
        self.support = (0.0, float(lam[-1]))
        self.breakpoints = (float(lam[-1]),)
        self.scale = 8.0 * float(np.max(np.diff(lam)))
        self._peak = float(np.max(np.abs(values)))

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        inside = (lam >= 0) & (lam <= self.support[1])
        return np.where(inside, np.maximum(self._spline(np.clip(lam, 0, self.support[1])), 0.0), 0.0)

    def tail_bound(self, x, m):
        hi = self.support[1]
        return 0.0 if x >= hi else self._peak * hi ** max(m, 0) * (hi - x)


# -- physical side -------------------------------------------------------------

class PhysicalProfile:
    name = "physical"

    def __call__(self, r):
        raise NotImplementedError

    def increment(self, r, d):
        """f(sqrt(r^2 + d)) - f(r)."""
        r = np.asarray(r, dtype=float)
        return self(np.sqrt(np.maximum(r * r + d, 0.0))) - self(r)

    def params(self):
        return {}


class Gaussian(PhysicalProfile):
    name = "gaussian"

    def __init__(self, a):
        self.a = float(a)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return np.exp(-self.a * r * r)

    def increment(self, r, d):
        # exact cancellation-free difference
        return self(r) * np.expm1(-self.a * d)

    def params(self):
        return {"a": self.a}


def _t_over_sinh(t):
    t = np.asarray(t, dtype=float)
    small = np.abs(t) < 1e-4
    with np.errstate(over="ignore"):
        big = t / np.sinh(np.where(small, 1.0, t))
    return np.where(small, 1.0 - t * t / 6.0, big)


class GaussianH3(PhysicalProfile):
    """exp(-a t^2) * t / sinh t, whose H^3 transform is pi^1.5 a^-1.5 exp(-lam^2/(4a))."""

    name = "gaussian_h3"

    def __init__(self, a):
        self.a = float(a)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return np.exp(-self.a * r * r) * _t_over_sinh(r)

    def params(self):
        return {"a": self.a}


class ExponentialH3(PhysicalProfile):
    """exp(-t) * t / sinh t, whose H^3 transform is 8 pi / (1 + lam^2)^2."""

    name = "exp_h3"

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return np.exp(-r) * _t_over_sinh(r)


class Bump(PhysicalProfile):
    """Compactly supported exp(1 - 1/(1 - (t/R)^2)) on [0, R)."""

    name = "bump"

    def __init__(self, R=2.0):
        if not R > 0:
            raise ValueError("bump radius must be positive")
        self.R = float(R)

    def __call__(self, r):
        s = np.asarray(r, dtype=float) / self.R
        inside = s < 1.0
        with np.errstate(divide="ignore", over="ignore"):
            v = np.exp(1.0 - 1.0 / np.where(inside, 1.0 - s * s, 1.0))
        return np.where(inside, v, 0.0)

    def params(self):
        return {"R": self.R}


# -- the pair ------------------------------------------------------------------

@dataclass(frozen=True)
class RadialProfile:
    physical: PhysicalProfile = None
    spectral: Spectrum = None
    analytic_side: AnalyticSide = AnalyticSide.SPECTRAL
    name: str = "profile"

    def __post_init__(self):
        if self.physical is None and self.spectral is None:
            raise ValueError("a profile needs at least one side")
        object.__setattr__(self, "analytic_side", AnalyticSide(self.analytic_side))

    @property
    def H(self):
        if self.spectral is None:
            raise InapplicableError(f"profile {self.name!r} has no spectral side; "
                                    "build one with spaces.numeric_spectrum")
        return self.spectral

    def require_physical(self):
        if self.physical is None:
            raise InapplicableError(f"profile {self.name!r} has no physical side")
        return self.physical

    def scaled(self, c):
        """The profile with H multiplied by ``c`` (f by sqrt(c))."""
        return RadialProfile(None, self.H.scaled(c), AnalyticSide.SPECTRAL, self.name)

    def describe(self):
        d = {"name": self.name, "analytic_side": self.analytic_side.value}
        if self.physical is not None:
            d["physical"] = dict(kind=self.physical.name, **self.physical.params())
        if self.spectral is not None:
            d["spectral"] = dict(kind=self.spectral.name, **self.spectral.params())
        return d


def spectral_profile(H, name=None):
    return RadialProfile(None, H, AnalyticSide.SPECTRAL, name or H.name)


def power_profile(alpha, n, cut="hard", coef=1.0):
    return spectral_profile(PowerSpectrum(alpha, n, cut, coef), f"power(alpha={alpha:g})")


def gaussian_profile(space, a=0.5):
    """Gaussian exp(-a t^2); the spectral side is closed form on R^n only."""
    phys = Gaussian(a)
    if space.is_hyperbolic:
        return RadialProfile(phys, None, AnalyticSide.PHYSICAL, f"gaussian(a={a:g})")
    norm = space.plancherel_normalization
    H = GaussianSpectrum(norm * (math.pi / a) ** space.n, 1.0 / (2.0 * a))
    return RadialProfile(phys, H, AnalyticSide.BOTH, f"gaussian(a={a:g})")


def gaussian_h3_profile(space, a=1.0):
    _need_h3(space)
    H = GaussianSpectrum(space.plancherel_normalization * math.pi ** 3 / a ** 3, 1.0 / (2.0 * a))
    return RadialProfile(GaussianH3(a), H, AnalyticSide.BOTH, f"gaussian_h3(a={a:g})")


def exp_h3_profile(space):
    _need_h3(space)
    H = RationalSpectrum(space.plancherel_normalization * 64.0 * math.pi ** 2, 4.0)
    return RadialProfile(ExponentialH3(), H, AnalyticSide.BOTH, "exp_h3")


def bump_profile(space, R=2.0):
    """Physical bump; its spectral side is computed numerically when needed."""
    return RadialProfile(Bump(R), None, AnalyticSide.PHYSICAL, f"bump(R={R:g})")


def _need_h3(space):
    if not (space.is_hyperbolic and space.n == 3):
        raise InapplicableError("profile is defined for the H^3 backend only")


_PROFILE_KEYS = {
    "physical": {"gaussian": {"a"}, "gaussian_h3": {"a"}, "exp_h3": set(), "bump": {"R"}},
    "spectral": {"power": {"alpha", "cut", "coef"}, "gaussian": {"coef", "c"},
                 "bump": {"lo", "hi", "coef"}, "zero": set(), "rational": {"coef", "q"}},
}


def profile_from_dict(space, d, path="profile"):
    """Build a bundled profile from its JSON descriptor."""
    if not isinstance(d, dict):
        raise ConfigError(f"{path}: expected an object")
    sides = [s for s in ("physical", "spectral") if s in d]
    if len(sides) != 1:
        raise ConfigError(f"{path}: exactly one of 'physical' or 'spectral' is required")
    side = sides[0]
    kind = d[side]
    allowed = _PROFILE_KEYS[side].get(kind)
    if allowed is None:
        raise ConfigError(f"{path}.{side}: unknown profile {kind!r}")
    extra = set(d) - {side} - allowed
    if extra:
        raise ConfigError(f"{path}.{sorted(extra)[0]}: unknown field")

    def num(key, default=None):
        if key not in d:
            if default is None:
                raise ConfigError(f"{path}.{key}: missing required field")
            return default
        try:
            return float(d[key])
        except (TypeError, ValueError):
            raise ConfigError(f"{path}.{key}: expected a number") from None

    try:
        if side == "physical":
            if kind == "gaussian":
                return gaussian_profile(space, num("a", 0.5))
            if kind == "bump":
                return bump_profile(space, num("R", 2.0))
            if kind == "gaussian_h3":
                return gaussian_h3_profile(space, num("a", 1.0))
            return exp_h3_profile(space)
        if kind == "power":
            return power_profile(num("alpha"), space.n, d.get("cut", "hard"), num("coef", 1.0))
        if kind == "gaussian":
            return spectral_profile(GaussianSpectrum(num("coef", 1.0), num("c", 1.0)))
        if kind == "rational":
            return spectral_profile(RationalSpectrum(num("coef", 1.0), num("q")))
        if kind == "bump":
            return spectral_profile(BumpSpectrum(num("lo"), num("hi"), num("coef", 1.0)))
        return spectral_profile(ZeroSpectrum())
    except (ValueError, InapplicableError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{path}: {exc}") from None
