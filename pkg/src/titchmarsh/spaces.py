"""Spectral backends: Euclidean R^n and real hyperbolic H^2, H^3.

Conventions (radial functions only):

* ``f_hat(lam) = |S^{n-1}| int_0^inf f(t) phi_lam(t) A(t) dt`` with
  ``A(t) = t^(n-1)`` or ``sinh(t)^(n-1)``;
* ``dmu(lam) = density_shape(lam) dlam``, the bare ``|c(lam)|^-2``;
* ``f(t) = N int f_hat(lam) phi_lam(t) dmu`` and ``||f||^2 = N int |f_hat|^2 dmu``,
  where ``N = plancherel_normalization`` is fixed by a numerical round trip.
"""

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson
from scipy.special import gamma as gamma_fn

from . import _backend
from .errors import (ConfigError, DecayError, ParameterError, TruncationError,
                     UnsupportedDimensionError)
from .profiles import Gaussian, RadialProfile, TabulatedSpectrum
from .quadrature import gauss_grid_pairs, integrate_panels


class Kind(str, enum.Enum):
    EUCLIDEAN = "euclidean"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class SpectralSpace:
    kind: Kind
    n: int

    def __post_init__(self):
        try:
            kind = Kind(self.kind)
        except ValueError:
            raise ParameterError(f"unknown space kind {self.kind!r}") from None
        object.__setattr__(self, "kind", kind)
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ParameterError("dimension n must be a positive integer")
        object.__setattr__(self, "n", int(self.n))
        if kind is Kind.HYPERBOLIC and self.n not in (2, 3):
            raise UnsupportedDimensionError("hyperbolic backends exist for n = 2, 3 only")

    @classmethod
    def euclidean(cls, n):
        return cls(Kind.EUCLIDEAN, n)

    @classmethod
    def hyperbolic(cls, n):
        return cls(Kind.HYPERBOLIC, n)

    @classmethod
    def from_dict(cls, d, path="space"):
        if not isinstance(d, dict):
            raise ConfigError(f"{path}: expected an object")
        extra = set(d) - {"kind", "n"}
        if extra:
            raise ConfigError(f"{path}.{sorted(extra)[0]}: unknown field")
        for key in ("kind", "n"):
            if key not in d:
                raise ConfigError(f"{path}.{key}: missing required field")
        if not isinstance(d["n"], int) or isinstance(d["n"], bool):
            raise ConfigError(f"{path}.n: expected an integer")
        try:
            kind = Kind(str(d["kind"]).lower())
        except ValueError:
            raise ConfigError(f"{path}.kind: unknown space kind {d['kind']!r}") from None
        try:
            return cls(kind, d["n"])
        except (ParameterError, UnsupportedDimensionError) as exc:
            raise ConfigError(f"{path}.n: {exc}") from None

    def to_dict(self):
        return {"kind": self.kind.value, "n": self.n}

    def __str__(self):
        return ("R^%d" if self.kind is Kind.EUCLIDEAN else "H^%d") % self.n

    @property
    def is_hyperbolic(self):
        return self.kind is Kind.HYPERBOLIC

    @property
    def rho(self):
        return 0.5 * (self.n - 1) if self.is_hyperbolic else 0.0

    @property
    def sphere_area(self):
        return 2.0 * math.pi ** (self.n / 2) / gamma_fn(self.n / 2)

    @property
    def plancherel_normalization(self):
        return calibrate(self).normalization

    @property
    def reference_normalization(self):
        """|S^{n-1}| / (2 pi)^n, the classical constant for these conventions."""
        return self.sphere_area / (2.0 * math.pi) ** self.n

    def density_shape(self, lam):
        lam = np.asarray(lam, dtype=float)
        if not self.is_hyperbolic:
            return lam ** (self.n - 1)
        if self.n == 2:
            return lam * np.tanh(math.pi * lam)
        return lam * lam

    def area_shape(self, t):
        t = np.asarray(t, dtype=float)
        base = np.sinh(t) if self.is_hyperbolic else t
        return base ** (self.n - 1)

    def phi_grid(self, lam, t):
        """(phi, 1 - phi) on the outer grid, shape (len(lam), len(t))."""
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(lam < 0) or np.any(t < 0):
            raise ParameterError("phi needs lambda >= 0 and t >= 0")
        return _backend.phi_pair_grid(int(self.is_hyperbolic), self.n, lam, t)

    def phi_pair(self, lam, t):
        """Elementwise (phi, 1 - phi) with numpy broadcasting."""
        lam, t = np.broadcast_arrays(np.asarray(lam, dtype=float), np.asarray(t, dtype=float))
        shape = lam.shape
        lam, t = lam.ravel(), t.ravel()
        phi = np.empty(lam.size)
        om = np.empty(lam.size)
        ts, inverse = np.unique(t, return_inverse=True)
        for k, tk in enumerate(ts):
            idx = np.nonzero(inverse == k)[0]
            p, o = self.phi_grid(lam[idx], [tk])
            phi[idx] = p[:, 0]
            om[idx] = o[:, 0]
        return phi.reshape(shape), om.reshape(shape)

    def phi_envelope(self, t):
        """sup over lambda of |phi_lam(t)|, i.e. phi_0(t)."""
        if not self.is_hyperbolic:
            return np.ones_like(np.asarray(t, dtype=float))
        t = np.asarray(t, dtype=float)
        return self.phi_grid([0.0], t.ravel())[0][0].reshape(t.shape)

    def phi_square_mean(self, lam, t):
        """Local average over an oscillation of phi_lam(t)^2 for large lam*t."""
        lam = np.asarray(lam, dtype=float)
        t = np.asarray(t, dtype=float)
        if not self.is_hyperbolic:
            nu = 0.5 * (self.n - 2)
            c = gamma_fn(self.n / 2) ** 2 * 2.0 ** (2 * nu) / math.pi
            return 0.5 if self.n == 1 else c * (lam * t) ** -(self.n - 1.0)
        if self.n == 3:
            return 0.5 / (lam * lam * np.sinh(t) ** 2)
        return 1.0 / (math.pi * lam * np.sinh(t))


# -- point operations ------------------------------------------------------------

def phi(space, lam, t):
    """phi_lam(t), broadcasting over array arguments."""
    p, _ = space.phi_pair(lam, t)
    return p if p.ndim else float(p)


def one_minus_phi(space, lam, t):
    """1 - phi_lam(t) without cancellation for small lam*t."""
    _, o = space.phi_pair(lam, t)
    return o if o.ndim else float(o)


def plancherel_density(space, lam):
    d = space.plancherel_normalization * space.density_shape(lam)
    return d if np.ndim(d) else float(d)


def area_element(space, t):
    a = space.sphere_area * space.area_shape(t)
    return a if np.ndim(a) else float(a)


# -- transforms ------------------------------------------------------------------

@dataclass(frozen=True)
class Transform:
    lam: np.ndarray
    values: np.ndarray
    est_error: np.ndarray
    cutoff: float

    def rows(self):
        return list(zip(self.lam.tolist(), self.values.tolist(), self.est_error.tolist()))


def truncation_radius(space, f, tol=1e-14, t_cap=400.0):
    """Smallest radius past which |f| phi_0 A stays below ``tol`` times its peak."""
    probe = np.linspace(0.0, t_cap, 16001)[1:]
    with np.errstate(over="ignore", invalid="ignore"):
        g = np.abs(f(probe)) * space.phi_envelope(probe) * space.sphere_area * space.area_shape(probe)
    # 0 * inf where f has underflowed: the product is negligible
    g = np.where(np.isnan(g), 0.0, g)
    peak = float(np.max(g[np.isfinite(g)], initial=0.0))
    if peak == 0.0:
        return probe[0]
    big = np.nonzero(g > tol * peak)[0]
    if big.size == 0:
        return probe[0]
    last = big[-1]
    if last >= probe.size - 50:
        raise DecayError(f"profile does not decay within t <= {t_cap:g}")
    return float(probe[last + 1])


def _t_panels(T, lmax):
    width = T / 16.0
    if lmax > 0:
        width = min(width, math.pi / (4.0 * lmax))
    npan = int(math.ceil(T / width))
    edges = np.linspace(0.0, T, npan + 1)
    a, b = edges[:-1], edges[1:]
    m = 0.5 * (a + b)
    xc, wc = gauss_grid_pairs(a, b)
    xf, wf = gauss_grid_pairs(np.concatenate([a, m]), np.concatenate([m, b]))
    return npan, xc, wc, xf, wf


def spherical_transform(space, profile, lam_grid, tol=1e-14, block=64):
    """f_hat on ``lam_grid`` by composite GL16 in t.

    The grid is processed in blocks of increasing lambda; each block uses
    panels no wider than pi/(4 lam) for its largest lam.  The error estimate
    compares GL16 on each panel with GL16 on its halves.
    """
    f = profile.require_physical() if isinstance(profile, RadialProfile) else profile
    lam = np.atleast_1d(np.asarray(lam_grid, dtype=float))
    T = truncation_radius(space, f, tol)
    order = np.argsort(lam, kind="stable")
    values = np.empty(lam.size)
    err = np.empty(lam.size)
    scale = 0.0
    for s in range(0, lam.size, block):
        idx = order[s:s + block]
        npan, xc, wc, xf, wf = _t_panels(T, float(lam[idx].max()))
        area_c = space.sphere_area * space.area_shape(xc)
        area_f = space.sphere_area * space.area_shape(xf)
        gc = f(xc) * area_c * wc
        gf = f(xf) * area_f * wf
        scale = max(scale, float(np.max(np.abs(f(xf) * area_f))) * T)
        pc, _ = space.phi_grid(lam[idx], xc)
        pf, _ = space.phi_grid(lam[idx], xf)
        coarse = (pc * gc).reshape(-1, npan, 16).sum(axis=2)
        fine = (pf * gf).reshape(-1, 2, npan, 16).sum(axis=(1, 3))
        values[idx] = fine.sum(axis=1)
        err[idx] = np.abs(fine - coarse).sum(axis=1)
    err += tol * scale
    return Transform(lam, values, err, T)


def gl_lambda_grid(cutoff, width=0.5):
    npan = max(1, int(math.ceil(cutoff / width)))
    edges = np.linspace(0.0, cutoff, npan + 1)
    return gauss_grid_pairs(edges[:-1], edges[1:])


def inverse_transform(space, lam, values, t_grid, weights=None, tol=1e-8):
    """f(t) = N int f_hat phi_lam(t) dmu on the given lambda grid.

    ``weights`` are quadrature weights for the grid; without them a Simpson
    rule on the (sorted) grid is used.
    """
    lam = np.asarray(lam, dtype=float)
    values = np.asarray(values, dtype=float)
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    N = space.plancherel_normalization
    dens = values * space.density_shape(lam)
    if lam.size and np.any(dens != 0):
        order = np.argsort(lam)
        top = order[int(0.9 * lam.size):]
        tail = N * float(np.max(np.abs(dens[top]))) * float(lam.max())
        if tail > tol:
            raise TruncationError(f"spectral data have not decayed at the cutoff "
                                  f"(tail estimate {tail:.3g} > {tol:.3g})")
    p, _ = space.phi_grid(lam, t)
    integrand = dens[:, None] * p
    if weights is not None:
        out = N * (np.asarray(weights, dtype=float) @ integrand)
    else:
        order = np.argsort(lam)
        out = N * simpson(integrand[order], x=lam[order], axis=0)
    return out


def translate_spectral(space, lam, H, t):
    """(lam, (1 - phi_lam(t))^2 H(lam)): the spectral side of S^t f - f."""
    if t <= 0:
        raise ParameterError("translation needs t > 0")
    lam = np.asarray(lam, dtype=float)
    _, om = space.phi_grid(lam, [t])
    return lam, om[:, 0] ** 2 * np.asarray(H, dtype=float)


# -- physical spherical means ------------------------------------------------------

def _require_direct(space):
    if space.is_hyperbolic or space.n not in (1, 2, 3):
        raise UnsupportedDimensionError("direct spherical means exist for R^1, R^2, R^3 only")


def _sphere_average(space, g, x, t, rtol):
    # g(d) with d = t^2 + 2 x t c, c the cosine of the angle to x
    if space.n == 1:
        return 0.5 * (g(t * t + 2 * x * t) + g(t * t - 2 * x * t))
    if space.n == 2:
        v, _ = integrate_panels(lambda th: g(t * t + 2 * x * t * np.cos(th)),
                                np.linspace(0.0, math.pi, 9), rtol=rtol, atol=1e-300)
        return v / math.pi
    v, _ = integrate_panels(lambda c: g(t * t + 2 * x * t * c), np.linspace(-1.0, 1.0, 9),
                            rtol=rtol, atol=1e-300)
    return 0.5 * v


def spherical_mean_direct(space, profile, x, t, rtol=1e-13):
    """S^t f(x) by direct quadrature over the sphere of radius t about x."""
    _require_direct(space)
    f = profile.require_physical() if isinstance(profile, RadialProfile) else profile
    x, t = float(x), float(t)
    return float(_sphere_average(space, lambda d: f(np.sqrt(np.maximum(x * x + d, 0.0))),
                                 x, t, rtol))


def spherical_difference_direct(space, profile, x, t, rtol=1e-13):
    """S^t f(x) - f(x), using the profile's cancellation-free increment."""
    _require_direct(space)
    f = profile.require_physical() if isinstance(profile, RadialProfile) else profile
    x, t = float(x), float(t)
    return float(_sphere_average(space, lambda d: f.increment(x, d), x, t, rtol))


def spherical_mean_spectral(space, profile, x, t, cutoff=None, width=0.25):
    """S^t f(x) as N int f_hat phi_lam(t) phi_lam(x) dmu, f_hat computed numerically."""
    lam, w = gl_lambda_grid(cutoff or _spectral_cutoff(space, profile), width)
    fh = spherical_transform(space, profile, lam).values
    p_t, _ = space.phi_grid(lam, [t])
    p_x, _ = space.phi_grid(lam, [x])
    dens = space.density_shape(lam)
    return float(space.plancherel_normalization * np.sum(w * fh * dens * p_t[:, 0] * p_x[:, 0]))


# -- lemma estimates ---------------------------------------------------------------

@dataclass(frozen=True)
class LemmaEstimates:
    max_abs_phi: float
    worst_quadratic_ratio: float
    min_gap_constant: float
    max_abs_phi_at_positive_t: float


def lemma_estimates(space, lam_grid, t_grid):
    lam = np.asarray(lam_grid, dtype=float)
    t = np.asarray(t_grid, dtype=float)
    if lam.size == 0 or t.size == 0 or not (np.all(np.isfinite(lam)) and np.all(np.isfinite(t))):
        raise ParameterError("grids must be nonempty and finite")
    p, om = space.phi_grid(lam, t)
    L, Tm = np.meshgrid(lam, t, indexing="ij")
    denom = Tm * Tm * (L * L + space.rho ** 2)
    ok = denom > 0
    ratio = float(np.max(om[ok] / denom[ok])) if ok.any() else float("nan")
    far = L * Tm >= 1.0
    gap = float(np.min(om[far])) if far.any() else float("nan")
    pos = Tm > 0
    return LemmaEstimates(
        max_abs_phi=float(np.max(np.abs(p))),
        worst_quadratic_ratio=ratio,
        min_gap_constant=gap,
        max_abs_phi_at_positive_t=float(np.max(np.abs(p[pos]))) if pos.any() else float("nan"),
    )


# -- calibration and Plancherel ----------------------------------------------------

def physical_norm(space, f, tol=1e-14):
    """||f||_2^2 = |S^{n-1}| int_0^inf f^2 A dt."""
    with np.errstate(over="ignore"):
        T = truncation_radius(space, lambda t: f(t) ** 2 / np.maximum(space.phi_envelope(t), 1e-300),
                              tol)
    v, e = integrate_panels(lambda t: f(t) ** 2 * space.area_shape(t), np.linspace(0.0, T, 65),
                            rtol=1e-13, atol=1e-300)
    return space.sphere_area * v, space.sphere_area * e


@dataclass(frozen=True)
class Calibration:
    normalization: float
    physical_norm: float
    spectral_integral: float
    reference: float

    @property
    def deviation(self):
        return abs(self.normalization / self.reference - 1.0)


def _calibration_profile(space):
    return Gaussian(0.5) if not space.is_hyperbolic else Gaussian(1.0)


@functools.lru_cache(maxsize=None)
def _calibrate(kind, n):
    space = SpectralSpace(kind, n)
    f = _calibration_profile(space)
    phys, _ = physical_norm(space, f)
    lam, w = gl_lambda_grid(12.0, 0.5)
    fh = spherical_transform(space, f, lam).values
    spec = float(np.sum(w * fh * fh * space.density_shape(lam)))
    return Calibration(phys / spec, phys, spec, space.reference_normalization)


def calibrate(space):
    """Normalisation N making the calibration Gaussian's L^2 norm round-trip."""
    return _calibrate(space.kind, space.n)


def _spectral_cutoff(space, profile, rel=1e-9, start=4.0, stop=1024.0):
    """Smallest power-of-two cutoff past which N f_hat^2 |c|^-2 lam is negligible.

    Probes one octave at a time and stops once two consecutive octaves are
    below ``rel`` of the running peak.
    """
    f = profile.require_physical() if isinstance(profile, RadialProfile) else profile
    x0 = np.linspace(0.0, 1.0, 9)
    fh0 = spherical_transform(space, f, x0).values
    peak = float(np.max(fh0 ** 2 * space.density_shape(x0) * np.maximum(x0, 1.0)))
    quiet = 0
    probe = start / 2.0
    while probe < stop:
        probe *= 2.0
        lam = np.linspace(0.5, 1.0, 9) * probe
        fh = spherical_transform(space, f, lam).values
        level = float(np.max(fh ** 2 * space.density_shape(lam) * lam))
        peak = max(peak, level)
        quiet = quiet + 1 if level <= rel * peak else 0
        if quiet == 2:
            return probe / 2.0
    raise TruncationError("spectral side does not decay below the cutoff limit")


def _spectral_norm(space, f, cutoff, rtol=1e-10):
    def integrand(lam):
        fh = spherical_transform(space, f, lam).values
        return fh * fh * space.density_shape(lam)

    edges = np.concatenate([[0.0], cutoff * 2.0 ** -np.arange(8, -1, -1)])
    v, e = integrate_panels(integrand, edges, rtol=rtol, atol=1e-300)
    N = space.plancherel_normalization
    return N * v, N * e


@dataclass(frozen=True)
class PlancherelReport:
    physical: float
    spectral: float
    rel_error: float
    cutoff: float
    analytic: float = float("nan")
    rel_error_analytic: float = float("nan")


def plancherel_check(space, profile):
    """Compare ||f||^2 in physical space against N int |f_hat|^2 dmu.

    f_hat is computed from f by quadrature; when the profile also carries a
    closed-form H, ``int H dmu`` is reported alongside.
    """
    f = profile.require_physical()
    phys, _ = physical_norm(space, f)
    cutoff = _spectral_cutoff(space, f)
    spec, _ = _spectral_norm(space, f, cutoff)
    analytic = rel_a = float("nan")
    if profile.spectral is not None:
        from .functionals import spectral_integral

        analytic = spectral_integral(space, profile.H).value
        rel_a = abs(analytic - phys) / phys
    return PlancherelReport(phys, spec, abs(spec - phys) / phys, cutoff, analytic, rel_a)


def numeric_spectrum(space, profile, cutoff=None):
    """Tabulated H = N |f_hat|^2 for a profile known only in physical space."""
    f = profile.require_physical() if isinstance(profile, RadialProfile) else profile
    cutoff = cutoff or _spectral_cutoff(space, f)
    T = truncation_radius(space, f, 1e-6)
    step = min(0.05, math.pi / (16.0 * T))
    lam = np.linspace(0.0, cutoff, int(math.ceil(cutoff / step)) + 1)
    fh = spherical_transform(space, f, lam).values
    return TabulatedSpectrum(lam, space.plancherel_normalization * fh * fh)


def with_numeric_spectrum(space, profile):
    if profile.spectral is not None:
        return profile
    return RadialProfile(profile.physical, numeric_spectrum(space, profile), "physical",
                         profile.name)


__all__ = [
    "Kind", "SpectralSpace", "Transform", "LemmaEstimates", "Calibration", "PlancherelReport",
    "phi", "one_minus_phi", "plancherel_density", "area_element", "spherical_transform",
    "inverse_transform", "translate_spectral", "spherical_mean_direct",
    "spherical_difference_direct", "spherical_mean_spectral", "lemma_estimates", "calibrate",
    "plancherel_check", "physical_norm", "numeric_spectrum", "with_numeric_spectrum",
    "truncation_radius", "gl_lambda_grid",
]
