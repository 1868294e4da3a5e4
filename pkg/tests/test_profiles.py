import math

import numpy as np
import pytest
from scipy import integrate

from titchmarsh import profiles as pr
from titchmarsh.errors import ConfigError, InapplicableError
from titchmarsh.spaces import SpectralSpace

R1, R3 = SpectralSpace.euclidean(1), SpectralSpace.euclidean(3)
H3 = SpectralSpace.hyperbolic(3)

SPECTRA = [
    pr.PowerSpectrum(0.5, 1),
    pr.PowerSpectrum(1.5, 3, cut="smooth"),
    pr.GaussianSpectrum(2.0, 0.5),
    pr.RationalSpectrum(3.0, 4.0),
    pr.BumpSpectrum(1.0, 3.0, 2.0),
    pr.PowerSpectrum(1.0, 2).scaled(7.0),
]


def test_power_spectrum_values():
    H = pr.PowerSpectrum(0.5, 3)
    assert H(2.0) == pytest.approx(2.0 ** -4)
    assert H(0.99) == 0.0
    smooth = pr.PowerSpectrum(0.5, 3, cut="smooth")
    lam = np.linspace(1.0, 9.0, 17)
    assert np.array_equal(smooth(lam), H(lam))
    assert smooth(0.5) == 0.0 and smooth(0.4) == 0.0
    assert 0 < smooth(0.75) < 0.75 ** -4


def test_smooth_cut_is_flat_at_ends():
    s = np.array([1e-3, 1 - 1e-3])
    v = pr._smoothstep(s)
    assert v[0] < 1e-100 and 1 - v[1] < 1e-100


@pytest.mark.parametrize("H", SPECTRA, ids=lambda h: h.name)
@pytest.mark.parametrize("m", [0, 2])
@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
def test_tail_bound_dominates_the_tail(H, m):
    for x in (0.25, 1.0, 2.5, 10.0):
        lo = max(x, H.support[0])
        hi = min(H.support[1], lo + 400.0)
        exact, _ = integrate.quad(lambda s: H(s) * s ** m, lo, hi, limit=400, epsabs=0, epsrel=1e-12)
        if math.isinf(H.support[1]):
            exact += integrate.quad(lambda s: H(s) * s ** m, hi, math.inf, epsabs=0, epsrel=1e-10)[0]
        assert H.tail_bound(x, m) >= exact * (1 - 1e-9)


def test_tail_bound_infinite_when_not_integrable():
    assert pr.PowerSpectrum(0.5, 1).tail_bound(1.0, 2) == math.inf


def test_zero_spectrum():
    z = pr.ZeroSpectrum()
    assert np.all(z(np.linspace(0, 5, 6)) == 0)
    assert z.tail_bound(0.0, 4) == 0.0


def test_tabulated_spectrum_vanishes_past_last_node():
    lam = np.linspace(0, 4, 41)
    T = pr.TabulatedSpectrum(lam, np.exp(-lam))
    assert T(5.0) == 0.0
    assert T(1.05) == pytest.approx(math.exp(-1.05), rel=1e-4)


def test_gaussian_increment_matches_difference():
    g = pr.Gaussian(0.5)
    r, d = 1.3, 1e-3
    assert g.increment(r, d) == pytest.approx(g(math.sqrt(r * r + d)) - g(r), rel=1e-10)


def test_physical_profiles_at_origin():
    assert pr.Gaussian(0.7)(0.0) == 1.0
    assert pr.Bump(2.0)(0.0) == 1.0
    assert pr.Bump(2.0)(2.0) == 0.0
    assert pr.GaussianH3(1.0)(0.0) == pytest.approx(1.0)
    assert pr.ExponentialH3()(0.0) == pytest.approx(1.0)


def test_h3_only_profiles():
    with pytest.raises(InapplicableError):
        pr.exp_h3_profile(R3)
    assert pr.exp_h3_profile(H3).analytic_side is pr.AnalyticSide.BOTH


def test_profile_needs_a_side():
    with pytest.raises(ValueError):
        pr.RadialProfile()


def test_missing_sides_raise_inapplicable():
    p = pr.power_profile(0.5, 1)
    with pytest.raises(InapplicableError):
        p.require_physical()
    b = pr.bump_profile(R1)
    with pytest.raises(InapplicableError):
        b.H


def test_scaled_profile():
    p = pr.power_profile(0.5, 1).scaled(3.0)
    assert p.H(2.0) == pytest.approx(3.0 * 2.0 ** -2)


def test_describe_is_json_ready():
    import json
    for p in (pr.gaussian_profile(R3), pr.power_profile(1.0, 3, "smooth"), pr.exp_h3_profile(H3)):
        json.dumps(p.describe())


@pytest.mark.parametrize("d,cls", [
    ({"physical": "gaussian", "a": 0.5}, pr.Gaussian),
    ({"physical": "bump", "R": 1.0}, pr.Bump),
    ({"spectral": "power", "alpha": 1.0, "cut": "smooth"}, pr.PowerSpectrum),
    ({"spectral": "gaussian", "coef": 1.0, "c": 2.0}, pr.GaussianSpectrum),
    ({"spectral": "zero"}, pr.ZeroSpectrum),
    ({"spectral": "bump", "lo": 1.0, "hi": 2.0}, pr.BumpSpectrum),
])
def test_profile_from_dict(d, cls):
    p = pr.profile_from_dict(R3, d)
    side = p.physical if "physical" in d else p.spectral
    assert isinstance(side, cls)


@pytest.mark.parametrize("d,field", [
    ({"spectral": "power"}, "profile.alpha"),
    ({"spectral": "power", "alpha": 0.5, "beta": 1}, "profile.beta"),
    ({"spectral": "spline"}, "profile.spectral"),
    ({"physical": "gaussian", "a": "wide"}, "profile.a"),
    ({}, "profile"),
    ({"physical": "gaussian", "spectral": "zero"}, "profile"),
    ({"spectral": "power", "alpha": 0.5, "cut": "jagged"}, "profile"),
])
def test_profile_from_dict_errors(d, field):
    with pytest.raises(ConfigError, match=field.replace(".", r"\.")):
        pr.profile_from_dict(R3, d)


def test_h3_profile_from_dict_on_wrong_space():
    with pytest.raises(ConfigError):
        pr.profile_from_dict(R3, {"physical": "exp_h3"})
