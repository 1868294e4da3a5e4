import json

import numpy as np
import pytest

from titchmarsh import equivalence as eq
from titchmarsh import modulus as mod
from titchmarsh.errors import DegenerateModulusError, FitError, ParameterError
from titchmarsh.functionals import dyadic_grid
from titchmarsh.profiles import BumpSpectrum, ZeroSpectrum, power_profile, spectral_profile
from titchmarsh.spaces import SpectralSpace

R1, R3 = SpectralSpace.euclidean(1), SpectralSpace.euclidean(3)
H3 = SpectralSpace.hyperbolic(3)


def test_forward_ratio_power_r3():
    prof, m = eq.power_family(R3, 0.5)
    r = eq.forward_check(R3, prof, m, t_max=1.0)
    # exact tail t^(2a+n-1)/(2a+n-1)
    assert np.allclose(r.ratios, 1.0 / 3.0, rtol=1e-10)
    assert r.stable and r.bounded


def test_forward_ratio_unstable_for_larger_exponent():
    prof = power_profile(0.5, 3)
    r = eq.forward_check(R3, prof, mod.power(0.75, k=2))
    assert not r.stable
    assert r.ratio_sup_refined >= 1.1 * r.ratio_sup


def test_forward_zero_spectrum():
    r = eq.forward_check(R1, spectral_profile(ZeroSpectrum()), mod.power(0.5, k=2))
    assert r.ratio_sup == 0.0 and r.stable


def test_degenerate_modulus():
    # t^400 underflows to zero on the fine end of the grid
    with pytest.raises(DegenerateModulusError):
        eq.forward_check(R1, power_profile(0.5, 1), mod.power(400.0, k=500))


def test_backward_ratio_smooth_cut():
    prof = power_profile(0.5, 1, cut="smooth")
    r = eq.backward_check(R1, prof, mod.power(0.5, k=2))
    assert r.bounded
    bad = eq.backward_check(R1, prof, mod.power(0.75, k=2))
    assert not bad.stable


def test_backward_compact_spectrum_with_t_squared():
    prof = spectral_profile(BumpSpectrum(1.0, 3.0, 1.0))
    r = eq.backward_check(R1, prof, mod.power(2.0, k=2))
    assert r.bounded


def test_backward_check_t_max_range():
    with pytest.raises(ParameterError):
        eq.backward_check(R1, power_profile(0.5, 1), mod.power(0.5, k=2), t_max=2.0)


# -- fits -----------------------------------------------------------------------------

def test_fit_slope_exact_power():
    t = dyadic_grid(1.0, 20)
    f = eq.fit_slope(t, 3.0 * t ** 2.5)
    assert f.slope == pytest.approx(2.5, abs=1e-12)
    assert f.half_width < 1e-10
    assert f.points == 17


def test_fit_slope_constant():
    t = dyadic_grid(1.0, 20)
    f = eq.fit_slope(t, np.full(t.size, 2.0))
    assert f.slope == 0.0 and f.half_width == 0.0


def test_fit_slope_rejects_nonpositive():
    t = dyadic_grid(1.0, 20)
    v = t.copy()
    v[7] = 0.0
    with pytest.raises(FitError):
        eq.fit_slope(t, v)


def test_fit_exponents_lenient_mode():
    t = dyadic_grid(1.0, 10)

    class C:
        def __init__(self, v):
            self.t_values, self.values = t, v

    fits = eq.fit_exponents(C(t ** 0.5), C(np.zeros_like(t)), strict=False)
    assert fits.L.slope == pytest.approx(0.5)
    assert np.isnan(fits.T.slope)
    with pytest.raises(FitError):
        eq.fit_exponents(C(t ** 0.5), C(np.zeros_like(t)))


# -- audit ---------------------------------------------------------------------------------

def test_audit_examples():
    a = eq.hypothesis_audit(mod.power(0.5, k=2))
    assert a.passed and a.side_condition_bounded
    assert a.side_condition_sup == pytest.approx(1.0)
    b = eq.hypothesis_audit(mod.power(2.0, k=2))
    assert b.zygmund_zk is False and not b.passed
    c = eq.hypothesis_audit(mod.power(0.5, k=3))
    assert not c.k_at_most_2 and not c.backward_applicable


def test_audit_failure_caps_verdict():
    prof, _ = eq.power_family(R1, 0.5)
    rep = eq.equivalence_report(R1, prof, mod.power(0.5, k=3), J=12)
    assert rep.verdict is eq.Verdict.INCONCLUSIVE
    assert rep.direction_backward.finite
    assert any("outside theorem hypotheses" in n for n in rep.notes)


def test_decide():
    class R:
        def __init__(self, b):
            self.bounded = b

    class A:
        def __init__(self, p):
            self.passed = p

    assert eq.decide(R(True), R(True), A(True)) is eq.Verdict.EQUIVALENT
    assert eq.decide(R(True), R(False), A(True)) is eq.Verdict.FORWARD_ONLY
    assert eq.decide(R(False), R(True), A(True)) is eq.Verdict.BACKWARD_ONLY
    assert eq.decide(R(False), R(False), A(True)) is eq.Verdict.INCONCLUSIVE
    assert eq.decide(R(True), R(True), A(False)) is eq.Verdict.INCONCLUSIVE


# -- reports -------------------------------------------------------------------------------

def test_titchmarsh_n1():
    prof = power_profile(0.5, 1)
    rep = eq.titchmarsh_n1(prof, 0.5)
    assert rep.direction_forward.ratio_sup == pytest.approx(1.0, abs=1e-6)
    assert rep.verdict is eq.Verdict.EQUIVALENT
    with pytest.raises(ParameterError):
        eq.titchmarsh_n1(prof, 2.0)


def test_titchmarsh_n1_alpha_three_halves():
    rep = eq.titchmarsh_n1(power_profile(1.5, 1), 1.5)
    assert rep.direction_forward.ratio_sup == pytest.approx(1.0 / 3.0, rel=1e-8)


def test_report_serialisation():
    prof, m = eq.power_family(R1, 0.5)
    rep = eq.equivalence_report(R1, prof, m, J=12)
    d = json.loads(rep.to_json())
    assert d["verdict"] == rep.verdict.value
    assert set(d) >= {"direction_forward", "direction_backward", "hypothesis_audit",
                      "fitted_exponents", "verdict"}
    lines = rep.summary_csv().splitlines()
    assert lines[0].split(",")[0] == "verdict" and len(lines) == 2


def test_hyperbolic_h3_power_family():
    prof, m = eq.power_family(H3, 1.0)
    rep = eq.equivalence_report(H3, prof, m)
    assert rep.fitted_exponents.L.slope == pytest.approx(1.0, abs=0.05)
    assert rep.fitted_exponents.T.slope == pytest.approx(4.0, abs=0.02)
    assert rep.verdict is eq.Verdict.EQUIVALENT


def test_scale_robustness():
    prof, m = eq.power_family(R1, 0.5)
    base = eq.equivalence_report(R1, prof, m, J=12)
    scaled = eq.equivalence_report(R1, prof.scaled(9.0), m, J=12)
    assert scaled.direction_forward.ratio_sup == pytest.approx(9 * base.direction_forward.ratio_sup, rel=1e-9)
    assert scaled.direction_backward.ratio_sup == pytest.approx(3 * base.direction_backward.ratio_sup, rel=1e-9)
    assert scaled.verdict is base.verdict


def test_verdict_survives_larger_J():
    prof, m = eq.power_family(R1, 1.0)
    for J in (16, 20, 24):
        assert eq.equivalence_report(R1, prof, m, J=J).verdict is eq.Verdict.EQUIVALENT
