"""Acceptance suite: one group of tests per criterion, each at its stated tolerance.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""

import time

import numpy as np
import pytest
from click.testing import CliRunner

from titchmarsh import cli
from titchmarsh import equivalence as eq
from titchmarsh import functionals as fn
from titchmarsh import modulus as mod
from titchmarsh import spaces
from titchmarsh.profiles import (bump_profile, exp_h3_profile, gaussian_h3_profile,
                                 gaussian_profile, power_profile)
from test_modulus import MATRIX

R = {n: spaces.SpectralSpace.euclidean(n) for n in (1, 2, 3)}
H = {n: spaces.SpectralSpace.hyperbolic(n) for n in (2, 3)}
PAIRS = [(a, n) for a in (0.5, 1.0, 1.5) for n in (1, 2, 3)]
PAIR_IDS = [f"a{a}-n{n}" for a, n in PAIRS]


def criterion(num, title):
    return pytest.mark.criterion(num, title)


# 1 ---------------------------------------------------------------------------------------

@criterion(1, "exact-power forward ratio 1/(2a+n-1) within 1e-8, T slope 2a+n-1 +- 0.02, <= 10 s")
@pytest.mark.parametrize("alpha,n", PAIRS, ids=PAIR_IDS)
def test_forward_power_family(alpha, n):
    start = time.perf_counter()
    space = R[n]
    prof, m = eq.power_family(space, alpha)
    r = eq.forward_check(space, prof, m, J=20, t_max=1.0)
    fits = eq.fit_exponents(r.curve, r.curve, J=20)
    elapsed = time.perf_counter() - start
    p = 2 * alpha + n - 1
    assert np.all(r.t_values <= 1.0)
    assert np.max(np.abs(r.ratios - 1.0 / p)) <= 1e-8
    assert abs(fits.T.slope - p) <= 0.02
    assert elapsed <= 10.0


# 2 ---------------------------------------------------------------------------------------

@criterion(2, "L slope a +- 0.05 and L/t^a stable within 10% under J -> J+4, <= 60 s")
@pytest.mark.parametrize("alpha,n", PAIRS, ids=PAIR_IDS)
def test_backward_power_family(alpha, n):
    start = time.perf_counter()
    space = R[n]
    prof, m = eq.power_family(space, alpha)
    r = eq.backward_check(space, prof, m, J=20)
    fits = eq.fit_exponents(r.curve, r.curve, J=20)
    elapsed = time.perf_counter() - start
    assert abs(fits.L.slope - alpha) <= 0.05
    assert r.finite
    assert abs(r.ratio_sup_refined - r.ratio_sup) < 0.10 * r.ratio_sup
    assert elapsed <= 60.0


# 3 ---------------------------------------------------------------------------------------

@criterion(3, "n=1 recipe: forward ratio 1.0 +- 1e-6 and verdict EquivalentWithinConstants")
def test_titchmarsh_recipe():
    rep = eq.titchmarsh_n1(power_profile(0.5, 1), 0.5)
    assert abs(rep.direction_forward.ratio_sup - 1.0) <= 1e-6
    assert rep.verdict is eq.Verdict.EQUIVALENT


# 4 ---------------------------------------------------------------------------------------

@criterion(4, "spherical-function grid: |phi| <= 1, quadratic bound, stable gap, <= 30 s")
def test_lemma_grid_suite():
    start = time.perf_counter()
    coarse = 2.0 ** np.arange(-6, 7)
    fine = 2.0 ** np.arange(-6, 6.25, 0.5)
    for space in list(R.values()) + list(H.values()):
        e = spaces.lemma_estimates(space, coarse, coarse)
        e2 = spaces.lemma_estimates(space, fine, fine)
        for est in (e, e2):
            assert est.max_abs_phi <= 1 + 1e-12
            assert est.worst_quadratic_ratio <= 1 + 1e-9
            assert est.min_gap_constant > 0
        assert abs(e2.min_gap_constant / e.min_gap_constant - 1) <= 0.05
    assert time.perf_counter() - start <= 30.0


# 5 ---------------------------------------------------------------------------------------

@criterion(5, "spectral vs physical L(t) for Gaussians on R^1..R^3 within 1e-5, <= 120 s")
def test_route_equivalence():
    start = time.perf_counter()
    grid = fn.dyadic_grid(0.5, 20)
    for space in R.values():
        prof = gaussian_profile(space, 0.5)
        spec = fn.lipschitz_curve(space, prof, grid)
        phys = fn.physical_lipschitz_curve(space, prof, grid)
        assert np.max(np.abs(spec.values / phys.values - 1)) <= 1e-5
    assert time.perf_counter() - start <= 120.0


# 6 ---------------------------------------------------------------------------------------

EUCLIDEAN_PROFILES = [(R[n], gaussian_profile(R[n], 0.5)) for n in (1, 2, 3)] + \
    [(R[3], bump_profile(R[3], 1.5))]
HYPERBOLIC_PROFILES = [(H[3], exp_h3_profile(H[3])), (H[3], gaussian_h3_profile(H[3], 1.0)),
                       (H[3], bump_profile(H[3], 2.0)), (H[2], bump_profile(H[2], 2.0))]


@criterion(6, "Plancherel norm equality: 1e-6 Euclidean, 1e-4 hyperbolic")
@pytest.mark.parametrize("space,prof", EUCLIDEAN_PROFILES,
                         ids=[f"{s}-{p.name}" for s, p in EUCLIDEAN_PROFILES])
def test_plancherel_euclidean(space, prof):
    assert spaces.plancherel_check(space, prof).rel_error <= 1e-6


@criterion(6, "Plancherel norm equality: 1e-6 Euclidean, 1e-4 hyperbolic")
@pytest.mark.parametrize("space,prof", HYPERBOLIC_PROFILES,
                         ids=[f"{s}-{p.name}" for s, p in HYPERBOLIC_PROFILES])
def test_plancherel_hyperbolic(space, prof):
    assert spaces.plancherel_check(space, prof).rel_error <= 1e-4


# 7 ---------------------------------------------------------------------------------------

@criterion(7, "modulus suite: MO indices, Zygmund verdicts on 12 instances, dyadic constant")
def test_modulus_suite():
    for alpha in (0.3, 0.7, 1.0, 1.5, 2.0):
        r = mod.mo_indices(mod.power(alpha, k=2))
        assert abs(r.m_lower - alpha) <= 1e-6 and abs(r.M_upper - alpha) <= 1e-6
    for lam in (1.0, -1.0):
        r = mod.mo_indices(mod.power_log(0.5, lam, k=2))
        assert abs(r.m_lower - 0.5) <= 0.05 and abs(r.M_upper - 0.5) <= 0.05
    assert len(MATRIX) == 12
    assert any(m.family is mod.Family.POWER and m.gamma == m.order_k for _, m, _, _ in MATRIX)
    for label, m, m_idx, M_idx in MATRIX:
        assert mod.zygmund_check(m, mod.ZygmundKind.Z0).holds is (m_idx > 0), label
        assert mod.zygmund_check(m, mod.ZygmundKind.ZK).holds is (M_idx < m.order_k), label
    for alpha in (0.5, 1.0, 1.5):
        d = fn.dyadic_sum_check(mod.power(alpha, k=2), 0.5)
        assert abs(d.bound_constant / (1 / (1 - 4.0 ** -alpha)) - 1) <= 1e-9


# 8 ---------------------------------------------------------------------------------------

def _bundled():
    out = [(R[n], gaussian_profile(R[n], 0.5)) for n in (1, 2, 3)]
    out += [(R[n], power_profile(a, n, cut)) for n in (1, 3) for a in (0.5, 1.5)
            for cut in ("hard", "smooth")]
    out += [(H[3], exp_h3_profile(H[3])), (H[3], gaussian_h3_profile(H[3], 1.0)),
            (H[3], power_profile(1.0, 3)), (H[2], power_profile(0.5, 2))]
    out += [(R[3], spaces.with_numeric_spectrum(R[3], bump_profile(R[3], 1.5))),
            (H[3], spaces.with_numeric_spectrum(H[3], bump_profile(H[3], 2.0)))]
    return out


BUNDLED = _bundled()


@criterion(8, "proof diagnostics: J1+J2 additivity 1e-8, J2 <= 4 W, J1 <= 2(K1+K2), IBP 1e-6")
@pytest.mark.parametrize("space,prof", BUNDLED, ids=[f"{s}-{p.name}" for s, p in BUNDLED])
def test_proof_diagnostics(space, prof):
    for t in fn.dyadic_grid(0.5, 20)[::4]:
        js = fn.j_split(space, prof, t)
        L2 = fn.lipschitz_squared(space, prof, t).value
        assert abs(js.J1 + js.J2 - L2) <= 1e-8 * L2
        assert js.J2 <= 4 * fn.weighted_tail(space, prof, t).value
        ks = fn.k_split(space, prof, t)
        assert js.J1 <= 2 * (ks.K1 + ks.K2)
        assert fn.aux_ibp_check(space, prof, t).rel_error <= 1e-6


# 9 ---------------------------------------------------------------------------------------

@criterion(9, "determinism: two runs of each recipe give byte-identical CSVs")
@pytest.mark.parametrize("recipe", sorted(cli.RECIPES))
def test_recipe_determinism(tmp_path, recipe):
    runner = CliRunner()
    for sub in ("a", "b"):
        runner.invoke(cli.main, ["equivalence", "--recipe", recipe, "--out", str(tmp_path / sub)],
                      env={})
    csvs = sorted(p.name for p in (tmp_path / "a").glob("*.csv"))
    assert csvs == ["lipschitz.csv", "summary.csv", "tail.csv"]
    for name in csvs:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
