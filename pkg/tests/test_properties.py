"""Invariants checked on randomly drawn inputs."""

import csv
import io
import math

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from titchmarsh import equivalence as eq
from titchmarsh import functionals as fn
from titchmarsh import modulus as mod
from titchmarsh import spaces
from titchmarsh.profiles import power_profile

SPACES = [spaces.SpectralSpace.euclidean(n) for n in (1, 2, 3, 4)] + \
    [spaces.SpectralSpace.hyperbolic(n) for n in (2, 3)]

space_st = st.sampled_from(SPACES)
lam_st = st.floats(0.0, 500.0)
t_st = st.floats(0.0, 20.0)
slow = settings(max_examples=15, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@given(space_st, lam_st, t_st)
def test_phi_bounded(space, lam, t):
    p = spaces.phi(space, lam, t)
    assert -1.0 - 1e-12 <= p <= 1.0 + 1e-12


@given(space_st, lam_st)
def test_phi_at_origin(space, lam):
    assert spaces.phi(space, lam, 0.0) == 1.0


@given(space_st, st.lists(st.floats(0.0, 300.0), min_size=1, max_size=20), st.floats(1e-8, 20.0))
def test_multiplier_in_range(space, lam, t):
    _, v = spaces.translate_spectral(space, np.array(lam), np.ones(len(lam)), t)
    assert np.all((v >= 0) & (v <= 4 + 1e-12))


@given(space_st, st.floats(1e-3, 50.0), st.floats(1e-4, 5.0))
def test_quadratic_bound(space, lam, t):
    om = spaces.one_minus_phi(space, lam, t)
    assert om <= t * t * (lam * lam + space.rho ** 2) * (1 + 1e-9)


@given(st.floats(0.05, 1.95), st.sampled_from([2.0, 3.0]))
def test_power_indices(alpha, k):
    r = mod.mo_indices(mod.power(alpha, k=k))
    assert abs(r.m_lower - alpha) <= 1e-6 and abs(r.M_upper - alpha) <= 1e-6


@given(st.floats(0.05, 3.0), st.floats(1.0, 4.0), st.floats(0.0, 3.0))
def test_promotion_preserves_values(gamma, k, extra):
    m = mod.power_log(gamma, -1.0, k=k)
    p = mod.promote_order(m, k + extra)
    t = np.geomspace(1e-12, 2.0, 101)
    assert np.array_equal(m(t), p(t))


@given(st.floats(0.1, 1.9))
def test_z0_constant_for_powers(alpha):
    r = mod.zygmund_check(mod.power(alpha, k=2), mod.ZygmundKind.Z0)
    assert r.holds is True
    assert math.isclose(r.constant, 1.0 / alpha, rel_tol=1e-8)


@given(st.floats(0.1, 1.9), st.floats(1e-3, 1.0))
def test_dyadic_sum_geometric(alpha, t):
    d = fn.dyadic_sum_check(mod.power(alpha, k=2), t)
    assert math.isclose(d.bound_constant, 1.0 / (1.0 - 4.0 ** -alpha), rel_tol=1e-9)


@slow
@given(st.sampled_from([1, 2, 3]), st.floats(0.2, 1.8), st.integers(0, 14))
def test_power_tail_exact(n, alpha, j):
    space = spaces.SpectralSpace.euclidean(n)
    t = 2.0 ** -j
    p = 2 * alpha + n - 1
    v = fn.tail_value(space, power_profile(alpha, n), t).value
    assert math.isclose(v, t ** p / p, rel_tol=1e-10)


@slow
@given(st.sampled_from(SPACES[:3] + SPACES[5:]), st.floats(0.2, 1.8), st.floats(1e-5, 0.5))
def test_split_additivity(space, alpha, t):
    prof = power_profile(alpha, space.n)
    js = fn.j_split(space, prof, t)
    L2 = fn.lipschitz_squared(space, prof, t).value
    assert abs(js.J1 + js.J2 - L2) <= 1e-8 * L2
    assert js.J1 <= 2 * sum((lambda k: (k.K1, k.K2))(fn.k_split(space, prof, t)))


@slow
@given(st.floats(0.01, 100.0))
def test_scale_robustness(c):
    space = spaces.SpectralSpace.euclidean(1)
    prof, m = eq.power_family(space, 0.5)
    a = eq.forward_check(space, prof, m, J=10)
    b = eq.forward_check(space, prof.scaled(c), m, J=10)
    assert math.isclose(b.ratio_sup, c * a.ratio_sup, rel_tol=1e-9)
    la = eq.backward_check(space, prof, m, J=10)
    lb = eq.backward_check(space, prof.scaled(c), m, J=10)
    assert math.isclose(lb.ratio_sup, math.sqrt(c) * la.ratio_sup, rel_tol=1e-8)


@given(st.lists(st.floats(0.0, 1e300), min_size=1, max_size=12))
def test_csv_values_round_trip(vals):
    t = fn.dyadic_grid(1.0, len(vals) - 1)
    c = fn.FunctionalCurve(t, vals, np.zeros(len(vals)), "tail")
    rows = list(csv.reader(io.StringIO(c.to_csv())))[1:]
    assert [float(r[2]) for r in rows] == [float(v) for v in vals]
