import numpy as np
import pytest

from titchmarsh import _backend, _purepy

_kernels = pytest.importorskip("titchmarsh._kernels")

CASES = [(0, 1), (0, 2), (0, 3), (0, 5), (1, 2), (1, 3)]


@pytest.mark.parametrize("hyp,n", CASES)
def test_compiled_matches_python(hyp, n):
    lam = np.concatenate([[0.0], np.geomspace(1e-4, 200, 40)])
    t = np.concatenate([[0.0], np.geomspace(1e-6, 8, 40)])
    p1, o1 = _purepy.phi_pair_grid(hyp, n, lam, t)
    p2, o2 = _kernels.phi_pair_grid(hyp, n, lam, t)
    assert np.allclose(p1, p2, rtol=0, atol=1e-13)
    assert np.allclose(o1, o2, rtol=1e-12, atol=1e-300)


def test_max_pair_ratio_matches():
    v = np.abs(np.random.default_rng(1).standard_normal(700)) + 0.05
    assert _kernels.max_pair_ratio(v) == _purepy.max_pair_ratio(v)
    brute = max(v[i] / v[j] for i in range(50) for j in range(i, 50))
    assert _purepy.max_pair_ratio(v[:50]) == brute


def test_backend_name():
    assert _backend.NAME in ("compiled", "python")
