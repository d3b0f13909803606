"""The numba loops and the numpy fallbacks must compute the same thing."""

import numpy as np
import pytest

from wealthex import _accel, kernels

pytestmark = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")


@pytest.fixture
def rng():
    return np.random.default_rng(7)


@pytest.mark.parametrize("n", [16, 101, 1000])
def test_self_convolution_flavours_agree(rng, n):
    a = rng.random(n)
    loops = kernels._self_convolve_loops(a, 0.01)
    vec = kernels._self_convolve_numpy(a, 0.01)
    np.testing.assert_allclose(loops, vec, rtol=1e-13, atol=1e-15)


def test_literal_operator_flavours_agree(rng):
    f = rng.random(40)
    np.testing.assert_allclose(
        kernels._literal_operator_loops(f, 0.1), kernels._literal_operator_numpy(f, 0.1), rtol=1e-13
    )


def test_exchange_flavours_bit_identical(rng):
    q = 2.0**-40
    w0 = np.floor(rng.exponential(1.0, 1000) / q) * q
    perm = rng.permutation(1000)
    first, second = perm[0::2], perm[1::2]
    eps = rng.random(500)
    a, b = w0.copy(), w0.copy()
    kernels._exchange_pairs_loops(a, first, second, eps, q)
    kernels._exchange_pairs_numpy(b, first, second, eps, q)
    assert np.array_equal(a, b)
    assert a.sum() == w0.sum()


def test_dispatch_follows_flag(monkeypatch, rng):
    a = rng.random(50)
    monkeypatch.setattr(_accel, "USE_NUMBA", False)
    assert np.array_equal(kernels.self_convolve_direct(a, 0.5), kernels._self_convolve_numpy(a, 0.5))
    monkeypatch.setattr(_accel, "USE_NUMBA", True)
    assert np.array_equal(kernels.self_convolve_direct(a, 0.5), kernels._self_convolve_loops(a, 0.5))


def test_env_flag_disables_numba(monkeypatch):
    monkeypatch.setenv("WEALTHEX_DISABLE_NUMBA", "1")
    assert _accel._disabled_by_env()
    monkeypatch.setenv("WEALTHEX_DISABLE_NUMBA", "0")
    assert not _accel._disabled_by_env()
