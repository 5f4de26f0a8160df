import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ssdkit.legendre import brute_conjugate, conjugate_1d, discrete_conjugate, lower_hull


def oracle_1d(x, f, s):
    """Oracle: direct max over all samples."""
    ok = np.isfinite(f)
    return (s[:, None] * x[None, ok] - f[None, ok]).max(axis=1)


@given(arrays(np.float64, st.integers(1, 40), elements=st.floats(-5, 5)))
def test_1d_matches_direct_max(f):
    x = np.linspace(-2, 2, f.size)
    s = np.linspace(-6, 6, 53)
    assert conjugate_1d(x, f, s) == pytest.approx(oracle_1d(x, f, s), abs=1e-10)


def test_infinite_values_ignored():
    x = np.linspace(-1, 1, 5)
    f = np.array([np.inf, 0.0, 1.0, np.inf, 2.0])
    s = np.array([-1.0, 0.0, 3.0])
    assert conjugate_1d(x, f, s) == pytest.approx(oracle_1d(x, f, s))
    assert np.all(conjugate_1d(x, np.full(5, np.inf), s) == -np.inf)


def test_half_square_self_conjugate_on_nodes():
    x = np.linspace(-2, 2, 401)
    s = np.linspace(-1, 1, 101)
    # slopes inside the primal box: sup attained at x = s, which is a node
    assert conjugate_1d(x, 0.5 * x * x, s) == pytest.approx(0.5 * s * s, abs=1e-12)


def test_lower_hull_convex():
    x = np.linspace(0, 1, 30)
    f = np.random.default_rng(1).uniform(size=30)
    hx, hf = lower_hull(x, f)
    slopes = np.diff(hf) / np.diff(hx)
    assert np.all(np.diff(slopes) > 0)
    assert hx[0] == x[0] and hx[-1] == x[-1]


@given(st.integers(0, 1000))
def test_2d_factored_matches_oracle(seed):
    r = np.random.default_rng(seed)
    ax = [np.linspace(-1, 1, 9), np.linspace(-2, 1, 7)]
    vals = r.uniform(-1, 1, size=(9, 7))
    vals[r.uniform(size=vals.shape) < 0.2] = np.inf
    vals[0, 0] = 0.0
    dual = [np.linspace(-3, 3, 11), np.linspace(-2, 2, 5)]
    got = discrete_conjugate(vals, ax, dual).reshape(-1)
    X = np.stack(np.meshgrid(*ax, indexing="ij"), -1).reshape(-1, 2)
    S = np.stack(np.meshgrid(*dual, indexing="ij"), -1).reshape(-1, 2)
    F = vals.reshape(-1)
    ok = np.isfinite(F)
    ref = (S @ X[ok].T - F[ok]).max(axis=1)
    assert got == pytest.approx(ref, abs=1e-10)
    assert brute_conjugate(X, F, S) == pytest.approx(ref, abs=1e-12)
