import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linprog

from ssdkit.simplex import envelope_value, solve_lp


def scipy_envelope(points, values, x):
    """Oracle: HiGHS on the same convex-combination LP."""
    n = points.shape[0]
    A = np.vstack([points.T, np.ones((1, n))])
    b = np.concatenate([x, [1.0]])
    r = linprog(values, A_eq=A, b_eq=b, bounds=[(0, None)] * n, method="highs")
    return r.fun if r.status == 0 else np.inf


def test_two_point_envelope_midpoint():
    val, w = envelope_value(np.array([[-1.0, -1.0], [1.0, 1.0]]), np.array([1.0, 1.0]), np.zeros(2))
    assert val == pytest.approx(1.0, abs=1e-12)
    assert w == pytest.approx([0.5, 0.5], abs=1e-12)


def test_outside_hull_is_infinite():
    val, w = envelope_value(np.array([[0.0], [1.0]]), np.array([0.0, 0.0]), np.array([2.0]))
    assert val == np.inf and w is None


def test_standard_lp_against_scipy():
    c = np.array([-1.0, -2.0, 0.0, 0.0])
    A = np.array([[1.0, 1.0, 1.0, 0.0], [1.0, 3.0, 0.0, 1.0]])
    b = np.array([4.0, 6.0])
    res = solve_lp(c, A, b)
    ref = linprog(c, A_eq=A, b_eq=b, bounds=[(0, None)] * 4, method="highs")
    assert res.status == "optimal"
    assert res.value == pytest.approx(ref.fun, abs=1e-10)
    assert A @ res.x == pytest.approx(b, abs=1e-10)


def test_infeasible():
    res = solve_lp(np.ones(2), np.array([[1.0, 1.0]]), np.array([-1.0]))
    assert res.status == "infeasible"


@given(st.integers(0, 10_000), st.integers(1, 3), st.integers(2, 25))
def test_envelope_matches_highs(seed, d, n):
    r = np.random.default_rng(seed)
    pts = r.uniform(-1, 1, size=(n, d))
    vals = r.uniform(-1, 1, size=n)
    x = pts.T @ r.dirichlet(np.ones(n)) if seed % 3 else r.uniform(-1.5, 1.5, size=d)
    ours, _ = envelope_value(pts, vals, x)
    ref = scipy_envelope(pts, vals, x)
    if np.isinf(ref):
        assert np.isinf(ours)
    else:
        assert ours == pytest.approx(ref, abs=1e-8)
