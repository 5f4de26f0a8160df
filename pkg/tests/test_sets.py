import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ssdkit.builtins import builtin_set, builtin_space, list_builtins, parse_call, sample_set
from ssdkit.errors import DimensionMismatch, EmptySet, InvalidParams, NotQPositive, UnknownBuiltin
from ssdkit.grid import GridSpec
from ssdkit.sets import (
    is_q_positive,
    make_set,
    maximality_falsifier,
    min_pairwise_q,
    min_q_to,
    read_points_csv,
    sample_helix,
    write_points_csv,
)


def brute_min_pair(space, pts):
    """Oracle: double loop over ordered pairs."""
    best = np.inf
    for i in range(len(pts)):
        for j in range(len(pts)):
            if i != j:
                best = min(best, space.q(pts[i] - pts[j]))
    return best


def test_hilbert_identity_any_set_positive(hilbert2):
    pts = np.random.default_rng(0).standard_normal((50, 2))
    ok, viol = is_q_positive(hilbert2, pts)
    assert ok and viol is None


def test_hilbert_negative_two_points_fail():
    sp = builtin_space("hilbert-negative(2)")
    ok, viol = is_q_positive(sp, [[0.0, 0.0], [1.0, 0.5]])
    assert not ok
    assert viol.value == pytest.approx(-0.5 * 1.25)
    assert is_q_positive(sp, [[3.0, 1.0]])[0]


def test_helix_lambda_one_positive(swap3):
    pts, _ = sample_helix(1.0, -10.0, 10.0, 401)
    assert is_q_positive(swap3, pts)[0]


def test_helix_half_fails_with_witness(swap3):
    pts, _ = sample_helix(0.5, -10.0, 10.0, 401)
    ok, viol = is_q_positive(swap3, pts)
    assert not ok
    b, c = viol.witness
    assert swap3.q(b - c) == pytest.approx(viol.value, abs=1e-15)
    # the minimum over the full sample is no larger than over any subsample
    assert viol.value <= brute_min_pair(swap3, pts[::4]) + 1e-15


def test_min_pair_matches_double_loop(swap3):
    pts, _ = sample_helix(0.5, -3.0, 3.0, 41)
    value, i, j = min_pairwise_q(swap3, pts)
    assert value == pytest.approx(brute_min_pair(swap3, pts), abs=1e-14)
    assert i != j


def test_single_point_set(pairing1):
    assert min_pairwise_q(pairing1, [[1.0, 2.0]])[0] == np.inf


def test_make_set_rejects(pairing1):
    with pytest.raises(NotQPositive) as e:
        make_set(pairing1, [[0.0, 1.0], [1.0, 0.0]])
    assert e.value.violation.value == pytest.approx(-1.0)
    with pytest.raises(EmptySet):
        make_set(pairing1, np.empty((0, 2)))
    with pytest.raises(DimensionMismatch):
        make_set(pairing1, [[1.0, 2.0, 3.0]])


def test_maximality_diagonal_empty(pairing1):
    A = builtin_set({"kind": "diagonal", "lo": -3.0, "hi": 3.0, "step": 0.05}, pairing1)
    assert maximality_falsifier(pairing1, A, GridSpec.from_step(-2, 2, 0.1, 2), 0.2) == []


def test_maximality_singleton_negative_space():
    sp = builtin_space("hilbert-negative(2)")
    A = make_set(sp, [[0.0, 0.0]])
    assert maximality_falsifier(sp, A, GridSpec.from_step(-1, 1, 0.25, 2), 0.1) == []


def test_maximality_single_point_found(pairing1):
    A = make_set(pairing1, [[1.0, 1.0]])
    found = maximality_falsifier(pairing1, A, GridSpec.from_step(0, 3, 0.5, 2), 0.2)
    assert found
    at = {tuple(v.witness[0]): v for v in found}
    # q((1,1) - (2,2)) = 1, so inf q = 1 and the violation value is -1
    assert at[(2.0, 2.0)].value == pytest.approx(-1.0)


def test_line_through_1_neg1_2(swap3):
    A = builtin_set({"kind": "line", "v": [1, -1, 2]}, swap3)
    assert len(A) > 10


def test_min_q_zero_on_own_points(diagonal, pairing1):
    vals, arg = min_q_to(pairing1, diagonal.points, diagonal.points)
    assert np.all(vals == 0.0)
    assert np.array_equal(arg, np.arange(len(diagonal)))


@given(arrays(np.float64, 3, elements=st.floats(-5, 5)).filter(lambda v: v[0] * v[1] + 0.5 * v[2] ** 2 >= 0))
def test_line_positivity(v):
    sp = builtin_space("r3-swap")
    pts = np.linspace(-2, 2, 21)[:, None] * v[None, :]
    assert min_pairwise_q(sp, pts)[0] >= -1e-12 * (1 + v @ v)


@given(st.lists(st.tuples(st.floats(-3, 3), st.floats(-3, 3)), min_size=1, max_size=15))
def test_monotone_graph_sets_positive(raw):
    xs = np.sort([r[0] for r in raw])
    ys = np.sort([r[1] for r in raw])
    sp = builtin_space("pairing(1)")
    A = sample_set({"kind": "monotone-graph", "breakpoints": np.c_[xs, ys].tolist(), "step": 0.25}, sp)[0]
    assert min_pairwise_q(sp, A)[0] >= -1e-12


def test_sgn_graph_and_product():
    sp = builtin_space("pairing(1)")
    assert builtin_set({"kind": "sgn-graph", "radius": 2.0, "step": 0.1}, sp)
    prod = builtin_space("product(pairing(1),hilbert-identity(1))")
    A = builtin_set({"kind": "product", "first": {"kind": "diagonal", "count": 5},
                     "second": {"kind": "custom", "points": [[0.0], [1.0]]}}, prod)
    assert len(A) == 10


def test_builtin_errors(pairing1, swap3):
    with pytest.raises(UnknownBuiltin):
        builtin_space("nope(3)")
    with pytest.raises(UnknownBuiltin):
        sample_set({"kind": "spiral"}, pairing1)
    with pytest.raises(InvalidParams):
        sample_set({"kind": "diagonal"}, swap3)
    with pytest.raises(InvalidParams):
        builtin_space("pairing(0)")
    with pytest.raises(InvalidParams):
        parse_call("pairing(1")


def test_pairing_matrix():
    sp = builtin_space("pairing(1)")
    assert sp.dim == 2
    assert np.array_equal(sp.S, [[0, 1], [1, 0]])


def test_listing():
    text = list_builtins()
    for name in ("r3-swap", "pairing(m)", "diagonal", "helix"):
        assert name in text


def test_csv_round_trip(tmp_path, swap3):
    pts, _ = sample_helix(1.0, -1, 1, 7)
    path = tmp_path / "pts.csv"
    write_points_csv(path, pts)
    back = read_points_csv(path, 3)
    assert np.array_equal(back, pts)
    A = builtin_set({"kind": "custom-file", "path": "pts.csv"}, swap3, base_dir=tmp_path)
    assert len(A) == 7


def test_csv_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n3\n", encoding="utf-8")
    with pytest.raises(InvalidParams):
        read_points_csv(bad)
    bad.write_text("1,x\n", encoding="utf-8")
    with pytest.raises(InvalidParams):
        read_points_csv(bad)
    bad.write_text("\n", encoding="utf-8")
    with pytest.raises(EmptySet):
        read_points_csv(bad)
