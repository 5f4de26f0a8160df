import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ssdkit.builtins import builtin_set, builtin_space
from ssdkit.errors import NotBanachDual, SingularForm
from ssdkit.fitzpatrick import theta_function
from ssdkit.gossez import dual_axioms_check, gossez_extension_check, gossez_membership, make_dual, ni_check
from ssdkit.grid import GridSpec
from ssdkit.sets import make_set, maximality_falsifier
from ssdkit.space import make_space

DUAL_GRID = GridSpec.from_step(-2, 2, 0.1, 2)


def test_identity_form_is_self_dual(hilbert2):
    dual = make_dual(hilbert2)
    assert dual.involutive and dual.banach_dual
    assert np.array_equal(dual.dual_form, np.eye(2))


def test_pairing_dual_form(pairing1):
    dual = make_dual(pairing1)
    assert np.array_equal(dual.dual_form, [[0, 1], [1, 0]])
    assert dual.qt([2.0, 3.0]) == pytest.approx(6.0)


def test_non_involutive_dual_disables_pt():
    sp = make_space(np.diag([0.5, 0.5]))
    dual = make_dual(sp)
    assert not dual.involutive and not dual.banach_dual
    assert np.allclose(dual.dual_form, 2 * np.eye(2))
    with pytest.raises(NotBanachDual):
        dual.pt([1.0, 0.0])
    assert dual_axioms_check(dual).passed


def test_singular_form_rejected():
    with pytest.raises(SingularForm):
        make_dual(make_space(np.diag([1.0, 0.0])))


@pytest.mark.parametrize("name", ["pairing(1)", "pairing(2)", "r3-swap", "hilbert-identity(3)",
                                  "hilbert-negative(2)", "product(r3-swap,pairing(1))"])
def test_dual_axioms(name):
    rep = dual_axioms_check(make_dual(builtin_space(name)))
    assert rep.passed, rep.table()
    assert rep["hat_identity"].status == "pass"


@given(st.integers(0, 10_000))
def test_dual_axioms_random_invertible(seed):
    r = np.random.default_rng(seed)
    M = r.standard_normal((3, 3))
    S = M + M.T + np.diag(np.sign(r.standard_normal(3)) * 3)
    rep = dual_axioms_check(make_dual(make_space(S)), n_random=200, tol=1e-8)
    assert rep.passed, rep.table()


def test_membership_examples(pairing1, diagonal):
    dual = make_dual(pairing1)
    member, gap, gap2 = gossez_membership(pairing1, dual, diagonal, dual.iota([1.0, -1.0]))
    assert not member and gap == pytest.approx(-1.0)
    member, gap, _ = gossez_membership(pairing1, dual, diagonal, [0.0, 0.0])
    assert member and gap == pytest.approx(0.0)
    for a in diagonal.points[::10]:
        assert gossez_membership(pairing1, dual, diagonal, dual.iota(a))[0]


def test_ni_diagonal_closed_form(pairing1, diagonal):
    dual = make_dual(pairing1)
    rep = ni_check(pairing1, dual, diagonal, DUAL_GRID)
    assert rep.passed
    D = DUAL_GRID.nodes()
    gap = theta_function(diagonal).values(D) - dual.qt(D)
    # the diagonal sample has step 0.05, so every midpoint (s1+s2)/2 on this grid is a sample point
    assert gap == pytest.approx(0.25 * (D[:, 0] - D[:, 1]) ** 2, abs=1e-9)


def test_ni_fails_for_origin(pairing1):
    A = make_set(pairing1, [[0.0, 0.0]])
    rep = ni_check(pairing1, make_dual(pairing1), A, GridSpec.from_step(-1, 1, 0.5, 2))
    row = rep["theta_ge_qt"]
    assert row.status == "fail"
    assert row.max_violation == pytest.approx(1.0)
    assert row.witness in ([1.0, 1.0], [-1.0, -1.0])


def test_ni_gap_zero_on_image(pairing1, diagonal):
    dual = make_dual(pairing1)
    iA = dual.iota(diagonal.points)
    assert theta_function(diagonal).values(iA) - dual.qt(iA) == pytest.approx(0.0, abs=1e-12)


def test_extension_diagonal(pairing1, diagonal):
    dual = make_dual(pairing1)
    rep = gossez_extension_check(pairing1, dual, diagonal, DUAL_GRID)
    assert rep.passed, rep.table()
    D = DUAL_GRID.nodes()
    member, gap, _ = gossez_membership(pairing1, dual, diagonal, D)
    tol = 1e-9
    expected = (D[:, 0] - D[:, 1]) ** 2 <= 4 * tol
    assert np.array_equal(member, expected)


def test_extension_origin(pairing1):
    A = make_set(pairing1, [[0.0, 0.0]])
    dual = make_dual(pairing1)
    assert gossez_membership(pairing1, dual, A, [0.0, 0.0])[0]
    rep = gossez_extension_check(pairing1, dual, A, GridSpec.from_step(-1, 1, 0.5, 2))
    assert rep["image_inclusion"].passed
    assert rep["extension_equals_coincidence"].status == "skipped"
    assert rep["conjugate_chain"].passed


@pytest.mark.parametrize("spec,space", [
    ({"kind": "diagonal", "step": 0.1}, "pairing(1)"),
    ({"kind": "sgn-graph", "radius": 2.0, "step": 0.1}, "pairing(1)"),
    ({"kind": "helix", "lam": 1.0, "lo": -3, "hi": 3, "step": 0.1}, "r3-swap"),
    ({"kind": "line", "v": [1, -1, 2]}, "r3-swap"),
])
def test_inclusion_and_chain_builtin_sets(spec, space):
    sp = builtin_space(space)
    A = builtin_set(spec, sp)
    dual = make_dual(sp)
    grid = GridSpec.from_step(-1, 1, 0.25, sp.dim)
    rep = gossez_extension_check(sp, dual, A, grid)
    for row in ("image_inclusion", "membership_sign", "conjugate_chain", "theta_two_route", "phi_dual_on_image"):
        assert rep[row].passed, rep.table()


def test_not_falsified_extension_when_ni_holds(pairing1):
    A = builtin_set({"kind": "sgn-graph", "radius": 3.0, "step": 0.02}, pairing1)
    dual = make_dual(pairing1)
    grid = GridSpec.from_step(-1.5, 1.5, 0.1, 2)
    assert maximality_falsifier(pairing1, A, grid, 0.2) == []
    rep = gossez_extension_check(pairing1, dual, A, grid)
    assert rep["extension_near_image"].status == "not-falsified"
