import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ssdkit.builtins import builtin_space
from ssdkit.errors import AsymmetricForm, DimensionMismatch, InvalidParams, NotBanach, NotBanachSpace
from ssdkit.space import block_diag_space, make_space, spectral_norm

from conftest import BANACH_BUILTINS

floats = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def vec(n):
    return arrays(np.float64, n, elements=floats)


def test_swap_matrix_is_banach():
    sp = make_space([[0, 1, 0], [1, 0, 0], [0, 0, 1]], require_banach=True)
    assert sp.banach
    assert sp.dim == 3


def test_scaled_identity_not_banach():
    with pytest.raises(NotBanach):
        make_space(2 * np.eye(2), require_banach=True)
    assert not make_space(2 * np.eye(2)).banach


def test_cyclic_form_rejected():
    # b1c2 + b2c3 + b3c1 has matrix with ones above the diagonal and in the corner
    S = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], dtype=float)
    with pytest.raises(AsymmetricForm):
        make_space(S)


@pytest.mark.parametrize("S", [np.zeros((2, 3)), np.zeros((0, 0)), [[np.nan]]])
def test_bad_matrices(S):
    with pytest.raises(InvalidParams):
        make_space(S)


def test_form_values(swap3, pairing1):
    assert swap3.form([1, 0, 0], [0, 1, 0]) == 1.0
    assert pairing1.form([1, 2], [3, 4]) == 10.0
    assert swap3.form([1.5, -2, 3], [0, 0, 0]) == 0.0


def test_q_values(swap3, pairing1):
    assert swap3.q([1, -1, 2]) == pytest.approx(1.0, abs=1e-15)
    assert pairing1.q([2, 3]) == pytest.approx(6.0, abs=1e-15)
    assert swap3.q(np.zeros(3)) == 0.0


def test_p_values(pairing1):
    assert pairing1.p(np.zeros(2)) == 0.0
    assert pairing1.p([1, 1]) == pytest.approx(2.0, abs=1e-15)
    assert pairing1.p([1, -1]) == pytest.approx(0.0, abs=1e-15)


def test_p_requires_banach():
    sp = make_space(2 * np.eye(2))
    with pytest.raises(NotBanachSpace):
        sp.p([1.0, 0.0])


def test_dimension_checked(pairing1):
    with pytest.raises(DimensionMismatch):
        pairing1.q([1.0, 2.0, 3.0])


def test_spectral_norm_against_svd():
    r = np.random.default_rng(3)
    for _ in range(20):
        M = r.standard_normal((5, 5))
        S = M + M.T
        assert spectral_norm(S) == pytest.approx(np.linalg.svd(S, compute_uv=False)[0], rel=1e-8)


def test_product_is_block_diagonal(swap3, pairing1):
    sp = block_diag_space(swap3, pairing1)
    assert sp.dim == 5
    assert np.array_equal(sp.S[:3, :3], swap3.S)
    assert np.array_equal(sp.S[3:, 3:], pairing1.S)
    assert not sp.S[:3, 3:].any()
    assert builtin_space("product(r3-swap,pairing(1))").dim == 5


@given(vec(3), vec(3))
def test_form_symmetric_exactly(b, c):
    sp = builtin_space("r3-swap")
    assert sp.form(b, c) == sp.form(c, b)


@pytest.mark.parametrize("name", BANACH_BUILTINS)
@given(data=st.data())
def test_expansion_identity(name, data):
    sp = builtin_space(name)
    b, c = data.draw(vec(sp.dim)), data.draw(vec(sp.dim))
    lhs = sp.q(b - c)
    rhs = sp.q(b) - sp.form(b, c) + sp.q(c)
    assert abs(lhs - rhs) <= 1e-9 * (1 + abs(sp.q(b)) + abs(sp.q(c)))


@pytest.mark.parametrize("name", BANACH_BUILTINS)
@given(data=st.data())
def test_cauchy_schwarz_and_p(name, data):
    sp = builtin_space(name)
    b, c = data.draw(vec(sp.dim)), data.draw(vec(sp.dim))
    assert abs(sp.form(b, c)) <= np.linalg.norm(b) * np.linalg.norm(c) + 1e-9
    assert sp.p(b) >= -1e-12 * (1 + b @ b)
    assert abs(sp.p(b) - sp.p(c)) <= np.linalg.norm(b - c) * (np.linalg.norm(b) + np.linalg.norm(c)) + 1e-9 * (1 + b @ b + c @ c)
