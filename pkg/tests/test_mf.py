import pytest
from hypothesis import given

from koszulainf.exact_algebra import AlgebraError, BElement, ExtElement, Polynomial, superpotential, tensor_basis
from koszulainf.mf import (
    MFData,
    delta_E,
    delta_squared_check,
    euler_operator,
    gamma_from_W,
    h_formula,
    koszul_diff,
    landau_ginzburg,
    retract_h,
    retract_i,
    retract_p,
    supercommutator,
    tilde_diff,
)
from tests.strategies import b_elements


def homogeneous_parts(b: BElement):
    ev, od = b.split_parity()
    return [x for x in (ev, od) if x]


@pytest.mark.parametrize("genus", [2, 3, 4])
def test_gamma_and_euler_relation(genus):
    mf = landau_ginzburg(genus)
    assert mf.euler_check()
    assert delta_squared_check(mf)
    assert MFData.from_json(mf.to_json()) == mf


def test_gamma_from_W_rejects_bad_input():
    with pytest.raises(AlgebraError):
        gamma_from_W(Polynomial(3))
    with pytest.raises(AlgebraError):
        gamma_from_W(Polynomial(3, {(1, 0, 0): 1}))


def test_mfdata_json_detects_tampering():
    obj = landau_ginzburg(2).to_json()
    obj["gamma"][0] = Polynomial(3, {(2, 0, 0): 1}).to_json()
    with pytest.raises(AlgebraError):
        MFData.from_json(obj)


@given(b_elements())
def test_koszul_diff_is_commutator_with_euler_field(b):
    eta = euler_operator(3)
    for x in homogeneous_parts(b):
        assert koszul_diff(x) == supercommutator(eta, x)


@given(b_elements())
def test_tilde_diff_is_commutator_with_twisted_operator(b):
    # the correction term is -[gamma ^, -], so d~ = [iota_eta - gamma ^, -]
    mf = landau_ginzburg(3)
    eta = euler_operator(3)
    op = eta - (delta_E(mf) - eta)
    for x in homogeneous_parts(b):
        assert tilde_diff(x, mf) == supercommutator(op, x)
    assert op * op == BElement.from_poly(superpotential(3)).scale(-1)


@given(b_elements())
def test_differentials_square_to_zero(b):
    mf = landau_ginzburg(2)
    assert not koszul_diff(koszul_diff(b))
    assert not tilde_diff(tilde_diff(b, mf), mf)


def test_retract_identities_low_degree():
    n = 3
    for key in tensor_basis(n, 3):
        b = BElement(n, {key: 1})
        ip = retract_i(retract_p(b))
        assert ip - b == koszul_diff(retract_h(b)) + retract_h(koszul_diff(b))
        assert not retract_h(retract_h(b))
        assert not retract_p(retract_h(b))
    for m in range(8):
        a = ExtElement.basis(n, m)
        assert retract_p(retract_i(a)) == a
        assert not retract_h(retract_i(a))


def test_h_is_negative_of_formula():
    b = BElement(3, {((2, 1, 0), 1, 4): 3})
    assert retract_h(b) == -h_formula(b)


def test_retract_i_needs_v_side():
    with pytest.raises(AlgebraError):
        retract_i(ExtElement.gen(3, 1, side="Vdual"))


def test_delta_squared_is_w():
    mf = landau_ginzburg(3)
    D = delta_E(mf)
    assert D * D == BElement.from_poly(superpotential(3))
