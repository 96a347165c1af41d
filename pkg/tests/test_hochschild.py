import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from koszulainf.exact_algebra import AlgebraError, ExtElement
from koszulainf.hochschild import (
    AInfStructure,
    Cochain,
    ad_exp,
    ainf_from_mc,
    ainf_residual,
    check_strict_part,
    cochain_from_json,
    concatenation_coefficient,
    entry_parity,
    gauge_phi,
    gerstenhaber,
    hoch_diff,
    identity_cochain,
    linear_extensions,
    mc_from_ainf,
    mc_residual_cochain,
    morphism_residual,
    sparse_cochain,
    wedge_cochain,
)
from koszulainf.mf import landau_ginzburg
from koszulainf.polyvector import hkr
from koszulainf.transfer import TransferEngine


def random_cochain(rng: random.Random, arity: int, parity: int, entries: int = 8, cap: int = 8) -> Cochain:
    ent = {}
    for _ in range(entries):
        t = tuple(rng.randrange(8) for _ in range(arity))
        outs = [m for m in range(8) if entry_parity(t, m) == parity]
        ent[t] = {rng.choice(outs): Fraction(rng.choice([-3, -2, -1, 1, 2, 3]))}
    return sparse_cochain(3, ent, cap, parity)


def random_tuple(rng, d):
    return tuple(rng.randrange(8) for _ in range(d))


seeds = st.integers(0, 10 ** 6)


@given(seeds)
def test_differential_is_bracket_with_product(seed):
    rng = random.Random(seed)
    phi = random_cochain(rng, rng.randint(1, 3), rng.randint(0, 1), 20)
    D, B = hoch_diff(phi), gerstenhaber(wedge_cochain(3), phi)
    for _ in range(10):
        t = random_tuple(rng, max(phi.arities) + 1)
        assert D(t) == B(t)


@given(seeds)
def test_differential_squares_to_zero(seed):
    rng = random.Random(seed)
    phi = random_cochain(rng, rng.randint(1, 3), rng.randint(0, 1), 20)
    DD = hoch_diff(hoch_diff(phi))
    for _ in range(10):
        assert not DD(random_tuple(rng, max(phi.arities) + 2))


@given(seeds)
def test_gerstenhaber_antisymmetry(seed):
    rng = random.Random(seed)
    a = random_cochain(rng, rng.randint(1, 3), rng.randint(0, 1))
    b = random_cochain(rng, rng.randint(1, 3), rng.randint(0, 1))
    s = -1 if (a.parity * b.parity) % 2 else 1
    ab, ba = gerstenhaber(a, b), gerstenhaber(b, a)
    d = max(a.arities) + max(b.arities) - 1
    for _ in range(10):
        t = random_tuple(rng, d)
        assert ab(t) == {m: -s * c for m, c in ba(t).items()}


@given(seeds)
def test_gerstenhaber_jacobi(seed):
    rng = random.Random(seed)
    a, b, c = (random_cochain(rng, rng.randint(1, 2), rng.randint(0, 1), 10) for _ in range(3))
    s = -1 if (a.parity * b.parity) % 2 else 1
    lhs = gerstenhaber(a, gerstenhaber(b, c))
    rhs = gerstenhaber(gerstenhaber(a, b), c) + gerstenhaber(b, gerstenhaber(a, c)).scale(s)
    d = max(a.arities) + max(b.arities) + max(c.arities) - 2
    for _ in range(6):
        t = random_tuple(rng, d)
        assert lhs(t) == rhs(t)


@given(seeds)
def test_hkr_kills_coboundaries(seed):
    rng = random.Random(seed)
    arity = rng.randint(1, 3)
    phi = random_cochain(rng, arity, rng.randint(0, 1), 30)
    # put weight on generator tuples so the check is not vacuous
    gens = [1, 2, 4]
    extra = {tuple(rng.choice(gens) for _ in range(arity)): None for _ in range(6)}
    ent = {t: phi(t) for t in itertools.product(range(8), repeat=arity) if phi(t)}
    for t in extra:
        outs = [m for m in range(8) if entry_parity(t, m) == phi.parity]
        ent[t] = {rng.choice(outs): Fraction(rng.randint(1, 3))}
    phi = sparse_cochain(3, ent, 8, phi.parity)
    assert not hkr(hoch_diff(phi), arity + 2, 3)


def test_mc_and_ainf_residuals_agree():
    rng = random.Random(7)
    alpha = random_cochain(rng, 3, 1, 30, cap=5)
    mu = ainf_from_mc(alpha)
    res = mc_residual_cochain(alpha)
    for _ in range(30):
        t = random_tuple(rng, rng.choice([3, 4, 5]))
        assert ainf_residual(mu, t).terms == res(t)


def test_ainf_conversions_and_strict_part():
    mu = AInfStructure.from_engine(TransferEngine(landau_ginzburg(3)), 6)
    assert check_strict_part(mu)
    alpha = mc_from_ainf(mu)
    assert alpha.parity == 1 and min(alpha.arities) == 3
    back = ainf_from_mc(alpha)
    rng = random.Random(3)
    for d in (2, 3, 4):
        t = random_tuple(rng, d)
        assert back(t) == mu(t)


@pytest.mark.parametrize("mode", ["native", "standard"])
def test_transferred_structure_satisfies_relations(mode):
    mu = AInfStructure.from_engine(TransferEngine(landau_ginzburg(3)), 6)
    rng = random.Random(11)
    for d in range(3, 7):
        for _ in range(15):
            assert not ainf_residual(mu, random_tuple(rng, d), mode)


def test_random_structure_fails_relations_in_both_modes():
    rng = random.Random(5)
    alpha = random_cochain(rng, 3, 1, 60, cap=5)
    mu = ainf_from_mc(alpha)
    found = 0
    for _ in range(40):
        t = random_tuple(rng, 4)
        a = ainf_residual(mu, t)
        b = ainf_residual(mu, t, "standard")
        assert bool(a) == bool(b)
        found += bool(a)
    assert found


def test_residual_mode_errors():
    mu = AInfStructure(3, lambda t: {}, 3)
    with pytest.raises(AlgebraError):
        ainf_residual(mu, (1, 1, 1, 1))
    with pytest.raises(AlgebraError):
        ainf_residual(mu, (1, 1, 1), "other")


def test_gauge_morphism_intertwines():
    rng = random.Random(2)
    cap = 4
    gamma = random_cochain(rng, 2, 0, 20, cap) + random_cochain(rng, 3, 0, 30, cap)
    mu = AInfStructure(3, TransferEngine(landau_ginzburg(3)).mu, cap)
    target = AInfStructure(3, ad_exp(gamma, mu.as_cochain(), cap), cap)
    phi = gauge_phi(gamma, cap)
    for d in range(1, cap + 1):
        for _ in range(8):
            assert not morphism_residual(phi, mu, target, random_tuple(rng, d))


def test_gauge_phi_rejects_bad_gamma():
    with pytest.raises(AlgebraError):
        gauge_phi(sparse_cochain(3, {(1, 2): {3: 1}}))
    with pytest.raises(AlgebraError):
        gauge_phi(identity_cochain(3))


def test_concatenation_counts():
    leaf = ("id",)
    assert linear_extensions((2, leaf, leaf)) == 1
    chain = (2, (2, leaf, leaf), leaf)
    assert linear_extensions(chain) == 1
    both = (2, (2, leaf, leaf), (2, leaf, leaf))
    # the two inner components may come in either order before the root
    assert linear_extensions(both) == 2
    assert concatenation_coefficient(both) == Fraction(2, 6)


def test_sparse_cochain_validation_and_json():
    with pytest.raises(AlgebraError):
        sparse_cochain(3, {(1,): {1: 1}, (1, 2): {3: 1}})  # parities 0 and 1
    phi = sparse_cochain(3, {(1, 2): {3: 2}, (2, 4): {6: -1}})
    tuples = list(itertools.product(range(8), repeat=2))
    back = cochain_from_json(phi.to_json(tuples))
    assert all(back(t) == phi(t) for t in tuples)
    assert phi.on([ExtElement(3, {1: 2, 2: 1}), ExtElement(3, {2: 1, 4: 1})]).terms == {3: 4, 6: -1}
