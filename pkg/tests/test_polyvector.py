import json
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from koszulainf.exact_algebra import AlgebraError, Polynomial, superpotential
from koszulainf.hochschild import identity_cochain, wedge_cochain
from koszulainf.polyvector import (
    FormalDiffeo,
    NormalizeInputError,
    Polyvector,
    check_g_shape,
    euler_polyvector,
    grading_ok,
    hkr,
    ideal_reduce,
    invariant_basis,
    is_invariant,
    koszul_d,
    koszul_solve,
    mc_split_residual,
    normalize,
    pushforward_diffeo,
    pushforward_field,
    random_formal_diffeo,
    random_g0_diffeo,
    schouten,
    term_weight,
    verify_normalization,
)
from tests.strategies import homogeneous_polyvectors, polynomials

seeds = st.integers(0, 10 ** 6)


def lie_sign(ja, jb):
    return -1 if ((ja - 1) * (jb - 1)) % 2 else 1


@given(homogeneous_polyvectors(), homogeneous_polyvectors())
def test_schouten_graded_antisymmetry(a, b):
    (x, ja), (y, jb) = a, b
    assert schouten(x, y) == schouten(y, x).scale(-lie_sign(ja, jb))


@given(homogeneous_polyvectors(max_terms=3), homogeneous_polyvectors(max_terms=3), homogeneous_polyvectors(max_terms=3))
def test_schouten_graded_jacobi(a, b, c):
    (x, ja), (y, jb), (z, _) = a, b, c
    lhs = schouten(x, schouten(y, z))
    rhs = schouten(schouten(x, y), z) + schouten(y, schouten(x, z)).scale(lie_sign(ja, jb))
    assert lhs == rhs


@given(polynomials())
def test_bracket_with_coordinate_field_is_partial(f):
    for i in (1, 2, 3):
        assert schouten(Polyvector.xi(3, i), Polyvector.from_poly(f)) == Polyvector.from_poly(f.partial(i))


@given(homogeneous_polyvectors(), st.integers(2, 4))
def test_koszul_differential_squares_to_zero(a, genus):
    W = superpotential(genus)
    x, _ = a
    assert not koszul_d(koszul_d(x, W), W)


def test_xi_sign_and_json():
    assert Polyvector.xi(3, 3, 1) == Polyvector.xi(3, 1, 3).scale(-1)
    assert not Polyvector.xi(3, 2, 2)
    p = Polyvector.xi(3, 1, 2, coeff=Fraction(3, 2), exps=(0, 0, 2)) + euler_polyvector()
    assert Polyvector.from_json(p.to_json()) == p
    assert Polyvector.from_json(json.loads(json.dumps(p.to_json()))) == p
    with pytest.raises(AlgebraError):
        Polyvector(3, {((1, 0), 1): 1})


def test_truncation_drops_high_degrees():
    p = Polyvector(3, {((2, 0, 0), 0): 1, ((1, 1, 1), 1): 1}, order=3)
    assert list(p.terms) == [((2, 0, 0), 0)]


def vector_field(rng, lo=2, hi=3):
    terms = {}
    for _ in range(3):
        e = tuple(rng.randint(0, hi) for _ in range(3))
        if lo <= sum(e) <= hi:
            terms[(e, 1 << rng.randrange(3))] = rng.randint(-2, 2)
    return Polyvector(3, terms)


@given(seeds)
def test_pushforward_is_an_algebra_and_bracket_automorphism(seed):
    rng = random.Random(seed)
    order = 8
    v = vector_field(rng)
    f = Polyvector.from_poly(Polynomial(3, {(1, 0, 0): 1, (0, 1, 1): rng.randint(-2, 2)}))
    g = Polyvector.from_poly(Polynomial(3, {(0, 0, 1): 1, (2, 0, 0): rng.randint(-2, 2)}))
    prod = Polyvector.from_poly(f.function_part() * g.function_part())
    pf, pg = pushforward_field(v, f, order), pushforward_field(v, g, order)
    assert pushforward_field(v, prod, order).function_part() == Polynomial(
        3, {e: c for e, c in (pf.function_part() * pg.function_part()).terms.items() if sum(e) < order})
    x, y = vector_field(rng, 1, 2), Polyvector.xi(3, 1, 2, exps=(0, 0, 1))
    lhs = pushforward_field(v, schouten(x, y), order)
    rhs = schouten(pushforward_field(v, x, order), pushforward_field(v, y, order), order)
    assert lhs == rhs


def test_pushforward_matches_substitution_into_coordinate_images():
    rng = random.Random(3)
    d = random_formal_diffeo(rng, steps=3)
    order = 9
    f = superpotential(3) + Polynomial(3, {(1, 1, 0): 2, (0, 0, 2): -1})
    ys = d.coordinate_images(order)
    assert pushforward_diffeo(d, Polyvector.from_poly(f), order).function_part() == f.substitute(ys, order - 1)


def test_single_field_flow_closed_form():
    # v = z1^2 d/dz1 flows z1 to z1 / (1 - z1)
    d = FormalDiffeo(3, [Polyvector(3, {((2, 0, 0), 1): 1})])
    ys = d.coordinate_images(7)
    assert ys[0] == Polynomial(3, {(k, 0, 0): 1 for k in range(1, 7)})
    assert ys[1] == Polynomial.var(3, 2)


def test_diffeo_shape_composition_and_json():
    rng = random.Random(5)
    a, b = random_formal_diffeo(rng), random_formal_diffeo(rng)
    assert a.has_shape(8) and b.has_shape(8)
    ab = a.compose(b)
    p = Polyvector.from_poly(superpotential(3))
    assert pushforward_diffeo(ab, p, 9) == pushforward_diffeo(b, pushforward_diffeo(a, p, 9), 9)
    assert FormalDiffeo.from_json(json.loads(json.dumps(ab.to_json()))) == ab
    with pytest.raises(AlgebraError):
        FormalDiffeo(3, [Polyvector(3, {((1, 0, 0), 1): 1})])
    with pytest.raises(AlgebraError):
        FormalDiffeo(3, [Polyvector.xi(3, 1, 2, exps=(2, 0, 0))])


def brute_invariants(i, j, genus):
    from itertools import combinations

    from koszulainf.exact_algebra import all_exponents

    out = set()
    for c in combinations(range(3), j):
        m = sum(1 << k for k in c)
        for e in all_exponents(3, i):
            v = [e[k] - (1 if (m >> k) & 1 else 0) for k in range(3)]
            N = 2 * genus + 1
            # the group is generated by (w, 1, w^-1) and (1, w, w^-1) with w a primitive N-th root of unity
            if (v[0] - v[2]) % N == 0 and (v[1] - v[2]) % N == 0:
                out.add((e, m))
    return out


@pytest.mark.parametrize("genus", [2, 3, 4])
@pytest.mark.parametrize("j", [0, 1, 2, 3])
def test_invariant_basis_matches_brute_force(genus, j):
    for i in range(0, 2 * genus + 3):
        got = {k for b in invariant_basis(i, j, genus) for k in b.terms}
        assert got == brute_invariants(i, j, genus)
        assert all(is_invariant(b, genus) for b in invariant_basis(i, j, genus))


def test_term_weight_and_grading():
    assert term_weight((1, 1, 1), 0, 3) == (0, 0)
    assert term_weight((7, 0, 0), 0, 3) == (0, 0)
    assert term_weight((1, 0, 0), 1, 3) == (0, 0)
    assert grading_ok(3, 0, 3) and grading_ok(7, 0, 3)
    assert grading_ok(6, 2, 3) and not grading_ok(4, 0, 3)
    assert grading_ok(5, 1, 3) and grading_ok(4, 3, 3) and not grading_ok(3, 3, 3)
    assert grading_ok(8, 1, 3, d=2) and not grading_ok(1, 1, 3, d=-1)
    W = Polyvector.from_poly(superpotential(3))
    assert check_g_shape(W, 3)
    assert not check_g_shape(W + Polyvector.from_poly(Polynomial(3, {(2, 0, 0): 1})), 3)


def test_hkr_of_identity_and_product():
    assert hkr(identity_cochain(3), 4) == euler_polyvector()
    assert not hkr(wedge_cochain(3), 4)


def test_mc_split_residual():
    W = superpotential(3)
    res = mc_split_residual(W, Polyvector.zero())
    assert res.zero
    a2 = Polyvector.xi(3, 1, 2, exps=(0, 0, 2))
    res = mc_split_residual(W, a2)
    assert not res.poisson and res.compat and res.koszul == res.compat
    with pytest.raises(AlgebraError):
        mc_split_residual(W, Polyvector.xi(3, 1))


@pytest.mark.parametrize("seed", range(4))
def test_koszul_solve_recovers_exact_targets(seed):
    rng = random.Random(seed)
    W = superpotential(3)
    order = 9
    g3 = Polyvector(3, {(tuple(rng.randint(0, 2) for _ in range(3)), 7): rng.randint(-2, 2) for _ in range(3)})
    target = -koszul_d(g3, W, order)
    x = koszul_solve(W, target, order)
    assert x is not None and koszul_d(x, W, order) == -target


def test_koszul_solve_rejects_open_targets():
    W = superpotential(3)
    with pytest.raises(AlgebraError):
        koszul_solve(W, Polyvector.xi(3, 1, 2), 6)
    with pytest.raises(AlgebraError):
        koszul_solve(W, Polyvector.xi(3, 1), 6)
    assert not koszul_solve(W, Polyvector.zero(), 6)


@pytest.mark.parametrize("gain", [1, 2, 3])
def test_ideal_reduce(gain):
    W = superpotential(3)
    p = Polynomial(3, {(4, 1, 0): 2, (0, 2, 3): -1, (1, 1, 3): 5})
    *fs, rem = ideal_reduce(p, W, gain)
    recon = rem
    for i, f in enumerate(fs):
        recon = recon + f * W.partial(i + 1)
    assert recon == p
    assert all(sum(e) >= 5 + gain for e in rem.terms)
    with pytest.raises(AlgebraError):
        ideal_reduce(Polynomial(3, {(1, 0, 0): 1, (2, 0, 0): 1}), W)


def test_normalize_fixes_w():
    W = superpotential(3)
    d, cert = normalize(W, 3, 12)
    assert not d.logs and cert.mode == "graded" and verify_normalization(W, d, 3, 12)


def test_normalize_rejects_wrong_low_order_terms():
    W = superpotential(3)
    bad = W + Polynomial(3, {(1, 1, 1): 1, (2, 0, 0): 3})
    with pytest.raises(NormalizeInputError) as err:
        normalize(bad, 3, 10)
    assert err.value.terms == Polynomial(3, {(1, 1, 1): 1, (2, 0, 0): 3})
    with pytest.raises(NormalizeInputError):
        normalize(W + Polynomial(3, {(2, 1, 1): 1}), 3, 10, mode="graded")
    with pytest.raises(AlgebraError):
        normalize(W, 1, 10)
    with pytest.raises(AlgebraError):
        normalize(W, 3, 10, mode="other")


@pytest.mark.parametrize("genus,order", [(2, 12), (4, 20)])
def test_graded_round_trip(genus, order):
    W = superpotential(genus)
    d = random_g0_diffeo(random.Random(genus), genus, order)
    alpha0 = pushforward_diffeo(d, Polyvector.from_poly(W), order).function_part()
    assert is_invariant(Polyvector.from_poly(alpha0), genus)
    diffeo, cert = normalize(alpha0, genus, order)
    assert cert.mode == "graded"
    assert verify_normalization(alpha0, diffeo, genus, order)
    assert all(is_invariant(s.field, genus) for s in cert.steps)
    assert all(after > before for before, after in cert.gains())
    json.dumps(cert.to_json())


def test_lambda_term_is_absorbed_at_genus_four():
    W = superpotential(4)
    alpha0 = W + Polynomial(3, {(3, 3, 3): Fraction(2, 3)})
    diffeo, cert = normalize(alpha0, 4, 14)
    assert cert.lam == Fraction(2, 3) and cert.steps[0].kind == "lambda"
    assert verify_normalization(alpha0, diffeo, 4, 14)


def test_general_round_trip():
    W = superpotential(3)
    d = random_formal_diffeo(random.Random(2))
    alpha0 = pushforward_diffeo(d, Polyvector.from_poly(W), 12).function_part()
    diffeo, cert = normalize(alpha0, 3, 12)
    assert cert.mode == "general" and diffeo.has_shape(12)
    assert verify_normalization(alpha0, diffeo, 3, 12)
    assert not verify_normalization(alpha0, FormalDiffeo(3, []), 3, 12)
