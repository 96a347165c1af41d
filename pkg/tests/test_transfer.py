import math
import random

import pytest

from koszulainf.exact_algebra import AlgebraError, ExtElement, Polynomial
from koszulainf.mf import landau_ginzburg
from koszulainf.transfer import (
    TransferEngine,
    aux_degree_audit,
    binary_skeletons,
    diagonal_tuples,
    enumerate_trees,
    equivariance_check,
    expected_top,
    function_part,
    hbar_power,
    hkr_diagonal,
    low_arity_check,
    morphism_residual,
    random_tuples,
    signed_wedge,
    theorem52_hypothesis_check,
    tree_evaluate,
    tree_sum,
    tuple_weight,
)


def catalan(k):
    return math.comb(2 * k, k) // (k + 1)


@pytest.mark.parametrize("d", range(1, 8))
def test_skeleton_counts_are_catalan(d):
    assert sum(1 for _ in binary_skeletons(0, d)) == catalan(d - 1)


@pytest.mark.parametrize("d,b", [(1, 2), (2, 2), (3, 1), (3, 3), (4, 2)])
def test_decorated_tree_counts(d, b):
    edges = 2 * d - 1
    want = catalan(d - 1) * sum(math.comb(k + edges - 1, edges - 1) for k in range(0 if d > 1 else 1, b + 1))
    trees = list(enumerate_trees(d, b))
    assert len(trees) == want
    assert len(set(trees)) == want
    assert all(t.arity == d and t.trivalent_count() == d - 1 for t in trees)


def test_tree_errors():
    with pytest.raises(AlgebraError):
        list(enumerate_trees(0))
    t = next(enumerate_trees(2))
    with pytest.raises(AlgebraError):
        tree_evaluate(t, (1,), landau_ginzburg(2))


@pytest.mark.parametrize("genus", [2, 3])
def test_engine_matches_brute_force_tree_sum(genus):
    mf = landau_ginzburg(genus)
    eng = TransferEngine(mf)
    rng = random.Random(genus)
    # the brute-force sum grows fast with the exterior degree of the inputs, keep it small
    cases = [t for d in range(1, 4) for t in random_tuples(rng, 3, d, 40)
             if sum(bin(a).count("1") for a in t) <= 5][:12]
    cases += [tuple(rng.choice([1, 2, 4]) for _ in range(4)) for _ in range(3)]
    for tup in cases:
        assert eng.mu(tup) == tree_sum(tup, mf)
        assert eng.f(tup) == tree_sum(tup, mf, outgoing="h")


def test_engine_is_an_ainf_morphism_to_b():
    eng = TransferEngine(landau_ginzburg(3))
    rng = random.Random(4)
    for d in range(1, 6):
        for tup in random_tuples(rng, 3, d, 10):
            assert not morphism_residual(eng, tup)


def test_low_arity():
    eng = TransferEngine(landau_ginzburg(3))
    assert low_arity_check(eng) == {"mu1_zero": True, "mu2_signed_wedge": True}
    assert eng.mu((1, 2)) == signed_wedge(1, 2, 3) == ExtElement(3, {3: -1})
    assert eng.mu((2, 1)) == ExtElement(3, {3: 1})
    with pytest.raises(AlgebraError):
        eng.mu(())


def test_mu_linear_is_multilinear():
    eng = TransferEngine(landau_ginzburg(3))
    x = ExtElement(3, {1: 2, 2: -1})
    y = ExtElement(3, {4: 1, 3: 3})
    got = eng.mu_linear([x, y])
    want = ExtElement(3)
    for m1, c1 in x.terms.items():
        for m2, c2 in y.terms.items():
            want = want + eng.mu((m1, m2)).scale(c1 * c2)
    assert got == want


def test_hbar_power_bookkeeping():
    # mu^3 on three generators with scalar output: Hom-degree -3 = 6 - 9
    assert hbar_power((1, 2, 4), 0, 3) == 0
    # mu^7 on generators with scalar output: -7 = 6 - 21 + 8
    assert hbar_power((1,) * 7, 0, 3) == 1
    assert hbar_power((1, 2), 0, 3) is None
    assert hbar_power((1,), 1, 3) is None


def test_aux_degree_audit_and_equivariance():
    eng = TransferEngine(landau_ginzburg(3))
    tuples = random_tuples(random.Random(8), 3, 3, 30) + random_tuples(random.Random(9), 3, 4, 30)
    audit = aux_degree_audit(eng, tuples, 3)
    assert audit["pass"] and audit["terms"]
    assert equivariance_check(eng, tuples, 3)


def test_diagonal_tuples_weight_filter():
    all7 = list(diagonal_tuples(3, 7))
    assert len(all7) == 3 ** 7
    zero = list(diagonal_tuples(3, 7, 3, (0, 0)))
    assert zero and all(tuple_weight(t, 3) == (0, 0) for t in zero)
    # (1,1,1) x 7 is not a weight-zero tuple, the pure powers are
    assert (1,) * 7 in zero and (1, 2, 4, 1, 2, 4, 1) not in zero


def test_cubic_term_and_workers_agree():
    eng = TransferEngine(landau_ginzburg(3))
    one = hkr_diagonal(eng, 3, 0, 3, functions_only=True)
    two = hkr_diagonal(eng, 3, 0, 3, functions_only=True, workers=2)
    assert one == two
    assert function_part(one) == Polynomial(3, {(1, 1, 1): -1})
    with pytest.raises(AlgebraError):
        hkr_diagonal(eng, 3, 0)


def test_full_diagonal_matches_weight_pruned_functions():
    eng = TransferEngine(landau_ginzburg(2))
    full = hkr_diagonal(eng, 3)
    pruned = hkr_diagonal(eng, 3, genus=2, functions_only=True)
    assert function_part(full) == function_part(pruned)


def test_genus_two_hypotheses():
    rep = theorem52_hypothesis_check(2, samples=10)
    assert rep.passed, rep.first_failure()
    assert rep.values["top"] == expected_top(2)
    assert rep.values["lambda"] is None


def test_genus_one_rejected():
    with pytest.raises(AlgebraError):
        theorem52_hypothesis_check(1)
