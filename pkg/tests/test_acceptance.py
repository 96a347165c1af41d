"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The lines are also collected and repeated in the pytest terminal summary.
Run on its own with ``pytest tests/test_acceptance.py -v``.
"""
import functools
import random

from koszulainf.cli import run
from koszulainf.dgla import obstruction_suite, random_two_step, top_level_ideal
from koszulainf.exact_algebra import (
    BElement,
    ExtElement,
    Polynomial,
    superpotential,
    tensor_basis,
)
from koszulainf.fukaya import (
    audit_table,
    consistent_identification,
    cross_check,
    fragment_hypotheses,
    product_consistency,
    weight_map_ok,
)
from koszulainf.hochschild import (
    AInfStructure,
    ainf_residual,
    entry_parity,
    gerstenhaber,
    hoch_diff,
    sparse_cochain,
)
from koszulainf.mf import (
    delta_E,
    koszul_diff,
    landau_ginzburg,
    retract_h,
    retract_i,
    retract_p,
    tilde_diff,
)
from koszulainf.polyvector import (
    Polyvector,
    hkr,
    invariant_basis,
    normalize,
    pushforward_diffeo,
    random_formal_diffeo,
    schouten,
    verify_normalization,
)
from koszulainf.toric import (
    build_fan,
    crepancy_check,
    dual_complex,
    smoothness_check,
    support_check,
)
from koszulainf.transfer import (
    TransferEngine,
    hkr_diagonal,
    random_tuples,
    theorem52_hypothesis_check,
)
from tests.test_hochschild import random_cochain

RESULTS = {}


def criterion(number, title):
    def wrap(fn):
        @functools.wraps(fn)
        def inner(*args, **kwargs):
            try:
                ok, detail = fn(*args, **kwargs)
            except Exception as exc:
                ok, detail = False, f"{type(exc).__name__}: {exc}"
            line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d} {title}: {detail}"
            RESULTS[number] = line
            print(line)
            assert ok, line
        return inner
    return wrap


def pv_dict(poly: Polynomial):
    return {(e, 0): c for e, c in poly.terms.items()}


@criterion(1, "transfer headline at genus 3")
def test_criterion_01_transfer_headline_genus_3():
    eng = TransferEngine(landau_ginzburg(3))
    # full diagonals over all 3^d generator tuples, restricted to the hbar-power k
    cubic = hkr_diagonal(eng, 3, 0, 3)
    top = hkr_diagonal(eng, 7, 1, 3)
    want_cubic = pv_dict(Polynomial(3, {(1, 1, 1): -1}))
    want_top = pv_dict(Polynomial(3, {(7, 0, 0): 1, (0, 7, 0): 1, (0, 0, 7): 1}))
    return cubic == want_cubic and top == want_top, f"mu_0^3 -> {cubic}, mu_1^7 -> {top}"


@criterion(2, "transfer headline at genus 4 with the lambda term")
def test_criterion_02_transfer_headline_genus_4():
    eng = TransferEngine(landau_ginzburg(4))
    rep = theorem52_hypothesis_check(4, seed=2, samples=200, engine=eng)
    # the unpruned arity-9 diagonal as an independent reading of the top term
    top = hkr_diagonal(eng, 9, 1, 4)
    lam = rep.values["lambda"] or 0
    want = {(e, 0): c for e, c in (Polynomial(3, {(9, 0, 0): 1, (0, 9, 0): 1, (0, 0, 9): 1})
                                   + Polynomial(3, {(3, 3, 3): lam})).terms.items()}
    ok = rep.passed and rep.clauses["vanishing_range"] and top == want
    return ok, f"clauses {rep.clauses}, lambda = {lam}, full top diagonal {top}"


@criterion(3, "A-infinity relations of the genus-3 structure")
def test_criterion_03_ainf_validity():
    mu = AInfStructure.from_engine(TransferEngine(landau_ginzburg(3)), 8)
    rng = random.Random(303)
    failures = {}
    for d in range(3, 9):
        failures[d] = sum(1 for t in random_tuples(rng, 3, d, 200) if ainf_residual(mu, t))
    return not any(failures.values()), f"failures per arity (200 tuples each): {failures}"


@criterion(4, "retract identities, exhaustive to degree 2g+2")
def test_criterion_04_retract_suite():
    genus = 3
    mf = landau_ginzburg(genus)
    D = delta_E(mf)
    W = BElement.from_poly(superpotential(genus))
    bad = {"ip-id": 0, "h^2": 0, "ph": 0, "delta^2": 0, "d^2": 0, "d~^2": 0}
    count = 0
    for key in tensor_basis(3, 2 * genus + 2):
        b = BElement(3, {key: 1})
        count += 1
        h = retract_h(b)
        bad["ip-id"] += retract_i(retract_p(b)) - b != koszul_diff(h) + retract_h(koszul_diff(b))
        bad["h^2"] += bool(retract_h(h))
        bad["ph"] += bool(retract_p(h))
        bad["delta^2"] += D * (D * b) != W * b
        bad["d^2"] += bool(koszul_diff(koszul_diff(b)))
        bad["d~^2"] += bool(tilde_diff(tilde_diff(b, mf), mf))
    pi = sum(retract_p(retract_i(ExtElement.basis(3, m))) != ExtElement.basis(3, m) for m in range(8))
    hi = sum(bool(retract_h(retract_i(ExtElement.basis(3, m)))) for m in range(8))
    ok = not any(bad.values()) and not pi and not hi and D * D == W
    return ok, f"{count} basis elements, failures {bad}, pi-id {pi}, hi {hi}"


def random_polyvector(rng, j, terms=4, max_exp=2):
    masks = [m for m in range(8) if bin(m).count("1") == j]
    return Polyvector(3, {(tuple(rng.randint(0, max_exp) for _ in range(3)), rng.choice(masks)):
                          rng.randint(-3, 3) for _ in range(terms)})


def random_tuple(rng, d):
    return tuple(rng.randrange(8) for _ in range(d))


@criterion(5, "Hochschild and Schouten axioms, 100 instances each")
def test_criterion_05_bracket_axioms():
    n_inst = 100
    fails = dict.fromkeys(["hoch d^2", "gerst antisym", "gerst jacobi", "schouten antisym",
                           "schouten jacobi", "hkr coboundary"], 0)
    for seed in range(n_inst):
        rng = random.Random(5000 + seed)
        phi = random_cochain(rng, rng.randint(1, 3), rng.randint(0, 1), 20)
        DD = hoch_diff(hoch_diff(phi))
        fails["hoch d^2"] += any(DD(random_tuple(rng, max(phi.arities) + 2)) for _ in range(5))

        a = random_cochain(rng, rng.randint(1, 3), rng.randint(0, 1))
        b = random_cochain(rng, rng.randint(1, 3), rng.randint(0, 1))
        s = -1 if (a.parity * b.parity) % 2 else 1
        ab, ba = gerstenhaber(a, b), gerstenhaber(b, a)
        d = max(a.arities) + max(b.arities) - 1
        fails["gerst antisym"] += any(ab(t) != {m: -s * c for m, c in ba(t).items()}
                                      for t in (random_tuple(rng, d) for _ in range(5)))

        a, b, c = (random_cochain(rng, rng.randint(1, 2), rng.randint(0, 1), 10) for _ in range(3))
        s = -1 if (a.parity * b.parity) % 2 else 1
        lhs = gerstenhaber(a, gerstenhaber(b, c))
        rhs = gerstenhaber(gerstenhaber(a, b), c) + gerstenhaber(b, gerstenhaber(a, c)).scale(s)
        d = max(a.arities) + max(b.arities) + max(c.arities) - 2
        fails["gerst jacobi"] += any(lhs(t) != rhs(t) for t in (random_tuple(rng, d) for _ in range(5)))

        ja, jb, jc = (rng.randint(0, 3) for _ in range(3))
        x, y, z = random_polyvector(rng, ja), random_polyvector(rng, jb), random_polyvector(rng, jc)
        s = -1 if ((ja - 1) * (jb - 1)) % 2 else 1
        fails["schouten antisym"] += schouten(x, y) != schouten(y, x).scale(-s)
        fails["schouten jacobi"] += (schouten(x, schouten(y, z))
                                     != schouten(schouten(x, y), z) + schouten(y, schouten(x, z)).scale(s))

        arity = rng.randint(1, 3)
        parity = rng.randint(0, 1)
        ent = {}
        for _ in range(8):
            t = tuple(rng.choice([1, 2, 4, rng.randrange(8)]) for _ in range(arity))
            outs = [m for m in range(8) if entry_parity(t, m) == parity]
            ent[t] = {rng.choice(outs): rng.randint(1, 3)}
        phi = sparse_cochain(3, ent, 8, parity)
        fails["hkr coboundary"] += bool(hkr(hoch_diff(phi), arity + 2, 3))
    return not any(fails.values()), f"{n_inst} seeded instances per axiom, failures {fails}"


@criterion(6, "normalization round trip at genus 3, order 15")
def test_criterion_06_normalization_round_trip():
    genus, order = 3, 15
    W = Polyvector.from_poly(superpotential(genus))
    results = []
    for seed in range(10):
        d = random_formal_diffeo(random.Random(seed))
        assert d.has_shape(order)
        alpha0 = pushforward_diffeo(d, W, order).function_part()
        diffeo, cert = normalize(alpha0, genus, order)
        results.append(verify_normalization(alpha0, diffeo, genus, order))
    return all(results), f"verified by substitution for seeds 0..9: {results}"


def span_keys(elements):
    return {key for p in elements for key in p.terms}


def xi2(a, b, exps):
    return Polyvector.xi(3, a, b, exps=exps)


def hand_lists(genus):
    m = 2 * genus
    bivectors = [xi2(2, 3, (m, 0, 0)), xi2(3, 1, (0, m, 0)), xi2(1, 2, (0, 0, m))]
    N = 2 * genus + 1
    functions = [Polyvector.from_poly(Polynomial(3, {e: 1})) for e in ((N, 0, 0), (0, N, 0), (0, 0, N))]
    if genus % 3 == 1:
        p, q = (2 * genus + 1) // 3, (2 * genus - 2) // 3
        bivectors += [xi2(1, 2, (p, p, q)), xi2(3, 1, (p, q, p)), xi2(2, 3, (q, p, p))]
        functions.append(Polyvector.from_poly(Polynomial(3, {(p, p, p): 1})))
    return bivectors, functions


@criterion(7, "invariant bases for genus 3 and genus 4")
def test_criterion_07_invariant_bases():
    details = []
    ok = True
    for genus in (3, 4):
        bivectors, functions = hand_lists(genus)
        got_bi = invariant_basis(2 * genus, 2, genus)
        got_fn = invariant_basis(2 * genus + 1, 0, genus)
        same = (span_keys(got_bi) == span_keys(bivectors) and len(got_bi) == len(bivectors)
                and span_keys(got_fn) == span_keys(functions) and len(got_fn) == len(functions))
        ok = ok and same
        details.append(f"g={genus}: {len(got_bi)} bivectors, {len(got_fn)} functions")
    return ok, "; ".join(details)


@criterion(8, "obstruction theory on 20 random nilpotent DGLAs")
def test_criterion_08_obstructions():
    outcomes = {}
    ok = True
    for seed in range(20):
        g, _ = random_two_step(random.Random(800 + seed), max_dim=8)
        h = top_level_ideal(g)
        ok = ok and g.dim <= 8 and h.is_central()
        for r in obstruction_suite(g, h, random.Random(seed), samples=8):
            ok = ok and r.agree
            key = f"{r.kind} {'zero' if r.obstruction_zero else 'nonzero'}"
            outcomes[key] = outcomes.get(key, 0) + 1
    return ok, f"all records agree: {ok}, outcomes {dict(sorted(outcomes.items()))}"


@criterion(9, "Fukaya table audits and identification at genus 3")
def test_criterion_09_fukaya():
    genus = 3
    audit = audit_table(genus)
    ident = consistent_identification()
    products = product_consistency(ident, genus)
    frag = fragment_hypotheses(genus, ident)
    cc = cross_check(genus)
    ok = audit["pass"] and all(products.values()) and weight_map_ok(ident, genus) and frag.passed and cc.passed
    return ok, (f"{len(audit['rows'])} entries audited, products {products}, "
                f"fragment {frag.clauses}, cross-check {cc.clauses}")


@criterion(10, "toric suite for genus 3, 4, 5, 8")
def test_criterion_10_toric():
    details = []
    ok = True
    for genus in (3, 4, 5, 8):
        fan = build_fan(genus)
        dc = dual_complex(genus)
        good = (len(fan.cones) == 2 * genus + 1
                and all(r["unimodular"] for r in smoothness_check(fan))
                and all(r["crepant"] for r in crepancy_check(fan))
                and support_check(fan)["pass"]
                and dc.euler == 2 and dc.counts == (genus + 1, 3 * genus - 3, 2 * (genus - 1)))
        ok = ok and good
        details.append(f"g={genus}: {len(fan.cones)} cones, (V,E,F)={dc.counts}")
    return ok, "; ".join(details)


@criterion(11, "byte-identical transfer reports")
def test_criterion_11_determinism():
    first = run(["transfer", "--genus", "3"])
    second = run(["transfer", "--genus", "3"])
    parallel = run(["transfer", "--genus", "3", "--workers", "2"])
    ok = first[0] == 0 and first == second == parallel
    return ok, f"exit codes {first[0]}, {second[0]}, {parallel[0]}; {len(first[1])} bytes each"
