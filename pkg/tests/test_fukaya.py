import json

import pytest

from koszulainf.exact_algebra import AlgebraError, Polynomial
from koszulainf.fukaya import (
    FIXTURE,
    GENERATORS,
    PINNED_SHA256,
    Entry,
    audit_table,
    consistent_identification,
    cross_check,
    flip,
    fragment_hypotheses,
    hbar_degree,
    identify_to_exterior,
    index_audit,
    load_fixture,
    printed_identification,
    product_consistency,
    table_checksum,
    table_entries,
    table_json,
    triangle_antisymmetry,
    unit_axioms,
    weight_audit,
    weight_map_ok,
)


@pytest.mark.parametrize("genus", [2, 3, 4, 5])
def test_table_audits(genus):
    rep = audit_table(genus)
    assert rep["pass"]
    assert all(r["index"] and r["weight"] and r["parity"] for r in rep["rows"])
    assert unit_axioms(genus) and triangle_antisymmetry(genus)


def test_hbar_degrees():
    # binary products have k = 0, the cubic one too, the polygon at arity 2g+1 has k = 1
    g = 3
    ks = {e.source: hbar_degree(e, g) for e in table_entries(g) if e.output}
    assert ks == {"unit": 0, "pairing": 0, "triangle": 0, "cubic": 0, "polygon": 1}


def test_audits_reject_bad_entries():
    assert not index_audit(Entry(("x1", "x2"), "q", 1, "bad"), 3)[0]
    assert not weight_audit(Entry(("x1", "x1"), "xb3", 1, "bad"), 3)
    assert index_audit(Entry(("q", "q"), None, 0, "unit"), 3) == (True, None)
    # the polygon rule only has the right index at arity 2g+1
    assert hbar_degree(Entry(("x1",) * 5, "e", 1, "bad"), 3) is None
    with pytest.raises(AlgebraError):
        table_entries(1)


def test_fixture_matches_generated_table():
    obj = load_fixture()
    assert obj == table_json()
    assert table_checksum() == PINNED_SHA256
    assert json.loads(FIXTURE.read_text()) == obj


def test_fixture_tampering_detected(tmp_path):
    obj = table_json()
    obj["entries"][0]["coeff"] = -1
    p = tmp_path / "t.json"
    p.write_text(json.dumps(obj))
    with pytest.raises(AlgebraError):
        load_fixture(p)


@pytest.mark.parametrize("genus", [2, 3, 4])
def test_consistent_identification(genus):
    ident = consistent_identification()
    assert set(ident) == set(GENERATORS)
    assert product_consistency(ident, genus) == {"unit": True, "pairing": True, "triangle": True}
    assert weight_map_ok(ident, genus)
    rep = fragment_hypotheses(genus)
    assert rep.passed
    N = 2 * genus + 1
    assert rep.values["cubic"] == Polynomial(3, {(1, 1, 1): -1})
    assert rep.values["top"] == Polynomial(3, {(N, 0, 0): 1, (0, N, 0): 1, (0, 0, N): 1})


def test_printed_identification_fails_the_binary_products():
    res = product_consistency(printed_identification(), 3)
    assert res["unit"] and not res["pairing"] and not res["triangle"]
    for name in ("x1", "xb2", "q"):
        assert not all(product_consistency(flip(consistent_identification(), name), 3).values())


def test_identified_structure_degrees():
    mu = identify_to_exterior(3)
    # mu^2(x1, x2) = xb3 maps to -xi1 ^ xi2 up to the identification signs, degree 2
    assert set(mu((1, 2))) == {3}
    assert mu((1,) * 7) == {0: 1}
    assert mu((1, 1)) == {}
    assert all(len(m) <= 1 for m in (mu((4, 2, 1)), mu((2, 4))))


def test_cross_check_against_transfer():
    rep = cross_check(3)
    assert rep.passed, rep.clauses
    assert rep.values["lambda"] is None
