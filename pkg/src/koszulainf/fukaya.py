"""Static A-infinity product data of the genus-g curve and its audits.

Generators: ``e, x1, x2, x3, xb1, xb2, xb3, q``.  An entry reads
``mu^d(inputs) = coeff * output``; the arity ``2g+1`` products on constant
tuples of ``x_i`` are generated per genus.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .exact_algebra import AlgebraError, ExtElement, Polynomial, popcount, wedge_sign
from .hochschild import AInfStructure

GENERATORS = ("e", "x1", "x2", "x3", "xb1", "xb2", "xb3", "q")
PARITY = {"e": 0, "x1": 1, "x2": 1, "x3": 1, "xb1": 0, "xb2": 0, "xb3": 0, "q": 1}
INDEX = {"e": 0, "x1": 1, "x2": 1, "x3": 1, "xb1": 2, "xb2": 2, "xb3": 2, "q": 3}
WEIGHT = {
    "e": (0, 0, 0),
    "x1": (1, 0, 0), "x2": (0, 1, 0), "x3": (0, 0, 1),
    "xb1": (0, 1, 1), "xb2": (1, 0, 1), "xb3": (1, 1, 0),
    "q": (1, 1, 1),
}

R_GRADING = 3


def weight_class(v, N):
    """Canonical section of ``(Z/N)^3 / diagonal``: third coordinate zero."""
    return ((v[0] - v[2]) % N, (v[1] - v[2]) % N)


@dataclass(frozen=True)
class Entry:
    inputs: tuple      # generator names, left to right as printed
    output: str | None  # None for a vanishing product
    coeff: int
    source: str


def _base_entries():
    out = []
    for i in (1, 2, 3):
        x, xb = f"x{i}", f"xb{i}"
        out += [
            Entry((x, "e"), x, 1, "unit"), Entry(("e", x), x, -1, "unit"),
            Entry((xb, "e"), xb, 1, "unit"), Entry(("e", xb), xb, 1, "unit"),
            Entry((x, xb), "q", 1, "pairing"), Entry((xb, x), "q", -1, "pairing"),
        ]
    out += [Entry(("q", "e"), "q", 1, "unit"), Entry(("e", "q"), "q", -1, "unit"),
            Entry(("q", "q"), None, 0, "unit")]
    for a, b, c in ((1, 2, 3), (2, 3, 1), (3, 1, 2)):
        out += [Entry((f"x{a}", f"x{b}"), f"xb{c}", 1, "triangle"),
                Entry((f"x{b}", f"x{a}"), f"xb{c}", -1, "triangle")]
    out.append(Entry(("x3", "x2", "x1"), "e", -1, "cubic"))
    return out


BASE_ENTRIES = tuple(_base_entries())


def table_entries(genus: int):
    """All stated products, with the arity-(2g+1) diagonal ones expanded."""
    if genus < 2:
        raise AlgebraError("genus must be at least 2")
    d = 2 * genus + 1
    diag = [Entry((f"x{i}",) * d, "e", 1, "polygon") for i in (1, 2, 3)]
    return list(BASE_ENTRIES) + diag


def table_json():
    """Genus-independent fixture: base entries plus the diagonal rule."""
    return {
        "generators": [{"name": g, "parity": PARITY[g], "index": INDEX[g], "weight": list(WEIGHT[g])}
                       for g in GENERATORS],
        "entries": [{"inputs": list(e.inputs), "output": e.output, "coeff": e.coeff, "source": e.source}
                    for e in BASE_ENTRIES],
        "diagonal": {"arity": "2g+1", "inputs": "x_i repeated", "output": "e", "coeff": 1},
    }


def canonical_bytes(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()


def table_checksum(obj=None) -> str:
    return hashlib.sha256(canonical_bytes(table_json() if obj is None else obj)).hexdigest()


FIXTURE = Path(__file__).with_name("data") / "fukaya_table.json"
PINNED_SHA256 = "b4d47447288c26818bc703bbb0efb7374ac673b62f777dfad84d84f2004fc7cb"


def load_fixture(path=FIXTURE):
    obj = json.loads(Path(path).read_text())
    digest = table_checksum(obj)
    if digest != PINNED_SHA256:
        raise AlgebraError(f"fixture checksum mismatch: {digest}")
    return obj


# --------------------------------------------------------------------------- audits


def hbar_degree(entry: Entry, genus: int):
    """The k with ``i(out) - sum i(in) = r(2 - d) + 2mk``, or None."""
    if entry.output is None:
        return None
    d = len(entry.inputs)
    m = 2 * genus - 2
    lhs = INDEX[entry.output] - sum(INDEX[x] for x in entry.inputs)
    rest = lhs - R_GRADING * (2 - d)
    if rest < 0 or rest % (2 * m):
        return None
    return rest // (2 * m)


def index_audit(entry: Entry, genus: int):
    """Pass/fail with the computed k; vanishing entries pass trivially."""
    if entry.output is None:
        return True, None
    k = hbar_degree(entry, genus)
    return k is not None, k


def weight_audit(entry: Entry, genus: int) -> bool:
    if entry.output is None:
        return True
    N = 2 * genus + 1
    tot = [0, 0, 0]
    for x in entry.inputs:
        tot = [a + b for a, b in zip(tot, WEIGHT[x])]
    return weight_class(tot, N) == weight_class(WEIGHT[entry.output], N)


def parity_audit(entry: Entry) -> bool:
    """mu^d has odd shifted degree: ``|out| = sum |in| + 2 - d`` mod 2."""
    if entry.output is None:
        return True
    d = len(entry.inputs)
    return (PARITY[entry.output] - sum(PARITY[x] for x in entry.inputs) - 2 + d) % 2 == 0


def audit_table(genus: int) -> dict:
    rows = []
    ok = True
    for e in table_entries(genus):
        iok, k = index_audit(e, genus)
        wok = weight_audit(e, genus)
        pok = parity_audit(e)
        ok = ok and iok and wok and pok
        rows.append({"inputs": list(e.inputs) if len(e.inputs) <= 4 else [e.inputs[0], f"x{len(e.inputs)}"],
                     "output": e.output, "coeff": e.coeff, "k": k,
                     "index": iok, "weight": wok, "parity": pok})
    return {"pass": ok, "rows": rows}


def unit_axioms(genus: int) -> bool:
    """``mu^2(a, e) = a`` and ``mu^2(e, a) = (-1)^{|a|} a`` on every non-unit generator."""
    t = {e.inputs: (e.output, e.coeff) for e in table_entries(genus)}
    for a in GENERATORS[1:]:
        if t.get((a, "e")) != (a, 1):
            return False
        if t.get(("e", a)) != (a, -1 if PARITY[a] else 1):
            return False
    return True


def triangle_antisymmetry(genus: int) -> bool:
    t = {e.inputs: (e.output, e.coeff) for e in table_entries(genus)}
    for a, b in (("x1", "x2"), ("x2", "x3"), ("x3", "x1")):
        o1, c1 = t[(a, b)]
        o2, c2 = t[(b, a)]
        if o1 != o2 or c1 != -c2:
            return False
    return True


# --------------------------------------------------------------------------- identification with Lambda(V)


def _mask(*idx):
    m = 0
    for i in idx:
        m |= 1 << (i - 1)
    return m


def _elem(n, pairs):
    return ExtElement(n, {m: Fraction(c) for m, c in pairs})


def printed_identification() -> dict:
    """``e -> 1, x_i -> xi_i, xb_i -> xi_j ^ xi_k`` (cyclic), ``q -> -xi_1 ^ xi_2 ^ xi_3``."""
    return {
        "e": _elem(3, [(0, 1)]),
        "x1": _elem(3, [(_mask(1), 1)]), "x2": _elem(3, [(_mask(2), 1)]), "x3": _elem(3, [(_mask(3), 1)]),
        "xb1": _elem(3, [(_mask(2, 3), 1)]),
        "xb2": _elem(3, [(_mask(1, 3), -1)]),  # xi_3 ^ xi_1
        "xb3": _elem(3, [(_mask(1, 2), 1)]),
        "q": _elem(3, [(_mask(1, 2, 3), -1)]),
    }


def consistent_identification() -> dict:
    """The printed map with ``xb_i`` negated, which makes the products match the signed wedge."""
    ident = printed_identification()
    for i in (1, 2, 3):
        ident[f"xb{i}"] = ident[f"xb{i}"].scale(-1)
    return ident


def flip(ident: dict, name: str) -> dict:
    out = dict(ident)
    out[name] = out[name].scale(-1)
    return out


def _signed_wedge(a2: ExtElement, a1: ExtElement) -> ExtElement:
    out = {}
    for m2, c2 in a2.terms.items():
        for m1, c1 in a1.terms.items():
            s = wedge_sign(m2, m1)
            if not s:
                continue
            if popcount(m1) & 1:
                s = -s
            out[m2 | m1] = out.get(m2 | m1, 0) + s * c2 * c1
    return ExtElement(a2.n, out)


def weight_map_ok(ident: dict, genus: int) -> bool:
    """Each generator's weight is minus the G-weight of its image (xi_k carries -e_k)."""
    N = 2 * genus + 1
    for g, img in ident.items():
        for m in img.terms:
            v = [0, 0, 0]
            for k in range(3):
                if m >> k & 1:
                    v[k] -= 1
            if weight_class([-x for x in v], N) != weight_class(WEIGHT[g], N):
                return False
    return True


def product_consistency(ident: dict, genus: int) -> dict:
    """Per source group: do the arity-2 entries equal the signed wedge of the images?"""
    res: dict = {}
    for e in table_entries(genus):
        if len(e.inputs) != 2:
            continue
        a2, a1 = (ident[x] for x in e.inputs)
        lhs = _signed_wedge(a2, a1)
        rhs = ident[e.output].scale(e.coeff) if e.output else ExtElement(3, {})
        res.setdefault(e.source, True)
        if lhs != rhs:
            res[e.source] = False
    return res


def identify_to_exterior(genus: int, ident: dict | None = None) -> AInfStructure:
    """The stated products transported to Lambda(V); unstated tuples are zero."""
    ident = ident or consistent_identification()
    inverse = {}
    for g, img in ident.items():
        (m, c), = img.terms.items()
        inverse[m] = (g, c)
    table: dict = {}
    for e in table_entries(genus):
        if e.output is None:
            continue
        coef = Fraction(e.coeff)
        masks = []
        for x in e.inputs:
            (m, c), = ident[x].terms.items()
            masks.append(m)
            coef /= c
        (mo, co), = ident[e.output].terms.items()
        table[tuple(masks)] = {mo: coef * co}
    d = 2 * genus + 1

    def mu(tup):
        return table.get(tuple(tup), {})

    return AInfStructure(3, mu, d, "fukaya")


def _hkr_function(mu: AInfStructure, d: int, genus: int) -> Polynomial:
    import itertools

    acc: dict = {}
    for tup in itertools.product((1, 2, 4), repeat=d):
        v = mu(tup).get(0)
        if v:
            e = tuple(sum(1 for a in tup if a == 1 << k) for k in range(3))
            acc[e] = acc.get(e, 0) + v
    return Polynomial(3, acc)


@dataclass
class FukayaReport:
    genus: int
    clauses: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(self.clauses.values())


def fragment_hypotheses(genus: int, ident: dict | None = None) -> FukayaReport:
    mu = identify_to_exterior(genus, ident)
    rep = FukayaReport(genus)
    cubic = _hkr_function(mu, 3, genus)
    top = _hkr_function(mu, 2 * genus + 1, genus)
    N = 2 * genus + 1
    rep.values["cubic"] = cubic
    rep.values["top"] = top
    rep.clauses["cubic_term"] = cubic == Polynomial(3, {(1, 1, 1): -1})
    rep.clauses["top_term"] = top == Polynomial(3, {(N, 0, 0): 1, (0, N, 0): 1, (0, 0, N): 1})
    return rep


def cross_check(genus: int, transferred_report=None, engine=None, workers: int = 1) -> FukayaReport:
    """Both the table fragment and the transferred structure against the same hypotheses."""
    from .transfer import theorem52_hypothesis_check

    frag = fragment_hypotheses(genus)
    tr = transferred_report or theorem52_hypothesis_check(genus, workers=workers, engine=engine)
    rep = FukayaReport(genus)
    for clause in ("cubic_term", "top_term"):
        rep.clauses[f"fukaya_{clause}"] = frag.clauses[clause]
        rep.clauses[f"transfer_{clause}"] = bool(tr.clauses.get(clause))
    rep.clauses["cubic_agree"] = frag.values["cubic"] == tr.values["cubic"]
    top_tr = tr.values["top"]
    lam = tr.values.get("lambda")
    if lam:
        top_tr = top_tr - Polynomial(3, {((2 * genus + 1) // 3,) * 3: lam})
    rep.clauses["top_agree"] = frag.values["top"] == top_tr
    rep.values["lambda"] = lam
    return rep
