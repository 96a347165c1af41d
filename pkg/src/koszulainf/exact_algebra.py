"""Exact sparse arithmetic: polynomials, exterior algebras and the operator algebra B.

Conventions used throughout the package:

* Monomials are exponent tuples ``(e_1, ..., e_n)``; canonical order is total degree
  first, then lexicographic on the exponent tuple.
* Exterior monomials are bitmasks.  Bit ``k`` stands for ``xi_{k+1}`` (side ``"V"``)
  or ``dz_{k+1}`` (side ``"Vdual"``); a mask denotes the wedge of its generators in
  increasing index order.
* For ``theta = xi_{i1} ^ ... ^ xi_{ik}`` with ``i1 < ... < ik`` the contraction is
  ``iota_theta = iota_{xi_{i1}} o ... o iota_{xi_{ik}}``.  With this choice
  ``theta -> iota_theta`` is an algebra map, so ``i(theta) = 1 (x) theta`` is
  multiplicative.
* An element ``f beta (x) theta`` of B acts on Omega(V) as ``w -> f beta ^ iota_theta(w)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product as iproduct
import json

MAX_VARS = 16


class AlgebraError(ValueError):
    pass


def popcount(m: int) -> int:
    return bin(m).count("1")


def mask_indices(m: int) -> list[int]:
    out = []
    k = 0
    while m:
        if m & 1:
            out.append(k)
        m >>= 1
        k += 1
    return out


def wedge_sign(a: int, b: int) -> int:
    """Sign of ``e_a ^ e_b = sign * e_{a|b}`` for disjoint masks (0 if they overlap)."""
    if a & b:
        return 0
    swaps = 0
    for j in mask_indices(b):
        swaps += popcount(a >> (j + 1))
    return -1 if swaps & 1 else 1


def mono_key(e: tuple) -> tuple:
    return (sum(e), e)


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


@dataclass(frozen=True)
class RingConfig:
    n: int = 3
    genus: int | None = None
    truncation_order: int | None = None

    def __post_init__(self):
        if not 1 <= self.n <= MAX_VARS:
            raise AlgebraError(f"n must lie in 1..{MAX_VARS}")
        if self.genus is not None:
            if self.genus < 1:
                raise AlgebraError("genus must be positive")
            if self.truncation_order is not None and self.truncation_order < 2 * self.genus + 2:
                raise AlgebraError("truncation_order must be >= 2*genus + 2")
        if self.truncation_order is not None and self.truncation_order < 1:
            raise AlgebraError("truncation_order must be positive")

    @property
    def modulus(self) -> int:
        if self.genus is None:
            raise AlgebraError("no genus set: G-weights unavailable")
        return 2 * self.genus + 1


# --------------------------------------------------------------------------- polynomials


class Polynomial:
    """Truncated polynomial over Q in ``n`` commuting variables ``z_1..z_n``."""

    __slots__ = ("n", "terms", "order", "truncated")

    def __init__(self, n: int, terms=None, order: int | None = None, truncated: bool = False):
        self.n = n
        clean = {}
        if terms:
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != n:
                    raise AlgebraError(f"exponent {e} has wrong length for n={n}")
                c = to_fraction(c)
                if c == 0:
                    continue
                if order is not None and sum(e) > order:
                    truncated = True
                    continue
                clean[e] = clean.get(e, 0) + c
                if clean[e] == 0:
                    del clean[e]
        self.terms = clean
        self.order = order
        self.truncated = truncated

    # construction helpers
    @classmethod
    def zero(cls, n, order=None):
        return cls(n, {}, order)

    @classmethod
    def const(cls, n, c, order=None):
        return cls(n, {(0,) * n: c}, order)

    @classmethod
    def var(cls, n, i, order=None):
        """The coordinate ``z_i`` (1-based)."""
        if not 1 <= i <= n:
            raise AlgebraError(f"variable index {i} out of range 1..{n}")
        e = [0] * n
        e[i - 1] = 1
        return cls(n, {tuple(e): 1}, order)

    @classmethod
    def monomial(cls, exps, coeff=1, order=None):
        return cls(len(exps), {tuple(exps): coeff}, order)

    # basic protocol
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.const(self.n, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: mono_key(t[0]))

    def __repr__(self):
        return f"Polynomial({self.to_str()})"

    def to_str(self, names=None):
        if not self.terms:
            return "0"
        names = names or [f"z{k + 1}" for k in range(self.n)]
        parts = []
        for e, c in self.sorted_terms():
            mon = "*".join(
                names[k] if p == 1 else f"{names[k]}^{p}" for k, p in enumerate(e) if p
            )
            if not mon:
                parts.append(str(c))
            elif c == 1:
                parts.append(mon)
            elif c == -1:
                parts.append("-" + mon)
            else:
                parts.append(f"{c}*{mon}")
        return " + ".join(parts).replace("+ -", "- ")

    def _combine_order(self, other):
        if self.order is None:
            return other.order
        if other.order is None:
            return self.order
        return min(self.order, other.order)

    def _check(self, other):
        if self.n != other.n:
            raise AlgebraError(f"variable count mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.const(self.n, other)
        self._check(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            v = t.get(e, 0) + c
            if v:
                t[e] = v
            else:
                t.pop(e, None)
        return Polynomial(self.n, t, self._combine_order(other), self.truncated or other.truncated)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.n, {e: -c for e, c in self.terms.items()}, self.order, self.truncated)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.const(self.n, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = to_fraction(c)
        return Polynomial(self.n, {e: c * v for e, v in self.terms.items()}, self.order, self.truncated)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return poly_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Polynomial.const(self.n, 1, self.order)
        for _ in range(k):
            out = out * self
        return out

    def truncate(self, order):
        return Polynomial(self.n, self.terms, order, self.truncated)

    def degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def filtration_order(self):
        """Lowest total degree of a stored term; ``inf`` for zero."""
        return min((sum(e) for e in self.terms), default=float("inf"))

    def homogeneous_part(self, d):
        return Polynomial(self.n, {e: c for e, c in self.terms.items() if sum(e) == d}, self.order)

    def graded_parts(self):
        parts = {}
        for e, c in self.terms.items():
            parts.setdefault(sum(e), {})[e] = c
        return {d: Polynomial(self.n, t, self.order) for d, t in sorted(parts.items())}

    def coeff(self, exps):
        return self.terms.get(tuple(exps), Fraction(0))

    def partial(self, i):
        return poly_partial(self, i)

    def substitute(self, images, order=None):
        """Compose with ``z_k -> images[k]``, truncating at ``order``."""
        n = images[0].n if images else self.n
        powers = [[Polynomial.const(n, 1, order)] for _ in images]

        def power(k, p):
            cache = powers[k]
            while len(cache) <= p:
                cache.append(poly_mul(cache[-1], images[k], order))
            return cache[p]

        acc: dict = {}
        for e, c in self.terms.items():
            factors = sorted((power(k, p) for k, p in enumerate(e) if p), key=lambda q: len(q.terms))
            if not factors:
                term = Polynomial.const(n, 1, order)
            else:
                term = factors[0]
                for q in factors[1:]:
                    term = poly_mul(term, q, order)
            for e2, c2 in term.terms.items():
                v = acc.get(e2, 0) + c * c2
                if v:
                    acc[e2] = v
                else:
                    acc.pop(e2, None)
        out = Polynomial(n, None, order)
        out.terms = acc
        return out

    # JSON
    def to_json(self):
        return {
            "vars": [f"z{k + 1}" for k in range(self.n)],
            "terms": [{"coeff": str(c), "exps": list(e)} for e, c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, obj, order=None):
        if isinstance(obj, str):
            obj = json.loads(obj)
        if "vars" not in obj or "terms" not in obj:
            raise AlgebraError("polynomial JSON needs 'vars' and 'terms'")
        n = len(obj["vars"])
        terms = {}
        for t in obj["terms"]:
            e = tuple(int(x) for x in t["exps"])
            if len(e) != n or any(x < 0 for x in e):
                raise AlgebraError(f"bad exponent vector {t['exps']}")
            terms[e] = terms.get(e, 0) + to_fraction(t["coeff"])
        return cls(n, terms, order)


def poly_mul(a: Polynomial, b: Polynomial, order: int | None = None) -> Polynomial:
    if a.n != b.n:
        raise AlgebraError(f"variable count mismatch: {a.n} vs {b.n}")
    if order is None:
        order = a._combine_order(b)
    truncated = a.truncated or b.truncated
    if len(a.terms) > len(b.terms):
        a, b = b, a
    buckets: dict = {}
    for e2, c2 in b.terms.items():
        buckets.setdefault(sum(e2), []).append((e2, c2))
    degs = sorted(buckets)
    t: dict = {}
    for e1, c1 in a.terms.items():
        d1 = sum(e1)
        for d2 in degs:
            if order is not None and d1 + d2 > order:
                truncated = True
                break
            for e2, c2 in buckets[d2]:
                e = tuple(x + y for x, y in zip(e1, e2))
                v = t.get(e, 0) + c1 * c2
                if v:
                    t[e] = v
                else:
                    t.pop(e, None)
    p = Polynomial(a.n, None, order, truncated)
    p.terms = t
    return p


def poly_partial(p: Polynomial, i: int) -> Polynomial:
    """Formal partial derivative with respect to ``z_i`` (1-based)."""
    if not 1 <= i <= p.n:
        raise AlgebraError(f"variable index {i} out of range 1..{p.n}")
    k = i - 1
    t = {}
    for e, c in p.terms.items():
        if e[k]:
            e2 = list(e)
            e2[k] -= 1
            t[tuple(e2)] = c * e[k]
    return Polynomial(p.n, t, p.order, p.truncated)


def superpotential(g: int, n: int = 3) -> Polynomial:
    """``W = -z1 z2 z3 + z1^(2g+1) + z2^(2g+1) + z3^(2g+1)``."""
    if n != 3:
        raise AlgebraError("the superpotential is defined for n = 3")
    N = 2 * g + 1
    return Polynomial(3, {(1, 1, 1): -1, (N, 0, 0): 1, (0, N, 0): 1, (0, 0, N): 1})


# --------------------------------------------------------------------------- exterior algebra

SIDES = ("V", "Vdual")


class ExtElement:
    """Element of Lambda(V) (generators xi_k) or Lambda(V^dual) (generators dz_k)."""

    __slots__ = ("n", "side", "terms")

    def __init__(self, n: int, terms=None, side: str = "V"):
        if side not in SIDES:
            raise AlgebraError(f"side must be one of {SIDES}")
        self.n = n
        self.side = side
        clean = {}
        for m, c in (terms or {}).items():
            if m >> n:
                raise AlgebraError(f"mask {m} out of range for n={n}")
            c = to_fraction(c)
            if c:
                v = clean.get(m, 0) + c
                if v:
                    clean[m] = v
                else:
                    clean.pop(m, None)
        self.terms = clean

    @classmethod
    def gen(cls, n, k, side="V"):
        """The generator with 1-based index ``k``."""
        if not 1 <= k <= n:
            raise AlgebraError(f"generator index {k} out of range 1..{n}")
        return cls(n, {1 << (k - 1): 1}, side)

    @classmethod
    def one(cls, n, side="V"):
        return cls(n, {0: 1}, side)

    @classmethod
    def basis(cls, n, mask, side="V"):
        return cls(n, {mask: 1}, side)

    def __eq__(self, other):
        if not isinstance(other, ExtElement):
            return NotImplemented
        return self.n == other.n and self.side == other.side and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, self.side, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        sym = "xi" if self.side == "V" else "dz"
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items()):
            w = "^".join(f"{sym}{k + 1}" for k in mask_indices(m)) or "1"
            parts.append(f"{c}*{w}")
        return " + ".join(parts)

    def _check(self, other):
        if self.side != other.side:
            raise AlgebraError("cannot combine elements of Lambda(V) and Lambda(V^dual)")
        if self.n != other.n:
            raise AlgebraError("dimension mismatch")

    def __add__(self, other):
        self._check(other)
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, 0) + c
        return ExtElement(self.n, t, self.side)

    def __neg__(self):
        return ExtElement(self.n, {m: -c for m, c in self.terms.items()}, self.side)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = to_fraction(c)
        return ExtElement(self.n, {m: c * v for m, v in self.terms.items()}, self.side)

    def degrees(self):
        return {popcount(m) for m in self.terms}

    def degree(self):
        """Exterior degree if homogeneous, else None."""
        d = self.degrees()
        return d.pop() if len(d) == 1 else None

    def parity(self):
        p = {popcount(m) & 1 for m in self.terms}
        return p.pop() if len(p) == 1 else None

    def homogeneous_part(self, d):
        return ExtElement(self.n, {m: c for m, c in self.terms.items() if popcount(m) == d}, self.side)

    def to_json(self):
        return [{"mask": m, "coeff": str(c)} for m, c in sorted(self.terms.items())]

    @classmethod
    def from_json(cls, n, obj, side="V"):
        return cls(n, {int(t["mask"]): to_fraction(t["coeff"]) for t in obj}, side)


def wedge(a: ExtElement, b: ExtElement) -> ExtElement:
    a._check(b)
    t: dict = {}
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            s = wedge_sign(m1, m2)
            if s:
                t[m1 | m2] = t.get(m1 | m2, 0) + s * c1 * c2
    return ExtElement(a.n, t, a.side)


def _iota_single(i: int, m: int):
    """``iota_{e_i}`` on the basis monomial ``m``: returns (sign, mask) or None."""
    if not (m >> i) & 1:
        return None
    sign = -1 if popcount(m & ((1 << i) - 1)) & 1 else 1
    return sign, m & ~(1 << i)


def _iota_mask(theta: int, m: int):
    """``iota_theta`` on a basis monomial using the ascending-composition convention."""
    sign = 1
    for i in reversed(mask_indices(theta)):
        r = _iota_single(i, m)
        if r is None:
            return None
        s, m = r
        sign *= s
    return sign, m


def contract(theta: ExtElement, target: ExtElement) -> ExtElement:
    """Interior product of an element of one exterior algebra into the dual one."""
    if theta.side == target.side:
        raise AlgebraError("contraction needs elements of dual sides")
    if theta.n != target.n:
        raise AlgebraError("dimension mismatch")
    t: dict = {}
    for th, c1 in theta.terms.items():
        for m, c2 in target.terms.items():
            r = _iota_mask(th, m)
            if r:
                s, m2 = r
                t[m2] = t.get(m2, 0) + s * c1 * c2
    return ExtElement(target.n, t, target.side)


# --------------------------------------------------------------------------- the algebra B


def _sort_sign(seq):
    """Sign of sorting a sequence of distinct indices; 0 on repeats."""
    if len(set(seq)) != len(seq):
        return 0
    inv = 0
    for x in range(len(seq)):
        for y in range(x + 1, len(seq)):
            if seq[x] > seq[y]:
                inv += 1
    return -1 if inv & 1 else 1


def _normal_order(word: tuple) -> dict:
    """Normal-order a word of creation (0, j) / annihilation (1, i) operators.

    Uses ``a_i c_j = delta_ij - c_j a_i`` and returns {(beta, theta): coeff}.
    """
    for p in range(len(word) - 1):
        if word[p][0] == 1 and word[p + 1][0] == 0:
            i, j = word[p][1], word[p + 1][1]
            out: dict = {}
            if i == j:
                for k, v in _normal_order(word[:p] + word[p + 2:]).items():
                    out[k] = out.get(k, 0) + v
            swapped = word[:p] + (word[p + 1], word[p]) + word[p + 2:]
            for k, v in _normal_order(swapped).items():
                out[k] = out.get(k, 0) - v
            return {k: v for k, v in out.items() if v}
    cs = [x[1] for x in word if x[0] == 0]
    as_ = [x[1] for x in word if x[0] == 1]
    s = _sort_sign(cs) * _sort_sign(as_)
    if not s:
        return {}
    beta = sum(1 << j for j in cs)
    theta = sum(1 << i for i in as_)
    return {(beta, theta): s}


@lru_cache(maxsize=None)
def clifford_product(b1: int, t1: int, b2: int, t2: int) -> tuple:
    """Constant part of ``(b1 (x) t1) o (b2 (x) t2)`` as ((beta, theta, sign), ...)."""
    word = (
        tuple((0, j) for j in mask_indices(b1))
        + tuple((1, i) for i in mask_indices(t1))
        + tuple((0, j) for j in mask_indices(b2))
        + tuple((1, i) for i in mask_indices(t2))
    )
    return tuple(sorted((b, t, s) for (b, t), s in _normal_order(word).items()))


class BElement:
    """Element ``sum c * z^e dz_beta (x) xi_theta`` of B = Omega(V) (x) Lambda(V).

    ``terms`` maps ``(exps, beta, theta)`` to a nonzero Fraction.
    """

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms=None):
        self.n = n
        self.terms = {}
        if terms:
            for k, c in terms.items():
                c = to_fraction(c)
                if c:
                    e, b, t = k
                    v = self.terms.get((tuple(e), b, t), 0) + c
                    if v:
                        self.terms[(tuple(e), b, t)] = v
                    else:
                        self.terms.pop((tuple(e), b, t), None)

    @classmethod
    def _raw(cls, n, terms):
        obj = cls.__new__(cls)
        obj.n = n
        obj.terms = terms
        return obj

    @classmethod
    def identity(cls, n):
        return cls._raw(n, {((0,) * n, 0, 0): Fraction(1)})

    @classmethod
    def basis(cls, n, exps=None, beta=0, theta=0, coeff=1):
        exps = tuple(exps) if exps is not None else (0,) * n
        return cls(n, {(exps, beta, theta): coeff})

    @classmethod
    def from_poly(cls, p: Polynomial, beta=0, theta=0):
        return cls._raw(p.n, {(e, beta, theta): c for e, c in p.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, BElement):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "BElement(0)"
        parts = []
        for (e, b, t), c in sorted(self.terms.items(), key=lambda kv: (mono_key(kv[0][0]), kv[0][1:])):
            parts.append(f"{c}*z{list(e)}dz{mask_indices(b)}(x)xi{mask_indices(t)}")
        return "BElement(" + " + ".join(parts) + ")"

    def __add__(self, other):
        t = dict(self.terms)
        for k, c in other.terms.items():
            v = t.get(k, 0) + c
            if v:
                t[k] = v
            else:
                t.pop(k, None)
        return BElement._raw(self.n, t)

    def __neg__(self):
        return BElement._raw(self.n, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = to_fraction(c)
        if not c:
            return BElement._raw(self.n, {})
        return BElement._raw(self.n, {k: c * v for k, v in self.terms.items()})

    def __mul__(self, other):
        return b_compose(self, other)

    def parity(self):
        p = {(popcount(b) + popcount(t)) & 1 for (_, b, t) in self.terms}
        return p.pop() if len(p) == 1 else None

    def split_parity(self):
        even, odd = {}, {}
        for k, c in self.terms.items():
            ((odd if (popcount(k[1]) + popcount(k[2])) & 1 else even))[k] = c
        return BElement._raw(self.n, even), BElement._raw(self.n, odd)

    def filter(self, pred):
        return BElement._raw(self.n, {k: c for k, c in self.terms.items() if pred(k)})

    def trigrades(self, genus=None):
        return {trigrade_of_term(k, genus) for k in self.terms}


def b_compose(a: BElement, b: BElement) -> BElement:
    """Operator composition ``a o b`` in canonical tensor form."""
    if a.n != b.n:
        raise AlgebraError("dimension mismatch")
    t: dict = {}
    for (e1, b1, t1), c1 in a.terms.items():
        for (e2, b2, t2), c2 in b.terms.items():
            prod = clifford_product(b1, t1, b2, t2)
            if not prod:
                continue
            e = tuple(x + y for x, y in zip(e1, e2))
            c = c1 * c2
            for bb, tt, s in prod:
                k = (e, bb, tt)
                v = t.get(k, 0) + (c if s > 0 else -c)
                if v:
                    t[k] = v
                else:
                    del t[k]
    return BElement._raw(a.n, t)


# matrix oracle -------------------------------------------------------------


def _creation(j: int, m: int):
    if (m >> j) & 1:
        return None
    sign = -1 if popcount(m & ((1 << j) - 1)) & 1 else 1
    return sign, m | (1 << j)


def operator_on_basis(beta: int, theta: int, m: int):
    """Action of ``dz_beta ^ iota_theta`` on the basis form ``dz_m``: (sign, mask) or None."""
    r = _iota_mask(theta, m)
    if r is None:
        return None
    s, m2 = r
    s2 = wedge_sign(beta, m2)
    if not s2:
        return None
    return s * s2, beta | m2


def b_to_matrix(a: BElement) -> list:
    """``2^n x 2^n`` matrix of Polynomials; column ``m`` is the image of ``dz_m``."""
    n = a.n
    size = 1 << n
    M = [[{} for _ in range(size)] for _ in range(size)]
    for (e, b, t), c in a.terms.items():
        for m in range(size):
            r = operator_on_basis(b, t, m)
            if r:
                s, row = r
                cell = M[row][m]
                cell[e] = cell.get(e, 0) + s * c
    return [[Polynomial(n, cell) for cell in row] for row in M]


def matrix_to_b(M: list, n: int) -> BElement:
    size = 1 << n
    if len(M) != size or any(len(row) != size for row in M):
        raise AlgebraError(f"matrix must be {size}x{size} for n={n}")
    cols = [{r: M[r][m] for r in range(size) if M[r][m]} for m in range(size)]
    out = BElement(n)
    for m in sorted(range(size), key=lambda x: (popcount(x), x)):
        residual = dict(cols[m])
        # subtract contributions of already-determined operators with theta strictly inside m
        for (e, b, t), c in out.terms.items():
            r = operator_on_basis(b, t, m)
            if r:
                s, row = r
                residual[row] = residual.get(row, Polynomial(n)) - Polynomial(n, {e: s * c})
        r0 = _iota_mask(m, m)
        sign = r0[0]
        new = {}
        for row, p in residual.items():
            for e, c in p.terms.items():
                new[(e, row, m)] = sign * c
        out = out + BElement(n, new)
    return out


def matrix_mul(A: list, B: list) -> list:
    size = len(A)
    n = A[0][0].n
    out = []
    for i in range(size):
        row = []
        for j in range(size):
            acc = Polynomial(n)
            for k in range(size):
                if A[i][k] and B[k][j]:
                    acc = acc + A[i][k] * B[k][j]
            row.append(acc)
        out.append(row)
    return out


# --------------------------------------------------------------------------- gradings


@dataclass(frozen=True)
class TriGrade:
    parity: int
    aux_degree: int
    weight: tuple | None

    def __add__(self, other):
        w = None
        if self.weight is not None and other.weight is not None:
            w = tuple(x + y for x, y in zip(self.weight, other.weight))
        return TriGrade((self.parity + other.parity) % 2, self.aux_degree + other.aux_degree, w)


def reduce_weight(v, N):
    """Canonical form of a vector of ``(Z/N)^3`` modulo the diagonal: third coordinate 0."""
    v = list(v)
    return ((v[0] - v[2]) % N, (v[1] - v[2]) % N)


def raw_weight(exps=(0, 0, 0), beta=0, theta=0):
    """Unreduced weight: z_k and dz_k carry +e_k, xi_k carries -e_k."""
    w = list(exps)
    for k in mask_indices(beta):
        w[k] += 1
    for k in mask_indices(theta):
        w[k] -= 1
    return tuple(w)


def trigrade_of_term(key, genus=None):
    e, b, t = key
    aux = 2 * sum(e) - popcount(b) + popcount(t)
    par = (popcount(b) + popcount(t)) & 1
    w = None
    if genus is not None and len(e) == 3:
        w = reduce_weight(raw_weight(e, b, t), 2 * genus + 1)
    return TriGrade(par, aux, w)


INHOMOGENEOUS = "inhomogeneous"


def g_weight(x, genus: int):
    """G-weight in (Z/(2g+1))^2 of a Polynomial or ExtElement, or ``"inhomogeneous"``."""
    N = 2 * genus + 1
    ws = set()
    if isinstance(x, Polynomial):
        if x.n != 3:
            raise AlgebraError("G-weights are defined for n = 3")
        for e in x.terms:
            ws.add(reduce_weight(e, N))
    elif isinstance(x, ExtElement):
        sgn = -1 if x.side == "V" else 1
        for m in x.terms:
            v = [0, 0, 0]
            for k in mask_indices(m):
                v[k] += sgn
            ws.add(reduce_weight(v, N))
    elif isinstance(x, BElement):
        for k in x.terms:
            ws.add(reduce_weight(raw_weight(*k), N))
    else:
        raise AlgebraError(f"no weight for {type(x).__name__}")
    if len(ws) == 1:
        return ws.pop()
    if not ws:
        return (0, 0)
    return INHOMOGENEOUS


def all_exponents(n, degree):
    """All exponent vectors of total degree ``degree`` in canonical order."""
    if n == 1:
        return [(degree,)]
    out = []
    for first in range(degree, -1, -1):
        for rest in all_exponents(n - 1, degree - first):
            out.append((first,) + rest)
    return sorted(out)


def exponents_up_to(n, degree):
    return [e for d in range(degree + 1) for e in all_exponents(n, d)]


def tensor_basis(n, max_degree):
    """All (exps, beta, theta) keys with polynomial degree <= max_degree."""
    return [
        (e, b, t)
        for e in exponents_up_to(n, max_degree)
        for b, t in iproduct(range(1 << n), range(1 << n))
    ]
