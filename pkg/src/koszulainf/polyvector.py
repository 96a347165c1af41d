"""Formal polyvector fields on k^n, truncated modulo F_order.

A term is keyed by ``(exps, mask)``: the monomial ``z^exps`` times
``xi_mask``.  The Lie degree of a Lambda^j term is ``j - 1``.  Everything is
computed modulo ``F_order`` (polynomial degree >= order is dropped) when an
order is set.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .exact_algebra import (
    AlgebraError,
    Polynomial,
    all_exponents,
    mask_indices,
    popcount,
    reduce_weight,
    superpotential,
    to_fraction,
    wedge_sign,
)
from .linalg import min_norm_solve, solve


def _trunc(order, deg):
    return order is not None and deg >= order


def _min_order(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class Polyvector:
    __slots__ = ("n", "terms", "order")

    def __init__(self, n: int, terms=None, order: int | None = None):
        self.n = n
        self.order = order
        clean: dict = {}
        for (e, m), c in (terms or {}).items():
            e = tuple(e)
            if len(e) != n or m >> n:
                raise AlgebraError(f"bad polyvector key {(e, m)} for n={n}")
            if _trunc(order, sum(e)):
                continue
            c = to_fraction(c)
            if c:
                v = clean.get((e, m), 0) + c
                if v:
                    clean[(e, m)] = v
                else:
                    clean.pop((e, m), None)
        self.terms = clean

    # construction
    @classmethod
    def zero(cls, n=3, order=None):
        return cls(n, {}, order)

    @classmethod
    def from_poly(cls, p: Polynomial, mask: int = 0, order=None):
        return cls(p.n, {(e, mask): c for e, c in p.terms.items()}, order)

    @classmethod
    def xi(cls, n, *indices, coeff=1, exps=None, order=None):
        """``coeff * z^exps * xi_{i1} ^ ... ^ xi_{ik}`` with 1-based indices in the given order."""
        mask = 0
        sign = 1
        for i in indices:
            bit = 1 << (i - 1)
            s = wedge_sign(mask, bit)
            if not s:
                return cls(n, {}, order)
            sign *= s
            mask |= bit
        e = tuple(exps) if exps is not None else (0,) * n
        return cls(n, {(e, mask): sign * to_fraction(coeff)}, order)

    # basic algebra
    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return isinstance(other, Polyvector) and self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"Polyvector({self.to_str()})"

    def to_str(self):
        if not self.terms:
            return "0"
        parts = []
        for (e, m), c in self.sorted_terms():
            mono = "*".join(f"z{k + 1}^{p}" if p > 1 else f"z{k + 1}" for k, p in enumerate(e) if p)
            xs = "^".join(f"xi{k + 1}" for k in mask_indices(m))
            body = "*".join(x for x in (mono, xs) if x) or "1"
            parts.append(f"{c}*{body}")
        return " + ".join(parts)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: (popcount(kv[0][1]), kv[0][1], sum(kv[0][0]), kv[0][0]))

    def _check(self, other):
        if not isinstance(other, Polyvector) or other.n != self.n:
            raise AlgebraError("polyvector mismatch")

    def __add__(self, other):
        self._check(other)
        t = dict(self.terms)
        for k, c in other.terms.items():
            t[k] = t.get(k, 0) + c
        return Polyvector(self.n, t, _min_order(self.order, other.order))

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = to_fraction(c)
        return Polyvector(self.n, {k: c * v for k, v in self.terms.items()}, self.order)

    def truncate(self, order):
        return Polyvector(self.n, self.terms, _min_order(order, self.order))

    # grading
    def xi_degrees(self):
        return sorted({popcount(m) for _, m in self.terms})

    def lie_degree(self):
        ds = {popcount(m) - 1 for _, m in self.terms}
        if len(ds) > 1:
            raise AlgebraError("inhomogeneous polyvector")
        return ds.pop() if ds else None

    def xi_part(self, j):
        return Polyvector(self.n, {k: c for k, c in self.terms.items() if popcount(k[1]) == j}, self.order)

    def degree_part(self, d):
        return Polyvector(self.n, {k: c for k, c in self.terms.items() if sum(k[0]) == d}, self.order)

    def filtration_order(self):
        return min((sum(e) for e, _ in self.terms), default=math.inf)

    def poly_degrees(self):
        return sorted({sum(e) for e, _ in self.terms})

    def function_part(self) -> Polynomial:
        return Polynomial(self.n, {e: c for (e, m), c in self.terms.items() if m == 0})

    def coefficient(self, mask) -> Polynomial:
        return Polynomial(self.n, {e: c for (e, m), c in self.terms.items() if m == mask})

    # JSON
    def to_json(self):
        return {
            "vars": [f"z{k + 1}" for k in range(self.n)],
            "order": self.order,
            "terms": [{"coeff": str(c), "exps": list(e), "xi": m} for (e, m), c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            n = len(obj["vars"])
            terms: dict = {}
            for t in obj["terms"]:
                k = (tuple(int(x) for x in t["exps"]), int(t.get("xi", 0)))
                if any(x < 0 for x in k[0]):
                    raise AlgebraError("negative exponent")
                terms[k] = terms.get(k, 0) + to_fraction(t["coeff"])
        except (KeyError, TypeError, ValueError) as exc:
            raise AlgebraError(f"malformed polyvector JSON: {exc}") from exc
        return cls(n, terms, obj.get("order"))


# --------------------------------------------------------------------------- Schouten bracket


def _dmono(e, i):
    """``d/dz_i z^e`` as (coefficient, exps) or None."""
    if not e[i]:
        return None
    e2 = list(e)
    e2[i] -= 1
    return e[i], tuple(e2)


def schouten(a: Polyvector, b: Polyvector, order: int | None = None) -> Polyvector:
    """Schouten bracket of polyvector fields, term by term."""
    a._check(b)
    order = _min_order(order, _min_order(a.order, b.order))
    n = a.n
    out: dict = {}

    def put(e, m, c):
        if _trunc(order, sum(e)):
            return
        v = out.get((e, m), 0) + c
        if v:
            out[(e, m)] = v
        else:
            out.pop((e, m), None)

    b_terms = sorted(b.terms.items(), key=lambda kv: sum(kv[0][0]))
    b_degs = [sum(e2) for (e2, _), _ in b_terms]
    for (e1, I), c1 in a.terms.items():
        k = popcount(I)
        Iidx = mask_indices(I)
        d1 = sum(e1)
        for ((e2, J), c2), d2 in zip(b_terms, b_degs):
            if order is not None and d1 + d2 - 1 >= order:
                break
            c12 = c1 * c2
            l = popcount(J)
            Jidx = mask_indices(J)
            for q, i in enumerate(Iidx, start=1):
                d = _dmono(e2, i)
                if d is None:
                    continue
                rest = I & ~(1 << i)
                s = wedge_sign(rest, J)
                if not s:
                    continue
                sign = -1 if (k - q) % 2 else 1
                e = tuple(x + y for x, y in zip(e1, d[1]))
                put(e, rest | J, sign * s * d[0] * c12)
            for p, j in enumerate(Jidx, start=1):
                d = _dmono(e1, j)
                if d is None:
                    continue
                rest = J & ~(1 << j)
                s = wedge_sign(rest, I)
                if not s:
                    continue
                sign = -1 if (l - p - 1 + (k - 1) * (l - 1)) % 2 else 1
                e = tuple(x + y for x, y in zip(e2, d[1]))
                put(e, rest | I, sign * s * d[0] * c12)
    return Polyvector(n, out, order)


def koszul_d(x: Polyvector, W: Polynomial, order=None) -> Polyvector:
    """Contraction with ``dW``: ``iota_{dW} x = [x, W]``."""
    return schouten(x, Polyvector.from_poly(W), order)


def euler_polyvector(n: int = 3) -> Polyvector:
    return Polyvector(n, {(tuple(int(i == k) for i in range(n)), 1 << k): 1 for k in range(n)})


# --------------------------------------------------------------------------- HKR


def hkr(beta, order: int, n: int | None = None) -> Polyvector:
    """``sum_j beta^j(xi, ..., xi)`` on the generic element ``xi = sum_k z_k xi_k``.

    ``beta`` is any callable on tuples of exterior masks returning ``{mask: coeff}``
    (a Hochschild cochain, an A-infinity structure); arities ``1 .. order - 1`` are
    visited, so the result is exact modulo ``F_order``.
    """
    import itertools

    n = n if n is not None else beta.n
    gens = [1 << i for i in range(n)]
    out: dict = {}
    for d in range(1, order):
        for tup in itertools.product(gens, repeat=d):
            val = beta(tup)
            if not val:
                continue
            e = [0] * n
            for m in tup:
                e[m.bit_length() - 1] += 1
            e = tuple(e)
            for m, c in val.items():
                out[(e, m)] = out.get((e, m), 0) + c
    return Polyvector(n, out, order)


# --------------------------------------------------------------------------- MC split


@dataclass
class MCSplitResidual:
    poisson: Polyvector
    compat: Polyvector
    koszul: Polyvector

    @property
    def zero(self):
        return not self.poisson and not self.compat


def mc_split_residual(alpha0: Polynomial | Polyvector, alpha2: Polyvector, order=None) -> MCSplitResidual:
    """``(1/2 [a2, a2], [a0, a2])`` and the Koszul reading ``iota_{d a0} a2``."""
    a0 = alpha0 if isinstance(alpha0, Polyvector) else Polyvector.from_poly(alpha0)
    if a0.xi_degrees() not in ([], [0]) or alpha2.xi_degrees() not in ([], [2]):
        raise AlgebraError("expected a function and a bivector")
    p = schouten(alpha2, alpha2, order).scale(Fraction(1, 2))
    c = schouten(a0, alpha2, order)
    k = koszul_d(alpha2, a0.function_part(), order)
    return MCSplitResidual(p, c, k)


# --------------------------------------------------------------------------- G-grading


def term_weight(e, mask, genus):
    """Reduced G-weight of ``z^e xi_mask``; xi_k carries ``-e_k``."""
    v = list(e)
    for k in mask_indices(mask):
        v[k] -= 1
    return reduce_weight(v, 2 * genus + 1)


def is_invariant(p: Polyvector, genus: int) -> bool:
    return all(term_weight(e, m, genus) == (0, 0) for e, m in p.terms)


def grading_ok(i: int, j: int, genus: int, d: int | None = None) -> bool:
    """Whether ``Sym^i (x) Lambda^j`` may appear in degree d of the graded DGLA.

    Needs ``i >= d + 2`` and ``2i + j - 3d - 3`` nonnegative and divisible by 4g - 4.  The
    default d is the degree of the MC and gauge components: 1 for even j, 0 for odd j.
    """
    if d is None:
        d = 1 - j % 2
    v = 2 * i + j - 3 * d - 3
    return i >= d + 2 and v >= 0 and v % (4 * genus - 4) == 0


def grading_violations(p: Polyvector, genus: int):
    return sorted({(sum(e), popcount(m)) for e, m in p.terms if not grading_ok(sum(e), popcount(m), genus)})


def check_g_shape(p: Polyvector, genus: int):
    """Enforce the filtration bounds for elements of degree 1 and 0: a0 in F_3, a2 in F_2g, g1 in F_{2g-1}, g3 in F_{2g-2}."""
    bounds = {0: 3, 2: 2 * genus, 1: 2 * genus - 1, 3: 2 * genus - 2}
    for e, m in p.terms:
        j = popcount(m)
        if j in bounds and sum(e) < bounds[j]:
            return False
        if not grading_ok(sum(e), j, genus):
            return False
    return is_invariant(p, genus)


def invariant_basis(i: int, j: int, genus: int, n: int = 3) -> list:
    """Monomial basis of the G-invariants in ``Sym^i (x) Lambda^j``, deterministic order."""
    from itertools import combinations

    out = []
    masks = sorted((sum(1 << k for k in c) for c in combinations(range(n), j)), reverse=True)
    for m in masks:
        for e in sorted(all_exponents(n, i), reverse=True):
            if term_weight(e, m, genus) == (0, 0):
                out.append(Polyvector(n, {(e, m): 1}))
    return out


# --------------------------------------------------------------------------- formal diffeomorphisms


@dataclass
class FormalDiffeo:
    """An ordered composite ``exp(v_m) ... exp(v_1)`` of formal vector fields; ``logs[0]`` acts first."""

    n: int = 3
    logs: list = field(default_factory=list)

    def __post_init__(self):
        for v in self.logs:
            if v.xi_degrees() not in ([], [1]):
                raise AlgebraError("logarithms must be vector fields")
            if v and v.filtration_order() < 2:
                raise AlgebraError("vector fields must vanish to order 2")

    def then(self, v: Polyvector) -> "FormalDiffeo":
        return FormalDiffeo(self.n, self.logs + [v])

    def compose(self, other: "FormalDiffeo") -> "FormalDiffeo":
        """``other`` after ``self``."""
        return FormalDiffeo(self.n, self.logs + other.logs)

    def coordinate_images(self, order: int) -> list:
        """Polynomials ``y_i`` such that the pushforward of f is ``f(y(z))`` modulo F_order."""
        # each exp(v) is an algebra automorphism, so flowing the coordinates gives the images
        ys = [Polyvector.from_poly(Polynomial.var(self.n, i + 1)) for i in range(self.n)]
        for v in self.logs:
            ys = [pushforward_field(v, y, order) for y in ys]
        return [Polynomial(self.n, {e: c for e, c in y.function_part().terms.items() if sum(e) < order}) for y in ys]

    def has_shape(self, order: int) -> bool:
        """``z_i -> z_i + O(z^2)``."""
        ys = self.coordinate_images(order)
        for i, y in enumerate(ys):
            lin = {e: c for e, c in y.terms.items() if sum(e) <= 1}
            want = {tuple(int(k == i) for k in range(self.n)): 1}
            if lin != want:
                return False
        return True

    def to_json(self):
        return {"n": self.n, "logs": [v.to_json() for v in self.logs]}

    @classmethod
    def from_json(cls, obj):
        return cls(int(obj["n"]), [Polyvector.from_json(v) for v in obj["logs"]])


def pushforward_field(v: Polyvector, p: Polyvector, order: int) -> Polyvector:
    """``exp(ad v) p`` modulo F_order; terminates because v vanishes to order 2."""
    if v and v.filtration_order() < 2:
        raise AlgebraError("vector field must vanish to order 2")
    total = p.truncate(order)
    cur = total
    k = 0
    while cur:
        k += 1
        cur = schouten(v, cur, order).scale(Fraction(1, k))
        total = total + cur
        if k > order + 2:
            raise AlgebraError("order overflow")
    return total


def pushforward_diffeo(d: FormalDiffeo, p: Polyvector, order: int) -> Polyvector:
    out = p.truncate(order)
    for v in d.logs:
        out = pushforward_field(v, out, order)
    return out


def random_g0_diffeo(rng: random.Random, genus: int, order: int, steps: int = 2, density: float = 0.5,
                     coeff_range: int = 2) -> FormalDiffeo:
    """Random composite of G-invariant vector fields of the allowed degrees ``1 + (2g - 2)m``, ``m >= 1``."""
    n = 3
    logs = []
    degrees = [1 + (2 * genus - 2) * m for m in range(1, order) if 1 + (2 * genus - 2) * m < order - 1]
    for _ in range(steps):
        terms = {}
        for deg in degrees:
            for basis in invariant_basis(deg, 1, genus):
                if rng.random() < density:
                    (key, _), = basis.terms.items()
                    c = rng.randint(-coeff_range, coeff_range)
                    if c:
                        terms[key] = Fraction(c)
        logs.append(Polyvector(n, terms))
    return FormalDiffeo(n, logs)


def random_formal_diffeo(rng: random.Random, steps: int = 2, max_exp: int = 2, coeff_range: int = 2,
                         n: int = 3) -> FormalDiffeo:
    """Random composite of vector fields with coefficients of degree >= 2, so ``z_i -> z_i + O(z^2)``."""
    logs = []
    for _ in range(steps):
        terms = {}
        for _ in range(rng.randint(2, 4)):
            e = tuple(rng.randint(0, max_exp) for _ in range(n))
            if sum(e) < 2:
                continue
            c = rng.randint(-coeff_range, coeff_range)
            if c:
                terms[(e, 1 << rng.randrange(n))] = Fraction(c)
        logs.append(Polyvector(n, terms))
    return FormalDiffeo(n, logs)


# --------------------------------------------------------------------------- Koszul complex and ideal


def _monomials_upto(n, lo, hi):
    out = []
    for d in range(max(lo, 0), hi + 1):
        out.extend(all_exponents(n, d))
    return out


def koszul_solve(W: Polynomial, target: Polyvector, order: int):
    """A trivector ``g3`` with ``iota_{dW} g3 = -target`` modulo F_order, or None.

    Raises when the target is not closed.  The linear system is solved exactly over
    all trivector monomials of degree ``<= order - 3``; higher ones only touch F_order.
    """
    n = W.n
    top = (1 << n) - 1
    tgt = target.truncate(order)
    if tgt.xi_degrees() not in ([], [n - 1]):
        raise AlgebraError("target must be a bivector field")
    closed = koszul_d(tgt, W, order)
    if closed:
        raise AlgebraError("target is not iota_dW-closed")
    if not tgt:
        return Polyvector(n, {}, order)
    cols = []
    keys = []
    for e in _monomials_upto(n, 0, order - 3):
        img = koszul_d(Polyvector(n, {(e, top): 1}), W, order)
        cols.append(img.terms)
        keys.append(e)
    x = solve(cols, {k: -c for k, c in tgt.terms.items()})
    if x is None:
        return None
    return Polyvector(n, {(keys[j], top): c for j, c in x.items()}, order)


def ideal_reduce(p: Polynomial, W: Polynomial, gain: int | None = None):
    """Write a homogeneous ``p`` as ``sum f_i dW/dz_i + remainder``.

    The remainder lies in ``F_{deg p + gain}`` (default gain 1) and the ``f_i`` are
    drawn from degrees ``deg p - 2`` .. ``deg p - 2 - (gain - 1)`` together with the
    lower degrees needed to reach pure powers; the solve is deterministic.
    """
    n = p.n
    degs = {sum(e) for e in p.terms}
    if not degs:
        z = Polynomial.zero(n)
        return (z,) * n + (z,)
    if len(degs) != 1:
        raise AlgebraError("p must be homogeneous")
    D = degs.pop()
    gain = gain or 1
    cutoff = D + gain
    dW = [W.partial(i + 1) for i in range(n)]
    wdegs = sorted({sum(e) for q in dW for e in q.terms})
    fdegs = sorted({D - w for w in wdegs if D - w >= 0})
    cols, keys = [], []
    for i in range(n):
        for fd in fdegs:
            for e in all_exponents(n, fd):
                prod = {}
                for e2, c in dW[i].terms.items():
                    ee = tuple(x + y for x, y in zip(e, e2))
                    if sum(ee) < cutoff:
                        prod[ee] = prod.get(ee, 0) + c
                cols.append({k: v for k, v in prod.items() if v})
                keys.append((i, e))
    x = solve(cols, dict(p.terms))
    if x is None:
        raise AlgebraError("no decomposition at the requested filtration gain")
    fs = [dict() for _ in range(n)]
    for j, c in x.items():
        i, e = keys[j]
        fs[i][e] = c
    fpolys = [Polynomial(n, f) for f in fs]
    rem = p
    for i in range(n):
        rem = rem - fpolys[i] * dW[i]
    return tuple(fpolys) + (rem,)


# --------------------------------------------------------------------------- normalization


@dataclass
class NormalizeStep:
    kind: str
    before: int
    after: int
    field: Polyvector


@dataclass
class NormalizeCertificate:
    genus: int
    order: int
    lam: Fraction
    steps: list
    final_discrepancy_order: float
    mode: str = "graded"

    def gains(self):
        return [(s.before, s.after) for s in self.steps if s.kind == "iterate"]

    def to_json(self):
        return {
            "genus": self.genus,
            "order": self.order,
            "mode": self.mode,
            "lambda": str(self.lam),
            "steps": [{"kind": s.kind, "before": s.before, "after": s.after, "field": s.field.to_json()}
                      for s in self.steps],
            "final_discrepancy_order": None if self.final_discrepancy_order == math.inf
            else self.final_discrepancy_order,
        }


class NormalizeInputError(AlgebraError):
    """The input violates the low-order hypothesis; ``terms`` holds the offending part of alpha0 - W."""

    def __init__(self, message: str, terms: Polynomial):
        super().__init__(f"{message}; offending terms: {terms.to_str()}")
        self.terms = terms


def _poly_pv(p: Polynomial, order):
    return Polyvector.from_poly(p, 0, order)


def lambda_monomial(genus: int):
    N = 2 * genus + 1
    return ((N // 3,) * 3)


def _is_graded_input(alpha0: Polynomial, genus: int) -> bool:
    pv = Polyvector.from_poly(alpha0)
    return is_invariant(pv, genus) and not grading_violations(pv, genus)


def normalize(alpha0: Polynomial, genus: int, order: int, max_iter: int = 64, mode: str = "auto"):
    """Formal diffeomorphism taking ``alpha0`` to W modulo F_order, with its certificate.

    ``graded`` mode is the invariant iteration: alpha0 must agree with W modulo
    F_{2g+2} up to the lambda term, and every step uses invariant vector fields.
    ``general`` mode accepts any alpha0 whose cubic part is that of W and solves for
    arbitrary vector fields.  ``auto`` picks graded when alpha0 is invariant and graded.
    """
    if genus < 2:
        raise AlgebraError("normalization needs genus >= 2")
    if mode == "auto":
        mode = "graded" if _is_graded_input(alpha0, genus) else "general"
    if mode not in ("graded", "general"):
        raise AlgebraError(f"unknown mode {mode!r}")
    n = 3
    W = superpotential(genus)
    N = 2 * genus + 1
    if alpha0.n != n:
        raise AlgebraError("alpha0 must live in three variables")
    cur = _poly_pv(alpha0, order)
    Wpv = _poly_pv(W, order)
    diffeo = FormalDiffeo(n, [])
    steps = []
    lam = Fraction(0)

    low = (cur - Wpv).function_part()
    bound = min(2 * genus + 2, order) if mode == "graded" else min(4, order)
    bad = {e: c for e, c in low.terms.items() if sum(e) < bound}
    if mode == "graded" and genus % 3 == 1:
        lam = bad.pop(lambda_monomial(genus), Fraction(0))
    if bad:
        raise NormalizeInputError(f"alpha0 is not congruent to W modulo F_{bound}", Polynomial(n, bad))

    if lam:
        m = N // 3
        v = Polyvector(n, {((m, m - 1, m - 1), 1): lam})
        before = (cur - Wpv).filtration_order()
        cur = pushforward_field(v, cur, order)
        diffeo = diffeo.then(v)
        steps.append(NormalizeStep("lambda", before, (cur - Wpv).filtration_order(), v))

    q = [W.partial(i + 1) for i in range(n)]
    for _ in range(max_iter):
        diff = (cur - Wpv).function_part()
        if not diff.terms:
            break
        D = min(sum(e) for e in diff.terms)
        delta = diff.homogeneous_part(D)
        v = _solve_step(delta, q, D, genus, mode == "graded")
        if v is None:
            raise AlgebraError(f"normalization step at degree {D} has no solution")
        cur = pushforward_field(v, cur, order)
        diffeo = diffeo.then(v)
        after = (cur - Wpv).function_part().filtration_order()
        if after <= D:
            raise AlgebraError(f"normalization made no progress at degree {D}")
        steps.append(NormalizeStep("iterate", D, min(after, order), v))
    else:
        raise AlgebraError("normalization did not converge")
    final = (cur - Wpv).filtration_order()
    return diffeo, NormalizeCertificate(genus, order, lam, steps, final, mode)


def _solve_step(delta: Polynomial, dW: list, D: int, genus: int, invariant: bool):
    """Minimal-norm vector field whose linear action cancels ``delta``.

    The field has components of degree ``D - 2`` and ``D - 2g``; the equations ask that
    its action on W vanish below degree D and equal ``-delta`` in degree D.
    """
    n = 3
    cols, keys = [], []
    for fd in sorted({D - 2, D - 2 * genus}):
        if fd < 2:
            continue
        for i in range(n):
            for e in all_exponents(n, fd):
                if invariant and term_weight(e, 1 << i, genus) != (0, 0):
                    continue
                col = {}
                for e2, c in dW[i].terms.items():
                    ee = tuple(x + y for x, y in zip(e, e2))
                    if sum(ee) <= D:
                        col[ee] = col.get(ee, 0) + c
                cols.append({k: v for k, v in col.items() if v})
                keys.append((e, 1 << i))
    rhs = {e: -c for e, c in delta.terms.items()}
    x = min_norm_solve(cols, rhs) if cols else None
    if x is None:
        return None
    return Polyvector(n, {keys[j]: c for j, c in x.items()})


def verify_normalization(alpha0: Polynomial, diffeo: FormalDiffeo, genus: int, order: int) -> bool:
    """Independent check by substitution into the coordinate images of the composite."""
    ys = diffeo.coordinate_images(order)
    pushed = alpha0.substitute(ys, order - 1)
    W = superpotential(genus)
    diff = pushed - W
    return all(sum(e) >= order for e in diff.terms)
