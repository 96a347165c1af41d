"""Hochschild cochains of A = Lambda(V): differential, Gerstenhaber bracket, MC <-> A-infinity.

Cochains are lazy: a cochain is an evaluator on basis tuples ``(a_j, ..., a_1)``
of exterior masks, with a parity ``|phi| = arity + Hom-degree - 1 (mod 2)``.
Values are cached per tuple.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

from .exact_algebra import AlgebraError, ExtElement, popcount, to_fraction, wedge_sign

DEFAULT_CAP = 8


def _add_into(acc: dict, terms: dict, c=1):
    for m, v in terms.items():
        w = acc.get(m, 0) + c * v
        if w:
            acc[m] = w
        else:
            acc.pop(m, None)


def _wedge_masks(a: int, b: int):
    s = wedge_sign(a, b)
    return (s, a | b) if s else (0, 0)


class Cochain:
    """A multilinear map on Lambda(V) given on basis tuples.

    ``func(tup)`` returns a dict ``{mask: coeff}``; ``arities`` lists the arities
    where the cochain may be nonzero.  ``parity`` is the shifted degree mod 2.
    """

    def __init__(self, n: int, func, parity: int, arities, cap: int = DEFAULT_CAP, label: str = ""):
        self.n = n
        self._func = func
        self.parity = parity % 2
        self.arities = frozenset(a for a in arities if 1 <= a <= cap)
        self.cap = cap
        self.label = label
        self._cache: dict = {}

    def __call__(self, tup) -> dict:
        tup = tuple(tup)
        if len(tup) not in self.arities:
            return {}
        r = self._cache.get(tup)
        if r is None:
            r = {m: c for m, c in self._func(tup).items() if c}
            self._cache[tup] = r
        return r

    def value(self, tup) -> ExtElement:
        return ExtElement(self.n, self(tup))

    def on(self, args) -> ExtElement:
        """Evaluate on general ExtElement arguments by multilinearity."""
        out: dict = {}
        for combo in itertools.product(*(sorted(a.terms.items()) for a in args)):
            coef = Fraction(1)
            for _, c in combo:
                coef *= c
            _add_into(out, self(tuple(m for m, _ in combo)), coef)
        return ExtElement(self.n, out)

    # linear structure
    def __add__(self, other):
        if other.parity != self.parity:
            raise AlgebraError("cannot add cochains of different parity")
        a, b = self, other
        return Cochain(self.n, lambda t: _sum_dicts(a(t), b(t)), self.parity,
                       self.arities | other.arities, max(self.cap, other.cap))

    def scale(self, c):
        c = to_fraction(c)
        a = self
        return Cochain(self.n, lambda t: {m: c * v for m, v in a(t).items()}, self.parity,
                       self.arities if c else (), self.cap)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def restrict(self, arities):
        a = self
        keep = frozenset(arities)
        return Cochain(self.n, lambda t: a(t), self.parity, self.arities & keep, self.cap)

    def with_cap(self, cap):
        a = self
        return Cochain(self.n, lambda t: a(t), self.parity, self.arities, cap)

    def is_zero_on(self, tuples) -> bool:
        return all(not self(t) for t in tuples)

    def to_json(self, tuples):
        """Entries on the given basis tuples, as [arity, [masks], terms]."""
        rows = []
        for t in tuples:
            v = self(t)
            if v:
                rows.append([len(t), list(t), [[m, str(c)] for m, c in sorted(v.items())]])
        return {"n": self.n, "parity": self.parity, "entries": rows}


def _sum_dicts(x, y):
    out = dict(x)
    _add_into(out, y)
    return out


def sparse_cochain(n: int, entries: dict, cap: int = DEFAULT_CAP, parity: int | None = None) -> Cochain:
    """Cochain from ``{tuple: {mask: coeff}}``; parity is inferred and must be uniform."""
    clean = {}
    pars = set()
    for tup, val in entries.items():
        tup = tuple(tup)
        vals = {m: to_fraction(c) for m, c in (val.terms if isinstance(val, ExtElement) else val).items() if c}
        if not vals:
            continue
        clean[tup] = vals
        for m in vals:
            pars.add(entry_parity(tup, m))
    if len(pars) > 1:
        raise AlgebraError("cochain entries have mixed parity")
    if parity is None:
        parity = pars.pop() if pars else 0
    elif pars and pars != {parity % 2}:
        raise AlgebraError("declared parity does not match the entries")
    arities = {len(t) for t in clean}
    return Cochain(n, lambda t: clean.get(t, {}), parity, arities, cap)


def cochain_from_json(obj, cap: int = DEFAULT_CAP) -> Cochain:
    entries = {}
    for arity, masks, terms in obj["entries"]:
        if len(masks) != arity:
            raise AlgebraError("arity does not match the input tuple")
        entries[tuple(masks)] = {int(m): Fraction(c) for m, c in terms}
    return sparse_cochain(obj["n"], entries, cap, obj.get("parity"))


def entry_parity(tup, out_mask) -> int:
    """Shifted degree mod 2 of the entry ``tup -> out_mask``."""
    j = popcount(out_mask) - sum(popcount(a) for a in tup)
    return (len(tup) + j - 1) % 2


def zero_cochain(n, parity=0, cap=DEFAULT_CAP):
    return Cochain(n, lambda t: {}, parity, (), cap)


def identity_cochain(n, cap=DEFAULT_CAP):
    return Cochain(n, lambda t: {t[0]: 1}, 0, (1,), cap)


def wedge_cochain(n, cap=DEFAULT_CAP) -> Cochain:
    """The product ``mu^2(a2, a1) = (-1)^|a1| a2 a1`` as an odd arity-2 cochain."""

    def f(t):
        a2, a1 = t
        s, m = _wedge_masks(a2, a1)
        if not s:
            return {}
        if popcount(a1) & 1:
            s = -s
        return {m: s}

    return Cochain(n, f, 1, (2,), cap, "mu2")


def unsigned_wedge_cochain(n, cap=DEFAULT_CAP) -> Cochain:
    def f(t):
        s, m = _wedge_masks(t[0], t[1])
        return {m: s} if s else {}

    return Cochain(n, f, 1, (2,), cap, "wedge")


# --------------------------------------------------------------------------- insertion, bracket, differential


def _insert(outer: Cochain, inner: Cochain, tup) -> dict:
    """``sum_{k,l} (-1)^{|inner| (|a_1|+...+|a_k| - k)} outer(..., inner(a_{k+l},...,a_{k+1}), a_k, ..., a_1)``."""
    j = len(tup)
    a = tup[::-1]  # a[0] = a_1
    out: dict = {}
    prefix = [0] * (j + 1)
    for i in range(j):
        prefix[i + 1] = prefix[i] + popcount(a[i])
    for l in inner.arities:
        if l > j or (j - l + 1) not in outer.arities:
            continue
        for k in range(0, j - l + 1):
            val = inner(tuple(reversed(a[k:k + l])))
            if not val:
                continue
            sgn = -1 if inner.parity and (prefix[k] - k) & 1 else 1
            left = tuple(reversed(a[k + l:]))
            right = tuple(reversed(a[:k]))
            for m, c in val.items():
                _add_into(out, outer(left + (m,) + right), sgn * c)
    return out


def insertion(outer: Cochain, inner: Cochain) -> Cochain:
    """The pre-Lie composition ``outer o inner`` (first sum of the bracket)."""
    ar = {i + l - 1 for i in outer.arities for l in inner.arities}
    cap = max(outer.cap, inner.cap)
    return Cochain(outer.n, lambda t: _insert(outer, inner, t), outer.parity + inner.parity, ar, cap)


def gerstenhaber(phi: Cochain, psi: Cochain) -> Cochain:
    """``[phi, psi] = phi o psi - (-1)^{|phi||psi|} psi o phi``."""
    eps = -1 if (phi.parity * psi.parity) & 1 else 1
    ar = {i + l - 1 for i in phi.arities for l in psi.arities}
    cap = max(phi.cap, psi.cap)

    def f(t):
        out = _insert(phi, psi, t)
        _add_into(out, _insert(psi, phi, t), -eps)
        return out

    return Cochain(phi.n, f, phi.parity + psi.parity, ar, cap)


def hoch_diff(phi: Cochain) -> Cochain:
    """The Hochschild differential on the shifted complex."""
    n = phi.n
    p = phi.parity
    ar = {i + 1 for i in phi.arities}

    def f(tup):
        j = len(tup)
        a = tup[::-1]
        out: dict = {}
        sa = 0
        for k in range(1, j):
            sa += popcount(a[k - 1])
            s, m = _wedge_masks(a[k], a[k - 1])
            if not s:
                continue
            sgn = -1 if (p + sa + k) & 1 else 1
            args = tuple(reversed(a[k + 1:])) + (m,) + tuple(reversed(a[:k - 1]))
            _add_into(out, phi(args), sgn * s)
        # a_j phi(a_{j-1}, ..., a_1)
        s_all = sum(popcount(x) for x in a[:j - 1])
        sgn = -1 if (p + s_all + j) & 1 else 1
        for m, c in phi(tuple(reversed(a[:j - 1]))).items():
            s, r = _wedge_masks(a[j - 1], m)
            if s:
                _add_into(out, {r: s * c}, sgn)
        # phi(a_j, ..., a_2) a_1
        sgn = -1 if ((p - 1) * (popcount(a[0]) - 1) + 1) & 1 else 1
        for m, c in phi(tuple(reversed(a[1:]))).items():
            s, r = _wedge_masks(m, a[0])
            if s:
                _add_into(out, {r: s * c}, sgn)
        return out

    return Cochain(n, f, p + 1, ar, phi.cap)


# --------------------------------------------------------------------------- A-infinity structures


class AInfStructure:
    """Operations ``mu^d`` on Lambda(V) given by an evaluator on basis tuples."""

    def __init__(self, n: int, mu, max_arity: int = DEFAULT_CAP, source: str = "static"):
        self.n = n
        self._mu = mu
        self.max_arity = max_arity
        self.source = source
        self._cache: dict = {}

    def __call__(self, tup) -> dict:
        tup = tuple(tup)
        if not 1 <= len(tup) <= self.max_arity:
            return {}
        r = self._cache.get(tup)
        if r is None:
            v = self._mu(tup)
            r = dict(v.terms) if isinstance(v, ExtElement) else {m: c for m, c in v.items() if c}
            self._cache[tup] = r
        return r

    def value(self, tup) -> ExtElement:
        return ExtElement(self.n, self(tup))

    def as_cochain(self) -> Cochain:
        """The full structure as an odd cochain (every mu^d has shifted degree 1)."""
        return Cochain(self.n, self, 1, range(1, self.max_arity + 1), self.max_arity)

    @classmethod
    def from_engine(cls, engine, max_arity=DEFAULT_CAP):
        return cls(engine.n, engine.mu, max_arity, "transferred")


def ainf_from_mc(alpha: Cochain) -> AInfStructure:
    """mu^1 = 0, mu^2 the signed wedge, mu^j = alpha^j for j >= 3."""
    if alpha.parity != 1:
        raise AlgebraError("an MC element has odd shifted degree")
    if any(a < 3 for a in alpha.arities):
        raise AlgebraError("alpha must be concentrated in arities >= 3")
    n = alpha.n
    mu2 = wedge_cochain(n)

    def mu(t):
        if len(t) == 2:
            return mu2(t)
        if len(t) >= 3:
            return alpha(t)
        return {}

    return AInfStructure(n, mu, alpha.cap, "from-mc")


def mc_from_ainf(mu: AInfStructure) -> Cochain:
    return Cochain(mu.n, mu, 1, range(3, mu.max_arity + 1), mu.max_arity, "alpha")


def check_strict_part(mu: AInfStructure) -> bool:
    """``mu^1 = 0`` and ``mu^2`` equals the signed wedge on all basis pairs."""
    n = mu.n
    w = wedge_cochain(n)
    masks = range(1 << n)
    if any(mu((a,)) for a in masks):
        return False
    return all(mu((a2, a1)) == w((a2, a1)) for a2 in masks for a1 in masks)


def ainf_residual(mu: AInfStructure, args, mode: str = "native") -> ExtElement:
    """Arity-d component of the A-infinity relations on a basis tuple.

    ``native`` evaluates ``sum (-1)^{sum_{i<=k}(|a_i|+1)} mu(..., mu(...), a_k, ..., a_1)``,
    which is ``1/2 [mu, mu]`` for the full structure.  ``standard`` applies the
    sign twist and checks the classical Stasheff identities.
    """
    tup = tuple(args)
    if len(tup) > mu.max_arity:
        raise AlgebraError("arity exceeds the structure's cap")
    if mode == "native":
        c = mu.as_cochain()
        return ExtElement(mu.n, _insert(c, c, tup))
    if mode == "standard":
        return stasheff_residual(sign_convert(mu), tup)
    raise AlgebraError(f"unknown mode {mode!r}")


def mc_residual_cochain(alpha: Cochain) -> Cochain:
    """``d alpha + 1/2 [alpha, alpha]`` in the Hochschild DGLA."""
    return hoch_diff(alpha) + gerstenhaber(alpha, alpha).scale(Fraction(1, 2))


def twist_exponent(tup) -> int:
    """``|a_1| + 2|a_2| + ... + d|a_d|`` for ``tup = (a_d, ..., a_1)``."""
    d = len(tup)
    return sum((d - i) * popcount(a) for i, a in enumerate(tup))


def sign_convert(mu: AInfStructure) -> AInfStructure:
    """``m_d(a_d, ..., a_1) = (-1)^{|a_1| + 2|a_2| + ... + d|a_d|} mu^d(a_d, ..., a_1)``."""

    def m(t):
        v = mu(t)
        if twist_exponent(t) & 1:
            return {k: -c for k, c in v.items()}
        return v

    return AInfStructure(mu.n, m, mu.max_arity, "standard")


def stasheff_residual(m: AInfStructure, tup) -> ExtElement:
    """``sum_{r+s+t=d} (-1)^{r+st} m_{r+1+t}(1^r (x) m_s (x) 1^t)`` on ``tup``.

    Arguments are read left to right as ``x_1 (x) ... (x) x_d = a_d (x) ... (x) a_1``,
    and ``1^r (x) m_s (x) 1^t`` carries the Koszul sign ``(-1)^{s(|x_1|+...+|x_r|)}``.
    """
    x = tuple(tup)
    d = len(x)
    out: dict = {}
    for s in range(1, d + 1):
        for r in range(0, d - s + 1):
            t = d - r - s
            val = m(x[r:r + s])
            if not val:
                continue
            e = r + s * t + s * sum(popcount(v) for v in x[:r])
            for mask, c in val.items():
                _add_into(out, m(x[:r] + (mask,) + x[r + s:]), -c if e & 1 else c)
    return ExtElement(m.n, out)


# --------------------------------------------------------------------------- gauge action


def _trees(arities, width, max_components):
    """Planar concatenations of components with total input count ``width``.

    A concatenation is ``("id",)`` or ``(i, child_1, ..., child_i)`` with ``i`` in
    ``arities``; children are listed from ``a``-high to ``a``-low.
    """
    memo: dict = {}

    def forests(k, w, budget):
        # sequences of k trees of total width w using at most budget components
        key = (k, w, budget)
        if key in memo:
            return memo[key]
        res = []
        if k == 0:
            res = [((), 0)] if w == 0 else []
        else:
            for w1 in range(1, w - k + 2):
                for t1, c1 in trees(w1, budget):
                    for rest, c2 in forests(k - 1, w - w1, budget - c1):
                        res.append(((t1,) + rest, c1 + c2))
        memo[key] = res
        return res

    tmemo: dict = {}

    def trees(w, budget):
        key = (w, budget)
        if key in tmemo:
            return tmemo[key]
        res = []
        if w == 1:
            res.append((("id",), 0))
        if budget >= 1:
            for i in sorted(arities):
                for kids, c in forests(i, w, budget - 1):
                    if i == 1 and kids[0][0] == "id":
                        continue
                    res.append(((i,) + kids, c + 1))
        tmemo[key] = res
        return res

    return [t for t, _ in trees(width, max_components) if t != ("id",)]


def _components(tree):
    if tree[0] == "id":
        return 0
    return 1 + sum(_components(c) for c in tree[1:])


def linear_extensions(tree) -> int:
    """Orderings of the components compatible with nesting (children before parents)."""
    def rec(t):
        if t[0] == "id":
            return 0, 1
        sizes = []
        ways = 1
        for c in t[1:]:
            s, w = rec(c)
            sizes.append(s)
            ways *= w
        total = sum(sizes)
        mult = math.factorial(total)
        for s in sizes:
            mult //= math.factorial(s)
        return total + 1, ways * mult

    return rec(tree)[1]


def concatenation_coefficient(tree) -> Fraction:
    r = _components(tree)
    return Fraction(linear_extensions(tree), math.factorial(r))


def _eval_tree(tree, gamma: Cochain, tup):
    """Evaluate a concatenation on a basis tuple; returns (dict, consumed)."""
    if tree[0] == "id":
        return {tup[0]: Fraction(1)}, 1
    pos = 0
    child_vals = []
    for c in tree[1:]:
        w = _tree_width(c)
        v, _ = _eval_tree(c, gamma, tup[pos:pos + w])
        child_vals.append(v)
        pos += w
    out: dict = {}
    for combo in itertools.product(*(sorted(v.items()) for v in child_vals)):
        coef = Fraction(1)
        for _, c in combo:
            coef *= c
        _add_into(out, gamma(tuple(m for m, _ in combo)), coef)
    return out, pos


def _tree_width(tree):
    if tree[0] == "id":
        return 1
    return sum(_tree_width(c) for c in tree[1:])


def gauge_phi(gamma: Cochain, cap: int = DEFAULT_CAP) -> AInfStructure:
    """The morphism ``phi`` with ``phi^1 = id`` attached to a degree-0 cochain ``gamma``.

    ``phi^j`` sums every concatenation of components of ``gamma`` with coefficient
    (compatible orderings) / r!.  Degree-0 insertions carry no signs.
    """
    if gamma.parity != 0:
        raise AlgebraError("gamma must have shifted degree 0")
    if any(a < 2 for a in gamma.arities):
        raise AlgebraError("gamma must be concentrated in arities >= 2")
    n = gamma.n
    tree_cache: dict = {}

    def phi(tup):
        j = len(tup)
        if j == 1:
            return {tup[0]: Fraction(1)}
        if j not in tree_cache:
            tree_cache[j] = [(t, concatenation_coefficient(t)) for t in _trees(gamma.arities, j, j - 1)]
        out: dict = {}
        for t, coef in tree_cache[j]:
            v, _ = _eval_tree(t, gamma, tup)
            _add_into(out, v, coef)
        return out

    return AInfStructure(n, phi, cap, "gauge")


def ad_exp(gamma: Cochain, x: Cochain, depth: int) -> Cochain:
    """``sum_{k<=depth} ad_gamma^k (x) / k!``."""
    total = x
    cur = x
    for k in range(1, depth + 1):
        cur = gerstenhaber(gamma, cur).scale(Fraction(1, k))
        total = total + cur
    return total


def morphism_residual(phi: AInfStructure, source: AInfStructure, target: AInfStructure, tup) -> ExtElement:
    """``sum target^r(phi, ..., phi) - sum (-1)^{sum_{i<=k}(|a_i|+1)} phi(..., source(...), ...)``."""
    tup = tuple(tup)
    d = len(tup)
    n = phi.n
    lhs: dict = {}
    for r in range(1, d + 1):
        for cuts in itertools.combinations(range(1, d), r - 1):
            bounds = (0,) + cuts + (d,)
            pieces = [phi(tup[bounds[i]:bounds[i + 1]]) for i in range(r)]
            if any(not p for p in pieces):
                continue
            for combo in itertools.product(*(sorted(p.items()) for p in pieces)):
                coef = Fraction(1)
                for _, c in combo:
                    coef *= c
                _add_into(lhs, target(tuple(m for m, _ in combo)), coef)
    c_src = source.as_cochain()
    c_phi = Cochain(n, phi, 0, range(1, phi.max_arity + 1), phi.max_arity)
    _add_into(lhs, _insert(c_phi, c_src, tup), -1)
    return ExtElement(n, lhs)
