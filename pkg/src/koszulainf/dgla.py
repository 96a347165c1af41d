"""Finite-dimensional nilpotent DG Lie algebras over Q.

Vectors are sparse dicts ``{basis index: Fraction}``.  Besides Maurer-Cartan
residuals, gauge flows and BCH products, the module implements L-infinity
morphism checks and the lifting obstructions across a central DG ideal.
"""
from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .exact_algebra import AlgebraError, to_fraction
from .linalg import SpanSolver, _axpy


class DGLAError(AlgebraError):
    pass


def vadd(*vs) -> dict:
    out: dict = {}
    for v in vs:
        _axpy(out, 1, v)
    return out


def vscale(c, v: dict) -> dict:
    c = to_fraction(c)
    if not c:
        return {}
    return {k: c * x for k, x in v.items()}


def vsub(u, v):
    out = dict(u)
    _axpy(out, -1, v)
    return out


# --------------------------------------------------------------------------- signs


def koszul_sign(perm, degrees) -> int:
    """``eps`` with ``x_1 ... x_n = eps * x_perm(1) ... x_perm(n)`` (0-based ``perm``)."""
    if sorted(perm) != list(range(len(degrees))):
        raise DGLAError("not a permutation of the right length")
    s = 1
    p = list(perm)
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j] and degrees[p[i]] % 2 and degrees[p[j]] % 2:
                s = -s
    return s


def perm_sign(perm) -> int:
    s = 1
    p = list(perm)
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                s = -s
    return s


def chi_sign(perm, degrees) -> int:
    return perm_sign(perm) * koszul_sign(perm, degrees)


# --------------------------------------------------------------------------- presentation


@dataclass
class DGLAPresentation:
    """Basis-indexed DGLA: ``d(e_i) = sum diff[i][j] e_j`` and ``[e_i, e_j] = sum bracket[(i, j)][k] e_k``."""

    names: list
    degrees: list
    diff: dict
    bracket: dict
    levels: list = field(default_factory=list)
    validate: bool = True

    def __post_init__(self):
        n = len(self.names)
        if len(self.degrees) != n:
            raise DGLAError("one degree per basis element is required")
        if not self.levels:
            self.levels = [1] * n
        self.diff = {i: {j: to_fraction(c) for j, c in row.items() if to_fraction(c)}
                     for i, row in self.diff.items()}
        self.diff = {i: r for i, r in self.diff.items() if r}
        br = {}
        for (i, j), row in self.bracket.items():
            row = {k: to_fraction(c) for k, c in row.items() if to_fraction(c)}
            if row:
                br[(i, j)] = row
        # complete by graded antisymmetry
        for (i, j), row in list(br.items()):
            if (j, i) not in br and i != j:
                s = -1 if (self.degrees[i] * self.degrees[j]) % 2 == 0 else 1
                br[(j, i)] = {k: s * c for k, c in row.items()}
        self.bracket = br
        if self.validate:
            self.check()

    @property
    def dim(self):
        return len(self.names)

    def basis(self, i) -> dict:
        return {i: Fraction(1)}

    def degree_of(self, v: dict):
        ds = {self.degrees[i] for i in v}
        if len(ds) > 1:
            raise DGLAError("inhomogeneous vector")
        return ds.pop() if ds else None

    def indices_of_degree(self, k):
        return [i for i, d in enumerate(self.degrees) if d == k]

    def d(self, v: dict) -> dict:
        out: dict = {}
        for i, c in v.items():
            row = self.diff.get(i)
            if row:
                _axpy(out, c, row)
        return out

    def br(self, u: dict, v: dict) -> dict:
        out: dict = {}
        for i, a in u.items():
            for j, b in v.items():
                row = self.bracket.get((i, j))
                if row:
                    _axpy(out, a * b, row)
        return out

    # validation
    def check(self):
        n = self.dim
        deg = self.degrees
        for i, row in self.diff.items():
            for j in row:
                if deg[j] != deg[i] + 1:
                    raise DGLAError(f"differential of {self.names[i]} has the wrong degree")
                if self.levels[j] < self.levels[i]:
                    raise DGLAError("differential does not preserve the filtration")
        for i in range(n):
            if self.d(self.d({i: 1})):
                raise DGLAError("d^2 != 0")
        for (i, j), row in self.bracket.items():
            for k in row:
                if deg[k] != deg[i] + deg[j]:
                    raise DGLAError("bracket has the wrong degree")
                if self.levels[k] < self.levels[i] + self.levels[j]:
                    raise DGLAError("bracket does not respect the filtration")
        for i in range(n):
            for j in range(n):
                x, y = {i: 1}, {j: 1}
                s = -1 if (deg[i] * deg[j]) % 2 == 0 else 1
                if vsub(self.br(x, y), vscale(s, self.br(y, x))):
                    raise DGLAError("bracket is not graded antisymmetric")
                lhs = self.d(self.br(x, y))
                rhs = vadd(self.br(self.d(x), y), vscale((-1) ** deg[i], self.br(x, self.d(y))))
                if vsub(lhs, rhs):
                    raise DGLAError("d is not a derivation of the bracket")
        for i, j, k in itertools.product(range(n), repeat=3):
            if jacobi_defect(self, i, j, k):
                raise DGLAError("graded Jacobi identity fails")

    def nilpotency_class(self, limit: int = 64) -> int:
        """Smallest c such that every c-fold bracket vanishes."""
        n = self.dim
        span = [{i: Fraction(1)} for i in range(n)]
        c = 1
        while span:
            nxt = []
            solver = SpanSolver()
            for v in span:
                for j in range(n):
                    w = self.br(v, {j: 1})
                    if w and solver.add(len(nxt), w):
                        nxt.append(w)
            c += 1
            span = nxt
            if c > limit:
                raise DGLAError("presentation is not nilpotent")
        return c - 1

    def to_json(self):
        return {
            "basis": [{"name": nm, "degree": dg, "level": lv}
                      for nm, dg, lv in zip(self.names, self.degrees, self.levels)],
            "differential": [[self.names[i], self.names[j], str(c)]
                             for i in sorted(self.diff) for j, c in sorted(self.diff[i].items())],
            "bracket": [[self.names[i], self.names[j], self.names[k], str(c)]
                        for (i, j) in sorted(self.bracket) if i <= j
                        for k, c in sorted(self.bracket[(i, j)].items())],
        }

    @classmethod
    def from_json(cls, obj):
        try:
            basis = obj["basis"]
            names = [b["name"] for b in basis]
            if len(set(names)) != len(names):
                raise DGLAError("basis names must be unique")
            idx = {nm: i for i, nm in enumerate(names)}
            degrees = [int(b["degree"]) for b in basis]
            levels = [int(b.get("level", 1)) for b in basis]
            diff: dict = {}
            for pos, (a, b, c) in enumerate(obj.get("differential", [])):
                if a not in idx or b not in idx:
                    raise DGLAError(f"differential entry {pos}: unknown basis name")
                diff.setdefault(idx[a], {})[idx[b]] = Fraction(c)
            br: dict = {}
            for pos, (a, b, k, c) in enumerate(obj.get("bracket", [])):
                if a not in idx or b not in idx or k not in idx:
                    raise DGLAError(f"bracket entry {pos}: unknown basis name")
                br.setdefault((idx[a], idx[b]), {})[idx[k]] = Fraction(c)
        except (KeyError, TypeError, ValueError) as exc:
            raise DGLAError(f"malformed presentation: {exc}") from exc
        return cls(names, degrees, diff, br, levels)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def jacobi_defect(g: DGLAPresentation, i, j, k) -> dict:
    """``[x,[y,z]] - [[x,y],z] - (-1)^{|x||y|}[y,[x,z]]`` on basis elements."""
    x, y, z = {i: 1}, {j: 1}, {k: 1}
    s = -1 if (g.degrees[i] * g.degrees[j]) % 2 else 1
    return vsub(vsub(g.br(x, g.br(y, z)), g.br(g.br(x, y), z)), vscale(s, g.br(y, g.br(x, z))))


# --------------------------------------------------------------------------- MC theory


def mc_residual(g: DGLAPresentation, alpha: dict) -> dict:
    if alpha and g.degree_of(alpha) != 1:
        raise DGLAError("MC elements have degree 1")
    return vadd(g.d(alpha), vscale(Fraction(1, 2), g.br(alpha, alpha)))


def mc_residual_direct(g: DGLAPresentation, alpha: dict) -> dict:
    """The same residual expanded over structure constants term by term."""
    out: dict = {}
    for i, a in alpha.items():
        for j, c in g.diff.get(i, {}).items():
            out[j] = out.get(j, 0) + a * c
        for k, b in alpha.items():
            for m, c in g.bracket.get((i, k), {}).items():
                out[m] = out.get(m, 0) + Fraction(1, 2) * a * b * c
    return {k: v for k, v in out.items() if v}


@dataclass
class VectorOps:
    """DGLA operations used by the generic gauge and BCH routines."""

    d: object
    br: object
    add: object = vadd
    scale: object = vscale
    is_zero: object = lambda v: not v


def ops_of(g: DGLAPresentation) -> VectorOps:
    return VectorOps(g.d, g.br)


def gauge_action(ops: VectorOps, gamma, alpha, max_terms: int):
    """``exp(gamma)`` applied to ``alpha`` along ``alpha -> -d gamma + [gamma, alpha]``.

    Closed form: ``sum_k ad^k(alpha)/k! - sum_{k>=1} ad^{k-1}(d gamma)/k!``.
    """
    total = alpha
    cur = alpha
    dg = ops.d(gamma)
    curd = dg
    total = ops.add(total, ops.scale(-1, dg))
    for k in range(1, max_terms + 1):
        cur = ops.scale(Fraction(1, k), ops.br(gamma, cur))
        curd = ops.scale(Fraction(1, k + 1), ops.br(gamma, curd))
        total = ops.add(total, cur, ops.scale(-1, curd))
    return total


def gauge_flow(g: DGLAPresentation, gamma: dict, alpha: dict) -> dict:
    if gamma and g.degree_of(gamma) != 0:
        raise DGLAError("gauge parameters have degree 0")
    c = g.nilpotency_class()
    return gauge_action(ops_of(g), gamma, alpha, c + 1)


def gauge_series(g: DGLAPresentation, gamma: dict, alpha: dict, steps: int | None = None) -> dict:
    """Term-by-term summation of the flow's Taylor series at t = 1 (an oracle for gauge_flow)."""
    steps = steps or g.nilpotency_class() + 2
    # derivatives: a_0 = alpha, a_{m+1} = [gamma, a_m] + (m == 0) * (-d gamma)
    terms = [alpha]
    cur = vadd(vscale(-1, g.d(gamma)), g.br(gamma, alpha))
    terms.append(cur)
    for _ in range(steps):
        cur = g.br(gamma, cur)
        terms.append(cur)
    out: dict = {}
    for m, t in enumerate(terms):
        _axpy(out, Fraction(1, math.factorial(m)), t)
    return out


def bch(g: DGLAPresentation, x: dict, y: dict, order: int | None = None) -> dict:
    """``log(exp x exp y)`` by Dynkin's formula, exact up to the nilpotency class."""
    c = order or g.nilpotency_class()
    return bch_generic(ops_of(g), x, y, c)


def bch_generic(ops: VectorOps, x, y, order: int):
    total = None
    for n in range(1, order + 1):
        coef_n = Fraction((-1) ** (n - 1), n)
        for pq in _dynkin_words(n, order):
            m = sum(p + q for p, q in pq)
            denom = m
            for p, q in pq:
                denom *= math.factorial(p) * math.factorial(q)
            word = []
            for p, q in pq:
                word += [x] * p + [y] * q
            term = word[-1]
            for el in reversed(word[:-1]):
                term = ops.br(el, term)
            if len(word) > 1 and _last_power(pq) > 1:
                continue
            t = ops.scale(coef_n / denom, term)
            total = t if total is None else ops.add(total, t)
    return total


def _last_power(pq):
    p, q = pq[-1]
    return q if q else p


def _dynkin_words(n, order):
    pairs = [(p, q) for p in range(order + 1) for q in range(order + 1) if 0 < p + q <= order]
    for pq in itertools.product(pairs, repeat=n):
        if sum(p + q for p, q in pq) <= order:
            yield pq


# --------------------------------------------------------------------------- L-infinity morphisms


@dataclass
class LInfMorphismData:
    """Components ``Phi^k`` given on sorted basis tuples, extended by chi-antisymmetry."""

    source: DGLAPresentation
    target: DGLAPresentation
    components: dict  # k -> {tuple of source indices (sorted): target vector}

    def arity_cap(self):
        return max(self.components) if self.components else 0

    def eval_basis(self, k: int, idx) -> dict:
        comp = self.components.get(k)
        if not comp:
            return {}
        perm = sorted(range(k), key=lambda p: idx[p])
        key = tuple(idx[p] for p in perm)
        degs = [self.source.degrees[i] for i in idx]
        val = comp.get(key)
        if not val:
            return {}
        # Phi(x_1..x_k) = chi(perm) Phi(x_perm(1)..x_perm(k))
        return vscale(chi_sign(perm, degs), val)

    def __call__(self, k: int, vectors) -> dict:
        out: dict = {}
        for combo in itertools.product(*(sorted(v.items()) for v in vectors)):
            coef = Fraction(1)
            for _, c in combo:
                coef *= c
            _axpy(out, coef, self.eval_basis(k, tuple(i for i, _ in combo)))
        return out

    def antisymmetry_check(self) -> bool:
        for k, comp in self.components.items():
            for key in comp:
                if len(set(key)) < len(key):
                    degs = [self.source.degrees[i] for i in key]
                    for a in range(len(key) - 1):
                        if key[a] == key[a + 1] and degs[a] % 2 == 0 and comp[key]:
                            return False
        return True


def _homog_degree(g, v):
    return g.degree_of(v) if v else 0


def linf_relation_residual(phi: LInfMorphismData, n: int, xs) -> dict:
    """Left-hand side of the L-infinity morphism relation of arity ``n`` on homogeneous ``xs``.

    Terms: ``d Phi^n``, ``Phi^n`` after ``d`` on one input, ``Phi^{n-1}`` after one
    bracket (weight ``1/(2 (n-2)!)``), and the quadratic terms ``[Phi^s, Phi^t]``
    with weight ``-1/(2 s! t!)``.  All permutations carry Koszul signs.
    """
    if n != len(xs):
        raise DGLAError("number of inputs must equal the arity")
    if n > phi.arity_cap() + 1:
        raise DGLAError("arity exceeds the available components")
    g, h = phi.source, phi.target
    degs = [_homog_degree(g, x) for x in xs]
    out = h.d(phi(n, xs))
    perms = list(itertools.permutations(range(n)))
    c2 = Fraction((-1) ** n, math.factorial(n - 1))
    for sg in perms:
        chi = chi_sign(sg, degs)
        args = [xs[p] for p in sg]
        _axpy(out, c2 * chi, phi(n, [g.d(args[0])] + args[1:]))
    if n >= 2:
        c3 = Fraction(1, 2 * math.factorial(n - 2))
        for sg in perms:
            chi = chi_sign(sg, degs)
            args = [xs[p] for p in sg]
            _axpy(out, c3 * chi, phi(n - 1, [g.br(args[0], args[1])] + args[2:]))
    for s in range(1, n):
        t = n - s
        c4 = Fraction(-1, 2 * math.factorial(s) * math.factorial(t))
        for tau in perms:
            chi = chi_sign(tau, degs)
            e = (s - 1) + (t - 1) * sum(degs[tau[p]] for p in range(s))
            sign = -1 if e % 2 else 1
            left = phi(s, [xs[p] for p in tau[:s]])
            if not left:
                continue
            right = phi(t, [xs[p] for p in tau[s:]])
            _axpy(out, c4 * chi * sign, h.br(left, right))
    return out


def pushforward(phi: LInfMorphismData, alpha: dict) -> dict:
    """``sum_k (-1)^{k(k-1)/2} Phi^k(alpha, ..., alpha) / k!`` over the stored components."""
    if not alpha:
        return {}
    out: dict = {}
    for k in range(1, phi.arity_cap() + 1):
        sgn = -1 if (k * (k - 1) // 2) % 2 else 1
        _axpy(out, Fraction(sgn, math.factorial(k)), phi(k, [alpha] * k))
    return out


def strict_morphism(g, h, matrix: dict) -> LInfMorphismData:
    return LInfMorphismData(g, h, {1: {(i,): dict(v) for i, v in matrix.items()}})


def solve_linf_extension(phi: LInfMorphismData, upto: int) -> LInfMorphismData | None:
    """Extend given components to arity ``upto`` by solving each relation linearly.

    Returns None when some arity's relation has no solution.  Unknowns are the
    values of ``Phi^k`` on sorted basis tuples of degree-compatible inputs; the
    deterministic solution sets free variables to zero.
    """
    g, h = phi.source, phi.target
    comps = {k: dict(v) for k, v in phi.components.items()}
    for k in range(2, upto + 1):
        if k in comps:
            continue
        keys = []
        for key in itertools.combinations_with_replacement(range(g.dim), k):
            degs = [g.degrees[i] for i in key]
            if any(key[a] == key[a + 1] and degs[a] % 2 == 0 for a in range(k - 1)):
                continue
            out_deg = sum(degs) + 1 - k
            for j in h.indices_of_degree(out_deg):
                keys.append((key, j))
        base = LInfMorphismData(g, h, dict(comps))
        tuples = [key for key in itertools.combinations_with_replacement(range(g.dim), k)]
        eqs_const = []
        for key in tuples:
            xs = [{i: Fraction(1)} for i in key]
            eqs_const.append((key, linf_relation_residual(base, k, xs)))
        columns = []
        for key, j in keys:
            trial = dict(comps)
            trial[k] = {key: {j: Fraction(1)}}
            m = LInfMorphismData(g, h, trial)
            col = {}
            for tkey, const in eqs_const:
                xs = [{i: Fraction(1)} for i in tkey]
                diffv = vsub(linf_relation_residual(m, k, xs), const)
                for o, c in diffv.items():
                    col[(tkey, o)] = c
            columns.append(col)
        rhs = {}
        for tkey, const in eqs_const:
            for o, c in const.items():
                rhs[(tkey, o)] = -c
        solver = SpanSolver()
        for idx, col in enumerate(columns):
            solver.add(idx, col)
        x = solver.express(rhs)
        if x is None:
            return None
        comp = {}
        for idx, c in x.items():
            key, j = keys[idx]
            comp.setdefault(key, {})[j] = c
        comps[k] = comp
        # relation of arity k+1 involves Phi^k only through lower terms, so continue
    return LInfMorphismData(g, h, comps)


# --------------------------------------------------------------------------- cohomology of subcomplexes


class Subcomplex:
    """A d-stable subspace spanned by basis vectors of a presentation, graded by degree."""

    def __init__(self, g: DGLAPresentation, vectors: list):
        self.g = g
        self.vectors = [v for v in vectors if v]
        self.by_degree: dict = {}
        solver = SpanSolver()
        for v in self.vectors:
            if solver.add(len(solver.labels), v):
                self.by_degree.setdefault(g.degree_of(v), []).append(v)
        self._span = SpanSolver()
        for i, v in enumerate(self.all_vectors()):
            self._span.add(i, v)
        for v in self.all_vectors():
            if not self.contains(g.d(v)):
                raise DGLAError("subspace is not stable under d")

    def all_vectors(self):
        return [v for k in sorted(self.by_degree) for v in self.by_degree[k]]

    def contains(self, v: dict) -> bool:
        return self._span.contains(v)

    def is_central(self) -> bool:
        for v in self.all_vectors():
            for i in range(self.g.dim):
                if self.g.br({i: 1}, v):
                    return False
        return True

    def is_ideal(self) -> bool:
        for v in self.all_vectors():
            for i in range(self.g.dim):
                if not self.contains(self.g.br({i: 1}, v)):
                    return False
        return True

    def boundaries(self, k) -> SpanSolver:
        s = SpanSolver()
        for i, v in enumerate(self.by_degree.get(k - 1, [])):
            s.add(i, self.g.d(v))
        return s

    def is_boundary(self, v: dict, k: int):
        """A primitive ``u`` in degree k-1 with ``d u = v``, or None."""
        src = self.by_degree.get(k - 1, [])
        s = SpanSolver()
        for i, u in enumerate(src):
            s.add(i, self.g.d(u))
        x = s.express(v)
        if x is None:
            return None
        u: dict = {}
        for i, c in x.items():
            _axpy(u, c, src[i])
        return u

    def cohomology_dim(self, k) -> int:
        vs = self.by_degree.get(k, [])
        cyc = 0
        s = SpanSolver()
        for i, v in enumerate(vs):
            s.add(i, self.g.d(v))
        cyc = len(vs) - s.rank
        return cyc - self.boundaries(k).rank


@dataclass
class CohomologyClass:
    degree: int
    representative: dict
    zero: bool
    primitive: dict | None


def _section(g: DGLAPresentation, h: Subcomplex, v: dict) -> dict:
    """Canonical representative of ``v`` modulo h (remainder after reduction)."""
    return h._span.remainder(v)


def obstruction_o2(g: DGLAPresentation, h: Subcomplex, alpha_lift: dict) -> CohomologyClass:
    """Class of ``F(alpha~) = d alpha~ + 1/2 [alpha~, alpha~]`` in H^2(h)."""
    if not h.is_central():
        raise DGLAError("the ideal must be central")
    F = mc_residual(g, alpha_lift)
    if not h.contains(F):
        raise DGLAError("alpha is not Maurer-Cartan modulo the ideal")
    prim = h.is_boundary(F, 2)
    return CohomologyClass(2, F, prim is not None, prim)


def lift_mc(g: DGLAPresentation, h: Subcomplex, alpha_lift: dict):
    """Brute-force search for an MC lift ``alpha~ + u`` with ``u`` in h^1.

    The residual is evaluated on the full presentation; its dependence on ``u`` is
    read off from basis perturbations and checked to be affine before solving.
    """
    base = mc_residual(g, alpha_lift)
    basis = h.by_degree.get(1, [])
    cols = [vsub(mc_residual(g, vadd(alpha_lift, u)), base) for u in basis]
    for a, b in itertools.combinations(range(len(basis)), 2):
        both = vsub(mc_residual(g, vadd(alpha_lift, basis[a], basis[b])), base)
        if vsub(both, vadd(cols[a], cols[b])):
            raise DGLAError("residual is not affine along the ideal")
    s = SpanSolver()
    for i, c in enumerate(cols):
        s.add(i, c)
    x = s.express(vscale(-1, base))
    if x is None:
        return None
    out = dict(alpha_lift)
    for i, c in x.items():
        _axpy(out, c, basis[i])
    return out


def obstruction_o1(g: DGLAPresentation, h: Subcomplex, alpha_lift: dict, beta_lift: dict,
                   X_lift: dict) -> CohomologyClass:
    """Class of ``beta~ - exp(X~)(alpha~)`` in H^1(h)."""
    if not h.is_central():
        raise DGLAError("the ideal must be central")
    diffv = vsub(beta_lift, gauge_flow(g, X_lift, alpha_lift))
    if not h.contains(diffv):
        raise DGLAError("exp(X)(alpha) != beta modulo the ideal")
    if g.d(diffv):
        raise DGLAError("lifts are not Maurer-Cartan")
    prim = h.is_boundary(diffv, 1)
    return CohomologyClass(1, diffv, prim is not None, prim)


def lift_gauge(g: DGLAPresentation, h: Subcomplex, alpha_lift, beta_lift, X_lift):
    """Brute-force search for ``v`` in h^0 with ``exp(X~ + v)(alpha~) = beta~``."""
    base = vsub(gauge_flow(g, X_lift, alpha_lift), beta_lift)
    basis = h.by_degree.get(0, [])
    cols = [vsub(vsub(gauge_flow(g, vadd(X_lift, v), alpha_lift), beta_lift), base) for v in basis]
    s = SpanSolver()
    for i, c in enumerate(cols):
        s.add(i, c)
    x = s.express(vscale(-1, base))
    if x is None:
        return None
    out = dict(X_lift)
    for i, c in x.items():
        _axpy(out, c, basis[i])
    return out


# --------------------------------------------------------------------------- polynomial paths


@dataclass
class PolyLineForm:
    """``P(t) + Q(t) dt`` with P, Q lists of vectors indexed by powers of t."""

    g: DGLAPresentation
    P: list
    Q: list

    def ev(self, t0) -> dict:
        t0 = to_fraction(t0)
        out: dict = {}
        for k, v in enumerate(self.P):
            _axpy(out, t0 ** k, v)
        return out

    def mc_residual(self):
        """Components (no-dt part, dt part) of ``D A + 1/2 [A, A]`` in g (x) Omega_1."""
        g = self.g
        top = max(len(self.P) * 2, len(self.Q) + len(self.P))
        zero_part = [{} for _ in range(top)]
        dt_part = [{} for _ in range(top)]
        for k, v in enumerate(self.P):
            _axpy(zero_part[k], 1, g.d(v))
            if k:
                # d_t (t^k v) = k t^{k-1} dt v, placed with the Koszul sign of moving dt past v
                sgn = -1 if g.degree_of(v) and g.degree_of(v) % 2 else 1
                _axpy(dt_part[k - 1], k * sgn, v)
        for k, v in enumerate(self.Q):
            # d(v dt) = d(v) dt
            _axpy(dt_part[k], 1, g.d(v))
        for a, u in enumerate(self.P):
            for b, v in enumerate(self.P):
                _axpy(zero_part[a + b], Fraction(1, 2), g.br(u, v))
            for b, w in enumerate(self.Q):
                _axpy(dt_part[a + b], 1, g.br(u, w))
        return [v for v in zero_part], [v for v in dt_part]

    def is_mc(self) -> bool:
        z, t = self.mc_residual()
        return not any(z) and not any(t)


def line_homotopy(g: DGLAPresentation, alpha: dict, X: dict, degree_cap: int | None = None) -> PolyLineForm:
    """``A = exp(tX)(alpha) - X dt`` as polynomials in t.

    With forms written on the right, the dt-component of the MC equation reads
    ``-P' + dQ + [P, Q] = 0``, so the gauge flow of ``X`` pairs with ``Q = -X``.
    """
    c = degree_cap or g.nilpotency_class() + 1
    # exp(tX)(alpha) = sum_k t^k/k! ad^k alpha - sum_{k>=1} t^k/k! ad^{k-1} dX
    P = [dict(alpha)]
    cur = alpha
    curd = g.d(X)
    for k in range(1, c + 1):
        cur = g.br(X, cur)
        term = vsub(cur, curd)
        P.append(vscale(Fraction(1, math.factorial(k)), term))
        curd = g.br(X, curd)
    while P and len(P) > 1 and not P[-1]:
        P.pop()
    Q = [vscale(-1, X)] if X else []
    return PolyLineForm(g, P, Q)


def project_dt(coeffs: list) -> Fraction | dict:
    """Integral over [0, 1] of ``sum a_i t^i dt``: the projection ``t^i dt -> a_i/(i+1)``."""
    if coeffs and isinstance(coeffs[0], dict):
        out: dict = {}
        for i, v in enumerate(coeffs):
            _axpy(out, Fraction(1, i + 1), v)
        return out
    return sum(Fraction(c) / (i + 1) for i, c in enumerate(coeffs))


def homotopy_o1A(g: DGLAPresentation, h: Subcomplex, A: PolyLineForm, alpha_lift, beta_lift) -> CohomologyClass:
    """o1 for a path: class of ``beta~ - alpha~ - integral of the dt-component`` of a lifted flow.

    For ``A = exp(tX)(alpha) - X dt`` with ``X`` lifted, the dt-integral of ``d/dt`` of
    the path equals ``exp(X~)(alpha~) - alpha~``, so this reproduces :func:`obstruction_o1`.
    """
    X = vscale(-1, A.Q[0]) if A.Q else {}
    return obstruction_o1(g, h, alpha_lift, beta_lift, X)


# --------------------------------------------------------------------------- obstruction suite


def top_level_ideal(g: DGLAPresentation) -> Subcomplex:
    """Span of the basis elements of maximal filtration level."""
    top = max(g.levels)
    return Subcomplex(g, [{i: Fraction(1)} for i in range(g.dim) if g.levels[i] == top])


def _random_combo(rng: random.Random, vectors: list, lo: int = -2, hi: int = 2) -> dict:
    out: dict = {}
    for v in vectors:
        _axpy(out, Fraction(rng.randint(lo, hi)), v)
    return out


def _quotient_mc_candidates(g: DGLAPresentation, h: Subcomplex) -> list:
    """Degree-1 vectors whose differential lies in h, reduced modulo h."""
    basis = [{i: Fraction(1)} for i in g.indices_of_degree(1)]
    basis = [b for b in basis if not h.contains(b)]
    cols = [_section(g, h, g.d(b)) for b in basis]
    from .linalg import kernel

    out = []
    for vec in kernel(cols):
        v: dict = {}
        for idx, c in vec.items():
            _axpy(v, c, basis[idx])
        out.append(v)
    return out


@dataclass
class ObstructionRecord:
    kind: str
    obstruction_zero: bool
    lift_found: bool
    lift_verified: bool

    @property
    def agree(self) -> bool:
        return self.obstruction_zero == self.lift_found and self.lift_verified

    def to_json(self):
        return {"kind": self.kind, "obstruction_zero": self.obstruction_zero,
                "lift_found": self.lift_found, "lift_verified": self.lift_verified}


def obstruction_suite(g: DGLAPresentation, h: Subcomplex, rng: random.Random, samples: int = 8) -> list:
    """Compare o2 and o1 against brute-force lifts on seeded random data.

    o2 samples: ``alpha~`` is MC modulo h.  o1 samples: ``alpha~`` is MC in g and
    ``beta~ = exp(X~)(alpha~) + c`` with ``c`` a random cocycle of h^1.
    Lifts found by the search are re-checked with the direct MC residual and
    the truncated gauge series.
    """
    if not h.is_central():
        raise DGLAError("the ideal must be central")
    cands = _quotient_mc_candidates(g, h)
    h1 = h.by_degree.get(1, [])
    h1_cycles = []
    if h1:
        from .linalg import kernel

        for vec in kernel([g.d(v) for v in h1]):
            c: dict = {}
            for idx, x in vec.items():
                _axpy(c, x, h1[idx])
            h1_cycles.append(c)
    h1_all = h1 + [{}]
    deg0 = [{i: Fraction(1)} for i in g.indices_of_degree(0)]
    records = []
    mc_elements = []
    for _ in range(samples):
        alpha = vadd(_random_combo(rng, cands), _random_combo(rng, h1_all))
        if not h.contains(mc_residual(g, alpha)):
            continue
        o2 = obstruction_o2(g, h, alpha)
        lift = lift_mc(g, h, alpha)
        ok = lift is None or (not mc_residual_direct(g, lift) and h.contains(vsub(lift, alpha)))
        records.append(ObstructionRecord("o2", o2.zero, lift is not None, ok))
        if lift is not None:
            mc_elements.append(lift)
    if not mc_elements:
        mc_elements.append({})
    for k in range(samples):
        alpha = mc_elements[k % len(mc_elements)]
        X = _random_combo(rng, deg0)
        c = _random_combo(rng, h1_cycles)
        beta = vadd(gauge_flow(g, X, alpha), c)
        o1 = obstruction_o1(g, h, alpha, beta, X)
        path = homotopy_o1A(g, h, line_homotopy(g, alpha, X), alpha, beta)
        Y = lift_gauge(g, h, alpha, beta, X)
        ok = path.zero == o1.zero
        if Y is not None:
            ok = ok and not vsub(gauge_series(g, Y, alpha), beta) and h.contains(vsub(Y, X))
        records.append(ObstructionRecord("o1", o1.zero, Y is not None, ok))
    return records


# --------------------------------------------------------------------------- random test algebras


def random_two_step(rng: random.Random, dims=None, max_dim: int = 8):
    """A random 2-step nilpotent DGLA ``L1 + L2`` with ``[L1, L1] in L2``.

    Degrees are taken from {0, 1, 2}; the differential is block triangular and
    the bracket is a random solution of the Leibniz rule.  Returns the
    presentation together with the indices of ``L2``.
    """
    for _ in range(200):
        if dims is None:
            d1 = [rng.randint(0, 1) + (rng.random() < 0.3) for _ in range(rng.randint(2, min(4, max_dim - 2)))]
            d2 = [rng.randint(1, 2) for _ in range(rng.randint(2, max_dim - len(d1)))]
        else:
            d1, d2 = dims
        degrees = d1 + d2
        n = len(degrees)
        L1 = list(range(len(d1)))
        L2 = list(range(len(d1), n))
        levels = [1] * len(d1) + [2] * len(d2)
        diff = _random_differential(rng, degrees, [L1, L2])
        g0 = DGLAPresentation([f"e{i}" for i in range(n)], degrees, diff, {}, levels, validate=False)
        br = _random_leibniz_bracket(rng, g0, L1, L2)
        if br is None:
            continue
        try:
            g = DGLAPresentation(g0.names, degrees, diff, br, levels)
        except DGLAError:
            continue
        return g, L2
    raise DGLAError("could not generate a random DGLA")


def _random_differential(rng, degrees, blocks):
    # d maps degree k to degree k+1 within each block, with d^2 = 0 via d = P N P^{-1} shapes:
    diff: dict = {}
    for block in blocks:
        by_deg: dict = {}
        for i in block:
            by_deg.setdefault(degrees[i], []).append(i)
        used_src, used_tgt = set(), set()
        for k in sorted(by_deg):
            src = [i for i in by_deg[k] if i not in used_tgt]
            tgt = by_deg.get(k + 1, [])
            for i in src:
                if rng.random() < 0.5:
                    continue
                free = [j for j in tgt if j not in used_tgt and j not in used_src]
                if not free:
                    continue
                j = rng.choice(free)
                diff[i] = {j: Fraction(rng.choice([1, 2, -1, 3]))}
                used_src.add(i)
                used_tgt.add(j)
    # cross terms L1 -> L2 keeping d^2 = 0: d(e_i) += c e_j for i in L1, j in L2 only if
    # e_i is not a target and e_j is not a source of a nonzero d
    l1, l2 = blocks
    targets = {j for row in diff.values() for j in row}
    for i in l1:
        if i in targets:
            continue
        for j in l2:
            if degrees[j] == degrees[i] + 1 and j not in diff and rng.random() < 0.3:
                diff.setdefault(i, {})[j] = Fraction(rng.choice([1, -1, 2]))
    return diff


def _random_leibniz_bracket(rng, g0: DGLAPresentation, L1, L2):
    """Random bracket ``[L1, L1] -> L2`` satisfying the Leibniz rule, by linear solve."""
    deg = g0.degrees
    unknowns = []
    for a, i in enumerate(L1):
        for j in L1[a:]:
            if i == j and deg[i] % 2 == 0:
                continue
            for k in L2:
                if deg[k] == deg[i] + deg[j]:
                    unknowns.append((i, j, k))
    if not unknowns:
        return None

    def bracket_of(assign):
        br: dict = {}
        for (i, j, k), c in assign.items():
            if c:
                br.setdefault((i, j), {})[k] = c
        return br

    def leibniz_defect(br):
        g = DGLAPresentation(g0.names, deg, g0.diff, br, g0.levels, validate=False)
        out = {}
        n = g.dim
        for i in range(n):
            for j in range(n):
                x, y = {i: 1}, {j: 1}
                lhs = g.d(g.br(x, y))
                rhs = vadd(g.br(g.d(x), y), vscale((-1) ** deg[i], g.br(x, g.d(y))))
                for k, c in vsub(lhs, rhs).items():
                    out[(i, j, k)] = c
        return out

    cols = [leibniz_defect(bracket_of({u: Fraction(1)})) for u in unknowns]
    from .linalg import kernel

    ker = kernel(cols)
    if not ker:
        return None
    assign: dict = {}
    for vec in ker:
        c = Fraction(rng.randint(-2, 2))
        for idx, v in vec.items():
            assign[unknowns[idx]] = assign.get(unknowns[idx], 0) + c * v
    br = bracket_of(assign)
    if not br:
        return None
    return br


def heisenberg_example() -> DGLAPresentation:
    """Heisenberg-type DGLA used as the CLI fixture."""
    names = ["x", "y", "z", "a", "b", "c"]
    degrees = [0, 1, 1, 1, 2, 2]
    levels = [1, 1, 2, 1, 2, 2]
    diff = {3: {4: 1}}
    br = {(0, 1): {2: 1}, (1, 3): {5: 1}}
    return DGLAPresentation(names, degrees, diff, br, levels)
