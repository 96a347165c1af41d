"""Exact Gaussian elimination over Q on sparse vectors (dicts index -> Fraction)."""
from __future__ import annotations

from fractions import Fraction


def _axpy(y: dict, a, x: dict) -> None:
    """y += a * x in place, dropping zeros."""
    for k, v in x.items():
        w = y.get(k, 0) + a * v
        if w:
            y[k] = w
        else:
            y.pop(k, None)


def _pivot_key(v: dict, order):
    return min(v, key=order) if order else min(v)


class SpanSolver:
    """Incremental row-reduced basis of the span of labelled sparse vectors.

    ``add(label, v)`` inserts a generator; ``express(v)`` returns a combination
    ``{label: coeff}`` of generators equal to ``v``, or ``None`` if ``v`` is not
    in the span.  Pivots are chosen by ``order`` (smallest key first), so results are
    deterministic for a fixed insertion order.
    """

    def __init__(self, order=None):
        self.order = order
        self.rows: dict = {}  # pivot -> (vector, combination)
        self.labels: list = []

    def reduce(self, v: dict):
        v = {k: Fraction(c) for k, c in v.items() if c}
        comb: dict = {}
        changed = True
        while changed and v:
            changed = False
            for k in sorted(v, key=self.order) if self.order else sorted(v):
                if k in self.rows:
                    vec, cmb = self.rows[k]
                    a = -v[k]
                    _axpy(v, a, vec)
                    _axpy(comb, a, cmb)
                    changed = True
                    break
        return v, comb

    def add(self, label, v: dict) -> bool:
        self.labels.append(label)
        rem, comb = self.reduce(v)
        if not rem:
            return False
        comb = dict(comb)
        comb[label] = comb.get(label, 0) + 1
        p = _pivot_key(rem, self.order)
        inv = 1 / rem[p]
        rem = {k: c * inv for k, c in rem.items()}
        comb = {k: c * inv for k, c in comb.items() if c}
        for q, (vec, cmb) in self.rows.items():
            if p in vec:
                a = -vec[p]
                _axpy(vec, a, rem)
                _axpy(cmb, a, comb)
        self.rows[p] = (rem, comb)
        return True

    @property
    def rank(self):
        return len(self.rows)

    def contains(self, v: dict) -> bool:
        rem, _ = self.reduce(v)
        return not rem

    def express(self, v: dict):
        rem, comb = self.reduce(v)
        if rem:
            return None
        return {k: -c for k, c in comb.items() if c}

    def remainder(self, v: dict) -> dict:
        return self.reduce(v)[0]


def rank(vectors) -> int:
    s = SpanSolver()
    for i, v in enumerate(vectors):
        s.add(i, v)
    return s.rank


def solve(columns: list, b: dict):
    """Some x (dict column index -> value) with sum x_j columns[j] = b, or None."""
    s = SpanSolver()
    for j, col in enumerate(columns):
        s.add(j, col)
    return s.express(b)


def kernel(columns: list) -> list:
    """Basis of {x : sum x_j columns[j] = 0} as sparse dicts."""
    s = SpanSolver()
    basis = []
    for j, col in enumerate(columns):
        rem, comb = s.reduce(col)
        if not rem:
            x = {k: c for k, c in comb.items() if c}
            x[j] = x.get(j, 0) + 1
            basis.append(x)
        else:
            s.add(j, col)
    return basis


def min_norm_solve(columns: list, b: dict):
    """The solution of least Euclidean norm of ``A x = b``, exactly, or None.

    It is the unique solution lying in the row space of A: x = A^T y with
    (A A^T) y = b restricted to a maximal independent set of rows.
    """
    if solve(columns, b) is None:
        return None
    rows: dict = {}
    for j, col in enumerate(columns):
        for i, v in col.items():
            rows.setdefault(i, {})[j] = v
    row_ids = sorted(rows, key=repr)
    # Gram matrix A A^T accumulated column by column (columns are sparse)
    gram: dict = {}
    for col in columns:
        items = list(col.items())
        for r1, v1 in items:
            g = gram.setdefault(r1, {})
            for r2, v2 in items:
                g[r2] = g.get(r2, 0) + v1 * v2
    gram_cols = [{r2: v for r2, v in gram.get(r1, {}).items() if v} for r1 in row_ids]
    y = solve(gram_cols, b)
    x: dict = {}
    for idx, c in y.items():
        _axpy(x, c, rows[row_ids[idx]])
    return x


def apply(columns: list, x: dict) -> dict:
    out: dict = {}
    for j, c in x.items():
        _axpy(out, c, columns[j])
    return out
