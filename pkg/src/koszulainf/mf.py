"""The Koszul matrix factorization of W and the retract (i, p, h) of B onto Lambda(V)."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exact_algebra import (
    AlgebraError,
    BElement,
    ExtElement,
    Polynomial,
    _iota_single,
    popcount,
    superpotential,
    wedge_sign,
)


@dataclass(frozen=True)
class MFData:
    W: Polynomial
    gamma: tuple  # g_1..g_n with gamma = sum g_k dz_k
    genus: int | None = None

    @property
    def n(self):
        return self.W.n

    def euler_check(self) -> bool:
        total = Polynomial(self.n)
        for k, gk in enumerate(self.gamma):
            total = total + Polynomial.var(self.n, k + 1) * gk
        return total == self.W

    def to_json(self):
        return {
            "W": self.W.to_json(),
            "gamma": [g.to_json() for g in self.gamma],
            "genus": self.genus,
        }

    @classmethod
    def from_json(cls, obj):
        W = Polynomial.from_json(obj["W"])
        mf = gamma_from_W(W, obj.get("genus"))
        if "gamma" in obj:
            given = tuple(Polynomial.from_json(g) for g in obj["gamma"])
            if given != mf.gamma:
                raise AlgebraError("stored gamma does not match the one derived from W")
        return mf


def gamma_from_W(W: Polynomial, genus: int | None = None) -> MFData:
    """Build ``gamma = sum_i dW_i / i`` from the graded pieces of ``W``."""
    if W.is_zero():
        raise AlgebraError("W must be nonzero")
    if W.filtration_order() < 2:
        raise AlgebraError("W must have no constant or linear part")
    n = W.n
    gam = [Polynomial(n) for _ in range(n)]
    for d, part in W.graded_parts().items():
        for k in range(n):
            gam[k] = gam[k] + part.partial(k + 1).scale(Fraction(1, d))
    return MFData(W, tuple(gam), genus)


def landau_ginzburg(genus: int) -> MFData:
    return gamma_from_W(superpotential(genus), genus)


# --------------------------------------------------------------------------- differentials


def koszul_diff(b: BElement) -> BElement:
    """``d(f beta (x) theta) = iota_eta(f beta) (x) theta`` with eta the Euler field."""
    n = b.n
    out: dict = {}
    for (e, beta, theta), c in b.terms.items():
        for k in range(n):
            r = _iota_single(k, beta)
            if r is None:
                continue
            s, b2 = r
            e2 = list(e)
            e2[k] += 1
            key = (tuple(e2), b2, theta)
            out[key] = out.get(key, 0) + s * c
    return BElement(n, out)


def correction(b: BElement, mf: MFData) -> BElement:
    """``(d~ - d)(f beta (x) theta) = (-1)^(|beta|-1) sum_k g_k f beta (x) iota_{dz_k} theta``."""
    n = b.n
    out: dict = {}
    for (e, beta, theta), c in b.terms.items():
        sgn = 1 if popcount(beta) & 1 else -1
        for k in range(n):
            r = _iota_single(k, theta)
            if r is None:
                continue
            s, t2 = r
            for ge, gc in mf.gamma[k].terms.items():
                key = (tuple(x + y for x, y in zip(e, ge)), beta, t2)
                out[key] = out.get(key, 0) + sgn * s * gc * c
    return BElement(n, out)


def tilde_diff(b: BElement, mf: MFData) -> BElement:
    return koszul_diff(b) + correction(b, mf)


# --------------------------------------------------------------------------- retract


def retract_i(a: ExtElement) -> BElement:
    if a.side != "V":
        raise AlgebraError("i is defined on Lambda(V)")
    zero = (0,) * a.n
    return BElement(a.n, {(zero, 0, m): c for m, c in a.terms.items()})


def retract_p(b: BElement) -> ExtElement:
    out = {}
    for (e, beta, theta), c in b.terms.items():
        if beta == 0 and not any(e):
            out[theta] = out.get(theta, 0) + c
    return ExtElement(b.n, out, "V")


def h_formula(b: BElement) -> BElement:
    """``f beta (x) theta -> (1/w) df ^ beta (x) theta`` with ``w = deg f + |beta|``; zero on scalars."""
    n = b.n
    out: dict = {}
    for (e, beta, theta), c in b.terms.items():
        w = sum(e) + popcount(beta)
        if w == 0:
            continue
        cw = c / w
        for k in range(n):
            if not e[k] or (beta >> k) & 1:
                continue
            s = wedge_sign(1 << k, beta)
            e2 = list(e)
            e2[k] -= 1
            key = (tuple(e2), beta | (1 << k), theta)
            out[key] = out.get(key, 0) + s * e[k] * cw
    return BElement(n, out)


def retract_h(b: BElement) -> BElement:
    """The contracting homotopy with ``ip - id = dh + hd``.

    Since ``d(df) = deg(f) f`` for the Koszul differential, :func:`h_formula`
    satisfies ``dh + hd = id - ip``; the homotopy used for transfer is its negative.
    """
    return -h_formula(b)


# --------------------------------------------------------------------------- delta_E


def euler_operator(n: int) -> BElement:
    """``iota_eta = sum_k z_k iota_{xi_k}`` as an element of B."""
    out = {}
    for k in range(n):
        e = [0] * n
        e[k] = 1
        out[(tuple(e), 0, 1 << k)] = 1
    return BElement(n, out)


def delta_E(mf: MFData) -> BElement:
    """The odd operator ``iota_eta + gamma ^`` on Omega(V)."""
    n = mf.n
    out = dict(euler_operator(n).terms)
    for k, gk in enumerate(mf.gamma):
        for e, c in gk.terms.items():
            out[(e, 1 << k, 0)] = out.get((e, 1 << k, 0), 0) + c
    return BElement(n, out)


def delta_squared_check(mf: MFData) -> bool:
    d = delta_E(mf)
    return d * d == BElement.from_poly(mf.W)


def supercommutator(x: BElement, y: BElement) -> BElement:
    """``[x, y] = xy - (-1)^{|x||y|} yx`` for homogeneous x, y."""
    px, py = x.parity(), y.parity()
    if px is None or py is None:
        raise AlgebraError("supercommutator needs homogeneous arguments")
    sign = -1 if (px * py) % 2 == 0 else 1
    return x * y + (y * x).scale(sign)
