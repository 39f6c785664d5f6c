"""Atiyah cocycles, power sums and the characteristic polynomial det(1 - tA).

For a bundle with transition matrices g_ab the Atiyah cocycle is the
End(E)-valued Cech 1-cocycle ``A_ab = g_ab^{-1} d g_ab`` (frame and
coordinates of chart b).  Power sums are ``p_j = tr(A u ... u A)`` and the
characteristic polynomial ``c(t) = det(1 - tA) = sum c_k t^k`` has
``c_k = (-1)^k e_k(A)``, computed from power sums by Newton's identities
``k c_k = -sum_{i=1..k} c_{k-i} p_i``.  With these conventions
``c_1(O(d)) = d h`` where ``h`` is :func:`hyperplane_cocycle`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations

from .cech import lmatrix
from .cech.cochains import CechCochain, Sheaf, cup, endo_block_sum, endomorphisms, trace, unit_cochain
from .cech.cohomology import class_coordinates, class_equal, hyperplane_power, is_cocycle
from .cech.scheme import VectorBundle, bundle_algebra
from .rings.forms import DifferentialForm
from .rings.laurent import LaurentPoly
from .rings.scalars import QQ, ZZ


class DivisionObstruction(ArithmeticError):
    """Newton's identities need to divide by k, which is impossible here."""


# ---------------------------------------------------------------- Atiyah

@dataclass
class AtiyahCocycle:
    bundle: VectorBundle
    cochain: CechCochain

    @property
    def rank(self):
        return self.bundle.rank


def _dmatrix(g):
    return [[DifferentialForm.from_poly(x).d() for x in r] for r in g]


def _funcs_times_forms(g, M):
    n, m, k = len(g), len(M), len(M[0])
    out = []
    for i in range(n):
        row = []
        for j in range(k):
            acc = None
            for t in range(m):
                if g[i][t].is_zero() or M[t][j].is_zero():
                    continue
                v = M[t][j] * g[i][t]
                acc = v if acc is None else acc + v
            row.append(acc if acc is not None else M[0][j] * 0)
        out.append(row)
    return out


def _forms_times_funcs(M, g):
    n, m, k = len(M), len(g), len(g[0])
    out = []
    for i in range(n):
        row = []
        for j in range(k):
            acc = None
            for t in range(m):
                if g[t][j].is_zero() or M[i][t].is_zero():
                    continue
                v = M[i][t] * g[t][j]
                acc = v if acc is None else acc + v
            row.append(acc if acc is not None else M[i][0] * 0)
        out.append(row)
    return out


def atiyah_cocycle(E: VectorBundle, convention="left") -> AtiyahCocycle:
    """``left``: g^{-1} dg in the frame of the second chart.

    ``right``: dg g^{-1}, which is naturally written in the frame of the
    first chart; it is moved to the second chart's frame before storing.
    """
    X = E.scheme
    sheaf = endomorphisms(E, 1)
    vals = {}
    for (a, b), g in E.transitions().items():
        ginv = lmatrix.inverse(g)
        dg = _dmatrix(g)
        if convention == "left":
            vals[(a, b)] = _funcs_times_forms(ginv, dg)
        elif convention == "right":
            m = _forms_times_funcs(dg, ginv)
            # m is the value in the frame of chart a (coordinates of chart b)
            vals[(a, b)] = _funcs_times_forms(ginv, _forms_times_funcs(m, g))
        else:
            raise ValueError(f"unknown Atiyah convention {convention!r}")
    return AtiyahCocycle(E, CechCochain(X, 1, sheaf, vals))


def retrivialize(E: VectorBundle, hs) -> VectorBundle:
    """New frames ``e'^a = h_a e^a``; ``hs[a]`` is invertible over chart a."""
    X = E.scheme
    trans = {}
    for (a, b), g in E.transitions().items():
        ha = [[X.move(x, a, b) for x in r] for r in hs[a]]
        hb_inv = lmatrix.inverse(hs[b])
        trans[(a, b)] = lmatrix.mul(lmatrix.mul(ha, g), hb_inv)
    return VectorBundle(X, E.rank, trans, name=f"{E.name}'")


def pull_to_original_frame(A_new: CechCochain, E: VectorBundle, hs) -> CechCochain:
    """Rewrite an End(E')-valued cochain as End(E)-valued: M -> h_b^{-1} M h_b."""
    sheaf = Sheaf(A_new.w, E, "endo")
    vals = {}
    for tup, v in A_new.values.items():
        b = tup[-1]
        h = hs[b]
        vals[tup] = _funcs_times_forms(lmatrix.inverse(h), _forms_times_funcs(v, h))
    return CechCochain(E.scheme, A_new.q, sheaf, vals)


# ---------------------------------------------------------------- power sums

def _endo_cochain(A):
    return A.cochain if isinstance(A, AtiyahCocycle) else A


def endo_power(A, j) -> CechCochain:
    A = _endo_cochain(A)
    out = A
    for _ in range(j - 1):
        out = cup(out, A)
    return out


def power_sum(A, j: int) -> CechCochain:
    """``p_j = tr(A^j)``, a scalar (j, j) cocycle."""
    if j < 1:
        raise ValueError("power sums start at j = 1")
    A = _endo_cochain(A)
    X = A.scheme
    if j > X.dim:
        return CechCochain(X, j, Sheaf(j))
    return trace(endo_power(A, j))


# ---------------------------------------------------------------- the characteristic polynomial

def _divide(c: CechCochain, k: int) -> CechCochain:
    ring = c.scheme.ring
    if k == 1:
        return c
    if ring == QQ:
        return c.scale(Fraction(1, k))
    if ring.is_field:
        if k % ring.characteristic == 0:
            raise DivisionObstruction(
                f"Newton's identities divide by {k}, which is zero in {ring}; use the split path")
        return c.scale(ring.inv(ring(k)))
    if ring == ZZ:
        def div(_t, v):
            out = []
            for r in v:
                row = []
                for x in r:
                    terms = {}
                    for J, f in x.terms.items():
                        new = {}
                        for e, a in f.terms.items():
                            if a % k:
                                raise DivisionObstruction(
                                    f"Newton's identities need an exact division by {k} over Z; "
                                    "use base Q or the split path")
                            new[e] = a // k
                        terms[J] = LaurentPoly(ring, f.nvars, new, True)
                    row.append(DifferentialForm(ring, x.nvars, x.degree, terms))
                out.append(row)
            return out
        return c.map_values(div)
    raise DivisionObstruction(f"cannot divide by {k} in {ring}")


@dataclass
class CharPoly:
    """``1 + c_1 t + ... + c_r t^r`` with c_k a scalar (k, k) cocycle."""

    scheme: object
    coeffs: list = field(default_factory=list)
    method: str = ""

    def __post_init__(self):
        if not self.coeffs:
            self.coeffs = [unit_cochain(self.scheme)]

    @property
    def top(self):
        return len(self.coeffs) - 1

    def coefficient(self, k) -> CechCochain:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return CechCochain(self.scheme, k, Sheaf(k))

    def __mul__(self, other):
        X = self.scheme
        top = min(self.top + other.top, X.dim)
        out = []
        for k in range(top + 1):
            acc = CechCochain(X, k, Sheaf(k))
            for i in range(k + 1):
                if i <= self.top and k - i <= other.top:
                    acc = acc + cup(self.coeffs[i], other.coeffs[k - i])
            out.append(acc)
        return CharPoly(X, out, method=f"{self.method}*{other.method}")

    def inverse(self):
        """Multiplicative inverse, truncated at the dimension (higher terms vanish)."""
        X = self.scheme
        out = [unit_cochain(X)]
        for k in range(1, X.dim + 1):
            acc = CechCochain(X, k, Sheaf(k))
            for i in range(1, k + 1):
                if i <= self.top:
                    acc = acc - cup(self.coeffs[i], out[k - i])
            out.append(acc)
        return CharPoly(X, out, method=f"inverse({self.method})")

    def equals(self, other) -> bool:
        top = max(self.top, other.top)
        return all(class_equal(self.coefficient(k), other.coefficient(k))
                   for k in range(1, min(top, self.scheme.dim) + 1))

    def is_cocycle(self):
        return all(is_cocycle(c) for c in self.coeffs)

    def in_hyperplane_basis(self):
        """Coordinates ``c_k = n_k h^k`` on a projective space (None if not a multiple)."""
        out = []
        for k in range(0, min(self.top, self.scheme.dim) + 1):
            if k == 0:
                out.append(1)
                continue
            co = class_coordinates(self.coeffs[k], [hyperplane_power(self.scheme, k)])
            out.append(None if co is None else co[0])
        return out

    def __repr__(self):
        return f"CharPoly(top={self.top}, method={self.method!r})"


def newton_char_poly(A, rank=None) -> CharPoly:
    """Coefficients of det(1 - tA) from power sums, dividing by k at step k."""
    A = _endo_cochain(A)
    X = A.scheme
    r = A.sheaf.bundle.rank if rank is None else rank
    top = min(r, X.dim)
    ps = [None] + [power_sum(A, j) for j in range(1, top + 1)]
    cs = [unit_cochain(X)]
    for k in range(1, top + 1):
        acc = CechCochain(X, k, Sheaf(k))
        for i in range(1, k + 1):
            acc = acc - cup(cs[k - i], ps[i])
        cs.append(_divide(acc, k))
    return CharPoly(X, cs, method="newton")


def _line_char_poly(E: VectorBundle) -> CharPoly:
    A = atiyah_cocycle(E)
    X = E.scheme
    c1 = -trace(A.cochain)
    return CharPoly(X, [unit_cochain(X), c1] if X.dim >= 1 else [unit_cochain(X)], method="line")


def split_char_poly(E: VectorBundle) -> CharPoly:
    """Product over the direct summands; rank-one summands need no division."""
    parts = getattr(E, "summands", None)
    if not parts:
        if E.rank == 1:
            return _line_char_poly(E)
        return newton_char_poly(atiyah_cocycle(E))
    out = None
    for F in parts:
        c = split_char_poly(F)
        out = c if out is None else out * c
    out.method = "split"
    return out


@dataclass
class FreeComplex:
    """Bounded complex of bundles, recorded by its terms ``{degree: bundle}``.

    Only the terms matter for det(1 - tA); the differentials are not needed.
    """

    terms: dict

    @property
    def scheme(self):
        return next(iter(self.terms.values())).scheme


def char_poly(E, A=None, method="auto", L="Omega1") -> CharPoly:
    """The characteristic polynomial c(L, E, A) = det(1 - tA).

    ``E``: a bundle or a :class:`FreeComplex` (odd terms enter inverted).
    ``A``: an End(E)-valued (1, 1) cocycle; defaults to the Atiyah cocycle.
    ``method``: ``newton``, ``split`` or ``auto`` (Newton when every needed
    division is possible, otherwise split).
    """
    if L not in ("Omega1", None):
        raise ValueError("only L = Omega^1 is supported")
    if isinstance(E, FreeComplex):
        out = None
        for deg, F in sorted(E.terms.items()):
            c = char_poly(F, None, method)
            if deg % 2:
                c = c.inverse()
            out = c if out is None else out * c
        return out
    if A is not None:
        if method == "split":
            raise ValueError("the split path uses the Atiyah cocycles of the summands")
        return newton_char_poly(A, E.rank)
    if method == "newton":
        return newton_char_poly(atiyah_cocycle(E))
    if method == "split":
        return split_char_poly(E)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    try:
        return newton_char_poly(atiyah_cocycle(E))
    except DivisionObstruction:
        return split_char_poly(E)


def whitney_check(E1: VectorBundle, E2: VectorBundle, method="newton") -> bool:
    """c(E1 + E2, At(E1) + At(E2)) equals c(E1) c(E2) coefficientwise."""
    S = bundle_algebra("direct_sum", E1, E2)
    A = endo_block_sum([atiyah_cocycle(E1).cochain, atiyah_cocycle(E2).cochain], S)
    lhs = newton_char_poly(A) if method == "newton" else char_poly(S, method=method)
    rhs = char_poly(E1, method=method) * char_poly(E2, method=method)
    return lhs.equals(rhs)


# ---------------------------------------------------------------- symbolic checks

def newton_elementary(k: int) -> LaurentPoly:
    """e_k as a polynomial in p_1..p_k over Q: k e_k = sum (-1)^{i-1} e_{k-i} p_i."""
    if k < 0:
        raise ValueError("k must be >= 0")
    n = max(k, 1)
    es = [LaurentPoly.one(QQ, n)]
    for m in range(1, k + 1):
        acc = LaurentPoly.zero(QQ, n)
        for i in range(1, m + 1):
            t = es[m - i] * LaurentPoly.var(QQ, n, i - 1)
            acc = acc + (t if i % 2 else -t)
        es.append(acc.scale(Fraction(1, m)))
    return es[k]


def newton_char_coefficient(k: int) -> LaurentPoly:
    """Coefficient of t^k in det(1 - tA) in terms of power sums: (-1)^k e_k."""
    e = newton_elementary(k)
    return e if k % 2 == 0 else -e


def _leibniz_det(M, one):
    n = len(M)
    total = None
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = one
        for i in range(n):
            term = term * M[i][perm[i]]
        term = -term if inv % 2 else term
        total = term if total is None else total + term
    return total if total is not None else one


def det_minor_oracle(A, k: int, one=1):
    """Coefficient of t^k in det(1 - tA): (-1)^k times the sum of principal k x k minors."""
    n = len(A)
    if k == 0:
        return one
    if k > n:
        return one * 0
    total = None
    for S in combinations(range(n), k):
        sub = [[A[i][j] for j in S] for i in S]
        m = _leibniz_det(sub, one)
        total = m if total is None else total + m
    return -total if k % 2 else total


def matrix_power_sums(A, kmax, one=1):
    n = len(A)
    P = [list(r) for r in A]
    out = []
    for k in range(1, kmax + 1):
        tr = P[0][0]
        for i in range(1, n):
            tr = tr + P[i][i]
        out.append(tr)
        P = [[sum((P[i][t] * A[t][j] for t in range(1, n)), P[i][0] * A[0][j]) for j in range(n)]
             for i in range(n)]
    return out


def newton_from_matrix(A, k: int, one=1):
    """Coefficient of t^k in det(1 - tA) via power sums (entries must allow division by k!)."""
    ps = matrix_power_sums(A, max(k, 1), one)
    cs = [one]
    for m in range(1, k + 1):
        acc = one * 0
        for i in range(1, m + 1):
            acc = acc - cs[m - i] * ps[i - 1]
        cs.append(acc * Fraction(1, m))
    return cs[k]


__all__ = [
    "AtiyahCocycle", "CharPoly", "DivisionObstruction", "FreeComplex", "atiyah_cocycle", "char_poly",
    "det_minor_oracle", "endo_power", "matrix_power_sums", "newton_char_coefficient", "newton_char_poly",
    "newton_elementary", "newton_from_matrix", "power_sum", "pull_to_original_frame", "retrivialize",
    "split_char_poly", "whitney_check",
]
