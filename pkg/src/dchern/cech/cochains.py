"""Cech cochains with values in (matrices of) differential forms.

A value on the increasing tuple ``(a_0, ..., a_q)`` is a matrix of forms in
the coordinates of the last chart ``a_q``; for bundle-valued shapes it is
written in that chart's frame.  Shapes:

* ``scalar``: 1 x 1, plain forms;
* ``vector``: 1 x r, sections ``sum_i f_i e_i`` of ``Omega^w (x) E``;
* ``endo``:   r x r, forms with values in ``End E``.

Moving a value from chart b to chart c rewrites the coordinates and changes
the frame: ``v -> v g_bc`` for vectors and ``M -> g_bc^{-1} M g_bc`` for
endomorphisms.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..rings.forms import DifferentialForm
from ..rings.laurent import LaurentPoly
from . import lmatrix
from .scheme import CoveredScheme, SchemeError, VectorBundle

KINDS = ("scalar", "vector", "endo")


class CochainError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Sheaf:
    """``Omega^w``, optionally tensored with a bundle (``vector``) or its endomorphisms."""

    form_degree: int = 0
    bundle: VectorBundle | None = None
    kind: str = "scalar"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown coefficient kind {self.kind!r}")
        if (self.kind == "scalar") != (self.bundle is None):
            raise ValueError("scalar sheaves carry no bundle, the others need one")

    @property
    def shape(self):
        if self.kind == "scalar":
            return (1, 1)
        r = self.bundle.rank
        return (1, r) if self.kind == "vector" else (r, r)

    def same_as(self, other):
        return (self.form_degree == other.form_degree and self.kind == other.kind
                and self.bundle is other.bundle)

    def with_degree(self, w):
        return Sheaf(w, self.bundle, self.kind)

    def __repr__(self):
        base = f"Omega^{self.form_degree}"
        if self.kind == "vector":
            return f"{base} (x) {self.bundle.name}"
        if self.kind == "endo":
            return f"{base} (x) End({self.bundle.name})"
        return base


def forms(w=0):
    return Sheaf(w)


def twisted(bundle, w=0):
    return Sheaf(w, bundle, "vector")


def endomorphisms(bundle, w=0):
    return Sheaf(w, bundle, "endo")


def _as_form(x, ring, nvars, w):
    if isinstance(x, DifferentialForm):
        return x
    if isinstance(x, LaurentPoly):
        if w != 0:
            raise CochainError("a function was given where a form of positive degree is needed")
        return DifferentialForm.from_poly(x)
    if isinstance(x, int) and x == 0:
        return DifferentialForm.zero(ring, nvars, w)
    if isinstance(x, int):
        return DifferentialForm.from_poly(LaurentPoly.const(ring, nvars, x))
    raise TypeError(f"cannot use {type(x).__name__} as a cochain value")


class CechCochain:
    def __init__(self, scheme: CoveredScheme, q: int, sheaf: Sheaf, values=None, check=True):
        self.scheme = scheme
        self.q = q
        self.sheaf = sheaf
        X = scheme
        rows, cols = sheaf.shape
        w = sheaf.form_degree
        clean = {}
        for tup, val in (values or {}).items():
            tup = tuple(tup)
            if len(tup) != q + 1 or any(a >= b for a, b in zip(tup, tup[1:])):
                raise CochainError(f"{tup} is not an increasing {q + 1}-tuple of charts")
            if tup[-1] >= X.nchart:
                raise CochainError(f"chart index out of range in {tup}")
            if not isinstance(val, (list, tuple)):
                val = [[val]]
            if len(val) != rows or any(len(r) != cols for r in val):
                raise CochainError(f"value on {tup} has the wrong shape, expected {rows}x{cols}")
            mat = tuple(tuple(_as_form(x, X.ring, X.dim, w) for x in r) for r in val)
            if all(x.is_zero() for r in mat for x in r):
                continue
            if check:
                for r in mat:
                    for x in r:
                        if not x.is_zero() and x.degree != w:
                            raise CochainError(f"value on {tup} has form degree {x.degree}, expected {w}")
                        if not X.expressible(x, tup, tup[-1]):
                            raise CochainError(f"value on {tup} is not defined on that overlap")
            clean[tup] = mat
        self.values = clean

    # ---------------------------------------------------------------- basics
    @property
    def w(self):
        return self.sheaf.form_degree

    @property
    def bidegree(self):
        return (self.q, self.w)

    def zero_entry(self):
        return DifferentialForm.zero(self.scheme.ring, self.scheme.dim, self.w)

    def value(self, tup):
        tup = tuple(tup)
        if tup in self.values:
            return self.values[tup]
        rows, cols = self.sheaf.shape
        z = self.zero_entry()
        return tuple(tuple(z for _ in range(cols)) for _ in range(rows))

    def is_zero(self):
        return not self.values

    def _compatible(self, other):
        if not isinstance(other, CechCochain):
            raise TypeError("expected a CechCochain")
        if other.scheme is not self.scheme or other.q != self.q or not other.sheaf.same_as(self.sheaf):
            raise CochainError("cochains of different degree or coefficients")

    def _new(self, values, sheaf=None, q=None):
        return CechCochain(self.scheme, self.q if q is None else q, sheaf or self.sheaf, values, check=False)

    def __add__(self, other):
        self._compatible(other)
        out = dict(self.values)
        for t, v in other.values.items():
            out[t] = _madd(out[t], v) if t in out else v
        return self._new(out)

    def __neg__(self):
        return self._new({t: _mneg(v) for t, v in self.values.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return self._new({t: tuple(tuple(x * c for x in r) for r in v) for t, v in self.values.items()})

    def __eq__(self, other):
        if not isinstance(other, CechCochain):
            return NotImplemented
        try:
            return (self - other).is_zero()
        except CochainError:
            return False

    __hash__ = None

    def __repr__(self):
        return f"CechCochain(q={self.q}, {self.sheaf}, {len(self.values)} nonzero tuples)"

    def map_values(self, fn, sheaf=None):
        return self._new({t: fn(t, v) for t, v in self.values.items()}, sheaf=sheaf)

    def d(self):
        """Exterior derivative of every entry (only meaningful for scalar coefficients)."""
        if self.sheaf.kind != "scalar":
            raise CochainError("d is only defined on scalar-valued cochains")
        return self._new({t: tuple(tuple(x.d() for x in r) for r in v) for t, v in self.values.items()},
                         sheaf=self.sheaf.with_degree(self.w + 1))

    def describe(self):
        X = self.scheme
        lines = []
        for t, v in sorted(self.values.items()):
            names = X.charts[t[-1]]
            body = "; ".join(", ".join(x.to_string(names) for x in r) for r in v)
            lines.append(f"{t}: {body}")
        return "\n".join(lines) or "0"


def _madd(a, b):
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def _mneg(a):
    return tuple(tuple(-x for x in r) for r in a)


# ---------------------------------------------------------------- transport

def transport(value, sheaf: Sheaf, scheme: CoveredScheme, src, dst):
    """Rewrite a value from chart src (and its frame) into chart dst."""
    if src == dst:
        return value
    moved = [[scheme.move(x, src, dst) for x in r] for r in value]
    if sheaf.kind == "scalar":
        return tuple(tuple(r) for r in moved)
    E = sheaf.bundle
    g = E.g(src, dst)
    if sheaf.kind == "vector":
        out = _form_mat_mul(moved, g)
    else:
        ginv = lmatrix.inverse(g)
        out = _func_form_mul(ginv, _form_mat_mul(moved, g))
    return tuple(tuple(r) for r in out)


def _form_mat_mul(M, g):
    """(matrix of forms) * (matrix of functions)."""
    rows, inner, cols = len(M), len(g), len(g[0])
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = None
            for t in range(inner):
                if g[t][j].is_zero() or M[i][t].is_zero():
                    continue
                v = M[i][t] * g[t][j]
                acc = v if acc is None else acc + v
            row.append(acc if acc is not None else M[i][0] * 0)
        out.append(row)
    return out


def _func_form_mul(g, M):
    rows, inner, cols = len(g), len(M), len(M[0])
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = None
            for t in range(inner):
                if g[i][t].is_zero() or M[t][j].is_zero():
                    continue
                v = M[t][j] * g[i][t]
                acc = v if acc is None else acc + v
            row.append(acc if acc is not None else M[0][j] * 0)
        out.append(row)
    return out


def _form_form_mul(A, B):
    """Matrix product with wedge of entries; 1x1 factors act as scalars."""
    if len(A) == 1 and len(A[0]) == 1 and not (len(B) == 1 and len(B[0]) == 1):
        a = A[0][0]
        return [[a.wedge(y) for y in r] for r in B]
    if len(B) == 1 and len(B[0]) == 1 and not (len(A) == 1 and len(A[0]) == 1):
        b = B[0][0]
        return [[x.wedge(b) for x in r] for r in A]
    if len(A[0]) != len(B):
        raise CochainError("incompatible value shapes for the cup product")
    out = []
    for i in range(len(A)):
        row = []
        for j in range(len(B[0])):
            acc = None
            for t in range(len(B)):
                if A[i][t].is_zero() or B[t][j].is_zero():
                    continue
                v = A[i][t].wedge(B[t][j])
                acc = v if acc is None else acc + v
            if acc is None:
                acc = DifferentialForm.zero(A[0][0].ring, A[0][0].nvars, A[0][0].degree + B[0][0].degree)
            row.append(acc)
        out.append(row)
    return out


# ---------------------------------------------------------------- differential and cup

def cech_differential(c: CechCochain) -> CechCochain:
    """``(dc)_{a_0..a_{q+1}} = sum_i (-1)^i c_{a_0..^a_i..a_{q+1}}`` in the last chart."""
    X = c.scheme
    out = {}
    for tup in X.tuples(c.q + 1):
        acc = None
        last = tup[-1]
        for i in range(len(tup)):
            face = tup[:i] + tup[i + 1:]
            if face not in c.values:
                continue
            v = c.values[face]
            if i == len(tup) - 1:
                v = transport(v, c.sheaf, X, face[-1], last)
            if i % 2:
                v = _mneg(v)
            acc = v if acc is None else _madd(acc, v)
        if acc is not None:
            out[tup] = acc
    return CechCochain(X, c.q + 1, c.sheaf, out, check=False)


def _cup_sheaf(sa: Sheaf, sb: Sheaf, w):
    ka, kb = sa.kind, sb.kind
    if ka == "scalar":
        return Sheaf(w, sb.bundle, kb)
    if kb == "scalar":
        return Sheaf(w, sa.bundle, ka)
    if sa.bundle is not sb.bundle:
        raise CochainError("cup product of values in different bundles")
    if kb == "endo" and ka in ("endo", "vector"):
        return Sheaf(w, sa.bundle, ka)
    raise CochainError(f"no cup product for {ka} x {kb} values")


def cup(a: CechCochain, b: CechCochain) -> CechCochain:
    """Front-face/back-face product with sign ``(-1)^(w_a * q_b)``.

    ``(a u b)_{a_0..a_{p+q}} = s * t(a_{a_0..a_p}) ^ b_{a_p..a_{p+q}}`` where t
    moves a's value to the last chart (and frame).
    """
    if a.scheme is not b.scheme:
        raise CochainError("cochains on different schemes")
    X = a.scheme
    p, q = a.q, b.q
    w = a.w + b.w
    sheaf = _cup_sheaf(a.sheaf, b.sheaf, w)
    sign = -1 if (a.w * q) % 2 else 1
    out = {}
    for tup in X.tuples(p + q):
        front, back = tup[:p + 1], tup[p:]
        if front not in a.values or back not in b.values:
            continue
        va = transport(a.values[front], a.sheaf, X, front[-1], tup[-1])
        prod = _form_form_mul(va, b.values[back])
        if sign < 0:
            prod = [[-x for x in r] for r in prod]
        out[tup] = prod
    return CechCochain(X, p + q, sheaf, out, check=False)


def unit_cochain(X: CoveredScheme) -> CechCochain:
    one = LaurentPoly.one(X.ring, X.dim)
    return CechCochain(X, 0, Sheaf(0), {(a,): one for a in range(X.nchart)})


def trace(c: CechCochain) -> CechCochain:
    if c.sheaf.kind != "endo":
        raise CochainError("trace needs End(E)-valued cochains")

    def tr(_t, v):
        acc = v[0][0]
        for i in range(1, len(v)):
            acc = acc + v[i][i]
        return ((acc,),)

    return CechCochain(c.scheme, c.q, Sheaf(c.w), {t: tr(t, v) for t, v in c.values.items()}, check=False)


def endo_block_sum(blocks, bundle) -> CechCochain:
    """Block-diagonal End(E_1 + ... + E_k) cochain from End(E_i) cochains."""
    X = bundle.scheme
    q, w = blocks[0].q, blocks[0].w
    r = bundle.rank
    if sum(b.sheaf.bundle.rank for b in blocks) != r:
        raise CochainError("block ranks do not add up")
    out = {}
    zero = DifferentialForm.zero(X.ring, X.dim, w)
    for tup in X.tuples(q):
        if not any(tup in b.values for b in blocks):
            continue
        m = [[zero] * r for _ in range(r)]
        off = 0
        for b in blocks:
            v = b.value(tup)
            for i, row in enumerate(v):
                for j, x in enumerate(row):
                    m[off + i][off + j] = x
            off += b.sheaf.bundle.rank
        out[tup] = m
    return CechCochain(X, q, Sheaf(w, bundle, "endo"), out, check=False)


def cochain_from_dict(X, q, sheaf, data: dict) -> CechCochain:
    """Cochain from ``{tuple: value}`` where values may be strings in the last chart's variables."""
    vals = {}
    for tup, v in data.items():
        tup = tuple(tup)
        if isinstance(v, str):
            v = X.parse(v, tup[-1])
        vals[tup] = v
    return CechCochain(X, q, sheaf, vals)


__all__ = [
    "CechCochain", "CochainError", "KINDS", "SchemeError", "Sheaf", "cech_differential",
    "cochain_from_dict", "cup", "endo_block_sum", "endomorphisms", "forms", "trace", "transport",
    "twisted", "unit_cochain",
]
