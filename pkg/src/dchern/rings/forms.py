"""Algebraic differential forms on a Laurent chart."""
from __future__ import annotations

from fractions import Fraction

from .laurent import LaurentPoly


def _merge_sign(a, b):
    """Sign and sorted union of two increasing index tuples, or (0, None)."""
    if set(a) & set(b):
        return 0, None
    seq = list(a) + list(b)
    # count inversions between a and b
    inv = 0
    for x in a:
        for y in b:
            if x > y:
                inv += 1
    return (-1 if inv % 2 else 1), tuple(sorted(seq))


class DifferentialForm:
    """Homogeneous form ``sum f_I dx_I`` with increasing index tuples ``I``."""

    __slots__ = ("ring", "nvars", "degree", "terms")

    def __init__(self, ring, nvars, degree, terms=None):
        self.ring = ring
        self.nvars = nvars
        self.degree = degree
        out = {}
        for idx, f in (terms or {}).items():
            idx = tuple(idx)
            if len(idx) != degree or any(a >= b for a, b in zip(idx, idx[1:])):
                raise ValueError(f"bad index tuple {idx} for a {degree}-form")
            if idx and (idx[0] < 0 or idx[-1] >= nvars):
                raise ValueError(f"index tuple {idx} out of range")
            if f.nvars != nvars:
                raise ValueError("chart dimension mismatch")
            if not f.is_zero():
                out[idx] = f
        self.terms = out

    @classmethod
    def zero(cls, ring, nvars, degree):
        return cls(ring, nvars, degree)

    @classmethod
    def from_poly(cls, f: LaurentPoly):
        return cls(f.ring, f.nvars, 0, {(): f})

    @classmethod
    def basis(cls, ring, nvars, idx):
        """The form ``dx_{i1} ^ ... ^ dx_{iq}``."""
        return cls(ring, nvars, len(idx), {tuple(idx): LaurentPoly.one(ring, nvars)})

    def _new(self, degree, terms):
        f = DifferentialForm.__new__(DifferentialForm)
        f.ring, f.nvars, f.degree = self.ring, self.nvars, degree
        f.terms = {k: v for k, v in terms.items() if not v.is_zero()}
        return f

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def coefficient(self, idx):
        return self.terms.get(tuple(idx), LaurentPoly.zero(self.ring, self.nvars))

    def _check(self, other):
        if not isinstance(other, DifferentialForm):
            raise TypeError("expected a DifferentialForm")
        if other.nvars != self.nvars:
            raise ValueError("chart dimension mismatch")

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._check(other)
        if other.degree != self.degree:
            if other.is_zero():
                return self
            if self.is_zero():
                return other
            raise ValueError("cannot add forms of different degree")
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return self._new(self.degree, out)

    __radd__ = __add__

    def __neg__(self):
        return self._new(self.degree, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        """Multiply by a function (LaurentPoly) or scalar."""
        if isinstance(other, (int, Fraction)):
            return self._new(self.degree, {k: v.scale(other) for k, v in self.terms.items()})
        if isinstance(other, LaurentPoly):
            if other.is_zero():
                return self._new(self.degree, {})
            return self._new(self.degree, {k: v * other for k, v in self.terms.items()})
        if isinstance(other, DifferentialForm):
            return self.wedge(other)
        return NotImplemented

    __rmul__ = __mul__

    def wedge(self, other):
        self._check(other)
        out: dict = {}
        for i, f in self.terms.items():
            for j, g in other.terms.items():
                s, k = _merge_sign(i, j)
                if s == 0:
                    continue
                v = f * g
                if s < 0:
                    v = -v
                out[k] = out[k] + v if k in out else v
        return self._new(self.degree + other.degree, out)

    __xor__ = wedge

    def d(self):
        n = self.nvars
        out: dict = {}
        for idx, f in self.terms.items():
            for i in range(n):
                if i in idx:
                    continue
                df = f.derivative(i)
                if df.is_zero():
                    continue
                s, k = _merge_sign((i,), idx)
                v = df if s > 0 else -df
                out[k] = out[k] + v if k in out else v
        return self._new(self.degree + 1, out)

    def pullback(self, images, dimages):
        """Pull back along a chart map: ``x_i -> images[i]``.

        ``dimages[i]`` must be the 1-form ``d(images[i])`` on the target chart.
        """
        target = images[0] if images else None
        if target is None:
            return self
        tn = target.nvars
        total = DifferentialForm.zero(target.ring, tn, self.degree)
        for idx, f in self.terms.items():
            piece = DifferentialForm.from_poly(f.subs(images))
            for i in idx:
                piece = piece.wedge(dimages[i])
            total = total + piece
        return total

    def map_coefficients(self, fn, ring):
        return DifferentialForm(ring, self.nvars, self.degree,
                                {k: v.map_coefficients(fn, ring) for k, v in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return self.is_zero()
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return self.nvars == other.nvars
        return self.nvars == other.nvars and self.degree == other.degree and self.terms == other.terms

    def __hash__(self):
        return hash((self.degree, frozenset(self.terms.items())))

    def to_string(self, names=None):
        if names is None:
            names = [f"x{i}" for i in range(self.nvars)]
        if not self.terms:
            return "0"
        parts = []
        for idx, f in sorted(self.terms.items()):
            dx = "^".join(f"d{names[i]}" for i in idx)
            coef = f.to_string(names)
            if not dx:
                parts.append(coef)
            elif coef == "1":
                parts.append(dx)
            else:
                parts.append(f"({coef})*{dx}")
        return " + ".join(parts)

    def __repr__(self):
        return f"DifferentialForm[{self.degree}]({self.to_string()})"


def as_form(u):
    if isinstance(u, DifferentialForm):
        return u
    if isinstance(u, LaurentPoly):
        return DifferentialForm.from_poly(u)
    raise TypeError(f"cannot view {u!r} as a differential form")


def form_wedge(u, v):
    u, v = as_form(u), as_form(v)
    if u.nvars != v.nvars:
        raise ValueError("chart dimension mismatch")
    return u.wedge(v)


def form_d(u):
    return as_form(u).d()


def dlog(f: LaurentPoly) -> DifferentialForm:
    """``f^{-1} df`` for a unit ``f``."""
    return form_d(f) * f.unit_inverse()
