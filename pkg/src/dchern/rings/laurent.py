"""Laurent polynomials with exact coefficients."""
from __future__ import annotations

import re
from fractions import Fraction

from .scalars import Ring

EXPONENT_BOUND = 2**31 - 1


class ExponentOverflow(OverflowError):
    pass


def _check_exponents(e):
    for x in e:
        if x > EXPONENT_BOUND or x < -EXPONENT_BOUND:
            raise ExponentOverflow(f"Laurent exponent {x} out of range")


class LaurentPoly:
    """Immutable element of ``R[x_1^{+-1}, ..., x_n^{+-1}]``.

    ``terms`` maps exponent tuples to nonzero coefficients.  Equality and
    hashing are structural.
    """

    __slots__ = ("ring", "nvars", "terms", "_hash")

    def __init__(self, ring: Ring, nvars: int, terms=None, normalized=False):
        self.ring = ring
        self.nvars = nvars
        if terms is None:
            terms = {}
        elif not normalized:
            clean = {}
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != nvars:
                    raise ValueError(f"exponent {e} has wrong length for {nvars} variables")
                c = ring(c)
                if c != 0:
                    clean[e] = ring(clean.get(e, 0) + c) if e in clean else c
                    if clean[e] == 0:
                        del clean[e]
            terms = clean
        self.terms = terms
        self._hash = None

    # constructors
    @classmethod
    def zero(cls, ring, nvars):
        return cls(ring, nvars, {}, True)

    @classmethod
    def const(cls, ring, nvars, c):
        c = ring(c)
        return cls(ring, nvars, {(0,) * nvars: c} if c != 0 else {}, True)

    @classmethod
    def one(cls, ring, nvars):
        return cls.const(ring, nvars, 1)

    @classmethod
    def var(cls, ring, nvars, i, power=1):
        e = [0] * nvars
        e[i] = power
        return cls(ring, nvars, {tuple(e): ring.one}, True)

    @classmethod
    def monomial(cls, ring, exps, c=1):
        exps = tuple(exps)
        _check_exponents(exps)
        c = ring(c)
        return cls(ring, len(exps), {exps: c} if c != 0 else {}, True)

    def _new(self, terms):
        return LaurentPoly(self.ring, self.nvars, terms, True)

    def _coerce(self, other):
        if isinstance(other, LaurentPoly):
            if other.nvars != self.nvars or other.ring != self.ring:
                raise ValueError("Laurent polynomials over different rings")
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentPoly.const(self.ring, self.nvars, other)
        return NotImplemented

    # predicates
    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_monomial(self):
        return len(self.terms) == 1

    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and (0,) * self.nvars in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, 0)

    def min_exponents(self):
        if not self.terms:
            return (0,) * self.nvars
        return tuple(min(e[i] for e in self.terms) for i in range(self.nvars))

    def sorted_terms(self):
        return sorted(self.terms.items())

    # arithmetic
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        ring = self.ring
        out = dict(self.terms)
        for e, c in other.terms.items():
            if e in out:
                s = ring(out[e] + c)
                if s == 0:
                    del out[e]
                else:
                    out[e] = s
            else:
                out[e] = c
        return self._new(out)

    __radd__ = __add__

    def __neg__(self):
        ring = self.ring
        return self._new({e: ring(-c) for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        ring = self.ring
        c = ring(c)
        if c == 0:
            return self._new({})
        out = {}
        for e, a in self.terms.items():
            v = ring(a * c)
            if v != 0:
                out[e] = v
        return self._new(out)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        ring = self.ring
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                if e in out:
                    out[e] = out[e] + c1 * c2
                else:
                    out[e] = c1 * c2
        res = {}
        for e, c in out.items():
            c = ring(c)
            if c != 0:
                res[e] = c
        return self._new(res)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.unit_inverse() ** (-k)
        if self.is_monomial():
            (e, c), = self.terms.items()
            e = tuple(x * k for x in e)
            _check_exponents(e)
            return LaurentPoly.monomial(self.ring, e, pow(c, k) if isinstance(c, int) else c**k)
        result = LaurentPoly.one(self.ring, self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def unit_inverse(self):
        """Inverse of a unit: a monomial with unit coefficient plus a nilpotent part."""
        ring = self.ring
        lead = [(e, c) for e, c in self.terms.items() if not ring.is_nilpotent(c)]
        if len(lead) != 1:
            raise ZeroDivisionError(f"{self} is not a unit")
        e0, c0 = lead[0]
        try:
            ci = ring.inv(c0)
        except ZeroDivisionError:
            raise ZeroDivisionError(f"{self} is not a unit") from None
        minv = LaurentPoly.monomial(ring, tuple(-x for x in e0), ci)
        rest = self - LaurentPoly.monomial(ring, e0, c0)
        if rest.is_zero():
            return minv
        # u = m (1 + n), n nilpotent
        n = rest * minv
        acc = LaurentPoly.one(ring, self.nvars)
        term = acc
        for _ in range(64):
            term = -(term * n)
            if term.is_zero():
                return acc * minv
            acc = acc + term
        raise ZeroDivisionError(f"{self}: nilpotent part did not vanish")

    def is_unit(self):
        try:
            self.unit_inverse()
        except ZeroDivisionError:
            return False
        return True

    def __truediv__(self, other):
        if isinstance(other, LaurentPoly):
            return self * other.unit_inverse()
        return self.scale(self.ring.inv(self.ring(other)))

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == LaurentPoly.const(self.ring, self.nvars, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    # calculus and ring maps
    def derivative(self, i):
        ring = self.ring
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k == 0:
                continue
            v = ring(c * k)
            if v != 0:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = v
        return self._new(out)

    def subs(self, images):
        """Ring map sending variable ``i`` to ``images[i]`` (all in one target ring).

        Negative exponents require the corresponding image to be a unit.
        """
        if len(images) != self.nvars:
            raise ValueError("wrong number of images")
        if not images:
            return self
        target = images[0]
        ring = target.ring
        if all(len(im.terms) == 1 for im in images):
            mons = [next(iter(im.terms.items())) for im in images]
            n = target.nvars
            out: dict = {}
            for e, c in self.terms.items():
                ne = [0] * n
                coef = c
                for k, (me, mc) in zip(e, mons):
                    if k:
                        for j in range(n):
                            ne[j] += k * me[j]
                        if mc != 1:
                            coef = coef * (mc**k if k > 0 else ring.inv(mc) ** (-k))
                ne = tuple(ne)
                out[ne] = out.get(ne, 0) + coef
            return LaurentPoly(ring, n, out)
        cache: dict = {}

        def power(i, k):
            key = (i, k)
            if key not in cache:
                cache[key] = images[i] ** k
            return cache[key]

        total = LaurentPoly.zero(ring, target.nvars)
        for e, c in self.terms.items():
            t = LaurentPoly.const(ring, target.nvars, ring(c))
            for i, k in enumerate(e):
                if k:
                    t = t * power(i, k)
            total = total + t
        return total

    def map_coefficients(self, fn, ring):
        return LaurentPoly(ring, self.nvars, {e: fn(c) for e, c in self.terms.items()})

    def frobenius(self, p):
        """Absolute Frobenius over F_p: c x^e -> c x^{pe} (c^p = c in F_p)."""
        ring = self.ring
        out = {}
        for e, c in self.terms.items():
            ne = tuple(p * x for x in e)
            _check_exponents(ne)
            out[ne] = ring(pow(c, p))
        return self._new(out)

    # display
    def to_string(self, names=None):
        if names is None:
            names = [f"x{i}" for i in range(self.nvars)]
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mon = []
            for n, k in zip(names, e):
                if k == 1:
                    mon.append(n)
                elif k:
                    mon.append(f"{n}^{k}")
            s = "*".join(mon)
            if not s:
                parts.append(str(c))
            elif c == 1:
                parts.append(s)
            elif c == -1:
                parts.append("-" + s)
            else:
                parts.append(f"{c}*{s}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"LaurentPoly({self.to_string()})"

    __str__ = to_string


_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(\^|\*\*)|(.))")


def parse_laurent(text: str, names, ring: Ring) -> LaurentPoly:
    """Parse strings like ``"3*x^-1*y^2 - 1"`` over the given variable names."""
    names = list(names)
    index = {n: i for i, n in enumerate(names)}
    nv = len(names)
    tokens = []
    for m in _TOKEN.finditer(text):
        num, ident, powtok, other = m.groups()
        if num:
            tokens.append(("num", num))
        elif ident:
            tokens.append(("id", ident))
        elif powtok:
            tokens.append(("op", "^"))
        elif other and other.strip():
            tokens.append(("op", other))
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else (None, None)

    def take(kind=None, val=None):
        nonlocal pos
        t = peek()
        if t[0] is None or (kind and t[0] != kind) or (val and t[1] != val):
            raise ValueError(f"parse error in {text!r} at token {pos}: {t[1]!r}")
        pos += 1
        return t

    def expr():
        sign = 1
        if peek() == ("op", "-"):
            take()
            sign = -1
        elif peek() == ("op", "+"):
            take()
        acc = term() * sign
        while peek() in (("op", "+"), ("op", "-")):
            op = take()[1]
            t = term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term():
        acc = factor()
        while peek() == ("op", "*"):
            take()
            acc = acc * factor()
        return acc

    def exponent():
        sign = 1
        if peek() == ("op", "-"):
            take()
            sign = -1
        elif peek() == ("op", "("):
            take()
            k = exponent()
            take("op", ")")
            return sign * k
        return sign * int(take("num")[1])

    def factor():
        kind, val = peek()
        if kind == "num":
            take()
            base = LaurentPoly.const(ring, nv, Fraction(val))
        elif kind == "id":
            take()
            if val not in index:
                raise ValueError(f"unknown variable {val!r} in {text!r}")
            base = LaurentPoly.var(ring, nv, index[val])
        elif (kind, val) == ("op", "("):
            take()
            base = expr()
            take("op", ")")
        elif (kind, val) == ("op", "-"):
            take()
            return -factor()
        else:
            raise ValueError(f"parse error in {text!r}: unexpected {val!r}")
        if peek() == ("op", "^"):
            take()
            base = base ** exponent()
        return base

    result = expr()
    if pos != len(tokens):
        raise ValueError(f"trailing input in {text!r}")
    return result
