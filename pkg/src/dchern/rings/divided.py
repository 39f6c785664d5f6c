"""Divided-power series and the small coefficient algebras they run over."""
from __future__ import annotations

from math import comb

from .laurent import LaurentPoly


class PolyAlgebra:
    """Commutative polynomial algebra ``R[a_1..a_n]`` as a coefficient algebra."""

    def __init__(self, ring, nvars, names=None):
        self.ring = ring
        self.nvars = nvars
        self.names = names or [f"a{i + 1}" for i in range(nvars)]
        self.characteristic = ring.characteristic
        self.zero = LaurentPoly.zero(ring, nvars)
        self.one = LaurentPoly.one(ring, nvars)

    def __call__(self, x):
        if isinstance(x, LaurentPoly):
            return x
        return LaurentPoly.const(self.ring, self.nvars, x)

    def gen(self, i):
        return LaurentPoly.var(self.ring, self.nvars, i)

    def gens(self):
        return [self.gen(i) for i in range(self.nvars)]

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def scale_int(self, a, n):
        return a.scale(n)

    def is_zero(self, a):
        return a.is_zero()

    def eq(self, a, b):
        return a == b

    def inv(self, a):
        if not a.is_constant():
            raise ZeroDivisionError("only constants are invertible here")
        return self(self.ring.inv(a.constant_term()))

    def div_int(self, a, k):
        return a.scale(self.ring.inv(self.ring(k)))

    def __eq__(self, other):
        return isinstance(other, PolyAlgebra) and (self.ring, self.nvars) == (other.ring, other.nvars)

    def __hash__(self):
        return hash((self.ring, self.nvars))

    def __repr__(self):
        return f"{self.ring}[{','.join(self.names)}]"


class TruncatedPolyAlgebra:
    """``R[h]/(h^{top+1})``; elements are coefficient tuples of length ``top+1``.

    Used as the coordinate model of the even cohomology ring of P^n.
    """

    def __init__(self, ring, top, name="h"):
        self.ring = ring
        self.top = top
        self.name = name
        self.characteristic = ring.characteristic
        self.zero = (0,) * (top + 1)
        self.one = (ring.one,) + (0,) * top

    def __call__(self, x):
        if isinstance(x, tuple):
            if len(x) != self.top + 1:
                raise ValueError("wrong length")
            return tuple(self.ring(c) for c in x)
        return (self.ring(x),) + (0,) * self.top

    def gen(self, k=1):
        v = [0] * (self.top + 1)
        if k <= self.top:
            v[k] = self.ring.one
        return tuple(v)

    def add(self, a, b):
        return tuple(self.ring(x + y) for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple(self.ring(x - y) for x, y in zip(a, b))

    def neg(self, a):
        return tuple(self.ring(-x) for x in a)

    def mul(self, a, b):
        out = [0] * (self.top + 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                if i + j > self.top:
                    break
                out[i + j] += x * y
        return tuple(self.ring(c) for c in out)

    def scale_int(self, a, n):
        return tuple(self.ring(x * n) for x in a)

    def is_zero(self, a):
        return all(x == 0 for x in a)

    def eq(self, a, b):
        return self.is_zero(self.sub(a, b))

    def inv(self, a):
        if any(x != 0 for x in a[1:]):
            raise ZeroDivisionError("inverse only implemented for constants")
        return self(self.ring.inv(a[0]))

    def __eq__(self, other):
        return isinstance(other, TruncatedPolyAlgebra) and (self.ring, self.top) == (other.ring, other.top)

    def __hash__(self):
        return hash((self.ring, self.top))

    def __repr__(self):
        return f"{self.ring}[{self.name}]/({self.name}^{self.top + 1})"


class DividedPowerSeries:
    """``sum_k a_k t^k/k!`` truncated at order ``N``, coefficients in ``algebra``."""

    __slots__ = ("algebra", "coeffs")

    def __init__(self, algebra, coeffs):
        self.algebra = algebra
        self.coeffs = tuple(algebra(c) for c in coeffs)
        if not self.coeffs:
            raise ValueError("need at least the constant coefficient")

    @property
    def order(self):
        return len(self.coeffs) - 1

    @classmethod
    def one(cls, algebra, order):
        return cls(algebra, [algebra.one] + [algebra.zero] * order)

    @classmethod
    def linear(cls, algebra, a, order):
        """``1 + a t``."""
        return cls(algebra, [algebra.one, a] + [algebra.zero] * (order - 1))

    def __getitem__(self, k):
        return self.coeffs[k]

    def __mul__(self, other):
        return dp_mul(self, other)

    def __eq__(self, other):
        if not isinstance(other, DividedPowerSeries):
            return NotImplemented
        return (self.algebra == other.algebra and self.order == other.order
                and all(self.algebra.eq(a, b) for a, b in zip(self.coeffs, other.coeffs)))

    def __repr__(self):
        return f"DividedPowerSeries({list(self.coeffs)!r})"


def dp_mul(a: DividedPowerSeries, b: DividedPowerSeries) -> DividedPowerSeries:
    """Product in the divided-power basis: ``(t^m/m!)(t^n/n!) = C(m+n, n) t^{m+n}/(m+n)!``."""
    if a.algebra != b.algebra:
        raise ValueError("divided-power series over different coefficient algebras")
    if a.order != b.order:
        raise ValueError(f"truncation mismatch: {a.order} vs {b.order}")
    alg = a.algebra
    out = []
    for k in range(a.order + 1):
        acc = alg.zero
        for i in range(k + 1):
            x, y = a.coeffs[i], b.coeffs[k - i]
            if alg.is_zero(x) or alg.is_zero(y):
                continue
            acc = alg.add(acc, alg.scale_int(alg.mul(x, y), comb(k, i)))
        out.append(acc)
    return DividedPowerSeries(alg, out)


def dp_invert(a: DividedPowerSeries) -> DividedPowerSeries:
    """Two-sided inverse up to truncation; the constant term must be a unit."""
    alg = a.algebra
    try:
        c0 = alg.inv(a.coeffs[0])
    except ZeroDivisionError:
        raise ValueError("constant term is not a unit") from None
    # sum_{i} C(k, i) a_i b_{k-i} = 0 for k >= 1
    b = [c0]
    for k in range(1, a.order + 1):
        acc = alg.zero
        for i in range(1, k + 1):
            if alg.is_zero(a.coeffs[i]):
                continue
            acc = alg.add(acc, alg.scale_int(alg.mul(a.coeffs[i], b[k - i]), comb(k, i)))
        b.append(alg.neg(alg.mul(c0, acc)))
    return DividedPowerSeries(alg, b)
