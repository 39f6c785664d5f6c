"""Exact base rings: ZZ, QQ, GF(p) and Z/nZ.

Elements are plain Python numbers (``int`` or ``Fraction``) normalized by
the ring object that owns them; there is no per-scalar wrapper.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd


class Ring:
    """Common interface for the exact scalar rings.

    The same interface (``zero``, ``one``, ``add``, ``mul``, ``neg``,
    ``scale_int``, ``is_zero``) is what :class:`DividedPowerSeries` and the
    matrix routines expect of a coefficient algebra.
    """

    name = "?"
    characteristic = 0
    is_field = False
    zero = 0
    one = 1

    def __call__(self, x):
        raise NotImplementedError

    def add(self, a, b):
        return self(a + b)

    def sub(self, a, b):
        return self(a - b)

    def mul(self, a, b):
        return self(a * b)

    def neg(self, a):
        return self(-a)

    def scale_int(self, a, n):
        return self(a * n)

    def is_zero(self, a):
        return a == 0

    def eq(self, a, b):
        return self(a - b) == 0

    def inv(self, a):
        raise NotImplementedError

    def is_unit(self, a):
        try:
            self.inv(a)
        except ZeroDivisionError:
            return False
        return True

    def is_nilpotent(self, a):
        return self.is_zero(a)

    def div_int(self, a, k):
        """``a / k`` for an integer ``k``; raises if ``k`` is not invertible."""
        return self.mul(a, self.inv(self(k)))

    def __repr__(self):
        return self.name

    def __eq__(self, other):
        return isinstance(other, Ring) and self.name == other.name

    def __hash__(self):
        return hash(self.name)


class IntegerRing(Ring):
    name = "Z"

    def __call__(self, x):
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise ValueError(f"{x} is not an integer")
            return x.numerator
        return int(x)

    def inv(self, a):
        if a in (1, -1):
            return a
        raise ZeroDivisionError(f"{a} is not a unit in Z")


class RationalField(Ring):
    name = "Q"
    is_field = True

    def __call__(self, x):
        if isinstance(x, int):
            return x
        x = Fraction(x)
        return x.numerator if x.denominator == 1 else x

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("division by zero in Q")
        return self(Fraction(1) / a)


class IntegersMod(Ring):
    """Z/nZ with canonical representatives in [0, n)."""

    def __init__(self, n):
        if n < 2:
            raise ValueError("modulus must be >= 2")
        self.n = n
        self.characteristic = n
        self.name = f"Z/{n}"

    def __call__(self, x):
        if isinstance(x, Fraction):
            return (x.numerator * pow(x.denominator, -1, self.n)) % self.n
        return int(x) % self.n

    def inv(self, a):
        a %= self.n
        if gcd(a, self.n) != 1:
            raise ZeroDivisionError(f"{a} is not a unit mod {self.n}")
        return pow(a, -1, self.n)

    def is_nilpotent(self, a):
        rad = _radical(self.n)
        return a % rad == 0


class PrimeField(IntegersMod):
    is_field = True

    def __init__(self, p):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        super().__init__(p)
        self.p = p
        self.name = f"F{p}"


def is_prime(n):
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _radical(n):
    r, m, f = 1, n, 2
    while f * f <= m:
        if m % f == 0:
            r *= f
            while m % f == 0:
                m //= f
        f += 1
    return r * m if m > 1 else r


ZZ = IntegerRing()
QQ = RationalField()
_FIELDS: dict[int, PrimeField] = {}


def GF(p) -> PrimeField:
    if p not in _FIELDS:
        _FIELDS[p] = PrimeField(p)
    return _FIELDS[p]


def Zmod(n) -> IntegersMod:
    if is_prime(n):
        return GF(n)
    return IntegersMod(n)


def make_ring(spec) -> Ring:
    """Parse a base-ring selector: ``"Z"``, ``"Q"``, ``"Fp:5"``, ``"F5"`` or ``{"Fp": 5}``."""
    if isinstance(spec, Ring):
        return spec
    if isinstance(spec, dict):
        if set(spec) != {"Fp"}:
            raise ValueError(f"bad base ring {spec!r}")
        return GF(int(spec["Fp"]))
    s = str(spec).strip()
    if s in ("Z", "ZZ"):
        return ZZ
    if s in ("Q", "QQ"):
        return QQ
    for prefix in ("Fp:", "GF", "F"):
        if s.startswith(prefix) and s[len(prefix):].isdigit():
            return GF(int(s[len(prefix):]))
    raise ValueError(f"bad base ring {spec!r}")
