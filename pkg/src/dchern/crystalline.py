"""Characteristic p: Frobenius pullback, lifts mod p^2 and the obstruction class of a line bundle.

For a line bundle with transitions f_ab over F_p, the Teichmuller lifts
``F_ab = f~_ab^p`` glue to a line bundle on the lift mod p^2 (they do not
depend on the choice of f~).  Its flat connection ``d`` on each chart has
gluing defect ``dlog F_ab = p dlog f~_ab``; dividing by p gives a closed
1-form cocycle over F_p whose class is the obstruction.  The orientation
``alpha_ab = -(1/p) dlog F_ab`` matches ``c_1 = -tr At``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import factorial

from .cech.cochains import CechCochain, Sheaf, unit_cochain
from .cech.cohomology import TotalCochain, class_coordinates, class_equal, hyperplane_cocycle, total_cup
from .cech.scheme import CoveredScheme, VectorBundle
from .charclass import char_poly
from .rings.divided import DividedPowerSeries, dp_mul
from .rings.forms import DifferentialForm
from .rings.laurent import LaurentPoly
from .rings.scalars import PrimeField, Zmod


class CrystallineError(ValueError):
    pass


def _prime(ring):
    if not isinstance(ring, PrimeField):
        raise CrystallineError(f"expected a base F_p, got {ring}")
    return ring.characteristic


# ---------------------------------------------------------------- Frobenius

def frobenius_pullback(E: VectorBundle) -> VectorBundle:
    """F^*E: every transition entry goes through c x^e -> c x^{pe}."""
    p = _prime(E.scheme.ring)
    F = E.map_transitions(lambda x: x.frobenius(p), name=f"F*({E.name})")
    if E.summands:
        F.summands = [frobenius_pullback(S) for S in E.summands]
    return F


def canonical_connection_check(E: VectorBundle, pullback=True) -> bool:
    """True iff d kills every transition entry (of F^*E, or of E itself if ``pullback=False``).

    Then ``d`` on each chart glues to a global flat connection.
    """
    F = frobenius_pullback(E) if pullback else E
    for g in F.transitions().values():
        for row in g:
            for x in row:
                if not DifferentialForm.from_poly(x).d().is_zero():
                    return False
    return True


# ---------------------------------------------------------------- lifts mod p^2

@dataclass(frozen=True)
class LiftedChart:
    index: int
    names: tuple
    ring: object  # Z/p^2
    base: object  # F_p

    def lift(self, f: LaurentPoly) -> LaurentPoly:
        """Lift coefficients via their representatives in [0, p)."""
        return f.map_coefficients(lambda c: int(c), self.ring)

    def reduce(self, f):
        if isinstance(f, DifferentialForm):
            return DifferentialForm(self.base, f.nvars, f.degree,
                                    {J: self.reduce(g) for J, g in f.terms.items()})
        return f.map_coefficients(lambda c: int(c), self.base)


class LiftedScheme:
    """A lift of a covered F_p scheme to Z/p^2, chart by chart."""

    def __init__(self, base: CoveredScheme, lifted: CoveredScheme):
        self.base = base
        self.lifted = lifted
        self.p = _prime(base.ring)
        self.charts = [LiftedChart(c, base.charts[c], lifted.ring, base.ring) for c in range(base.nchart)]
        self.check_reduction()

    def check_reduction(self):
        X, Y = self.base, self.lifted
        for key, imgs in Y.maps.items():
            a = key[0]
            red = [self.charts[a].reduce(f) for f in imgs]
            if tuple(red) != tuple(X.maps[key]):
                raise CrystallineError(f"lifted gluing {key} does not reduce to the original")
            if Y.overlaps[key] != X.overlaps[key]:
                raise CrystallineError(f"lifted overlap {key} differs from the original")

    def perturbed(self, gs) -> "LiftedScheme":
        """Change coordinates on chart a by ``u -> u + p g_a(u)`` (``gs[a]``: one polynomial per variable)."""
        Y = self.lifted
        p = self.p
        ring = Y.ring
        n = Y.dim

        def shift(a, sign):
            return [LaurentPoly.var(ring, n, i) + gs[a][i].scale(sign * p) for i in range(n)]

        maps = {}
        for (a, b), imgs in Y.maps.items():
            back = shift(a, -1)  # old chart-a coordinates in terms of new ones
            new = []
            for j, m in enumerate(imgs):
                v = m.subs(back)
                new.append(v + gs[b][j].subs(list(imgs)).scale(p))
            maps[(a, b)] = new
        lifted = CoveredScheme(ring, Y.charts, maps, {k: set(v) for k, v in Y.overlaps.items()},
                               [set(u) for u in Y.chart_units], name=f"{Y.name}~")
        return LiftedScheme(self.base, lifted)


def lift_scheme(X: CoveredScheme) -> LiftedScheme:
    p = _prime(X.ring)
    R = Zmod(p * p)
    maps = {k: [f.map_coefficients(lambda c: int(c), R) for f in v] for k, v in X.maps.items()}
    Y = CoveredScheme(R, X.charts, maps, {k: set(v) for k, v in X.overlaps.items()},
                      [set(u) for u in X.chart_units], name=f"{X.name}~")
    return LiftedScheme(X, Y)


def teichmuller_transition(f: LaurentPoly, chart: LiftedChart, lift=None) -> LaurentPoly:
    """``f~^p`` in the Z/p^2 chart ring, for any lift ``f~`` of the unit ``f``."""
    p = chart.base.characteristic
    if f.ring != chart.base:
        raise CrystallineError("f does not live over the chart's base field")
    if not f.is_unit():
        raise CrystallineError(f"{f.to_string(chart.names)} is not a unit")
    ft = chart.lift(f) if lift is None else lift
    if chart.reduce(ft) != f:
        raise CrystallineError("the given lift does not reduce to f")
    return ft ** p


def teichmuller_bundle(E: VectorBundle, LX: LiftedScheme) -> VectorBundle:
    """The line bundle on the lift with transitions f~_ab^p (cocycle checked on construction)."""
    if E.rank != 1:
        raise CrystallineError("Teichmuller lifts are only formed for line bundles")
    Y = LX.lifted
    trans = {}
    for (a, b), g in E.transitions().items():
        f = g[0][0]
        # carry f into the lift's chart-b coordinates: identical names, shifted coordinates
        trans[(a, b)] = [[teichmuller_transition(f, LX.charts[b])]]
    return VectorBundle(Y, 1, trans, name=f"{E.name}~")


# ---------------------------------------------------------------- the obstruction class

@dataclass
class ObstructionClass:
    cocycle: CechCochain        # (1, 1), closed forms over F_p
    de_rham: TotalCochain       # its image in total degree 2

    def is_closed(self):
        return all(x.d().is_zero() for v in self.cocycle.values.values() for r in v for x in r)

    def coordinates(self, generator=None):
        X = self.cocycle.scheme
        gen = generator if generator is not None else TotalCochain.from_cech(hyperplane_cocycle(X))
        co = class_coordinates(self.de_rham, [gen])
        return None if co is None else co[0]


def _divide_by_p(form: DifferentialForm, p, base):
    terms = {}
    for J, f in form.terms.items():
        new = {}
        for e, c in f.terms.items():
            c = int(c)
            if c % p:
                raise CrystallineError("p-division of the connection defect is not exact")
            v = base(c // p)
            if v != 0:
                new[e] = v
        terms[J] = LaurentPoly(base, f.nvars, new, True)
    return DifferentialForm(base, form.nvars, form.degree, terms)


def crystal_obstruction_line(E: VectorBundle, lift: LiftedScheme | None = None) -> ObstructionClass:
    if E.rank != 1:
        raise CrystallineError(f"the obstruction is only computed for line bundles (rank {E.rank})")
    X = E.scheme
    p = _prime(X.ring)
    LX = lift if lift is not None else lift_scheme(X)
    if LX.base is not X:
        raise CrystallineError("the lift belongs to a different scheme")
    T = teichmuller_bundle(E, LX)
    vals = {}
    for (a, b), g in T.transitions().items():
        F = g[0][0]
        defect = DifferentialForm.from_poly(F).d() * F.unit_inverse()
        omega = -_divide_by_p(defect, p, X.ring)
        if not omega.d().is_zero():
            raise CrystallineError("obstruction cocycle has a non-closed value")
        vals[(a, b)] = omega
    cocycle = CechCochain(X, 1, Sheaf(1), vals)
    return ObstructionClass(cocycle, TotalCochain.from_cech(cocycle))


def c1_de_rham(E: VectorBundle) -> TotalCochain:
    """First Chern class in total degree 2: ``c_1 = -tr At`` seen in the total complex."""
    return TotalCochain.from_cech(char_poly(E, method="split").coefficient(1))


def obstruction_equals_c1(E: VectorBundle, lift=None) -> bool:
    return class_equal(crystal_obstruction_line(E, lift).de_rham, c1_de_rham(E))


# ---------------------------------------------------------------- divided-power characteristic polynomial

class DeRhamAlgebra:
    """Even de Rham classes of a scheme as a coefficient algebra: ``{degree: TotalCochain}``."""

    def __init__(self, X: CoveredScheme):
        self.scheme = X
        self.ring = X.ring
        self.characteristic = X.ring.characteristic
        self.zero = {}
        self.one = {0: TotalCochain.from_cech(unit_cochain(X))}

    def __call__(self, x):
        if isinstance(x, dict):
            return {k: v for k, v in x.items() if not v.is_zero()}
        if isinstance(x, TotalCochain):
            return {x.degree: x} if not x.is_zero() else {}
        if isinstance(x, CechCochain):
            return self(TotalCochain.from_cech(x))
        return self.scale_int(self.one, x)

    def add(self, a, b):
        out = dict(a)
        for k, v in b.items():
            out[k] = out[k] + v if k in out else v
        return self({k: v for k, v in out.items()})

    def neg(self, a):
        return {k: -v for k, v in a.items()}

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        out = {}
        top = 2 * self.scheme.dim
        for i, x in a.items():
            for j, y in b.items():
                if i + j > top:
                    continue
                v = total_cup(x, y)
                out[i + j] = out[i + j] + v if i + j in out else v
        return self(out)

    def scale_int(self, a, n):
        return self({k: v.scale(self.ring(n)) for k, v in a.items()})

    def is_zero(self, a):
        return all(v.is_zero() for v in a.values())

    def eq(self, a, b):
        d = self.sub(a, b)
        zero_of = lambda k: TotalCochain(self.scheme, k)
        return all(class_equal(v, zero_of(k)) for k, v in d.items())

    def inv(self, a):
        if set(a) - {0}:
            raise ZeroDivisionError("only constants are inverted here")
        raise ZeroDivisionError("inversion of de Rham classes is not needed")

    def __eq__(self, other):
        return isinstance(other, DeRhamAlgebra) and other.scheme is self.scheme

    def __hash__(self):
        return id(self.scheme)

    def __repr__(self):
        return f"H^even_dR({self.scheme.name})"


def dp_char_poly(classes, algebra, N=None) -> DividedPowerSeries:
    """``prod_i (1 - a_i t)`` expanded in the basis t^k/k!.

    Coefficient k equals ``(-1)^k k! e_k(a_1..a_r)``.
    """
    r = len(classes)
    N = r if N is None else N
    if N > r:
        raise ValueError(f"truncation {N} exceeds the number of classes {r}")
    out = DividedPowerSeries.one(algebra, N)
    for a in classes:
        lin = DividedPowerSeries(algebra, [algebra.one, algebra.neg(algebra(a))] + [algebra.zero] * (N - 1))
        out = dp_mul(out, lin)
    return out


def elementary_symmetric(classes, k, algebra):
    """e_k(a_1..a_r) in the coefficient algebra (the split de Rham Chern class up to sign)."""
    acc = algebra.zero
    for S in combinations(range(len(classes)), k):
        t = algebra.one
        for i in S:
            t = algebra.mul(t, algebra(classes[i]))
        acc = algebra.add(acc, t)
    return acc if k else algebra.one


def cris_vs_dr(classes, algebra, N=None):
    """Per k: ``(dp coefficient, (-1)^k k! e_k, k! e_k)``; reports both signed variants."""
    series = dp_char_poly(classes, algebra, N)
    rows = []
    for k in range(series.order + 1):
        e = elementary_symmetric(classes, k, algebra)
        pos = algebra.scale_int(e, factorial(k))
        signed = algebra.neg(pos) if k % 2 else pos
        rows.append((series[k], signed, pos))
    return rows


__all__ = [
    "CrystallineError", "DeRhamAlgebra", "LiftedChart", "LiftedScheme", "ObstructionClass", "c1_de_rham",
    "canonical_connection_check", "cris_vs_dr", "crystal_obstruction_line", "dp_char_poly",
    "elementary_symmetric", "frobenius_pullback", "lift_scheme", "obstruction_equals_c1",
    "teichmuller_bundle", "teichmuller_transition",
]
