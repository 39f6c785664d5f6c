"""Seeded property suites behind ``dchern selftest`` and the acceptance tests."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import comb

from .cech import (class_equal, cech_cohomology, de_rham_cohomology, line_bundle, parse_bundle,
                   projective_space, twisted)
from .charclass import (atiyah_cocycle, char_poly, pull_to_original_frame, retrivialize, whitney_check)
from .crystalline import c1_de_rham, cris_vs_dr, crystal_obstruction_line, lift_scheme, teichmuller_transition
from .derived import DECALAGE_KINDS, verify_decalage
from .homcore import ChainComplex, Matrix, dold_kan_gamma, homology, kernel_basis, normalized_chains
from .rings import GF, QQ, ZZ, LaurentPoly, PolyAlgebra


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def as_dict(self):
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class SuiteReport:
    suite: str
    seed: int
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def add(self, name, ok, detail=""):
        self.checks.append(Check(name, bool(ok), detail))

    def check(self, name, fn, *args):
        """Run ``fn(*args)``; an exception counts as a failure, not a crash."""
        try:
            ok = fn(*args)
        except Exception as e:
            self.add(name, False, f"{type(e).__name__}: {e}")
            return False
        self.add(name, ok)
        return bool(ok)


def _count_failures(fn, iterations):
    fails, first = 0, ""
    for _ in range(iterations):
        try:
            ok = fn()
        except Exception as e:
            ok = False
            first = first or f"{type(e).__name__}: {e}"
        fails += not ok
    return fails, f"{fails} failures" + (f" ({first})" if first else "")


# ---------------------------------------------------------------- random generators

def random_complex(rng: random.Random, ring=ZZ, max_total=8, max_degree=3, entry=2) -> ChainComplex:
    """Random bounded complex of free modules in degrees 0..max_degree with d o d = 0."""
    top = rng.randint(0, max_degree)
    ranks = {}
    budget = max_total
    for n in range(top + 1):
        r = rng.randint(0, min(3, budget))
        ranks[n] = r
        budget -= r
    diffs = {}
    for n in range(1, top + 1):
        rows, cols = ranks[n - 1], ranks[n]
        if rows == 0 or cols == 0:
            continue
        if n - 1 in diffs:
            ker = kernel_basis(diffs[n - 1])
            if not ker:
                continue
            columns = []
            for _ in range(cols):
                col = {}
                for v in ker:
                    k = rng.randint(-entry, entry)
                    for i, x in v.items():
                        col[i] = ring(col.get(i, 0) + k * x)
                columns.append({i: x for i, x in col.items() if x != 0})
            diffs[n] = Matrix.from_columns(ring, rows, columns)
        else:
            dense = [[rng.randint(-entry, entry) for _ in range(cols)] for _ in range(rows)]
            diffs[n] = Matrix.from_dense(ring, dense, cols)
    return ChainComplex(ring, ranks, diffs)


def dold_kan_round_trip(C: ChainComplex, method="kernel"):
    T = C.hi + 1
    N = normalized_chains(dold_kan_gamma(C, T), method=method)
    degs = range(0, C.hi + 1)
    same_ranks = all(N.rank(n) == C.rank(n) for n in degs)
    return same_ranks and homology(N, degs) == homology(C, degs)


def random_chart_units(rng: random.Random, X, r, degree=1):
    """Per chart an invertible r x r matrix: unitriangular with random polynomial entries,
    times a random invertible constant diagonal."""
    R = X.ring
    n = X.dim
    out = []
    for _ in range(X.nchart):
        h = [[LaurentPoly.zero(R, n) for _ in range(r)] for _ in range(r)]
        for i in range(r):
            c = 0
            while R(c) == 0:
                c = rng.choice([1, -1, 2, 3, -2])
            h[i][i] = LaurentPoly.const(R, n, c)
            for j in range(i + 1, r):
                terms = {}
                for _ in range(rng.randint(0, 2)):
                    e = tuple(rng.randint(0, degree) for _ in range(n))
                    terms[e] = rng.randint(-3, 3)
                h[i][j] = LaurentPoly(R, n, terms)
        if rng.random() < 0.5 and r > 1:
            h = [list(row) for row in zip(*h)]  # lower unitriangular variant
        out.append(h)
    return out


def random_overlap_unit(rng: random.Random, X, a, b):
    """A unit on U_a n U_b in chart b: constant times a monomial in the inverted variables."""
    R = X.ring
    units = X.units_on((a, b), b)
    e = tuple(rng.randint(-3, 3) if i in units else 0 for i in range(X.dim))
    c = 0
    while R(c) == 0:
        c = rng.randint(1, R.characteristic - 1 if R.characteristic else 5)
    return LaurentPoly.monomial(R, e, c)


def random_overlap_poly(rng: random.Random, R, X, a, b, terms=2):
    units = X.units_on((a, b), b)
    out = {}
    for _ in range(terms):
        e = tuple(rng.randint(-2, 2) if i in units else rng.randint(0, 2) for i in range(X.dim))
        out[e] = rng.randint(0, 50)
    return LaurentPoly(R, X.dim, out)


# ---------------------------------------------------------------- properties

def trivialization_independence(rng, X, a, b):
    E = parse_bundle(f"O({a})+O({b})", X)
    hs = random_chart_units(rng, X, 2)
    E2 = retrivialize(E, hs)
    A = atiyah_cocycle(E).cochain
    A2 = pull_to_original_frame(atiyah_cocycle(E2).cochain, E, hs)
    if not class_equal(A, A2):
        return False
    c, c2 = char_poly(E, method="newton"), char_poly(E2, method="newton")
    return c.equals(c2)


def teichmuller_independence(rng, X, LX):
    p = X.ring.characteristic
    a, b = sorted(rng.sample(range(X.nchart), 2))
    f = random_overlap_unit(rng, X, a, b)
    chart = LX.charts[b]
    base = teichmuller_transition(f, chart)
    g = random_overlap_poly(rng, LX.lifted.ring, X, a, b)
    lift = chart.lift(f) + g.scale(p)
    return teichmuller_transition(f, chart, lift=lift) == base


def lift_independence(rng, X, LX, d):
    R = LX.lifted.ring
    n = X.dim

    def rpoly():
        return LaurentPoly(R, n, {tuple(rng.randint(0, 2) for _ in range(n)): rng.randint(0, 20)
                                  for _ in range(rng.randint(1, 2))})

    LY = LX.perturbed([[rpoly() for _ in range(n)] for _ in range(X.nchart)])
    E = line_bundle(X, d)
    return class_equal(crystal_obstruction_line(E, LY).de_rham, crystal_obstruction_line(E, LX).de_rham)


# ---------------------------------------------------------------- suites

def suite_decalage(seed=0, iterations=20, max_r=3, max_p=3):
    rep = SuiteReport("decalage", seed)
    for ring in (ZZ, GF(2), GF(3)):
        for kind in DECALAGE_KINDS:
            for r in range(1, max_r + 1):
                for p in range(1, max_p + 1):
                    if kind == "sym_shift2" and p > 2:
                        continue  # only LS^2(M[2]) is in scope; p = 3 exceeds the level cap
                    name = f"{kind} r={r} p={p} over {ring}"
                    try:
                        res = verify_decalage(kind, r, p, ring)
                    except Exception as e:
                        rep.add(name, False, f"{type(e).__name__}: {e}")
                        continue
                    rep.add(name, res.ok, res.summary())
    rng = random.Random(seed)
    fails, detail = _count_failures(lambda: dold_kan_round_trip(random_complex(rng)), iterations)
    rep.add(f"Dold-Kan round trip x{iterations}", fails == 0, detail)
    return rep


def _line_cohomology_ok(X, d):
    n = X.dim
    res = cech_cohomology(X, twisted(line_bundle(X, d)), want_basis=False)
    want = [0] * (n + 1)
    if d >= 0:
        want[0] = comb(n + d, n)
    if d <= -n - 1:
        want[n] = comb(-d - 1, n)
    return [res.rank(q) for q in range(n + 1)] == want


def suite_hodge(seed=0, iterations=10):
    rep = SuiteReport("hodge", seed)
    for ring in (QQ, GF(3)):
        for n in (1, 2):
            X = projective_space(n, ring)
            for d in range(-4, 5):
                rep.check(f"h^*(P{n}, O({d})) over {ring}", _line_cohomology_ok, X, d)
    for n in (1, 2):
        X = projective_space(n, QQ)
        rep.check(f"de Rham Betti numbers of P{n}", lambda X=X, n=n: [
            de_rham_cohomology(X, k, want_basis=False).rank(k) for k in range(2 * n + 1)] == [1, 0] * n + [1])
    for ring in (QQ, GF(5)):
        for n in (1, 2):
            X = projective_space(n, ring)
            for d in range(-3, 4):
                rep.check(f"c_1(O({d})) on P{n} over {ring}", lambda X=X, d=d, ring=ring: (
                    char_poly(line_bundle(X, d), method="newton").in_hyperplane_basis()[1] == ring(d)))
        X = projective_space(2, ring)
        for a in range(-2, 3):
            for b in range(-2, 3):
                E = f"O({a})+O({b})"
                rep.check(f"c({E}) on P2 over {ring}", lambda X=X, E=E, a=a, b=b, ring=ring: (
                    char_poly(parse_bundle(E, X), method="newton").in_hyperplane_basis()
                    == [1, ring(a + b), ring(a * b)]))
                rep.check(f"Whitney O({a}), O({b}) on P2 over {ring}", whitney_check,
                          line_bundle(X, a), line_bundle(X, b))
    rng = random.Random(seed)
    step = iter(range(iterations))

    def one():
        X = projective_space(1 + next(step) % 2, QQ)
        return trivialization_independence(rng, X, rng.randint(-2, 2), rng.randint(-2, 2))

    fails, detail = _count_failures(one, iterations)
    rep.add(f"trivialization independence x{iterations}", fails == 0, detail)
    return rep


def _obstruction_ok(E):
    ob = crystal_obstruction_line(E)
    return ob.is_closed() and class_equal(ob.de_rham, c1_de_rham(E))


def suite_crystalline(seed=0, iterations=10):
    rep = SuiteReport("crystalline", seed)
    for p in (2, 3, 5):
        for n in (1, 2):
            X = projective_space(n, GF(p))
            for d in range(-3, 4):
                rep.check(f"alpha(O({d})) = c_1^dR on P{n} over F{p}", _obstruction_ok, line_bundle(X, d))
    for ring in (ZZ, QQ, GF(2), GF(3), GF(5)):
        for r in range(1, 5):
            A = PolyAlgebra(ring, r)
            rep.check(f"dp_char_poly r={r} over {ring}", lambda A=A: all(
                A.eq(dp, signed) for dp, signed, _ in cris_vs_dr(A.gens(), A)))
    rng = random.Random(seed)
    for p in (2, 3, 5):
        X = projective_space(2, GF(p))
        LX = lift_scheme(X)
        fails, detail = _count_failures(lambda: teichmuller_independence(rng, X, LX), iterations)
        rep.add(f"Teichmuller lift independence over F{p} x{iterations}", fails == 0, detail)
        fails, detail = _count_failures(lambda: lift_independence(rng, X, LX, rng.randint(-3, 3)),
                                        max(1, iterations // 5))
        rep.add(f"lift-of-X independence over F{p}", fails == 0, detail)
    return rep


SUITES = {"decalage": suite_decalage, "hodge": suite_hodge, "crystalline": suite_crystalline}


def run_suites(name="all", seed=0, iterations=None):
    names = list(SUITES) if name == "all" else [name]
    out = []
    for n in names:
        kw = {"seed": seed}
        if iterations is not None:
            kw["iterations"] = iterations
        out.append(SUITES[n](**kw))
    return out


__all__ = [
    "Check", "SUITES", "SuiteReport", "dold_kan_round_trip", "lift_independence", "random_chart_units",
    "random_complex", "random_overlap_poly", "random_overlap_unit", "run_suites", "suite_crystalline",
    "suite_decalage", "suite_hodge", "teichmuller_independence", "trivialization_independence",
]
