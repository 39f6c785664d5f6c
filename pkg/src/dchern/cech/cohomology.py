"""Cech and Cech-de Rham cohomology by torus weight.

Monomial gluing makes every Cech complex graded by the torus weights of
:meth:`CoveredScheme.weights`; each weight piece is finite.  Cochains are
flattened to coordinates keyed by ``(tuple, i, j, J, e)``: matrix entry
``(i, j)`` of the value on ``tuple`` has the term ``x^e dx_J``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import gcd, lcm

from ..homcore.complexes import HomologyReport
from ..rings.scalars import QQ, ZZ
from ..homcore.matrix import Matrix, _normalize_chain, elementary_divisors, kernel_basis, rank, solve
from ..rings.forms import DifferentialForm, dlog
from ..rings.laurent import LaurentPoly
from .cochains import CechCochain, CochainError, Sheaf, cech_differential, cup, unit_cochain
from .scheme import CoveredScheme, NotGradable


class CohomologyError(ValueError):
    pass


# ---------------------------------------------------------------- flattening

def flatten(c: CechCochain) -> dict:
    out = {}
    for tup, val in c.values.items():
        for i, row in enumerate(val):
            for j, form in enumerate(row):
                for J, f in form.terms.items():
                    for e, coef in f.terms.items():
                        out[(tup, i, j, J, e)] = coef
    return out


def unflatten(X: CoveredScheme, q: int, sheaf: Sheaf, coords: dict) -> CechCochain:
    rows, cols = sheaf.shape
    grouped: dict = {}
    for (tup, i, j, J, e), coef in coords.items():
        if coef == 0:
            continue
        grouped.setdefault(tup, {}).setdefault((i, j), {}).setdefault(J, {})[e] = coef
    values = {}
    for tup, entries in grouped.items():
        mat = []
        for i in range(rows):
            row = []
            for j in range(cols):
                terms = entries.get((i, j), {})
                row.append(DifferentialForm(X.ring, X.dim, sheaf.form_degree,
                                            {J: LaurentPoly(X.ring, X.dim, t) for J, t in terms.items()}))
            mat.append(row)
        values[tup] = mat
    return CechCochain(X, q, sheaf, values, check=False)


# ---------------------------------------------------------------- grading

class WeightGrading:
    """Weight bookkeeping for one coefficient sheaf on one scheme."""

    def __init__(self, X: CoveredScheme, sheaf: Sheaf):
        self.X = X
        self.sheaf = sheaf
        W, inv = X.weights()
        self.W = W
        self.inv = inv
        rows, cols = sheaf.shape
        n = X.dim
        zero = (0,) * n
        self.offsets = []
        fw = sheaf.bundle.frame_weights() if sheaf.bundle is not None else None
        for c in range(X.nchart):
            off = {}
            for i in range(rows):
                for j in range(cols):
                    if sheaf.kind == "scalar":
                        off[(i, j)] = zero
                    elif sheaf.kind == "vector":
                        off[(i, j)] = fw[(c, j)]
                    else:
                        off[(i, j)] = tuple(b - a for a, b in zip(fw[(c, i)], fw[(c, j)]))
            self.offsets.append(off)
        self._basis = {}

    def twist_bound(self):
        return max((abs(x) for off in self.offsets for v in off.values() for x in v), default=0)

    def key_weight(self, key):
        tup, i, j, J, e = key
        c = tup[-1]
        W = self.W[c]
        off = self.offsets[c][(i, j)]
        n = self.X.dim
        return tuple(sum((e[k] + (1 if k in J else 0)) * W[k][m] for k in range(n)) + off[m] for m in range(n))

    def basis(self, q, weight):
        key = (q, weight)
        if key in self._basis:
            return self._basis[key]
        X = self.X
        rows, cols = self.sheaf.shape
        w = self.sheaf.form_degree
        out = []
        if 0 <= q < X.nchart and 0 <= w <= X.dim:
            for tup in X.tuples(q):
                c = tup[-1]
                units = X.units_on(tup, c)
                for i in range(rows):
                    for j in range(cols):
                        off = self.offsets[c][(i, j)]
                        target = tuple(a - b for a, b in zip(weight, off))
                        base = X.exponent_of(c, target)
                        if base is None:
                            continue
                        for J in combinations(range(X.dim), w):
                            e = tuple(b - (1 if k in J else 0) for k, b in enumerate(base))
                            if any(x < 0 and k not in units for k, x in enumerate(e)):
                                continue
                            out.append((tup, i, j, J, e))
        self._basis[key] = out
        return out

    def split(self, coords: dict) -> dict:
        """Group flattened coordinates by weight."""
        out: dict = {}
        for k, v in coords.items():
            out.setdefault(self.key_weight(k), {})[k] = v
        return out

    def differential(self, q, weight) -> Matrix:
        """Matrix of the Cech differential C^q_w -> C^{q+1}_w."""
        X = self.X
        src = self.basis(q, weight)
        tgt = self.basis(q + 1, weight)
        index = {k: n for n, k in enumerate(tgt)}
        cols = []
        for key in src:
            c = unflatten(X, q, self.sheaf, {key: X.ring.one})
            img = flatten(cech_differential(c))
            col = {}
            for k, v in img.items():
                if k not in index:
                    raise CohomologyError(f"differential leaves the weight piece {weight} (key {k})")
                col[index[k]] = v
            cols.append(col)
        return Matrix.from_columns(X.ring, len(tgt), cols)


def default_box(X: CoveredScheme, grading: WeightGrading | None = None):
    """Safe weight box: |w_i| <= twist + dim + 2."""
    tw = grading.twist_bound() if grading is not None else 0
    return tw + X.dim + 2


def _weights_in_box(n, R):
    return product(range(-R, R + 1), repeat=n)


# ---------------------------------------------------------------- results

@dataclass
class CohomologyResult:
    report: HomologyReport
    basis: dict = field(default_factory=dict)  # degree -> list of cocycles
    truncated: tuple = ()  # degrees with classes on the edge of the weight box

    def rank(self, q):
        return self.report.rank(q)

    def torsion(self, q):
        return self.report.torsion(q)


def _lin_ring(ring):
    if ring.is_field or ring == ZZ:
        return ring
    raise CohomologyError(f"cohomology over {ring} is not supported")


def _extend_to_cohomology_basis(kernel, image_cols, ring, nrows):
    """Kernel vectors whose classes form a basis of ker / im (over a field)."""
    chosen = []
    current = list(image_cols)
    r0 = rank(Matrix.from_columns(ring, nrows, current)) if current else 0
    for v in kernel:
        trial = current + [v]
        r1 = rank(Matrix.from_columns(ring, nrows, trial))
        if r1 > r0:
            chosen.append(v)
            current, r0 = trial, r1
    return chosen


def _cohomology_pieces(X, degrees, bases, maps, ring, want_basis, to_cochain, box):
    """Shared driver: ``bases[w][q]`` key lists and ``maps[w][q]`` matrices per weight.

    Classes found at a weight on the boundary of the box mean the box cut off an
    unbounded piece (non-proper X, or an override that is too small).
    """
    ranks = {q: 0 for q in degrees}
    edge = set()
    torsion = {q: [] for q in degrees}
    cocycles = {q: [] for q in degrees}
    field_ring = ring if ring.is_field else QQ
    for wt in bases:
        B, M = bases[wt], maps[wt]
        for q in degrees:
            n = len(B.get(q, []))
            if n == 0:
                continue
            out = M.get(q)
            inc = M.get(q - 1)
            r_out = rank(out) if out is not None and out.nrows and out.ncols else 0
            if inc is not None and inc.nrows and inc.ncols:
                if ring.is_field:
                    r_in, tors = rank(inc), []
                else:
                    divs = elementary_divisors(inc)
                    r_in, tors = len(divs), [d for d in divs if d != 1]
            else:
                r_in, tors = 0, []
            h = n - r_out - r_in
            if (h or tors) and max((abs(w) for w in wt), default=0) == box:
                edge.add(q)
            ranks[q] += h
            torsion[q].extend(tors)
            if want_basis and h:
                if out is not None and out.nrows and out.ncols:
                    ker = kernel_basis(out.change_ring(field_ring) if not ring.is_field else out)
                else:
                    ker = [{k: field_ring.one} for k in range(n)]
                img = inc.change_ring(field_ring).columns() if inc is not None and inc.ncols else []
                reps = _extend_to_cohomology_basis(ker, img, field_ring, n)
                for v in reps:
                    if not ring.is_field:
                        v = _clear_denominators(v)
                    cocycles[q].append(to_cochain(q, {B[q][k]: c for k, c in v.items()}))
    report = HomologyReport(ring)
    for q in degrees:
        report.groups[q] = (ranks[q], tuple(_normalize_chain(torsion[q])) if torsion[q] else ())
    return CohomologyResult(report, cocycles, tuple(sorted(edge)))


def _clear_denominators(v):
    den = 1
    for x in v.values():
        den = lcm(den, Fraction(x).denominator)
    vals = {k: int(Fraction(x) * den) for k, x in v.items()}
    g = 0
    for x in vals.values():
        g = gcd(g, x)
    return {k: x // g for k, x in vals.items()} if g else vals


def cech_cohomology(X: CoveredScheme, sheaf: Sheaf, degrees=None, box=None, want_basis=True) -> CohomologyResult:
    """Cech cohomology of the cover with coefficients in ``sheaf`` for the given degrees."""
    ring = _lin_ring(X.ring)
    G = WeightGrading(X, sheaf)
    degrees = list(range(X.nchart)) if degrees is None else list(degrees)
    R = default_box(X, G) if box is None else box
    bases, maps = {}, {}
    for wt in _weights_in_box(X.dim, R):
        B = {q: G.basis(q, wt) for q in range(min(degrees) - 1, max(degrees) + 2)}
        if not any(B[q] for q in degrees):
            continue
        M = {}
        for q in range(min(degrees) - 1, max(degrees) + 1):
            if B.get(q) and B.get(q + 1):
                M[q] = G.differential(q, wt)
        bases[wt], maps[wt] = B, M
    return _cohomology_pieces(X, degrees, bases, maps, ring, want_basis,
                              lambda q, coords: unflatten(X, q, sheaf, coords), R)


def cohomology_group(X: CoveredScheme, sheaf: Sheaf, q: int, box=None, want_basis=True) -> CohomologyResult:
    return cech_cohomology(X, sheaf, [q], box=box, want_basis=want_basis)


# ---------------------------------------------------------------- classes

class TotalCochain:
    """Element of the Cech-de Rham total complex: scalar cochains of bidegree (n - w, w)."""

    def __init__(self, X: CoveredScheme, n: int, parts=None):
        self.scheme = X
        self.degree = n
        clean = {}
        for c in (parts or {}).values() if isinstance(parts, dict) else (parts or []):
            if c.sheaf.kind != "scalar":
                raise CochainError("the de Rham complex has scalar coefficients")
            if c.q + c.w != n:
                raise CochainError(f"bidegree {c.bidegree} does not have total degree {n}")
            if c.is_zero():
                continue
            clean[c.w] = clean[c.w] + c if c.w in clean else c
        self.parts = clean

    @classmethod
    def from_cech(cls, c: CechCochain):
        return cls(c.scheme, c.q + c.w, [c])

    def part(self, w):
        if w in self.parts:
            return self.parts[w]
        return CechCochain(self.scheme, self.degree - w, Sheaf(w))

    def is_zero(self):
        return all(c.is_zero() for c in self.parts.values())

    def _combine(self, other, sgn):
        if not isinstance(other, TotalCochain) or other.degree != self.degree or other.scheme is not self.scheme:
            raise CochainError("total cochains of different degree")
        parts = dict(self.parts)
        for w, c in other.parts.items():
            c = c if sgn > 0 else -c
            parts[w] = parts[w] + c if w in parts else c
        return TotalCochain(self.scheme, self.degree, parts)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return TotalCochain(self.scheme, self.degree, {w: -c for w, c in self.parts.items()})

    def scale(self, k):
        return TotalCochain(self.scheme, self.degree, {w: c.scale(k) for w, c in self.parts.items()})

    def __eq__(self, other):
        if not isinstance(other, TotalCochain):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def describe(self):
        if not self.parts:
            return "0"
        return "\n".join(f"[{c.q},{w}] " + c.describe().replace("\n", "\n      ")
                         for w, c in sorted(self.parts.items()))

    def __repr__(self):
        return f"TotalCochain(degree {self.degree}, bidegrees {sorted((c.q, w) for w, c in self.parts.items())})"


def total_differential(t: TotalCochain) -> TotalCochain:
    """``D = delta + (-1)^q d`` on each bidegree piece."""
    out = []
    for w, c in t.parts.items():
        out.append(cech_differential(c))
        if w < t.scheme.dim:
            dc = c.d()
            out.append(dc if c.q % 2 == 0 else -dc)
    return TotalCochain(t.scheme, t.degree + 1, out)


def total_cup(a: TotalCochain, b: TotalCochain) -> TotalCochain:
    parts = []
    for c in a.parts.values():
        for e in b.parts.values():
            if c.w + e.w <= a.scheme.dim:
                parts.append(cup(c, e))
    return TotalCochain(a.scheme, a.degree + b.degree, parts)


class TotalGrading:
    def __init__(self, X: CoveredScheme):
        self.X = X
        self.graders = {w: WeightGrading(X, Sheaf(w)) for w in range(X.dim + 1)}

    def basis(self, n, weight):
        out = []
        for w, G in self.graders.items():
            q = n - w
            if 0 <= q < self.X.nchart:
                out.extend(G.basis(q, weight))
        return out

    def flatten(self, t: TotalCochain):
        out = {}
        for c in t.parts.values():
            out.update(flatten(c))
        return out

    def unflatten(self, n, coords):
        by_w: dict = {}
        for k, v in coords.items():
            by_w.setdefault(len(k[3]), {})[k] = v
        return TotalCochain(self.X, n, [unflatten(self.X, n - w, Sheaf(w), cs) for w, cs in by_w.items()])

    def key_weight(self, key):
        return self.graders[len(key[3])].key_weight(key)

    def split(self, coords):
        out: dict = {}
        for k, v in coords.items():
            out.setdefault(self.key_weight(k), {})[k] = v
        return out

    def differential(self, n, weight):
        src, tgt = self.basis(n, weight), self.basis(n + 1, weight)
        index = {k: i for i, k in enumerate(tgt)}
        cols = []
        for key in src:
            t = self.unflatten(n, {key: self.X.ring.one})
            img = self.flatten(total_differential(t))
            col = {}
            for k, v in img.items():
                if k not in index:
                    raise CohomologyError(f"total differential leaves the weight piece {weight}")
                col[index[k]] = v
            cols.append(col)
        return Matrix.from_columns(self.X.ring, len(tgt), cols)


def de_rham_cohomology(X: CoveredScheme, n, box=None, want_basis=True) -> CohomologyResult:
    """Cohomology of the Cech-de Rham total complex in total degree(s) n."""
    ring = _lin_ring(X.ring)
    T = TotalGrading(X)
    degrees = [n] if isinstance(n, int) else list(n)
    R = X.dim + 2 if box is None else box
    bases, maps = {}, {}
    for wt in _weights_in_box(X.dim, R):
        B = {k: T.basis(k, wt) for k in range(min(degrees) - 1, max(degrees) + 2)}
        if not any(B[k] for k in degrees):
            continue
        M = {}
        for k in range(min(degrees) - 1, max(degrees) + 1):
            if B.get(k) and B.get(k + 1):
                M[k] = T.differential(k, wt)
        bases[wt], maps[wt] = B, M
    return _cohomology_pieces(X, degrees, bases, maps, ring, want_basis, lambda k, coords: T.unflatten(k, coords), R)


# ---------------------------------------------------------------- comparison

class CohomologyClass:
    """A cocycle (Cech or total) viewed as a class."""

    def __init__(self, rep, check=True):
        if isinstance(rep, CohomologyClass):
            rep = rep.rep
        self.rep = rep
        if check and not is_cocycle(rep):
            raise CochainError("representative is not a cocycle")

    @property
    def bidegree(self):
        r = self.rep
        if isinstance(r, TotalCochain):
            return ("total", r.degree)
        return r.bidegree

    def __add__(self, other):
        return CohomologyClass(self.rep + _rep(other), check=False)

    def __sub__(self, other):
        return CohomologyClass(self.rep - _rep(other), check=False)

    def __neg__(self):
        return CohomologyClass(-self.rep, check=False)

    def scale(self, k):
        return CohomologyClass(self.rep.scale(k), check=False)

    def cup(self, other):
        o = _rep(other)
        if isinstance(self.rep, TotalCochain):
            return CohomologyClass(total_cup(self.rep, o), check=False)
        return CohomologyClass(cup(self.rep, o), check=False)

    def __eq__(self, other):
        if not isinstance(other, CohomologyClass):
            return NotImplemented
        return class_equal(self, other)

    __hash__ = None

    def is_zero(self):
        return is_coboundary(self.rep)

    def __repr__(self):
        return f"CohomologyClass({self.rep!r})"


def _rep(x):
    return x.rep if isinstance(x, CohomologyClass) else x


def is_cocycle(c) -> bool:
    if isinstance(c, TotalCochain):
        return total_differential(c).is_zero()
    return cech_differential(c).is_zero()


def _grading_for(c):
    if isinstance(c, TotalCochain):
        return TotalGrading(c.scheme), c.degree
    return WeightGrading(c.scheme, c.sheaf), c.q


def is_coboundary(c) -> bool:
    """Decide whether c = d(s) by solving one small system per weight."""
    if c.is_zero():
        return True
    X = c.scheme
    _lin_ring(X.ring)
    G, q = _grading_for(c)
    coords = G.flatten(c) if isinstance(G, TotalGrading) else flatten(c)
    for wt, part in G.split(coords).items():
        tgt = G.basis(q, wt)
        index = {k: i for i, k in enumerate(tgt)}
        if any(k not in index for k in part):
            raise CohomologyError("cochain has terms outside its weight basis")
        src = G.basis(q - 1, wt) if q > 0 else []
        if not src:
            return False
        M = G.differential(q - 1, wt)
        rhs = {index[k]: v for k, v in part.items()}
        if solve(M, rhs) is None:
            return False
    return True


def _check_same(a, b):
    ra, rb = _rep(a), _rep(b)
    if isinstance(ra, TotalCochain) != isinstance(rb, TotalCochain):
        raise CochainError("cannot compare a Cech class with a de Rham class")
    if isinstance(ra, TotalCochain):
        if ra.degree != rb.degree:
            raise CochainError(f"degree mismatch: {ra.degree} vs {rb.degree}")
    else:
        if ra.bidegree != rb.bidegree or not ra.sheaf.same_as(rb.sheaf):
            raise CochainError(f"bidegree or coefficient mismatch: {ra.bidegree} vs {rb.bidegree}")
    return ra, rb


def class_equal(a, b) -> bool:
    ra, rb = _check_same(a, b)
    return is_coboundary(ra - rb)


def class_coordinates(c, basis):
    """Coefficients of c in the given classes (modulo coboundaries), or None."""
    rc = _rep(c)
    reps = [_rep(b) for b in basis]
    for r in reps:
        _check_same(rc, r)
    X = rc.scheme
    ring = _lin_ring(X.ring)
    G, q = _grading_for(rc)
    fl = (lambda x: G.flatten(x)) if isinstance(G, TotalGrading) else flatten
    pieces = [G.split(fl(r)) for r in [rc] + reps]
    weights = sorted({w for p in pieces for w in p})
    row_index = {}
    for wt in weights:
        for k in G.basis(q, wt):
            row_index[k] = len(row_index)
    ncols0 = len(reps)
    cols = [dict() for _ in range(ncols0)]
    for j, p in enumerate(pieces[1:]):
        for part in p.values():
            for k, v in part.items():
                cols[j][row_index[k]] = v
    for wt in weights:
        if q > 0 and G.basis(q - 1, wt):
            M = G.differential(q - 1, wt)
            tgt = G.basis(q, wt)
            for col in M.columns():
                cols.append({row_index[tgt[i]]: v for i, v in col.items()})
    mat = Matrix.from_columns(ring, len(row_index), cols)
    rhs = {}
    for part in pieces[0].values():
        for k, v in part.items():
            rhs[row_index[k]] = v
    x = solve(mat, rhs)
    if x is None:
        return None
    return [x.get(j, 0) for j in range(ncols0)]


# ---------------------------------------------------------------- the hyperplane class

def hyperplane_cocycle(X: CoveredScheme) -> CechCochain:
    """``h``: the 1-cocycle ``dlog(x_b / x_a)`` on U_a n U_b, in chart b.

    On P^1 this is ``dlog z``.
    """
    n = getattr(X, "projective_dim", None)
    if n is None:
        raise CohomologyError("the hyperplane class is only available on built-in projective spaces")
    vals = {}
    for a, b in X.tuples(1):
        # x_a / x_b is a coordinate of chart b
        others = [j for j in range(n + 1) if j != b]
        u = LaurentPoly.var(X.ring, n, others.index(a))
        vals[(a, b)] = -dlog(u)
    return CechCochain(X, 1, Sheaf(1), vals)


def hyperplane_power(X: CoveredScheme, k: int) -> CechCochain:
    h = hyperplane_cocycle(X)
    if k == 0:
        return unit_cochain(X)
    out = h
    for _ in range(k - 1):
        out = cup(out, h)
    return out


__all__ = [
    "CohomologyClass", "CohomologyError", "CohomologyResult", "NotGradable", "TotalCochain",
    "TotalGrading", "WeightGrading", "cech_cohomology", "class_coordinates", "class_equal",
    "cohomology_group", "de_rham_cohomology", "default_box", "flatten", "hyperplane_cocycle",
    "hyperplane_power", "is_coboundary", "is_cocycle", "total_cup", "total_differential", "unflatten",
]
