"""Toy schemes given by Laurent charts, and vector bundles given by transition matrices.

Chart ``a`` has coordinate ring ``R[x_1..x_n]`` with some variables possibly
inverted.  For each ordered pair ``(a, b)`` of distinct charts the overlap is
the localization of chart ``a`` at a set of its variables, and the gluing
sends each variable of chart ``b`` to a Laurent polynomial in chart ``a``.

Bundle convention: frames satisfy ``e^a_i = sum_j g_ab[i][j] e^b_j`` with
``g_ab`` written in the coordinates of chart ``b``; then
``g_ac = g_ab g_bc`` on triple overlaps.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from ..homcore.functors import induced_columns, power_basis
from ..rings.forms import DifferentialForm
from ..rings.laurent import LaurentPoly, parse_laurent
from ..rings.scalars import Ring
from . import lmatrix


class SchemeError(ValueError):
    pass


class NotGradable(SchemeError):
    """Gluing or transition data is not compatible with a torus grading."""


class CoveredScheme:
    def __init__(self, ring: Ring, charts, maps, overlaps, chart_units=None, name=None, check=True):
        """``charts``: list of variable-name lists.
        ``maps[(a, b)]``: images of chart-b variables as LaurentPolys in chart a.
        ``overlaps[(a, b)]``: indices of chart-a variables inverted on the overlap.
        ``chart_units[a]``: indices of chart-a variables already inverted on the chart.
        """
        self.ring = ring
        self.charts = [tuple(c) for c in charts]
        self.name = name or "custom"
        n = len(self.charts)
        if n == 0:
            raise SchemeError("a scheme needs at least one chart")
        self.dim = len(self.charts[0])
        if any(len(c) != self.dim for c in self.charts):
            raise SchemeError("all charts must have the same number of variables")
        self.maps = {k: tuple(v) for k, v in maps.items()}
        self.overlaps = {k: frozenset(v) for k, v in overlaps.items()}
        self.chart_units = [frozenset(u) for u in (chart_units or [()] * n)]
        self._dmaps = {}
        self._weights = None
        if check:
            self.validate()

    # ---------------------------------------------------------------- basics
    @property
    def nchart(self):
        return len(self.charts)

    def __repr__(self):
        return f"CoveredScheme({self.name}, {self.nchart} charts, dim {self.dim}, over {self.ring})"

    def tuples(self, q):
        return list(combinations(range(self.nchart), q + 1))

    def units_on(self, tup, c):
        """Chart-c variables that are units on the intersection of the charts in ``tup``."""
        out = set(self.chart_units[c])
        for a in tup:
            if a != c:
                out |= self.overlaps[(c, a)]
        return frozenset(out)

    def expressible(self, f, tup, c):
        """True if ``f`` (function or form in chart c) lives on the overlap ``tup``."""
        units = self.units_on(tup, c)
        polys = f.terms.values() if isinstance(f, DifferentialForm) else [f]
        for p in polys:
            for e in p.terms:
                if any(x < 0 and i not in units for i, x in enumerate(e)):
                    return False
        return True

    def images(self, src, dst):
        """Images of chart-src variables written in chart dst."""
        if src == dst:
            return tuple(LaurentPoly.var(self.ring, self.dim, i) for i in range(self.dim))
        return self.maps[(dst, src)]

    def dimages(self, src, dst):
        key = (src, dst)
        if key not in self._dmaps:
            self._dmaps[key] = tuple(DifferentialForm.from_poly(f).d() for f in self.images(src, dst))
        return self._dmaps[key]

    def move(self, f, src, dst):
        """Rewrite a function or form from chart src into chart dst."""
        if src == dst:
            return f
        if isinstance(f, DifferentialForm):
            return f.pullback(self.images(src, dst), self.dimages(src, dst))
        return f.subs(self.images(src, dst))

    def var(self, chart, name_or_index):
        i = name_or_index if isinstance(name_or_index, int) else self.charts[chart].index(name_or_index)
        return LaurentPoly.var(self.ring, self.dim, i)

    def parse(self, text, chart):
        return parse_laurent(str(text), self.charts[chart], self.ring)

    # ---------------------------------------------------------------- checks
    def validate(self):
        n = self.nchart
        for a in range(n):
            for b in range(n):
                if a == b:
                    continue
                if (a, b) not in self.maps or (a, b) not in self.overlaps:
                    raise SchemeError(f"missing gluing data for charts ({a}, {b})")
                imgs = self.maps[(a, b)]
                if len(imgs) != self.dim:
                    raise SchemeError(f"gluing ({a}, {b}) has {len(imgs)} images, expected {self.dim}")
                for f in imgs:
                    if not self.expressible(f, (a, b), a):
                        raise SchemeError(f"gluing ({a}, {b}) leaves the overlap ring")
        for a in range(n):
            for b in range(n):
                if a == b:
                    continue
                # b -> a -> b must be the identity on chart-b variables
                for i in range(self.dim):
                    x = LaurentPoly.var(self.ring, self.dim, i)
                    there = x.subs(self.images(b, a))
                    back = there.subs(self.images(a, b))
                    if back != x:
                        raise SchemeError(f"gluing maps ({a}, {b}) and ({b}, {a}) are not inverse")
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if len({a, b, c}) < 3:
                        continue
                    for i in range(self.dim):
                        x = LaurentPoly.var(self.ring, self.dim, i)
                        via = self.move(self.move(x, c, b), b, a)
                        if via != self.move(x, c, a):
                            raise SchemeError(f"gluing is not transitive on charts ({a}, {b}, {c})")

    # ---------------------------------------------------------------- grading
    def weights(self):
        """Torus weights of each chart variable, as columns in Z^dim.

        Chart 0 variables get the standard basis; other charts inherit them
        through the (necessarily monomial) gluing maps.
        """
        if self._weights is not None:
            return self._weights
        d = self.dim
        W = [None] * self.nchart
        W[0] = [tuple(int(i == j) for j in range(d)) for i in range(d)]
        for c in range(1, self.nchart):
            cols = []
            for f in self.images(c, 0):
                if not f.is_monomial():
                    raise NotGradable("gluing maps are not monomial")
                (e, _), = f.terms.items()
                cols.append(self._exp_weight(W[0], e))
            W[c] = cols
        # every gluing must respect the grading
        for a in range(self.nchart):
            for b in range(self.nchart):
                if a == b:
                    continue
                for j, f in enumerate(self.images(b, a)):
                    if not f.is_monomial():
                        raise NotGradable("gluing maps are not monomial")
                    (e, _), = f.terms.items()
                    if self._exp_weight(W[a], e) != W[b][j]:
                        raise NotGradable("gluing maps are not torus-equivariant")
        inv = []
        for c in range(self.nchart):
            M = [[Fraction(W[c][j][i]) for j in range(d)] for i in range(d)]
            inv.append(_invert_fraction_matrix(M))
        self._weights = (W, inv)
        return self._weights

    @staticmethod
    def _exp_weight(cols, e):
        d = len(cols[0]) if cols else 0
        return tuple(sum(k * cols[j][i] for j, k in enumerate(e)) for i in range(d))

    def weight_of(self, chart, e):
        W, _ = self.weights()
        return self._exp_weight(W[chart], e) if self.dim else ()

    def exponent_of(self, chart, weight):
        """The unique exponent in chart ``chart`` of the given weight, or None."""
        _, inv = self.weights()
        M = inv[chart]
        if M is None:
            raise NotGradable(f"chart {chart} weights are degenerate")
        out = []
        for row in M:
            v = sum(a * w for a, w in zip(row, weight))
            if v.denominator != 1:
                return None
            out.append(int(v))
        return tuple(out)


def _invert_fraction_matrix(M):
    n = len(M)
    if n == 0:
        return []
    A = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(M)]
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c] != 0), None)
        if p is None:
            return None
        A[c], A[p] = A[p], A[c]
        pv = A[c][c]
        A[c] = [x / pv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [row[n:] for row in A]


# ---------------------------------------------------------------- built-ins

def projective_space(n: int, ring: Ring) -> CoveredScheme:
    """P^n with the standard cover by the n+1 charts x_a != 0.

    Chart a has coordinates x_j / x_a (j != a); on P^1 they are called z and w.
    """
    if n < 1:
        raise SchemeError("P^n needs n >= 1")
    if n == 1:
        charts = [["z"], ["w"]]
    else:
        if n > 9:
            raise SchemeError("built-in projective spaces stop at P^9")
        charts = [[f"u{a}{j}" for j in range(n + 1) if j != a] for a in range(n + 1)]
    others = [[j for j in range(n + 1) if j != a] for a in range(n + 1)]

    def coord(a, j):
        # x_j / x_a in chart a
        if j == a:
            return LaurentPoly.one(ring, n)
        return LaurentPoly.var(ring, n, others[a].index(j))

    maps, overlaps = {}, {}
    for a in range(n + 1):
        for b in range(n + 1):
            if a == b:
                continue
            inv_b = coord(a, b).unit_inverse()
            maps[(a, b)] = [coord(a, j) * inv_b for j in others[b]]
            overlaps[(a, b)] = [others[a].index(b)]
    X = CoveredScheme(ring, charts, maps, overlaps, name=f"P{n}")
    X.projective_dim = n
    return X


def affine_space(n: int, ring: Ring) -> CoveredScheme:
    names = ["x"] if n == 1 else [f"x{i}" for i in range(n)]
    return CoveredScheme(ring, [names], {}, {}, name=f"A{n}")


def builtin_scheme(name: str, ring: Ring) -> CoveredScheme:
    key = name.strip().upper()
    if key.startswith("P") and key[1:].isdigit():
        return projective_space(int(key[1:]), ring)
    if key.startswith("A") and key[1:].isdigit():
        return affine_space(int(key[1:]), ring)
    raise SchemeError(f"unknown built-in scheme {name!r} (expected P1, P2, A1, ...)")


def scheme_from_dict(doc: dict, ring: Ring) -> CoveredScheme:
    """Custom chart description::

        {"charts": [["x"], ["y"]],
         "overlaps": [{"pair": [0, 1], "invert": ["x"], "map": {"y": "x^-1"}},
                      {"pair": [1, 0], "invert": ["y"], "map": {"x": "y^-1"}}],
         "units": [[], []]}
    """
    try:
        charts = [list(c["vars"]) if isinstance(c, dict) else list(c) for c in doc["charts"]]
    except (KeyError, TypeError) as e:
        raise SchemeError(f"scheme.charts: {e}") from None
    maps, overlaps = {}, {}
    for k, ov in enumerate(doc.get("overlaps", [])):
        where = f"scheme.overlaps[{k}]"
        try:
            a, b = (int(x) for x in ov["pair"])
            inv = [charts[a].index(v) for v in ov.get("invert", [])]
            mp = ov["map"]
            if isinstance(mp, dict):
                imgs = [parse_laurent(str(mp[v]), charts[a], ring) for v in charts[b]]
            else:
                imgs = [parse_laurent(str(s), charts[a], ring) for s in mp]
        except (KeyError, ValueError, IndexError, TypeError) as e:
            raise SchemeError(f"{where}: {e}") from None
        maps[(a, b)] = imgs
        overlaps[(a, b)] = inv
    units = None
    if "units" in doc:
        units = [[charts[c].index(v) for v in u] for c, u in enumerate(doc["units"])]
    return CoveredScheme(ring, charts, maps, overlaps, units, name=doc.get("name", "custom"))


# ---------------------------------------------------------------- bundles

class VectorBundle:
    def __init__(self, scheme: CoveredScheme, rank: int, transitions: dict, name=None, check=True):
        """``transitions[(a, b)]`` for a < b: r x r matrix of LaurentPolys in chart b."""
        self.scheme = scheme
        self.rank = rank
        self.name = name or f"rank-{rank} bundle"
        self._g = {}
        X = scheme
        for a in range(X.nchart):
            for b in range(a + 1, X.nchart):
                if (a, b) not in transitions:
                    raise SchemeError(f"missing transition matrix g_{a}{b}")
                g = [list(r) for r in transitions[(a, b)]]
                if len(g) != rank or any(len(r) != rank for r in g):
                    raise SchemeError(f"g_{a}{b} is not {rank}x{rank}")
                self._g[(a, b)] = g
        self._frame = None
        self.summands = None
        if check:
            self.validate()

    def __repr__(self):
        return f"VectorBundle({self.name}, rank {self.rank} on {self.scheme.name})"

    def g(self, a, b):
        """Transition matrix g_ab written in chart b (any order of a, b)."""
        if a == b:
            return lmatrix.identity(self.scheme.ring, self.scheme.dim, self.rank)
        if (a, b) not in self._g:
            # g_ab = g_ba^{-1}; g_ba is stored in chart a, move it to chart b
            m = lmatrix.inverse(self._g[(b, a)])
            self._g[(a, b)] = [[self.scheme.move(x, a, b) for x in row] for row in m]
        return self._g[(a, b)]

    def validate(self):
        X = self.scheme
        for (a, b), g in list(self._g.items()):
            if a > b:
                continue
            for row in g:
                for x in row:
                    if not X.expressible(x, (a, b), b):
                        raise SchemeError(f"g_{a}{b} has entries outside the overlap ring")
            try:
                lmatrix.inverse(g)
            except ZeroDivisionError:
                raise SchemeError(f"g_{a}{b} is not invertible on the overlap") from None
        for a, b, c in combinations(range(X.nchart), 3):
            gab = [[X.move(x, b, c) for x in row] for row in self.g(a, b)]
            lhs = lmatrix.mul(gab, self.g(b, c))
            if not lmatrix.equal(lhs, self.g(a, c)):
                raise SchemeError(f"cocycle condition fails on charts ({a}, {b}, {c})")

    def transitions(self):
        X = self.scheme
        return {(a, b): self.g(a, b) for a in range(X.nchart) for b in range(a + 1, X.nchart)}

    def map_transitions(self, fn, name=None, scheme=None):
        return VectorBundle(scheme or self.scheme, self.rank,
                            {k: [[fn(x) for x in row] for row in g] for k, g in self.transitions().items()},
                            name=name)

    def frame_weights(self):
        """Torus weight of each local frame vector ``(chart, i)``, normalized at chart 0."""
        if self._frame is not None:
            return self._frame
        X = self.scheme
        X.weights()
        wt = {}
        edges = {}
        for (a, b), g in self.transitions().items():
            for i, row in enumerate(g):
                for j, x in enumerate(row):
                    if x.is_zero():
                        continue
                    if not x.is_monomial():
                        raise NotGradable(f"{self.name}: transition entry {x} is not a monomial")
                    (e, _), = x.terms.items()
                    w = X.weight_of(b, e)
                    # w(e^a_i) = wt(g_ij) + w(e^b_j)
                    edges.setdefault((a, i), []).append(((b, j), w, 1))
                    edges.setdefault((b, j), []).append(((a, i), w, -1))
        zero = (0,) * X.dim
        for start in [(c, i) for c in range(X.nchart) for i in range(self.rank)]:
            if start in wt:
                continue
            wt[start] = zero
            stack = [start]
            while stack:
                node = stack.pop()
                for nb, w, sgn in edges.get(node, []):
                    # sgn=1: node=(a,i), nb=(b,j): w(b,j) = w(a,i) - w
                    val = tuple(x - sgn * y for x, y in zip(wt[node], w))
                    if nb in wt:
                        if wt[nb] != val:
                            raise NotGradable(f"{self.name}: transition data is not torus-homogeneous")
                    else:
                        wt[nb] = val
                        stack.append(nb)
        self._frame = wt
        return wt


def line_bundle(X: CoveredScheme, d: int) -> VectorBundle:
    """O(d) on a built-in projective space: g_ab = (x_a / x_b)^d in chart b."""
    n = getattr(X, "projective_dim", None)
    if n is None:
        if X.nchart == 1:
            return trivial_bundle(X, 1, name=f"O({d})")
        raise SchemeError("O(d) is only defined on built-in projective spaces")
    others = [[j for j in range(n + 1) if j != a] for a in range(n + 1)]
    trans = {}
    for a in range(n + 1):
        for b in range(a + 1, n + 1):
            trans[(a, b)] = [[LaurentPoly.var(X.ring, n, others[b].index(a), d)]]
    return VectorBundle(X, 1, trans, name=f"O({d})")


def trivial_bundle(X: CoveredScheme, r: int, name=None) -> VectorBundle:
    trans = {(a, b): lmatrix.identity(X.ring, X.dim, r)
             for a in range(X.nchart) for b in range(a + 1, X.nchart)}
    return VectorBundle(X, r, trans, name=name or f"trivial:{r}")


def bundle_algebra(op: str, *bundles: VectorBundle, k: int | None = None) -> VectorBundle:
    """dual, tensor, direct_sum, det, wedge (with k)."""
    if not bundles:
        raise ValueError("bundle_algebra needs at least one bundle")
    X = bundles[0].scheme
    if any(E.scheme is not X for E in bundles):
        raise SchemeError("bundles live on different schemes")
    keys = [(a, b) for a in range(X.nchart) for b in range(a + 1, X.nchart)]
    if op == "dual":
        E, = bundles
        trans = {key: lmatrix.transpose(lmatrix.inverse(E.g(*key))) for key in keys}
        return VectorBundle(X, E.rank, trans, name=f"({E.name})^*")
    if op == "direct_sum":
        trans = {key: lmatrix.block_diag([E.g(*key) for E in bundles], X.ring, X.dim) for key in keys}
        out = VectorBundle(X, sum(E.rank for E in bundles), trans,
                           name=" + ".join(E.name for E in bundles))
        out.summands = list(bundles)
        return out
    if op == "tensor":
        out = bundles[0]
        for F in bundles[1:]:
            trans = {key: lmatrix.kron(out.g(*key), F.g(*key)) for key in keys}
            out = VectorBundle(X, out.rank * F.rank, trans, name=f"{out.name} (x) {F.name}")
        return out
    if op == "det":
        E, = bundles
        trans = {key: [[lmatrix.det(E.g(*key))]] for key in keys}
        return VectorBundle(X, 1, trans, name=f"det({E.name})")
    if op == "wedge":
        E, = bundles
        if k is None or k < 0:
            raise ValueError("wedge needs k >= 0")
        basis = power_basis("Wedge", k, E.rank)
        pos = {b: i for i, b in enumerate(basis)}
        trans = {}
        for key in keys:
            g = E.g(*key)
            cols = [{i: g[i][j] for i in range(E.rank) if not g[i][j].is_zero()} for j in range(E.rank)]
            induced = induced_columns("Wedge", k, cols, lmatrix.PASSTHROUGH)
            m = lmatrix.zeros(X.ring, X.dim, len(basis))
            for j, col in enumerate(induced):
                for t, v in col.items():
                    m[pos[t]][j] = v
            trans[key] = m
        return VectorBundle(X, len(basis), trans, name=f"wedge^{k}({E.name})")
    raise ValueError(f"unknown bundle operation {op!r}")


def parse_bundle(text: str, X: CoveredScheme, named: dict | None = None) -> VectorBundle:
    """Mini-language: ``O(d)``, ``O(a)+O(b)+...``, ``trivial:r``, or a named bundle."""
    named = named or {}
    parts = [p.strip() for p in str(text).split("+")]
    if not parts or any(not p for p in parts):
        raise SchemeError(f"cannot parse bundle {text!r}")
    out = []
    for p in parts:
        if p in named:
            out.append(named[p])
        elif p.startswith("O(") and p.endswith(")"):
            try:
                d = int(p[2:-1])
            except ValueError:
                raise SchemeError(f"cannot parse twist in {p!r}") from None
            out.append(line_bundle(X, d))
        elif p.startswith("trivial:"):
            try:
                r = int(p.split(":", 1)[1])
            except ValueError:
                raise SchemeError(f"cannot parse rank in {p!r}") from None
            if r < 1:
                raise SchemeError("trivial bundle rank must be >= 1")
            out.append(trivial_bundle(X, r))
        else:
            raise SchemeError(f"unknown bundle {p!r}")
    if len(out) == 1:
        return out[0]
    return bundle_algebra("direct_sum", *out)


def bundle_from_spec(spec, X: CoveredScheme, name=None) -> VectorBundle:
    """Transition matrices from the JSON document.

    Accepts ``{"0,1": [["z^-1"]], ...}`` or ``[{"pair": [0, 1], "matrix": [...]}, ...]``;
    entries are strings in the variables of the second chart.
    """
    items = []
    if isinstance(spec, dict) and "transitions" in spec:
        spec = spec["transitions"]
    if isinstance(spec, dict):
        for k, m in spec.items():
            a, b = (int(x) for x in str(k).replace("-", ",").split(","))
            items.append((a, b, m))
    elif isinstance(spec, list):
        for ent in spec:
            a, b = ent["pair"]
            items.append((int(a), int(b), ent["matrix"]))
    else:
        raise SchemeError(f"bundle {name}: expected a dict or list of transitions")
    trans = {}
    rank = None
    for a, b, m in items:
        if a == b:
            raise SchemeError(f"bundle {name}: transition ({a}, {b}) on a single chart")
        mat = [[X.parse(x, b) for x in row] for row in m]
        if a > b:
            mat = _flip(mat, X, a, b)
            a, b = b, a
        trans[(a, b)] = mat
        rank = len(mat) if rank is None else rank
    if rank is None:
        raise SchemeError(f"bundle {name}: no transitions given")
    return VectorBundle(X, rank, trans, name=name)


def _flip(mat, X, a, b):
    """Given g_ab (a > b) in chart b, return g_ba = g_ab^{-1} in chart a."""
    inv = lmatrix.inverse(mat)
    return [[X.move(x, b, a) for x in row] for row in inv]
