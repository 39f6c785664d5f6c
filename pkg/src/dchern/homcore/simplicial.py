"""Truncated simplicial modules and the Dold-Kan functors Gamma and N.

Conventions: the normalized complex is ``N_n = \\cap_{i<n} ker d_i`` with
differential ``d_n``; correspondingly the Dold-Kan ``Gamma`` sends the top
coface ``[n-1] -> [n]`` (the one missing ``n``) to the differential of C.
"""
from __future__ import annotations

from itertools import combinations

from .complexes import ChainComplex, ComplexError
from .functors import induced_columns, power_basis, power_rank
from .matrix import ZZ, Matrix, _dense_snf, _reduced_echelon, kernel_basis, vstack


class SimplicialError(ValueError):
    pass


class SimplicialModule:
    """Levels ``0..T`` of a simplicial module of finite free modules.

    ``faces[(n, i)]``: level n -> n-1 (0 <= i <= n, 1 <= n <= T).
    ``degeneracies[(n, i)]``: level n -> n+1 (0 <= i <= n, n+1 <= T).
    """

    def __init__(self, ring, ranks, faces, degeneracies, check=True, labels=None):
        self.ring = ring
        self.ranks = list(ranks)
        self.T = len(self.ranks) - 1
        self.faces = dict(faces)
        self.degeneracies = dict(degeneracies)
        self.labels = labels
        T = self.T
        for n in range(1, T + 1):
            for i in range(n + 1):
                m = self.faces.get((n, i))
                if m is None or m.shape != (self.ranks[n - 1], self.ranks[n]):
                    raise SimplicialError(f"face d_{i} on level {n} missing or misshapen")
        for n in range(T):
            for i in range(n + 1):
                m = self.degeneracies.get((n, i))
                if m is None or m.shape != (self.ranks[n + 1], self.ranks[n]):
                    raise SimplicialError(f"degeneracy s_{i} on level {n} missing or misshapen")
        if check:
            self.check_identities()

    def d(self, n, i):
        return self.faces[(n, i)]

    def s(self, n, i):
        return self.degeneracies[(n, i)]

    def check_identities(self):
        T = self.T
        d, s = self.d, self.s
        # d_i d_j = d_{j-1} d_i  (i < j), on level n
        for n in range(2, T + 1):
            for j in range(n + 1):
                for i in range(j):
                    if d(n - 1, i) @ d(n, j) != d(n - 1, j - 1) @ d(n, i):
                        raise SimplicialError(f"d_{i} d_{j} != d_{j - 1} d_{i} on level {n}")
        # s_i s_j = s_{j+1} s_i  (i <= j), on level n
        for n in range(T - 1):
            for j in range(n + 1):
                for i in range(j + 1):
                    if s(n + 1, i) @ s(n, j) != s(n + 1, j + 1) @ s(n, i):
                        raise SimplicialError(f"s_{i} s_{j} != s_{j + 1} s_{i} on level {n}")
        # d_i s_j, on level n (s_j: n -> n+1, d_i: n+1 -> n)
        for n in range(T):
            ident = Matrix.identity(self.ring, self.ranks[n])
            for j in range(n + 1):
                for i in range(n + 2):
                    lhs = d(n + 1, i) @ s(n, j)
                    if i < j:
                        rhs = s(n - 1, j - 1) @ d(n, i)
                    elif i in (j, j + 1):
                        rhs = ident
                    else:
                        rhs = s(n - 1, j) @ d(n, i - 1)
                    if lhs != rhs:
                        raise SimplicialError(f"d_{i} s_{j} identity fails on level {n}")

    def __repr__(self):
        return f"SimplicialModule({self.ring}, ranks={self.ranks})"


# ---------------------------------------------------------------- Dold-Kan

def surjections(n, k):
    """Monotone surjections [n] ->> [k] as value tuples, lexicographic."""
    if k > n or k < 0:
        return []
    out = []
    # choose the k positions 1..n where the value steps up
    for steps in combinations(range(1, n + 1), k):
        vals, v, it = [], 0, iter(steps)
        nxt = next(it, None)
        for x in range(n + 1):
            if x == nxt:
                v += 1
                nxt = next(it, None)
            vals.append(v)
        out.append(tuple(vals))
    return out


def coface(n, i):
    """delta^i: [n-1] -> [n] skipping i."""
    return tuple(x if x < i else x + 1 for x in range(n))


def codegeneracy(n, i):
    """sigma^i: [n+1] -> [n] hitting i twice."""
    return tuple(x if x <= i else x - 1 for x in range(n + 2))


def gamma_basis(C: ChainComplex, n):
    basis = []
    for k in range(0, n + 1):
        r = C.rank(k)
        if not r:
            continue
        for sigma in surjections(n, k):
            for b in range(r):
                basis.append((sigma, b))
    return basis


def _gamma_operator(C, src_basis, tgt_index, theta, ring):
    """Matrix of theta^*: Gamma(C)_n -> Gamma(C)_m for theta: [m] -> [n]."""
    cols = []
    for sigma, b in src_basis:
        k = sigma[-1]
        comp = tuple(sigma[x] for x in theta)
        image = sorted(set(comp))
        col = {}
        if image == list(range(k + 1)):
            col[tgt_index[(comp, b)]] = ring.one
        elif image == list(range(k)):
            pos = {v: idx for idx, v in enumerate(image)}
            tau = tuple(pos[v] for v in comp)
            dk = C.d(k)
            for a, v in dk.columns()[b].items():
                col[tgt_index[(tau, a)]] = v
        cols.append(col)
    return Matrix.from_columns(ring, len(tgt_index), cols)


def dold_kan_gamma(C: ChainComplex, T: int) -> SimplicialModule:
    """Gamma(C) truncated at level T: level n is the sum over [n] ->> [k] of C_k."""
    if C.lo < 0 and any(C.rank(k) for k in range(C.lo, 0)):
        raise ComplexError("Dold-Kan needs a complex concentrated in degrees >= 0")
    if T < 0:
        raise ValueError("truncation level must be >= 0")
    ring = C.ring
    bases = [gamma_basis(C, n) for n in range(T + 1)]
    index = [{b: i for i, b in enumerate(B)} for B in bases]
    faces, degens = {}, {}
    for n in range(1, T + 1):
        for i in range(n + 1):
            faces[(n, i)] = _gamma_operator(C, bases[n], index[n - 1], coface(n, i), ring)
    for n in range(T):
        for i in range(n + 1):
            degens[(n, i)] = _gamma_operator(C, bases[n], index[n + 1], codegeneracy(n, i), ring)
    return SimplicialModule(ring, [len(B) for B in bases], faces, degens, labels=bases)


# ---------------------------------------------------------------- normalization

def _solve_in_basis(K: Matrix, Y: Matrix) -> Matrix:
    """X with K X = Y, for K of full column rank and Y in its column span."""
    ring = K.ring
    k = K.ncols
    if k == 0 or Y.ncols == 0:
        return Matrix.zeros(ring, k, Y.ncols)
    if ring == ZZ:
        U, D, V = _dense_snf(K.to_dense())
        Ud = Matrix.from_dense(ZZ, U)
        UY = (Ud @ Y).to_dense()
        Z = []
        for i in range(k):
            di = D[i][i]
            row = []
            for v in UY[i]:
                if v % di:
                    raise SimplicialError("image not in the integral span of the basis")
                row.append(v // di)
            Z.append(row)
        for i in range(k, K.nrows):
            if any(UY[i]):
                raise SimplicialError("image not in the span of the basis")
        return Matrix.from_dense(ZZ, V) @ Matrix.from_dense(ZZ, Z)
    aug = Matrix(ring, K.nrows, k + Y.ncols,
                 [{**rk, **{k + j: v for j, v in ry.items()}} for rk, ry in zip(K.rows, Y.rows)])
    piv = _reduced_echelon(aug)
    if any(c >= k for c in piv) or len(piv) != k:
        raise SimplicialError("image not in the span of the basis")
    rows = [{} for _ in range(k)]
    for c, r in piv.items():
        rows[c] = {j - k: v for j, v in r.items() if j >= k}
    return Matrix(ring, k, Y.ncols, rows)


def normalized_chains(S: SimplicialModule, method="kernel") -> ChainComplex:
    """The normalized (Moore) complex of S in degrees 0..T.

    ``method="kernel"``: N_n = intersection of ker d_i (i < n) with a chosen
    basis, differential d_n.  ``method="quotient"``: the isomorphic complex
    C_n / D_n where D is spanned by degenerate basis vectors; only valid when
    every degeneracy sends basis vectors to signed basis vectors, which is the
    case for F^p(Gamma(C)).
    """
    if method == "quotient":
        return _degenerate_quotient(S)
    if method != "kernel":
        raise ValueError(f"unknown method {method!r}")
    ring = S.ring
    bases = []
    for n in range(S.T + 1):
        if n == 0:
            bases.append(Matrix.identity(ring, S.ranks[0]))
            continue
        stacked = vstack([S.d(n, i) for i in range(n)])
        kb = kernel_basis(stacked)
        bases.append(Matrix.from_columns(ring, S.ranks[n], kb))
    ranks = {n: bases[n].ncols for n in range(S.T + 1)}
    diffs = {}
    for n in range(1, S.T + 1):
        Y = S.d(n, n) @ bases[n]
        diffs[n] = _solve_in_basis(bases[n - 1], Y)
    return ChainComplex(ring, ranks, diffs)


def nondegenerate_indices(S: SimplicialModule, n):
    if n == 0:
        return list(range(S.ranks[0]))
    hit = set()
    for i in range(n):
        m = S.s(n - 1, i)
        for c in m.columns():
            if len(c) != 1:
                raise SimplicialError("degeneracy is not monomial; use the kernel method")
            (row, v), = c.items()
            if v not in (1, -1) and S.ring(v + 1) != 0 and S.ring(v - 1) != 0:
                raise SimplicialError("degeneracy is not monomial; use the kernel method")
            hit.add(row)
    return [j for j in range(S.ranks[n]) if j not in hit]


def _degenerate_quotient(S: SimplicialModule) -> ChainComplex:
    ring = S.ring
    keep = [nondegenerate_indices(S, n) for n in range(S.T + 1)]
    ranks = {n: len(keep[n]) for n in range(S.T + 1)}
    diffs = {}
    for n in range(1, S.T + 1):
        total = None
        for i in range(n + 1):
            m = S.d(n, i).select_columns(keep[n]).select_rows(keep[n - 1])
            m = m if i % 2 == 0 else -m
            total = m if total is None else total + m
        diffs[n] = total
    return ChainComplex(ring, ranks, diffs)


def apply_levelwise(S: SimplicialModule, functor, p, cap=20000) -> SimplicialModule:
    """F^p applied levelwise to S."""
    ring = S.ring
    ranks = [power_rank(functor, p, r) for r in S.ranks]
    if max(ranks) > cap:
        raise OverflowError(f"level rank {max(ranks)} exceeds the cap {cap}")
    bases = [power_basis(functor, p, r) for r in S.ranks]
    index = [{b: i for i, b in enumerate(B)} for B in bases]

    def lift(m: Matrix, tgt_level):
        cols = induced_columns(functor, p, m.columns(), ring)
        idx = index[tgt_level]
        return Matrix.from_columns(ring, ranks[tgt_level], [{idx[k]: v for k, v in c.items()} for c in cols])

    faces = {key: lift(m, key[0] - 1) for key, m in S.faces.items()}
    degens = {key: lift(m, key[0] + 1) for key, m in S.degeneracies.items()}
    return SimplicialModule(ring, ranks, faces, degens, check=False)
