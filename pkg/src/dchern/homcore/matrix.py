"""Sparse exact matrices and the elimination routines behind homology.

Rows are stored as ``{column: value}`` dicts without zeros.  Over a field we
do plain Gaussian elimination; over ZZ we eliminate unit pivots sparsely and
hand the (usually tiny) remainder to a dense Smith normal form.
"""
from __future__ import annotations

from math import gcd

from ..rings.scalars import ZZ, Ring


class Matrix:
    __slots__ = ("ring", "nrows", "ncols", "rows")

    def __init__(self, ring: Ring, nrows: int, ncols: int, rows=None):
        self.ring = ring
        self.nrows = nrows
        self.ncols = ncols
        if rows is None:
            rows = [{} for _ in range(nrows)]
        if len(rows) != nrows:
            raise ValueError("row count mismatch")
        self.rows = rows

    @classmethod
    def zeros(cls, ring, nrows, ncols):
        return cls(ring, nrows, ncols)

    @classmethod
    def identity(cls, ring, n):
        return cls(ring, n, n, [{i: ring.one} for i in range(n)])

    @classmethod
    def from_dense(cls, ring, data, ncols=None):
        data = [list(r) for r in data]
        if ncols is None:
            ncols = len(data[0]) if data else 0
        rows = []
        for r in data:
            if len(r) != ncols:
                raise ValueError("ragged matrix")
            row = {}
            for j, v in enumerate(r):
                v = ring(v)
                if v != 0:
                    row[j] = v
            rows.append(row)
        return cls(ring, len(data), ncols, rows)

    @classmethod
    def from_columns(cls, ring, nrows, columns):
        """Build from a list of sparse columns ``{row: value}``."""
        rows = [{} for _ in range(nrows)]
        for j, col in enumerate(columns):
            for i, v in col.items():
                v = ring(v)
                if v != 0:
                    rows[i][j] = v
        return cls(ring, nrows, len(columns), rows)

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def to_dense(self):
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for i, row in enumerate(self.rows):
            for j, v in row.items():
                out[i][j] = v
        return out

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i].get(j, 0)

    def columns(self):
        cols = [{} for _ in range(self.ncols)]
        for i, row in enumerate(self.rows):
            for j, v in row.items():
                cols[j][i] = v
        return cols

    def transpose(self):
        return Matrix(self.ring, self.ncols, self.nrows, self.columns())

    def nnz(self):
        return sum(len(r) for r in self.rows)

    def is_zero(self):
        return all(not r for r in self.rows)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        ring = self.ring
        out = []
        orows = other.rows
        for row in self.rows:
            acc: dict = {}
            for k, a in row.items():
                for j, b in orows[k].items():
                    acc[j] = acc.get(j, 0) + a * b
            out.append({j: v for j, v in ((j, ring(v)) for j, v in acc.items()) if v != 0})
        return Matrix(ring, self.nrows, other.ncols, out)

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        ring = self.ring
        out = []
        for r1, r2 in zip(self.rows, other.rows):
            acc = dict(r1)
            for j, v in r2.items():
                s = ring(acc.get(j, 0) + v)
                if s == 0:
                    acc.pop(j, None)
                else:
                    acc[j] = s
            out.append(acc)
        return Matrix(ring, self.nrows, self.ncols, out)

    def __neg__(self):
        ring = self.ring
        return Matrix(ring, self.nrows, self.ncols, [{j: ring(-v) for j, v in r.items()} for r in self.rows])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        ring = self.ring
        rows = [{j: ring(v * c) for j, v in r.items()} for r in self.rows]
        return Matrix(ring, self.nrows, self.ncols, [{j: v for j, v in r.items() if v != 0} for r in rows])

    def change_ring(self, ring):
        rows = [{j: ring(v) for j, v in r.items()} for r in self.rows]
        return Matrix(ring, self.nrows, self.ncols, [{j: v for j, v in r.items() if v != 0} for r in rows])

    def select_rows(self, idx):
        return Matrix(self.ring, len(idx), self.ncols, [dict(self.rows[i]) for i in idx])

    def select_columns(self, idx):
        pos = {j: k for k, j in enumerate(idx)}
        rows = [{pos[j]: v for j, v in r.items() if j in pos} for r in self.rows]
        return Matrix(self.ring, self.nrows, len(idx), rows)

    def __repr__(self):
        return f"Matrix({self.ring}, {self.to_dense()})"


def vstack(mats, ncols=None, ring=None):
    if not mats:
        return Matrix(ring, 0, ncols or 0)
    ncols = mats[0].ncols
    rows = []
    for m in mats:
        if m.ncols != ncols:
            raise ValueError("column mismatch in vstack")
        rows.extend(dict(r) for r in m.rows)
    return Matrix(mats[0].ring, len(rows), ncols, rows)


def hstack(mats):
    nrows = mats[0].nrows
    rows = [{} for _ in range(nrows)]
    off = 0
    for m in mats:
        if m.nrows != nrows:
            raise ValueError("row mismatch in hstack")
        for i, r in enumerate(m.rows):
            for j, v in r.items():
                rows[i][off + j] = v
        off += m.ncols
    return Matrix(mats[0].ring, nrows, off, rows)


def block_diag(mats, ring=None):
    ring = ring or mats[0].ring
    nr = sum(m.nrows for m in mats)
    nc = sum(m.ncols for m in mats)
    rows = []
    off = 0
    for m in mats:
        for r in m.rows:
            rows.append({off + j: v for j, v in r.items()})
        off += m.ncols
    return Matrix(ring, nr, nc, rows)


def kron(a: Matrix, b: Matrix) -> Matrix:
    ring = a.ring
    rows = []
    for ra in a.rows:
        for rb in b.rows:
            row = {}
            for j1, v1 in ra.items():
                for j2, v2 in rb.items():
                    v = ring(v1 * v2)
                    if v != 0:
                        row[j1 * b.ncols + j2] = v
            rows.append(row)
    return Matrix(ring, a.nrows * b.nrows, a.ncols * b.ncols, rows)


# ---------------------------------------------------------------- fields

def _field_echelon(mat: Matrix):
    """Row-reduce over a field; returns list of (pivot_col, row) in echelon form."""
    ring = mat.ring
    pivots: dict = {}  # pivot col -> normalized row (pivot entry 1)
    order = []
    for row in mat.rows:
        r = dict(row)
        while r:
            # reduce by existing pivots, leading column first
            c = min(r)
            if c in pivots:
                f = r[c]
                for j, v in pivots[c].items():
                    s = ring(r.get(j, 0) - f * v)
                    if s == 0:
                        r.pop(j, None)
                    else:
                        r[j] = s
                continue
            inv = ring.inv(r[c])
            r = {j: ring(v * inv) for j, v in r.items()}
            pivots[c] = r
            order.append(c)
            break
    return pivots, order


def _reduced_echelon(mat: Matrix):
    ring = mat.ring
    pivots, _ = _field_echelon(mat)
    for c in sorted(pivots, reverse=True):
        pr = pivots[c]
        for c2, r in pivots.items():
            if c2 == c or c not in r:
                continue
            f = r[c]
            for j, v in pr.items():
                s = ring(r.get(j, 0) - f * v)
                if s == 0:
                    r.pop(j, None)
                else:
                    r[j] = s
    return pivots


def rank(mat: Matrix) -> int:
    if mat.ring.is_field:
        return len(_field_echelon(mat)[0])
    if mat.ring == ZZ:
        return len(elementary_divisors(mat))
    raise ValueError(f"rank not supported over {mat.ring}")


def kernel_basis(mat: Matrix):
    """Basis of the right kernel, as a list of sparse column vectors ``{col: value}``.

    Over ZZ the basis spans the saturated kernel lattice.
    """
    ring = mat.ring
    if ring == ZZ:
        return _int_kernel(mat)
    if not ring.is_field:
        raise ValueError(f"kernel not supported over {ring}")
    pivots = _reduced_echelon(mat)
    free = [j for j in range(mat.ncols) if j not in pivots]
    basis = []
    for f in free:
        vec = {f: ring.one}
        for c, r in pivots.items():
            v = r.get(f, 0)
            if v != 0:
                vec[c] = ring(-v)
        basis.append(vec)
    return basis


def solve(mat: Matrix, rhs):
    """A solution ``x`` (sparse dict) of ``mat @ x = rhs`` or ``None``.

    ``rhs`` is a dense list or a sparse dict indexed by row.
    """
    ring = mat.ring
    if isinstance(rhs, dict):
        rhs_d = [rhs.get(i, 0) for i in range(mat.nrows)]
    else:
        rhs_d = list(rhs)
    if ring == ZZ:
        return _int_solve(mat, rhs_d)
    if not ring.is_field:
        raise ValueError(f"solve not supported over {ring}")
    # augmented elimination
    aug_rows = []
    for r, b in zip(mat.rows, rhs_d):
        row = dict(r)
        b = ring(b)
        if b != 0:
            row[mat.ncols] = b
        aug_rows.append(row)
    aug = Matrix(ring, mat.nrows, mat.ncols + 1, aug_rows)
    pivots, _ = _field_echelon(aug)
    if mat.ncols in pivots:
        return None
    # back substitution with free variables = 0
    x: dict = {}
    for c in sorted(pivots, reverse=True):
        r = pivots[c]
        v = r.get(mat.ncols, 0)
        for j, a in r.items():
            if j != c and j != mat.ncols:
                v -= a * x.get(j, 0)
        v = ring(v)
        if v != 0:
            x[c] = v
    return x


# ---------------------------------------------------------------- integers

def elementary_divisors(mat: Matrix):
    """Nonzero invariant factors d_1 | d_2 | ... of an integer matrix."""
    if mat.ring != ZZ:
        raise ValueError("elementary divisors need an integer matrix")
    rows = [dict(r) for r in mat.rows if r]
    units = 0
    # column index -> set of row ids containing it
    colmap: dict = {}
    live = {}
    for rid, r in enumerate(rows):
        live[rid] = r
        for j in r:
            colmap.setdefault(j, set()).add(rid)
    progress = True
    while progress:
        progress = False
        for prid in list(live):
            prow = live.get(prid)
            if prow is None:
                continue
            pc = None
            for j, v in prow.items():
                if (v == 1 or v == -1) and (pc is None or len(colmap[j]) < len(colmap[pc])):
                    pc = j
            if pc is None:
                continue
            progress = True
            del live[prid]
            for j in prow:
                colmap[j].discard(prid)
            pv = prow[pc]
            for rid in list(colmap.get(pc, ())):
                r = live[rid]
                f = r[pc] * pv  # pv = +-1
                for j, v in prow.items():
                    s = r.get(j, 0) - f * v
                    if s == 0:
                        if j in r:
                            del r[j]
                            colmap[j].discard(rid)
                    else:
                        if j not in r:
                            colmap.setdefault(j, set()).add(rid)
                        r[j] = s
                if not r:
                    del live[rid]
            units += 1
            colmap.pop(pc, None)
    rest = [r for r in live.values() if r]
    divisors = [1] * units
    if rest:
        cols = sorted({j for r in rest for j in r})
        pos = {j: k for k, j in enumerate(cols)}
        dense = [[0] * len(cols) for _ in rest]
        for i, r in enumerate(rest):
            for j, v in r.items():
                dense[i][pos[j]] = v
        _, d, _ = _dense_snf(dense, want_transforms=False)
        for i in range(min(len(d), len(d[0]) if d else 0)):
            if d[i][i] != 0:
                divisors.append(abs(d[i][i]))
    divisors.sort()
    # the unit part and the dense remainder diagonalize independent blocks;
    # restore the divisibility chain
    return _normalize_chain(divisors)


def _normalize_chain(ds):
    """Turn any list of nonzero diagonal entries into invariant factors."""
    ds = [abs(d) for d in ds if d != 0]
    if all(d == 1 for d in ds):
        return ds
    # via prime-power decomposition: recompute with gcd/lcm sweeps
    ds = sorted(ds)
    changed = True
    while changed:
        changed = False
        for i in range(len(ds)):
            for j in range(i + 1, len(ds)):
                a, b = ds[i], ds[j]
                if b % a != 0:
                    g = gcd(a, b)
                    ds[i], ds[j] = g, a * b // g
                    changed = True
        ds.sort()
    return ds


def _dense_snf(a, want_transforms=True):
    """Smith normal form of a dense integer matrix: returns (U, D, V) with U a V = D."""
    m = len(a)
    n = len(a[0]) if m else 0
    d = [list(r) for r in a]
    U = [[int(i == j) for j in range(m)] for i in range(m)] if want_transforms else None
    V = [[int(i == j) for j in range(n)] for i in range(n)] if want_transforms else None

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in d:
            r[i], r[j] = r[j], r[i]
        if V is not None:
            for r in V:
                r[i], r[j] = r[j], r[i]

    def add_row(src, dst, f):  # row dst += f * row src
        rs, rd = d[src], d[dst]
        for k in range(n):
            if rs[k]:
                rd[k] += f * rs[k]
        if U is not None:
            us, ud = U[src], U[dst]
            for k in range(m):
                if us[k]:
                    ud[k] += f * us[k]

    def add_col(src, dst, f):  # col dst += f * col src
        for r in d:
            if r[src]:
                r[dst] += f * r[src]
        if V is not None:
            for r in V:
                if r[src]:
                    r[dst] += f * r[src]

    def neg_row(i):
        d[i] = [-x for x in d[i]]
        if U is not None:
            U[i] = [-x for x in U[i]]

    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero |entry| in the trailing block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = d[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            p = d[t][t]
            for i in range(t + 1, m):
                if d[i][t]:
                    q = d[i][t] // p
                    add_row(t, i, -q)
                    if d[i][t]:
                        done = False
            for j in range(t + 1, n):
                if d[t][j]:
                    q = d[t][j] // p
                    add_col(t, j, -q)
                    if d[t][j]:
                        done = False
            if done:
                # divisibility of the trailing block
                bad = None
                for i in range(t + 1, m):
                    for j in range(t + 1, n):
                        if d[i][j] % p:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                add_row(bad, t, 1)
                continue
            # move the smallest remaining entry of row/col t into the pivot
            best = (abs(d[t][t]), t, t)
            for i in range(t + 1, m):
                if d[i][t] and abs(d[i][t]) < best[0]:
                    best = (abs(d[i][t]), i, t)
            for j in range(t + 1, n):
                if d[t][j] and abs(d[t][j]) < best[0]:
                    best = (abs(d[t][j]), t, j)
            _, i, j = best
            if i != t:
                swap_rows(t, i)
            if j != t:
                swap_cols(t, j)
        if d[t][t] < 0:
            neg_row(t)
        t += 1
    return U, d, V


def smith_normal_form(mat):
    """``(U, D, V)`` with ``U @ M @ V == D``, U and V unimodular, d_1 | d_2 | ...

    Accepts a :class:`Matrix` over ZZ or a dense list of integer rows.
    """
    if isinstance(mat, Matrix):
        if mat.ring != ZZ:
            raise ValueError("Smith normal form needs an integer matrix")
        dense = mat.to_dense()
        m, n = mat.shape
    else:
        dense = [list(map(int, r)) for r in mat]
        m = len(dense)
        n = len(dense[0]) if m else 0
    if m == 0 or n == 0:
        return (Matrix.identity(ZZ, m), Matrix.zeros(ZZ, m, n), Matrix.identity(ZZ, n))
    U, D, V = _dense_snf(dense)
    return (Matrix.from_dense(ZZ, U), Matrix.from_dense(ZZ, D), Matrix.from_dense(ZZ, V))


def _int_kernel(mat: Matrix):
    m, n = mat.shape
    if n == 0:
        return []
    if m == 0 or mat.is_zero():
        return [{j: 1} for j in range(n)]
    _, D, V = _dense_snf(mat.to_dense())
    r = sum(1 for i in range(min(m, n)) if D[i][i] != 0)
    basis = []
    for j in range(r, n):
        vec = {i: V[i][j] for i in range(n) if V[i][j] != 0}
        basis.append(vec)
    return basis


def _int_solve(mat: Matrix, rhs):
    m, n = mat.shape
    if m == 0:
        return {}
    if n == 0:
        return {} if all(b == 0 for b in rhs) else None
    U, D, V = _dense_snf(mat.to_dense())
    y = [sum(U[i][k] * rhs[k] for k in range(m)) for i in range(m)]
    z = [0] * n
    for i in range(m):
        di = D[i][i] if i < n else 0
        if di == 0:
            if y[i] != 0:
                return None
        else:
            if y[i] % di:
                return None
            z[i] = y[i] // di
    x = {}
    for i in range(n):
        v = sum(V[i][k] * z[k] for k in range(n))
        if v:
            x[i] = v
    return x
