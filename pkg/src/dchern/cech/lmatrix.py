"""Small dense matrices with LaurentPoly (or form) entries, as lists of lists."""
from __future__ import annotations

from itertools import permutations

from ..rings.forms import DifferentialForm
from ..rings.laurent import LaurentPoly


class _Passthrough:
    """Minimal 'ring' whose elements are already normalized (for functor code)."""

    one = 1

    def __call__(self, x):
        return x


PASSTHROUGH = _Passthrough()


def identity(ring, nvars, r):
    return [[LaurentPoly.one(ring, nvars) if i == j else LaurentPoly.zero(ring, nvars) for j in range(r)]
            for i in range(r)]


def zeros(ring, nvars, r, c=None):
    c = r if c is None else c
    return [[LaurentPoly.zero(ring, nvars) for _ in range(c)] for _ in range(r)]


def mul(a, b):
    n, m, k = len(a), len(b), len(b[0]) if b else 0
    if a and len(a[0]) != m:
        raise ValueError("shape mismatch")
    out = []
    for i in range(n):
        row = []
        for j in range(k):
            acc = None
            for t in range(m):
                x, y = a[i][t], b[t][j]
                if x.is_zero() or y.is_zero():
                    continue
                v = x * y if not isinstance(x, DifferentialForm) else x.wedge(y) if isinstance(y, DifferentialForm) else x * y
                acc = v if acc is None else acc + v
            if acc is None:
                acc = _zero_like(a[i][0] if m else None, b[0][j] if m else None)
            row.append(acc)
        out.append(row)
    return out


def _zero_like(x, y):
    for z in (x, y):
        if isinstance(z, DifferentialForm):
            return DifferentialForm.zero(z.ring, z.nvars, 0)
    z = x if x is not None else y
    return LaurentPoly.zero(z.ring, z.nvars)


def transpose(a):
    return [list(r) for r in zip(*a)] if a else []


def det(a):
    n = len(a)
    if n == 0:
        raise ValueError("empty matrix")
    if n == 1:
        return a[0][0]
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    total = None
    for j in range(n):
        if a[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in a[1:]]
        term = a[0][j] * det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    if total is None:
        return LaurentPoly.zero(a[0][0].ring, a[0][0].nvars)
    return total


def inverse(a):
    """Inverse via the adjugate; the determinant must be a unit."""
    n = len(a)
    d = det(a)
    try:
        dinv = d.unit_inverse()
    except ZeroDivisionError:
        raise ZeroDivisionError("matrix is not invertible over the overlap ring") from None
    if n == 1:
        return [[dinv]]
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:i] + row[i + 1:] for k, row in enumerate(a) if k != j]
            c = det(minor)
            if (i + j) % 2:
                c = -c
            out[i][j] = c * dinv
    return out


def subs(a, images):
    return [[x.subs(images) for x in row] for row in a]


def equal(a, b):
    return len(a) == len(b) and all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def is_identity(a):
    return all((x - 1).is_zero() if i == j else x.is_zero() for i, row in enumerate(a) for j, x in enumerate(row))


def block_diag(blocks, ring, nvars):
    n = sum(len(b) for b in blocks)
    out = zeros(ring, nvars, n)
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                out[off + i][off + j] = x
        off += len(b)
    return out


def kron(a, b):
    out = []
    for ra in a:
        for rb in b:
            out.append([x * y for x in ra for y in rb])
    return out


def leibniz_det(a, one):
    """Determinant by the permutation expansion (independent of :func:`det`)."""
    n = len(a)
    total = None
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = one
        for i in range(n):
            term = term * a[i][perm[i]]
        if inv % 2:
            term = -term
        total = term if total is None else total + term
    return total
