"""Multilinear power functors Sym^p, Wedge^p, Gamma^p, Tensor^p on free modules.

Basis conventions (fixed so induced matrices are deterministic):

* Sym^p and Gamma^p: sorted multisets of p indices, lexicographic order.
  For Gamma^p the multiset ``nu`` stands for the orbit sum of the tensor
  word ``nu`` under the symmetric group (the divided-power basis).
* Wedge^p: strictly increasing index tuples, lexicographic.
* Tensor^p: all words, lexicographic (Kronecker order).
"""
from __future__ import annotations

from itertools import combinations, combinations_with_replacement, permutations, product
from math import comb

from .matrix import Matrix

FUNCTORS = ("Sym", "Wedge", "Gamma", "Tensor")


def power_rank(functor, p, r):
    if p < 0:
        raise ValueError("negative exponent")
    if functor in ("Sym", "Gamma"):
        if r == 0:
            return int(p == 0)
        return comb(r + p - 1, p)
    if functor == "Wedge":
        return comb(r, p)
    if functor == "Tensor":
        return r**p
    raise ValueError(f"unknown functor {functor!r}")


def power_basis(functor, p, r):
    if p < 0:
        raise ValueError("negative exponent")
    if functor in ("Sym", "Gamma"):
        return list(combinations_with_replacement(range(r), p))
    if functor == "Wedge":
        return list(combinations(range(r), p))
    if functor == "Tensor":
        return list(product(range(r), repeat=p))
    raise ValueError(f"unknown functor {functor!r}")


def _sort_sign(seq):
    """Sign of the permutation sorting ``seq`` (0 if there is a repeat)."""
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    s = list(seq)
    for i in range(len(s)):
        for j in range(i + 1, len(s)):
            if s[i] > s[j]:
                sign = -sign
    return sign


def _distinct_perms(word):
    return set(permutations(word))


def induced_columns(functor, p, columns, ring):
    """Images of the basis of F^p(source) under F^p(f), as sparse columns.

    ``columns[j]`` is the image of source basis vector j (``{row: value}``).
    Returns columns indexed by ``power_basis(functor, p, len(columns))`` whose
    keys are target basis *tuples*.
    """
    r = len(columns)
    out = []
    for nu in power_basis(functor, p, r):
        acc: dict = {}
        if functor == "Gamma":
            for w in _distinct_perms(nu):
                for choice in product(*(columns[j].items() for j in w)):
                    rows = tuple(a for a, _ in choice)
                    if any(x > y for x, y in zip(rows, rows[1:])):
                        continue
                    c = 1
                    for _, v in choice:
                        c *= v
                    acc[rows] = acc.get(rows, 0) + c
        else:
            for choice in product(*(columns[j].items() for j in nu)):
                rows = tuple(a for a, _ in choice)
                c = 1
                for _, v in choice:
                    c *= v
                if functor == "Sym":
                    key = tuple(sorted(rows))
                elif functor == "Wedge":
                    s = _sort_sign(rows)
                    if s == 0:
                        continue
                    key = tuple(sorted(rows))
                    c *= s
                else:
                    key = rows
                acc[key] = acc.get(key, 0) + c
        col = {}
        for k, v in acc.items():
            v = ring(v)
            if v != 0:
                col[k] = v
        out.append(col)
    return out


def power_functor_map(functor, p, f: Matrix) -> Matrix:
    """Matrix of F^p(f) for any (not necessarily square) f."""
    if p < 0:
        raise ValueError("negative exponent")
    tgt_basis = power_basis(functor, p, f.nrows)
    pos = {b: i for i, b in enumerate(tgt_basis)}
    cols = induced_columns(functor, p, f.columns(), f.ring)
    return Matrix.from_columns(f.ring, len(tgt_basis), [{pos[k]: v for k, v in c.items()} for c in cols])


def power_functor(functor, p, rank, f: Matrix | None = None):
    """``(rank of F^p(R^rank), matrix of F^p(f))``; ``f`` defaults to nothing (rank only)."""
    n = power_rank(functor, p, rank)
    if f is None:
        return n, None
    if f.shape != (rank, rank):
        raise ValueError(f"expected a {rank}x{rank} endomorphism")
    return n, power_functor_map(functor, p, f)
