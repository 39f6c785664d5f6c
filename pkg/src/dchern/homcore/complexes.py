"""Bounded chain complexes of finite free modules and their homology."""
from __future__ import annotations

from dataclasses import dataclass, field

from .matrix import Matrix, elementary_divisors, rank


class ComplexError(ValueError):
    pass


class ChainComplex:
    """Homologically graded complex ``C_hi -> ... -> C_lo``.

    ``differentials[n]`` is the matrix of ``d_n: C_n -> C_{n-1}`` (shape
    ``rank[n-1] x rank[n]``).  Missing differentials are zero.
    """

    def __init__(self, ring, ranks: dict, differentials: dict | None = None, check=True):
        self.ring = ring
        self.ranks = {n: r for n, r in ranks.items()}
        if not self.ranks:
            self.ranks = {0: 0}
        self.lo = min(self.ranks)
        self.hi = max(self.ranks)
        for n in range(self.lo, self.hi + 1):
            self.ranks.setdefault(n, 0)
        self.differentials = {}
        for n, d in (differentials or {}).items():
            if d.shape != (self.rank(n - 1), self.rank(n)):
                raise ComplexError(f"d_{n} has shape {d.shape}, expected {(self.rank(n - 1), self.rank(n))}")
            if d.ring != ring:
                d = d.change_ring(ring)
            self.differentials[n] = d
        if check:
            for n in range(self.lo + 2, self.hi + 1):
                if not (self.d(n - 1) @ self.d(n)).is_zero():
                    raise ComplexError(f"d_{n - 1} d_{n} != 0")

    def rank(self, n):
        return self.ranks.get(n, 0)

    def d(self, n):
        if n in self.differentials:
            return self.differentials[n]
        return Matrix.zeros(self.ring, self.rank(n - 1), self.rank(n))

    def degrees(self):
        return range(self.lo, self.hi + 1)

    @classmethod
    def concentrated(cls, ring, rank, degree):
        """``M[degree]`` for M free of the given rank."""
        return cls(ring, {degree: rank})

    def shift(self, k):
        return ChainComplex(self.ring, {n + k: r for n, r in self.ranks.items()},
                            {n + k: (d if k % 2 == 0 else -d) for n, d in self.differentials.items()},
                            check=False)

    def change_ring(self, ring):
        return ChainComplex(ring, self.ranks, {n: d.change_ring(ring) for n, d in self.differentials.items()})

    def __repr__(self):
        return f"ChainComplex({self.ring}, ranks={dict(sorted(self.ranks.items()))})"


@dataclass
class HomologyReport:
    """Per degree: free rank and torsion orders (each dividing the next)."""

    ring: object
    groups: dict = field(default_factory=dict)

    def rank(self, n):
        return self.groups.get(n, (0, ()))[0]

    def torsion(self, n):
        return self.groups.get(n, (0, ()))[1]

    def is_zero(self, n):
        r, t = self.groups.get(n, (0, ()))
        return r == 0 and not t

    def nonzero_degrees(self):
        return sorted(n for n in self.groups if not self.is_zero(n))

    def __eq__(self, other):
        if not isinstance(other, HomologyReport):
            return NotImplemented
        keys = set(self.groups) | set(other.groups)
        return all(self.groups.get(k, (0, ())) == other.groups.get(k, (0, ())) for k in keys)

    def as_dict(self):
        return {str(n): {"rank": r, "torsion": list(t)} for n, (r, t) in sorted(self.groups.items())}

    def __str__(self):
        parts = []
        for n, (r, t) in sorted(self.groups.items()):
            pieces = ([f"Z^{r}" if r != 1 else "Z"] if r else []) + [f"Z/{k}" for k in t]
            if self.ring.is_field:
                pieces = [f"{self.ring}^{r}"] if r else []
            parts.append(f"H_{n} = " + (" + ".join(pieces) if pieces else "0"))
        return ", ".join(parts)


def _rank_and_divisors(d: Matrix):
    ring = d.ring
    if ring.is_field:
        return rank(d), []
    divs = elementary_divisors(d)
    return len(divs), [x for x in divs if x != 1]


def homology_from_maps(ring, dims: dict, maps: dict, degrees=None) -> HomologyReport:
    """Homology of ``... -> C_{n+1} --maps[n+1]--> C_n --maps[n]--> C_{n-1} -> ...``."""
    info = {n: _rank_and_divisors(d) for n, d in maps.items()}
    report = HomologyReport(ring)
    for n in (degrees if degrees is not None else sorted(dims)):
        out_rank = info[n][0] if n in info else 0
        in_rank, tors = info.get(n + 1, (0, []))
        report.groups[n] = (dims.get(n, 0) - out_rank - in_rank, tuple(tors))
    return report


def homology(C: ChainComplex, degrees=None) -> HomologyReport:
    """``H_n = ker d_n / im d_{n+1}``; ranks over fields, ranks and torsion over ZZ."""
    ring = C.ring
    if not ring.is_field and ring.characteristic != 0:
        raise ValueError(f"homology over {ring} is not supported")
    maps = {n: C.d(n) for n in C.degrees() if n - 1 in C.ranks and C.rank(n) and C.rank(n - 1)}
    return homology_from_maps(ring, C.ranks, maps, degrees)
