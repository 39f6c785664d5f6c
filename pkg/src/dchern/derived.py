"""Dold-Puppe derived functors of Sym, Wedge and Gamma, and the decalage checks."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

from .homcore import ChainComplex, HomologyReport, homology
from .homcore.simplicial import apply_levelwise, dold_kan_gamma, normalized_chains

DEFAULT_CAP = 20000


class TruncationError(ValueError):
    pass


class GuardError(ValueError):
    pass


@dataclass(frozen=True)
class DerivedPowerRequest:
    functor: str
    p: int
    complex: ChainComplex
    T: int
    top_degree: int | None = None  # highest degree whose homology the caller will read

    def __post_init__(self):
        if self.functor not in ("Sym", "Wedge", "Gamma"):
            raise ValueError(f"unknown functor {self.functor!r}")
        if self.p < 0:
            raise ValueError("negative exponent")
        top = self.T - 1 if self.top_degree is None else self.top_degree
        if self.T < top + 1:
            raise TruncationError(f"truncation T={self.T} too small for degree {top} (need T >= {top + 1})")


def derived_power(req: DerivedPowerRequest, cap=DEFAULT_CAP, method="quotient") -> ChainComplex:
    """Normalized chains of F^p applied levelwise to Gamma(C), levels 0..T.

    Homology in degrees <= T - 1 is L F^p(C); degree T is not meaningful.
    """
    C = req.complex
    if any(C.rank(k) for k in range(C.lo, 0)):
        raise ValueError("input must be concentrated in degrees >= 0")
    S = dold_kan_gamma(C, req.T)
    if max(S.ranks) > cap:
        raise GuardError(f"Dold-Kan level rank {max(S.ranks)} exceeds cap {cap}")
    try:
        FS = apply_levelwise(S, req.functor, req.p, cap=cap)
    except OverflowError as e:
        raise GuardError(str(e)) from None
    return normalized_chains(FS, method=method)


def derived_homology(req: DerivedPowerRequest, **kw) -> HomologyReport:
    top = req.T - 1 if req.top_degree is None else req.top_degree
    N = derived_power(req, **kw)
    return homology(N, degrees=range(0, top + 1))


DECALAGE_KINDS = ("sym_shift1", "wedge_shift1", "sym_shift2")


@dataclass
class DecalageReport:
    kind: str
    ring: object
    r: int
    p: int
    expected_degree: int
    expected_rank: int
    homology: HomologyReport
    ok: bool
    notes: list = field(default_factory=list)

    def summary(self):
        got = {n: (self.homology.rank(n), self.homology.torsion(n)) for n in self.homology.nonzero_degrees()}
        return (f"{self.kind} r={self.r} p={self.p} over {self.ring}: expected rank {self.expected_rank} "
                f"in degree {self.expected_degree}, got {got or 'zero'} -> {'ok' if self.ok else 'FAIL'}")


def verify_decalage(kind, r, p, ring, max_rank=4, max_p=3, extra_levels=1):
    """Check one decalage identity on M = ring^r.

    sym_shift1:   L Sym^p(M[1])   = Wedge^p M [p]
    wedge_shift1: L Wedge^p(M[1]) = Gamma^p M [p]
    sym_shift2:   L Sym^p(M[2])   = Gamma^p M [2p]
    """
    if r > max_rank or p > max_p:
        raise GuardError(f"r={r}, p={p} exceeds the guard (r <= {max_rank}, p <= {max_p})")
    if kind == "sym_shift1":
        functor, shift, degree, expected = "Sym", 1, p, comb(r, p)
    elif kind == "wedge_shift1":
        functor, shift, degree, expected = "Wedge", 1, p, comb(r + p - 1, p) if r else int(p == 0)
    elif kind == "sym_shift2":
        functor, shift, degree, expected = "Sym", 2, 2 * p, comb(r + p - 1, p) if r else int(p == 0)
    else:
        raise ValueError(f"unknown decalage kind {kind!r}")
    C = ChainComplex.concentrated(ring, r, shift)
    top = degree + extra_levels - 1 if extra_levels > 0 else degree
    top = max(top, degree)
    req = DerivedPowerRequest(functor, p, C, T=top + 1, top_degree=top)
    H = derived_homology(req)
    ok = True
    notes = []
    for n in range(0, top + 1):
        rk, tors = H.rank(n), H.torsion(n)
        want = expected if n == degree else 0
        if rk != want or tors:
            ok = False
            notes.append(f"degree {n}: rank {rk} torsion {list(tors)}, expected rank {want}")
    return DecalageReport(kind, ring, r, p, degree, expected, H, ok, notes)
