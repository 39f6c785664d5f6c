"""Chain complexes, simplicial modules, homology and the Dold-Kan correspondence."""
from .matrix import (Matrix, block_diag, elementary_divisors, hstack, kernel_basis, kron, rank,
                     smith_normal_form, solve, vstack)
from .complexes import ChainComplex, ComplexError, HomologyReport, homology, homology_from_maps
from .functors import FUNCTORS, power_basis, power_functor, power_functor_map, power_rank
from .simplicial import (SimplicialError, SimplicialModule, apply_levelwise, dold_kan_gamma,
                         normalized_chains, surjections)

__all__ = [
    "Matrix", "block_diag", "elementary_divisors", "hstack", "kernel_basis", "kron", "rank",
    "smith_normal_form", "solve", "vstack",
    "ChainComplex", "ComplexError", "HomologyReport", "homology", "homology_from_maps",
    "FUNCTORS", "power_basis", "power_functor", "power_functor_map", "power_rank",
    "SimplicialError", "SimplicialModule", "apply_levelwise", "dold_kan_gamma",
    "normalized_chains", "surjections",
]
