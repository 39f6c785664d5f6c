"""Chart covers, bundles, Cech cochains, cup products and cohomology by torus weight."""
from .scheme import (CoveredScheme, NotGradable, SchemeError, VectorBundle, affine_space, builtin_scheme,
                     bundle_algebra, bundle_from_spec, line_bundle, parse_bundle, projective_space,
                     scheme_from_dict, trivial_bundle)
from .cochains import (CechCochain, CochainError, Sheaf, cech_differential, cochain_from_dict, cup,
                       endo_block_sum, endomorphisms, forms, trace, transport, twisted, unit_cochain)
from .cohomology import (CohomologyClass, CohomologyError, CohomologyResult, TotalCochain, cech_cohomology,
                         class_coordinates, class_equal, cohomology_group, de_rham_cohomology, default_box,
                         hyperplane_cocycle, hyperplane_power, is_coboundary, is_cocycle, total_cup,
                         total_differential)

__all__ = [
    "CoveredScheme", "NotGradable", "SchemeError", "VectorBundle", "affine_space", "builtin_scheme",
    "bundle_algebra", "bundle_from_spec", "line_bundle", "parse_bundle", "projective_space",
    "scheme_from_dict", "trivial_bundle",
    "CechCochain", "CochainError", "Sheaf", "cech_differential", "cochain_from_dict", "cup",
    "endo_block_sum", "endomorphisms", "forms", "trace", "transport", "twisted", "unit_cochain",
    "CohomologyClass", "CohomologyError", "CohomologyResult", "TotalCochain", "cech_cohomology",
    "class_coordinates", "class_equal", "cohomology_group", "de_rham_cohomology", "default_box",
    "hyperplane_cocycle", "hyperplane_power", "is_coboundary", "is_cocycle", "total_cup",
    "total_differential",
]
