"""Exact scalar, Laurent-polynomial, differential-form and divided-power arithmetic."""
from .scalars import GF, QQ, ZZ, IntegersMod, PrimeField, Ring, Zmod, is_prime, make_ring
from .laurent import EXPONENT_BOUND, ExponentOverflow, LaurentPoly, parse_laurent
from .forms import DifferentialForm, as_form, dlog, form_d, form_wedge
from .divided import DividedPowerSeries, PolyAlgebra, TruncatedPolyAlgebra, dp_invert, dp_mul

__all__ = [
    "GF", "QQ", "ZZ", "IntegersMod", "PrimeField", "Ring", "Zmod", "is_prime", "make_ring",
    "EXPONENT_BOUND", "ExponentOverflow", "LaurentPoly", "parse_laurent",
    "DifferentialForm", "as_form", "dlog", "form_d", "form_wedge",
    "DividedPowerSeries", "PolyAlgebra", "TruncatedPolyAlgebra", "dp_invert", "dp_mul",
]
