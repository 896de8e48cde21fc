from .ffield import DEFAULT_PRIME, FFPoly, ModularReductionError, reduce_mod_p, roots_mod_p
from .parsing import PolySyntaxError, UnknownVariableError, format_poly, parse_poly
from .poly import MultiPoly, substitute_fraction
from .resultant import ResultantError, discriminant, eliminate_resultant, is_squarefree, univariate_gcd

__all__ = [
    "DEFAULT_PRIME",
    "FFPoly",
    "ModularReductionError",
    "MultiPoly",
    "PolySyntaxError",
    "ResultantError",
    "UnknownVariableError",
    "discriminant",
    "eliminate_resultant",
    "format_poly",
    "is_squarefree",
    "parse_poly",
    "reduce_mod_p",
    "roots_mod_p",
    "substitute_fraction",
    "univariate_gcd",
]
