"""A one-parameter family of cyclic quartic fields and the units generated by
the roots of its defining polynomials, checked with exact and certified
arbitrary-precision arithmetic."""

from .arith import IntPoly, Mobius2, QuadElem, RatPoly, discriminant_quartic, resultant
from .family import FamilyParams, NotInFamilyError, params_from_s, poly_from_s
from .pell import pell_solution, s_sequence
from .report import VerificationReport, verify_member
from .roots import RootQuadruple, refine_roots

__version__ = "0.1.0"

__all__ = [
    "FamilyParams",
    "IntPoly",
    "Mobius2",
    "NotInFamilyError",
    "QuadElem",
    "RatPoly",
    "RootQuadruple",
    "VerificationReport",
    "discriminant_quartic",
    "params_from_s",
    "pell_solution",
    "poly_from_s",
    "refine_roots",
    "resultant",
    "s_sequence",
    "verify_member",
]
