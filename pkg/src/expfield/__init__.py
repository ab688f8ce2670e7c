"""Exact computational tools for exponential-algebraic geometry: integer
normal forms, Groebner bases, tori and G-varieties, partial E-field
presentations, Khovanskii systems and axiom-scheme witness checks."""

__version__ = "0.1.0"

from .efield import EFieldPresentation, ElementTuple, predim_Delta, predim_delta
from .gvariety import GVariety, act, freeness_report, rotund_up_to
from .khovanskii import ExpPoly, KhovanskiiSystem, exp_derive, jacobian_det, verify_certificate
from .linalg import IntMat, hermite_normal_form, smith_normal_form
from .poly import IdealBasis, RatPoly, VarContext, groebner, parse_poly
from .torus import MultVariety, TorusSubgroup, atypical_witness, subgroup_depth

__all__ = [
    "EFieldPresentation",
    "ElementTuple",
    "ExpPoly",
    "GVariety",
    "IdealBasis",
    "IntMat",
    "KhovanskiiSystem",
    "MultVariety",
    "RatPoly",
    "TorusSubgroup",
    "VarContext",
    "act",
    "atypical_witness",
    "exp_derive",
    "freeness_report",
    "groebner",
    "hermite_normal_form",
    "jacobian_det",
    "parse_poly",
    "predim_Delta",
    "predim_delta",
    "rotund_up_to",
    "smith_normal_form",
    "subgroup_depth",
    "verify_certificate",
]
