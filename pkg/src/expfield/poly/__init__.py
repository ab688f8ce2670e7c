from .groebner import (
    EMPTY_DIM,
    GREVLEX,
    LEX,
    GroebnerBasis,
    GroebnerBudgetError,
    IdealBasis,
    MonomialOrder,
    affine_linear_relations,
    block_order,
    budget,
    eliminate,
    elimination_order,
    fresh_name,
    groebner,
    ideal_dimension,
    linear_relations,
    saturate,
)
from .parse import ParseError, format_poly, parse_poly, parse_poly_auto
from .ring import ROLES, RatPoly, VarContext, ctx_union, monomial_binomial
