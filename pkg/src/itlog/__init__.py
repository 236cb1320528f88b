"""Exact series tools for local holomorphic dynamics.

Iterative logarithms (Julia's equation), Schroeder linearization, itlog
flows, differential polynomials with the chain-rule families A and B, an
ADE/ODE guesser, and numeric Poincare functions.
"""

from .diffpoly import (
    ChainFamilyA,
    DiffPolynomial,
    MultiIndex,
    ZPolynomial,
    chain_A,
    chain_B,
    compare_antilex,
    degree_weight,
    evaluate,
    multi_indices,
    rank,
)
from .errors import *  # noqa: F401,F403
from .expr import ExpressionMap, eval_expression, parse
from .funceq import ItlogResult, SchroederResult, flow, itlog, julia_residual, scale_check, schroeder_solve
from .guesser import (
    ADEGuesser,
    GuessOutcome,
    SearchBounds,
    egf_ogf_transform,
    guess_ade,
    guess_linear_ode,
    nonvanishing_scan,
)
from .poincare import (
    EvalReport,
    FixedPointData,
    NamedMap,
    PoincareFunction,
    RationalMap,
    check_schroeder_numeric,
    find_repelling_fixed_point,
    poincare_derivative,
    poincare_eval,
    poincare_monomial,
)
from .series import (
    ParabolicGerm,
    PowerSeries,
    add,
    compose,
    cos_series,
    derive,
    div,
    exp_series,
    iterate,
    log_series,
    mul,
    reverse,
    sin_series,
)

__version__ = "0.1.0"
