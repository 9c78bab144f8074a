"""Thomas decomposition of algebraic and differential polynomial systems.

Exact engine over Q: disjoint decompositions into simple systems, Janet
division for the differential theory, and an independent finite-field
verification oracle.
"""

from .algebraic import (DecomposeOptions, Decomposition, SimpleSystem,
                        StepBudgetExceeded, decompose)
from .differential import (DiffRanking, DiffSimpleSystem, DiffVar,
                           diff_decompose, involutivity_check, janet_assign,
                           janet_completion, jet, nu_generators,
                           total_derivative)
from .gcdfactor import canonical, content_free, factor, squarefree_part
from .parsing import InputDocument, ParseError, parse
from .poly import (ContractViolation, Poly, Ranking, Relation, prem, pquo,
                   pseudo_division)
from .prs import chain_for_split, subresultant_prs
from .verify import (BadPrime, FpPoint, VerifyReport, check_decomposition,
                     check_simple, enumerate_solutions, random_system,
                     sylvester_resultant)

__version__ = "0.1.0"

__all__ = [
    "BadPrime", "ContractViolation", "DecomposeOptions", "Decomposition",
    "DiffRanking", "DiffSimpleSystem", "DiffVar", "FpPoint", "InputDocument",
    "ParseError", "Poly", "Ranking", "Relation", "SimpleSystem",
    "StepBudgetExceeded", "VerifyReport", "canonical", "chain_for_split",
    "check_decomposition", "check_simple", "content_free", "decompose",
    "diff_decompose", "enumerate_solutions", "factor", "involutivity_check",
    "janet_assign", "janet_completion", "jet", "nu_generators", "parse",
    "prem", "pquo", "pseudo_division", "random_system", "squarefree_part",
    "subresultant_prs", "sylvester_resultant", "total_derivative",
]
