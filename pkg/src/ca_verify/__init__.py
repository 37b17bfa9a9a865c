"""Exact deciders and algebraic surjectivity/injectivity criteria for
one-dimensional cellular automata over Z_m.
"""

from .caps import CapExceeded, Caps, DEFAULT_CAPS, caps_from_env
from .criteria import (
    CriterionVerdict,
    FamilySpec,
    analyze,
    audit,
    conjecture_scan,
    enumerate_family,
    family_size,
    find_discrepancies,
    parse_family,
    run_criteria,
    sufficiency_violation_on_prime,
)
from .decide import (
    BipermutiveCollision,
    Diamond,
    InjectivityResult,
    PeriodicPair,
    SurjectivityResult,
    UnbalancedWord,
    bipermutive_collision,
    count_preimages,
    decide_injective,
    decide_surjective,
)
from .poly import (
    Poly,
    hermite_criterion,
    interpolate_prime,
    is_permutation_poly,
    poly_text,
    representability_search,
)
from .rule import (
    CyclicWord,
    MonomialComponent,
    RuleExpression,
    RuleParseError,
    RuleTable,
    SeparationClass,
    classify,
    essential_positions,
    interior_table,
    is_permutive_at,
    lr_separated_rule,
    monomial_rule,
    parse_rule,
    parse_table_text,
    rule_from_code,
    sum_rule,
)
from .zmod import is_prime, kempner, monomial_is_bijective, totient, units

__version__ = "0.1.0"

__all__ = [
    "BipermutiveCollision",
    "CapExceeded",
    "Caps",
    "CriterionVerdict",
    "CyclicWord",
    "DEFAULT_CAPS",
    "Diamond",
    "FamilySpec",
    "InjectivityResult",
    "MonomialComponent",
    "PeriodicPair",
    "Poly",
    "RuleExpression",
    "RuleParseError",
    "RuleTable",
    "SeparationClass",
    "SurjectivityResult",
    "UnbalancedWord",
    "analyze",
    "audit",
    "bipermutive_collision",
    "caps_from_env",
    "classify",
    "conjecture_scan",
    "count_preimages",
    "decide_injective",
    "decide_surjective",
    "enumerate_family",
    "essential_positions",
    "family_size",
    "find_discrepancies",
    "hermite_criterion",
    "interior_table",
    "interpolate_prime",
    "is_permutation_poly",
    "is_permutive_at",
    "is_prime",
    "kempner",
    "lr_separated_rule",
    "monomial_is_bijective",
    "monomial_rule",
    "parse_family",
    "parse_rule",
    "parse_table_text",
    "poly_text",
    "representability_search",
    "rule_from_code",
    "run_criteria",
    "sufficiency_violation_on_prime",
    "sum_rule",
    "totient",
    "units",
    "__version__",
]
