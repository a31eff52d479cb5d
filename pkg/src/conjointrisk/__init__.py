"""Conjoint-analysis toolkit for deterrence-aware biometric risk evaluation.

Pipeline: define an attribute schema, reduce its full factorial to a
determinant-optimal card design, pair the cards for presentation, collect
(or simulate) paired choices, estimate per-attribute utilities, and fold
the utilities into an integrated attack-probability-aware risk metric for
comparing deployment configurations.
"""

from .design import (
    CandidateSet,
    FractionalDesign,
    PairingPlan,
    design_criterion,
    federov_select,
    full_factorial,
    make_pairs,
)
from .errors import ConjointRiskError, ValidationError
from .estimate import (
    AttributeEstimate,
    UtilityEstimate,
    estimate_table,
    fit,
    log_likelihood,
    normal_sf,
)
from .risk import (
    AlphaModel,
    RiskGrid,
    RiskResult,
    RiskScenario,
    UseCase,
    VerifierRates,
    alpha,
    c_identify,
    c_norm,
    compare_use_cases,
    fpir_approx,
    p_close,
    p_open,
)
from .schema import (
    Attribute,
    AttributeSchema,
    ConjointCard,
    decode,
    default_schema,
    encode,
    model_matrix,
)
from .simulate import ChoiceRecord, TrueUtility, choice_probability, simulate_responses

__version__ = "0.1.0"

__all__ = [
    "Attribute",
    "AttributeSchema",
    "AlphaModel",
    "AttributeEstimate",
    "CandidateSet",
    "ChoiceRecord",
    "ConjointCard",
    "ConjointRiskError",
    "FractionalDesign",
    "PairingPlan",
    "RiskGrid",
    "RiskResult",
    "RiskScenario",
    "TrueUtility",
    "UseCase",
    "UtilityEstimate",
    "ValidationError",
    "VerifierRates",
    "alpha",
    "c_identify",
    "c_norm",
    "choice_probability",
    "compare_use_cases",
    "decode",
    "default_schema",
    "design_criterion",
    "encode",
    "estimate_table",
    "federov_select",
    "fit",
    "fpir_approx",
    "full_factorial",
    "log_likelihood",
    "make_pairs",
    "model_matrix",
    "normal_sf",
    "p_close",
    "p_open",
    "simulate_responses",
]
