"""Shipped reference-study data.

The package bundles one complete worked study: the small-store deterrence
schema, its nine-card design and fixed pairing order, the utility estimates
published from a 600-respondent survey, three use-case presets, and the
published risk grid those presets produce. The raw survey responses were
never released, so the estimates here are fixtures, not regeneration
targets; the reproduction report checks the computed grid against the
published one and documents where the published numbers cannot be derived
from the stated configuration.
"""

from __future__ import annotations

from .design import FractionalDesign, PairingPlan
from .estimate import AttributeEstimate, UtilityEstimate
from .risk import UseCase
from .schema import AttributeSchema, ConjointCard, default_schema

# Card list of the reference design (level labels in schema order).
REFERENCE_CARD_LABELS = (
    ("10^-2", "Yes", "Yes", "Yes", "empty"),
    ("10^-2", "No", "No", "No", "normal"),
    ("10^-3", "Yes", "No", "Yes", "crowded"),
    ("10^-3", "Yes", "Yes", "Yes", "normal"),
    ("10^-3", "No", "Yes", "No", "empty"),
    ("10^-4", "Yes", "No", "No", "empty"),
    ("10^-4", "No", "Yes", "Yes", "normal"),
    ("10^-5", "No", "No", "Yes", "empty"),
    ("10^-5", "Yes", "Yes", "No", "crowded"),
)

# Fixed presentation order (card1, card2), 1-based card numbers.
REFERENCE_PAIR_ORDER = (
    (1, 5),
    (9, 7),
    (8, 1),
    (5, 4),
    (6, 2),
    (7, 8),
    (4, 3),
    (3, 6),
    (2, 9),
)

# Published utility estimates from the reference survey.
REFERENCE_COEFFICIENTS = {
    "FAR": -0.460,
    "Camera": -0.336,
    "Staff": -0.093,
    "Friendship": -0.056,
    "Congestion": -0.169,
}

_REFERENCE_ESTIMATE_ROWS = {
    "FAR": AttributeEstimate(coef=-0.460, exp_coef=0.632, se=0.022, z=-21.074, p=2e-16),
    "Camera": AttributeEstimate(coef=-0.336, exp_coef=0.715, se=0.041, z=-8.119, p=2e-16),
    "Staff": AttributeEstimate(coef=-0.093, exp_coef=0.911, se=0.052, z=-1.79, p=0.073),
    "Friendship": AttributeEstimate(coef=-0.056, exp_coef=0.946, se=0.052, z=-1.085, p=0.278),
    "Congestion": AttributeEstimate(coef=-0.169, exp_coef=0.845, se=0.028, z=-5.978, p=2e-16),
}

# Non-FAR deterrence settings of the three published use cases.
USE_CASES = (
    UseCase("Low-secure", {"Camera": 0, "Staff": 0, "Friendship": 0, "Congestion": 0}),
    UseCase("Mid-secure", {"Camera": 0, "Staff": 1, "Friendship": 1, "Congestion": 1}),
    UseCase("High-secure", {"Camera": 1, "Staff": 1, "Friendship": 1, "Congestion": 2}),
)

# Published integrated risk values per (use case, FAR label), FRR=1e-2, N=10000.
PUBLISHED_GRID = {
    ("Low-secure", "10^-2"): 0.5,
    ("Low-secure", "10^-3"): 0.406,
    ("Low-secure", "10^-4"): 0.293,
    ("Low-secure", "10^-5"): 0.019,
    ("Mid-secure", "10^-2"): 0.390,
    ("Mid-secure", "10^-3"): 0.296,
    ("Mid-secure", "10^-4"): 0.127,
    ("Mid-secure", "10^-5"): 0.010,
    ("High-secure", "10^-2"): 0.315,
    ("High-secure", "10^-3"): 0.211,
    ("High-secure", "10^-4"): 0.108,
    ("High-secure", "10^-5"): 4.99e-4,
}

PUBLISHED_REFERENCE_CELL = ("Low-secure", "10^-4")

PUBLISHED_FRR = 1e-2
PUBLISHED_GALLERY_SIZE = 10000

# Where the published grid is known not to follow from its stated inputs.
KNOWN_GRID_NOTES = {
    ("Low-secure", "10^-3"): (
        "published 0.406 deviates from the stated configuration, which "
        "yields ~0.397; probable transcription artifact"
    ),
    "Mid-secure": (
        "published column (0.390, 0.296, 0.127, 0.010) is not reproducible "
        "from the stated Mid-secure configuration under either weighting; "
        "documented internal inconsistency of the reference study"
    ),
}

# Participant-facing strings; editable template data, not fixed copy.
SCENARIO_TEXT = {
    "title": "Store break-in challenge",
    "premise": (
        "You play a challenger trying to break into a small store whose "
        "safe is locked by biometric recognition. Opening the safe wins "
        "you an exclusive item."
    ),
    "attempts": "You may attempt the recognition system up to ten times.",
    "termination": (
        "If a surveillance camera or a staff member spots you, the "
        "challenge ends immediately."
    ),
    "question": (
        "Which of the two systems below do you think you are more likely "
        "to win against?"
    ),
}

# Per-level display strings for the participant view.
DISPLAY_TEMPLATES = {
    "FAR": {
        "10^-2": "1 in 100 strangers would be accepted",
        "10^-3": "1 in 1,000 strangers would be accepted",
        "10^-4": "1 in 10,000 strangers would be accepted",
        "10^-5": "1 in 100,000 strangers would be accepted",
    },
    "Camera": {
        "No": "no surveillance camera",
        "Yes": "surveillance camera installed",
    },
    "Staff": {
        "No": "no staff in the store",
        "Yes": "staff present in the store",
    },
    "Friendship": {
        "No": "friends or family never visit this store",
        "Yes": "friends or family may drop in by chance",
    },
    "Congestion": {
        "empty": "the store is empty",
        "normal": "the store has normal traffic",
        "crowded": "the store is crowded",
    },
}


def reference_schema() -> AttributeSchema:
    return default_schema()


def reference_design(schema: AttributeSchema | None = None) -> FractionalDesign:
    """The shipped nine-card design with its criterion value."""
    from .design import design_criterion

    schema = schema or default_schema()
    cards = []
    for i, labels in enumerate(REFERENCE_CARD_LABELS):
        assignment = {
            a.name: a.level_index(lbl)
            for a, lbl in zip(schema.attributes, labels)
        }
        cards.append(ConjointCard(assignment, index=i + 1))
    return FractionalDesign(
        cards=tuple(cards),
        criterion_value=design_criterion(cards, schema),
        seed=None,
    )


def reference_plan() -> PairingPlan:
    return PairingPlan(pairs=REFERENCE_PAIR_ORDER, seed=None)


def reference_estimate() -> UtilityEstimate:
    """Published estimates as a fixture; likelihood metadata is not published."""
    return UtilityEstimate(
        attributes=("FAR", "Camera", "Staff", "Friendship", "Congestion"),
        by_attribute=dict(_REFERENCE_ESTIMATE_ROWS),
        log_likelihood=float("nan"),
        iterations=0,
        converged=True,
    )
