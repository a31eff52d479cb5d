"""Synthetic respondents drawn from a known utility vector.

Real survey exports and simulated ones share the same record shape, so the
estimator can be validated against ground truth: choices are independent
draws from the paired logit that the estimator assumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .design import FractionalDesign, PairingPlan
from .errors import ValidationError
from .schema import AttributeSchema, encode


@dataclass(frozen=True)
class TrueUtility:
    """Per-attribute utility per level step; the generating coefficients."""

    beta: dict[str, float]

    def __post_init__(self):
        object.__setattr__(self, "beta", dict(self.beta))

    def vector(self, schema: AttributeSchema) -> np.ndarray:
        if set(self.beta) != set(schema.names):
            raise ValidationError(
                "utility vector must cover every schema attribute exactly once"
            )
        return np.array([self.beta[name] for name in schema.names], dtype=float)


@dataclass(frozen=True)
class ChoiceRecord:
    """One respondent's selection for one presented pair (1 = card1, 2 = card2)."""

    respondent: str
    pair_number: int
    chosen: int

    def __post_init__(self):
        if self.chosen not in (1, 2):
            raise ValidationError("chosen must be 1 (card1) or 2 (card2)")
        if self.pair_number < 1:
            raise ValidationError("pair_number is 1-based")


def choice_probability(x1: np.ndarray, x2: np.ndarray, beta: np.ndarray) -> float:
    """P(choose card1) under the paired logit.

    Equals logistic((x1 - x2) . beta); rows are coded without intercept.
    The two orientations sum to exactly 1: the complement branch computes
    1 - p from the identical p, and that subtraction is exact for
    p in [0.5, 1].
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if x1.shape != x2.shape or x1.shape != beta.shape:
        raise ValidationError(
            f"dimension mismatch: rows {x1.shape}/{x2.shape}, beta {beta.shape}"
        )
    t = float(np.dot(x1 - x2, beta))
    if t >= 0.0:
        return 1.0 / (1.0 + math.exp(-t))
    return 1.0 - 1.0 / (1.0 + math.exp(t))


def simulate_responses(
    plan: PairingPlan,
    design: FractionalDesign,
    schema: AttributeSchema,
    beta: TrueUtility,
    respondents: int,
    seed: int,
    shuffle_pairs: bool = False,
) -> list[ChoiceRecord]:
    """Draw respondents x pairs independent choices from the paired logit.

    Every respondent owns the RNG stream (seed, respondent index), so output
    is identical no matter how generation is scheduled. Pairs are presented
    in plan order unless ``shuffle_pairs`` asks for a per-respondent
    permutation.
    """
    if respondents < 0:
        raise ValidationError("respondent count must be nonnegative")
    b = beta.vector(schema)
    rows = {
        k + 1: (
            encode(design.card(c1), schema),
            encode(design.card(c2), schema),
        )
        for k, (c1, c2) in enumerate(plan.pairs)
    }
    probs = {k: choice_probability(x1, x2, b) for k, (x1, x2) in rows.items()}

    records: list[ChoiceRecord] = []
    width = max(4, len(str(respondents)))
    for i in range(respondents):
        rng = np.random.default_rng([seed, i])
        order = list(rows)
        if shuffle_pairs:
            order = [order[j] for j in rng.permutation(len(order))]
        rid = f"r{i + 1:0{width}d}"
        for pair_number in order:
            chosen = 1 if rng.random() < probs[pair_number] else 2
            records.append(ChoiceRecord(rid, pair_number, chosen))
    return records
