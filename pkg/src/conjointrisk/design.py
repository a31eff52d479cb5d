"""Candidate enumeration, determinant-optimal subset selection, and pairing.

The selection step keeps an n-card subset of the full factorial and greedily
swaps design cards against outside candidates. For the information matrix
M = X'X and its variance function d(x) = x' M^-1 x, exchanging design row
x_out for candidate x_in multiplies det(M) by

    1 + delta,   delta = d(x_in) - [d(x_out) d(x_in) - d(x_out, x_in)^2] - d(x_out)

so the best strictly improving swap is applied until none remains. Multiple
seeded restarts guard against local optima.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigurationError,
    DegenerateCandidatesError,
    PairingError,
    ValidationError,
)
from .schema import AttributeSchema, ConjointCard, model_matrix

# Swaps must beat this relative gain to count as improving; keeps the
# exchange strictly monotone and guarantees termination.
_MIN_GAIN = 1e-9


def _profile_key(card: ConjointCard) -> tuple:
    return tuple(sorted(card.assignment.items()))


@dataclass(frozen=True)
class CandidateSet:
    """Every level combination exactly once."""

    cards: tuple[ConjointCard, ...]


@dataclass(frozen=True)
class FractionalDesign:
    """Distinct cards drawn from a candidate set, numbered 1..n."""

    cards: tuple[ConjointCard, ...]
    criterion_value: float
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "cards", tuple(self.cards))
        profiles = [_profile_key(c) for c in self.cards]
        if len(set(profiles)) != len(profiles):
            raise ValidationError("design cards must be distinct profiles")

    def card(self, number: int) -> ConjointCard:
        if not 1 <= number <= len(self.cards):
            raise ValidationError(
                f"card number {number} out of range 1..{len(self.cards)}"
            )
        return self.cards[number - 1]


@dataclass(frozen=True)
class PairingPlan:
    """Ordered presentation pairs of 1-based design card numbers."""

    pairs: tuple[tuple[int, int], ...]
    seed: int | None = None


@dataclass(frozen=True)
class ExchangeStep:
    """Audit record for one accepted swap."""

    criterion_before: float
    criterion_after: float
    predicted_ratio: float
    actual_ratio: float


def full_factorial(schema: AttributeSchema) -> CandidateSet:
    """Enumerate all level combinations, lexicographically by level code."""
    ranges = [range(len(a.levels)) for a in schema.attributes]
    cards = tuple(
        ConjointCard(
            {a.name: code for a, code in zip(schema.attributes, combo)},
            index=i + 1,
        )
        for i, combo in enumerate(itertools.product(*ranges))
    )
    return CandidateSet(cards)


def design_criterion(cards, schema: AttributeSchema) -> float:
    """det(X'X) for the intercept-augmented linear model matrix."""
    x = model_matrix(cards, schema, with_intercept=True)
    return float(np.linalg.det(x.T @ x))


def federov_select(
    candidates: CandidateSet,
    schema: AttributeSchema,
    n: int,
    restarts: int = 20,
    seed: int = 0,
    trace: list[ExchangeStep] | None = None,
) -> FractionalDesign:
    """Select an n-card subset maximizing det(X'X) by exchange.

    Each restart starts from a fresh random nonsingular subset and runs the
    exchange to a fixed point; the best restart wins. Ties between
    equal-delta swaps break toward the lowest (design index, candidate
    index), so the result is a pure function of (candidates, n, restarts,
    seed). The returned cards are renumbered 1..n in candidate order.
    """
    x = model_matrix(candidates.cards, schema, with_intercept=True)
    m, p = x.shape
    if n < p:
        raise ConfigurationError(
            f"design size {n} is below the model column count {p}"
        )
    if n > m:
        raise ConfigurationError(
            f"design size {n} exceeds the candidate count {m}"
        )

    best_idx = None
    best_logdet = -np.inf
    for restart in range(restarts):
        rng = np.random.default_rng([seed, restart])
        start = _random_nonsingular_subset(x, n, rng)
        if start is None:
            continue
        idx, logdet = _exchange(x, start, trace)
        if logdet > best_logdet:
            best_idx, best_logdet = idx, logdet

    if best_idx is None:
        raise DegenerateCandidatesError(
            "every restart produced a singular starting design; "
            "the candidate set cannot support this model"
        )

    chosen = sorted(best_idx)
    cards = tuple(
        candidates.cards[i].renumbered(k + 1) for k, i in enumerate(chosen)
    )
    return FractionalDesign(
        cards=cards,
        criterion_value=design_criterion(cards, schema),
        seed=seed,
    )


def _random_nonsingular_subset(x, n, rng, attempts=100):
    m = x.shape[0]
    for _ in range(attempts):
        idx = rng.choice(m, size=n, replace=False)
        xd = x[idx]
        sign, _ = np.linalg.slogdet(xd.T @ xd)
        if sign > 0:
            return list(idx)
    return None


def _exchange(x, idx, trace=None):
    """Run best-improvement swaps to a fixed point; returns (indices, logdet)."""
    m = x.shape[0]
    idx = list(idx)
    while True:
        xd = x[idx]
        info = xd.T @ xd
        sign, logdet = np.linalg.slogdet(info)
        inv = np.linalg.inv(info)

        d_all = np.einsum("ij,jk,ik->i", x, inv, x)
        d_in = d_all[idx]
        cross = xd @ inv @ x.T  # cross[i, k] = x_i' M^-1 x_k
        delta = (
            d_all[np.newaxis, :]
            - (d_in[:, np.newaxis] * d_all[np.newaxis, :] - cross**2)
            - d_in[:, np.newaxis]
        )
        delta[:, idx] = -np.inf  # keep cards distinct

        i, k = np.unravel_index(np.argmax(delta), delta.shape)
        gain = delta[i, k]
        if not gain > _MIN_GAIN:
            return idx, logdet

        det_before = sign * np.exp(logdet)
        idx[i] = int(k)
        xd_new = x[idx]
        sign_new, logdet_new = np.linalg.slogdet(xd_new.T @ xd_new)
        det_after = sign_new * np.exp(logdet_new)
        # Accepted swaps must strictly raise the criterion.
        assert det_after > det_before, "exchange step decreased the criterion"
        if trace is not None:
            trace.append(
                ExchangeStep(
                    criterion_before=det_before,
                    criterion_after=det_after,
                    predicted_ratio=1.0 + gain,
                    actual_ratio=det_after / det_before,
                )
            )


def make_pairs(
    design: FractionalDesign, seed: int, retry_cap: int = 1000
) -> PairingPlan:
    """Assemble one presentation pair per design card.

    Two copies of the card list each get independent random sort keys and
    are sorted ascending; same-rank rows are zipped into pairs. If any row
    pairs a card with itself the keys are redrawn and the whole procedure
    repeats, up to ``retry_cap`` attempts.
    """
    numbers = [c.index if c.index is not None else i + 1
               for i, c in enumerate(design.cards)]
    profiles = [_profile_key(c) for c in design.cards]
    n = len(numbers)
    if n < 2:
        raise ValidationError("pairing needs a design with at least 2 cards")

    rng = np.random.default_rng(seed)
    for _ in range(retry_cap):
        first = np.argsort(rng.random(n), kind="stable")
        second = np.argsort(rng.random(n), kind="stable")
        # A row whose two cards show the same profile makes the question
        # meaningless, so the whole draw is redone.
        if all(profiles[i] != profiles[j] for i, j in zip(first, second)):
            pairs = tuple(
                (numbers[i], numbers[j]) for i, j in zip(first, second)
            )
            return PairingPlan(pairs=pairs, seed=seed)
    raise PairingError(
        f"could not draw a self-pair-free plan in {retry_cap} attempts"
    )
