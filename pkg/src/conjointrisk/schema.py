"""Attribute vocabulary for deterrence-factor choice experiments.

An :class:`AttributeSchema` fixes the ordered set of risk-factor attributes
and their levels. Levels are listed in deterrence order, weakest first, and
are coded with the integer steps ``0 .. L-1``, so a larger code always means
stronger deterrence. Every other module consumes this vocabulary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class Attribute:
    """One risk factor with its ordered level labels."""

    name: str
    levels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        if not self.name:
            raise ValidationError("attribute name must be non-empty")
        if len(self.levels) < 2:
            raise ValidationError(f"attribute {self.name!r} needs at least 2 levels")
        if len(set(self.levels)) != len(self.levels):
            raise ValidationError(f"attribute {self.name!r} has duplicate level labels")

    @property
    def codes(self) -> tuple[int, ...]:
        """Integer step values, ``0 .. L-1`` in deterrence order."""
        return tuple(range(len(self.levels)))

    def level_index(self, label: str) -> int:
        try:
            return self.levels.index(label)
        except ValueError:
            raise ValidationError(
                f"unknown level {label!r} for attribute {self.name!r}"
            ) from None


@dataclass(frozen=True)
class AttributeSchema:
    """Ordered attributes; the shared vocabulary of a study."""

    attributes: tuple[Attribute, ...]

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple(self.attributes))
        if not self.attributes:
            raise ValidationError("schema needs at least one attribute")
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            raise ValidationError("attribute names must be unique")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes)

    def attribute(self, name: str) -> Attribute:
        for a in self.attributes:
            if a.name == name:
                return a
        raise ValidationError(f"unknown attribute {name!r}")

    def level_counts(self) -> tuple[int, ...]:
        return tuple(len(a.levels) for a in self.attributes)

    def combination_count(self) -> int:
        return math.prod(self.level_counts())


@dataclass(frozen=True, eq=True)
class ConjointCard:
    """A full profile: one level index per schema attribute.

    ``index`` is the 1-based card number once the card belongs to a design.
    """

    assignment: dict[str, int]
    index: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "assignment", dict(self.assignment))
        if self.index is not None and self.index < 1:
            raise ValidationError("card index must be a positive integer")

    def key(self, schema: AttributeSchema) -> tuple[int, ...]:
        """Level codes in schema order; a hashable identity for the profile."""
        validate_card(self, schema)
        return tuple(self.assignment[name] for name in schema.names)

    def renumbered(self, index: int) -> "ConjointCard":
        return ConjointCard(self.assignment, index=index)

    def labels(self, schema: AttributeSchema) -> dict[str, str]:
        """Human-readable level labels keyed by attribute name."""
        validate_card(self, schema)
        return {
            a.name: a.levels[self.assignment[a.name]] for a in schema.attributes
        }


def validate_card(card: ConjointCard, schema: AttributeSchema) -> None:
    """Raise ValidationError unless the card covers every attribute in range."""
    seen = set(card.assignment)
    expected = set(schema.names)
    if seen != expected:
        missing = sorted(expected - seen)
        extra = sorted(seen - expected)
        parts = []
        if missing:
            parts.append("missing attributes: " + ", ".join(missing))
        if extra:
            parts.append("unknown attributes: " + ", ".join(extra))
        raise ValidationError("; ".join(parts))
    for a in schema.attributes:
        level = card.assignment[a.name]
        if not isinstance(level, int) or not 0 <= level < len(a.levels):
            raise ValidationError(
                f"level {level!r} out of range for attribute {a.name!r} "
                f"(expected 0..{len(a.levels) - 1})"
            )


def default_schema() -> AttributeSchema:
    """The shipped small-store deterrence schema.

    FAR spans four decades, weakest (most permissive) first; the three
    presence factors are No/Yes; congestion has three grades. Level order
    is deterrence order, so e.g. FAR ``10^-5`` carries code 3 and a crowded
    store carries code 2.
    """
    return AttributeSchema(
        (
            Attribute("FAR", ("10^-2", "10^-3", "10^-4", "10^-5")),
            Attribute("Camera", ("No", "Yes")),
            Attribute("Staff", ("No", "Yes")),
            Attribute("Friendship", ("No", "Yes")),
            Attribute("Congestion", ("empty", "normal", "crowded")),
        )
    )


def encode(
    card: ConjointCard, schema: AttributeSchema, with_intercept: bool = False
) -> np.ndarray:
    """Numeric model row for a card: one linear-in-level regressor per attribute.

    The entry for each attribute is the integer level code of the card's
    assignment. An intercept term of 1.0 is prepended iff requested.
    """
    validate_card(card, schema)
    row = [float(card.assignment[name]) for name in schema.names]
    if with_intercept:
        row.insert(0, 1.0)
    return np.array(row, dtype=float)


def decode(
    row: np.ndarray, schema: AttributeSchema, with_intercept: bool = False
) -> ConjointCard:
    """Inverse of :func:`encode`; drops the intercept column if present."""
    values = np.asarray(row, dtype=float)
    expected = len(schema.names) + (1 if with_intercept else 0)
    if values.ndim != 1 or values.size != expected:
        raise ValidationError(
            f"row of length {values.size} does not match schema "
            f"({expected} entries expected)"
        )
    if with_intercept:
        values = values[1:]
    assignment = {}
    for a, v in zip(schema.attributes, values):
        code = int(round(v))
        if code != v or not 0 <= code < len(a.levels):
            raise ValidationError(
                f"value {v!r} is not a valid level code for attribute {a.name!r}"
            )
        assignment[a.name] = code
    return ConjointCard(assignment)


def model_matrix(
    cards, schema: AttributeSchema, with_intercept: bool = False
) -> np.ndarray:
    """Stack encoded rows for a sequence of cards."""
    return np.array(
        [encode(c, schema, with_intercept=with_intercept) for c in cards], dtype=float
    )


def schema_to_dict(schema: AttributeSchema) -> dict:
    return {
        "attributes": [
            {"name": a.name, "levels": list(a.levels)} for a in schema.attributes
        ]
    }


def schema_from_dict(data: dict) -> AttributeSchema:
    try:
        attrs = data["attributes"]
    except (TypeError, KeyError):
        raise ValidationError("schema document must have an 'attributes' list") from None
    if not isinstance(attrs, list):
        raise ValidationError("'attributes' must be a list")
    built = []
    for entry in attrs:
        try:
            built.append(Attribute(entry["name"], tuple(entry["levels"])))
        except (TypeError, KeyError):
            raise ValidationError(
                "each attribute needs 'name' and 'levels'"
            ) from None
    return AttributeSchema(tuple(built))
