"""Risk mathematics for one-to-many biometric deployments.

Combines three ingredients into a single comparable number per deployment
configuration:

* identification false-accept probabilities for a gallery of N templates,
  exact (``p_open``/``p_close``) or in the linear small-rate approximation
  (``fpir_approx``);
* the attack-occurrence probability ``alpha``, a deterrence-weighted,
  max-normalized complement of the configured security levels, calibrated so
  that all-weakest settings give 1.0 and all-strongest give 0.0;
* per-event damage costs for non-enrolled (open-set) and enrolled
  (closed-set) impostor attempts.

The integrated metric is

    c_identify = c_open * alpha * FPIR_open + c_close * (1 - alpha) * FPIR_close

and a detection-cost baseline (``c_norm``) is included for comparison with
verification-style weighted error metrics.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import ValidationError
from .schema import AttributeSchema, validate_card, ConjointCard

DEFAULT_COST_OPEN = 0.5
DEFAULT_COST_CLOSE = 0.5

MODE_EXACT = "exact"
MODE_APPROXIMATE = "approximate"

KIND_COEFFICIENT_WEIGHTED = "coefficient_weighted"
KIND_UNWEIGHTED = "unweighted"


@dataclass(frozen=True)
class VerifierRates:
    """Single-trial verification error rates and the gallery size."""

    p_fa: float
    p_fr: float
    n: int

    def __post_init__(self):
        if not 0.0 <= self.p_fa <= 1.0:
            raise ValidationError(f"p_fa must be in [0, 1], got {self.p_fa}")
        if not 0.0 <= self.p_fr <= 1.0:
            raise ValidationError(f"p_fr must be in [0, 1], got {self.p_fr}")
        if self.n < 1:
            raise ValidationError(f"gallery size must be >= 1, got {self.n}")


@dataclass(frozen=True)
class AlphaModel:
    """Weighting scheme for the attack-occurrence probability.

    ``coefficient_weighted`` uses estimated utility magnitudes so that a
    level step on a strong deterrent moves alpha more than one on a weak
    deterrent; ``unweighted`` treats every level step equally.
    """

    kind: str
    weights: dict[str, float]

    def __post_init__(self):
        object.__setattr__(self, "weights", dict(self.weights))
        if self.kind not in (KIND_COEFFICIENT_WEIGHTED, KIND_UNWEIGHTED):
            raise ValidationError(f"unknown alpha model kind {self.kind!r}")
        if any(w < 0 for w in self.weights.values()):
            raise ValidationError("alpha weights must be nonnegative")
        if not any(w > 0 for w in self.weights.values()):
            raise ValidationError("alpha model needs at least one positive weight")

    @classmethod
    def coefficient_weighted(cls, coefficients: dict[str, float]) -> "AlphaModel":
        return cls(
            KIND_COEFFICIENT_WEIGHTED,
            {name: abs(c) for name, c in coefficients.items()},
        )

    @classmethod
    def unweighted(cls, schema: AttributeSchema) -> "AlphaModel":
        return cls(KIND_UNWEIGHTED, {name: 1.0 for name in schema.names})


@dataclass(frozen=True)
class RiskScenario:
    """A deployment configuration: levels, verifier rates, damage costs."""

    levels: dict[str, int]
    rates: VerifierRates
    c_open: float = DEFAULT_COST_OPEN
    c_close: float = DEFAULT_COST_CLOSE

    def __post_init__(self):
        object.__setattr__(self, "levels", dict(self.levels))
        for name, cost in (("c_open", self.c_open), ("c_close", self.c_close)):
            if not math.isfinite(cost) or cost < 0:
                raise ValidationError(f"{name} must be a finite nonnegative cost")


@dataclass(frozen=True)
class RiskResult:
    alpha: float
    fpir_open: float
    fpir_close: float
    c_identify: float
    mode: str

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "fpir_open": self.fpir_open,
            "fpir_close": self.fpir_close,
            "c_identify": self.c_identify,
            "mode": self.mode,
        }


def p_open(rates: VerifierRates) -> float:
    """Probability a non-enrolled search falsely matches: 1 - (1 - P_FA)^N."""
    if rates.n == 1:
        return rates.p_fa
    if rates.p_fa == 1.0:
        return 1.0
    return -math.expm1(rates.n * math.log1p(-rates.p_fa))


def p_close(rates: VerifierRates) -> float:
    """Probability an enrolled user's search falsely matches someone else.

    The own-template comparison must first falsely reject, then any of the
    remaining N-1 templates falsely accept: P_FR * (1 - (1 - P_FA)^(N-1)).
    """
    if rates.n == 1 or rates.p_fr == 0.0:
        return 0.0
    if rates.p_fa == 1.0:
        return rates.p_fr
    return rates.p_fr * -math.expm1((rates.n - 1) * math.log1p(-rates.p_fa))


def fpir_approx(rates: VerifierRates) -> tuple[float, float]:
    """Linear small-rate approximations of the two search error rates.

    open:  N * P_FA, capped at 1
    close: P_FR * ((N - 1) * P_FA capped at 1)

    The linear forms exceed 1 once the expected false-match count does, so
    the per-search false-match mass is clamped to 1; on the closed-set side
    the clamp applies before scaling by the false-reject rate, keeping the
    approximation below P_FR like the exact form.
    """
    open_rate = min(1.0, rates.n * rates.p_fa)
    close_rate = rates.p_fr * min(1.0, (rates.n - 1) * rates.p_fa)
    return open_rate, close_rate


def alpha(
    levels: dict[str, int], model: AlphaModel, schema: AttributeSchema
) -> float:
    """Attack-occurrence probability for a configuration.

    alpha = 1 - (sum_a w_a * l_a) / (sum_a w_a * (L_a - 1)) over the
    attributes present in ``levels``; 1.0 with every deterrent at its
    weakest level, 0.0 with every deterrent at its strongest, strictly
    decreasing in any level with positive weight.
    """
    if not levels:
        raise ValidationError("alpha needs at least one configured attribute")
    unknown = sorted(set(levels) - set(schema.names))
    if unknown:
        raise ValidationError("unknown attributes: " + ", ".join(unknown))
    card = ConjointCard({name: lvl for name, lvl in levels.items()})
    partial = AttributeSchema(
        tuple(a for a in schema.attributes if a.name in levels)
    )
    validate_card(card, partial)
    missing = [name for name in levels if name not in model.weights]
    if missing:
        raise ValidationError(
            "alpha model has no weight for: " + ", ".join(sorted(missing))
        )
    numerator = 0.0
    denominator = 0.0
    for a in partial.attributes:
        w = model.weights[a.name]
        numerator += w * levels[a.name]
        denominator += w * (len(a.levels) - 1)
    if denominator == 0.0:
        raise ValidationError("alpha weights for the configured attributes are all zero")
    return 1.0 - numerator / denominator


def c_identify(
    scenario: RiskScenario,
    model: AlphaModel,
    schema: AttributeSchema,
    mode: str = MODE_APPROXIMATE,
) -> RiskResult:
    """Integrated risk value for one deployment configuration.

    Accepted-attack mass splits by attacker enrollment: a share ``alpha``
    of transactions are non-enrolled impostors exposed to FPIR_open, the
    rest are enrolled users exposed to FPIR_close, each weighted by its
    damage cost.
    """
    if mode == MODE_EXACT:
        fpir_open_v, fpir_close_v = p_open(scenario.rates), p_close(scenario.rates)
    elif mode == MODE_APPROXIMATE:
        fpir_open_v, fpir_close_v = fpir_approx(scenario.rates)
    else:
        raise ValidationError(f"unknown FPIR mode {mode!r}")
    a = alpha(scenario.levels, model, schema)
    value = (
        scenario.c_open * a * fpir_open_v
        + scenario.c_close * (1.0 - a) * fpir_close_v
    )
    return RiskResult(
        alpha=a,
        fpir_open=fpir_open_v,
        fpir_close=fpir_close_v,
        c_identify=value,
        mode=mode,
    )


def c_norm(
    p_miss: float,
    p_false_alarm: float,
    c_miss: float = 1.0,
    c_false_alarm: float = 1.0,
    p_target: float = 0.01,
) -> float:
    """Weighted detection cost: P_Miss + beta * P_FalseAlarm.

    beta = (C_FalseAlarm / C_Miss) * (1 - P_Target) / P_Target folds the
    cost ratio and the target prior into a single false-alarm weight.
    """
    if not 0.0 < p_target < 1.0:
        raise ValidationError(f"p_target must be strictly inside (0, 1), got {p_target}")
    if c_miss <= 0 or c_false_alarm <= 0:
        raise ValidationError("costs must be positive")
    beta = (c_false_alarm / c_miss) * (1.0 - p_target) / p_target
    return p_miss + beta * p_false_alarm


@dataclass(frozen=True)
class UseCase:
    """A named security configuration over the non-FAR deterrents."""

    name: str
    levels: dict[str, int]

    def __post_init__(self):
        object.__setattr__(self, "levels", dict(self.levels))


@dataclass(frozen=True)
class GridCell:
    use_case: str
    far_label: str
    far_value: float
    result: RiskResult
    flagged: bool


@dataclass(frozen=True)
class RiskGrid:
    """Cross grid of use cases by FAR settings, with reference flagging."""

    use_cases: tuple[str, ...]
    far_labels: tuple[str, ...]
    cells: tuple[GridCell, ...]
    reference: tuple[str, str] | None  # (use case, FAR label)
    frr: float
    n: int
    mode: str
    model_kind: str

    def cell(self, use_case: str, far_label: str) -> GridCell:
        for c in self.cells:
            if c.use_case == use_case and c.far_label == far_label:
                return c
        raise ValidationError(f"no grid cell ({use_case!r}, {far_label!r})")


_FAR_LABEL = re.compile(r"^10\^(-?\d+)$")


def parse_far_label(label: str) -> float:
    """Numeric FAR for labels like ``10^-4``; plain floats also accepted."""
    m = _FAR_LABEL.match(label.strip())
    if m:
        return 10.0 ** int(m.group(1))
    try:
        value = float(label)
    except ValueError:
        raise ValidationError(
            f"cannot parse FAR value from level label {label!r}"
        ) from None
    return value


def compare_use_cases(
    use_cases: list[UseCase],
    far_levels: list[int],
    frr: float,
    n: int,
    model: AlphaModel,
    schema: AttributeSchema,
    mode: str = MODE_APPROXIMATE,
    c_open: float = DEFAULT_COST_OPEN,
    c_close: float = DEFAULT_COST_CLOSE,
    reference: tuple[str, str] | None = None,
    far_attribute: str = "FAR",
    far_values: list[float] | None = None,
) -> RiskGrid:
    """Evaluate every (use case, FAR level) combination.

    The FAR attribute participates in alpha like any other deterrent, and
    its numeric value feeds the verifier rates. When a reference cell is
    given, every cell with a strictly lower integrated risk is flagged.
    """
    far_attr = schema.attribute(far_attribute)
    labels = [far_attr.levels[i] for i in far_levels]
    if far_values is None:
        far_values = [parse_far_label(lbl) for lbl in labels]
    if len(far_values) != len(far_levels):
        raise ValidationError("far_values must align with far_levels")

    cells = []
    for uc in use_cases:
        for level, label, value in zip(far_levels, labels, far_values):
            rates = VerifierRates(p_fa=value, p_fr=frr, n=n)
            scenario = RiskScenario(
                levels={**uc.levels, far_attribute: level},
                rates=rates,
                c_open=c_open,
                c_close=c_close,
            )
            cells.append(
                GridCell(
                    use_case=uc.name,
                    far_label=label,
                    far_value=value,
                    result=c_identify(scenario, model, schema, mode=mode),
                    flagged=False,
                )
            )

    if reference is not None:
        ref_value = None
        for c in cells:
            if (c.use_case, c.far_label) == reference:
                ref_value = c.result.c_identify
        if ref_value is None:
            raise ValidationError(f"reference cell {reference!r} is not in the grid")
        cells = [
            GridCell(
                use_case=c.use_case,
                far_label=c.far_label,
                far_value=c.far_value,
                result=c.result,
                flagged=c.result.c_identify < ref_value,
            )
            for c in cells
        ]

    return RiskGrid(
        use_cases=tuple(uc.name for uc in use_cases),
        far_labels=tuple(labels),
        cells=tuple(cells),
        reference=reference,
        frr=frr,
        n=n,
        mode=mode,
        model_kind=model.kind,
    )
