import pytest

from conjointrisk.design import (
    FractionalDesign,
    design_criterion,
    federov_select,
    full_factorial,
    make_pairs,
)
from conjointrisk.errors import (
    ConfigurationError,
    PairingError,
    ValidationError,
)
from conjointrisk.schema import Attribute, AttributeSchema, ConjointCard, model_matrix

from oracles import brute_force_best_subset


def toy_schema(n_binary=3):
    return AttributeSchema(
        tuple(Attribute(f"A{i}", ("no", "yes")) for i in range(n_binary))
    )


def test_full_factorial_size(schema):
    assert len(full_factorial(schema).cards) == 96


def test_full_factorial_single_attribute():
    s = AttributeSchema((Attribute("A", ("x", "y")),))
    cards = full_factorial(s).cards
    assert [c.assignment for c in cards] == [{"A": 0}, {"A": 1}]


def test_full_factorial_exactly_once():
    s = AttributeSchema((Attribute("A", ("1", "2")), Attribute("B", ("1", "2", "3"))))
    cards = full_factorial(s).cards
    assert len(cards) == 6
    assert len({tuple(sorted(c.assignment.items())) for c in cards}) == 6


def test_full_factorial_lexicographic(schema):
    cards = full_factorial(schema).cards
    keys = [c.key(schema) for c in cards]
    assert keys == sorted(keys)


def test_exchange_attains_brute_force_optimum():
    s = toy_schema(3)
    candidates = full_factorial(s)
    x = model_matrix(candidates.cards, s, with_intercept=True)
    best_det, _ = brute_force_best_subset(x, 4)
    for seed in range(10):
        design = federov_select(candidates, s, n=4, seed=seed)
        assert design.criterion_value == pytest.approx(best_det, rel=1e-9)


def test_design_beats_reference_fixture(schema, ref_design):
    candidates = full_factorial(schema)
    design = federov_select(candidates, schema, n=9, seed=7)
    assert design.criterion_value >= ref_design.criterion_value
    assert len({c.key(schema) for c in design.cards}) == 9


def test_full_candidate_set_design(schema):
    s = toy_schema(2)
    candidates = full_factorial(s)
    design = federov_select(candidates, s, n=len(candidates.cards), seed=0)
    assert len(design.cards) == len(candidates.cards)
    assert design.criterion_value == pytest.approx(
        design_criterion(candidates.cards, s), rel=1e-12
    )


def test_n_below_column_count_rejected(schema):
    candidates = full_factorial(schema)
    with pytest.raises(ConfigurationError):
        federov_select(candidates, schema, n=5, seed=0)  # needs intercept + 5


def test_exchange_trace_monotone_and_rank_one_consistent():
    s = toy_schema(4)
    candidates = full_factorial(s)
    trace = []
    federov_select(candidates, s, n=6, restarts=5, seed=3, trace=trace)
    assert trace, "expected at least one accepted swap"
    for step in trace:
        assert step.criterion_after > step.criterion_before
        assert step.actual_ratio == pytest.approx(step.predicted_ratio, rel=1e-9)


def test_design_deterministic_under_seed(schema):
    candidates = full_factorial(schema)
    d1 = federov_select(candidates, schema, n=9, seed=11)
    d2 = federov_select(candidates, schema, n=9, seed=11)
    assert [c.assignment for c in d1.cards] == [c.assignment for c in d2.cards]
    assert d1.criterion_value == d2.criterion_value


def test_make_pairs_no_self_pairs(ref_design):
    plan = make_pairs(ref_design, seed=5)
    assert len(plan.pairs) == 9
    assert all(a != b for a, b in plan.pairs)
    numbers = {c.index for c in ref_design.cards}
    assert all(a in numbers and b in numbers for a, b in plan.pairs)


def test_make_pairs_two_cards():
    s = toy_schema(1)
    cards = (
        ConjointCard({"A0": 0}, index=1),
        ConjointCard({"A0": 1}, index=2),
    )
    design = FractionalDesign(cards, design_criterion(cards, s), seed=0)
    for seed in range(20):
        plan = make_pairs(design, seed=seed)
        assert all(p in {(1, 2), (2, 1)} for p in plan.pairs)


def test_make_pairs_deterministic(ref_design):
    assert make_pairs(ref_design, seed=42) == make_pairs(ref_design, seed=42)


def test_make_pairs_needs_two_cards():
    card = ConjointCard({"A0": 0}, index=1)
    s = toy_schema(1)
    design = FractionalDesign((card,), 0.0, seed=None)
    with pytest.raises(ValidationError):
        make_pairs(design, seed=0)


class _StubDesign:
    """Duck-typed design whose cards all show the same profile."""

    def __init__(self, n):
        self.cards = tuple(ConjointCard({"A0": 0}, index=i + 1) for i in range(n))


def test_make_pairs_identical_cards_hits_retry_cap():
    with pytest.raises(PairingError):
        make_pairs(_StubDesign(3), seed=0, retry_cap=50)


def test_design_rejects_duplicate_profiles():
    with pytest.raises(ValidationError):
        FractionalDesign(
            (ConjointCard({"A0": 0}, index=1), ConjointCard({"A0": 0}, index=2)),
            criterion_value=1.0,
        )


def test_reference_pair_fixture_is_valid(ref_plan, ref_design):
    numbers = {c.index for c in ref_design.cards}
    assert len(ref_plan.pairs) == 9
    for c1, c2 in ref_plan.pairs:
        assert c1 != c2
        assert c1 in numbers and c2 in numbers
