from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conjointrisk import reference
from conjointrisk.errors import ValidationError
from conjointrisk.risk import (
    AlphaModel,
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
    parse_far_label,
)

# Frozen from 50-digit evaluation of the closed forms.
P_OPEN_1E4_10000 = 0.632138953567
P_CLOSE_1E2_1E5_10000 = 9.51539859255e-4


# -- search error rates ---------------------------------------------------------

def test_p_open_value():
    assert p_open(VerifierRates(1e-4, 0.0, 10000)) == pytest.approx(
        P_OPEN_1E4_10000, rel=1e-10
    )


def test_p_open_boundaries():
    assert p_open(VerifierRates(0.0, 0.0, 500)) == 0.0
    assert p_open(VerifierRates(1.0, 0.0, 500)) == 1.0
    assert p_open(VerifierRates(3e-4, 0.0, 1)) == 3e-4


def test_p_close_value():
    assert p_close(VerifierRates(1e-5, 1e-2, 10000)) == pytest.approx(
        P_CLOSE_1E2_1E5_10000, rel=1e-10
    )


def test_p_close_boundaries():
    assert p_close(VerifierRates(0.5, 0.5, 1)) == 0.0
    assert p_close(VerifierRates(0.5, 0.0, 100)) == 0.0


def test_fpir_approx_values():
    open_rate, _ = fpir_approx(VerifierRates(1e-5, 0.0, 10000))
    assert open_rate == pytest.approx(0.1, rel=1e-12)
    open_clamped, _ = fpir_approx(VerifierRates(1e-2, 0.0, 10000))
    assert open_clamped == 1.0
    _, close_rate = fpir_approx(VerifierRates(1e-5, 1e-2, 10000))
    assert close_rate == pytest.approx(9.999e-4, rel=1e-12)


@given(
    st.floats(1e-8, 1.0),
    st.floats(0.0, 1.0),
    st.integers(1, 10**6),
)
@settings(max_examples=300)
def test_exact_rates_monotone_and_below_linear(p_fa, p_fr, n):
    rates = VerifierRates(p_fa, p_fr, n)
    po = p_open(rates)
    assert 0.0 <= po <= 1.0
    assert po <= min(1.0, n * p_fa) + 1e-12
    bigger = VerifierRates(min(1.0, p_fa * 1.5), p_fr, n)
    assert p_open(bigger) >= po - 1e-15
    taller = VerifierRates(p_fa, p_fr, n + 10)
    assert p_open(taller) >= po - 1e-15
    # closed-set rate is linear in the false-reject rate
    if p_fr > 0:
        half = VerifierRates(p_fa, p_fr / 2, n)
        assert p_close(half) == pytest.approx(p_close(rates) / 2, rel=1e-12)


@given(st.floats(1e-9, 1e-3), st.integers(2, 10**5))
@settings(max_examples=300)
def test_exact_vs_approximate_within_1pct_in_linear_regime(p_fa, n):
    if n * p_fa >= 0.02:
        return
    rates = VerifierRates(p_fa, 1e-2, n)
    approx_open, approx_close = fpir_approx(rates)
    assert abs(p_open(rates) - approx_open) / approx_open < 0.01
    if approx_close > 0:
        assert abs(p_close(rates) - approx_close) / approx_close < 0.01


# -- alpha ----------------------------------------------------------------------

def weighted_model():
    return AlphaModel.coefficient_weighted(reference.REFERENCE_COEFFICIENTS)


def test_alpha_all_weakest_is_one(schema):
    levels = {name: 0 for name in schema.names}
    assert alpha(levels, weighted_model(), schema) == 1.0
    assert alpha(levels, AlphaModel.unweighted(schema), schema) == 1.0


def test_alpha_all_strongest_is_zero(schema):
    levels = {
        name: len(schema.attribute(name).levels) - 1 for name in schema.names
    }
    assert alpha(levels, weighted_model(), schema) == 0.0
    assert alpha(levels, AlphaModel.unweighted(schema), schema) == 0.0


def test_alpha_high_secure_at_far_level_1(schema):
    levels = {"FAR": 1, "Camera": 1, "Staff": 1, "Friendship": 1, "Congestion": 2}
    # exact rational arithmetic on the published magnitudes
    w = {k: Fraction(str(abs(v))) for k, v in reference.REFERENCE_COEFFICIENTS.items()}
    num = sum(w[k] * levels[k] for k in levels)
    den = (
        w["FAR"] * 3 + w["Camera"] + w["Staff"] + w["Friendship"] + w["Congestion"] * 2
    )
    expected = float(1 - num / den)
    got = alpha(levels, weighted_model(), schema)
    assert got == pytest.approx(expected, rel=1e-12)
    assert got == pytest.approx(0.4176, abs=5e-5)


def test_alpha_strictly_decreasing_per_level(schema):
    model = weighted_model()
    base = {name: 0 for name in schema.names}
    for name in schema.names:
        previous = alpha(base, model, schema)
        for level in range(1, len(schema.attribute(name).levels)):
            current = alpha({**base, name: level}, model, schema)
            assert current < previous
            previous = current


@given(
    st.integers(0, 3), st.integers(0, 1), st.integers(0, 1),
    st.integers(0, 1), st.integers(0, 2),
)
@settings(max_examples=200)
def test_alpha_in_unit_interval(far, cam, staff, friend, cong):
    from conjointrisk.schema import default_schema

    schema = default_schema()
    levels = {
        "FAR": far, "Camera": cam, "Staff": staff,
        "Friendship": friend, "Congestion": cong,
    }
    a = alpha(levels, weighted_model(), schema)
    assert 0.0 <= a <= 1.0


def test_alpha_zero_weights_rejected(schema):
    with pytest.raises(ValidationError):
        AlphaModel("coefficient_weighted", {n: 0.0 for n in schema.names})
    model = AlphaModel(
        "coefficient_weighted",
        {**{n: 0.0 for n in schema.names}, "FAR": 1.0},
    )
    with pytest.raises(ValidationError):
        alpha({"Camera": 1}, model, schema)


# -- integrated metric ------------------------------------------------------------

def test_c_identify_endpoints(schema):
    rates = VerifierRates(1e-4, 1e-2, 10000)
    model = weighted_model()
    strongest = {n: len(schema.attribute(n).levels) - 1 for n in schema.names}
    weakest = {n: 0 for n in schema.names}

    at_zero = c_identify(RiskScenario(strongest, rates), model, schema)
    assert at_zero.alpha == 0.0
    assert at_zero.c_identify == 0.5 * at_zero.fpir_close

    at_one = c_identify(RiskScenario(weakest, rates), model, schema)
    assert at_one.alpha == 1.0
    assert at_one.c_identify == 0.5 * at_one.fpir_open


def test_c_identify_cost_scaling(schema):
    rates = VerifierRates(1e-4, 1e-2, 10000)
    model = weighted_model()
    levels = {"FAR": 2, "Camera": 1, "Staff": 0, "Friendship": 1, "Congestion": 1}
    base = c_identify(RiskScenario(levels, rates), model, schema)
    zero = c_identify(
        RiskScenario(levels, rates, c_open=0.0, c_close=0.0), model, schema
    )
    assert zero.c_identify == 0.0
    scaled = c_identify(
        RiskScenario(levels, rates, c_open=1.5, c_close=1.5), model, schema
    )
    assert scaled.c_identify == pytest.approx(3.0 * base.c_identify, rel=1e-12)
    assert base.c_identify <= max(0.5, 0.5)


def test_c_identify_rejects_unknown_mode(schema):
    rates = VerifierRates(1e-4, 1e-2, 10)
    with pytest.raises(ValidationError):
        c_identify(
            RiskScenario({n: 0 for n in schema.names}, rates),
            weighted_model(),
            schema,
            mode="linearized",
        )


# -- detection-cost baseline -------------------------------------------------------

def test_c_norm_beta_is_99_at_published_settings():
    # beta folds into the false-alarm weight; with unit costs and prior 0.01
    # the weight is 99, so C = P_Miss + 99 * P_FalseAlarm.
    assert c_norm(0.0, 1.0) == pytest.approx(99.0, rel=1e-12)
    assert c_norm(0.1, 0.01) == pytest.approx(1.09, rel=1e-12)
    assert c_norm(0.3, 0.0) == 0.3


def test_c_norm_rejects_degenerate_prior():
    with pytest.raises(ValidationError):
        c_norm(0.1, 0.1, p_target=0.0)
    with pytest.raises(ValidationError):
        c_norm(0.1, 0.1, p_target=1.0)


# -- comparison grid ---------------------------------------------------------------

def grid_fixture(schema):
    return compare_use_cases(
        use_cases=list(reference.USE_CASES),
        far_levels=[0, 1, 2, 3],
        frr=1e-2,
        n=10000,
        model=weighted_model(),
        schema=schema,
        mode="approximate",
        reference=("Low-secure", "10^-4"),
    )


def test_grid_shape_and_high_secure_column(schema):
    grid = grid_fixture(schema)
    assert len(grid.cells) == 12
    expected = {"10^-2": 0.315, "10^-3": 0.211, "10^-4": 0.108}
    for far, value in expected.items():
        assert grid.cell("High-secure", far).result.c_identify == pytest.approx(
            value, abs=2e-3
        )
    assert grid.cell("High-secure", "10^-5").result.c_identify == pytest.approx(
        4.99e-4, abs=2e-5
    )


def test_reference_flagging(schema):
    grid = grid_fixture(schema)
    assert grid.cell("High-secure", "10^-3").flagged
    assert not grid.cell("Low-secure", "10^-4").flagged  # strict inequality
    assert not grid.cell("High-secure", "10^-2").flagged
    ref_value = grid.cell("Low-secure", "10^-4").result.c_identify
    for cell in grid.cells:
        assert cell.flagged == (cell.result.c_identify < ref_value)


def test_far_label_parsing():
    assert parse_far_label("10^-4") == 1e-4
    assert parse_far_label("1e-3") == 1e-3
    with pytest.raises(ValidationError):
        parse_far_label("one in many")


def test_grid_rejects_missing_reference(schema):
    with pytest.raises(ValidationError):
        compare_use_cases(
            use_cases=[UseCase("only", {"Camera": 0, "Staff": 0,
                                        "Friendship": 0, "Congestion": 0})],
            far_levels=[0],
            frr=1e-2,
            n=100,
            model=weighted_model(),
            schema=schema,
            reference=("nope", "10^-2"),
        )


def test_rates_validation():
    with pytest.raises(ValidationError):
        VerifierRates(-0.1, 0.0, 10)
    with pytest.raises(ValidationError):
        VerifierRates(0.1, 1.5, 10)
    with pytest.raises(ValidationError):
        VerifierRates(0.1, 0.5, 0)
