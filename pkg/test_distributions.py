#!/usr/bin/env python3
"""
Tests de leyes de pérdida: quantiles inferiores, truncamiento, pushforward
exacto, muestreo determinista y lectura de CSV.
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent))

from risk_sharing.distributions import (
    DiscreteAtoms,
    EmpiricalSample,
    Exponential,
    TransformedContinuous,
    UniformContinuous,
    cdf,
    expectation,
    from_dict,
    parse_shorthand,
    pushforward,
    quantile,
    sample,
    truncate,
)
from risk_sharing.errors import DomainError, SpecValidationError
from risk_sharing.loaders import SampleLoader
from risk_sharing.piecewise import PiecewiseMonotoneFn

UNIFORM_FOUR = DiscreteAtoms.uniform_on([1, 2, 3, 4])


# ============================================================================
# LEYES DISCRETAS
# ============================================================================

def test_discrete_cdf_and_lower_quantile():
    assert cdf(UNIFORM_FOUR, 0.5) == 0.0
    assert cdf(UNIFORM_FOUR, 2.0) == pytest.approx(0.5)
    assert cdf(UNIFORM_FOUR, 10.0) == 1.0
    # Quantil inferior: en t = F(2) devuelve 2, justo después salta
    assert quantile(UNIFORM_FOUR, 0.5) == 2.0
    assert quantile(UNIFORM_FOUR, 0.51) == 3.0
    assert quantile(UNIFORM_FOUR, 1.0) == 4.0
    assert quantile(UNIFORM_FOUR, 1e-6) == 1.0


@pytest.mark.parametrize("level", [0.0, -0.1, 1.5, float("nan")])
def test_quantile_level_outside_domain(level):
    with pytest.raises(DomainError):
        quantile(UNIFORM_FOUR, level)


def test_from_pairs_merges_repeated_atoms():
    dist = DiscreteAtoms.from_pairs([3, 1, 3], [0.25, 0.5, 0.25])
    assert dist.values == (1.0, 3.0)
    assert dist.probabilities == pytest.approx((0.5, 0.5))


def test_invalid_discrete_laws():
    with pytest.raises(SpecValidationError):
        DiscreteAtoms(values=(1.0, 2.0), probabilities=(0.3, 0.3))
    with pytest.raises(SpecValidationError):
        DiscreteAtoms(values=(2.0, 1.0), probabilities=(0.5, 0.5))
    with pytest.raises(SpecValidationError):
        DiscreteAtoms(values=(), probabilities=())


def test_expectation_and_integrated_quantile():
    assert expectation(UNIFORM_FOUR) == pytest.approx(2.5)
    assert UNIFORM_FOUR.integrated_quantile(0.5, 1.0) == pytest.approx(0.25 * (3 + 4))
    # Primitiva continua dentro de un átomo
    assert UNIFORM_FOUR.integrated_quantile(0.6, 0.7) == pytest.approx(0.1 * 3)


def test_discrete_truncation_and_pushforward():
    capped = truncate(UNIFORM_FOUR, 3.0)
    assert capped.values == (1.0, 2.0, 3.0)
    assert capped.probabilities == pytest.approx((0.25, 0.25, 0.5))
    assert truncate(UNIFORM_FOUR, 10.0) is UNIFORM_FOUR
    with pytest.raises(DomainError):
        truncate(UNIFORM_FOUR, 1.0)

    layer = pushforward(UNIFORM_FOUR, PiecewiseMonotoneFn.clamp(0.0, 2.0).compose(
        PiecewiseMonotoneFn.linear(1.0, -1.0)
    ))
    assert layer.values == (0.0, 1.0, 2.0)


@settings(max_examples=60, derandomize=True, deadline=None)
@given(
    st.lists(st.floats(-50, 50, allow_nan=False), min_size=1, max_size=10),
    st.floats(0.01, 1.0),
)
def test_quantile_is_inverse_of_cdf(values, level):
    dist = DiscreteAtoms.uniform_on(values)
    q = dist.quantile(level)
    # F(q) >= t y F(x) < t para todo x < q
    assert dist.cdf(q) >= level - 1e-12
    below = [v for v in dist.values if v < q]
    if below:
        assert dist.cdf(max(below)) < level + 1e-12


# ============================================================================
# LEYES CONTINUAS
# ============================================================================

def test_exponential_closed_forms():
    dist = Exponential(1.0)
    assert dist.quantile(0.5) == pytest.approx(math.log(2.0), abs=1e-15)
    assert dist.expectation() == pytest.approx(1.0, abs=1e-12)
    assert dist.cdf(1.0) == pytest.approx(1.0 - math.exp(-1.0))
    assert dist.integrated_survival(0.0, float("inf")) == pytest.approx(1.0, abs=1e-12)
    assert dist.upper == float("inf")
    with pytest.raises(SpecValidationError):
        Exponential(0.0)


def test_uniform_quantiles_are_identity():
    dist = UniformContinuous(0.0, 1.0)
    for t in (0.1, 0.5, 0.7, 1.0):
        assert dist.quantile(t) == pytest.approx(t)
    assert dist.expectation() == pytest.approx(0.5)


@pytest.mark.parametrize("m", [0.5, 1.0, 5.0, 10.0])
def test_exponential_truncation_is_exact(m):
    capped = truncate(Exponential(1.0), m)
    assert isinstance(capped, TransformedContinuous)
    assert capped.upper == pytest.approx(m)
    assert capped.expectation() == pytest.approx(1.0 - math.exp(-m), abs=1e-12)
    # Átomo en m con masa e^{-m}
    assert list(capped.atoms()) == pytest.approx([m])


def test_transformed_law_quantiles_and_cdf():
    dist = UniformContinuous(0.0, 4.0)
    half = pushforward(dist, PiecewiseMonotoneFn.identity().scaled(0.5))
    assert half.quantile(0.5) == pytest.approx(1.0)
    assert half.cdf(1.0) == pytest.approx(0.5)
    assert half.expectation() == pytest.approx(1.0)
    # Composición de transformaciones
    twice = pushforward(half, PiecewiseMonotoneFn.identity().scaled(0.5))
    assert twice.quantile(1.0) == pytest.approx(1.0)
    assert twice.expectation() == pytest.approx(0.5)


def _monotone_maps(level: float, width: float):
    return [
        PiecewiseMonotoneFn.clamp(level, level + width),
        PiecewiseMonotoneFn.cap(level),
        PiecewiseMonotoneFn.identity().scaled(2.0),
        PiecewiseMonotoneFn.zero(),
    ]


@settings(max_examples=50, derandomize=True, deadline=None)
@given(
    st.lists(st.integers(0, 20), min_size=1, max_size=8),
    st.integers(0, 20),
    st.integers(0, 10),
)
def test_quantile_commutes_with_monotone_maps(values, level, width):
    levels = np.linspace(0.01, 1.0, 100)
    laws = [DiscreteAtoms.uniform_on(values), EmpiricalSample.from_values(values + values[:1])]
    for dist in laws:
        for fn in _monotone_maps(float(level), float(width)):
            image = pushforward(dist, fn)
            for t in levels:
                assert quantile(image, t) == pytest.approx(float(fn(quantile(dist, t))), abs=1e-12)


def test_quantile_commutes_on_continuous_laws():
    levels = np.linspace(0.01, 1.0, 100)
    for dist in (Exponential(1.0), UniformContinuous(0.0, 4.0)):
        for fn in _monotone_maps(0.5, 1.5):
            image = pushforward(dist, fn)
            for t in levels:
                assert quantile(image, t) == pytest.approx(float(fn(quantile(dist, t))), abs=1e-12)


@settings(max_examples=60, derandomize=True, deadline=None)
@given(
    st.lists(st.integers(0, 20), min_size=1, max_size=8),
    st.integers(0, 25),
)
def test_truncation_lowers_expectation(values, k):
    dist = DiscreteAtoms.uniform_on(values)
    m = k + 0.5
    if m <= dist.lower:
        with pytest.raises(DomainError):
            truncate(dist, m)
        return
    capped = expectation(truncate(dist, m))
    if m >= dist.upper:
        assert capped == pytest.approx(expectation(dist), abs=1e-12)
    else:
        # Al menos el átomo superior pierde upper − m
        assert capped <= expectation(dist) - (dist.upper - m) * dist.probabilities[-1] + 1e-12


# ============================================================================
# MUESTREO Y CARGA
# ============================================================================

def test_sampling_is_deterministic():
    first = sample(Exponential(2.0), 500, seed=7)
    second = sample(Exponential(2.0), 500, seed=7)
    other = sample(Exponential(2.0), 500, seed=8)
    assert isinstance(first, EmpiricalSample)
    assert first.observations == second.observations
    assert first.observations != other.observations
    assert first.size == 500
    assert list(first.observations) == sorted(first.observations)


def test_ingest_csv(tmp_path):
    path = tmp_path / "losses.csv"
    path.write_text("loss\n4\n1\n3\n2\n", encoding="utf-8")
    dist = SampleLoader.ingest_csv(path)
    assert dist.values == (1.0, 2.0, 3.0, 4.0)
    assert dist.observations == (1.0, 2.0, 3.0, 4.0)


def test_ingest_csv_reports_bad_row(tmp_path):
    path = tmp_path / "losses.csv"
    path.write_text("loss\n1\n2\nabc\n", encoding="utf-8")
    with pytest.raises(SpecValidationError) as info:
        SampleLoader.ingest_csv(path)
    assert info.value.row == 4


def test_ingest_csv_rejects_header_and_empty_files(tmp_path):
    wrong = tmp_path / "wrong.csv"
    wrong.write_text("value\n1\n", encoding="utf-8")
    with pytest.raises(SpecValidationError) as info:
        SampleLoader.ingest_csv(wrong)
    assert info.value.row == 1

    empty = tmp_path / "empty.csv"
    empty.write_text("", encoding="utf-8")
    with pytest.raises(SpecValidationError):
        SampleLoader.ingest_csv(empty)

    with pytest.raises(SpecValidationError):
        SampleLoader.ingest_csv(tmp_path / "missing.csv")


def test_from_dict_and_shorthand():
    assert from_dict({"type": "atoms", "values": [1, 2, 3, 4]}) == UNIFORM_FOUR
    assert from_dict({"type": "point", "value": 7}).values == (7.0,)
    assert from_dict({"type": "exponential", "rate": 1.0}) == Exponential(1.0)
    capped = from_dict({"type": "atoms", "values": [1, 2, 3, 4], "cap": 2.5})
    assert capped.values == (1.0, 2.0, 2.5)

    assert parse_shorthand("exp:1") == Exponential(1.0)
    assert parse_shorthand("uniform:0:1") == UniformContinuous(0.0, 1.0)
    assert parse_shorthand("atoms:1,2,3,4") == UNIFORM_FOUR
    assert parse_shorthand("point:7").expectation() == 7.0


@pytest.mark.parametrize("data, path", [
    ({"type": "gamma"}, "total.type"),
    ({"type": "exponential"}, "total"),
    ({"type": "atoms", "values": [1, 2], "probs": [0.2, 0.2]}, "total.probs"),
])
def test_from_dict_errors_carry_path(data, path):
    with pytest.raises(SpecValidationError) as info:
        from_dict(data)
    assert info.value.path == path


def test_unknown_shorthand():
    with pytest.raises(SpecValidationError):
        parse_shorthand("gamma:2")
    with pytest.raises(SpecValidationError):
        parse_shorthand("exp")


def test_negative_support_is_allowed():
    dist = DiscreteAtoms.uniform_on([-3, -1, 2])
    assert not dist.is_nonnegative
    assert dist.expectation() == pytest.approx(-2.0 / 3.0)
    assert np.isclose(dist.integrated_quantile(0.0, 1.0), dist.expectation())
