#!/usr/bin/env python3
"""
Tests de núcleos de distorsión: equivalencia de las dos formas de ρ_Φ,
familias estándar, construcción desde JSON y propiedades de núcleos.
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent))

from risk_sharing.allocation import regularity_check
from risk_sharing.distortion import (
    DistortionKernel,
    cvar,
    cvar_at,
    dual,
    expectation_kernel,
    from_points,
    from_spec,
    in_domain,
    is_convex,
    is_robust,
    max_kernel,
    mixture,
    parse_kernel_id,
    prop_hazard,
    risk_choquet_form,
    risk_quantile_form,
    value_at_risk,
    var_at,
    wang,
)
from risk_sharing.distributions import DiscreteAtoms, EmpiricalSample, Exponential, UniformContinuous
from risk_sharing.duality import FiniteSpace, vector_risk
from risk_sharing.errors import DomainError, SpecValidationError

UNIFORM_FOUR = DiscreteAtoms.uniform_on([1, 2, 3, 4])


def _random_kernel(rng: np.random.Generator) -> DistortionKernel:
    """Núcleo aleatorio: familias estándar, mezclas o nodos con saltos."""
    kind = rng.integers(5)
    if kind == 0:
        return var_at(float(rng.choice(np.arange(1, 21) / 20)))
    if kind == 1:
        return cvar_at(float(rng.choice(np.arange(0, 19) / 20)))
    if kind == 2:
        return mixture(
            [0.3, 0.7],
            [var_at(float(rng.uniform(0.05, 0.95))), cvar_at(float(rng.uniform(0.0, 0.95)))],
        )
    if kind == 3:
        return expectation_kernel()

    k = int(rng.integers(1, 5))
    levels = np.sort(rng.choice(np.arange(1, 20) / 20, size=k, replace=False))
    increments = rng.exponential(size=2 * k + 2)
    increments[rng.random(2 * k + 2) < 0.3] = 0.0
    increments[-1] += 1.0
    cumulative = np.cumsum(increments) / increments.sum()
    points = [[0.0, 0.0]]
    for i, t in enumerate(levels):
        points.append([float(t), float(cumulative[2 * i]), float(cumulative[2 * i + 1])])
    points.append([1.0, float(cumulative[2 * k]), 1.0])
    return from_points(points)


# ============================================================================
# EQUIVALENCIA DE FORMAS
# ============================================================================

def test_forms_agree_on_seeded_batch():
    rng = np.random.default_rng(2024)
    with_negative_part = 0
    for case in range(200):
        values = rng.integers(-10, 11, size=int(rng.integers(1, 9))).astype(float)
        if case < 100:
            values[0] = -abs(values[0]) - 1.0
        dist = DiscreteAtoms.uniform_on(values)
        kernel = _random_kernel(rng)
        if dist.lower < 0.0:
            with_negative_part += 1

        quantile_form = risk_quantile_form(dist, kernel)
        choquet_form = risk_choquet_form(dist, kernel)
        assert choquet_form == pytest.approx(quantile_form, abs=1e-9), (values, kernel.points())
    assert with_negative_part >= 50


@st.composite
def kernels(draw):
    alpha = draw(st.floats(0.01, 0.99))
    kind = draw(st.sampled_from(["expectation", "var", "cvar", "mixture"]))
    if kind == "expectation":
        return expectation_kernel()
    if kind == "var":
        return var_at(alpha)
    if kind == "cvar":
        return cvar_at(alpha)
    return mixture([0.5, 0.5], [var_at(alpha), cvar_at(alpha)])


@settings(max_examples=80, derandomize=True, deadline=None)
@given(
    st.lists(st.integers(-20, 20), min_size=1, max_size=8),
    kernels(),
)
def test_forms_agree_on_discrete_laws(values, kernel):
    dist = DiscreteAtoms.uniform_on([float(v) for v in values])
    assert risk_choquet_form(dist, kernel) == pytest.approx(risk_quantile_form(dist, kernel), abs=1e-9)


@settings(max_examples=60, derandomize=True, deadline=None)
@given(
    st.lists(st.integers(0, 20), min_size=1, max_size=8),
    st.floats(0.0, 20.0),
    kernels(),
)
def test_comonotone_additivity(values, cut, kernel):
    # min(X, a) y (X − a)⁺ son co-monótonas y suman X
    xs = np.array(values, dtype=float)
    probs = np.full(len(xs), 1.0 / len(xs))
    whole = risk_quantile_form(DiscreteAtoms.from_pairs(xs, probs), kernel)
    low = risk_quantile_form(DiscreteAtoms.from_pairs(np.minimum(xs, cut), probs), kernel)
    high = risk_quantile_form(DiscreteAtoms.from_pairs(np.maximum(xs - cut, 0.0), probs), kernel)
    assert low + high == pytest.approx(whole, abs=1e-9)


@settings(max_examples=60, derandomize=True, deadline=None)
@given(
    st.lists(st.integers(-10, 10), min_size=1, max_size=8),
    st.floats(0.1, 5.0),
    st.floats(-5.0, 5.0),
    kernels(),
)
def test_homogeneity_and_translation(values, scale, shift, kernel):
    xs = np.array(values, dtype=float)
    base = risk_quantile_form(DiscreteAtoms.uniform_on(xs), kernel)
    moved = risk_quantile_form(DiscreteAtoms.uniform_on(scale * xs + shift), kernel)
    assert moved == pytest.approx(scale * base + shift, abs=1e-9)


@pytest.mark.parametrize("kernel", [
    expectation_kernel(), var_at(0.3), cvar_at(0.5), prop_hazard(0.5), wang(0.5),
])
def test_forms_agree_on_continuous_laws(kernel):
    for dist in (Exponential(1.0), UniformContinuous(-1.0, 2.0)):
        assert risk_choquet_form(dist, kernel) == pytest.approx(risk_quantile_form(dist, kernel), abs=1e-9)


# ============================================================================
# FAMILIAS ESTÁNDAR
# ============================================================================

def test_cvar_and_var_on_uniform_four():
    assert cvar(UNIFORM_FOUR, 0.5) == pytest.approx(3.5)
    assert cvar(UNIFORM_FOUR, 0.0) == pytest.approx(2.5)
    assert value_at_risk(UNIFORM_FOUR, 0.5) == 2.0
    assert value_at_risk(UNIFORM_FOUR, 0.0) == 1.0
    assert risk_quantile_form(UNIFORM_FOUR, var_at(0.6)) == 3.0
    assert risk_quantile_form(UNIFORM_FOUR, var_at(1.0)) == 4.0


@pytest.mark.parametrize("kernel", [var_at(0.3), cvar_at(0.9), expectation_kernel(), wang(1.0)])
def test_point_mass_has_its_own_risk(kernel):
    seven = DiscreteAtoms.point_mass(7.0)
    assert risk_quantile_form(seven, kernel) == pytest.approx(7.0)
    assert risk_choquet_form(seven, kernel) == pytest.approx(7.0)


def test_exponential_var_and_cvar():
    dist = Exponential(1.0)
    assert risk_quantile_form(dist, var_at(0.7)) == pytest.approx(-math.log(0.3))
    # CVaR_α de Exp(1) = 1 − ln(1−α)
    assert cvar(dist, 0.5) == pytest.approx(1.0 + math.log(2.0))


def test_smooth_kernels_on_uniform():
    dist = UniformContinuous(0.0, 1.0)
    # g(s) = √s => ρ = ∫₀¹ √(1−x) dx = 2/3
    assert risk_quantile_form(dist, prop_hazard(0.5)) == pytest.approx(2.0 / 3.0, abs=1e-3)
    assert risk_quantile_form(dist, prop_hazard(1.0)) == pytest.approx(0.5, abs=1e-12)
    assert risk_quantile_form(dist, wang(0.0)) == pytest.approx(0.5, abs=1e-7)
    assert risk_quantile_form(dist, wang(1.0)) > 0.5


def test_mixture_is_linear_in_the_measure():
    kernel = mixture([0.5, 0.5], [var_at(0.5), expectation_kernel()])
    assert risk_quantile_form(UNIFORM_FOUR, kernel) == pytest.approx(0.5 * 2.0 + 0.5 * 2.5)


def test_var_at_one_is_outside_the_domain_of_unbounded_laws():
    assert not in_domain(Exponential(1.0), var_at(1.0))
    with pytest.raises(DomainError):
        risk_quantile_form(Exponential(1.0), var_at(1.0))
    assert in_domain(UNIFORM_FOUR, var_at(1.0))


def test_cvar_and_var_argument_ranges():
    with pytest.raises(DomainError):
        cvar(UNIFORM_FOUR, 1.0)
    with pytest.raises(DomainError):
        value_at_risk(UNIFORM_FOUR, 1.5)
    with pytest.raises(SpecValidationError):
        var_at(0.0)
    with pytest.raises(SpecValidationError):
        cvar_at(1.0)


# ============================================================================
# REGULARIDAD
# ============================================================================

def test_truncation_gap_of_exponential_mean():
    report = regularity_check(expectation_kernel(), Exponential(1.0), [1.0, 5.0, 20.0])
    for m, gap in zip(report.levels, report.gaps):
        assert gap == pytest.approx(math.exp(-m), rel=1e-6, abs=1e-13)
    assert report.passed


def test_regularity_fails_on_short_levels():
    report = regularity_check(expectation_kernel(), Exponential(1.0), [1.0, 2.0])
    assert not report.passed
    with pytest.raises(SpecValidationError):
        regularity_check(expectation_kernel(), Exponential(1.0), [5.0, 1.0])


# ============================================================================
# PROPIEDADES DE NÚCLEOS
# ============================================================================

def test_convexity():
    assert is_convex(expectation_kernel())
    assert is_convex(cvar_at(0.5))
    assert is_convex(var_at(1.0))
    assert is_convex(prop_hazard(0.5))
    assert not is_convex(var_at(0.5))
    assert not is_convex(mixture([0.5, 0.5], [var_at(0.5), cvar_at(0.2)]))
    assert dual(cvar_at(0.5)).is_concave


def test_robustness():
    assert is_robust(var_at(0.5))
    assert not is_robust(expectation_kernel())
    assert not is_robust(cvar_at(0.5))


def test_dual_distortion_values():
    g = dual(cvar_at(0.5))
    assert g(0.25) == pytest.approx(0.5)
    assert g(0.0) == 0.0
    assert g(1.0) == 1.0
    assert np.allclose(g(np.array([0.0, 0.5, 1.0])), [0.0, 1.0, 1.0])


def test_max_kernel_is_pointwise_maximum():
    combined = max_kernel(cvar_at(0.25), cvar_at(0.5))
    grid = np.linspace(0.0, 1.0, 41)
    assert np.allclose(combined(grid), cvar_at(0.25)(grid))
    mixed = max_kernel([var_at(0.7), expectation_kernel()])
    assert np.allclose(mixed(grid), np.maximum(var_at(0.7)(grid), grid))
    assert max_kernel(var_at(0.5)) == var_at(0.5)


@settings(max_examples=60, derandomize=True, deadline=None)
@given(
    st.lists(st.integers(0, 20), min_size=1, max_size=8),
    kernels(),
    kernels(),
)
def test_larger_kernel_gives_smaller_risk(values, first, second):
    larger = max_kernel(first, second)
    grid = np.linspace(0.0, 1.0, 101)
    assert np.all(larger(grid) >= first(grid) - 1e-12)
    assert np.all(larger(grid) >= second(grid) - 1e-12)
    dist = DiscreteAtoms.uniform_on([float(v) for v in values])
    lowest = min(risk_quantile_form(dist, first), risk_quantile_form(dist, second))
    assert risk_quantile_form(dist, larger) <= lowest + 1e-9


def test_kernel_order_on_families():
    for low, high in ((0.3, 0.8), (0.0, 0.5)):
        assert np.all(cvar_at(high)(np.linspace(0, 1, 41)) <= cvar_at(low)(np.linspace(0, 1, 41)))
        assert risk_quantile_form(UNIFORM_FOUR, cvar_at(high)) >= risk_quantile_form(UNIFORM_FOUR, cvar_at(low))
    assert risk_quantile_form(Exponential(1.0), var_at(0.9)) >= risk_quantile_form(Exponential(1.0), var_at(0.5))


@settings(max_examples=40, derandomize=True, deadline=None)
@given(st.lists(st.integers(-10, 30), min_size=1, max_size=12), kernels())
def test_risk_depends_only_on_the_law(values, kernel):
    sample = EmpiricalSample.from_values(values)
    unique, counts = np.unique(values, return_counts=True)
    atoms = DiscreteAtoms.from_pairs(unique, counts / len(values))
    shuffled = EmpiricalSample.from_values(list(reversed(values)))
    expected = risk_quantile_form(atoms, kernel)
    assert risk_quantile_form(sample, kernel) == pytest.approx(expected, abs=1e-12)
    assert risk_quantile_form(shuffled, kernel) == pytest.approx(expected, abs=1e-12)
    assert risk_choquet_form(sample, kernel) == pytest.approx(risk_choquet_form(atoms, kernel), abs=1e-12)


@settings(max_examples=60, derandomize=True, deadline=None)
@given(
    st.lists(st.integers(-10, 10), min_size=4, max_size=4),
    st.lists(st.integers(-10, 10), min_size=4, max_size=4),
    st.sampled_from([0.0, 0.25, 0.5, 0.9]),
)
def test_convex_kernels_are_subadditive(x, y, alpha):
    space = FiniteSpace.uniform(4)
    x, y = np.array(x, dtype=float), np.array(y, dtype=float)
    for kernel in (cvar_at(alpha), mixture([0.5, 0.5], [cvar_at(alpha), expectation_kernel()])):
        assert is_convex(kernel)
        joint = vector_risk(kernel, space, x + y)
        assert joint <= vector_risk(kernel, space, x) + vector_risk(kernel, space, y) + 1e-9


def test_var_is_not_subadditive():
    space = FiniteSpace.uniform(4)
    x = np.array([1.0, 0.0, 0.0, 0.0])
    y = np.array([0.0, 1.0, 0.0, 0.0])
    kernel = var_at(0.7)
    assert not is_convex(kernel)
    assert vector_risk(kernel, space, x) == 0.0
    assert vector_risk(kernel, space, y) == 0.0
    assert vector_risk(kernel, space, x + y) == 1.0


# ============================================================================
# CONSTRUCCIÓN
# ============================================================================

def test_parse_kernel_ids():
    assert parse_kernel_id("var:0.6") == var_at(0.6)
    assert parse_kernel_id("cvar:0.5") == cvar_at(0.5)
    assert parse_kernel_id("expectation") == expectation_kernel()
    assert str(parse_kernel_id("ph:0.5")) == "ph:0.5"
    with pytest.raises(SpecValidationError):
        parse_kernel_id("gamma:2")
    with pytest.raises(SpecValidationError):
        parse_kernel_id("var:abc")


def test_from_spec_builds_every_family():
    assert from_spec({"type": "var", "alpha": 0.6}) == var_at(0.6)
    assert from_spec({"type": "cvar", "alpha": 0.5}) == cvar_at(0.5)
    assert from_spec("expectation") == expectation_kernel()
    kernel = from_spec({"type": "points", "points": [[0, 0], [0.5, 0, 1], [1, 1]]})
    assert kernel == var_at(0.5)
    mixed = from_spec({"type": "mixture", "components": [
        {"weight": 0.5, "kernel": {"type": "var", "alpha": 0.5}},
        {"weight": 0.5, "kernel": "expectation"},
    ]})
    assert risk_quantile_form(UNIFORM_FOUR, mixed) == pytest.approx(2.25)


@pytest.mark.parametrize("data, path", [
    ({"type": "gamma"}, "agents[0].kernel.type"),
    ({"type": "var"}, "agents[0].kernel"),
    ({"type": "var", "alpha": "x"}, "agents[0].kernel.alpha"),
    ({"type": "var", "alpha": 1.5}, "agents[0].kernel.alpha"),
    ({"type": "points", "points": [[0, 0], [0.5, 0.8], [1, 0.6]]}, "agents[0].kernel"),
    ({"type": "points", "points": [[0, 0], [1, 0.5]]}, "agents[0].kernel"),
])
def test_from_spec_errors_carry_path(data, path):
    with pytest.raises(SpecValidationError) as info:
        from_spec(data, path="agents[0].kernel")
    assert info.value.path == path


def test_kernel_dict_round_trip():
    kernel = mixture([0.25, 0.75], [var_at(0.4), cvar_at(0.6)])
    rebuilt = from_spec(kernel.to_dict())
    grid = np.linspace(0.0, 1.0, 101)
    assert np.allclose(rebuilt(grid), kernel(grid))
