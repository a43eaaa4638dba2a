#!/usr/bin/env python3
"""
Tests de los oráculos: fuerza bruta, sondeo fraccional, contraejemplo de
riesgo moral, brecha estricta, Monte Carlo y constancia con núcleos idénticos.
"""

import logging
import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent))

from risk_sharing.allocation import optimal_value
from risk_sharing.config import SolverConfig
from risk_sharing.distortion import cvar_at, expectation_kernel, var_at
from risk_sharing.distributions import DiscreteAtoms, Exponential, UniformContinuous
from risk_sharing.errors import (
    AllocationValidationError,
    EnumerationLimitError,
    PreconditionError,
    SpecValidationError,
)
from risk_sharing.models import AgentSpec, MarketProblem
from risk_sharing.oracles import (
    brute_force_comonotone,
    constancy_check,
    fractional_probe,
    fubini_gap_bound,
    is_aligned,
    monte_carlo_risk,
    moral_hazard_counterexample,
    oracle_grid,
    run_verification,
    strict_gap_check,
)
from risk_sharing.piecewise import PiecewiseMonotoneFn

UNIFORM_FOUR = DiscreteAtoms.uniform_on([1, 2, 3, 4])


def make_problem(kernels, total=UNIFORM_FOUR, weights=None):
    weights = weights or [1.0] * len(kernels)
    return MarketProblem(agents=tuple(AgentSpec(k, w) for k, w in zip(kernels, weights)), total=total)


@pytest.fixture
def var_mean_problem():
    return make_problem([var_at(0.6), expectation_kernel()])


@pytest.fixture
def fast_config():
    return SolverConfig.from_simple_params(mc_samples=2000, fractional_samples=100, constancy_trials=20)


# ============================================================================
# MALLAS
# ============================================================================

def test_grid_aligns_with_discrete_atoms():
    assert oracle_grid(UNIFORM_FOUR) == (0.0, 1.0, 2.0, 3.0, 4.0)
    assert is_aligned(UNIFORM_FOUR, oracle_grid(UNIFORM_FOUR))
    assert oracle_grid(DiscreteAtoms.uniform_on([0, 1, 2])) == (0.0, 1.0, 2.0)
    assert oracle_grid(DiscreteAtoms.point_mass(0.0)) == (0.0, 1.0)
    assert not is_aligned(UNIFORM_FOUR, oracle_grid(UNIFORM_FOUR, cells=3))


def test_grid_on_continuous_totals():
    grid = oracle_grid(Exponential(1.0))
    assert len(grid) == 9
    assert grid[-1] == pytest.approx(-math.log(0.001))
    assert oracle_grid(UniformContinuous(0.0, 2.0), cells=4) == pytest.approx((0.0, 0.5, 1.0, 1.5, 2.0))
    assert not is_aligned(Exponential(1.0), grid)


def test_grid_limits():
    with pytest.raises(EnumerationLimitError):
        oracle_grid(DiscreteAtoms.uniform_on(range(1, 10)))
    with pytest.raises(SpecValidationError):
        oracle_grid(UNIFORM_FOUR, cells=9)
    with pytest.raises(PreconditionError):
        oracle_grid(DiscreteAtoms.uniform_on([-1, 1]))


# ============================================================================
# FUERZA BRUTA Y SONDEO FRACCIONAL
# ============================================================================

def test_brute_force_matches_closed_form(var_mean_problem):
    grid, value = brute_force_comonotone(var_mean_problem)
    assert value == pytest.approx(2.25)
    assert value == pytest.approx(optimal_value(var_mean_problem))
    # La celda [0,1) empata; gana la asignación con menos cambios de dueño
    assert grid.owners == (1, 1, 1, 0)
    assert grid.switches == 1


def test_brute_force_enumeration_limit(var_mean_problem):
    with pytest.raises(EnumerationLimitError):
        brute_force_comonotone(var_mean_problem, max_enumeration=10)


def test_aligned_brute_force_equals_closed_form():
    rng = np.random.default_rng(5)
    families = [var_at, cvar_at, lambda alpha: expectation_kernel()]
    for _ in range(40):
        n = int(rng.integers(1, 4))
        kernels = [families[int(rng.integers(3))](round(float(rng.uniform(0.05, 0.95)), 2)) for _ in range(n)]
        weights = [float(w) for w in rng.choice([0.5, 1.0, 1.5, 2.0], size=n)]
        atoms = rng.choice(10, size=int(rng.integers(1, 5)), replace=False)
        problem = make_problem(kernels, total=DiscreteAtoms.uniform_on(atoms.astype(float)), weights=weights)
        assert is_aligned(problem.total, oracle_grid(problem.total))
        _, value = brute_force_comonotone(problem)
        assert value == pytest.approx(optimal_value(problem), abs=1e-9)


def test_unaligned_grid_stays_within_gap_bound(var_mean_problem, caplog):
    boundaries = oracle_grid(UNIFORM_FOUR, cells=3)
    with caplog.at_level(logging.WARNING, logger="risk_sharing.oracles"):
        _, value = brute_force_comonotone(var_mean_problem, cells=3)
    assert "no alineada" in caplog.text
    best = optimal_value(var_mean_problem)
    bound = fubini_gap_bound(var_mean_problem, boundaries)
    assert best - 1e-9 <= value <= best + bound + 1e-9


def test_gap_bound_vanishes_on_aligned_grid(var_mean_problem):
    assert fubini_gap_bound(var_mean_problem, oracle_grid(UNIFORM_FOUR)) == pytest.approx(0.0, abs=1e-12)


def test_exponential_brute_force_is_an_upper_bound():
    problem = make_problem([var_at(0.7), expectation_kernel()], total=Exponential(1.0))
    _, value = brute_force_comonotone(problem, cells=4)
    assert value >= optimal_value(problem) - 1e-9


def test_fractional_shares_never_beat_the_optimum(var_mean_problem):
    grid, value = fractional_probe(var_mean_problem, samples=200, seed=0)
    assert value >= 2.25 - 1e-9
    assert grid.owners is None
    with pytest.raises(SpecValidationError):
        fractional_probe(var_mean_problem, samples=0)


def test_fractional_shares_with_full_sample_budget(var_mean_problem):
    _, value = fractional_probe(var_mean_problem, samples=1000, seed=42)
    assert value >= 2.25 - 1e-9
    again = fractional_probe(var_mean_problem, samples=1000, seed=42)
    assert again[1] == value


# ============================================================================
# RIESGO MORAL
# ============================================================================

def test_moral_hazard_on_exponential():
    report = moral_hazard_counterexample(0.7, 0.8, Exponential(1.0))
    assert report.threshold == pytest.approx(-math.log(0.3))
    assert report.value == pytest.approx(math.log(2.0))
    assert report.comonotone_value == pytest.approx(-math.log(0.3))
    assert report.gap == pytest.approx(-math.log(0.3) - math.log(2.0))
    assert report.gap_constant == pytest.approx((-math.log(0.3) - math.log(2.0)) / 2.0)
    assert report.agent1_positive_probability == pytest.approx(0.3)
    assert report.passed
    assert report.cdf_identity_gap() == pytest.approx(0.0, abs=1e-12)
    assert report.discretized_check() == pytest.approx(math.log(2.0), abs=1e-3)

    payload = report.to_dict()
    assert payload["non_comonotone_value"] == report.value
    assert payload["pass"] is True


def test_moral_hazard_on_uniform():
    report = moral_hazard_counterexample(0.7, 0.8, UniformContinuous(0.0, 1.0))
    assert report.value == pytest.approx(0.5)
    assert report.comonotone_value == pytest.approx(0.7)
    assert report.gap == pytest.approx(0.2)


@pytest.mark.parametrize("alpha, beta, total", [
    (0.3, 0.6, Exponential(1.0)),
    (0.8, 0.7, Exponential(1.0)),
    (0.7, 0.8, UNIFORM_FOUR),
])
def test_moral_hazard_preconditions(alpha, beta, total):
    with pytest.raises(PreconditionError):
        moral_hazard_counterexample(alpha, beta, total)


def test_strict_gap_over_comonotone_candidates():
    identity = PiecewiseMonotoneFn.identity()
    report = strict_gap_check(
        0.7, 0.8, Exponential(1.0), [identity, PiecewiseMonotoneFn.zero(), identity.scaled(0.5)]
    )
    assert report.left_sides == pytest.approx((1.20397, 1.60944, 1.40670), abs=1e-4)
    assert report.constant + report.reference == pytest.approx(0.9486, abs=1e-4)
    assert report.passed


def test_strict_gap_rejects_invalid_candidates():
    with pytest.raises(AllocationValidationError) as info:
        strict_gap_check(0.7, 0.8, Exponential(1.0), [PiecewiseMonotoneFn.identity(), PiecewiseMonotoneFn.linear(2.0)])
    assert info.value.path == "candidates[1]"


# ============================================================================
# MONTE CARLO Y CONSTANCIA
# ============================================================================

def test_monte_carlo_estimate_is_within_error():
    estimate, error = monte_carlo_risk(Exponential(1.0), expectation_kernel(), 5000, seed=0)
    assert error > 0.0
    assert abs(estimate - 1.0) <= 4.0 * error
    again = monte_carlo_risk(Exponential(1.0), expectation_kernel(), 5000, seed=0)
    assert again == (estimate, error)
    with pytest.raises(PreconditionError):
        monte_carlo_risk(Exponential(1.0), expectation_kernel(), 50, seed=0)


def test_identical_kernels_keep_aggregate_risk_constant():
    report = constancy_check(cvar_at(0.5), UNIFORM_FOUR, n_agents=3, trials=20, seed=1)
    assert report.reference == pytest.approx(3.5)
    assert len(report.values) == 20
    assert report.passed
    with pytest.raises(SpecValidationError):
        constancy_check(cvar_at(0.5), UNIFORM_FOUR, trials=0)


def test_constancy_over_a_hundred_allocations():
    report = constancy_check(cvar_at(0.5), UNIFORM_FOUR, n_agents=2, trials=100, seed=0)
    assert len(report.values) == 100
    assert report.values == pytest.approx([3.5] * 100, abs=1e-9)
    assert report.max_gap <= 1e-9
    assert report.passed


# ============================================================================
# VERIFICACIÓN COMPLETA
# ============================================================================

def test_run_verification_passes(var_mean_problem, fast_config):
    checks = run_verification(var_mean_problem, fast_config)
    assert [c.name for c in checks] == ["brute_force", "fractional_probe", "monte_carlo"]
    assert all(c.passed for c in checks)


def test_run_verification_adds_constancy_for_identical_kernels(fast_config):
    problem = make_problem([cvar_at(0.5), cvar_at(0.5)])
    checks = {c.name: c for c in run_verification(problem, fast_config)}
    assert "identical_kernel_constancy" in checks
    assert checks["identical_kernel_constancy"].passed
    assert checks["identical_kernel_constancy"].oracle == pytest.approx(3.5)


def test_corrupted_claim_fails(var_mean_problem, fast_config):
    checks = {c.name: c for c in run_verification(var_mean_problem, fast_config, corrupt_value=0.5)}
    assert not checks["brute_force"].passed
    assert checks["brute_force"].to_dict()["pass"] is False
