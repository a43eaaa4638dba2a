"""
Oráculos de verificación independientes.

- Fuerza bruta sobre asignaciones co-monótonas discretizadas, evaluadas con
  Σλᵢρᵢ(fᵢ(X₀)) por pushforward (no con la forma de Fubini).
- Sondeo con marginales fraccionales.
- Contraejemplo de riesgo moral para (VaR_α, VaR_β) y brecha estricta.
- Monte Carlo con error estándar bootstrap.
- Constancia del riesgo sistémico con núcleos idénticos.
"""

import logging
from dataclasses import dataclass, field
from itertools import product
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .allocation import (
    agent_risks,
    evaluate_allocation,
    optimal_allocation,
    optimal_value,
    psi_curve,
    weight_curves,
)
from .config import OracleConfig, SolverConfig
from .constants import (
    BOOTSTRAP_RESAMPLES,
    DEFAULT_TOLERANCE,
    MAX_BRUTE_FORCE_CELLS,
    MAX_ENUMERATION,
    MORAL_HAZARD_GRID,
    UNBOUNDED_GRID_LEVEL,
)
from .distortion import (
    DistortionKernel,
    integrate_composed,
    risk_quantile_form,
    value_at_risk,
    var_at,
)
from .distributions import DiscreteAtoms, LossDistribution, _ContinuousLaw
from .errors import (
    AllocationValidationError,
    EnumerationLimitError,
    PreconditionError,
    SpecValidationError,
)
from .models import AgentSpec, GridAssignment, MarketProblem, PropertyCheck
from .piecewise import PiecewiseMonotoneFn

logger = logging.getLogger(__name__)


# ============================================================================
# MALLAS
# ============================================================================

def oracle_grid(total: LossDistribution, cells: Optional[int] = None) -> Tuple[float, ...]:
    """
    Fronteras de celdas en el espacio de pérdidas.

    Sin `cells` y con total discreto, las celdas se alinean con los átomos
    positivos. Con `cells`, malla uniforme hasta el supremo esencial (o el
    quantil UNBOUNDED_GRID_LEVEL si la ley no está acotada).
    """
    if not total.is_nonnegative:
        raise PreconditionError("los oráculos co-monótonos requieren un total no negativo")

    if cells is None:
        if not isinstance(total, DiscreteAtoms):
            cells = MAX_BRUTE_FORCE_CELLS
        else:
            positive = [float(v) for v in total.atoms() if v > 0.0]
            if not positive:
                return (0.0, 1.0)
            if len(positive) > MAX_BRUTE_FORCE_CELLS:
                raise EnumerationLimitError(
                    f"el total tiene {len(positive)} átomos positivos; use --cells <= {MAX_BRUTE_FORCE_CELLS}"
                )
            return tuple([0.0] + positive)

    if not 1 <= cells <= MAX_BRUTE_FORCE_CELLS:
        raise SpecValidationError(f"cells debe estar entre 1 y {MAX_BRUTE_FORCE_CELLS}", path="cells")
    top = total.upper if total.is_bounded else total.quantile(UNBOUNDED_GRID_LEVEL)
    if top <= 0.0:
        top = 1.0
    return tuple(float(b) for b in np.linspace(0.0, top, cells + 1))


def is_aligned(total: LossDistribution, boundaries: Sequence[float]) -> bool:
    """Todos los átomos positivos de un total discreto son fronteras de celda."""
    if not isinstance(total, DiscreteAtoms):
        return False
    edges = set(float(b) for b in boundaries)
    return all(float(v) in edges for v in total.atoms() if v > 0.0)


# ============================================================================
# FUERZA BRUTA
# ============================================================================

def brute_force_comonotone(
    problem: MarketProblem,
    cells: Optional[int] = None,
    max_enumeration: int = MAX_ENUMERATION,
    tol: float = DEFAULT_TOLERANCE,
) -> Tuple[GridAssignment, float]:
    """
    Enumera las n^k asignaciones enteras de celdas a agentes.

    Desempate: valor, luego número de cambios de dueño, luego orden
    lexicográfico de la asignación.

    Raises:
        EnumerationLimitError: si n^k supera `max_enumeration`
    """
    boundaries = oracle_grid(problem.total, cells)
    k, n = len(boundaries) - 1, problem.n
    if n ** k > max_enumeration:
        raise EnumerationLimitError(
            f"{n}^{k} = {n ** k} asignaciones superan el límite {max_enumeration}; reduzca --cells"
        )
    if not is_aligned(problem.total, boundaries):
        logger.warning("Malla no alineada con los quantiles del total: el oráculo da una cota superior")

    scored: List[Tuple[float, GridAssignment]] = []
    for owners in product(range(n), repeat=k):
        grid = GridAssignment.from_owners(boundaries, owners, n)
        scored.append((evaluate_allocation(problem, grid.to_allocation(), tol), grid))

    best_value = min(v for v, _ in scored)
    band = tol * max(1.0, abs(best_value))
    ties = [(v, g) for v, g in scored if v - best_value <= band]
    value, best = min(ties, key=lambda item: (item[1].switches, item[1].owners))
    logger.info(f"Fuerza bruta: {len(scored)} asignaciones, mejor valor {value!r}")
    return best, value


def fubini_gap_bound(problem: MarketProblem, boundaries: Sequence[float]) -> float:
    """
    Cota de la brecha entre la mejor asignación por celdas y el óptimo.

    Con dueño único por celda el objetivo es Σ_j ∫_celda λ_{k_j}(1−Φ_{k_j}(F)),
    y el óptimo ∫Ψ(F). La asignación que elige en cada celda el agente de
    menor integral acota la brecha; la última celda se extiende a la cola.
    """
    curves = weight_curves(problem.agents)
    psi = psi_curve(problem.agents)
    total = problem.total
    edges = list(boundaries[:-1]) + [float("inf")]
    bound = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        floor = integrate_composed(total, psi, a, b)
        bound += min(integrate_composed(total, w, a, b) for w in curves) - floor
    return float(max(bound, 0.0))


def fractional_probe(
    problem: MarketProblem,
    cells: Optional[int] = None,
    samples: int = 1000,
    seed: int = 0,
    tol: float = DEFAULT_TOLERANCE,
) -> Tuple[GridAssignment, float]:
    """Mínimo sobre marginales fraccionales Dirichlet por celda."""
    if samples < 1:
        raise SpecValidationError("samples debe ser >= 1", path="samples")
    boundaries = oracle_grid(problem.total, cells)
    k, n = len(boundaries) - 1, problem.n
    rng = np.random.default_rng(np.random.SeedSequence(seed))

    best: Optional[Tuple[float, GridAssignment]] = None
    for _ in range(samples):
        shares = rng.dirichlet(np.ones(n), size=k)
        # Normalización exacta por fila
        shares = shares / shares.sum(axis=1, keepdims=True)
        grid = GridAssignment(
            boundaries=boundaries,
            shares=tuple(tuple(float(h) for h in row) for row in shares),
            tail_shares=tuple(float(h) for h in shares[-1]),
        )
        value = evaluate_allocation(problem, grid.to_allocation(), tol)
        if best is None or value < best[0]:
            best = (value, grid)
    logger.debug(f"Sondeo fraccional: {samples} muestras, mínimo {best[0]!r}")
    return best[1], best[0]


# ============================================================================
# CONTRAEJEMPLO DE RIESGO MORAL
# ============================================================================

def _check_moral_hazard_preconditions(alpha: float, beta: float, total: LossDistribution) -> None:
    if not 0.0 < alpha < beta < 1.0:
        raise PreconditionError(f"se requiere 0 < α < β < 1, recibido: α={alpha}, β={beta}")
    if not alpha + beta > 1.0:
        raise PreconditionError(f"se requiere α + β > 1, recibido: {alpha + beta!r}")
    if not isinstance(total, _ContinuousLaw):
        raise PreconditionError("el contraejemplo requiere un total continuo (exponencial o uniforme)")
    if not total.is_nonnegative:
        raise PreconditionError("el contraejemplo requiere un total no negativo")


@dataclass(frozen=True)
class MoralHazardReport:
    """Par X₁ = X₀·1{X₀ > VaR_α}, X₂ = X₀ − X₁ frente al óptimo co-monótono."""

    alpha: float
    beta: float
    threshold: float  # VaR_α(X₀)
    value: float  # VaR_α(X₁) + VaR_β(X₂) = VaR_{α+β−1}(X₀)
    comonotone_value: float
    gap_constant: float  # c = (VaR_α − VaR_{α+β−1})/2
    agent1_positive_probability: float  # P(X₁ > 0) = 1 − α
    total: LossDistribution = field(repr=False)

    @property
    def gap(self) -> float:
        return self.comonotone_value - self.value

    @property
    def passed(self) -> bool:
        return self.value + self.gap_constant <= self.comonotone_value + DEFAULT_TOLERANCE

    @property
    def allocation(self) -> Tuple[str, str]:
        q = repr(self.threshold)
        return (f"X1 = X0 * 1{{X0 > {q}}}", f"X2 = X0 * 1{{X0 <= {q}}}")

    def x2_cdf(self, x: float) -> float:
        """F_{X₂}(x) = P(X₀ > VaR_α) + P(X₀ <= min(x, VaR_α)) para x >= 0."""
        if x < 0.0:
            return 0.0
        if x >= self.threshold:
            return 1.0
        return float(self.total.survival(self.threshold) + self.total.cdf(x))

    def cdf_identity_gap(self, points: int = 64) -> float:
        """max |F_{X₂}(x) − (1 + F_{X₀}(x) − α)| en [ínfimo, VaR_α)."""
        xs = np.linspace(self.total.lower, self.threshold, points, endpoint=False)
        return float(max(
            abs(self.x2_cdf(x) - (1.0 + self.total.cdf(x) - self.alpha)) for x in xs
        ))

    def discretized_check(self, grid: int = MORAL_HAZARD_GRID) -> float:
        """VaR_α(X₁) + VaR_β(X₂) sobre una malla equiprobable de X₀."""
        levels = (np.arange(grid) + 0.5) / grid
        x0 = np.asarray(self.total.quantiles(levels), dtype=float)
        x1 = np.where(x0 > self.threshold, x0, 0.0)
        x2 = x0 - x1
        probs = np.full(grid, 1.0 / grid)
        first = DiscreteAtoms.from_pairs(x1, probs)
        second = DiscreteAtoms.from_pairs(x2, probs)
        return value_at_risk(first, self.alpha) + value_at_risk(second, self.beta)

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "allocation": list(self.allocation),
            "threshold": self.threshold,
            "comonotone_value": self.comonotone_value,
            "non_comonotone_value": self.value,
            "gap": self.gap,
            "gap_constant": self.gap_constant,
            "agent1_positive_probability": self.agent1_positive_probability,
            "pass": self.passed,
        }


def moral_hazard_counterexample(alpha: float, beta: float, total: LossDistribution) -> MoralHazardReport:
    """
    (VaR_α, VaR_β) con λ iguales: el par no co-monótono baja el riesgo a VaR_{α+β−1}.

    Raises:
        PreconditionError: α+β <= 1, α >= β, o total no continuo
    """
    _check_moral_hazard_preconditions(alpha, beta, total)
    threshold = total.quantile(alpha)
    problem = MarketProblem(
        agents=(AgentSpec(var_at(alpha)), AgentSpec(var_at(beta))), total=total
    )
    comonotone = optimal_value(problem)
    value = total.quantile(alpha + beta - 1.0)
    report = MoralHazardReport(
        alpha=alpha,
        beta=beta,
        threshold=threshold,
        value=value,
        comonotone_value=comonotone,
        gap_constant=(threshold - value) / 2.0,
        agent1_positive_probability=float(total.survival(threshold)),
        total=total,
    )
    logger.info(f"Riesgo moral: co-monótono {comonotone!r}, no co-monótono {value!r}, brecha {report.gap!r}")
    return report


@dataclass(frozen=True)
class StrictGapReport:
    constant: float
    reference: float  # VaR_{α+β−1}(X₀)
    left_sides: Tuple[float, ...]

    @property
    def passed(self) -> bool:
        return all(lhs > self.constant + self.reference for lhs in self.left_sides)


def strict_gap_check(
    alpha: float,
    beta: float,
    total: LossDistribution,
    candidates: Sequence[PiecewiseMonotoneFn],
) -> StrictGapReport:
    """VaR_α(f(X₀)) + VaR_β(X₀ − f(X₀)) > c + VaR_{α+β−1}(X₀) para cada f candidata."""
    _check_moral_hazard_preconditions(alpha, beta, total)
    reference = total.quantile(alpha + beta - 1.0)
    constant = (total.quantile(alpha) - reference) / 2.0

    left_sides = []
    for i, f in enumerate(candidates):
        if not f.is_allocation_component():
            raise AllocationValidationError(
                "f debe cumplir f(0)=0, ser no decreciente y 1-Lipschitz", path=f"candidates[{i}]"
            )
        try:
            rest = f.complement()
        except SpecValidationError as e:
            raise AllocationValidationError(e.detail, path=f"candidates[{i}]") from e
        lhs = value_at_risk(total.pushforward(f), alpha) + value_at_risk(total.pushforward(rest), beta)
        left_sides.append(float(lhs))
    return StrictGapReport(constant=constant, reference=reference, left_sides=tuple(left_sides))


# ============================================================================
# MONTE CARLO
# ============================================================================

def monte_carlo_risk(
    dist: LossDistribution,
    kernel: DistortionKernel,
    n: int,
    seed: int,
    resamples: int = BOOTSTRAP_RESAMPLES,
) -> Tuple[float, float]:
    """
    Estimación de ρ_Φ(X) con la ley empírica de n muestras.

    El error estándar sale de `resamples` remuestreos bootstrap del
    estimador Σ x_(k)(Φ(k/n) − Φ((k−1)/n)).
    """
    if n < 100:
        raise PreconditionError(f"monte_carlo_risk requiere n >= 100, recibido: {n}")
    sample_seq, bootstrap_seq = np.random.SeedSequence(seed).spawn(2)
    empirical = dist.sample(n, sample_seq)
    estimate = risk_quantile_form(empirical, kernel)

    grid = np.arange(n + 1) / n
    weights = np.diff(kernel(grid))
    observations = np.asarray(empirical.observations)
    rng = np.random.default_rng(bootstrap_seq)
    replicates = np.empty(resamples)
    for b in range(resamples):
        resampled = np.sort(observations[rng.integers(0, n, size=n)])
        replicates[b] = weights @ resampled
    error = float(np.std(replicates, ddof=1))
    logger.debug(f"Monte Carlo ({n} muestras): {estimate!r} ± {error!r}")
    return float(estimate), error


# ============================================================================
# CONSTANCIA CON NÚCLEOS IDÉNTICOS
# ============================================================================

@dataclass(frozen=True)
class ConstancyReport:
    """Σᵢρ(fᵢ(X₀)) frente a ρ(X₀) sobre asignaciones aleatorias."""
    reference: float
    values: Tuple[float, ...]
    tolerance: float

    @property
    def max_gap(self) -> float:
        if not self.values:
            return 0.0
        return float(max(abs(v - self.reference) for v in self.values))

    @property
    def passed(self) -> bool:
        return self.max_gap <= self.tolerance * max(1.0, abs(self.reference))


def constancy_check(
    kernel: DistortionKernel,
    total: LossDistribution,
    n_agents: int = 2,
    trials: int = 100,
    seed: int = 0,
    cells: Optional[int] = None,
    tol: float = DEFAULT_TOLERANCE,
) -> ConstancyReport:
    """Con un mismo núcleo, toda asignación co-monótona deja constante el riesgo agregado."""
    if trials < 1:
        raise SpecValidationError("trials debe ser >= 1", path="trials")
    problem = MarketProblem(agents=tuple(AgentSpec(kernel) for _ in range(n_agents)), total=total)
    reference = risk_quantile_form(total, kernel)
    boundaries = oracle_grid(total, cells)
    rng = np.random.default_rng(np.random.SeedSequence(seed))

    values = []
    for _ in range(trials):
        shares = rng.random((len(boundaries) - 1, n_agents))
        shares = shares / shares.sum(axis=1, keepdims=True)
        grid = GridAssignment(
            boundaries=boundaries,
            shares=tuple(tuple(float(h) for h in row) for row in shares),
            tail_shares=tuple(float(h) for h in shares[-1]),
        )
        values.append(evaluate_allocation(problem, grid.to_allocation(), tol))
    return ConstancyReport(reference=reference, values=tuple(values), tolerance=tol)


# ============================================================================
# VERIFICACIÓN COMPLETA
# ============================================================================

def _within(claimed: float, oracle: float, tol: float) -> bool:
    return abs(claimed - oracle) <= tol * max(1.0, abs(claimed), abs(oracle))


def run_verification(
    problem: MarketProblem,
    config: Optional[SolverConfig] = None,
    corrupt_value: float = 0.0,
) -> List[PropertyCheck]:
    """
    Contrasta el valor cerrado con todos los oráculos aplicables.

    `corrupt_value` desplaza el valor reclamado para ejercitar la ruta de fallo.
    """
    config = config or SolverConfig()
    oracle: OracleConfig = config.oracle
    tol = config.tolerance.tol
    seed = config.run.seed

    claimed = optimal_value(problem) + corrupt_value
    checks: List[PropertyCheck] = []

    # Fuerza bruta
    boundaries = oracle_grid(problem.total, oracle.cells)
    _, brute = brute_force_comonotone(problem, oracle.cells, oracle.max_enumeration, tol)
    if is_aligned(problem.total, boundaries):
        passed = _within(claimed, brute, tol)
        checks.append(PropertyCheck(
            "brute_force", claimed, brute, abs(brute - claimed), 0.0, passed, "malla alineada: igualdad exacta"
        ))
    else:
        bound = fubini_gap_bound(problem, boundaries)
        gap = brute - claimed
        slack = tol * max(1.0, abs(claimed))
        passed = -slack <= gap <= bound + slack
        checks.append(PropertyCheck(
            "brute_force", claimed, brute, gap, bound, passed, "malla no alineada: 0 <= brecha <= cota"
        ))

    # Marginales fraccionales
    _, fractional = fractional_probe(problem, oracle.cells, oracle.fractional_samples, seed, tol)
    slack = tol * max(1.0, abs(claimed))
    checks.append(PropertyCheck(
        "fractional_probe", claimed, fractional, fractional - claimed, 0.0,
        fractional >= claimed - slack, f"{oracle.fractional_samples} muestras",
    ))

    # Monte Carlo por agente sobre la asignación óptima
    allocation = optimal_allocation(problem)
    exact_risks = agent_risks(problem, allocation)
    estimate, variance = 0.0, 0.0
    for i, (agent, f) in enumerate(zip(problem.agents, allocation.components)):
        est, err = monte_carlo_risk(
            problem.total.pushforward(f), agent.kernel, oracle.mc_samples, seed + i, oracle.bootstrap_resamples
        )
        estimate += agent.weight * est
        variance += (agent.weight * err) ** 2
    error = float(np.sqrt(variance))
    exact = float(sum(a.weight * r for a, r in zip(problem.agents, exact_risks)))
    mc_bound = 4.0 * error + tol * max(1.0, abs(exact))
    checks.append(PropertyCheck(
        "monte_carlo", exact, estimate, abs(estimate - exact), mc_bound,
        abs(estimate - exact) <= mc_bound, f"{oracle.mc_samples} muestras, error estándar {error!r}",
    ))

    # Constancia con núcleos idénticos
    kernels = problem.kernels
    weights = problem.weights
    if problem.n > 1 and all(k.is_close(kernels[0]) for k in kernels) and np.all(weights == weights[0]):
        report = constancy_check(
            kernels[0], problem.total, problem.n, oracle.constancy_trials, seed, oracle.cells, tol
        )
        reference = float(weights[0]) * report.reference
        checks.append(PropertyCheck(
            "identical_kernel_constancy", claimed, reference, abs(claimed - reference), report.max_gap,
            report.passed and _within(claimed, reference, tol), f"{oracle.constancy_trials} asignaciones aleatorias",
        ))

    failed = [c.name for c in checks if not c.passed]
    if failed:
        logger.warning(f"Verificación fallida: {', '.join(failed)}")
    else:
        logger.info(f"Verificación superada ({len(checks)} propiedades)")
    return checks


__all__ = [
    "oracle_grid",
    "is_aligned",
    "brute_force_comonotone",
    "fubini_gap_bound",
    "fractional_probe",
    "MoralHazardReport",
    "moral_hazard_counterexample",
    "StrictGapReport",
    "strict_gap_check",
    "monte_carlo_risk",
    "ConstancyReport",
    "constancy_check",
    "run_verification",
]
