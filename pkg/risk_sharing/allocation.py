"""
Reparto óptimo co-monótono en forma cerrada.

Para cada nivel t ∈ [0,1] gana el agente que minimiza λᵢ(1−Φᵢ(t)); la
unidad marginal de pérdida s se asigna entera al ganador del nivel F_{X₀}(s).
El valor óptimo es ∫₀^∞ Ψ(F_{X₀}(s)) ds con Ψ = minᵢ λᵢ(1−Φᵢ).

Todas las operaciones son exactas sobre los nodos de los núcleos y los
quantiles de X₀: no se usa cuadratura.
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .constants import DEFAULT_TOLERANCE, REGULARITY_TOLERANCE
from .distortion import (
    DistortionKernel,
    integrate_composed,
    max_kernel,
    risk_quantile_form,
)
from .distributions import LossDistribution
from .errors import DomainError, PreconditionError, SpecValidationError
from .models import (
    AgentSpec,
    ComonotoneAllocation,
    Layer,
    LevelSelector,
    MarketProblem,
    RegularityReport,
)
from .piecewise import LevelCurve, crossing_levels, envelope

logger = logging.getLogger(__name__)

# Empate relativo entre pesos λᵢ(1−Φᵢ) en el punto medio de un tramo
_TIE_TOLERANCE = 1e-12


# ============================================================================
# Ψ Y SELECTOR
# ============================================================================

def weight_curves(agents: Sequence[AgentSpec]) -> List[LevelCurve]:
    """λᵢ(1−Φᵢ) por agente."""
    return [a.kernel.affine(a.weight, -a.weight) for a in agents]


def psi_curve(agents: Sequence[AgentSpec]) -> LevelCurve:
    """Ψ = minᵢ λᵢ(1−Φᵢ) como curva exacta sobre [0,1]."""
    if not agents:
        raise SpecValidationError("se requiere al menos un agente", path="agents")
    return envelope(weight_curves(agents), kind="min")


def psi(agents: Sequence[AgentSpec], t: float) -> float:
    """Ψ(t) para t ∈ [0,1]."""
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"Ψ está definida en [0,1], recibido: {t}")
    return float(min(a.weight * (1.0 - a.kernel(t)) for a in agents))


def _tied_minimizers(values: np.ndarray) -> List[int]:
    scale = float(np.max(np.abs(values)))
    best = float(np.min(values))
    return [i for i, v in enumerate(values) if v - best <= _TIE_TOLERANCE * scale]


def optimal_selector(agents: Sequence[AgentSpec]) -> LevelSelector:
    """
    Selector bang-bang k*.

    Entre niveles consecutivos de `crossing_levels` el orden de las curvas es
    constante, así que el ganador del tramo se decide en su punto medio. En
    empates gana el menor índice y el tramo se informa en `tie_regions`.
    """
    if not agents:
        raise SpecValidationError("se requiere al menos un agente", path="agents")
    curves = weight_curves(agents)
    levels = crossing_levels(curves)

    breakpoints = [0.0]
    winners: List[int] = []
    ties: List[Tuple[float, float]] = []
    for a, b in zip(levels[:-1], levels[1:]):
        mid = (a + b) / 2.0
        tied = _tied_minimizers(np.array([c(mid) for c in curves]))
        winner = tied[0]

        if len(tied) > 1:
            if ties and ties[-1][1] == a:
                ties[-1] = (ties[-1][0], float(b))
            else:
                ties.append((float(a), float(b)))

        if winners and winners[-1] == winner:
            breakpoints[-1] = float(b)
        else:
            winners.append(winner)
            breakpoints.append(float(b))

    logger.debug(f"Selector: {len(winners)} tramos, {len(ties)} regiones de empate")
    return LevelSelector(breakpoints=tuple(breakpoints), winners=tuple(winners), tie_regions=tuple(ties))


# ============================================================================
# ASIGNACIÓN Y VALOR ÓPTIMOS
# ============================================================================

def allocation_from_selector(selector: LevelSelector, total: LossDistribution, n: int) -> ComonotoneAllocation:
    """
    hᵢ(s) = kᵢ*(F_{X₀}(s)).

    Para s ∈ [VaR_{b_j}, VaR_{b_{j+1}}) se tiene F(s) ∈ [b_j, b_{j+1}), de modo
    que cada celda en pérdidas hereda exactamente el ganador del tramo j.
    """
    cuts = [0.0] + [max(0.0, float(total.quantiles(b))) for b in selector.breakpoints[1:]]

    boundaries = [0.0]
    owners: List[int] = []
    for j, winner in enumerate(selector.winners):
        lo, hi = cuts[j], cuts[j + 1]
        if hi <= lo:
            continue
        if owners and owners[-1] == winner:
            boundaries[-1] = hi
        else:
            owners.append(winner)
            boundaries.append(hi)

    if not owners:
        owners, boundaries = [selector.winners[-1]], [0.0, float("inf")]

    # La cola [VaR_1, ∞) continúa al dueño de la última celda
    boundaries.pop()
    tail_owner = owners.pop()

    def one_hot(k: int) -> Tuple[float, ...]:
        return tuple(1.0 if i == k else 0.0 for i in range(n))

    return ComonotoneAllocation.from_marginals(
        boundaries=boundaries,
        shares=[one_hot(k) for k in owners],
        tail_shares=one_hot(tail_owner),
    )


def optimal_allocation(problem: MarketProblem, selector: Optional[LevelSelector] = None) -> ComonotoneAllocation:
    """fᵢ*(x) = ∫₀ˣ kᵢ*(F_{X₀}(s)) ds; marginales en {0,1}."""
    if not problem.total.is_nonnegative:
        raise PreconditionError("el riesgo total debe ser no negativo")
    if selector is None:
        selector = optimal_selector(problem.agents)
    allocation = allocation_from_selector(selector, problem.total, problem.n)
    logger.info(
        f"Asignación óptima: {len(allocation.boundaries)} celdas, "
        f"dueño de la cola: agente {allocation.tail_shares.index(1.0) + 1}"
    )
    return allocation


def optimal_value(problem: MarketProblem) -> float:
    """∫₀^∞ minᵢ λᵢ(1−Φᵢ(F_{X₀}(s))) ds, exacta."""
    return integrate_composed(problem.total, psi_curve(problem.agents), 0.0, float("inf"))


def agent_risks(problem: MarketProblem, allocation: ComonotoneAllocation) -> List[float]:
    """ρᵢ(fᵢ(X₀)) sin ponderar."""
    return [
        risk_quantile_form(problem.total.pushforward(f), agent.kernel)
        for f, agent in zip(allocation.components, problem.agents)
    ]


def evaluate_allocation(
    problem: MarketProblem, allocation: ComonotoneAllocation, tol: float = DEFAULT_TOLERANCE
) -> float:
    """Σᵢ λᵢ ρᵢ(fᵢ(X₀)) por pushforward y forma de quantiles."""
    if allocation.n != problem.n:
        raise SpecValidationError(
            f"la asignación tiene {allocation.n} componentes para {problem.n} agentes", path="components"
        )
    allocation.validate(tol)
    risks = agent_risks(problem, allocation)
    return float(sum(a.weight * r for a, r in zip(problem.agents, risks)))


def convolution_kernel(agents: Sequence[AgentSpec]) -> DistortionKernel:
    """Con λ iguales, ρ₁⊡…⊡ρₙ = ρ_Φ con Φ = max Φᵢ."""
    weights = np.array([a.weight for a in agents])
    if np.any(np.abs(weights - weights[0]) > 1e-12 * weights[0]):
        raise PreconditionError(
            "convolution_kernel requiere λ iguales; con pesos distintos use optimal_value"
        )
    return max_kernel(*[a.kernel for a in agents])


# ============================================================================
# REGULARIDAD
# ============================================================================

def regularity_check(
    kernel: DistortionKernel,
    total: LossDistribution,
    levels: Sequence[float],
    tol: float = REGULARITY_TOLERANCE,
) -> RegularityReport:
    """Brechas |ρ(X∧m) − ρ(X)|; pasa si la del mayor nivel es <= tol."""
    levels = tuple(float(m) for m in levels)
    if any(b < a for a, b in zip(levels, levels[1:])):
        raise SpecValidationError("los niveles de truncamiento deben ser ascendentes", path="trunc")

    try:
        full = risk_quantile_form(total, kernel)
    except DomainError as e:
        logger.warning(f"Regularidad: ρ(X) no es finita ({e})")
        return RegularityReport(levels, tuple(float("inf") for _ in levels), tol, False)

    gaps = []
    for m in levels:
        try:
            gaps.append(abs(risk_quantile_form(total.truncate(m), kernel) - full))
        except DomainError:
            gaps.append(float("inf"))
    passed = bool(gaps) and gaps[-1] <= tol
    return RegularityReport(levels=levels, gaps=tuple(gaps), tolerance=tol, passed=passed)


# ============================================================================
# VISTA POR CAPAS
# ============================================================================

def layer_table(allocation: ComonotoneAllocation) -> List[Layer]:
    """Capas (attachment, exhaustion] por agente; la última llega a +∞."""
    cells = list(zip(allocation.boundaries, list(allocation.boundaries[1:]) + [float("inf")]))
    rows = list(allocation.shares) + [allocation.tail_shares]
    layers: List[Layer] = []
    for (a, b), row in zip(cells, rows):
        for agent, share in enumerate(row):
            if share <= 0.0:
                continue
            previous = layers[-1] if layers else None
            if (
                previous is not None
                and previous.agent == agent
                and previous.share == share
                and previous.exhaustion == a
            ):
                layers[-1] = Layer(agent, previous.attachment, b, share)
            else:
                layers.append(Layer(agent, a, b, share))
    return layers


__all__ = [
    "weight_curves",
    "psi",
    "psi_curve",
    "optimal_selector",
    "allocation_from_selector",
    "optimal_allocation",
    "optimal_value",
    "agent_risks",
    "evaluate_allocation",
    "convolution_kernel",
    "regularity_check",
    "layer_table",
]
