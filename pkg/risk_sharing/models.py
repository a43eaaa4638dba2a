"""
Modelos de datos del reparto de riesgos.
Contiene enums y dataclasses que definen las estructuras fundamentales.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .distortion import DistortionKernel, check_domain
from .distributions import LossDistribution
from .errors import AllocationValidationError, PreconditionError, SpecValidationError
from .piecewise import PiecewiseMonotoneFn


class BoundednessStatus(Enum):
    """Veredicto sobre el problema sin restricción de co-monotonía."""
    BOUNDED = "BOUNDED (proved)"  # Agente único o intersección de conjuntos duales no vacía
    UNBOUNDED = "UNBOUNDED (certificate)"  # Rayo de suma cero verificado
    UNKNOWN = "UNKNOWN (no certificate found)"  # Heurísticas agotadas, no es prueba


class CertificateKind(Enum):
    """Origen de un certificado de no acotación."""
    CASH_TRANSFER = "cash_transfer"  # Transferencia de efectivo con λ distintos
    VAR_MEAN = "var_mean"  # Rayo c·1_A para (VaR_α, esperanza)
    RANDOMIZED = "randomized"  # Hallado por búsqueda aleatoria


# ============================================================================
# PROBLEMA
# ============================================================================

@dataclass(frozen=True)
class AgentSpec:
    """Perfil de preferencias (Φᵢ, λᵢ)."""
    kernel: DistortionKernel
    weight: float = 1.0  # λᵢ > 0

    def __post_init__(self):
        if not (self.weight > 0 and np.isfinite(self.weight)):
            raise SpecValidationError(f"lambda debe ser > 0, recibido: {self.weight}", path="lambda")
        object.__setattr__(self, "weight", float(self.weight))


@dataclass(frozen=True)
class MarketProblem:
    """
    Agentes y riesgo total X₀ >= 0.

    Cada núcleo debe ser regular para X₀: ρᵢ(X₀∧m) → ρᵢ(X₀) cuando m → ∞.
    """
    agents: Tuple[AgentSpec, ...]
    total: LossDistribution

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        if not self.agents:
            raise SpecValidationError("se requiere al menos un agente", path="agents")
        if not self.total.is_nonnegative:
            raise PreconditionError(
                f"el riesgo total debe ser no negativo (ínfimo del soporte: {self.total.lower})"
            )
        for agent in self.agents:
            check_domain(self.total, agent.kernel)

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def kernels(self) -> List[DistortionKernel]:
        return [a.kernel for a in self.agents]

    @property
    def weights(self) -> np.ndarray:
        return np.array([a.weight for a in self.agents])

    def with_total(self, total: LossDistribution) -> "MarketProblem":
        return MarketProblem(agents=self.agents, total=total)

    def with_weights(self, weights: Sequence[float]) -> "MarketProblem":
        agents = tuple(AgentSpec(a.kernel, w) for a, w in zip(self.agents, weights))
        return MarketProblem(agents=agents, total=self.total)


# ============================================================================
# SELECTOR Y ASIGNACIONES
# ============================================================================

@dataclass(frozen=True)
class LevelSelector:
    """
    Selector bang-bang k* sobre [0,1].

    El tramo j es [breakpoints[j], breakpoints[j+1]) y lo gana winners[j];
    en t=1 gana el ganador del último tramo.
    """
    breakpoints: Tuple[float, ...]  # 0 = b₀ < ... < b_K = 1
    winners: Tuple[int, ...]  # Índice de agente por tramo (base 0)
    tie_regions: Tuple[Tuple[float, float], ...] = ()  # Tramos con empate en el mínimo

    def __post_init__(self):
        if len(self.winners) != len(self.breakpoints) - 1:
            raise SpecValidationError("un ganador por tramo")

    def winner(self, t: float) -> int:
        if t >= 1.0:
            return self.winners[-1]
        j = int(np.searchsorted(self.breakpoints, t, side="right")) - 1
        return self.winners[min(max(j, 0), len(self.winners) - 1)]

    def indicator(self, agent: int, t: float) -> int:
        """kᵢ*(t) ∈ {0,1}."""
        return int(self.winner(t) == agent)

    def pieces(self) -> List[Tuple[float, float, int]]:
        return [
            (self.breakpoints[j], self.breakpoints[j + 1], w)
            for j, w in enumerate(self.winners)
        ]

    def with_winners(self, winners: Sequence[int]) -> "LevelSelector":
        return LevelSelector(self.breakpoints, tuple(winners), self.tie_regions)


@dataclass(frozen=True, eq=False)
class ComonotoneAllocation:
    """
    Asignación co-monótona (f₁,…,fₙ) con marginales escalonadas (h₁,…,hₙ).

    fᵢ(x) = ∫₀ˣ hᵢ(s) ds; la celda j es [boundaries[j], boundaries[j+1]) y la
    última celda se extiende a +∞ con `tail_shares`.
    """
    components: Tuple[PiecewiseMonotoneFn, ...]
    boundaries: Tuple[float, ...]  # 0 = s₀ < s₁ < ... (en el espacio de pérdidas)
    shares: Tuple[Tuple[float, ...], ...]  # shares[j][i] = hᵢ en la celda j
    tail_shares: Tuple[float, ...]  # hᵢ en [boundaries[-1], ∞)

    @property
    def n(self) -> int:
        return len(self.components)

    @classmethod
    def from_marginals(
        cls,
        boundaries: Sequence[float],
        shares: Sequence[Sequence[float]],
        tail_shares: Sequence[float],
        tol: float = 1e-9,
    ) -> "ComonotoneAllocation":
        """Integra marginales escalonadas; valida 0 <= h <= 1 y Σh = 1."""
        boundaries = tuple(float(b) for b in boundaries)
        shares_arr = np.asarray(shares, dtype=float).reshape(len(boundaries) - 1, -1) if len(boundaries) > 1 \
            else np.zeros((0, len(tail_shares)))
        tail = np.asarray(tail_shares, dtype=float)
        n = len(tail)

        if not boundaries or boundaries[0] != 0.0:
            raise AllocationValidationError("las celdas deben empezar en 0", path="boundaries")
        if any(b <= a for a, b in zip(boundaries, boundaries[1:])):
            raise AllocationValidationError("las celdas deben ser estrictamente crecientes", path="boundaries")
        all_shares = np.vstack([shares_arr, tail[None, :]])
        if np.any(all_shares < -tol) or np.any(all_shares > 1 + tol):
            raise AllocationValidationError("las marginales deben estar en [0,1]", path="shares")
        if np.any(np.abs(all_shares.sum(axis=1) - 1.0) > tol):
            raise AllocationValidationError("las marginales deben sumar 1 en cada celda", path="shares")

        widths = np.diff(boundaries)
        components = []
        for i in range(n):
            ys = np.concatenate(([0.0], np.cumsum(shares_arr[:, i] * widths)))
            head = shares_arr[0, i] if len(shares_arr) else tail[i]
            components.append(
                PiecewiseMonotoneFn(
                    xs=boundaries,
                    ys=ys,
                    tail_slope=max(0.0, tail[i]),
                    head_slope=max(0.0, head),
                ).simplified()
            )
        return cls(
            components=tuple(components),
            boundaries=boundaries,
            shares=tuple(tuple(row) for row in shares_arr),
            tail_shares=tuple(tail),
        )

    @classmethod
    def from_components(
        cls, components: Sequence[PiecewiseMonotoneFn], tol: float = 1e-9
    ) -> "ComonotoneAllocation":
        """Deriva las marginales de las pendientes y valida Σfᵢ = id."""
        components = tuple(components)
        if not components:
            raise AllocationValidationError("la asignación no tiene componentes", path="components")
        knots = sorted({0.0} | {x for f in components for x in f.xs if x > 0})
        boundaries = tuple(knots)
        shares = []
        for a, b in zip(boundaries[:-1], boundaries[1:]):
            mid = (a + b) / 2.0
            shares.append(tuple(f.slope_right_of(mid) for f in components))
        tail = tuple(f.slope_right_of(boundaries[-1]) for f in components)
        allocation = cls(components=components, boundaries=boundaries, shares=tuple(shares), tail_shares=tail)
        allocation.validate(tol)
        return allocation

    def marginal(self, agent: int, x: float) -> float:
        """hᵢ(x), continua por la derecha."""
        if x >= self.boundaries[-1] or not self.shares:
            return self.tail_shares[agent]
        j = int(np.searchsorted(self.boundaries, x, side="right")) - 1
        return self.shares[max(j, 0)][agent]

    def values(self, x) -> np.ndarray:
        """Matriz n × len(x) con fᵢ(x)."""
        return np.vstack([f(np.atleast_1d(x)) for f in self.components])

    def validate(self, tol: float = 1e-9) -> None:
        """Σfᵢ = id, fᵢ(0) = 0, cada fᵢ no decreciente y 1-Lipschitz en [0, ∞)."""
        for i, f in enumerate(self.components):
            if not f.is_allocation_component(tol):
                raise AllocationValidationError(
                    "componente no admisible (f(0)=0, monótona, 1-Lipschitz)", path=f"components[{i}]"
                )
        grid = np.array(sorted({0.0} | {x for f in self.components for x in f.xs if x > 0}))
        points = np.concatenate((grid, [grid[-1] + 1.0]))
        gap = np.abs(self.values(points).sum(axis=0) - points)
        if np.any(gap > tol * np.maximum(1.0, np.abs(points))):
            raise AllocationValidationError(
                f"Σfᵢ difiere de la identidad en {float(gap.max())!r}", path="components"
            )
        if abs(sum(f.tail_slope for f in self.components) - 1.0) > tol:
            raise AllocationValidationError("las pendientes de cola no suman 1", path="components")

    @property
    def is_bang_bang(self) -> bool:
        rows = list(self.shares) + [self.tail_shares]
        return all(all(h in (0.0, 1.0) for h in row) for row in rows)


@dataclass(frozen=True)
class Layer:
    """Capa de reaseguro (attachment, exhaustion] asumida por un agente."""
    agent: int
    attachment: float
    exhaustion: float  # inf para la capa de cola
    share: float = 1.0


@dataclass(frozen=True)
class GridAssignment:
    """Asignación discretizada: celdas en el espacio de pérdidas con reparto por celda."""
    boundaries: Tuple[float, ...]  # 0 = s₀ < ... < s_k = cota superior de la malla
    shares: Tuple[Tuple[float, ...], ...]  # shares[j][i] ∈ [0,1], Σᵢ = 1
    tail_shares: Tuple[float, ...]  # reparto en [s_k, ∞)

    @classmethod
    def from_owners(cls, boundaries: Sequence[float], owners: Sequence[int], n: int) -> "GridAssignment":
        """Celdas enteras; la cola la hereda el dueño de la última celda."""
        rows = tuple(tuple(1.0 if i == o else 0.0 for i in range(n)) for o in owners)
        return cls(boundaries=tuple(float(b) for b in boundaries), shares=rows, tail_shares=rows[-1])

    @property
    def owners(self) -> Optional[Tuple[int, ...]]:
        """Dueño de cada celda, o None si el reparto es fraccional."""
        result = []
        for row in self.shares:
            if sorted(row)[-1] != 1.0:
                return None
            result.append(row.index(1.0))
        return tuple(result)

    @property
    def switches(self) -> int:
        """Cambios de dueño entre celdas consecutivas."""
        owners = self.owners
        if owners is None:
            return len(self.shares)
        return sum(1 for a, b in zip(owners, owners[1:]) if a != b)

    def to_allocation(self) -> ComonotoneAllocation:
        return ComonotoneAllocation.from_marginals(self.boundaries, self.shares, self.tail_shares)


# ============================================================================
# ESPACIOS FINITOS Y CERTIFICADOS
# ============================================================================

@dataclass(frozen=True, eq=False)
class UnboundednessCertificate:
    """
    Rayo base + c·dirección con objetivo afín en c y pendiente negativa.

    Los vectores son valores sobre los átomos del espacio finito.
    """
    kind: CertificateKind
    base: Tuple[np.ndarray, ...]  # X₁..Xₙ
    direction: Tuple[np.ndarray, ...]  # D₁..Dₙ con ΣDᵢ = 0
    slope: float
    verification: Dict[float, float] = field(default_factory=dict)  # c -> objetivo
    residual_agent: Optional[int] = None  # Agente que absorbe X₀ al rebasar
    note: str = ""

    def __post_init__(self):
        direction_sum = np.sum(np.vstack(self.direction), axis=0)
        if np.any(direction_sum != 0.0):
            raise SpecValidationError("la dirección de un certificado debe sumar exactamente 0")

    def rebased(self, total: np.ndarray) -> "UnboundednessCertificate":
        """Misma dirección con base reajustada para que Σ base = total."""
        agent = 0 if self.residual_agent is None else self.residual_agent
        base = [np.array(b, dtype=float) for b in self.base]
        current = np.sum(np.vstack(base), axis=0)
        base[agent] = base[agent] + (np.asarray(total, dtype=float) - current)
        return UnboundednessCertificate(
            kind=self.kind,
            base=tuple(base),
            direction=self.direction,
            slope=self.slope,
            residual_agent=self.residual_agent,
            note=self.note,
        )

    def point(self, c: float) -> List[np.ndarray]:
        return [b + c * d for b, d in zip(self.base, self.direction)]

    def to_dict(self) -> Dict[str, object]:
        return {
            "kind": self.kind.value,
            "base": [list(map(float, b)) for b in self.base],
            "direction": [list(map(float, d)) for d in self.direction],
            "slope": float(self.slope),
            "verification": {repr(float(c)): float(v) for c, v in sorted(self.verification.items())},
            "note": self.note,
        }


@dataclass(frozen=True, eq=False)
class FeasibilityReport:
    """Resultado de la factibilidad de ∩ λᵢΔᵢ."""
    feasible: bool
    point: Optional[np.ndarray] = None  # q común cuando es factible
    violated: Tuple[str, ...] = ()  # Restricciones con holgura positiva en el óptimo elástico
    slack: float = 0.0


@dataclass(frozen=True, eq=False)
class AttainabilityWitness:
    """Y con λᵢρᵢ(Xᵢ) = E[YXᵢ] para todo i."""
    density: np.ndarray  # Y como q/p por átomo
    measure: np.ndarray  # q = Y·p
    agent_values: Tuple[float, ...]


@dataclass(frozen=True, eq=False)
class BoundednessReport:
    status: BoundednessStatus
    support_value: Optional[float] = None
    feasibility: Optional[FeasibilityReport] = None
    certificate: Optional[UnboundednessCertificate] = None
    note: str = ""


# ============================================================================
# INFORMES
# ============================================================================

@dataclass(frozen=True)
class RegularityReport:
    """Brechas |ρ(X∧m) − ρ(X)| por nivel de truncamiento."""
    levels: Tuple[float, ...]
    gaps: Tuple[float, ...]
    tolerance: float
    passed: bool


@dataclass(frozen=True)
class PropertyCheck:
    """Una fila del informe de verificación."""
    name: str
    claimed: Optional[float]
    oracle: Optional[float]
    gap: Optional[float]
    bound: Optional[float]
    passed: bool
    detail: str = ""

    def to_dict(self) -> Dict[str, object]:
        return {
            "name": self.name,
            "claimed": self.claimed,
            "oracle": self.oracle,
            "gap": self.gap,
            "bound": self.bound,
            "pass": self.passed,
            "detail": self.detail,
        }
