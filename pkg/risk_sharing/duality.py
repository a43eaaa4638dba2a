"""
Dualidad sobre espacios de probabilidad finitos.

Para un núcleo convexo Φ (g cóncava) el conjunto dual es
    Δ = {q >= 0 : Σq = 1, Σ_{j∈A} q_j <= g(P(A)) para todo evento A},
y ρ_Φ(X) = max_{q∈Δ} E_q[X]. El problema sin co-monotonía está acotado si y
sólo si ∩ λᵢΔᵢ ≠ ∅; cuando no lo está se exhibe un rayo de suma cero.

Los programas lineales se resuelven con scipy.optimize.linprog (HiGHS).
"""

import logging
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog

from .constants import (
    CERTIFICATE_SCALES,
    CERTIFICATE_SLOPE_THRESHOLD,
    DEFAULT_TOLERANCE,
    FEASIBILITY_TOLERANCE,
    MAX_FINITE_SPACE_ATOMS,
    PROBABILITY_TOLERANCE,
)
from .distortion import (
    DistortionKernel,
    dual,
    expectation_kernel,
    is_convex,
    risk_quantile_form,
    value_at_risk,
    var_at,
)
from .distributions import DiscreteAtoms, LossDistribution
from .errors import (
    AllocationValidationError,
    InfeasibleIntersectionError,
    PreconditionError,
    SpecValidationError,
    VerificationFailure,
)
from .models import (
    AgentSpec,
    AttainabilityWitness,
    BoundednessReport,
    BoundednessStatus,
    CertificateKind,
    FeasibilityReport,
    UnboundednessCertificate,
)
from .protocols import AllocationObjective

logger = logging.getLogger(__name__)

# Candidatos por subflujo de la búsqueda aleatoria
_SEARCH_BATCH = 256

# Tolerancias de HiGHS por debajo de la de verificación
_LP_OPTIONS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


# ============================================================================
# ESPACIO FINITO
# ============================================================================

@dataclass(frozen=True)
class FiniteSpace:
    """Ω = {ω₁..ω_m} con probabilidades positivas, m <= 12."""

    probabilities: Tuple[float, ...]

    def __post_init__(self):
        probs = np.asarray(self.probabilities, dtype=float)
        object.__setattr__(self, "probabilities", tuple(float(p) for p in probs))
        if not 1 <= len(probs) <= MAX_FINITE_SPACE_ATOMS:
            raise PreconditionError(
                f"el espacio finito admite entre 1 y {MAX_FINITE_SPACE_ATOMS} átomos, recibidos: {len(probs)}"
            )
        if np.any(probs <= 0):
            raise SpecValidationError("las probabilidades del espacio deben ser > 0", path="total.probs")
        if abs(probs.sum() - 1.0) > PROBABILITY_TOLERANCE * len(probs):
            raise SpecValidationError("las probabilidades del espacio deben sumar 1", path="total.probs")

    @classmethod
    def uniform(cls, m: int) -> "FiniteSpace":
        return cls(tuple(np.full(m, 1.0 / m)))

    @classmethod
    def from_distribution(cls, dist: LossDistribution) -> Tuple["FiniteSpace", np.ndarray]:
        """Espacio de los átomos de una ley discreta y el vector X₀ sobre él."""
        if not isinstance(dist, DiscreteAtoms):
            raise PreconditionError("el análisis de acotación requiere un total discreto")
        return cls(dist.probabilities), np.asarray(dist.values, dtype=float)

    @property
    def m(self) -> int:
        return len(self.probabilities)

    @property
    def p(self) -> np.ndarray:
        return np.asarray(self.probabilities)

    def events(self) -> List[Tuple[int, ...]]:
        """Eventos no vacíos en orden lexicográfico por tamaño."""
        return [
            combo for size in range(1, self.m + 1) for combo in combinations(range(self.m), size)
        ]

    def probability(self, event: Sequence[int]) -> float:
        return float(sum(self.probabilities[j] for j in event))

    def law(self, x: np.ndarray) -> DiscreteAtoms:
        """Ley de un vector de valores sobre Ω."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.m,):
            raise SpecValidationError(f"se esperaba un vector de {self.m} valores", path="allocation")
        return DiscreteAtoms.from_pairs(x, self.probabilities)

    def indicator(self, event: Sequence[int]) -> np.ndarray:
        out = np.zeros(self.m)
        out[list(event)] = 1.0
        return out


def vector_risk(kernel: DistortionKernel, space: FiniteSpace, x: np.ndarray) -> float:
    return risk_quantile_form(space.law(x), kernel)


class FiniteObjective:
    """Σᵢ λᵢ ρᵢ(Xᵢ) para vectores sobre un espacio finito."""

    def __init__(
        self,
        space: FiniteSpace,
        measures: Sequence[Callable[[LossDistribution], float]],
        weights: Sequence[float],
    ):
        self.space = space
        self.measures = list(measures)
        self.weights = [float(w) for w in weights]

    @classmethod
    def from_agents(cls, agents: Sequence[AgentSpec], space: FiniteSpace) -> "FiniteObjective":
        measures = [lambda d, k=a.kernel: risk_quantile_form(d, k) for a in agents]
        return cls(space, measures, [a.weight for a in agents])

    def agent_values(self, allocation: Sequence[np.ndarray]) -> List[float]:
        return [
            w * rho(self.space.law(x))
            for w, rho, x in zip(self.weights, self.measures, allocation)
        ]

    def __call__(self, allocation: Sequence[np.ndarray]) -> float:
        return float(sum(self.agent_values(allocation)))


# ============================================================================
# CONJUNTOS DE ESCENARIOS
# ============================================================================

@dataclass(frozen=True, eq=False)
class ScenarioSet:
    """Restricciones lineales A q <= b (una por evento) más q >= 0 y Σq = 1."""

    kernel: DistortionKernel
    space: FiniteSpace
    events: Tuple[Tuple[int, ...], ...]
    A_ub: np.ndarray = field(repr=False)
    b_ub: np.ndarray = field(repr=False)

    def contains(self, q: np.ndarray, scale: float = 1.0, tol: float = FEASIBILITY_TOLERANCE) -> bool:
        """q ∈ scale·Δ."""
        q = np.asarray(q, dtype=float)
        return bool(
            np.all(q >= -tol)
            and abs(q.sum() - scale) <= tol
            and np.all(self.A_ub @ q <= scale * self.b_ub + tol)
        )

    def max_expectation(self, x: np.ndarray) -> Tuple[float, np.ndarray]:
        """max_{q∈Δ} E_q[X] y el maximizador."""
        m = self.space.m
        result = linprog(
            c=-np.asarray(x, dtype=float),
            A_ub=self.A_ub,
            b_ub=self.b_ub,
            A_eq=np.ones((1, m)),
            b_eq=[1.0],
            bounds=[(0, None)] * m,
            method="highs",
            options=_LP_OPTIONS,
        )
        if result.status != 0:
            raise VerificationFailure(f"el LP del conjunto dual no se resolvió: {result.message}")
        return float(-result.fun), np.asarray(result.x)

    def event_label(self, row: int) -> str:
        return "{" + ",".join(str(j + 1) for j in self.events[row]) + "}"


def scenario_set(kernel: DistortionKernel, space: FiniteSpace) -> ScenarioSet:
    """Δ_Φ sobre un espacio finito: Σ_{j∈A} q_j <= g(P(A)) para los 2^m − 1 eventos."""
    if not is_convex(kernel):
        raise PreconditionError(
            f"scenario_set requiere un núcleo convexo (medida coherente); {kernel} no lo es"
        )
    g = dual(kernel)
    events = space.events()
    A = np.zeros((len(events), space.m))
    b = np.zeros(len(events))
    for row, event in enumerate(events):
        A[row, list(event)] = 1.0
        b[row] = g(space.probability(event))
    logger.debug(f"Conjunto dual de {kernel}: {len(events)} restricciones de evento")
    return ScenarioSet(kernel=kernel, space=space, events=tuple(events), A_ub=A, b_ub=b)


# ============================================================================
# INTERSECCIÓN, VALOR SOPORTE Y ALCANZABILIDAD
# ============================================================================

def _check_common_space(sets: Sequence[ScenarioSet], weights: Sequence[float]) -> FiniteSpace:
    if not sets:
        raise SpecValidationError("se requiere al menos un conjunto dual")
    if len(sets) != len(weights):
        raise SpecValidationError("un peso λ por conjunto dual")
    space = sets[0].space
    if any(s.space != space for s in sets):
        raise PreconditionError("todos los conjuntos deben estar sobre el mismo espacio finito")
    return space


def _stacked_constraints(sets: Sequence[ScenarioSet], weights: Sequence[float]):
    """z ∈ λᵢΔᵢ ⇔ Aᵢz <= λᵢbᵢ, Σz = λᵢ."""
    A = np.vstack([s.A_ub for s in sets])
    b = np.concatenate([w * s.b_ub for s, w in zip(sets, weights)])
    labels = [
        f"agente {i + 1}: evento {s.event_label(r)}"
        for i, s in enumerate(sets)
        for r in range(len(s.events))
    ]
    return A, b, labels


def intersection_feasible(
    sets: Sequence[ScenarioSet], weights: Sequence[float], tol: float = FEASIBILITY_TOLERANCE
) -> FeasibilityReport:
    """
    Factibilidad de ∩ λᵢΔᵢ mediante un LP elástico.

    Minimiza una holgura común s sobre todas las restricciones; si s* <= tol el
    punto es factible, si no se informan las restricciones que siguen violadas.
    """
    space = _check_common_space(sets, weights)
    m = space.m
    A, b, labels = _stacked_constraints(sets, weights)
    weights = [float(w) for w in weights]

    # Variables (z₁..z_m, s); Σz − λᵢ <= s y λᵢ − Σz <= s
    mass_rows = []
    mass_rhs = []
    mass_labels = []
    for i, w in enumerate(weights):
        mass_rows.append(np.concatenate((np.ones(m), [-1.0])))
        mass_rhs.append(w)
        mass_rows.append(np.concatenate((-np.ones(m), [-1.0])))
        mass_rhs.append(-w)
        mass_labels += [f"agente {i + 1}: Σq <= λ", f"agente {i + 1}: Σq >= λ"]

    A_full = np.vstack([np.hstack((A, -np.ones((len(A), 1)))), np.array(mass_rows)])
    b_full = np.concatenate((b, mass_rhs))
    c = np.zeros(m + 1)
    c[-1] = 1.0
    result = linprog(
        c=c, A_ub=A_full, b_ub=b_full, bounds=[(0, None)] * (m + 1), method="highs", options=_LP_OPTIONS
    )
    if result.status != 0:
        raise VerificationFailure(f"el LP elástico no se resolvió: {result.message}")

    z, slack = np.asarray(result.x[:m]), float(result.x[-1])
    if slack <= tol:
        logger.debug(f"Intersección factible (holgura {slack!r})")
        return FeasibilityReport(feasible=True, point=z, slack=slack)

    residual = A_full[:, :m] @ z - b_full
    violated = tuple(
        label for label, r in zip(labels + mass_labels, residual) if r > tol
    )
    logger.info(f"Intersección vacía: holgura mínima {slack!r}, {len(violated)} restricciones violadas")
    return FeasibilityReport(feasible=False, violated=violated, slack=slack)


def support_value(
    sets: Sequence[ScenarioSet], weights: Sequence[float], total: np.ndarray
) -> float:
    """sup_{Y ∈ ∩λᵢΔᵢ} E[Y X₀]."""
    space = _check_common_space(sets, weights)
    m = space.m
    A, b, _ = _stacked_constraints(sets, weights)
    A_eq = np.ones((len(weights), m))
    b_eq = np.asarray(weights, dtype=float)
    result = linprog(
        c=-np.asarray(total, dtype=float),
        A_ub=A,
        b_ub=b,
        A_eq=A_eq,
        b_eq=b_eq,
        bounds=[(0, None)] * m,
        method="highs",
        options=_LP_OPTIONS,
    )
    if result.status == 2:
        report = intersection_feasible(sets, weights)
        raise InfeasibleIntersectionError(
            "∩ λᵢΔᵢ es vacía: el problema no está acotado", report=report
        )
    if result.status != 0:
        raise VerificationFailure(f"el LP de valor soporte no se resolvió: {result.message}")
    return float(-result.fun)


def attainability_witness(
    agents: Sequence[AgentSpec],
    space: FiniteSpace,
    allocation: Sequence[np.ndarray],
    total: Optional[np.ndarray] = None,
    tol: float = DEFAULT_TOLERANCE,
) -> Optional[AttainabilityWitness]:
    """
    Busca Y en ∩λᵢΔᵢ con λᵢρᵢ(Xᵢ) = E[Y Xᵢ] para todo i.

    Si existe, la asignación alcanza la convolución ínfima y es óptima.
    """
    allocation = [np.asarray(x, dtype=float) for x in allocation]
    if len(allocation) != len(agents):
        raise SpecValidationError("un vector por agente", path="allocation")
    if total is not None and np.any(np.abs(np.sum(allocation, axis=0) - total) > tol):
        raise AllocationValidationError("la asignación no suma X₀", path="allocation")

    sets = [scenario_set(a.kernel, space) for a in agents]
    weights = [a.weight for a in agents]
    A, b, _ = _stacked_constraints(sets, weights)
    targets = FiniteObjective.from_agents(agents, space).agent_values(allocation)

    m = space.m
    A_eq = np.vstack([np.ones((len(weights), m)), np.vstack(allocation)])
    b_eq = np.concatenate((weights, targets))
    result = linprog(
        c=np.zeros(m), A_ub=A, b_ub=b, A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * m,
        method="highs", options=_LP_OPTIONS,
    )
    if result.status != 0:
        logger.debug(f"Sin testigo de alcanzabilidad ({result.message})")
        return None
    q = np.asarray(result.x)
    return AttainabilityWitness(density=q / space.p, measure=q, agent_values=tuple(targets))


# ============================================================================
# CERTIFICADOS DE NO ACOTACIÓN
# ============================================================================

def verify_certificate(
    certificate: UnboundednessCertificate,
    objective: AllocationObjective,
    tol: float = DEFAULT_TOLERANCE,
    slope_threshold: float = CERTIFICATE_SLOPE_THRESHOLD,
) -> UnboundednessCertificate:
    """
    Evalúa el objetivo en c ∈ {1, 10, 100} y exige afinidad con la pendiente declarada.

    Devuelve el certificado con la verificación adjunta.

    Raises:
        VerificationFailure: pendiente no negativa o objetivo no afín en c
    """
    if not certificate.slope < slope_threshold:
        raise VerificationFailure(f"pendiente {certificate.slope!r} no es < {slope_threshold}")
    values = {c: objective(certificate.point(c)) for c in CERTIFICATE_SCALES}
    scales = sorted(values)
    for c0, c1 in zip(scales[:-1], scales[1:]):
        expected = (c1 - c0) * certificate.slope
        observed = values[c1] - values[c0]
        if abs(observed - expected) > tol * max(1.0, abs(expected)):
            raise VerificationFailure(
                f"objetivo no afín entre c={c0} y c={c1}: {observed!r} vs {expected!r}"
            )
    return UnboundednessCertificate(
        kind=certificate.kind,
        base=certificate.base,
        direction=certificate.direction,
        slope=certificate.slope,
        verification=values,
        residual_agent=certificate.residual_agent,
        note=certificate.note,
    )


def rebase_certificate(
    certificate: UnboundednessCertificate,
    total: np.ndarray,
    objective: AllocationObjective,
    tol: float = DEFAULT_TOLERANCE,
    slope_threshold: float = CERTIFICATE_SLOPE_THRESHOLD,
) -> UnboundednessCertificate:
    """Traslada el rayo a otro total sobre el mismo espacio y lo vuelve a verificar."""
    if certificate.residual_agent is None:
        raise PreconditionError("el certificado no tiene agente residual para rebasar")
    return verify_certificate(certificate.rebased(total), objective, tol, slope_threshold)


def cash_transfer_certificate(
    agents: Sequence[AgentSpec],
    space: FiniteSpace,
    total: Optional[np.ndarray] = None,
    tol: float = DEFAULT_TOLERANCE,
    slope_threshold: float = CERTIFICATE_SLOPE_THRESHOLD,
) -> Optional[UnboundednessCertificate]:
    """
    Con λ distintos: +c al agente de menor λ y −c al de mayor λ.

    Por equivarianza de traslación la pendiente es λ_min − λ_max < 0; None si
    no queda por debajo de `slope_threshold`.
    """
    if len(agents) < 2:
        raise PreconditionError("cash_transfer_certificate requiere n >= 2")
    weights = np.array([a.weight for a in agents])
    receiver, payer = int(np.argmin(weights)), int(np.argmax(weights))
    if not weights[receiver] - weights[payer] < slope_threshold:
        return None

    n, m = len(agents), space.m
    direction = [np.zeros(m) for _ in range(n)]
    direction[receiver] = np.ones(m)
    direction[payer] = -np.ones(m)
    base = [np.zeros(m) for _ in range(n)]
    if total is not None:
        base[0] = np.asarray(total, dtype=float)

    certificate = UnboundednessCertificate(
        kind=CertificateKind.CASH_TRANSFER,
        base=tuple(base),
        direction=tuple(direction),
        slope=float(weights[receiver] - weights[payer]),
        residual_agent=0,
        note=f"agente {receiver + 1} recibe +c, agente {payer + 1} entrega −c",
    )
    logger.info(f"Certificado de transferencia: pendiente {certificate.slope!r}")
    return verify_certificate(certificate, FiniteObjective.from_agents(agents, space), tol, slope_threshold)


def var_mean_objective(space: FiniteSpace, alpha: float, weight: float = 1.0) -> FiniteObjective:
    """λ(VaR_α(X₁) + E[X₂]), con VaR₀ = ínfimo esencial."""
    return FiniteObjective(
        space,
        [lambda d: value_at_risk(d, alpha), lambda d: d.expectation()],
        [weight, weight],
    )


def var_mean_certificate(
    space: FiniteSpace,
    alpha: float,
    total: np.ndarray,
    weight: float = 1.0,
    tol: float = DEFAULT_TOLERANCE,
    slope_threshold: float = CERTIFICATE_SLOPE_THRESHOLD,
) -> Optional[UnboundednessCertificate]:
    """
    Agentes (VaR_α, esperanza): rayo X₁ = c·1_A, X₂ = X₀ − c·1_A.

    A es el evento propio de mayor probabilidad con P(A) <= 1−α (el primero en
    orden lexicográfico); VaR_α(c·1_A) = 0 y la pendiente es −λP(A). None si
    ningún evento deja la pendiente por debajo de `slope_threshold`.
    """
    if not 0.0 <= alpha <= 1.0:
        raise PreconditionError(f"α debe estar en [0,1], recibido: {alpha}")
    budget = 1.0 - alpha + PROBABILITY_TOLERANCE
    candidates = [
        e for e in space.events()
        if len(e) < space.m and space.probability(e) <= budget
    ]
    if not candidates:
        logger.debug(f"Ningún evento propio con P(A) <= {1.0 - alpha!r}")
        return None
    best = max(space.probability(e) for e in candidates)
    if not -weight * best < slope_threshold:
        logger.debug(f"Pendiente {-weight * best!r} no supera el umbral {slope_threshold!r}")
        return None
    event = next(e for e in candidates if space.probability(e) == best)

    indicator = space.indicator(event)
    certificate = UnboundednessCertificate(
        kind=CertificateKind.VAR_MEAN,
        base=(np.zeros(space.m), np.asarray(total, dtype=float)),
        direction=(indicator, -indicator),
        slope=-weight * space.probability(event),
        residual_agent=1,
        note="A = {" + ",".join(str(j + 1) for j in event) + "}",
    )
    logger.info(f"Certificado VaR/esperanza con A={event}: pendiente {certificate.slope!r}")
    return verify_certificate(certificate, var_mean_objective(space, alpha, weight), tol, slope_threshold)


def _candidate_directions(
    rng: np.random.Generator, n: int, space: FiniteSpace, count: int
) -> List[List[np.ndarray]]:
    """Direcciones enteras de suma cero exacta: densas y de indicadores."""
    events = space.events()
    candidates = []
    for k in range(count):
        if k % 2 == 0:
            rows = [rng.integers(-4, 5, size=space.m).astype(float) for _ in range(n - 1)]
            rows.append(-np.sum(rows, axis=0) if rows else np.zeros(space.m))
        else:
            i, j = rng.choice(n, size=2, replace=False)
            event = events[int(rng.integers(len(events)))]
            rows = [np.zeros(space.m) for _ in range(n)]
            rows[i] = space.indicator(event)
            rows[j] = -space.indicator(event)
        candidates.append(rows)
    return candidates


def _anchor_at_total(
    certificate: UnboundednessCertificate,
    total: np.ndarray,
    objective: FiniteObjective,
    tol: float,
    slope_threshold: float,
) -> UnboundednessCertificate:
    """Traslada un rayo desde el origen a la base (X₀, 0, ..., 0) si el objetivo sigue siendo afín allí."""
    try:
        anchored = verify_certificate(certificate.rebased(total), objective, tol, slope_threshold)
    except VerificationFailure as e:
        # ρ es 1-Lipschitz en norma del supremo: el rayo desde el origen sigue acotando
        logger.debug(f"Rayo no afín con base X₀ ({e}); se conserva la base cero")
        return certificate
    return replace(anchored, note=certificate.note.replace("rayo desde el origen", "rayo con base (X₀, 0, ..., 0)"))


def randomized_certificate_search(
    agents: Sequence[AgentSpec],
    space: FiniteSpace,
    iterations: int,
    seed: int,
    tol: float = DEFAULT_TOLERANCE,
    slope_threshold: float = CERTIFICATE_SLOPE_THRESHOLD,
    total: Optional[np.ndarray] = None,
) -> Optional[UnboundednessCertificate]:
    """
    Muestrea direcciones D con ΣDᵢ = 0 y busca Σλᵢρᵢ(Dᵢ) < umbral.

    Por homogeneidad positiva un acierto es un rayo desde el origen. Con
    `total`, el rayo se traslada a la base (X₀, 0, ..., 0) cuando el objetivo
    es afín allí; si no, conserva la base cero (ρ es 1-Lipschitz, así que
    X₀ + c·D₁ sigue llevando el objetivo a −∞). El agente 1 absorbe el total
    al rebasar. Cada lote usa un subflujo derivado de `seed`; se devuelve el
    primer acierto por índice. Devolver None NO prueba la acotación.
    """
    if iterations < 1:
        raise SpecValidationError("iterations debe ser >= 1", path="iters")
    if len(agents) < 2:
        return None

    objective = FiniteObjective.from_agents(agents, space)
    n_batches = -(-iterations // _SEARCH_BATCH)
    streams = np.random.SeedSequence(seed).spawn(n_batches)
    remaining = iterations
    for batch, stream in enumerate(streams):
        rng = np.random.default_rng(stream)
        count = min(_SEARCH_BATCH, remaining)
        remaining -= count
        for k, direction in enumerate(_candidate_directions(rng, len(agents), space, count)):
            value = objective(direction)
            if value < slope_threshold:
                index = batch * _SEARCH_BATCH + k
                logger.info(f"Búsqueda aleatoria: acierto en el candidato {index} (pendiente {value!r})")
                certificate = UnboundednessCertificate(
                    kind=CertificateKind.RANDOMIZED,
                    base=tuple(np.zeros(space.m) for _ in agents),
                    direction=tuple(direction),
                    slope=value,
                    residual_agent=0,
                    note=f"candidato {index}; rayo desde el origen",
                )
                certificate = verify_certificate(certificate, objective, tol, slope_threshold)
                if total is None:
                    return certificate
                return _anchor_at_total(certificate, np.asarray(total, dtype=float), objective, tol, slope_threshold)
    logger.info(f"Búsqueda aleatoria sin certificado tras {iterations} candidatos (no es prueba)")
    return None


# ============================================================================
# INFORME DE ACOTACIÓN
# ============================================================================

def _match_var_mean(agents: Sequence[AgentSpec]) -> Optional[Tuple[int, int, float]]:
    """Índices (VaR, esperanza) y α si los agentes contienen ese par con λ iguales."""
    mean = expectation_kernel()
    for i, a in enumerate(agents):
        knots = a.kernel.knots
        if len(knots) not in (2, 3):
            continue
        alpha = knots[1] if len(knots) == 3 else 1.0
        if not a.kernel.is_close(var_at(alpha)):
            continue
        for j, b in enumerate(agents):
            if j != i and b.weight == a.weight and b.kernel.is_close(mean):
                return i, j, alpha
    return None


def bounded_report(
    agents: Sequence[AgentSpec],
    space: FiniteSpace,
    total: np.ndarray,
    iterations: int = 10_000,
    seed: int = 0,
    tol: float = DEFAULT_TOLERANCE,
    feasibility_tol: float = FEASIBILITY_TOLERANCE,
    slope_threshold: float = CERTIFICATE_SLOPE_THRESHOLD,
) -> BoundednessReport:
    """
    Veredicto BOUNDED / UNBOUNDED / UNKNOWN para el problema sin co-monotonía.

    Un único agente carga con X₀ y el valor es λ₁ρ₁(X₀). Con dos o más el
    orden es: transferencia de efectivo, criterio exacto para agentes
    coherentes, rayo VaR/esperanza y búsqueda aleatoria.
    """
    total = np.asarray(total, dtype=float)
    if len(agents) == 1:
        agent = agents[0]
        value = agent.weight * vector_risk(agent.kernel, space, total)
        return BoundednessReport(BoundednessStatus.BOUNDED, support_value=value, note="un único agente: X₁ = X₀")
    certificate = cash_transfer_certificate(agents, space, total, tol, slope_threshold)
    if certificate is not None:
        return BoundednessReport(BoundednessStatus.UNBOUNDED, certificate=certificate, note="λ distintos")

    feasibility = None
    if all(is_convex(a.kernel) for a in agents):
        sets = [scenario_set(a.kernel, space) for a in agents]
        weights = [a.weight for a in agents]
        feasibility = intersection_feasible(sets, weights, feasibility_tol)
        if feasibility.feasible:
            value = support_value(sets, weights, total)
            return BoundednessReport(
                BoundednessStatus.BOUNDED, support_value=value, feasibility=feasibility,
                note="agentes coherentes con ∩λᵢΔᵢ no vacía",
            )

    pair = _match_var_mean(agents)
    if pair is not None:
        i, j, alpha = pair
        certificate = var_mean_certificate(space, alpha, total, agents[i].weight, tol, slope_threshold)
        if certificate is not None:
            certificate = _embed_pair(certificate, i, j, len(agents), space.m)
            certificate = verify_certificate(
                certificate, FiniteObjective.from_agents(agents, space), tol, slope_threshold
            )
            return BoundednessReport(BoundednessStatus.UNBOUNDED, certificate=certificate, note="par VaR/esperanza")

    certificate = randomized_certificate_search(
        agents, space, iterations, seed, tol, slope_threshold, total=total
    )
    if certificate is not None:
        return BoundednessReport(BoundednessStatus.UNBOUNDED, certificate=certificate, note="búsqueda aleatoria")
    note = f"sin certificado tras {iterations} candidatos; no es una prueba de acotación"
    if feasibility is not None:
        note = f"intersección vacía sin rayo explícito; {note}"
    return BoundednessReport(BoundednessStatus.UNKNOWN, feasibility=feasibility, note=note)


def _embed_pair(
    certificate: UnboundednessCertificate, i: int, j: int, n: int, m: int
) -> UnboundednessCertificate:
    """Coloca un rayo de dos agentes en las posiciones (i, j) de n agentes."""
    base = [np.zeros(m) for _ in range(n)]
    direction = [np.zeros(m) for _ in range(n)]
    base[i], base[j] = certificate.base
    direction[i], direction[j] = certificate.direction
    return UnboundednessCertificate(
        kind=certificate.kind,
        base=tuple(base),
        direction=tuple(direction),
        slope=certificate.slope,
        verification=certificate.verification,
        residual_agent=j,
        note=certificate.note,
    )


__all__ = [
    "FiniteSpace",
    "FiniteObjective",
    "ScenarioSet",
    "scenario_set",
    "vector_risk",
    "intersection_feasible",
    "support_value",
    "attainability_witness",
    "verify_certificate",
    "rebase_certificate",
    "cash_transfer_certificate",
    "var_mean_certificate",
    "var_mean_objective",
    "randomized_certificate_search",
    "bounded_report",
]
