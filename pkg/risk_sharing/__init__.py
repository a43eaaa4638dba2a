"""
Reparto optimo de riesgos con medidas de distorsion.

Medidas ρ_Φ(X) = ∫ VaR_t(X) dΦ(t), asignacion co-monotona optima en forma
cerrada (marginales bang-bang), dualidad en espacios finitos y oraculos de
verificacion independientes.

Arquitectura:
- constants.py / config.py: tolerancias y configuracion centralizada
- errors.py: jerarquia de excepciones (codigos de salida de la CLI)
- protocols.py: contratos de leyes y objetivos
- piecewise.py: funciones lineales por tramos exactas
- distributions.py / loaders.py: leyes de perdida y lectura de CSV
- distortion.py: nucleos Φ y medidas de riesgo
- allocation.py: selector k*, f*, valor optimo, regularidad
- duality.py: conjuntos de escenarios, acotacion y certificados
- oracles.py: fuerza bruta, Monte Carlo, contraejemplos
- schema.py / reporting.py / cli.py: entrada y salida por lotes
"""

# Leyes de perdida
from .distributions import (
    LossDistribution,
    DiscreteAtoms,
    EmpiricalSample,
    UniformContinuous,
    Exponential,
    TransformedContinuous,
)
from .loaders import SampleLoader

# Nucleos y medidas
from .distortion import (
    DistortionKernel,
    DualDistortion,
    expectation_kernel,
    var_at,
    cvar_at,
    prop_hazard,
    wang,
    mixture,
    from_points,
    dual,
    risk,
    risk_quantile_form,
    risk_choquet_form,
    cvar,
    value_at_risk,
    is_convex,
    is_robust,
    max_kernel,
)
from .piecewise import PiecewiseMonotoneFn, LevelCurve

# Modelos
from .models import (
    AgentSpec,
    MarketProblem,
    LevelSelector,
    ComonotoneAllocation,
    GridAssignment,
    Layer,
    UnboundednessCertificate,
    BoundednessReport,
    BoundednessStatus,
    CertificateKind,
)

# Asignacion optima
from .allocation import (
    psi,
    psi_curve,
    optimal_selector,
    optimal_allocation,
    optimal_value,
    evaluate_allocation,
    convolution_kernel,
    regularity_check,
    layer_table,
)

# Dualidad
from .duality import (
    FiniteSpace,
    ScenarioSet,
    scenario_set,
    intersection_feasible,
    support_value,
    attainability_witness,
    verify_certificate,
    cash_transfer_certificate,
    var_mean_certificate,
    randomized_certificate_search,
    bounded_report,
)

# Oraculos
from .oracles import (
    brute_force_comonotone,
    fractional_probe,
    moral_hazard_counterexample,
    strict_gap_check,
    monte_carlo_risk,
    constancy_check,
    run_verification,
)

# Configuracion y errores
from .config import SolverConfig, ToleranceConfig, OracleConfig, SearchConfig, RunConfig
from .errors import (
    RiskSharingError,
    SpecValidationError,
    AllocationValidationError,
    DomainError,
    PreconditionError,
    EnumerationLimitError,
    VerificationFailure,
)
from .schema import ProblemSpec

__version__ = "1.0.0"
__all__ = [
    # Leyes
    "LossDistribution",
    "DiscreteAtoms",
    "EmpiricalSample",
    "UniformContinuous",
    "Exponential",
    "TransformedContinuous",
    "SampleLoader",
    # Nucleos
    "DistortionKernel",
    "DualDistortion",
    "expectation_kernel",
    "var_at",
    "cvar_at",
    "prop_hazard",
    "wang",
    "mixture",
    "from_points",
    "dual",
    "risk",
    "risk_quantile_form",
    "risk_choquet_form",
    "cvar",
    "value_at_risk",
    "is_convex",
    "is_robust",
    "max_kernel",
    "PiecewiseMonotoneFn",
    "LevelCurve",
    # Modelos
    "AgentSpec",
    "MarketProblem",
    "LevelSelector",
    "ComonotoneAllocation",
    "GridAssignment",
    "Layer",
    "UnboundednessCertificate",
    "BoundednessReport",
    "BoundednessStatus",
    "CertificateKind",
    # Asignacion
    "psi",
    "psi_curve",
    "optimal_selector",
    "optimal_allocation",
    "optimal_value",
    "evaluate_allocation",
    "convolution_kernel",
    "regularity_check",
    "layer_table",
    # Dualidad
    "FiniteSpace",
    "ScenarioSet",
    "scenario_set",
    "intersection_feasible",
    "support_value",
    "attainability_witness",
    "verify_certificate",
    "cash_transfer_certificate",
    "var_mean_certificate",
    "randomized_certificate_search",
    "bounded_report",
    # Oraculos
    "brute_force_comonotone",
    "fractional_probe",
    "moral_hazard_counterexample",
    "strict_gap_check",
    "monte_carlo_risk",
    "constancy_check",
    "run_verification",
    # Configuracion y errores
    "SolverConfig",
    "ToleranceConfig",
    "OracleConfig",
    "SearchConfig",
    "RunConfig",
    "RiskSharingError",
    "SpecValidationError",
    "AllocationValidationError",
    "DomainError",
    "PreconditionError",
    "EnumerationLimitError",
    "VerificationFailure",
    "ProblemSpec",
]
