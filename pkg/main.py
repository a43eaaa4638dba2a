"""
Reparto optimo de riesgos con medidas de distorsion.

Este archivo es un wrapper para mantener compatibilidad hacia atras.
El codigo vive en el paquete 'risk_sharing/'.

Uso:
    python main.py allocate --spec specs/var_mean.json
    python -m risk_sharing bounded --kernel var:0.7 --kernel expectation --total atoms:1,2,3,4

API programatica:
    from risk_sharing import AgentSpec, MarketProblem, DiscreteAtoms, var_at, expectation_kernel
    from risk_sharing import optimal_value

    problem = MarketProblem(
        agents=(AgentSpec(var_at(0.6)), AgentSpec(expectation_kernel())),
        total=DiscreteAtoms.uniform_on([1, 2, 3, 4]),
    )
    print(optimal_value(problem))  # 2.25
"""

import sys

# Re-exportar la API principal para compatibilidad
from risk_sharing import (
    AgentSpec,
    MarketProblem,
    DiscreteAtoms,
    Exponential,
    var_at,
    cvar_at,
    expectation_kernel,
    optimal_allocation,
    optimal_value,
)
from risk_sharing.cli import main

__all__ = [
    "AgentSpec",
    "MarketProblem",
    "DiscreteAtoms",
    "Exponential",
    "var_at",
    "cvar_at",
    "expectation_kernel",
    "optimal_allocation",
    "optimal_value",
    "main",
]


if __name__ == "__main__":
    sys.exit(main())
