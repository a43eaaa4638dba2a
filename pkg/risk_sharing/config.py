"""
Configuración centralizada del solver y de los oráculos.
Agrupa parámetros relacionados en dataclasses para mejor organización.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

from .constants import (
    BOOTSTRAP_RESAMPLES,
    CERTIFICATE_SLOPE_THRESHOLD,
    DEFAULT_TOLERANCE,
    FEASIBILITY_TOLERANCE,
    MAX_BRUTE_FORCE_CELLS,
    MAX_ENUMERATION,
    REGULARITY_TOLERANCE,
)

logger = logging.getLogger(__name__)


@dataclass
class ToleranceConfig:
    """Tolerancias de verificación."""

    tol: float = DEFAULT_TOLERANCE
    slope_threshold: float = CERTIFICATE_SLOPE_THRESHOLD
    feasibility_tol: float = FEASIBILITY_TOLERANCE
    regularity_tol: float = REGULARITY_TOLERANCE

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"tol debe ser > 0, recibido: {self.tol}")
        if not self.slope_threshold < 0:
            raise ValueError("slope_threshold debe ser negativo")
        if not self.feasibility_tol > 0 or not self.regularity_tol > 0:
            raise ValueError("las tolerancias de factibilidad y regularidad deben ser > 0")
        if self.tol > 1e-3:
            logger.warning(f"Tolerancia {self.tol} muy laxa: las verificaciones pierden sentido")


@dataclass
class OracleConfig:
    """Configuración de los oráculos de verificación."""

    cells: Optional[int] = None  # None: celdas alineadas a los átomos del total
    fractional_samples: int = 1000
    mc_samples: int = 100_000
    bootstrap_resamples: int = BOOTSTRAP_RESAMPLES
    constancy_trials: int = 100
    max_enumeration: int = MAX_ENUMERATION

    def __post_init__(self):
        if self.cells is not None and not 1 <= self.cells <= MAX_BRUTE_FORCE_CELLS:
            raise ValueError(f"cells debe estar entre 1 y {MAX_BRUTE_FORCE_CELLS}")
        if self.fractional_samples < 1 or self.constancy_trials < 1:
            raise ValueError("fractional_samples y constancy_trials deben ser >= 1")
        if self.mc_samples < 100:
            raise ValueError("mc_samples debe ser >= 100")
        if self.bootstrap_resamples < 2:
            raise ValueError("bootstrap_resamples debe ser >= 2")


@dataclass
class SearchConfig:
    """Búsqueda aleatoria de certificados de no acotación."""

    iterations: int = 10_000

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations debe ser >= 1")


@dataclass
class RunConfig:
    """Semilla, niveles de truncamiento y salida CSV."""

    seed: int = 0
    truncation_levels: Tuple[float, ...] = ()
    emit_csv: Optional[str] = None

    def __post_init__(self):
        if self.seed < 0:
            raise ValueError("seed debe ser >= 0")
        self.truncation_levels = tuple(float(m) for m in self.truncation_levels)
        if any(b < a for a, b in zip(self.truncation_levels, self.truncation_levels[1:])):
            raise ValueError("los niveles de truncamiento deben ser ascendentes")


@dataclass
class SolverConfig:
    """
    Configuración completa de una ejecución.

    Agrupa todas las sub-configuraciones en un solo objeto.
    """

    tolerance: ToleranceConfig = field(default_factory=ToleranceConfig)
    oracle: OracleConfig = field(default_factory=OracleConfig)
    search: SearchConfig = field(default_factory=SearchConfig)
    run: RunConfig = field(default_factory=RunConfig)

    @classmethod
    def from_simple_params(
        cls,
        tol: float = DEFAULT_TOLERANCE,
        seed: int = 0,
        cells: Optional[int] = None,
        iterations: int = 10_000,
        truncation_levels: Sequence[float] = (),
        emit_csv: Optional[str] = None,
        fractional_samples: int = 1000,
        mc_samples: int = 100_000,
        constancy_trials: int = 100,
    ) -> "SolverConfig":
        """
        Crea una configuración desde parámetros simples.

        Proporciona la interfaz plana que usa la CLI.
        """
        return cls(
            tolerance=ToleranceConfig(tol=tol, slope_threshold=-tol, feasibility_tol=tol),
            oracle=OracleConfig(
                cells=cells,
                fractional_samples=fractional_samples,
                mc_samples=mc_samples,
                constancy_trials=constancy_trials,
            ),
            search=SearchConfig(iterations=iterations),
            run=RunConfig(seed=seed, truncation_levels=tuple(truncation_levels), emit_csv=emit_csv),
        )
