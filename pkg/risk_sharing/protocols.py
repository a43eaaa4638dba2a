"""
Protocolos e interfaces del paquete.
Define contratos que permiten inyección de dependencias y testing.
"""

from typing import Protocol, Sequence

import numpy as np


class QuantileLaw(Protocol):
    """Protocolo mínimo que consumen las medidas de distorsión."""

    @property
    def lower(self) -> float:
        """Ínfimo esencial del soporte."""
        ...

    @property
    def upper(self) -> float:
        """Supremo esencial del soporte (puede ser inf)."""
        ...

    def cdf(self, x):
        """Función de distribución, continua por la derecha."""
        ...

    def quantiles(self, t):
        """Quantil inferior vectorizado, sin validación del nivel."""
        ...

    def integrated_quantile(self, a: float, b: float) -> float:
        """∫_a^b VaR_t dt."""
        ...

    def integrated_survival(self, lo: float, hi: float) -> float:
        """∫_lo^hi S(x) dx."""
        ...


class AllocationObjective(Protocol):
    """Objetivo agregado Σλᵢρᵢ(Xᵢ) sobre vectores de un espacio finito."""

    def __call__(self, allocation: Sequence[np.ndarray]) -> float:
        ...
