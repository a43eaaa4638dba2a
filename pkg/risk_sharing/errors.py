"""
Jerarquía de excepciones del paquete.

Cada familia se corresponde con un código de salida de la CLI:
- SpecValidationError -> 2
- DomainError / PreconditionError -> 3
- VerificationFailure -> 4
"""

from typing import Optional


class RiskSharingError(Exception):
    """Error base del paquete."""


class SpecValidationError(RiskSharingError, ValueError):
    """Especificación, núcleo, CSV o asignación mal formados."""

    def __init__(self, message: str, path: Optional[str] = None, row: Optional[int] = None):
        self.path = path
        self.row = row
        self.detail = message
        prefix = ""
        if path:
            prefix = f"{path}: "
        elif row is not None:
            prefix = f"fila {row}: "
        super().__init__(f"{prefix}{message}")


class AllocationValidationError(SpecValidationError):
    """Asignación que viola Σfᵢ = id, monotonía o Lipschitz."""


class DomainError(RiskSharingError, ValueError):
    """Combinación no integrable o argumento fuera de dominio."""


class PreconditionError(DomainError):
    """Precondición de una operación no satisfecha."""


class EnumerationLimitError(PreconditionError):
    """La enumeración exhaustiva supera el límite combinatorio."""


class VerificationFailure(RiskSharingError, RuntimeError):
    """Un oráculo discrepa del valor reclamado más allá de la tolerancia."""


class InfeasibleIntersectionError(PreconditionError):
    """∩ λᵢΔᵢ vacía; `report` lleva las restricciones violadas."""

    def __init__(self, message: str, report=None):
        self.report = report
        super().__init__(message)
