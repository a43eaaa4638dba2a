"""
Núcleos de distorsión Φ y medidas de riesgo de distorsión.

ρ_Φ(X) = ∫₀¹ VaR_t(X) dΦ(t)   (forma de quantiles)
       = ∫_{-∞}^0 (g(S_X)−1) dx + ∫_0^∞ g(S_X) dx,  g(x) = 1 − Φ(1−x)   (forma de Choquet)

Convención en los átomos: un salto de Φ en t aporta salto × VaR_t(X), con
VaR el quantil inferior (continuo por la izquierda). Con Φ càdlàg esto hace
que var_at(α) reproduzca exactamente VaR_α y que ambas formas coincidan.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple, Union

import numpy as np
from scipy.stats import norm

from .constants import LEVEL_TOLERANCE, SMOOTH_KERNEL_GRID
from .distributions import LossDistribution
from .errors import DomainError, SpecValidationError
from .piecewise import LevelCurve, _merge_levels, envelope
from .protocols import QuantileLaw

logger = logging.getLogger(__name__)

# Tolerancia de los invariantes de un núcleo (Φ(0)=0, Φ(1)=1, monotonía)
_KERNEL_TOLERANCE = 1e-9


# ============================================================================
# NÚCLEOS
# ============================================================================

@dataclass(frozen=True)
class DistortionKernel(LevelCurve):
    """
    Φ: [0,1] → [0,1] no decreciente, càdlàg, Φ(0)=0, Φ(1)=1.

    Los saltos de la curva son los átomos de la medida m_Φ; las pendientes
    su densidad.
    """

    label: str = field(default="", compare=False)

    def __post_init__(self):
        super().__post_init__()
        if abs(self.right[0]) > _KERNEL_TOLERANCE:
            raise SpecValidationError(f"Φ(0) debe ser 0, recibido: {self.right[0]}", path="kernel")
        if abs(self.right[-1] - 1.0) > _KERNEL_TOLERANCE:
            raise SpecValidationError(f"Φ(1) debe ser 1, recibido: {self.right[-1]}", path="kernel")
        if np.any(self.jumps < -_KERNEL_TOLERANCE) or np.any(self.slopes < -_KERNEL_TOLERANCE):
            raise SpecValidationError("Φ debe ser no decreciente", path="kernel")

        # Extremos exactos
        left, right = list(self.left), list(self.right)
        left[0] = right[0] = 0.0
        right[-1] = 1.0
        object.__setattr__(self, "left", tuple(left))
        object.__setattr__(self, "right", tuple(right))

    @classmethod
    def from_curve(cls, curve: LevelCurve, label: str = "") -> "DistortionKernel":
        return cls(knots=curve.knots, left=curve.left, right=curve.right, label=label)

    @property
    def atoms(self) -> List[Tuple[float, float]]:
        """Átomos (t, masa) de m_Φ."""
        return [
            (t, float(j)) for t, j in zip(self.knots, self.jumps) if j > LEVEL_TOLERANCE
        ]

    @property
    def terminal_jump(self) -> float:
        """Masa de m_Φ en t=1."""
        return float(self.jumps[-1])

    def complement(self) -> LevelCurve:
        """1 − Φ."""
        return self.affine(1.0, -1.0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "type": "points",
            "label": self.label,
            "points": [[t, lv, rv] for t, lv, rv in zip(self.knots, self.left, self.right)],
        }

    def __str__(self) -> str:
        return self.label or f"points({len(self.knots)})"


def expectation_kernel() -> DistortionKernel:
    """Φ(t) = t."""
    return DistortionKernel(knots=(0.0, 1.0), left=(0.0, 1.0), right=(0.0, 1.0), label="expectation")


def var_at(alpha: float) -> DistortionKernel:
    """Salto unitario en α ∈ (0,1]."""
    if not 0.0 < alpha <= 1.0:
        raise SpecValidationError(f"var_at requiere α en (0,1], recibido: {alpha}", path="kernel.alpha")
    label = f"var:{alpha!r}"
    if alpha == 1.0:
        return DistortionKernel(knots=(0.0, 1.0), left=(0.0, 0.0), right=(0.0, 1.0), label=label)
    return DistortionKernel(
        knots=(0.0, alpha, 1.0), left=(0.0, 0.0, 1.0), right=(0.0, 1.0, 1.0), label=label
    )


def cvar_at(alpha: float) -> DistortionKernel:
    """Φ(t) = (t−α)⁺/(1−α), α ∈ [0,1)."""
    if not 0.0 <= alpha < 1.0:
        raise SpecValidationError(f"cvar_at requiere α en [0,1), recibido: {alpha}", path="kernel.alpha")
    if alpha == 0.0:
        return DistortionKernel.from_curve(expectation_kernel(), label="cvar:0.0")
    return DistortionKernel(
        knots=(0.0, alpha, 1.0), left=(0.0, 0.0, 1.0), right=(0.0, 0.0, 1.0), label=f"cvar:{alpha!r}"
    )


def _smooth_kernel(values: np.ndarray, label: str) -> DistortionKernel:
    grid = np.linspace(0.0, 1.0, SMOOTH_KERNEL_GRID + 1)
    values = np.maximum.accumulate(np.clip(values, 0.0, 1.0))
    values[0], values[-1] = 0.0, 1.0
    curve = LevelCurve(knots=grid, left=values, right=values).simplified()
    return DistortionKernel.from_curve(curve, label=label)


def prop_hazard(r: float) -> DistortionKernel:
    """Φ(t) = 1 − (1−t)^r, r ∈ (0,1], interpolada en una malla de 1024 tramos."""
    if not 0.0 < r <= 1.0:
        raise SpecValidationError(f"prop_hazard requiere r en (0,1], recibido: {r}", path="kernel.r")
    grid = np.linspace(0.0, 1.0, SMOOTH_KERNEL_GRID + 1)
    return _smooth_kernel(1.0 - (1.0 - grid) ** r, label=f"ph:{r!r}")


def wang(shift: float) -> DistortionKernel:
    """Transformada de Wang: Φ(t) = N(N⁻¹(t) − λ), λ >= 0, en la misma malla."""
    if not shift >= 0.0 or not np.isfinite(shift):
        raise SpecValidationError(f"wang requiere λ >= 0 finito, recibido: {shift}", path="kernel.lambda")
    grid = np.linspace(0.0, 1.0, SMOOTH_KERNEL_GRID + 1)
    with np.errstate(divide="ignore"):
        values = norm.cdf(norm.ppf(grid) - shift)
    return _smooth_kernel(values, label=f"wang:{shift!r}")


def mixture(weights: Sequence[float], kernels: Sequence[DistortionKernel]) -> DistortionKernel:
    """Combinación convexa Σ wⱼ Φⱼ."""
    weights = np.asarray(weights, dtype=float)
    if len(weights) == 0 or len(weights) != len(kernels):
        raise SpecValidationError("mixture requiere tantos pesos como núcleos", path="kernel.components")
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > _KERNEL_TOLERANCE:
        raise SpecValidationError("los pesos de mixture deben ser >= 0 y sumar 1", path="kernel.components")

    levels = _merge_levels([t for k in kernels for t in k.knots])
    right = sum(w * k(levels) for w, k in zip(weights, kernels))
    left = sum(w * k.left_limit(levels) for w, k in zip(weights, kernels))
    left[0] = 0.0
    label = "mixture(" + ",".join(f"{w!r}*{k}" for w, k in zip(weights, kernels)) + ")"
    curve = LevelCurve(knots=levels, left=left, right=right).simplified()
    return DistortionKernel.from_curve(curve, label=label)


def from_points(points: Sequence[Sequence[float]], label: str = "") -> DistortionKernel:
    """
    Núcleo a partir de nodos ascendentes.

    Cada nodo es (t, Φ(t)) o (t, Φ(t−), Φ(t)) cuando hay un salto en t.
    """
    knots, left, right = [], [], []
    for i, point in enumerate(points):
        if not isinstance(point, (list, tuple)):
            raise SpecValidationError(f"nodo inválido: {point!r}", path=f"kernel.points[{i}]")
        if len(point) == 2:
            t, lv, rv = point[0], point[1], point[1]
        elif len(point) == 3:
            t, lv, rv = point
        else:
            raise SpecValidationError("cada nodo debe ser [t, Φ] o [t, Φ(t−), Φ(t)]", path=f"kernel.points[{i}]")
        try:
            knots.append(float(t))
            left.append(float(lv))
            right.append(float(rv))
        except (TypeError, ValueError) as e:
            raise SpecValidationError(f"nodo no numérico: {point!r}", path=f"kernel.points[{i}]") from e
    if knots:
        left[0] = right[0]
    return DistortionKernel(knots=knots, left=left, right=right, label=label or f"points({len(knots)})")


# ============================================================================
# CONSTRUCCIÓN DESDE JSON / IDENTIFICADORES
# ============================================================================

def _number(data: Dict[str, Any], key: str, path: str) -> float:
    if key not in data:
        raise SpecValidationError(f"falta el campo {key!r}", path=path)
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecValidationError(f"se esperaba un número, recibido: {value!r}", path=f"{path}.{key}")
    return float(value)


def from_spec(data: Dict[str, Any], path: str = "kernel") -> DistortionKernel:
    """Núcleo desde `{"type": "var"|"cvar"|"expectation"|"prop_hazard"|"points"|"wang"|"mixture", ...}`."""
    if isinstance(data, str):
        return parse_kernel_id(data, path=path)
    if not isinstance(data, dict):
        raise SpecValidationError("se esperaba un objeto núcleo", path=path)

    kind = data.get("type")
    try:
        if kind == "expectation":
            return expectation_kernel()
        if kind == "var":
            return var_at(_number(data, "alpha", path))
        if kind == "cvar":
            return cvar_at(_number(data, "alpha", path))
        if kind == "prop_hazard":
            return prop_hazard(_number(data, "r", path))
        if kind == "wang":
            return wang(_number(data, "lambda", path))
        if kind == "points":
            if not isinstance(data.get("points"), list):
                raise SpecValidationError("falta la lista 'points'", path=path)
            return from_points(data["points"], label=data.get("label", ""))
        if kind == "mixture":
            components = data.get("components")
            if not isinstance(components, list) or not components:
                raise SpecValidationError("falta la lista 'components'", path=path)
            weights = [_number(c, "weight", f"{path}.components[{i}]") for i, c in enumerate(components)]
            kernels = [
                from_spec(c.get("kernel"), path=f"{path}.components[{i}].kernel")
                for i, c in enumerate(components)
            ]
            return mixture(weights, kernels)
    except SpecValidationError as e:
        if path == "kernel" or (e.path or "").startswith(path):
            raise
        suffix = e.path[len("kernel"):] if (e.path or "").startswith("kernel") else ""
        raise SpecValidationError(e.detail, path=path + suffix) from e
    raise SpecValidationError(f"tipo de núcleo desconocido: {kind!r}", path=f"{path}.type")


def parse_kernel_id(text: str, path: str = "kernel") -> DistortionKernel:
    """Identificadores cortos: expectation, var:α, cvar:α, ph:r, wang:λ."""
    name, _, arg = text.strip().partition(":")
    if name in ("expectation", "mean", "e"):
        return expectation_kernel()
    builders = {"var": var_at, "cvar": cvar_at, "ph": prop_hazard, "wang": wang}
    if name not in builders:
        raise SpecValidationError(f"identificador de núcleo desconocido: {text!r}", path=path)
    try:
        value = float(arg)
    except ValueError as e:
        raise SpecValidationError(f"parámetro inválido en {text!r}", path=path) from e
    return builders[name](value)


# ============================================================================
# DISTORSIÓN DUAL
# ============================================================================

@dataclass(frozen=True)
class DualDistortion:
    """g(x) = 1 − Φ(1−x), aplicada a la función de supervivencia."""

    kernel: DistortionKernel

    def __call__(self, x):
        x_arr = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        result = 1.0 - self.kernel(1.0 - x_arr)
        if np.ndim(x) == 0:
            return float(result)
        return result

    @property
    def is_concave(self) -> bool:
        return is_convex(self.kernel)


def dual(kernel: DistortionKernel) -> DualDistortion:
    return DualDistortion(kernel)


# ============================================================================
# EVALUACIÓN
# ============================================================================

def check_domain(dist: LossDistribution, kernel: DistortionKernel) -> None:
    """
    Verifica que ∫ VaR_t dΦ sea finita para las familias soportadas.

    Las familias soportadas están acotadas inferiormente y tienen todos los
    momentos; la única divergencia posible es un átomo de Φ en t=1 sobre una
    ley no acotada superiormente.
    """
    if not np.isfinite(dist.lower):
        raise DomainError("cola inferior no integrable: la ley no está acotada inferiormente")
    if not dist.is_bounded and kernel.terminal_jump > LEVEL_TOLERANCE:
        raise DomainError(
            f"cola superior no integrable: Φ tiene un átomo de masa {kernel.terminal_jump!r} "
            f"en t=1 y la ley no está acotada superiormente"
        )


def in_domain(dist: LossDistribution, kernel: DistortionKernel) -> bool:
    try:
        check_domain(dist, kernel)
    except DomainError:
        return False
    return True


def integrate_composed(dist: QuantileLaw, curve: LevelCurve, a: float, b: float) -> float:
    """
    ∫_a^b curve(F(x)) dx, exacta.

    En [VaR_{t_k}, VaR_{t_{k+1}}) se cumple F ∈ [t_k, t_{k+1}), donde la curva
    es afín en F = 1 − S; basta integrar S con la primitiva de la ley.
    """
    if b <= a:
        return 0.0
    knots = np.asarray(curve.knots)
    cuts = [a] + [float(dist.quantiles(t)) for t in knots[1:]]
    total = 0.0
    for k, (t_k, _, value, slope) in enumerate(curve.pieces()):
        lo = max(a, cuts[k])
        hi = min(b, cuts[k + 1])
        if hi <= lo:
            continue
        constant = value - slope * t_k + slope
        if not np.isfinite(hi):
            if abs(constant) > LEVEL_TOLERANCE:
                raise DomainError("integral divergente en la cola superior")
            constant = 0.0
        piece = -slope * dist.integrated_survival(lo, hi) if slope != 0.0 else 0.0
        if constant != 0.0:
            piece += constant * (hi - lo)
        total += piece

    # Región F = 1
    lo = max(a, cuts[-1])
    if b > lo:
        terminal = curve.right[-1]
        if terminal != 0.0:
            if not np.isfinite(b):
                raise DomainError("integral divergente en la cola superior")
            total += terminal * (b - lo)
    return float(total)


def risk_quantile_form(dist: LossDistribution, kernel: DistortionKernel) -> float:
    """ρ_Φ(X) = ∫₀¹ VaR_t(X) dΦ(t): saltos × quantiles más pendientes × ∫VaR."""
    check_domain(dist, kernel)
    total = 0.0
    for t, mass in kernel.atoms:
        total += mass * float(dist.quantiles(t))
    for t0, t1, _, slope in kernel.pieces():
        if slope != 0.0:
            total += slope * dist.integrated_quantile(t0, t1)
    return float(total)


def risk_choquet_form(dist: LossDistribution, kernel: DistortionKernel) -> float:
    """∫_{−∞}^0 (g(S)−1) dx + ∫_0^∞ g(S) dx, con g(S) = 1 − Φ(F)."""
    check_domain(dist, kernel)
    positive = integrate_composed(dist, kernel.complement(), 0.0, float("inf"))
    negative = 0.0
    if dist.lower < 0.0:
        negative = integrate_composed(dist, kernel, dist.lower, 0.0)
    return positive - negative


def risk(dist: LossDistribution, kernel: DistortionKernel) -> float:
    return risk_quantile_form(dist, kernel)


def cvar(dist: LossDistribution, alpha: float) -> float:
    """CVaR_α = (1−α)⁻¹ ∫_α^1 VaR_t dt, α ∈ [0,1)."""
    if not 0.0 <= alpha < 1.0:
        raise DomainError(f"CVaR requiere α en [0,1), recibido: {alpha}")
    return risk_quantile_form(dist, cvar_at(alpha))


def value_at_risk(dist: LossDistribution, alpha: float) -> float:
    """VaR_α para α ∈ [0,1]; en α=0 devuelve el ínfimo esencial."""
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"VaR requiere α en [0,1], recibido: {alpha}")
    if alpha == 0.0:
        return dist.lower
    return dist.quantile(alpha)


# ============================================================================
# PROPIEDADES DE NÚCLEOS
# ============================================================================

def is_convex(kernel: DistortionKernel, tol: float = _KERNEL_TOLERANCE) -> bool:
    """Pendientes no decrecientes y sin saltos en (0,1); un salto en t=1 es admisible."""
    if np.any(kernel.jumps[1:-1] > tol):
        return False
    return bool(np.all(np.diff(kernel.slopes) >= -tol))


def is_robust(kernel: DistortionKernel, tol: float = _KERNEL_TOLERANCE) -> bool:
    """El soporte de dΦ está separado de 0 y de 1."""
    slopes = kernel.slopes
    flat_at_zero = abs(slopes[0]) <= tol
    flat_at_one = abs(slopes[-1]) <= tol and abs(kernel.left[-1] - 1.0) <= tol
    return bool(flat_at_zero and flat_at_one)


def max_kernel(*kernels: DistortionKernel) -> DistortionKernel:
    """Máximo puntual de varios núcleos."""
    if len(kernels) == 1 and not isinstance(kernels[0], DistortionKernel):
        kernels = tuple(kernels[0])
    if not kernels:
        raise SpecValidationError("max_kernel requiere al menos un núcleo")
    if len(kernels) == 1:
        return kernels[0]
    label = "max(" + ",".join(str(k) for k in kernels) + ")"
    return DistortionKernel.from_curve(envelope(kernels, kind="max"), label=label)


KernelLike = Union[DistortionKernel, Dict[str, Any], str]


def as_kernel(value: KernelLike) -> DistortionKernel:
    if isinstance(value, DistortionKernel):
        return value
    return from_spec(value)


__all__ = [
    "DistortionKernel",
    "DualDistortion",
    "expectation_kernel",
    "var_at",
    "cvar_at",
    "prop_hazard",
    "wang",
    "mixture",
    "from_points",
    "from_spec",
    "parse_kernel_id",
    "dual",
    "check_domain",
    "in_domain",
    "integrate_composed",
    "risk_quantile_form",
    "risk_choquet_form",
    "cvar",
    "value_at_risk",
    "is_convex",
    "is_robust",
    "max_kernel",
]
