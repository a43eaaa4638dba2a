"""
Leyes de pérdida: el riesgo total X₀ y sus transformaciones fᵢ(X₀).

Familias soportadas:
- DiscreteAtoms / EmpiricalSample: átomos ordenados con probabilidades.
- UniformContinuous, Exponential: quantiles analíticos.
- TransformedContinuous: ley exacta de f(X) para X continua y f lineal a
  trozos no decreciente (truncamientos y asignaciones sobre leyes continuas).

Convención de quantil compartida por todo el paquete: quantil inferior
VaR_t = inf{x : F(x) >= t}, continuo por la izquierda en t ∈ (0,1].
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, Any, Optional, Sequence, Tuple

import numpy as np
from scipy.special import xlogy

from .constants import LEVEL_TOLERANCE, PROBABILITY_TOLERANCE
from .errors import DomainError, SpecValidationError
from .piecewise import PiecewiseMonotoneFn

logger = logging.getLogger(__name__)


def _check_level(t: float) -> float:
    t = float(t)
    if not 0.0 <= t <= 1.0 or np.isnan(t):
        raise DomainError(f"nivel de quantil fuera de [0,1]: {t}")
    if t == 0.0:
        raise DomainError("el quantil en t=0 no está definido (ínfimo sobre toda la recta)")
    return t


# ============================================================================
# INTERFAZ COMÚN
# ============================================================================

class LossDistribution(ABC):
    """Ley de una pérdida real, inmutable."""

    @property
    @abstractmethod
    def lower(self) -> float:
        """Ínfimo esencial del soporte."""

    @property
    @abstractmethod
    def upper(self) -> float:
        """Supremo esencial del soporte (inf si no está acotado)."""

    @abstractmethod
    def cdf(self, x):
        """F(x) = P(X <= x), vectorizada."""

    @abstractmethod
    def quantiles(self, t):
        """Quantil inferior vectorizado; no valida el nivel."""

    @abstractmethod
    def integrated_quantile(self, a: float, b: float) -> float:
        """∫_a^b VaR_t dt para 0 <= a <= b <= 1."""

    @abstractmethod
    def integrated_survival(self, lo: float, hi: float) -> float:
        """∫_lo^hi S(x) dx (hi puede ser inf)."""

    @abstractmethod
    def atoms(self) -> np.ndarray:
        """Ubicaciones con masa positiva."""

    @abstractmethod
    def pushforward(self, fn: PiecewiseMonotoneFn) -> "LossDistribution":
        """Ley de fn(X)."""

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        """Descripción serializable."""

    # ------------------------------------------------------------------
    # Operaciones derivadas
    # ------------------------------------------------------------------

    def survival(self, x):
        return 1.0 - self.cdf(x)

    def quantile(self, t: float) -> float:
        """VaR_t(X) = inf{x : F(x) >= t}, con t ∈ (0,1]."""
        return float(self.quantiles(_check_level(t)))

    def expectation(self) -> float:
        return self.integrated_quantile(0.0, 1.0)

    def truncate(self, m: float) -> "LossDistribution":
        """Ley de min(X, m)."""
        if m <= self.lower:
            raise DomainError(f"el nivel de truncamiento {m} no supera el ínfimo del soporte {self.lower}")
        if m >= self.upper:
            return self
        return self.pushforward(PiecewiseMonotoneFn.cap(m, start=self.lower))

    def sample(self, n: int, seed: int) -> "EmpiricalSample":
        """Muestra i.i.d. por inversión; determinista dado `seed`."""
        if n < 1:
            raise SpecValidationError(f"el tamaño de muestra debe ser >= 1, recibido: {n}")
        rng = np.random.default_rng(seed)
        levels = 1.0 - rng.random(n)
        return EmpiricalSample.from_values(self.quantiles(levels))

    @property
    def is_nonnegative(self) -> bool:
        return self.lower >= 0.0

    @property
    def is_bounded(self) -> bool:
        return bool(np.isfinite(self.upper))


# ============================================================================
# LEYES DISCRETAS
# ============================================================================

@dataclass(frozen=True)
class DiscreteAtoms(LossDistribution):
    """Átomos estrictamente crecientes con probabilidades positivas."""

    values: Tuple[float, ...]
    probabilities: Tuple[float, ...]
    _cum: np.ndarray = field(init=False, repr=False, compare=False)
    _prefix: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "probabilities", tuple(float(p) for p in self.probabilities))
        values = np.asarray(self.values)
        probs = np.asarray(self.probabilities)

        if len(values) == 0 or len(values) != len(probs):
            raise SpecValidationError("se requieren átomos y probabilidades de igual longitud", path="total")
        if not np.all(np.isfinite(values)):
            raise SpecValidationError("los átomos deben ser finitos", path="total.values")
        if np.any(np.diff(values) <= 0):
            raise SpecValidationError("los átomos deben ser estrictamente crecientes", path="total.values")
        if np.any(probs <= 0) or np.any(probs > 1):
            raise SpecValidationError("las probabilidades deben estar en (0,1]", path="total.probs")
        if abs(probs.sum() - 1.0) > PROBABILITY_TOLERANCE * max(1, len(probs)):
            raise SpecValidationError(
                f"las probabilidades suman {probs.sum()!r}, no 1", path="total.probs"
            )

        cum = np.minimum(np.cumsum(probs), 1.0)
        cum[-1] = 1.0
        prefix = np.concatenate(([0.0], np.cumsum(values * probs)))
        object.__setattr__(self, "_cum", cum)
        object.__setattr__(self, "_prefix", prefix)

    @classmethod
    def from_pairs(cls, values: Sequence[float], probabilities: Sequence[float]) -> "DiscreteAtoms":
        """Ordena y fusiona átomos repetidos sumando sus pesos."""
        values = np.asarray(values, dtype=float)
        probabilities = np.asarray(probabilities, dtype=float)
        if len(values) != len(probabilities):
            raise SpecValidationError("átomos y probabilidades de distinta longitud", path="total")
        unique, inverse = np.unique(values, return_inverse=True)
        merged = np.bincount(inverse, weights=probabilities, minlength=len(unique))
        return cls(values=unique, probabilities=merged)

    @classmethod
    def point_mass(cls, value: float) -> "DiscreteAtoms":
        return cls(values=(value,), probabilities=(1.0,))

    @classmethod
    def uniform_on(cls, values: Sequence[float]) -> "DiscreteAtoms":
        """Átomos equiprobables (con fusión de repetidos)."""
        return cls.from_pairs(values, np.full(len(values), 1.0 / len(values)))

    @property
    def lower(self) -> float:
        return self.values[0]

    @property
    def upper(self) -> float:
        return self.values[-1]

    @property
    def cumulative(self) -> np.ndarray:
        return self._cum

    def cdf(self, x):
        k = np.searchsorted(self.values, np.asarray(x, dtype=float), side="right")
        result = np.where(k > 0, self._cum[np.maximum(k - 1, 0)], 0.0)
        if np.ndim(x) == 0:
            return float(result)
        return result

    def quantiles(self, t):
        t_arr = np.asarray(t, dtype=float)
        idx = np.searchsorted(self._cum, t_arr - LEVEL_TOLERANCE, side="left")
        idx = np.clip(idx, 0, len(self.values) - 1)
        result = np.asarray(self.values)[idx]
        if np.ndim(t) == 0:
            return float(result)
        return result

    def _quantile_primitive(self, t: float) -> float:
        """I(t) = ∫_0^t VaR_s ds, exacta y continua en t."""
        t = min(max(t, 0.0), 1.0)
        k = int(np.clip(np.searchsorted(self._cum, t, side="left"), 0, len(self.values) - 1))
        start = self._cum[k - 1] if k > 0 else 0.0
        return float(self._prefix[k] + self.values[k] * (t - start))

    def integrated_quantile(self, a: float, b: float) -> float:
        if b <= a:
            return 0.0
        return self._quantile_primitive(b) - self._quantile_primitive(a)

    def integrated_survival(self, lo: float, hi: float) -> float:
        if hi <= lo:
            return 0.0
        clipped = np.clip(np.asarray(self.values), lo, hi) - lo
        return float(np.dot(clipped, self.probabilities))

    def expectation(self) -> float:
        return float(np.dot(self.values, self.probabilities))

    def atoms(self) -> np.ndarray:
        return np.asarray(self.values)

    def pushforward(self, fn: PiecewiseMonotoneFn) -> "DiscreteAtoms":
        return DiscreteAtoms.from_pairs(fn(np.asarray(self.values)), self.probabilities)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "type": "atoms",
            "values": list(self.values),
            "probs": list(self.probabilities),
        }


@dataclass(frozen=True)
class EmpiricalSample(DiscreteAtoms):
    """Muestra empírica ordenada; los empates se fusionan en los átomos."""

    observations: Tuple[float, ...] = ()

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "EmpiricalSample":
        ordered = np.sort(np.asarray(values, dtype=float))
        if len(ordered) == 0:
            raise SpecValidationError("la muestra empírica está vacía", path="total")
        unique, counts = np.unique(ordered, return_counts=True)
        return cls(
            values=unique,
            probabilities=counts / len(ordered),
            observations=tuple(float(v) for v in ordered),
        )

    @property
    def size(self) -> int:
        return len(self.observations)

    def to_dict(self) -> Dict[str, Any]:
        return {"type": "sample", "values": list(self.observations)}


# ============================================================================
# LEYES CONTINUAS PARAMÉTRICAS
# ============================================================================

class _ContinuousLaw(LossDistribution):
    """Base de las familias continuas con CDF estrictamente creciente en el soporte."""

    def atoms(self) -> np.ndarray:
        return np.zeros(0)

    def pushforward(self, fn: PiecewiseMonotoneFn) -> "LossDistribution":
        return TransformedContinuous(base=self, fn=fn)

    def sample_values(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return self.quantiles(1.0 - rng.random(n))


@dataclass(frozen=True)
class UniformContinuous(_ContinuousLaw):
    """Uniforme en [lower_bound, upper_bound]."""

    lower_bound: float
    upper_bound: float

    def __post_init__(self):
        if not self.lower_bound < self.upper_bound:
            raise SpecValidationError("la uniforme requiere lower < upper", path="total")

    @property
    def lower(self) -> float:
        return float(self.lower_bound)

    @property
    def upper(self) -> float:
        return float(self.upper_bound)

    @property
    def _width(self) -> float:
        return self.upper_bound - self.lower_bound

    def cdf(self, x):
        result = np.clip((np.asarray(x, dtype=float) - self.lower_bound) / self._width, 0.0, 1.0)
        if np.ndim(x) == 0:
            return float(result)
        return result

    def quantiles(self, t):
        result = self.lower_bound + self._width * np.asarray(t, dtype=float)
        if np.ndim(t) == 0:
            return float(result)
        return result

    def integrated_quantile(self, a: float, b: float) -> float:
        if b <= a:
            return 0.0
        return self.lower_bound * (b - a) + self._width * (b * b - a * a) / 2.0

    def integrated_survival(self, lo: float, hi: float) -> float:
        if hi <= lo:
            return 0.0
        a, b = self.lower_bound, self.upper_bound
        below = max(0.0, min(hi, a) - lo)
        u0, u1 = min(max(lo, a), b), min(max(hi, a), b)
        inside = ((b - u0) ** 2 - (b - u1) ** 2) / (2.0 * self._width)
        return below + inside

    def expectation(self) -> float:
        return (self.lower_bound + self.upper_bound) / 2.0

    def to_dict(self) -> Dict[str, Any]:
        return {"type": "uniform", "lower": self.lower_bound, "upper": self.upper_bound}


@dataclass(frozen=True)
class Exponential(_ContinuousLaw):
    """Exponencial de tasa `rate` sobre [0, ∞)."""

    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise SpecValidationError("la tasa exponencial debe ser > 0", path="total.rate")

    @property
    def lower(self) -> float:
        return 0.0

    @property
    def upper(self) -> float:
        return float("inf")

    def cdf(self, x):
        x_arr = np.asarray(x, dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            result = np.where(x_arr >= 0, -np.expm1(-self.rate * np.maximum(x_arr, 0.0)), 0.0)
        if np.ndim(x) == 0:
            return float(result)
        return result

    def quantiles(self, t):
        t_arr = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            result = -np.log1p(-t_arr) / self.rate
        if np.ndim(t) == 0:
            return float(result)
        return result

    @staticmethod
    def _primitive(t: float) -> float:
        # ∫_0^t −ln(1−s) ds
        return float(xlogy(1.0 - t, 1.0 - t) + t)

    def integrated_quantile(self, a: float, b: float) -> float:
        if b <= a:
            return 0.0
        return (self._primitive(b) - self._primitive(a)) / self.rate

    def integrated_survival(self, lo: float, hi: float) -> float:
        if hi <= lo:
            return 0.0
        below = max(0.0, min(hi, 0.0) - lo)
        lo_pos, hi_pos = max(lo, 0.0), max(hi, 0.0)
        return below + (np.exp(-self.rate * lo_pos) - np.exp(-self.rate * hi_pos)) / self.rate

    def expectation(self) -> float:
        return 1.0 / self.rate

    def to_dict(self) -> Dict[str, Any]:
        return {"type": "exponential", "rate": self.rate}


# ============================================================================
# TRANSFORMACIONES MONÓTONAS DE LEYES CONTINUAS
# ============================================================================

def _integrate_fn_of_quantile(
    base: _ContinuousLaw, fn: PiecewiseMonotoneFn, a: float, b: float
) -> float:
    """∫_a^b fn(VaR_t(base)) dt, exacta: fn es afín entre los niveles F(nodos)."""
    if b <= a:
        return 0.0
    levels = {a, b}
    for x in fn.xs:
        level = float(base.cdf(x))
        if a < level < b:
            levels.add(level)
    ordered = sorted(levels)
    total = 0.0
    for t0, t1 in zip(ordered[:-1], ordered[1:]):
        if t1 <= t0:
            continue
        y_mid = float(base.quantiles((t0 + t1) / 2.0))
        slope = fn.slope_right_of(y_mid)
        intercept = float(fn(y_mid)) - slope * y_mid
        total += intercept * (t1 - t0)
        if slope != 0.0:
            total += slope * base.integrated_quantile(t0, t1)
    return total


@dataclass(frozen=True)
class TransformedContinuous(LossDistribution):
    """Ley exacta de fn(X) con X continua y fn no decreciente lineal a trozos."""

    base: _ContinuousLaw
    fn: PiecewiseMonotoneFn

    def __post_init__(self):
        if isinstance(self.base, TransformedContinuous):
            object.__setattr__(self, "fn", self.fn.compose(self.base.fn))
            object.__setattr__(self, "base", self.base.base)
        if not isinstance(self.base, _ContinuousLaw):
            raise SpecValidationError("la base de una transformación debe ser continua", path="total")

    @property
    def lower(self) -> float:
        return float(self.fn(self.base.lower))

    @property
    def upper(self) -> float:
        return float(self.fn(self.base.upper))

    def cdf(self, x):
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        inverse = np.array([self.fn.upper_inverse(v) for v in x_arr])
        result = np.asarray(self.base.cdf(inverse), dtype=float)
        if np.ndim(x) == 0:
            return float(result[0])
        return result

    def quantiles(self, t):
        return self.fn(self.base.quantiles(t))

    def integrated_quantile(self, a: float, b: float) -> float:
        return _integrate_fn_of_quantile(self.base, self.fn, a, b)

    def integrated_survival(self, lo: float, hi: float) -> float:
        if hi <= lo:
            return 0.0
        clipped = PiecewiseMonotoneFn.clamp(lo, hi).compose(self.fn)
        return _integrate_fn_of_quantile(self.base, clipped, 0.0, 1.0) - lo

    def atoms(self) -> np.ndarray:
        found = []
        for start, end, value in self.fn.flat_segments():
            mass = float(self.base.cdf(end)) - float(self.base.cdf(start))
            if mass > PROBABILITY_TOLERANCE:
                found.append(value)
        return np.unique(np.asarray(found, dtype=float))

    def pushforward(self, fn: PiecewiseMonotoneFn) -> "TransformedContinuous":
        return TransformedContinuous(base=self.base, fn=fn.compose(self.fn))

    def sample_values(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return self.fn(self.base.sample_values(rng, n))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "type": "transformed",
            "base": self.base.to_dict(),
            "knots": [list(k) for k in self.fn.knots()],
            "tail_slope": self.fn.tail_slope,
        }


# ============================================================================
# FUNCIONES DE MÓDULO
# ============================================================================

def cdf(dist: LossDistribution, x: float) -> float:
    return dist.cdf(x)


def survival(dist: LossDistribution, x: float) -> float:
    return dist.survival(x)


def quantile(dist: LossDistribution, t: float) -> float:
    return dist.quantile(t)


def expectation(dist: LossDistribution) -> float:
    return dist.expectation()


def truncate(dist: LossDistribution, m: float) -> LossDistribution:
    return dist.truncate(m)


def pushforward(dist: LossDistribution, fn: PiecewiseMonotoneFn) -> LossDistribution:
    return dist.pushforward(fn)


def sample(dist: LossDistribution, n: int, seed: int) -> EmpiricalSample:
    return dist.sample(n, seed)


def from_dict(data: Dict[str, Any], path: str = "total") -> LossDistribution:
    """Construye una ley a partir de su descripción JSON."""
    if not isinstance(data, dict):
        raise SpecValidationError("se esperaba un objeto", path=path)
    kind = data.get("type")
    try:
        dist: LossDistribution
        if kind == "atoms":
            probs = data.get("probs")
            if probs is None:
                dist = DiscreteAtoms.uniform_on(data["values"])
            else:
                dist = DiscreteAtoms.from_pairs(data["values"], probs)
        elif kind == "sample":
            dist = EmpiricalSample.from_values(data["values"])
        elif kind == "point":
            dist = DiscreteAtoms.point_mass(float(data["value"]))
        elif kind == "uniform":
            dist = UniformContinuous(float(data["lower"]), float(data["upper"]))
        elif kind == "exponential":
            dist = Exponential(float(data["rate"]))
        elif kind == "csv":
            from .loaders import SampleLoader
            dist = SampleLoader.ingest_csv(data["path"])
        else:
            raise SpecValidationError(f"tipo de ley desconocido: {kind!r}", path=f"{path}.type")
    except KeyError as e:
        raise SpecValidationError(f"falta el campo {e.args[0]!r}", path=path) from e
    except (TypeError, ValueError) as e:
        if isinstance(e, SpecValidationError):
            raise
        raise SpecValidationError(str(e), path=path) from e

    cap: Optional[float] = data.get("cap")
    if cap is not None:
        dist = dist.truncate(float(cap))
    return dist


def parse_shorthand(text: str) -> LossDistribution:
    """Ley desde un identificador corto: exp:1, uniform:0:1, point:7, atoms:1,2,3,4."""
    name, _, rest = text.partition(":")
    args = [a for a in rest.split(":") if a]
    try:
        if name in ("exp", "exponential"):
            return Exponential(float(args[0]))
        if name == "uniform":
            return UniformContinuous(float(args[0]), float(args[1]))
        if name == "point":
            return DiscreteAtoms.point_mass(float(args[0]))
        if name == "atoms":
            return DiscreteAtoms.uniform_on([float(v) for v in args[0].split(",")])
    except (IndexError, ValueError) as e:
        raise SpecValidationError(f"identificador de ley inválido: {text!r}", path="total") from e
    raise SpecValidationError(f"identificador de ley desconocido: {text!r}", path="total")
