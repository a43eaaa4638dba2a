"""
Funciones lineales a trozos compartidas por los módulos de cálculo.

- PiecewiseMonotoneFn: función no decreciente en el espacio de pérdidas
  (componentes de asignación, truncamientos, transformaciones monótonas).
- LevelCurve: función càdlàg lineal a trozos con saltos sobre [0,1]
  (núcleos de distorsión, pesos λᵢ(1−Φᵢ), la envolvente Ψ).

Todas las operaciones son exactas sobre los nodos: no hay cuadratura.
"""

from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from .constants import LEVEL_TOLERANCE
from .errors import SpecValidationError

# Tolerancia de monotonía al validar nodos
_MONOTONE_TOLERANCE = 1e-12


def _as_tuple(values) -> Tuple[float, ...]:
    return tuple(float(v) for v in values)


# ============================================================================
# FUNCIONES MONÓTONAS EN EL ESPACIO DE PÉRDIDAS
# ============================================================================

@dataclass(frozen=True)
class PiecewiseMonotoneFn:
    """
    Función continua, no decreciente y lineal a trozos.

    Entre nodos interpola linealmente; a la derecha del último nodo se
    extiende con `tail_slope` y a la izquierda del primero con `head_slope`.
    """

    xs: Tuple[float, ...]
    ys: Tuple[float, ...]
    tail_slope: float = 1.0
    head_slope: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "xs", _as_tuple(self.xs))
        object.__setattr__(self, "ys", _as_tuple(self.ys))
        object.__setattr__(self, "tail_slope", float(self.tail_slope))
        object.__setattr__(self, "head_slope", float(self.head_slope))

        if not self.xs or len(self.xs) != len(self.ys):
            raise SpecValidationError("se requieren nodos (x, y) de igual longitud", path="knots")
        if any(b <= a for a, b in zip(self.xs, self.xs[1:])):
            raise SpecValidationError("las abscisas deben ser estrictamente crecientes", path="knots")
        if any(b < a - _MONOTONE_TOLERANCE for a, b in zip(self.ys, self.ys[1:])):
            raise SpecValidationError("la función debe ser no decreciente", path="knots")
        if self.tail_slope < 0 or self.head_slope < 0:
            raise SpecValidationError("las pendientes de extrapolación deben ser >= 0", path="slope")

    # ------------------------------------------------------------------
    # Constructores
    # ------------------------------------------------------------------

    @classmethod
    def identity(cls) -> "PiecewiseMonotoneFn":
        return cls(xs=(0.0,), ys=(0.0,), tail_slope=1.0, head_slope=1.0)

    @classmethod
    def zero(cls) -> "PiecewiseMonotoneFn":
        return cls(xs=(0.0,), ys=(0.0,), tail_slope=0.0, head_slope=0.0)

    @classmethod
    def linear(cls, slope: float, intercept: float = 0.0) -> "PiecewiseMonotoneFn":
        """f(x) = intercept + slope·x."""
        return cls(xs=(0.0,), ys=(intercept,), tail_slope=slope, head_slope=slope)

    @classmethod
    def clamp(cls, lower: float, upper: float = float("inf")) -> "PiecewiseMonotoneFn":
        """f(x) = min(max(x, lower), upper)."""
        if upper == float("inf"):
            return cls(xs=(lower,), ys=(lower,), tail_slope=1.0, head_slope=0.0)
        if upper < lower:
            raise SpecValidationError("clamp requiere lower <= upper")
        if upper == lower:
            return cls(xs=(lower,), ys=(lower,), tail_slope=0.0, head_slope=0.0)
        return cls(xs=(lower, upper), ys=(lower, upper), tail_slope=0.0, head_slope=0.0)

    @classmethod
    def cap(cls, level: float, start: float = 0.0) -> "PiecewiseMonotoneFn":
        """f(x) = min(x, level) en x >= start (pendiente 1 antes del tope)."""
        if level <= start:
            return cls(xs=(level,), ys=(level,), tail_slope=0.0, head_slope=1.0)
        return cls(xs=(start, level), ys=(start, level), tail_slope=0.0, head_slope=1.0)

    # ------------------------------------------------------------------
    # Evaluación
    # ------------------------------------------------------------------

    @property
    def segment_slopes(self) -> np.ndarray:
        xs = np.asarray(self.xs)
        ys = np.asarray(self.ys)
        if len(xs) < 2:
            return np.zeros(0)
        return np.diff(ys) / np.diff(xs)

    def __call__(self, x):
        x_arr = np.asarray(x, dtype=float)
        xs = np.asarray(self.xs)
        ys = np.asarray(self.ys)
        with np.errstate(invalid="ignore"):
            result = np.interp(x_arr, xs, ys)
            above = x_arr > xs[-1]
            below = x_arr < xs[0]
            tail = ys[-1] + self.tail_slope * (x_arr - xs[-1])
            head = ys[0] - self.head_slope * (xs[0] - x_arr)
        # Pendiente nula en los extremos: evita inf·0
        if self.tail_slope == 0.0:
            tail = np.full_like(x_arr, ys[-1])
        if self.head_slope == 0.0:
            head = np.full_like(x_arr, ys[0])
        result = np.where(above, tail, np.where(below, head, result))
        if np.ndim(x) == 0:
            return float(result)
        return result

    def slope_right_of(self, x: float) -> float:
        """Pendiente en (x, x+ε)."""
        if x < self.xs[0]:
            return self.head_slope
        if x >= self.xs[-1]:
            return self.tail_slope
        j = int(np.searchsorted(self.xs, x, side="right")) - 1
        return float(self.segment_slopes[j])

    def slope_left_of(self, x: float) -> float:
        """Pendiente en (x−ε, x)."""
        if x <= self.xs[0]:
            return self.head_slope
        if x > self.xs[-1]:
            return self.tail_slope
        j = int(np.searchsorted(self.xs, x, side="left")) - 1
        return float(self.segment_slopes[j])

    def upper_inverse(self, y: float) -> float:
        """sup{x : f(x) <= y}; ±inf cuando el conjunto es vacío o no acotado."""
        xs, ys = self.xs, self.ys
        if y >= ys[-1]:
            if self.tail_slope == 0.0:
                return float("inf")
            return xs[-1] + (y - ys[-1]) / self.tail_slope
        if y < ys[0]:
            if self.head_slope == 0.0:
                return float("-inf")
            return xs[0] - (ys[0] - y) / self.head_slope
        j = int(np.searchsorted(ys, y, side="right")) - 1
        return xs[j] + (y - ys[j]) / (ys[j + 1] - ys[j]) * (xs[j + 1] - xs[j])

    def preimages(self, y: float) -> List[float]:
        """Puntos x donde la parte estrictamente creciente de f vale y."""
        xs, ys = self.xs, self.ys
        points = []
        if y < ys[0] and self.head_slope > 0:
            points.append(xs[0] - (ys[0] - y) / self.head_slope)
        for j in range(len(xs) - 1):
            if ys[j] < y < ys[j + 1]:
                points.append(xs[j] + (y - ys[j]) / (ys[j + 1] - ys[j]) * (xs[j + 1] - xs[j]))
        if y > ys[-1] and self.tail_slope > 0:
            points.append(xs[-1] + (y - ys[-1]) / self.tail_slope)
        return points

    def flat_segments(self) -> Iterator[Tuple[float, float, float]]:
        """Tramos constantes (inicio, fin, valor), incluidos los extremos infinitos."""
        if self.head_slope == 0.0:
            yield float("-inf"), self.xs[0], self.ys[0]
        for j in range(len(self.xs) - 1):
            if self.ys[j + 1] - self.ys[j] <= _MONOTONE_TOLERANCE:
                yield self.xs[j], self.xs[j + 1], self.ys[j]
        if self.tail_slope == 0.0:
            yield self.xs[-1], float("inf"), self.ys[-1]

    # ------------------------------------------------------------------
    # Álgebra
    # ------------------------------------------------------------------

    def compose(self, inner: "PiecewiseMonotoneFn") -> "PiecewiseMonotoneFn":
        """Devuelve self ∘ inner, exacta."""
        candidates = set(inner.xs)
        for y in self.xs:
            candidates.update(inner.preimages(y))
        xs = np.array(sorted(candidates))
        ys = self(inner(xs))
        ys = np.maximum.accumulate(ys)
        tail = inner.tail_slope * self.slope_right_of(float(inner(xs[-1])))
        head = inner.head_slope * self.slope_left_of(float(inner(xs[0])))
        return PiecewiseMonotoneFn(xs=xs, ys=ys, tail_slope=tail, head_slope=head).simplified()

    def __add__(self, other: "PiecewiseMonotoneFn") -> "PiecewiseMonotoneFn":
        xs = np.array(sorted(set(self.xs) | set(other.xs)))
        return PiecewiseMonotoneFn(
            xs=xs,
            ys=self(xs) + other(xs),
            tail_slope=self.tail_slope + other.tail_slope,
            head_slope=self.head_slope + other.head_slope,
        )

    def scaled(self, factor: float) -> "PiecewiseMonotoneFn":
        if factor < 0:
            raise SpecValidationError("el factor de escala debe ser >= 0")
        return PiecewiseMonotoneFn(
            xs=self.xs,
            ys=[factor * y for y in self.ys],
            tail_slope=factor * self.tail_slope,
            head_slope=factor * self.head_slope,
        )

    def complement(self) -> "PiecewiseMonotoneFn":
        """id − f; válido sólo si f es 1-Lipschitz."""
        slopes = self.segment_slopes
        if (
            np.any(slopes > 1 + _MONOTONE_TOLERANCE)
            or self.tail_slope > 1 + _MONOTONE_TOLERANCE
            or self.head_slope > 1 + _MONOTONE_TOLERANCE
        ):
            raise SpecValidationError("id − f no es monótona: f no es 1-Lipschitz")
        return PiecewiseMonotoneFn(
            xs=self.xs,
            ys=[x - y for x, y in zip(self.xs, self.ys)],
            tail_slope=max(0.0, 1.0 - self.tail_slope),
            head_slope=max(0.0, 1.0 - self.head_slope),
        )

    def simplified(self, tol: float = 1e-12) -> "PiecewiseMonotoneFn":
        """Elimina nodos interiores colineales."""
        xs, ys = list(self.xs), list(self.ys)
        if len(xs) < 2:
            return self
        slopes = [self.head_slope] + list(self.segment_slopes) + [self.tail_slope]
        keep = [
            i for i in range(len(xs))
            if abs(slopes[i] - slopes[i + 1]) > tol
        ]
        if not keep:
            keep = [0]
        return PiecewiseMonotoneFn(
            xs=[xs[i] for i in keep],
            ys=[ys[i] for i in keep],
            tail_slope=self.tail_slope,
            head_slope=self.head_slope,
        )

    # ------------------------------------------------------------------
    # Propiedades de componente de asignación
    # ------------------------------------------------------------------

    def is_allocation_component(self, tol: float = 1e-9) -> bool:
        """f(0)=0, no decreciente y 1-Lipschitz en [0, ∞)."""
        if abs(self(0.0)) > tol:
            return False
        slopes = [
            s for s, a in zip(self.segment_slopes, self.xs[1:]) if a > 0
        ] + [self.tail_slope]
        if self.xs[0] > 0:
            slopes.append(self.head_slope)
        return all(-tol <= s <= 1 + tol for s in slopes)

    def knots(self) -> List[Tuple[float, float]]:
        return list(zip(self.xs, self.ys))


# ============================================================================
# CURVAS DE NIVEL SOBRE [0,1]
# ============================================================================

def _merge_levels(levels: Sequence[float]) -> np.ndarray:
    """Ordena y fusiona niveles a distancia menor que la tolerancia."""
    ordered = np.unique(np.clip(np.asarray(levels, dtype=float), 0.0, 1.0))
    merged = [ordered[0]]
    for t in ordered[1:]:
        if t - merged[-1] > LEVEL_TOLERANCE:
            merged.append(t)
        elif t == 1.0:
            merged[-1] = 1.0
    return np.array(merged)


@dataclass(frozen=True)
class LevelCurve:
    """
    Función càdlàg sobre [0,1], lineal entre nodos y con saltos en ellos.

    En el nodo t_j vale `right[j]`; su límite por la izquierda es `left[j]`.
    En [t_j, t_{j+1}) interpola de right[j] a left[j+1].
    """

    knots: Tuple[float, ...]
    left: Tuple[float, ...]
    right: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "knots", _as_tuple(self.knots))
        object.__setattr__(self, "left", _as_tuple(self.left))
        object.__setattr__(self, "right", _as_tuple(self.right))
        if not (len(self.knots) == len(self.left) == len(self.right)) or len(self.knots) < 2:
            raise SpecValidationError("una curva de nivel requiere >= 2 nodos consistentes", path="knots")
        if self.knots[0] != 0.0 or self.knots[-1] != 1.0:
            raise SpecValidationError("los nodos deben empezar en 0 y terminar en 1", path="knots")
        if any(b <= a for a, b in zip(self.knots, self.knots[1:])):
            raise SpecValidationError("los nodos deben ser estrictamente crecientes", path="knots")

    # ------------------------------------------------------------------
    # Evaluación
    # ------------------------------------------------------------------

    @property
    def slopes(self) -> np.ndarray:
        knots = np.asarray(self.knots)
        return (np.asarray(self.left[1:]) - np.asarray(self.right[:-1])) / np.diff(knots)

    @property
    def jumps(self) -> np.ndarray:
        return np.asarray(self.right) - np.asarray(self.left)

    def __call__(self, t):
        t_arr = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
        knots = np.asarray(self.knots)
        right = np.asarray(self.right)
        last = len(knots) - 1
        idx = np.clip(np.searchsorted(knots, t_arr, side="right") - 1, 0, last)
        seg = np.minimum(idx, last - 1)
        value = right[seg] + self.slopes[seg] * (t_arr - knots[seg])
        value = np.where(idx == last, right[last], value)
        if np.ndim(t) == 0:
            return float(value)
        return value

    def left_limit(self, t):
        """Límite por la izquierda; en t=0 devuelve el valor en 0."""
        t_arr = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
        knots = np.asarray(self.knots)
        right = np.asarray(self.right)
        seg = np.clip(np.searchsorted(knots, t_arr, side="left") - 1, 0, len(knots) - 2)
        value = right[seg] + self.slopes[seg] * (t_arr - knots[seg])
        value = np.where(t_arr <= 0.0, right[0], value)
        if np.ndim(t) == 0:
            return float(value)
        return value

    def pieces(self) -> Iterator[Tuple[float, float, float, float]]:
        """Tramos (t_j, t_{j+1}, valor en t_j, pendiente)."""
        for j, slope in enumerate(self.slopes):
            yield self.knots[j], self.knots[j + 1], self.right[j], float(slope)

    # ------------------------------------------------------------------
    # Álgebra
    # ------------------------------------------------------------------

    def affine(self, offset: float, factor: float) -> "LevelCurve":
        """offset + factor·curva."""
        return LevelCurve(
            knots=self.knots,
            left=[offset + factor * v for v in self.left],
            right=[offset + factor * v for v in self.right],
        )

    def simplified(self, tol: float = 1e-12) -> "LevelCurve":
        """Elimina nodos interiores sin salto y con pendientes iguales."""
        slopes = self.slopes
        keep = [0]
        for j in range(1, len(self.knots) - 1):
            has_jump = abs(self.right[j] - self.left[j]) > tol
            bends = abs(slopes[j - 1] - slopes[j]) > tol
            if has_jump or bends:
                keep.append(j)
        keep.append(len(self.knots) - 1)
        return LevelCurve(
            knots=[self.knots[i] for i in keep],
            left=[self.left[i] for i in keep],
            right=[self.right[i] for i in keep],
        )

    def is_close(self, other: "LevelCurve", tol: float = 1e-12) -> bool:
        """Igualdad funcional: compara valores y límites en la unión de nodos."""
        grid = _merge_levels(list(self.knots) + list(other.knots))
        mids = (grid[:-1] + grid[1:]) / 2
        return bool(
            np.allclose(self(grid), other(grid), atol=tol, rtol=0)
            and np.allclose(self.left_limit(grid), other.left_limit(grid), atol=tol, rtol=0)
            and np.allclose(self(mids), other(mids), atol=tol, rtol=0)
        )

    def points(self) -> List[Tuple[float, float]]:
        """Pares (t, valor) para trazar, duplicando nodos con salto."""
        out = []
        for t, lv, rv in zip(self.knots, self.left, self.right):
            if abs(rv - lv) > 0:
                out.append((t, lv))
            out.append((t, rv))
        return out


def crossing_levels(curves: Sequence[LevelCurve]) -> np.ndarray:
    """
    Nodos comunes de varias curvas más los cruces interiores entre pares.

    Entre dos niveles consecutivos del resultado el orden relativo de las
    curvas es constante, lo que permite envolventes y selectores exactos.
    """
    levels = _merge_levels([t for c in curves for t in c.knots])
    extra = []
    for a, b in zip(levels[:-1], levels[1:]):
        starts = [c(a) for c in curves]
        ends = [c.left_limit(b) for c in curves]
        for i, j in combinations(range(len(curves)), 2):
            d0 = starts[i] - starts[j]
            d1 = ends[i] - ends[j]
            if d0 * d1 < 0:
                extra.append(a + (b - a) * d0 / (d0 - d1))
    if extra:
        levels = _merge_levels(list(levels) + extra)
    return levels


def envelope(curves: Sequence[LevelCurve], kind: str = "max") -> LevelCurve:
    """Envolvente superior ("max") o inferior ("min") exacta."""
    if not curves:
        raise SpecValidationError("la envolvente requiere al menos una curva")
    if kind not in ("max", "min"):
        raise ValueError(f"kind debe ser 'max' o 'min', recibido: {kind}")
    pick = np.max if kind == "max" else np.min
    levels = crossing_levels(curves)
    right = pick(np.vstack([c(levels) for c in curves]), axis=0)
    left = pick(np.vstack([c.left_limit(levels) for c in curves]), axis=0)
    left[0] = right[0]
    return LevelCurve(knots=levels, left=left, right=right).simplified()


__all__ = [
    "PiecewiseMonotoneFn",
    "LevelCurve",
    "crossing_levels",
    "envelope",
]

