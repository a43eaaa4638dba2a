"""
Salida determinista de informes.

JSON: claves en orden de inserción, números con la representación más corta
que reproduce el float (nunca más de 17 dígitos significativos), ±inf como
cadenas. CSV: psi.csv, alloc_<i>.csv y selector.csv.
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, TextIO

import numpy as np
import pandas as pd

from .allocation import layer_table
from .models import (
    AgentSpec,
    BoundednessReport,
    ComonotoneAllocation,
    FeasibilityReport,
    LevelSelector,
    RegularityReport,
)
from .piecewise import LevelCurve

logger = logging.getLogger(__name__)


# ============================================================================
# JSON
# ============================================================================

def _plain(value: Any) -> Any:
    """Convierte tipos numpy, tuplas y no finitos a valores JSON estables."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        # -0.0 y 0.0 se imprimen igual
        return value + 0.0
    return value


def format_json(payload: Dict[str, Any]) -> str:
    return json.dumps(_plain(payload), indent=2, ensure_ascii=False, allow_nan=False)


def emit_json(payload: Dict[str, Any], stream: TextIO) -> None:
    stream.write(format_json(payload))
    stream.write("\n")


# ============================================================================
# CONSTRUCTORES DE INFORMES
# ============================================================================

def agents_summary(agents: Sequence[AgentSpec]) -> List[Dict[str, Any]]:
    return [{"kernel": str(a.kernel), "lambda": a.weight} for a in agents]


def regularity_payload(report: Optional[RegularityReport]) -> Optional[Dict[str, Any]]:
    if report is None:
        return None
    return {
        "levels": list(report.levels),
        "gaps": list(report.gaps),
        "tolerance": report.tolerance,
        "pass": report.passed,
    }


def allocation_payload(
    agents: Sequence[AgentSpec],
    selector: LevelSelector,
    allocation: ComonotoneAllocation,
    value: float,
    risks: Sequence[float],
) -> Dict[str, Any]:
    return {
        "command": "allocate",
        "agents": agents_summary(agents),
        "value": value,
        "selector": {
            "breakpoints": list(selector.breakpoints),
            "winners": [w + 1 for w in selector.winners],
            "tie_regions": [list(r) for r in selector.tie_regions],
        },
        "allocation": [
            {
                "agent": i + 1,
                "knots": [list(p) for p in f.knots()],
                "tail_slope": f.tail_slope,
                "risk": risks[i],
                "weighted_risk": agents[i].weight * risks[i],
            }
            for i, f in enumerate(allocation.components)
        ],
        "layers": [
            {
                "agent": layer.agent + 1,
                "attachment": layer.attachment,
                "exhaustion": layer.exhaustion,
                "share": layer.share,
            }
            for layer in layer_table(allocation)
        ],
    }


def feasibility_payload(report: Optional[FeasibilityReport]) -> Optional[Dict[str, Any]]:
    if report is None:
        return None
    return {
        "feasible": report.feasible,
        "point": None if report.point is None else list(report.point),
        "slack": report.slack,
        "violated": list(report.violated),
    }


def bounded_payload(agents: Sequence[AgentSpec], report: BoundednessReport) -> Dict[str, Any]:
    return {
        "command": "bounded",
        "agents": agents_summary(agents),
        "status": report.status.value,
        "support_value": report.support_value,
        "feasibility": feasibility_payload(report.feasibility),
        "certificate": None if report.certificate is None else report.certificate.to_dict(),
        "note": report.note,
    }


# ============================================================================
# CSV
# ============================================================================

def _curve_frame(curve: LevelCurve, column: str) -> pd.DataFrame:
    t, v = zip(*curve.points())
    return pd.DataFrame({"t": t, column: v})


def _allocation_grid(allocation: ComonotoneAllocation) -> np.ndarray:
    knots = sorted({0.0} | {x for f in allocation.components for x in f.xs if x >= 0.0})
    end = knots[-1] + max(1.0, knots[-1])
    return np.array(knots + [end])


def write_csv_outputs(
    directory: Path,
    psi: LevelCurve,
    selector: LevelSelector,
    allocation: ComonotoneAllocation,
) -> List[Path]:
    """Escribe los datos de los gráficos; devuelve las rutas creadas."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []

    path = directory / "psi.csv"
    _curve_frame(psi, "psi").to_csv(path, index=False)
    written.append(path)

    xs = _allocation_grid(allocation)
    for i, f in enumerate(allocation.components):
        path = directory / f"alloc_{i + 1}.csv"
        pd.DataFrame({"x": xs, f"f{i + 1}": f(xs)}).to_csv(path, index=False)
        written.append(path)

    rows = [(b, w + 1) for b, w in zip(selector.breakpoints[:-1], selector.winners)]
    rows.append((selector.breakpoints[-1], selector.winners[-1] + 1))
    path = directory / "selector.csv"
    pd.DataFrame(rows, columns=["t", "winner"]).to_csv(path, index=False)
    written.append(path)

    logger.info(f"CSV escritos en {directory}: {len(written)} archivos")
    return written
