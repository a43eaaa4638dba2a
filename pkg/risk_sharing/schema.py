"""
JSON schema for risk-sharing problem specs.

Every input (spec file, CLI shorthand flags) converges to a ProblemSpec
before any computation runs. Validation errors carry the JSON field path.

    {
      "agents": [{"kernel": {"type": "var", "alpha": 0.6}, "lambda": 1.0},
                 {"kernel": "expectation"}],
      "total": {"type": "atoms", "values": [1, 2, 3, 4]},
      "options": {"cells": 4, "seed": 0, "tol": 1e-9, "trunc": [1, 5, 10]}
    }
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from .distortion import DistortionKernel, from_spec
from .distributions import LossDistribution, from_dict, parse_shorthand
from .errors import SpecValidationError
from .loaders import SampleLoader
from .models import AgentSpec, MarketProblem

# Known option keys and their expected types
OPTION_TYPES = {
    "cells": int,
    "seed": int,
    "tol": float,
    "trunc": list,
    "iters": int,
}


@dataclass
class ProblemSpec:
    """
    Canonical problem description.

    `agents` keeps the raw kernel specs next to the parsed kernels so the
    spec can be written back unchanged.
    """

    # === REQUIRED FIELDS ===
    agents: Tuple[AgentSpec, ...] = ()
    total: Optional[LossDistribution] = None

    # === OPTIONAL FIELDS ===
    options: Dict[str, Any] = field(default_factory=dict)
    raw_agents: List[Dict[str, Any]] = field(default_factory=list, repr=False)
    raw_total: Any = field(default=None, repr=False)

    def to_problem(self) -> MarketProblem:
        """Build the market problem (runs the domain checks)."""
        if self.total is None:
            raise SpecValidationError("falta el campo 'total'", path="total")
        return MarketProblem(agents=self.agents, total=self.total)

    @property
    def kernels(self) -> List[DistortionKernel]:
        return [a.kernel for a in self.agents]

    def option(self, key: str, default: Any = None) -> Any:
        return self.options.get(key, default)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        agents = self.raw_agents or [
            {"kernel": a.kernel.to_dict(), "lambda": a.weight} for a in self.agents
        ]
        total = self.raw_total if self.raw_total is not None else (
            self.total.to_dict() if self.total is not None else None
        )
        return {"agents": agents, "total": total, "options": dict(self.options)}

    def to_json(self) -> str:
        """Convert to JSON string."""
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ProblemSpec":
        """
        Create from dictionary, validating every field.

        Raises:
            SpecValidationError: with the path of the first offending field
        """
        if not isinstance(data, dict):
            raise SpecValidationError("la especificación debe ser un objeto JSON", path="$")

        raw_agents = data.get("agents")
        if not isinstance(raw_agents, list) or not raw_agents:
            raise SpecValidationError("se requiere una lista no vacía de agentes", path="agents")
        agents = tuple(_parse_agent(entry, f"agents[{i}]") for i, entry in enumerate(raw_agents))

        if "total" not in data:
            raise SpecValidationError("falta el campo 'total'", path="total")
        raw_total = data["total"]
        total = _parse_total(raw_total)

        options = _parse_options(data.get("options", {}))
        return cls(
            agents=agents,
            total=total,
            options=options,
            raw_agents=list(raw_agents),
            raw_total=raw_total,
        )

    @classmethod
    def from_json(cls, json_str: str) -> "ProblemSpec":
        """Create from JSON string."""
        try:
            data = json.loads(json_str)
        except json.JSONDecodeError as e:
            raise SpecValidationError(f"JSON inválido ({e.msg})", row=e.lineno) from e
        return cls.from_dict(data)

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ProblemSpec":
        """Load a spec file; relative CSV paths resolve against the spec's folder."""
        return cls.from_dict(SampleLoader.load_spec(path))


def _parse_agent(entry: Any, path: str) -> AgentSpec:
    if not isinstance(entry, dict):
        raise SpecValidationError("cada agente debe ser un objeto", path=path)
    if "kernel" not in entry:
        raise SpecValidationError("falta el campo 'kernel'", path=path)
    kernel = from_spec(entry["kernel"], path=f"{path}.kernel")
    weight = entry.get("lambda", 1.0)
    if isinstance(weight, bool) or not isinstance(weight, (int, float)) or not weight > 0:
        raise SpecValidationError(f"lambda debe ser un número > 0, recibido: {weight!r}", path=f"{path}.lambda")
    return AgentSpec(kernel=kernel, weight=float(weight))


def _parse_total(raw: Any) -> LossDistribution:
    if isinstance(raw, str):
        if raw.endswith(".csv"):
            return SampleLoader.ingest_csv(raw)
        return parse_shorthand(raw)
    return from_dict(raw, path="total")


def _parse_options(raw: Any) -> Dict[str, Any]:
    if not isinstance(raw, dict):
        raise SpecValidationError("options debe ser un objeto", path="options")
    options: Dict[str, Any] = {}
    for key, value in raw.items():
        expected = OPTION_TYPES.get(key)
        if expected is None:
            raise SpecValidationError(f"opción desconocida: {key!r}", path=f"options.{key}")
        if expected is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if isinstance(value, bool) or not isinstance(value, expected):
            raise SpecValidationError(
                f"se esperaba {expected.__name__}, recibido: {value!r}", path=f"options.{key}"
            )
        if key == "trunc" and not all(
            isinstance(m, (int, float)) and not isinstance(m, bool) for m in value
        ):
            raise SpecValidationError("trunc debe ser una lista de números", path="options.trunc")
        options[key] = value
    return options


def spec_from_flags(kernels: List[str], total: str, weights: Optional[List[float]] = None) -> ProblemSpec:
    """Spec from CLI shorthands (`--kernel var:0.6 --kernel expectation --total atoms:1,2,3,4`)."""
    weights = weights or [1.0] * len(kernels)
    if len(weights) != len(kernels):
        raise SpecValidationError("un --lambda por --kernel", path="lambda")
    return ProblemSpec.from_dict({
        "agents": [{"kernel": k, "lambda": w} for k, w in zip(kernels, weights)],
        "total": total,
    })
