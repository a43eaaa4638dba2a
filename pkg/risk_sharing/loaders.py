"""
Loaders de muestras de pérdidas.
Centraliza la lectura de CSV y de especificaciones en disco.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np
import pandas as pd

from .errors import SpecValidationError

logger = logging.getLogger(__name__)


class SampleLoader:
    """
    Factory para cargar muestras empíricas y especificaciones JSON.

    Formato CSV: cabecera `loss`, un real por fila, UTF-8, separador decimal `.`.
    """

    COLUMN = "loss"

    @classmethod
    def ingest_csv(cls, path: Union[str, Path]):
        """
        Lee una muestra de pérdidas y la devuelve ordenada.

        Args:
            path: Ruta al CSV

        Returns:
            EmpiricalSample con las observaciones ordenadas

        Raises:
            SpecValidationError: archivo vacío, cabecera ausente o fila no numérica
        """
        from .distributions import EmpiricalSample

        path = Path(path)
        if not path.exists():
            raise SpecValidationError(f"no existe el archivo {path}", path="total.path")

        try:
            frame = pd.read_csv(path, dtype=str, skip_blank_lines=True, encoding="utf-8")
        except pd.errors.EmptyDataError as e:
            raise SpecValidationError(f"archivo vacío: {path}", row=1) from e
        except pd.errors.ParserError as e:
            raise SpecValidationError(f"CSV mal formado: {e}", path="total.path") from e

        if list(frame.columns) != [cls.COLUMN]:
            raise SpecValidationError(
                f"se esperaba una única columna '{cls.COLUMN}', encontradas: {list(frame.columns)}",
                row=1,
            )
        if frame.empty:
            raise SpecValidationError(f"el archivo {path} no contiene filas de datos", row=2)

        raw = frame[cls.COLUMN]
        values = pd.to_numeric(raw.str.strip(), errors="coerce")
        bad = values.isna() | ~np.isfinite(values.fillna(0.0))
        if bad.any():
            position = int(np.flatnonzero(bad.to_numpy())[0])
            # Fila 1 es la cabecera
            raise SpecValidationError(
                f"valor no numérico {raw.iloc[position]!r}", row=position + 2
            )

        logger.debug(f"Leídas {len(values)} pérdidas de {path}")
        return EmpiricalSample.from_values(values.to_numpy(dtype=float))

    @classmethod
    def load_spec(cls, path: Union[str, Path]) -> Dict[str, Any]:
        """Lee un JSON de especificación; las rutas CSV se resuelven relativas al archivo."""
        path = Path(path)
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except FileNotFoundError as e:
            raise SpecValidationError(f"no existe el archivo {path}", path="spec") from e
        except json.JSONDecodeError as e:
            raise SpecValidationError(f"JSON inválido ({e.msg})", row=e.lineno) from e

        total = data.get("total") if isinstance(data, dict) else None
        if isinstance(total, dict) and total.get("type") == "csv" and "path" in total:
            csv_path = Path(total["path"])
            if not csv_path.is_absolute():
                total["path"] = str(path.parent / csv_path)
        return data
