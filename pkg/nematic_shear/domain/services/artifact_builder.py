from __future__ import annotations
import json
import math
from typing import Any, Dict, Iterable, Mapping, Sequence

import numpy as np

FLOAT_FORMAT = "%.17g"


def format_value(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT % float(value)
    return str(value)


def build_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    lines = [",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise ValueError("fila CSV con un número de columnas distinto de la cabecera")
        lines.append(",".join(format_value(v) for v in row))
    return "\n".join(lines) + "\n"


def build_columns_csv(columns: Mapping[str, np.ndarray]) -> str:
    """CSV of equally long numeric columns, in mapping order."""
    names = list(columns)
    data = [np.asarray(columns[k], dtype=float) for k in names]
    sizes = {d.size for d in data}
    if len(sizes) > 1:
        raise ValueError("las columnas deben tener la misma longitud")
    return build_csv(names, zip(*data))


def plain(value: Any) -> Any:
    """JSON-ready copy: numpy scalars and arrays unwrapped, non-finite floats as null."""
    if isinstance(value, Mapping):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [plain(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        f = float(value)
        return f if math.isfinite(f) else None
    return value


def build_json(data: Dict[str, Any]) -> str:
    # repr of a float is the shortest string that reads back to the same double
    return json.dumps(plain(data), indent=2, sort_keys=True, ensure_ascii=False) + "\n"
