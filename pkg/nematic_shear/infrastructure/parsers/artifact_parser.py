from __future__ import annotations
import json
from typing import Any, Dict, List, Tuple

import numpy as np


def parse_csv(text: str) -> Tuple[List[str], List[List[str]]]:
    lines = [ln for ln in (text or "").splitlines() if ln.strip()]
    if not lines:
        return [], []
    header = lines[0].split(",")
    rows = [ln.split(",") for ln in lines[1:]]
    for row in rows:
        if len(row) != len(header):
            raise ValueError("fila CSV con un número de columnas distinto de la cabecera")
    return header, rows


def parse_columns(text: str) -> Dict[str, np.ndarray]:
    """Numeric CSV into named float columns."""
    header, rows = parse_csv(text)
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return {name: data[:, k] for k, name in enumerate(header)}


def parse_json(text: str) -> Dict[str, Any]:
    return json.loads(text)
