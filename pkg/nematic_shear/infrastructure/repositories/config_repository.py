from __future__ import annotations
import json
import logging
from typing import Any, Dict, Optional

from nematic_shear.domain.errors import ConfigError
from nematic_shear.domain.models import RunConfig
from nematic_shear.domain.validation import validate_config

logger = logging.getLogger(__name__)

SECTIONS = ("material", "solver", "windows", "evolution", "output")


def parse_config(text: str, source: str = "<texto>") -> RunConfig:
    try:
        data: Dict[str, Any] = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"JSON mal formado en {source}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: la configuración debe ser un objeto JSON")
    for key in data:
        if key not in SECTIONS:
            logger.warning("%s: bloque desconocido '%s' ignorado", source, key)
    try:
        config = RunConfig.from_dict(data)
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"{source}: valores inválidos ({exc})") from exc
    return validate_config(config)


def load_config(path: Optional[str]) -> RunConfig:
    """Read a JSON run configuration; no path means the built-in defaults."""
    if not path:
        return validate_config(RunConfig())
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise ConfigError(f"no se pudo leer la configuración {path}: {exc}") from exc
    return parse_config(text, path)
