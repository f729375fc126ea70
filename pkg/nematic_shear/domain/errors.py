from __future__ import annotations
from typing import Optional, Tuple


class NematicShearError(Exception):
    """Base de todos los fallos del laboratorio."""


class ConfigError(NematicShearError, ValueError):
    pass


class RangeError(NematicShearError, ValueError):
    pass


class PoleError(NematicShearError, ValueError):
    def __init__(self, message: str, beta: float, pole: float):
        super().__init__(message)
        self.beta = beta
        self.pole = pole


class NoRootError(NematicShearError, ValueError):
    pass


class ProfileError(NematicShearError, ValueError):
    pass


class QuadratureError(NematicShearError, RuntimeError):
    def __init__(self, message: str, interval: Optional[Tuple[float, float]] = None):
        if interval is not None:
            message = f"{message} (intervalo [{interval[0]:.17g}, {interval[1]:.17g}])"
        super().__init__(message)
        self.interval = interval


class ConvergenceError(NematicShearError, RuntimeError):
    pass


class IntegrationError(NematicShearError, RuntimeError):
    pass


class DegenerateError(NematicShearError, RuntimeError):
    pass


class EvolutionError(NematicShearError, RuntimeError):
    pass
