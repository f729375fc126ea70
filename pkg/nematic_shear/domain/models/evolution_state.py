from __future__ import annotations
from dataclasses import dataclass, asdict, replace
from typing import Dict, Any, Optional, Tuple

import numpy as np

from .stationary_profile import StationaryProfile

NONLINEAR = "nonlinear"
LINEARIZED = "linearized"


@dataclass(frozen=True)
class EvolutionState:
    """Snapshot of (u, theta) or (U, Theta) on the grid at time t."""
    t: float
    x: np.ndarray
    first: np.ndarray
    second: np.ndarray
    dt: float
    kind: str = NONLINEAR
    energy_trace: Tuple[Tuple[float, float], ...] = ()
    background: Optional[StationaryProfile] = None

    @property
    def u(self) -> np.ndarray:
        return self.first

    @property
    def theta(self) -> np.ndarray:
        return self.second

    def advanced(self, t: float, first: np.ndarray, second: np.ndarray, dt: float,
                 energy: Optional[float] = None) -> "EvolutionState":
        trace = self.energy_trace + (((t, energy),) if energy is not None else ())
        return replace(self, t=t, first=first, second=second, dt=dt, energy_trace=trace)


@dataclass(frozen=True)
class DecayReport:
    ubar: float
    beta: float
    b: float
    eps: float
    L_fit: float
    r1: float
    r2: float
    r3: float
    passed: bool
    seed: int
    monotone: bool
    T: float

    @property
    def rate_bound(self) -> float:
        return min(self.r1, self.r2, self.r3)

    def to_dict(self) -> Dict[str, Any]:
        d = asdict(self)
        d["rate_bound"] = self.rate_bound
        return d


@dataclass(frozen=True)
class SmallUbarBounds:
    ubar: float
    max_ux: float
    max_theta_x: float
    max_theta_xx: float
    argmax_theta_x: float

    @property
    def ratios(self) -> Tuple[float, float, float]:
        return (self.max_ux / self.ubar, self.max_theta_x / self.ubar, self.max_theta_xx / self.ubar)

    def to_dict(self) -> Dict[str, Any]:
        d = asdict(self)
        d["ratios"] = list(self.ratios)
        return d
