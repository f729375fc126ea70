from __future__ import annotations
from dataclasses import dataclass
from typing import Dict, Any

import numpy as np


@dataclass(frozen=True)
class StationaryProfile:
    x: np.ndarray
    u: np.ndarray
    theta: np.ndarray
    eta: np.ndarray
    p0: float
    beta: float
    theta_tilde: float
    ubar: float

    @property
    def N(self) -> int:
        return int(self.x.size)

    @property
    def mid(self) -> int:
        return self.N // 2

    def metadata(self) -> Dict[str, Any]:
        return {
            "beta": self.beta,
            "theta_tilde": self.theta_tilde,
            "p0": self.p0,
            "ubar": self.ubar,
            "N": self.N,
        }

    def columns(self) -> Dict[str, np.ndarray]:
        return {"x": self.x, "u": self.u, "theta": self.theta, "eta": self.eta}
