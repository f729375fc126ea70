from __future__ import annotations
from dataclasses import dataclass, field, asdict
from typing import List, Dict, Any, Tuple

import numpy as np


@dataclass(frozen=True)
class EvansEvaluation:
    lam: float
    beta: float
    E: float
    x_residual: float
    checkpoints: Tuple[Tuple[float, float], ...] = ()
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lambda": self.lam,
            "beta": self.beta,
            "E": self.E,
            "x_residual": self.x_residual,
            "checkpoints": [list(c) for c in self.checkpoints],
            "diagnostics": dict(self.diagnostics),
        }


@dataclass(frozen=True)
class Monodromy:
    beta: float
    phi_end: np.ndarray
    det_end: float
    det_max_drift: float
    shooting: Dict[str, float]
    analytic: Dict[str, float]
    evans_from_monodromy: float

    def T(self, i: int, j: int) -> float:
        return float(self.phi_end[i - 1, j - 1])

    def gaps(self) -> Dict[str, float]:
        out = {}
        for key, ref in self.analytic.items():
            val = self.shooting[key]
            out[key] = abs(val - ref) / max(abs(val), abs(ref), 1e-300)
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            "beta": self.beta,
            "phi_end": self.phi_end.tolist(),
            "det_end": self.det_end,
            "det_max_drift": self.det_max_drift,
            "T13_end": self.T(1, 3),
            "T33_end": self.T(3, 3),
            "shooting": dict(self.shooting),
            "analytic": dict(self.analytic),
            "gaps": self.gaps(),
            "evans_from_monodromy": self.evans_from_monodromy,
        }


@dataclass(frozen=True)
class LambdaDerivative:
    beta: float
    fd: float
    fd_half: float
    vp: float
    reduced: float
    gap: float

    @property
    def sign(self) -> int:
        return int(np.sign(self.vp))

    def to_dict(self) -> Dict[str, Any]:
        d = asdict(self)
        d["sign"] = self.sign
        return d


@dataclass(frozen=True)
class EigenvalueSlope:
    beta_star: float
    formula: float
    fit: float
    gap: float
    lam_star: float
    lam_minus: float
    lam_plus: float
    delta_beta: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class EigenReport:
    beta: float
    eigenvalues: List[Tuple[float, float]] = field(default_factory=list)
    E0: float = float("nan")
    Dprime: float = float("nan")
    identity_gap: float = float("nan")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "beta": self.beta,
            "eigenvalues": [{"lambda": lam, "residual": res} for lam, res in self.eigenvalues],
            "E0": self.E0,
            "Dprime": self.Dprime,
            "identity_gap": self.identity_gap,
        }


@dataclass(frozen=True)
class Eigenfunction:
    """Normalized (U, P, Theta, Q) on a grid, max(|U|, |Theta|) = 1."""
    lam: float
    beta: float
    x: np.ndarray
    U: np.ndarray
    P: np.ndarray
    Theta: np.ndarray
    Q: np.ndarray
    boundary_residual: float

    def columns(self) -> Dict[str, np.ndarray]:
        return {"x": self.x, "U": self.U, "P": self.P, "Theta": self.Theta, "Q": self.Q}
