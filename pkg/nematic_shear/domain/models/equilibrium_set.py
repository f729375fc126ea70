from __future__ import annotations
from dataclasses import dataclass
from typing import Dict, Any, Tuple

REGIME_ANTI = "gamma1=-gamma2"
REGIME_SHIFTED = "gamma1=gamma2"
REGIME_DOMINANT = "gamma1>|gamma2|"
REGIME_UNSUPPORTED = "gamma1<|gamma2|"


@dataclass(frozen=True)
class EquilibriumSet:
    regime: str
    e_n: Tuple[float, ...] = ()
    beta_n: Tuple[float, ...] = ()
    # angles paired with beta_n (those below theta0)
    pole_angles: Tuple[float, ...] = ()
    # minimizers of h when the equilibria are gone (gamma1 > |gamma2|)
    h_minima: Tuple[float, ...] = ()
    h_minima_beta: Tuple[float, ...] = ()

    @property
    def has_poles(self) -> bool:
        return bool(self.beta_n)

    def interval_marks(self) -> Tuple[float, ...]:
        """Levels that split the beta axis into (0, b1), (b1, b2), ..."""
        return self.beta_n if self.beta_n else self.h_minima_beta

    def to_dict(self) -> Dict[str, Any]:
        return {
            "regime": self.regime,
            "e_n": list(self.e_n),
            "beta_n": list(self.beta_n),
            "pole_angles": list(self.pole_angles),
            "h_minima": list(self.h_minima),
            "h_minima_beta": list(self.h_minima_beta),
        }
