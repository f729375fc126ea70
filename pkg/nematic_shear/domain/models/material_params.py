from __future__ import annotations
import math
from dataclasses import dataclass, asdict
from typing import Dict, Any

PARAM_KEYS = ("alpha1", "alpha2", "alpha3", "alpha4", "alpha5", "alpha6", "K1", "K3", "theta0")


@dataclass(frozen=True)
class MaterialParams:
    alpha1: float
    alpha2: float
    alpha3: float
    alpha4: float
    alpha5: float
    alpha6: float
    K1: float
    K3: float
    theta0: float = math.pi / 3

    @property
    def gamma1(self) -> float:
        return self.alpha3 - self.alpha2

    @property
    def gamma2(self) -> float:
        return self.alpha6 - self.alpha5

    @staticmethod
    def from_dict(d: Dict[str, Any]) -> "MaterialParams":
        # gamma1/gamma2 are derived, never read
        values = {k: float(d[k]) for k in PARAM_KEYS if k in d}
        return MaterialParams(**values)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["gamma1"] = self.gamma1
        data["gamma2"] = self.gamma2
        return data

    def replace(self, **changes: float) -> "MaterialParams":
        data = asdict(self)
        data.update(changes)
        return MaterialParams(**data)


def default_material() -> MaterialParams:
    """Conjunto canónico P0 (gamma1 = -gamma2 = 1)."""
    return MaterialParams(
        alpha1=1.0, alpha2=-1.0, alpha3=0.0, alpha4=2.0,
        alpha5=0.5, alpha6=-0.5, K1=1.0, K3=1.0, theta0=math.pi / 3,
    )
