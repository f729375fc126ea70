from __future__ import annotations
from dataclasses import dataclass, field, asdict
from typing import List, Dict, Any, Optional


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    margin: float
    detail: str = ""


@dataclass
class ValidationReport:
    checks: List[CheckResult] = field(default_factory=list)
    c_bar: float = float("nan")
    gamma1: float = float("nan")
    gamma2: float = float("nan")
    regime: str = ""

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def get(self, name: str) -> Optional[CheckResult]:
        for c in self.checks:
            if c.name == name:
                return c
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ok": self.ok,
            "c_bar": self.c_bar,
            "gamma1": self.gamma1,
            "gamma2": self.gamma2,
            "regime": self.regime,
            "checks": [asdict(c) for c in self.checks],
        }
