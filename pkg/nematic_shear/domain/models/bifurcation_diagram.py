from __future__ import annotations
from dataclasses import dataclass, field, asdict
from typing import List, Dict, Any, Tuple


@dataclass(frozen=True)
class Minimum:
    n: int
    beta_star: float
    ubar_n: float
    d_second: float
    d_prime: float = 0.0


@dataclass
class Branch:
    n: int
    side: str  # "single", "lower" or "upper"
    points: List[Tuple[float, float]] = field(default_factory=list)
    signs: List[int] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {"n": self.n, "side": self.side, "points": [[u, b] for u, b in self.points]}


@dataclass
class BifurcationDiagram:
    poles: List[float] = field(default_factory=list)
    minima: List[Minimum] = field(default_factory=list)
    branches: List[Branch] = field(default_factory=list)
    ubar_max: float = 0.0

    def root_count(self, ubar: float, rtol: float = 1e-12) -> int:
        count = 0
        for br in self.branches:
            count += sum(1 for u, _ in br.points if abs(u - ubar) <= rtol * max(1.0, abs(ubar)))
        return count

    def rows(self) -> List[Tuple[float, float, int, str, int]]:
        out = []
        for br in self.branches:
            for (u, b), s in zip(br.points, br.signs):
                out.append((u, b, br.n, br.side, s))
        out.sort(key=lambda r: (r[0], r[1]))
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            "poles": list(self.poles),
            "minima": [asdict(m) for m in self.minima],
            "branches": [b.to_dict() for b in self.branches],
            "ubar_max": self.ubar_max,
        }
