from __future__ import annotations
import logging
import math
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np
from scipy import optimize

from nematic_shear.domain.errors import NoRootError
from nematic_shear.domain.models import BifurcationDiagram, Branch, Minimum
from .bifurcation_map import BifurcationMap

logger = logging.getLogger(__name__)

MapFn = Callable[..., Iterable]


class BifurcationAnalysis:
    """Minima of D on each interval, fold pairs and the (ubar, beta) diagram."""

    def __init__(self, bmap: BifurcationMap):
        self.bmap = bmap
        self._minima: Dict[int, Optional[Minimum]] = {}

    def find_minimum(self, n: int) -> Optional[Minimum]:
        if n in self._minima:
            return self._minima[n]
        lo, hi = self.bmap.interval(n)
        grid, values = self.bmap.sampled(lo, hi)
        interior = [
            i for i in range(1, grid.size - 1)
            if values[i] <= values[i - 1] and values[i] <= values[i + 1]
        ]
        if not interior:
            logger.warning("interval %d: D is monotone on the sampled range, no minimum", n)
            self._minima[n] = None
            return None
        i = min(interior, key=lambda k: values[k])
        beta = float(grid[i])
        a, b = float(grid[i - 1]), float(grid[i + 1])
        dp_a, dp_b = self.bmap.D_prime(a), self.bmap.D_prime(b)
        if dp_a < 0.0 < dp_b:
            beta = optimize.brentq(self.bmap.D_prime, a, b, xtol=self.bmap.settings.root_tol * max(1.0, beta),
                                  rtol=4 * np.finfo(float).eps, maxiter=200)
        d2 = self.bmap.D_second(beta)
        if not d2 > 0.0:
            logger.warning("interval %d: non-generic minimum at beta=%.17g (D''=%.3g)", n, beta, d2)
        found = Minimum(
            n=n,
            beta_star=float(beta),
            ubar_n=2.0 * self.bmap.D(beta),
            d_second=float(d2),
            d_prime=float(self.bmap.D_prime(beta)),
        )
        logger.info("interval %d: beta*=%.12g ubar_n=%.12g", n, found.beta_star, found.ubar_n)
        self._minima[n] = found
        return found

    def minima(self) -> List[Minimum]:
        out = []
        for n in range(1, len(self.bmap.intervals())):
            m = self.find_minimum(n)
            if m is not None:
                out.append(m)
        return out

    def _outward_root(self, minimum: Minimum, ubar: float, direction: float) -> float:
        lo, hi = self.bmap.interval(minimum.n)
        edge = hi if direction > 0 else lo
        f = lambda beta: 2.0 * self.bmap.D(beta) - ubar
        start = minimum.beta_star
        step = math.sqrt((ubar - minimum.ubar_n) / max(minimum.d_second, 1e-300))
        inner = start
        while True:
            outer = start + direction * step
            if (outer - edge) * direction >= 0.0:
                outer = edge
            if f(outer) > 0.0:
                break
            if outer == edge:
                raise NoRootError(f"sin raíz de 2D = {ubar:.17g} entre beta* y el borde del intervalo {minimum.n}")
            inner = outer
            step *= 2.0
        a, b = sorted((inner, outer))
        return self.bmap.polish_ubar(ubar, a, b)

    def two_roots_near(self, minimum: Minimum, ubar: float) -> Tuple[float, float]:
        if not ubar > minimum.ubar_n:
            raise NoRootError(f"ubar={ubar:.17g} no supera la velocidad crítica {minimum.ubar_n:.17g}")
        return self._outward_root(minimum, ubar, -1.0), self._outward_root(minimum, ubar, 1.0)

    def ubar_samples(self, ubar_max: float, samples: int, minima: List[Minimum]) -> np.ndarray:
        """Uniform samples plus geometric refinement just above each critical speed."""
        base = list(np.linspace(ubar_max / samples, ubar_max, samples))
        spacing = ubar_max / samples
        for m in minima:
            if m.ubar_n < ubar_max:
                base.extend(m.ubar_n + spacing * 2.0 ** (-k) for k in range(8))
        pts = np.unique(np.asarray(base))
        return pts[(pts > 0.0) & (pts <= ubar_max)]

    def roots_at(self, ubar: float) -> List[Tuple[int, str, float]]:
        found = []
        for n, interval in enumerate(self.bmap.intervals()):
            minimum = self.find_minimum(n) if n > 0 else None
            for beta in self.bmap.solve_ubar(ubar, interval):
                if minimum is None:
                    side = "single"
                else:
                    side = "lower" if beta < minimum.beta_star else "upper"
                found.append((n, side, beta))
        return found

    def branch_diagram(self, ubar_max: float, samples: int = 40, map_fn: MapFn = map) -> BifurcationDiagram:
        if not ubar_max > 0.0:
            raise ValueError("ubar_max debe ser positivo")
        minima = self.minima()
        ubars = self.ubar_samples(ubar_max, samples, minima)
        per_sample = list(map_fn(self.roots_at, ubars))
        branches: Dict[Tuple[int, str], Branch] = {}
        for ubar, roots in zip(ubars, per_sample):
            for n, side, beta in roots:
                br = branches.setdefault((n, side), Branch(n=n, side=side))
                br.points.append((float(ubar), beta))
                br.signs.append(int(np.sign(self.bmap.D_prime(beta))))
        ordered = [branches[k] for k in sorted(branches)]
        return BifurcationDiagram(
            poles=list(self.bmap.poles),
            minima=minima,
            branches=ordered,
            ubar_max=float(ubar_max),
        )
