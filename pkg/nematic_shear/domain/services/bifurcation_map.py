from __future__ import annotations
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
from scipy import optimize

from nematic_shear.domain.errors import PoleError, RangeError
from nematic_shear.domain.models import EquilibriumSet, SolverSettings
from .coefficients import Coefficients
from .potential import Potential
from .quadrature import Panel, adaptive_gauss

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LevelIntegrals:
    """Turning-point quadratures at one Hamiltonian level beta.

    The integrals run over the angle between theta_tilde and theta0 written as
    theta = theta_tilde + v**2, which removes the inverse square root at the
    turning point.
    """
    beta: float
    theta_tilde: float
    width: float
    I_g: float
    I_1: float
    dI_g: float
    dI_1: float
    panels: Tuple[Panel, ...]

    @property
    def D(self) -> float:
        return self.I_g * self.I_1

    @property
    def D_prime(self) -> float:
        return self.dI_g * self.I_1 + self.I_g * self.dI_1

    @property
    def p0(self) -> float:
        return 2.0 * self.I_g ** 2


class BifurcationMap:
    """The map D(beta) whose level sets 2D(beta) = ubar label stationary flows."""

    def __init__(self, potential: Potential, settings: Optional[SolverSettings] = None, intervals: int = 3):
        self.potential = potential
        self.coef: Coefficients = potential.coef
        self.settings = settings or SolverSettings()
        self.equilibria: EquilibriumSet = potential.equilibria()
        self.n_intervals = intervals
        self._cached = lru_cache(maxsize=4096)(self._compute)

    # --- poles and intervals -------------------------------------------

    @property
    def poles(self) -> Tuple[float, ...]:
        return self.equilibria.beta_n

    def _guard(self, pole: float) -> float:
        return self.settings.pole_guard * max(1.0, abs(pole))

    def check_level(self, beta: float) -> None:
        if not (beta > 0.0 and math.isfinite(beta)):
            raise RangeError(f"beta debe ser positivo y finito (beta={beta!r})")
        for pole in self.poles:
            if abs(beta - pole) < self._guard(pole):
                raise PoleError(f"beta={beta:.17g} está dentro de la guarda del polo {pole:.17g}", beta, pole)

    def intervals(self) -> List[Tuple[float, float]]:
        """Pole-guarded intervals (0, b1), (b1, b2), ... inside the working window."""
        marks = list(self.equilibria.interval_marks())
        if not marks:
            return []
        guarded = bool(self.poles)
        bounds = [0.0] + marks
        out = []
        for k in range(min(self.n_intervals, len(marks))):
            lo, hi = bounds[k], bounds[k + 1]
            if guarded:
                lo = lo + 2.0 * self._guard(lo) if k > 0 else 0.0
                hi = hi - 2.0 * self._guard(hi)
            out.append((lo, hi))
        return out

    def interval(self, n: int) -> Tuple[float, float]:
        ivs = self.intervals()
        if not 0 <= n < len(ivs):
            raise RangeError(f"intervalo {n} fuera de la ventana de trabajo ({len(ivs)} intervalos)")
        return ivs[n]

    # --- quadratures ----------------------------------------------------

    def _integrand(self, theta_tilde: float):
        coef = self.coef
        pot = self.potential

        def f(v: np.ndarray) -> np.ndarray:
            z = theta_tilde + v * v
            m = pot.slope(theta_tilde, z)
            ms = pot.slope_shift(theta_tilde, z)
            sm = np.sqrt(m)
            c = coef.c(z)
            g = coef.g(z)
            dc = coef.dc(z)
            c_over_g = c / g
            d_c_over_g = (dc * g - c * coef.dg(z)) / (g * g)
            corr = ms / (m * sm)
            return np.vstack([
                2.0 * c / sm,
                2.0 * c_over_g / sm,
                2.0 * dc / sm - c * corr,
                2.0 * d_c_over_g / sm - c_over_g * corr,
            ])

        return f

    def _compute(self, beta: float) -> LevelIntegrals:
        theta_tilde = float(self.potential.F(-beta))
        width = math.sqrt(self.potential.theta0 - theta_tilde)
        total, panels = adaptive_gauss(
            self._integrand(theta_tilde), 0.0, width,
            n=self.settings.gl_nodes, tol=self.settings.quad_tol,
        )
        I_g, I_1, J_c, J_cg = (float(v) for v in total)
        t0 = self.potential.theta0
        root = math.sqrt(beta)
        slope_tilde = float(self.coef.hg(theta_tilde))
        # d/dtheta_tilde = boundary term + differentiated integrand; d/dbeta = -(g/h)(theta_tilde) d/dtheta_tilde
        dg_tilde = -float(self.coef.c(t0)) / root + J_c
        d1_tilde = -float(self.coef.c(t0) / self.coef.g(t0)) / root + J_cg
        return LevelIntegrals(
            beta=beta,
            theta_tilde=theta_tilde,
            width=width,
            I_g=I_g,
            I_1=I_1,
            dI_g=-dg_tilde / slope_tilde,
            dI_1=-d1_tilde / slope_tilde,
            panels=tuple(panels),
        )

    def level(self, beta: float) -> LevelIntegrals:
        beta = float(beta)
        self.check_level(beta)
        return self._cached(beta)

    def D(self, beta: float) -> float:
        return self.level(beta).D

    def D_prime(self, beta: float) -> float:
        return self.level(beta).D_prime

    def D_second(self, beta: float) -> float:
        step = 1e-4 * max(1.0, beta)
        return (self.D_prime(beta + step) - self.D_prime(beta - step)) / (2.0 * step)

    def p0(self, beta: float) -> float:
        return self.level(beta).p0

    def m_integrals(self, beta: float) -> Tuple[float, float]:
        """(I_Mg, I_M): the derivative quadratures entering D'.

        Defined through I_g' = (cg/h)(theta0)/sqrt(beta) - I_Mg and the analogue
        for I_1; on the first interval they equal the literal integrals of
        (cg/h)' and (c/h)' against 1/sqrt(G - G(theta_tilde)).
        """
        lv = self.level(beta)
        t0 = self.potential.theta0
        c0, g0, h0 = (float(f(t0)) for f in (self.coef.c, self.coef.g, self.coef.h))
        root = math.sqrt(beta)
        return c0 * g0 / h0 / root - lv.dI_g, c0 / h0 / root - lv.dI_1

    def literal_m_integrals(self, beta: float) -> Tuple[float, float]:
        """Direct evaluation of the M-type integrals; needs h != 0 on [theta_tilde, theta0]."""
        lv = self.level(beta)
        for e in self.equilibria.pole_angles:
            if lv.theta_tilde <= e <= self.potential.theta0:
                raise RangeError("las integrales M literales divergen: hay un equilibrio en el rango")
        coef = self.coef
        pot = self.potential
        a = lv.theta_tilde

        def f(v: np.ndarray) -> np.ndarray:
            z = a + v * v
            sm = np.sqrt(pot.slope(a, z))
            return np.vstack([2.0 * coef.d_cg_over_h(z) / sm, 2.0 * coef.d_c_over_h(z) / sm])

        total, _ = adaptive_gauss(f, 0.0, lv.width, n=self.settings.gl_nodes, tol=self.settings.quad_tol)
        return float(total[0]), float(total[1])

    def D_tform(self, beta: float) -> float:
        """D from the level-variable integrals with t = tau**2 (first interval only)."""
        self.check_level(beta)
        marks = self.equilibria.beta_n
        if marks and beta >= marks[0]:
            raise RangeError("la forma en t sólo se evalúa en el primer intervalo")
        coef = self.coef
        pot = self.potential

        def f(tau: np.ndarray) -> np.ndarray:
            theta = pot.F(tau * tau - beta)
            c = coef.c(theta)
            h = coef.h(theta)
            return np.vstack([2.0 * c * coef.g(theta) / h, 2.0 * c / h])

        total, _ = adaptive_gauss(f, 0.0, math.sqrt(beta), n=self.settings.gl_nodes, tol=self.settings.quad_tol)
        return float(total[0] * total[1])

    # --- root finding ---------------------------------------------------

    def _check_interval(self, lo: float, hi: float) -> None:
        if not lo < hi:
            raise RangeError("intervalo de beta vacío o invertido")
        for pole in self.poles:
            g = self._guard(pole)
            if lo - g < pole < hi + g:
                raise PoleError(f"el intervalo [{lo:.17g}, {hi:.17g}] toca el polo {pole:.17g}", lo, pole)

    def scan_grid(self, lo: float, hi: float, base: int = 33, levels: int = 30) -> np.ndarray:
        """Uniform grid plus geometric refinement toward both ends."""
        span = hi - lo
        pts = list(np.linspace(lo, hi, base))
        for k in range(2, levels + 1):
            d = span * 2.0 ** (-k)
            pts.extend((lo + d, hi - d))
        grid = np.unique(np.asarray(pts))
        return grid[grid > 0.0]

    def sampled(self, lo: float, hi: float) -> Tuple[np.ndarray, np.ndarray]:
        """D on the scan grid with interior local extrema refined and inserted."""
        self._check_interval(lo, hi)
        grid = self.scan_grid(lo, hi)
        values = np.array([self.D(b) for b in grid])
        extra = []
        for i in range(1, grid.size - 1):
            left, mid, right = values[i - 1], values[i], values[i + 1]
            if mid <= left and mid <= right:
                sign = 1.0
            elif mid >= left and mid >= right:
                sign = -1.0
            else:
                continue
            res = optimize.minimize_scalar(
                lambda b: sign * self.D(b), bounds=(grid[i - 1], grid[i + 1]), method="bounded",
                options={"xatol": 1e-12 * max(1.0, grid[i])},
            )
            extra.append(float(res.x))
        if extra:
            grid = np.unique(np.concatenate([grid, extra]))
            values = np.array([self.D(b) for b in grid])
        return grid, values

    def polish_ubar(self, ubar: float, a: float, b: float) -> float:
        """Brent root of 2D(beta) = ubar inside a sign-change bracket [a, b]."""
        root = float(optimize.brentq(
            lambda beta: 2.0 * self.D(beta) - ubar, a, b,
            xtol=1e-15 * max(1.0, a), rtol=4 * np.finfo(float).eps, maxiter=200,
        ))
        miss = abs(2.0 * self.D(root) - ubar)
        if miss > self.settings.root_tol * max(1.0, ubar):
            logger.warning("beta=%.17g: |2D - ubar| = %.3g above root_tol at machine resolution in beta", root, miss)
        return root

    def solve_ubar(self, ubar: float, interval: Tuple[float, float]) -> List[float]:
        if not ubar > 0.0:
            raise RangeError("ubar debe ser positivo")
        lo, hi = interval
        grid, values = self.sampled(lo, hi)
        resid = 2.0 * values - ubar
        roots: List[float] = []
        for i in range(grid.size - 1):
            a, b = resid[i], resid[i + 1]
            if a == 0.0:
                roots.append(float(grid[i]))
            elif a * b < 0.0:
                roots.append(self.polish_ubar(ubar, float(grid[i]), float(grid[i + 1])))
        if resid[-1] == 0.0:
            roots.append(float(grid[-1]))
        roots = sorted(set(roots))
        logger.info("ubar=%.6g on [%.6g, %.6g]: %d roots", ubar, lo, hi, len(roots))
        return roots
