from __future__ import annotations
import logging
import math
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np
from scipy import integrate, optimize

from nematic_shear.domain.errors import ConvergenceError, DegenerateError, IntegrationError
from nematic_shear.domain.models import (
    EigenReport,
    Eigenfunction,
    EigenvalueSlope,
    EvansEvaluation,
    LambdaDerivative,
    Monodromy,
    SolverSettings,
    StationaryProfile,
)
from .bifurcation_map import BifurcationMap
from .linearization import LinearizedSystem
from .profile_builder import ProfileBuilder
from .quadrature import composite_nodes

logger = logging.getLogger(__name__)

MapFn = Callable[..., Iterable]

CHECKPOINTS = (0.25, 0.5, 0.75)
MATCH_POINT = 0.5
RESCALE_AT = 1e100
FD_STEP = 1e-5
IDENTITY_FLOOR = 1e-12
# columns e2, e4: U = Theta = 0 at the wall
WALL_BASIS = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 0.0], [0.0, 1.0]])
E2 = np.array([0.0, 1.0, 0.0, 0.0])
E4 = np.array([0.0, 0.0, 0.0, 1.0])


def wall_det(a: np.ndarray, b: np.ndarray) -> float:
    """det(a | b | e2 | e4)."""
    return float(np.linalg.det(np.column_stack([a, b, E2, E4])))


class SpectralAnalysis:
    """Evans function, monodromy matrix and eigenvalue crossings for one material.

    Profiles and their linearizations are cached per beta; every method is safe to
    call from worker threads.
    """

    def __init__(self, bmap: BifurcationMap, builder: Optional[ProfileBuilder] = None,
                 settings: Optional[SolverSettings] = None):
        self.bmap = bmap
        self.builder = builder or ProfileBuilder(bmap)
        self.coef = bmap.coef
        self.settings = settings or bmap.settings
        self.system = lru_cache(maxsize=32)(self._build_system)
        self._fundamental = lru_cache(maxsize=32)(self._integrate_fundamental)

    # --- background ------------------------------------------------------

    def profile(self, beta: float) -> StationaryProfile:
        return self.system(float(beta)).profile

    def _build_system(self, beta: float) -> LinearizedSystem:
        profile = self.builder.reconstruct(beta, self.settings.profile_points)
        self.builder.check(profile)
        return LinearizedSystem(profile, self.coef)

    # --- Evans function --------------------------------------------------

    def _shoot(self, system: LinearizedSystem, lam: float, start: float, stops) -> Tuple[Dict[float, Tuple[np.ndarray, float]], int, int]:
        def rhs(x, y):
            return (system.matrix(x, lam) @ y.reshape(4, 2)).ravel()

        Y = WALL_BASIS.copy()
        log_scale = 0.0
        here = start
        out: Dict[float, Tuple[np.ndarray, float]] = {}
        nfev = rescaled = 0
        for stop in stops:
            sol = integrate.solve_ivp(rhs, (here, stop), Y.ravel(), method="DOP853",
                                      rtol=self.settings.ode_rtol, atol=1e-14)
            if not sol.success:
                raise IntegrationError(f"integración de Evans falló en [{here}, {stop}]: {sol.message}")
            nfev += sol.nfev
            Y = sol.y[:, -1].reshape(4, 2)
            big = float(np.max(np.abs(Y)))
            if big > RESCALE_AT:
                Y = Y / big
                log_scale += math.log(big)
                rescaled += 1
            out[stop] = (Y.copy(), log_scale)
            here = stop
        return out, nfev, rescaled

    def evans(self, lam: float, beta: float) -> EvansEvaluation:
        system = self.system(float(beta))
        fwd, nf, rf = self._shoot(system, lam, 0.0, CHECKPOINTS)
        bwd, nb, rb = self._shoot(system, lam, 1.0, CHECKPOINTS[::-1])
        values = []
        for x in CHECKPOINTS:
            Yf, lf = fwd[x]
            Yb, lb = bwd[x]
            d = float(np.linalg.det(np.hstack([Yf, Yb])))
            values.append((x, d * math.exp(lf + lb)))
        E = dict(values)[MATCH_POINT]
        residual = max(abs(v - E) for _, v in values)
        return EvansEvaluation(
            lam=float(lam), beta=float(beta), E=E, x_residual=residual,
            checkpoints=tuple(values),
            diagnostics={"nfev": nf + nb, "rescalings": rf + rb},
        )

    def E(self, lam: float, beta: float) -> float:
        return self.evans(lam, beta).E

    def evans_zero_predicted(self, beta: float) -> float:
        """-2 beta D'(beta) / (p0 c(theta0)^2)."""
        lv = self.bmap.level(beta)
        c0sq = float(self.coef.c2(self.bmap.potential.theta0))
        return -2.0 * beta * lv.D_prime / (lv.p0 * c0sq)

    def evans_zero_identity(self, beta: float) -> Tuple[float, float, float]:
        """(shooting E(0, beta), closed form, relative gap)."""
        shot = self.E(0.0, beta)
        predicted = self.evans_zero_predicted(beta)
        gap = abs(shot - predicted) / max(abs(shot), abs(predicted), IDENTITY_FLOOR)
        return shot, predicted, gap

    # --- monodromy -------------------------------------------------------

    def _integrate_fundamental(self, beta: float):
        system = self.system(beta)

        def rhs(x, y):
            return (system.A(x) @ y.reshape(4, 4)).ravel()

        sol = integrate.solve_ivp(rhs, (0.0, 1.0), np.eye(4).ravel(), method="DOP853",
                                  rtol=self.settings.ode_rtol, atol=1e-14, dense_output=True)
        if not sol.success:
            raise IntegrationError(f"matriz fundamental sin integrar: {sol.message}")
        return sol

    def phi(self, beta: float, xs) -> np.ndarray:
        """Fundamental matrix at each abscissa, shape (len(xs), 4, 4)."""
        sol = self._fundamental(float(beta))
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        return np.moveaxis(sol.sol(xs).reshape(4, 4, xs.size), -1, 0)

    def analytic_monodromy(self, beta: float) -> Dict[str, float]:
        """T12, T14, T32, T34 at x = 1 from the M-type quadratures."""
        lv = self.bmap.level(beta)
        I_Mg, I_M = self.bmap.m_integrals(beta)
        t0 = self.bmap.potential.theta0
        c0, g0, h0 = (float(f(t0)) for f in (self.coef.c, self.coef.g, self.coef.h))
        p0 = lv.p0
        root = math.sqrt(beta)
        dIg = c0 * g0 / (h0 * root) - I_Mg
        dI1 = c0 / (h0 * root) - I_M
        mixed = dIg / g0 - dI1
        scale = math.sqrt(2.0 / p0)
        return {
            "T12": 0.5 / g0 + lv.I_1 / math.sqrt(2.0 * p0) + scale * beta * mixed,
            "T14": 2.0 * root / c0 * mixed,
            "T32": root / c0 * (1.0 / math.sqrt(2.0 * p0) + 2.0 * beta * dIg / p0),
            "T34": 2.0 * beta * scale * dIg / (c0 * c0),
        }

    def monodromy(self, beta: float) -> Monodromy:
        beta = float(beta)
        xs = np.linspace(0.0, 1.0, 65)
        phis = self.phi(beta, xs)
        dets = np.linalg.det(phis)
        end = phis[-1]
        shooting = {"T12": end[0, 1], "T14": end[0, 3], "T32": end[2, 1], "T34": end[2, 3]}
        return Monodromy(
            beta=beta,
            phi_end=end,
            det_end=float(dets[-1]),
            det_max_drift=float(np.max(np.abs(dets - 1.0))),
            shooting={k: float(v) for k, v in shooting.items()},
            analytic=self.analytic_monodromy(beta),
            evans_from_monodromy=wall_det(end[:, 1], end[:, 3]),
        )

    # --- lambda derivative ----------------------------------------------

    def _variation_integrals(self, beta: float):
        xs, wt = composite_nodes(0.0, 1.0, 64, 16)
        phis = self.phi(beta, xs)
        B = self.system(beta).B_stack(xs)
        return xs, wt, phis, B

    def _evans_lambda_vp(self, beta: float) -> Tuple[float, float, np.ndarray]:
        xs, wt, phis, B = self._variation_integrals(beta)
        kernel = np.linalg.inv(phis) @ B @ phis
        V = np.einsum("k,kij->ij", wt, kernel)
        end = self.phi(beta, [1.0])[0]
        W = end @ V
        Z1, Z2 = end[:, 1], end[:, 3]
        full = wall_det(W[:, 1], Z2) + wall_det(Z1, W[:, 3])

        T = lambda i, j: phis[:, i - 1, j - 1]
        hg = self.coef.hg(self.system(beta).background(xs)[0])
        b2 = B[:, 3, 2]
        J = T(1, 2) + T(1, 3) * (T(3, 4) * T(4, 2) - T(3, 2) * T(4, 4)) + T(1, 4) * (T(3, 2) * T(4, 3) - T(3, 3) * T(4, 2))
        K13 = -hg + b2 * (T(1, 3) * T(3, 4) - T(1, 4) * T(3, 3))
        K31 = T(3, 4) * T(4, 2) - T(3, 2) * T(4, 4)
        K33 = -b2 * T(3, 4)
        ints = [
            wt @ (T(1, 2) * J - T(3, 2) * K13),
            wt @ (T(1, 2) * K31 + T(3, 2) * K33),
            wt @ (-T(1, 4) * K31 - T(3, 4) * K33),
            wt @ (-T(1, 4) * J + T(3, 4) * K13),
        ]
        reduced = end[2, 3] * ints[0] + end[0, 3] * ints[1] + end[0, 1] * ints[2] + end[2, 1] * ints[3]
        return float(full), float(reduced), end

    def evans_lambda_derivative(self, beta: float) -> LambdaDerivative:
        beta = float(beta)
        fd = (self.E(FD_STEP, beta) - self.E(-FD_STEP, beta)) / (2.0 * FD_STEP)
        half = 0.5 * FD_STEP
        fd_half = (self.E(half, beta) - self.E(-half, beta)) / (2.0 * half)
        vp, reduced, end = self._evans_lambda_vp(beta)
        scale = max(1.0, float(np.max(np.abs(end))))
        if abs(vp) < 1e-10 * scale:
            raise DegenerateError(f"E_lambda se anula en beta={beta:.17g}; la fórmula de pendiente no aplica")
        gap = abs(vp - fd) / max(abs(vp), abs(fd))
        logger.info("beta=%.12g: E_lambda vp=%.12g fd=%.12g gap=%.3g", beta, vp, fd, gap)
        return LambdaDerivative(beta=beta, fd=float(fd), fd_half=float(fd_half), vp=vp, reduced=reduced, gap=float(gap))

    # --- eigenvalues -----------------------------------------------------

    def _polish(self, beta: float, lo: float, hi: float) -> float:
        xtol = self.settings.root_tol * max(1.0, abs(lo), abs(hi))
        return float(optimize.brentq(lambda lam: self.E(lam, beta), lo, hi, xtol=xtol,
                                     rtol=4 * np.finfo(float).eps, maxiter=200))

    def track_root(self, beta: float, guess: float) -> float:
        """Zero of E(., beta) nearest to guess, found by widening a bracket around it."""
        width = max(2.0 * abs(guess), 1e-8)
        for _ in range(40):
            a, b = guess - width, guess + width
            ea, eb = self.E(a, beta), self.E(b, beta)
            if ea == 0.0:
                return a
            if ea * eb < 0.0:
                return self._polish(beta, a, b)
            width *= 2.0
        raise ConvergenceError(f"no se acotó el autovalor cerca de {guess:.6g} en beta={beta:.17g}")

    def eigenvalue_slope(self, beta_star: float, delta: Optional[float] = None) -> EigenvalueSlope:
        beta_star = float(beta_star)
        d = self.evans_lambda_derivative(beta_star)
        lv = self.bmap.level(beta_star)
        c0sq = float(self.coef.c2(self.bmap.potential.theta0))
        formula = 2.0 * beta_star * self.bmap.D_second(beta_star) / (lv.p0 * c0sq * d.vp)
        step = delta if delta is not None else 1e-3 * max(1.0, beta_star)

        def predict(beta: float) -> float:
            return -self.evans_zero_predicted(beta) / d.vp

        lam_star = self.track_root(beta_star, predict(beta_star))
        lam_minus = self.track_root(beta_star - step, predict(beta_star - step))
        lam_plus = self.track_root(beta_star + step, predict(beta_star + step))
        fit = (lam_plus - lam_minus) / (2.0 * step)
        gap = abs(formula - fit) / max(abs(formula), abs(fit), 1e-300)
        logger.info("beta*=%.12g: dlambda/dbeta formula=%.10g fit=%.10g", beta_star, formula, fit)
        return EigenvalueSlope(
            beta_star=beta_star, formula=float(formula), fit=float(fit), gap=float(gap),
            lam_star=lam_star, lam_minus=lam_minus, lam_plus=lam_plus, delta_beta=step,
        )

    def scan(self, beta: float, lams, map_fn: MapFn = map) -> List[EvansEvaluation]:
        return list(map_fn(lambda lam: self.evans(float(lam), beta), lams))

    def roots_from_scan(self, beta: float, evaluations: List[EvansEvaluation]) -> List[Tuple[float, float]]:
        """(lambda, |E(lambda)|) for every sign change along an ordered scan."""
        found = []
        for left, right in zip(evaluations, evaluations[1:]):
            if left.E == 0.0:
                found.append(left.lam)
            elif left.E * right.E < 0.0:
                found.append(self._polish(beta, left.lam, right.lam))
        if evaluations and evaluations[-1].E == 0.0:
            found.append(evaluations[-1].lam)
        logger.info("beta=%.12g: %d eigenvalues in the scanned window", beta, len(found))
        return [(lam, abs(self.E(lam, beta))) for lam in found]

    def eigen_scan(self, beta: float, window: Tuple[float, float], grid: int, map_fn: MapFn = map) -> List[Tuple[float, float]]:
        lo, hi = window
        if not hi > lo or grid < 2:
            return []
        return self.roots_from_scan(beta, self.scan(beta, np.linspace(lo, hi, grid), map_fn))

    def eigen_report(self, beta: float, window: Tuple[float, float], grid: int, map_fn: MapFn = map) -> EigenReport:
        shot, _, gap = self.evans_zero_identity(beta)
        return EigenReport(
            beta=float(beta),
            eigenvalues=self.eigen_scan(beta, window, grid, map_fn),
            E0=shot,
            Dprime=self.bmap.D_prime(beta),
            identity_gap=gap,
        )

    def eigenfunction(self, lam: float, beta: float, x: np.ndarray) -> Eigenfunction:
        """Combination of the wall solutions from x = 0 that also vanishes at x = 1."""
        system = self.system(float(beta))

        def rhs(s, y):
            return (system.matrix(s, lam) @ y.reshape(4, 2)).ravel()

        sol = integrate.solve_ivp(rhs, (0.0, 1.0), WALL_BASIS.ravel(), method="DOP853",
                                  rtol=self.settings.ode_rtol, atol=1e-14, dense_output=True)
        if not sol.success:
            raise IntegrationError(f"autofunción sin integrar: {sol.message}")
        end = sol.y[:, -1].reshape(4, 2)
        row = 0 if np.linalg.norm(end[0]) >= np.linalg.norm(end[2]) else 2
        a, b = end[row, 1], -end[row, 0]
        x = np.asarray(x, dtype=float)
        Y = sol.sol(x).reshape(4, 2, x.size)
        vec = a * Y[:, 0, :] + b * Y[:, 1, :]
        norm = max(float(np.max(np.abs(vec[0]))), float(np.max(np.abs(vec[2]))), 1e-300)
        vec = vec / norm
        tip = (a * end[:, 0] + b * end[:, 1]) / norm
        return Eigenfunction(
            lam=float(lam), beta=float(beta), x=x,
            U=vec[0], P=vec[1], Theta=vec[2], Q=vec[3],
            boundary_residual=float(max(abs(tip[0]), abs(tip[2]))),
        )
