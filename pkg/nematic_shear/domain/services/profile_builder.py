from __future__ import annotations
import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import integrate, interpolate, optimize

from nematic_shear.domain.errors import ConvergenceError, IntegrationError, ProfileError
from nematic_shear.domain.models import StationaryProfile
from .bifurcation_map import BifurcationMap
from .quadrature import composite_nodes, unit_rule

logger = logging.getLogger(__name__)

PARTIAL_NODES = 32
TURNING_WINDOW = 1e-3
INVERSION_STEPS = 200
SPLINE_DEGREE = 7
EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class ShootingResult:
    p0: float
    ubar: float
    theta_end: float


@dataclass(frozen=True)
class ConservedDrift:
    dH1: float
    dH2: float
    dH3: float
    H2_start: float


class ProfileBuilder:
    """Reconstructs stationary profiles from the turning-point quadratures."""

    def __init__(self, bmap: BifurcationMap):
        self.bmap = bmap
        self.potential = bmap.potential
        self.coef = bmap.coef

    def _partial(self, a: float, v_lo: np.ndarray, w: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Integrals of 2c/sqrt(m) and 2c/(g sqrt(m)) over [v_lo, w], vectorized."""
        s, wt = unit_rule(PARTIAL_NODES)
        v = v_lo[:, None] + s * (w - v_lo)[:, None]
        z = a + v * v
        sm = np.sqrt(self.potential.slope(a, z))
        c = self.coef.c(z)
        length = (w - v_lo)
        first = length * ((2.0 * c / sm) @ wt)
        second = length * ((2.0 * c / (self.coef.g(z) * sm)) @ wt)
        return first, second

    def reconstruct(self, beta: float, N: int = 1025) -> StationaryProfile:
        if N < 5 or N % 2 == 0:
            raise ProfileError("N debe ser impar y al menos 5")
        lv = self.bmap.level(beta)
        a = lv.theta_tilde
        p0 = lv.p0
        ubar = 2.0 * lv.D
        panels = lv.panels
        v_edges = np.array([panels[0][0]] + [p[1] for p in panels])
        cum = np.vstack([np.zeros(2)] + [p[2][:2] for p in panels]).cumsum(axis=0)
        cum_s, cum_u = cum[:, 0], cum[:, 1]

        x = np.linspace(0.0, 1.0, N)
        mid = N // 2
        xr = x[mid:]
        target = (xr - 0.5) * math.sqrt(2.0 * p0)
        target[-1] = cum_s[-1]
        k = np.clip(np.searchsorted(cum_s, target, side="right") - 1, 0, v_edges.size - 2)
        anchor = v_edges[k]
        lo = anchor.copy()
        hi = v_edges[k + 1].copy()
        frac = np.clip((target - cum_s[k]) / np.maximum(cum_s[k + 1] - cum_s[k], 1e-300), 0.0, 1.0)
        w = lo + frac * (hi - lo)
        near = np.abs(xr - 0.5) < TURNING_WINDOW
        seed = np.abs(xr - 0.5) * math.sqrt(0.5 * p0 * float(self.coef.hg(a)) / float(self.coef.c2(a)))
        w = np.where(near, np.clip(seed, lo, hi), w)

        scale = np.maximum(1.0, target)
        width = hi - lo
        for it in range(INVERSION_STEPS):
            s_val, _ = self._partial(a, anchor, w)
            r = cum_s[k] + s_val - target
            # a bracket at machine resolution is converged even when r sits on the quadrature noise
            done = (np.abs(r) <= 1e-14 * scale) | (hi - lo <= 4.0 * EPS * np.maximum(1.0, np.abs(w)))
            if np.all(done):
                break
            z = a + w * w
            deriv = 2.0 * self.coef.c(z) / np.sqrt(self.potential.slope(a, z))
            lo = np.where(r < 0, w, lo)
            hi = np.where(r > 0, w, hi)
            newton = w - r / deriv
            stalled = hi - lo > 0.5 * width
            width = hi - lo
            bad = (newton <= lo) | (newton >= hi) | ~np.isfinite(newton) | stalled
            w = np.where(done, w, np.where(bad, 0.5 * (lo + hi), newton))
        else:
            raise ConvergenceError("la inversión implícita del perfil no convergió cerca del punto de retorno")
        logger.debug("profile inversion converged in %d iterations", it)

        _, u_part = self._partial(a, anchor, w)
        theta_r = a + w * w
        m = self.potential.slope(a, theta_r)
        eta_r = self.coef.c(theta_r) * w * np.sqrt(2.0 * p0 * m)
        u_r = 0.5 * ubar + math.sqrt(0.5 * p0) * (cum_u[k] + u_part)
        theta_r[-1] = self.potential.theta0

        theta = np.concatenate([theta_r[::-1], theta_r[1:]])
        eta = np.concatenate([-eta_r[::-1], eta_r[1:]])
        u = np.concatenate([ubar - u_r[::-1], u_r[1:]])
        u[0] = 0.0
        return StationaryProfile(
            x=x, u=u, theta=theta, eta=eta,
            p0=p0, beta=float(beta), theta_tilde=a, ubar=ubar,
        )

    # --- checks ---------------------------------------------------------

    def _S_from_turning(self, a: float, theta: np.ndarray, panels: int = 8) -> np.ndarray:
        """S(theta_tilde, theta) by a fixed composite rule in v, independent of the build path."""
        w = np.sqrt(np.maximum(theta - a, 0.0))
        s, wt = composite_nodes(0.0, 1.0, panels, 16)
        v = w[:, None] * s
        z = a + v * v
        sm = np.sqrt(self.potential.slope(a, z))
        vals = 2.0 * self.coef.c(z) / (self.coef.g(z) * sm)
        return w * (vals @ wt)

    def conserved_drift(self, profile: StationaryProfile) -> ConservedDrift:
        x, u, theta, eta = profile.x, profile.u, profile.theta, profile.eta
        p0 = profile.p0
        ux = spline_gradient(x, u)
        H1 = self.coef.g(theta) * ux
        H2 = eta ** 2 / (2.0 * self.coef.c2(theta)) - p0 * self.potential.G(theta)
        a = profile.theta_tilde
        S_part = self._S_from_turning(a, theta)
        S_full = self._S_from_turning(a, np.array([self.potential.theta0]))[0]
        left = x <= 0.5
        quad = np.where(left, S_full - S_part, S_full + S_part)
        H3 = u - math.sqrt(0.5 * p0) * quad
        return ConservedDrift(
            dH1=float(np.max(np.abs(H1 - H1[0]))),
            dH2=float(np.max(np.abs(H2 - H2[0]))),
            dH3=float(np.max(np.abs(H3 - H3[0]))),
            H2_start=float(H2[0]),
        )

    def check(self, profile: StationaryProfile, tol: float = 1e-6) -> None:
        """Raise ProfileError when the boundary, symmetry or level invariants fail."""
        t0 = self.potential.theta0
        scale = max(1.0, abs(profile.ubar))
        problems = []
        if abs(profile.u[0]) > tol or abs(profile.u[-1] - profile.ubar) > tol * scale:
            problems.append("valores de u en la frontera")
        if abs(profile.theta[0] - t0) > tol or abs(profile.theta[-1] - t0) > tol:
            problems.append("valores de theta en la frontera")
        mid = profile.mid
        if abs(profile.eta[mid]) > tol or abs(profile.theta[mid] - profile.theta_tilde) > tol:
            problems.append("punto de retorno")
        if np.max(np.abs(profile.theta - profile.theta[::-1])) > tol or np.max(np.abs(profile.eta + profile.eta[::-1])) > tol * max(1.0, np.max(np.abs(profile.eta))):
            problems.append("simetría")
        level = profile.eta ** 2 / (2.0 * self.coef.c2(profile.theta)) - profile.p0 * self.potential.G(profile.theta)
        if np.max(np.abs(level - profile.p0 * profile.beta)) > tol * max(1.0, profile.p0 * profile.beta):
            problems.append("nivel hamiltoniano")
        if problems:
            raise ProfileError("perfil estacionario inválido: " + ", ".join(problems))

    def residual(self, profile: StationaryProfile) -> float:
        """Max interior residual of c(c theta_x)_x - h u_x by second-order differences."""
        dx = profile.x[1] - profile.x[0]
        th = profile.theta
        lhs = elastic_term(self.coef, th, dx)
        rhs = self.coef.h(th[1:-1]) * (profile.u[2:] - profile.u[:-2]) / (2.0 * dx)
        return float(np.max(np.abs(lhs - rhs)))

    # --- shooting oracle ------------------------------------------------

    def shooting_ubar(self, beta: float, rtol: float = 1e-12) -> ShootingResult:
        """ubar from shooting the nonlinear stationary ODE out of the turning point.

        Only the turning angle comes from the potential; p0 is found by a scalar
        root search so that theta(1) = theta0.
        """
        a = float(self.potential.F(-beta))
        t0 = self.potential.theta0
        coef = self.coef

        def run(p0: float):
            def rhs(_x, y):
                th, eta, _u = y
                c = coef.c(th)
                return [eta / c ** 2, coef.dc(th) * eta ** 2 / c ** 3 + coef.hg(th) * p0, p0 / coef.g(th)]

            sol = integrate.solve_ivp(rhs, (0.5, 1.0), [a, 0.0, 0.0], method="DOP853", rtol=rtol, atol=1e-14)
            if not sol.success:
                raise IntegrationError(f"disparo no lineal falló: {sol.message}")
            return sol.y[:, -1]

        def miss(p0: float) -> float:
            return float(run(p0)[0] - t0)

        lo, hi = 1.0, 1.0
        f_lo = f_hi = miss(1.0)
        for _ in range(80):
            if f_lo < 0 < f_hi:
                break
            if f_hi <= 0:
                lo, f_lo = hi, f_hi
                hi *= 2.0
                f_hi = miss(hi)
            else:
                hi, f_hi = lo, f_lo
                lo *= 0.5
                f_lo = miss(lo)
        else:
            raise ConvergenceError("no se encontró un intervalo para p0 en el disparo")
        p0 = optimize.brentq(miss, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        end = run(p0)
        return ShootingResult(p0=float(p0), ubar=float(2.0 * end[2]), theta_end=float(end[0]))


def elastic_term(coef, theta: np.ndarray, dx: float) -> np.ndarray:
    """c (c theta_x)_x at interior nodes with midpoint coefficients."""
    c_half = coef.c(0.5 * (theta[1:] + theta[:-1]))
    flux = c_half * np.diff(theta)
    return coef.c(theta[1:-1]) * np.diff(flux) / (dx * dx)


def spline_gradient(x: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Derivative of the degree-7 interpolating spline, O(dx**7) on smooth data."""
    k = min(SPLINE_DEGREE, x.size - 1)
    return interpolate.make_interp_spline(x, f, k=k).derivative()(x)
