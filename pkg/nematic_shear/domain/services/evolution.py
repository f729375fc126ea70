from __future__ import annotations
import logging
import math
import threading
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, sparse
from scipy.sparse import linalg as sparse_linalg

from nematic_shear.domain.errors import EvolutionError, RangeError
from nematic_shear.domain.models import (
    DecayReport,
    EvolutionSettings,
    EvolutionState,
    LINEARIZED,
    NONLINEAR,
    SmallUbarBounds,
    StationaryProfile,
)
from .coefficients import Coefficients

logger = logging.getLogger(__name__)

SPLIT_TRANSIENT = 0.5
MAX_FACTORS = 4


def _midpoints(theta: np.ndarray) -> np.ndarray:
    return 0.5 * (theta[1:] + theta[:-1])


def _tridiag(lower: np.ndarray, diag: np.ndarray, upper: np.ndarray) -> sparse.csc_matrix:
    return sparse.diags([lower[1:], diag, upper[:-1]], [-1, 0, 1], format="csc")


def _flux_operators(coef: Coefficients, theta: np.ndarray, dx: float):
    """Interior difference operators with coefficients frozen at theta.

    Returns (Lg, C, H, Mh) acting on interior values of a field that vanishes at
    the walls: Lg v = (g v_x)_x, C v = c (c v_x)_x, H v = h v_x (centered),
    Mh v = (h v)_x with v averaged to midpoints.
    """
    gm = coef.g(_midpoints(theta))
    hm = coef.h(_midpoints(theta))
    cm = coef.c(_midpoints(theta))
    ci = coef.c(theta[1:-1])
    hi = coef.h(theta[1:-1])
    inv2 = 1.0 / (dx * dx)
    lo_g, up_g = gm[:-1], gm[1:]
    Lg = _tridiag(lo_g * inv2, -(lo_g + up_g) * inv2, up_g * inv2)
    lo_c, up_c = cm[:-1], cm[1:]
    C = _tridiag(ci * lo_c * inv2, -ci * (lo_c + up_c) * inv2, ci * up_c * inv2)
    H = _tridiag(-hi / (2 * dx), np.zeros_like(hi), hi / (2 * dx))
    lo_h, up_h = hm[:-1], hm[1:]
    Mh = _tridiag(-lo_h / (2 * dx), (up_h - lo_h) / (2 * dx), up_h / (2 * dx))
    return Lg, C, H, Mh


def _apply_full(coef: Coefficients, theta: np.ndarray, u: np.ndarray, dx: float) -> Tuple[np.ndarray, np.ndarray]:
    """(g u_x)_x and c(c theta_x)_x - h u_x at interior nodes, walls included."""
    tm = _midpoints(theta)
    flux_u = coef.g(tm) * np.diff(u) / dx
    flux_t = coef.c(tm) * np.diff(theta) / dx
    lg = np.diff(flux_u) / dx
    rest = coef.c(theta[1:-1]) * np.diff(flux_t) / dx - coef.h(theta[1:-1]) * (u[2:] - u[:-2]) / (2 * dx)
    return lg, rest


def perturbation(x: np.ndarray, seed: int, modes: int = 16, amplitude: float = 1e-3) -> Tuple[np.ndarray, np.ndarray]:
    """Random sine series for (U, Theta); coefficients decay like k**-2, max |field| = amplitude."""
    rng = np.random.default_rng(seed)
    k = np.arange(1, modes + 1)
    coeffs = rng.standard_normal((2, modes)) / (k * k)
    basis = np.sin(np.pi * np.outer(k, x))
    fields = coeffs @ basis
    fields[:, 0] = 0.0
    fields[:, -1] = 0.0
    peaks = np.max(np.abs(fields), axis=1, keepdims=True)
    fields = amplitude * fields / np.where(peaks > 0, peaks, 1.0)
    return fields[0], fields[1]


def energy(coef: Coefficients, x: np.ndarray, U: np.ndarray, Theta: np.ndarray, theta: np.ndarray,
           b: float, weight: str = "c2") -> float:
    """Weighted energy of a perturbation (U, Theta) around the angle field theta."""
    Theta_x = np.gradient(Theta, x, edge_order=2)
    w = coef.c2(theta) if weight == "c2" else coef.c(theta)
    density = U * U + b * coef.gamma1 * Theta * Theta + w * Theta_x * Theta_x
    return float(integrate.trapezoid(density, x))


class _LinearStepper:
    """Backward-Euler matrices of the linearized system around one background."""

    def __init__(self, coef: Coefficients, background: StationaryProfile):
        self.coef = coef
        th = background.theta
        x = background.x
        self.dx = float(x[1] - x[0])
        p0 = background.p0
        dx = self.dx
        self.n = th.size - 2
        self.Lg, _, self.H, self.Mh = _flux_operators(coef, th, dx)
        ci = coef.c(th)
        inner = ci[1:-1]
        inv2 = 1.0 / (dx * dx)
        self.C2 = sparse.diags(
            [(inner * ci[:-2] * inv2)[1:], -2.0 * inner * inner * inv2, (inner * ci[2:] * inv2)[:-1]],
            [-1, 0, 1], format="csc",
        )
        t_in = th[1:-1]
        g_in = coef.g(t_in)
        react = coef.dc(t_in) * coef.h(t_in) * p0 / (g_in * inner) - coef.dh(t_in) * p0 / g_in
        self.R = sparse.diags(react, 0, format="csc")
        tm = _midpoints(th)
        gp = coef.dg(tm) * p0 / coef.g(tm)
        lo, up = gp[:-1], gp[1:]
        self.Mgp = _tridiag(-lo / (2 * dx), (up - lo) / (2 * dx), up / (2 * dx))
        self._lock = threading.Lock()
        self._factors: Dict[float, object] = {}

    def factor(self, dt: float):
        with self._lock:
            lu = self._factors.get(dt)
            if lu is None:
                eye = sparse.identity(self.n, format="csc")
                g1 = self.coef.gamma1
                A = sparse.bmat([
                    [eye - dt * self.Lg, -(dt * self.Mgp + self.Mh)],
                    [dt * self.H, g1 * eye - dt * (self.C2 + self.R)],
                ], format="csc")
                lu = sparse_linalg.splu(A)
                if len(self._factors) >= MAX_FACTORS:
                    self._factors.pop(next(iter(self._factors)))
                self._factors[dt] = lu
            return lu

    def implicit(self, U: np.ndarray, Theta: np.ndarray, dt: float) -> Tuple[np.ndarray, np.ndarray]:
        Ui, Ti = U[1:-1], Theta[1:-1]
        rhs = np.concatenate([Ui - self.Mh @ Ti, self.coef.gamma1 * Ti])
        sol = self.factor(dt).solve(rhs)
        return _pad(sol[: self.n]), _pad(sol[self.n:])

    def explicit(self, U: np.ndarray, Theta: np.ndarray, dt: float) -> Tuple[np.ndarray, np.ndarray]:
        Ui, Ti = U[1:-1], Theta[1:-1]
        dT = dt * ((self.C2 + self.R) @ Ti - self.H @ Ui) / self.coef.gamma1
        dU = dt * (self.Lg @ Ui + self.Mgp @ Ti) + self.Mh @ dT
        return _pad(Ui + dU), _pad(Ti + dT)


def _pad(interior: np.ndarray) -> np.ndarray:
    return np.concatenate([[0.0], interior, [0.0]])


class EvolutionSolver:
    """Time stepping of the parabolic shear-flow system and its linearization."""

    def __init__(self, coef: Coefficients, settings: Optional[EvolutionSettings] = None):
        self.coef = coef
        self.settings = settings or EvolutionSettings()
        self._linear: Optional[Tuple[StationaryProfile, _LinearStepper]] = None
        self._lock = threading.Lock()

    # --- steps -----------------------------------------------------------

    def max_diffusivity(self, theta: np.ndarray) -> float:
        """Bound on the fastest diffusion rate of the coupled system."""
        return float(np.max(self.coef.g(theta) + self.coef.c2(theta) / self.coef.gamma1))

    def default_dt(self, x: np.ndarray, theta: np.ndarray) -> float:
        dx = float(x[1] - x[0])
        if self.settings.implicit:
            return dx
        return 0.25 * dx * dx / self.max_diffusivity(theta)

    def _stepper(self, background: StationaryProfile) -> _LinearStepper:
        # only the latest background keeps its matrices and factors
        with self._lock:
            if self._linear is None or self._linear[0] is not background:
                self._linear = (background, _LinearStepper(self.coef, background))
            return self._linear[1]

    def _advance_nonlinear(self, u: np.ndarray, theta: np.ndarray, dt: float) -> Tuple[np.ndarray, np.ndarray]:
        dx = float(1.0 / (u.size - 1))
        lg, rest = _apply_full(self.coef, theta, u, dx)
        g1 = self.coef.gamma1
        if not self.settings.implicit:
            d_theta = _pad(dt * rest / g1)
            _, _, _, Mh = _flux_operators(self.coef, theta, dx)
            d_u = _pad(dt * lg + Mh @ d_theta[1:-1])
        else:
            Lg, C, H, Mh = _flux_operators(self.coef, theta, dx)
            n = u.size - 2
            eye = sparse.identity(n, format="csc")
            A = sparse.bmat([[eye - dt * Lg, -Mh], [dt * H, g1 * eye - dt * C]], format="csc")
            sol = sparse_linalg.spsolve(A, np.concatenate([dt * lg, dt * rest]))
            d_u, d_theta = _pad(sol[:n]), _pad(sol[n:])
        return u + d_u, theta + d_theta

    def _attempt(self, state: EvolutionState, dt: float) -> Tuple[np.ndarray, np.ndarray, float]:
        for attempt in range(self.settings.max_retries + 1):
            try:
                if state.kind == LINEARIZED:
                    stepper = self._stepper(state.background)
                    advance = stepper.implicit if self.settings.implicit else stepper.explicit
                    first, second = advance(state.first, state.second, dt)
                else:
                    first, second = self._advance_nonlinear(state.first, state.second, dt)
            except RuntimeError as exc:
                logger.debug("step rejected at t=%.6g dt=%.3g: %s", state.t, dt, exc)
                first = second = None
            if first is not None and np.all(np.isfinite(first)) and np.all(np.isfinite(second)):
                return first, second, dt
            dt *= 0.5
            logger.debug("halving dt to %.3g (attempt %d)", dt, attempt + 1)
        raise EvolutionError(f"paso rechazado {self.settings.max_retries} veces en t={state.t:.6g}")

    def step_nonlinear(self, state: EvolutionState, dt: float) -> EvolutionState:
        if state.kind != NONLINEAR:
            raise EvolutionError("estado linealizado pasado al integrador no lineal")
        first, second, used = self._attempt(state, dt)
        return state.advanced(state.t + used, first, second, used)

    def step_linearized(self, state: EvolutionState, dt: float) -> EvolutionState:
        if state.kind != LINEARIZED or state.background is None:
            raise EvolutionError("el paso linealizado requiere un perfil de fondo")
        first, second, used = self._attempt(state, dt)
        return state.advanced(state.t + used, first, second, used)

    # --- states and runs -------------------------------------------------

    def nonlinear_state(self, x: np.ndarray, u: np.ndarray, theta: np.ndarray, ubar: float,
                        background: Optional[StationaryProfile] = None) -> EvolutionState:
        u = np.array(u, dtype=float)
        theta = np.array(theta, dtype=float)
        u[0], u[-1] = 0.0, ubar
        theta[0] = theta[-1] = self.coef.params.theta0
        return EvolutionState(t=0.0, x=np.asarray(x, dtype=float), first=u, second=theta,
                              dt=self.default_dt(x, theta), kind=NONLINEAR, background=background)

    def linearized_state(self, background: StationaryProfile, U: np.ndarray, Theta: np.ndarray) -> EvolutionState:
        U = np.array(U, dtype=float)
        Theta = np.array(Theta, dtype=float)
        U[0] = U[-1] = Theta[0] = Theta[-1] = 0.0
        return EvolutionState(t=0.0, x=background.x, first=U, second=Theta,
                              dt=self.default_dt(background.x, background.theta),
                              kind=LINEARIZED, background=background)

    def state_energy(self, state: EvolutionState, b: float) -> float:
        bg = state.background
        if state.kind == LINEARIZED:
            return energy(self.coef, state.x, state.first, state.second, bg.theta, b, self.settings.energy_weight)
        if bg is None:
            raise EvolutionError("la energía del estado no lineal requiere un perfil de referencia")
        return energy(self.coef, state.x, state.first - bg.u, state.second - bg.theta, bg.theta, b,
                      self.settings.energy_weight)

    def terminal_fields(self, state: EvolutionState) -> Dict[str, np.ndarray]:
        """Full (x, u, theta, eta) of a state, with eta = c^2 theta_x as in a stationary profile."""
        u, theta = state.first, state.second
        if state.kind == LINEARIZED:
            u = state.background.u + u
            theta = state.background.theta + theta
        eta = self.coef.c2(theta) * np.gradient(theta, state.x, edge_order=2)
        return {"x": state.x, "u": u, "theta": theta, "eta": eta}

    def run(self, state: EvolutionState, T: float, dt: Optional[float] = None, b: Optional[float] = None) -> EvolutionState:
        """Integrate to time T; the energy trace is recorded when b is given."""
        dt = dt if dt is not None else state.dt
        step = self.step_linearized if state.kind == LINEARIZED else self.step_nonlinear
        if b is not None:
            state = state.advanced(state.t, state.first, state.second, dt, self.state_energy(state, b))
        steps = 0
        while state.t < T - 1e-12 * max(1.0, T):
            h = min(dt, T - state.t)
            state = step(state, h)
            steps += 1
            if b is not None:
                e = self.state_energy(state, b)
                if not (e >= 0.0 and math.isfinite(e)):
                    raise EvolutionError(f"energía no válida ({e!r}) en t={state.t:.6g}")
                state = state.advanced(state.t, state.first, state.second, state.dt, e)
        logger.info("%s run: %d steps to t=%.6g", state.kind, steps, state.t)
        return state

    # --- decay analysis --------------------------------------------------

    def admissible_b(self, profile: StationaryProfile) -> Tuple[float, float]:
        """(b, eps) with eps = ubar; b <= 0 means the small-ubar bound is not available."""
        eps = float(profile.ubar)
        g1 = self.coef.gamma1
        if eps >= g1:
            return float("nan"), eps
        th = profile.theta
        g = self.coef.g(th)
        sigma = (eps + self.coef.h(th) ** 2 / (g1 - eps)) / g
        b = self.settings.b_safety * 0.5 * float(np.min((1.0 - sigma) * g))
        return b, eps

    def rates(self, profile: StationaryProfile, b: float, eps: float) -> Tuple[float, float, float]:
        g1 = self.coef.gamma1
        cL, cU = self.coef.c_bounds()
        th = profile.theta
        g = self.coef.g(th)
        if eps < g1:
            sigma = (eps + self.coef.h(th) ** 2 / (g1 - eps)) / g
            r1 = 0.5 * float(np.min((1.0 - sigma) * g)) - b
        else:
            r1 = float("nan")
        r2 = (-eps * b - 2.0 * eps + b * cL * cL / 8.0) / (g1 * b)
        r3 = 0.5 * b * cL * cL / cU
        return r1, r2, r3

    def decay_report(self, profile: StationaryProfile, b: Optional[float] = None, T: Optional[float] = None,
                     seed: int = 0, initial: Optional[Tuple[np.ndarray, np.ndarray]] = None,
                     ) -> Tuple[DecayReport, EvolutionState]:
        T = self.settings.T if T is None else T
        auto_b, eps = self.admissible_b(profile)
        if b is None:
            if not auto_b > 0.0:
                logger.warning("ubar=%.6g fuera del régimen de ubar pequeño; se usa b=1", profile.ubar)
                b = 1.0
            else:
                b = auto_b
        if not b >= 0.0:
            raise RangeError("b debe ser no negativo")
        if initial is None:
            initial = perturbation(profile.x, seed, self.settings.modes, self.settings.amplitude)
        final = self.run(self.linearized_state(profile, *initial), T, b=b)
        t, e = (np.array(col) for col in zip(*final.energy_trace))
        if np.any(e <= 0.0):
            raise EvolutionError("energía no positiva en la traza")
        monotone = bool(np.all(np.diff(e[1:]) < 0.0))
        tail = t >= SPLIT_TRANSIENT * T
        slope = np.polyfit(t[tail], np.log(e[tail]), 1)[0]
        L_fit = float(-slope)
        r1, r2, r3 = self.rates(profile, b, eps)
        report = DecayReport(
            ubar=float(profile.ubar), beta=float(profile.beta), b=float(b), eps=eps,
            L_fit=L_fit, r1=r1, r2=r2, r3=r3,
            passed=bool(monotone and L_fit > 0.0), seed=int(seed), monotone=monotone, T=float(T),
        )
        logger.info("decay ubar=%.6g seed=%d: L_fit=%.6g passed=%s", report.ubar, seed, L_fit, report.passed)
        return report, final

    def self_convergence(self, profiles: Sequence[StationaryProfile], T: float = 0.1, dt: float = 1e-3,
                         amplitude: float = 1e-2) -> List[float]:
        """Max-norm gaps between terminal nonlinear states on nested grids, coarse to fine.

        Every grid starts from its profile plus the same smooth bump and takes the same
        time steps, so successive gaps shrink like dx**2.
        """
        dt = min(dt, *(self.default_dt(p.x, p.theta) for p in profiles))
        finals = []
        for profile in profiles:
            x = profile.x
            bump = amplitude * np.sin(np.pi * x)
            state = self.nonlinear_state(x, profile.u + bump, profile.theta + bump * np.cos(np.pi * x), profile.ubar)
            finals.append(self.run(state, T, dt=dt))
        gaps = []
        for coarse, fine in zip(finals, finals[1:]):
            cells, fine_cells = coarse.x.size - 1, fine.x.size - 1
            if fine_cells % cells:
                raise RangeError("las mallas de autoconvergencia deben estar anidadas")
            step = fine_cells // cells
            gaps.append(max(
                float(np.max(np.abs(coarse.u - fine.u[::step]))),
                float(np.max(np.abs(coarse.theta - fine.theta[::step]))),
            ))
        return gaps

    def small_ubar_bounds(self, profile: StationaryProfile) -> SmallUbarBounds:
        coef = self.coef
        th, eta, p0 = profile.theta, profile.eta, profile.p0
        c = coef.c(th)
        u_x = p0 / coef.g(th)
        theta_x = eta / (c * c)
        theta_xx = (coef.h(th) * u_x - c * coef.dc(th) * theta_x ** 2) / (c * c)
        k = int(np.argmax(np.abs(theta_x)))
        return SmallUbarBounds(
            ubar=float(profile.ubar),
            max_ux=float(np.max(np.abs(u_x))),
            max_theta_x=float(np.abs(theta_x[k])),
            max_theta_xx=float(np.max(np.abs(theta_xx))),
            argmax_theta_x=float(profile.x[k]),
        )
