from __future__ import annotations
import logging
import math
from typing import List, Optional, Tuple

import numpy as np
from scipy import integrate

from nematic_shear.domain.errors import QuadratureError, RangeError
from nematic_shear.domain.models import (
    EquilibriumSet,
    REGIME_ANTI,
    REGIME_DOMINANT,
    REGIME_SHIFTED,
    REGIME_UNSUPPORTED,
)
from .coefficients import Coefficients
from .quadrature import segment_mean

logger = logging.getLogger(__name__)

PANEL_WIDTH = math.pi / 64
PANEL_NODES = 16
DERIVATIVE_FLOOR = 1e-14
EQUILIBRIUM_GUARD = 1e-8


def classify_regime(gamma1: float, gamma2: float) -> str:
    tol = 1e-12 * max(1.0, abs(gamma1))
    if abs(gamma1 + gamma2) <= tol:
        return REGIME_ANTI
    if abs(gamma1 - gamma2) <= tol:
        return REGIME_SHIFTED
    if gamma1 > abs(gamma2):
        return REGIME_DOMINANT
    return REGIME_UNSUPPORTED


def equilibrium_offset(regime: str) -> Optional[float]:
    """Offset of the equilibrium lattice e_n = offset + n*pi; None when h has no zeros on a lattice."""
    if regime == REGIME_ANTI:
        return 0.0
    if regime == REGIME_SHIFTED:
        return 0.5 * math.pi
    return None


def distance_to_equilibria(theta: float, regime: str) -> float:
    offset = equilibrium_offset(regime)
    if offset is None:
        return math.inf
    k = round((theta - offset) / math.pi)
    return abs(theta - offset - k * math.pi)


def _lattice(offset: float, lo: float, hi: float) -> List[float]:
    """Points offset + n*pi inside [lo, hi]."""
    first = math.ceil((lo - offset) / math.pi)
    last = math.floor((hi - offset) / math.pi)
    return [offset + n * math.pi for n in range(first, last + 1)]


class Potential:
    """G(theta) = integral of h/g from theta0, tabulated on Gauss-Legendre panels.

    The table is built once in the constructor and never mutated, so an instance
    can be shared between worker threads.
    """

    def __init__(self, coefficients: Coefficients, window: Tuple[float, float], tol: float = 1e-12):
        self.coef = coefficients
        self.theta0 = coefficients.params.theta0
        lo, hi = window
        if not (lo < self.theta0 < hi):
            raise RangeError("la ventana angular debe contener theta0")
        self.window = (float(lo), float(hi))
        self.tol = tol
        self._edges, self._g_edges = self._build_table()
        logger.debug("potential table: %d panels on [%.6g, %.6g]", self._edges.size - 1, lo, hi)

    def _panel_integral(self, a: float, b: float) -> float:
        return (b - a) * float(segment_mean(self.coef.hg, a, b, PANEL_NODES))

    def _refine(self, a: float, b: float, whole: float, depth: int, out: List[Tuple[float, float, float]]) -> None:
        mid = 0.5 * (a + b)
        left = self._panel_integral(a, mid)
        right = self._panel_integral(mid, b)
        span = self.window[1] - self.window[0]
        if abs(left + right - whole) <= self.tol * (b - a) / span:
            out.append((a, b, left + right))
            return
        if depth >= 30:
            raise QuadratureError("tabla del potencial sin convergencia", (a, b))
        self._refine(a, mid, left, depth + 1, out)
        self._refine(mid, b, right, depth + 1, out)

    def _build_table(self) -> Tuple[np.ndarray, np.ndarray]:
        lo, hi = self.window
        n_below = max(1, math.ceil((self.theta0 - lo) / PANEL_WIDTH))
        n_above = max(1, math.ceil((hi - self.theta0) / PANEL_WIDTH))
        base = np.concatenate([
            np.linspace(lo, self.theta0, n_below + 1),
            np.linspace(self.theta0, hi, n_above + 1)[1:],
        ])
        panels: List[Tuple[float, float, float]] = []
        for a, b in zip(base[:-1], base[1:]):
            self._refine(a, b, self._panel_integral(a, b), 0, panels)
        edges = np.array([panels[0][0]] + [p[1] for p in panels])
        increments = np.array([p[2] for p in panels])
        cumulative = np.concatenate([[0.0], np.cumsum(increments)])
        # shift so that G(theta0) = 0 exactly
        k0 = int(np.argmin(np.abs(edges - self.theta0)))
        g_edges = cumulative - cumulative[k0]
        edges.setflags(write=False)
        g_edges.setflags(write=False)
        return edges, g_edges

    # --- evaluation -----------------------------------------------------

    def _index(self, z: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self._edges, z, side="right") - 1
        return np.clip(idx, 0, self._edges.size - 2)

    def _in_window(self, z: np.ndarray) -> np.ndarray:
        return (z >= self._edges[0]) & (z <= self._edges[-1])

    def _quad(self, theta: float) -> float:
        val, err, *rest = integrate.quad(self.coef.hg, self.theta0, theta, epsabs=self.tol, epsrel=0.0, limit=400, full_output=1)
        if len(rest) > 1:
            raise QuadratureError("cuadratura adaptativa de h/g sin convergencia", (self.theta0, theta))
        return float(val)

    def G(self, theta):
        z = np.asarray(theta, dtype=float)
        if not np.all(np.isfinite(z)):
            raise RangeError("G requiere ángulos finitos")
        inside = self._in_window(z)
        idx = self._index(z)
        left = self._edges[idx]
        out = self._g_edges[idx] + (z - left) * segment_mean(self.coef.hg, left, z, PANEL_NODES)
        if not np.all(inside):
            flat = out.reshape(-1)
            for k in np.flatnonzero(~inside.reshape(-1)):
                flat[k] = self._quad(float(z.reshape(-1)[k]))
            out = flat.reshape(z.shape)
        return out if out.ndim else float(out)

    def delta(self, a, z) -> np.ndarray:
        """G(z) - G(a) for z >= a inside the window, without cancellation."""
        a = np.asarray(a, dtype=float)
        z = np.asarray(z, dtype=float)
        a, z = np.broadcast_arrays(a, z)
        if not (np.all(self._in_window(a)) and np.all(self._in_window(z))):
            raise RangeError("ángulo fuera de la ventana configurada")
        ia = self._index(a)
        iz = self._index(z)
        hg = self.coef.hg
        same = (z - a) * segment_mean(hg, a, z, PANEL_NODES)
        right_a = self._edges[np.minimum(ia + 1, self._edges.size - 1)]
        left_z = self._edges[iz]
        head = (right_a - a) * segment_mean(hg, a, right_a, PANEL_NODES)
        tail = (z - left_z) * segment_mean(hg, left_z, z, PANEL_NODES)
        middle = self._g_edges[iz] - self._g_edges[np.minimum(ia + 1, self._edges.size - 1)]
        return np.where(iz <= ia, same, head + middle + tail)

    def slope(self, a, z) -> np.ndarray:
        """Mean of h/g over [a, z]; equals h/g(a) when z == a."""
        a = np.asarray(a, dtype=float)
        z = np.asarray(z, dtype=float)
        a, z = np.broadcast_arrays(a, z)
        near = (z - a) < PANEL_WIDTH
        direct = segment_mean(self.coef.hg, a, z, PANEL_NODES)
        length = np.where(near, 1.0, z - a)
        far = self.delta(a, np.where(near, a, z)) / length
        return np.where(near, direct, far)

    def slope_shift(self, a, z) -> np.ndarray:
        """Derivative of slope(a, a + L) in a at fixed length L = z - a."""
        a = np.asarray(a, dtype=float)
        z = np.asarray(z, dtype=float)
        a, z = np.broadcast_arrays(a, z)
        hg = self.coef.hg
        near = (z - a) < PANEL_WIDTH
        direct = segment_mean(self.coef.dhg, a, z, PANEL_NODES)
        length = np.where(near, 1.0, z - a)
        far = (hg(z) - hg(a)) / length
        return np.where(near, direct, far)

    # --- inverse --------------------------------------------------------

    @property
    def range(self) -> Tuple[float, float]:
        return float(self._g_edges[0]), float(self._g_edges[-1])

    def F(self, s):
        """Inverse of G: bracketed bisection refined by a floored Newton step."""
        s_arr = np.asarray(s, dtype=float)
        lo_g, hi_g = self.range
        if np.any(s_arr < lo_g) or np.any(s_arr > hi_g) or not np.all(np.isfinite(s_arr)):
            raise RangeError("valor fuera del rango de G en la ventana configurada")
        flat = s_arr.reshape(-1)
        k = np.clip(np.searchsorted(self._g_edges, flat, side="right") - 1, 0, self._edges.size - 2)
        lo = self._edges[k].copy()
        hi = self._edges[k + 1].copy()
        g_lo = self._g_edges[k]
        g_hi = self._g_edges[k + 1]
        span = np.where(g_hi > g_lo, g_hi - g_lo, 1.0)
        theta = lo + (hi - lo) * np.clip((flat - g_lo) / span, 0.0, 1.0)
        scale = np.maximum(np.abs(flat), 1e-6)
        for _ in range(100):
            r = self.G(theta) - flat
            done = np.abs(r) <= 1e-13 * scale
            if np.all(done | (hi - lo <= 4e-16 * np.maximum(1.0, np.abs(theta)))):
                break
            lo = np.where(r < 0, theta, lo)
            hi = np.where(r > 0, theta, hi)
            step = r / np.maximum(self.coef.hg(theta), DERIVATIVE_FLOOR)
            newton = theta - step
            bad = (newton <= lo) | (newton >= hi) | ~np.isfinite(newton)
            theta = np.where(done, theta, np.where(bad, 0.5 * (lo + hi), newton))
        out = theta.reshape(s_arr.shape)
        return out if out.ndim else float(out)

    # --- equilibria -----------------------------------------------------

    def equilibria(self, window: Optional[Tuple[float, float]] = None) -> EquilibriumSet:
        lo, hi = window if window is not None else self.window
        g1, g2 = self.coef.gamma1, self.coef.gamma2
        regime = classify_regime(g1, g2)
        offset = equilibrium_offset(regime)
        if offset is not None:
            e_n = _lattice(offset, lo, hi)
            below = sorted((e for e in e_n if e < self.theta0), reverse=True)
            betas = [-float(self.G(e)) for e in below]
            return EquilibriumSet(
                regime=regime,
                e_n=tuple(e_n),
                beta_n=tuple(betas),
                pole_angles=tuple(below),
            )
        if regime == REGIME_DOMINANT:
            offset = 0.5 * math.pi if g2 > 0 else 0.0
            marks = sorted((e for e in _lattice(offset, lo, hi) if e < self.theta0), reverse=True)
            return EquilibriumSet(
                regime=regime,
                h_minima=tuple(marks),
                h_minima_beta=tuple(-float(self.G(e)) for e in marks),
            )
        return EquilibriumSet(regime=REGIME_UNSUPPORTED)


def composite_simpson(f, a: float, b: float, panels: int) -> float:
    """Fixed-grid composite Simpson rule; used as an independent reference."""
    panels += panels % 2
    x = np.linspace(a, b, panels + 1)
    return float(integrate.simpson(f(x), x=x))
