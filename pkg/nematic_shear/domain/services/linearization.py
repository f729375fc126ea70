from __future__ import annotations

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from nematic_shear.domain.models import StationaryProfile
from .coefficients import Coefficients


class LinearizedSystem:
    """Coefficient matrices A(x), B(x) of Z' = (A + lambda B) Z along a profile.

    Z = (U, P, Theta, Q). The background angle and its flux are interpolated
    with Hermite cubics whose nodal slopes come from the stationary equations.
    """

    def __init__(self, profile: StationaryProfile, coef: Coefficients):
        self.profile = profile
        self.coef = coef
        x, th, eta, p0 = profile.x, profile.theta, profile.eta, profile.p0
        c = coef.c(th)
        theta_x = eta / c ** 2
        eta_x = coef.dc(th) * eta ** 2 / c ** 3 + coef.hg(th) * p0
        self._theta = CubicHermiteSpline(x, th, theta_x)
        self._eta = CubicHermiteSpline(x, eta, eta_x)

    def background(self, x):
        """(theta, theta_x, u_x) at x."""
        th = self._theta(x)
        c2 = self.coef.c2(th)
        return th, self._eta(x) / c2, self.profile.p0 / self.coef.g(th)

    def b1(self, th, theta_x):
        coef = self.coef
        c = coef.c(th)
        dc = coef.dc(th)
        return coef.dhg(th) * self.profile.p0 + (c * coef.d2c(th) - 3.0 * dc * dc) * theta_x ** 2

    def b2(self, th):
        return self.coef.b2(th)

    def A(self, x: float) -> np.ndarray:
        coef = self.coef
        th, theta_x, u_x = self.background(x)
        g = coef.g(th)
        c = coef.c(th)
        k = 2.0 * coef.dc(th) * theta_x / c
        return np.array([
            [0.0, 1.0 / g, -coef.dg(th) * u_x / g, 0.0],
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, -k, 1.0 / (c * c)],
            [0.0, coef.h(th) / g, self.b1(th, theta_x), k],
        ])

    def B(self, x: float) -> np.ndarray:
        th = self._theta(x)
        return np.array([
            [0.0, 0.0, -self.coef.hg(th), 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, self.b2(th), 0.0],
        ])

    def B_stack(self, xs: np.ndarray) -> np.ndarray:
        """B at every abscissa, shape (len(xs), 4, 4)."""
        th = self._theta(np.asarray(xs, dtype=float))
        out = np.zeros(th.shape + (4, 4))
        out[:, 0, 2] = -self.coef.hg(th)
        out[:, 1, 0] = 1.0
        out[:, 3, 2] = self.b2(th)
        return out

    def matrix(self, x: float, lam: float) -> np.ndarray:
        return self.A(x) + lam * self.B(x)
