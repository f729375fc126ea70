from __future__ import annotations

import numpy as np

from nematic_shear.domain.models import MaterialParams


class Coefficients:
    """Pointwise coefficient functions g, h, c and their exact derivatives.

    Every method accepts scalars or numpy arrays and broadcasts.
    """

    def __init__(self, params: MaterialParams):
        self.params = params
        p = params
        self.gamma1 = p.gamma1
        self.gamma2 = p.gamma2
        self._a = 0.5 * (p.alpha5 - p.alpha2)
        self._b = 0.5 * (p.alpha3 + p.alpha6)
        self._k = p.K3 - p.K1

    def g(self, theta):
        s2 = np.sin(theta) ** 2
        c2 = np.cos(theta) ** 2
        p = self.params
        return p.alpha1 * s2 * c2 + self._a * s2 + self._b * c2 + 0.5 * p.alpha4

    def dg(self, theta):
        s = np.sin(2 * theta)
        return s * (self.params.alpha1 * np.cos(2 * theta) + self._a - self._b)

    def h(self, theta):
        return 0.5 * (self.gamma1 + self.gamma2 * np.cos(2 * theta))

    def dh(self, theta):
        return -self.gamma2 * np.sin(2 * theta)

    def c2(self, theta):
        p = self.params
        return p.K1 * np.cos(theta) ** 2 + p.K3 * np.sin(theta) ** 2

    def c(self, theta):
        return np.sqrt(self.c2(theta))

    def dc(self, theta):
        return self._k * np.sin(2 * theta) / (2 * self.c(theta))

    def d2c(self, theta):
        c = self.c(theta)
        ks = self._k * np.sin(2 * theta)
        return self._k * np.cos(2 * theta) / c - ks * ks / (4 * c ** 3)

    def hg(self, theta):
        return self.h(theta) / self.g(theta)

    def dhg(self, theta):
        g = self.g(theta)
        return (self.dh(theta) * g - self.h(theta) * self.dg(theta)) / (g * g)

    def damping(self, theta):
        """Effective diffusivity g - h^2/gamma1."""
        return self.g(theta) - self.h(theta) ** 2 / self.gamma1

    def b2(self, theta):
        return self.gamma1 - self.h(theta) ** 2 / self.g(theta)

    # integrands of the literal M-type integrals
    def d_cg_over_h(self, theta):
        h = self.h(theta)
        c = self.c(theta)
        g = self.g(theta)
        return (self.dc(theta) * g + c * self.dg(theta)) / h - c * g * self.dh(theta) / (h * h)

    def d_c_over_h(self, theta):
        h = self.h(theta)
        c = self.c(theta)
        return self.dc(theta) / h - c * self.dh(theta) / (h * h)

    def c_bounds(self):
        """(c_L, c_U): global bounds of c over all angles."""
        lo, hi = sorted((self.params.K1, self.params.K3))
        return float(np.sqrt(lo)), float(np.sqrt(hi))
