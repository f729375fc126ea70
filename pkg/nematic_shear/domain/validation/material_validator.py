from __future__ import annotations
import math
from typing import List

import numpy as np
from scipy import optimize

from nematic_shear.domain.models import CheckResult, MaterialParams, PARAM_KEYS, REGIME_UNSUPPORTED, ValidationReport
from nematic_shear.domain.services.coefficients import Coefficients
from nematic_shear.domain.services.potential import EQUILIBRIUM_GUARD, classify_regime, distance_to_equilibria

DAMPING_GRID = 2001
RELATION_TOL = 1e-12


def min_damping(coef: Coefficients) -> float:
    """C-bar: min of g - h^2/gamma1 over a period, grid scan plus bounded refinement."""
    theta = np.linspace(0.0, math.pi, DAMPING_GRID)
    values = coef.damping(theta)
    k = int(np.argmin(values))
    step = theta[1] - theta[0]
    res = optimize.minimize_scalar(
        coef.damping, bounds=(theta[k] - step, theta[k] + step), method="bounded",
        options={"xatol": 1e-12},
    )
    return float(min(values[k], res.fun))


def _positive(name: str, value: float) -> CheckResult:
    return CheckResult(name=name, passed=bool(value > 0.0), margin=float(value))


def validate_material(params: MaterialParams) -> ValidationReport:
    values = [getattr(params, k) for k in PARAM_KEYS]
    if not all(math.isfinite(v) for v in values):
        return ValidationReport(checks=[CheckResult("finite", False, float("nan"), "parámetros no finitos")])
    p = params
    g1, g2 = p.gamma1, p.gamma2
    scale = max(1.0, *(abs(v) for v in values[:6]))
    parodi = (p.alpha2 + p.alpha3) - (p.alpha6 - p.alpha5)
    checks: List[CheckResult] = [
        CheckResult(
            name="alpha2+alpha3=alpha6-alpha5",
            passed=abs(parodi) <= RELATION_TOL * scale,
            margin=-abs(parodi),
            detail="" if abs(parodi) <= RELATION_TOL * scale else f"desviación {parodi:.3g}",
        ),
        _positive("alpha4>0", p.alpha4),
        _positive("2alpha1+3alpha4+2alpha5+2alpha6>0", 2 * p.alpha1 + 3 * p.alpha4 + 2 * p.alpha5 + 2 * p.alpha6),
        _positive("gamma1>0", g1),
        _positive("2alpha4+alpha5+alpha6>0", 2 * p.alpha4 + p.alpha5 + p.alpha6),
        _positive(
            "4gamma1(2alpha4+alpha5+alpha6)>(alpha2+alpha3+gamma2)^2",
            4 * g1 * (2 * p.alpha4 + p.alpha5 + p.alpha6) - (p.alpha2 + p.alpha3 + g2) ** 2,
        ),
        _positive("K1>0", p.K1),
        _positive("K3>0", p.K3),
    ]
    regime = classify_regime(g1, g2)
    c_bar = float("nan")
    if g1 > 0.0 and p.K1 > 0.0 and p.K3 > 0.0:
        coef = Coefficients(p)
        c_bar = min_damping(coef)
        checks.append(_positive("positive_damping", c_bar))
    dist = distance_to_equilibria(p.theta0, regime)
    checks.append(CheckResult(
        name="theta0 not in e_n",
        passed=dist >= EQUILIBRIUM_GUARD,
        margin=min(dist, math.pi) - EQUILIBRIUM_GUARD,
        detail="" if dist >= EQUILIBRIUM_GUARD else "theta0 es un equilibrio",
    ))
    checks.append(CheckResult(
        name="gamma1>=|gamma2|",
        passed=regime != REGIME_UNSUPPORTED,
        margin=g1 - abs(g2),
        detail="" if regime != REGIME_UNSUPPORTED else "régimen gamma1<|gamma2| no soportado",
    ))
    return ValidationReport(checks=checks, c_bar=c_bar, gamma1=g1, gamma2=g2, regime=regime)
