import math

import numpy as np
import pytest

from nematic_shear.domain.models import REGIME_ANTI, default_material
from nematic_shear.domain.services import Coefficients
from nematic_shear.domain.validation import min_damping, validate_material

ANGLES = np.array([-2.3, -0.4, 0.3, 1.0, 2.7])


def _fd(f, theta, step=1e-6):
    return (f(theta + step) - f(theta - step)) / (2 * step)


def test_p0_is_admissible():
    report = validate_material(default_material())
    assert report.ok
    assert report.regime == REGIME_ANTI
    assert report.gamma1 == pytest.approx(1.0)
    assert report.gamma2 == pytest.approx(-1.0)
    assert report.c_bar > 0


def test_negative_alpha4_fails_named_check():
    report = validate_material(default_material().replace(alpha4=-1.0))
    assert not report.ok
    assert "alpha4>0" in [c.name for c in report.failed()]
    assert report.get("alpha4>0").margin == -1.0


def test_parodi_relation_violation():
    report = validate_material(default_material().replace(alpha3=0.3))
    failed = [c.name for c in report.failed()]
    assert "alpha2+alpha3=alpha6-alpha5" in failed


def test_unsupported_regime_is_reported():
    # gamma1 = 1, gamma2 = -2 with the Parodi relation kept
    params = default_material().replace(alpha2=-1.5, alpha3=-0.5, alpha5=1.0, alpha6=-1.0)
    report = validate_material(params)
    assert "gamma1>=|gamma2|" in [c.name for c in report.failed()]


def test_non_finite_parameters():
    report = validate_material(default_material().replace(K3=float("nan")))
    assert not report.ok
    assert report.checks[0].name == "finite"


def test_p0_coefficients_closed_forms():
    coef = Coefficients(default_material())
    # gamma1 = -gamma2 = 1 gives h = sin^2, K1 = K3 = 1 gives c = 1
    np.testing.assert_allclose(coef.h(ANGLES), np.sin(ANGLES) ** 2, atol=1e-15)
    np.testing.assert_allclose(coef.c(ANGLES), 1.0)
    np.testing.assert_allclose(coef.dc(ANGLES), 0.0, atol=1e-15)
    assert coef.c_bounds() == (1.0, 1.0)


@pytest.mark.parametrize("name,deriv", [("g", "dg"), ("h", "dh"), ("c", "dc"), ("dc", "d2c"), ("hg", "dhg")])
def test_exact_derivatives_match_differences(name, deriv):
    coef = Coefficients(default_material().replace(K3=4.0, alpha5=0.3, alpha6=-0.7, alpha2=-0.8, alpha3=-0.4))
    exact = getattr(coef, deriv)(ANGLES)
    approx = _fd(getattr(coef, name), ANGLES)
    np.testing.assert_allclose(exact, approx, rtol=1e-6, atol=1e-8)


def test_m_integrands_are_derivatives():
    coef = Coefficients(default_material())
    theta = np.array([0.4, 0.9, 1.3])
    np.testing.assert_allclose(
        coef.d_cg_over_h(theta), _fd(lambda t: coef.c(t) * coef.g(t) / coef.h(t), theta), rtol=1e-6,
    )
    np.testing.assert_allclose(coef.d_c_over_h(theta), _fd(lambda t: coef.c(t) / coef.h(t), theta), rtol=1e-6)


def test_min_damping_matches_dense_grid():
    coef = Coefficients(default_material())
    dense = coef.damping(np.linspace(0.0, math.pi, 200001)).min()
    value = min_damping(coef)
    assert value <= dense + 1e-12
    assert value == pytest.approx(dense, abs=1e-9)


SHIFTED = dict(alpha2=0.0, alpha3=1.0, alpha5=-0.5, alpha6=0.5)


@pytest.mark.parametrize("offset,changes", [(0.0, {}), (0.5 * math.pi, SHIFTED)])
def test_theta0_guard_uses_distance_to_equilibria(offset, changes):
    base = default_material().replace(**changes)
    near = validate_material(base.replace(theta0=offset + math.pi + 1e-7))
    assert near.get("theta0 not in e_n").passed
    assert near.ok
    on = validate_material(base.replace(theta0=offset + math.pi + 1e-9))
    assert not on.get("theta0 not in e_n").passed
    assert not on.ok


def test_theta0_guard_is_vacuous_without_equilibria():
    # gamma1 = 1 > |gamma2| = 0.5: h never vanishes
    params = default_material().replace(alpha2=-0.75, alpha3=0.25, alpha5=0.25, alpha6=-0.25, theta0=math.pi)
    report = validate_material(params)
    assert report.get("theta0 not in e_n").passed
