import math
from dataclasses import replace

import numpy as np
import pytest

from nematic_shear.domain.errors import PoleError, ProfileError, QuadratureError, RangeError
from nematic_shear.domain.models import REGIME_ANTI, REGIME_DOMINANT, REGIME_SHIFTED, REGIME_UNSUPPORTED, default_material
from nematic_shear.domain.services import ProfileBuilder, adaptive_gauss, classify_regime, composite_simpson, unit_rule
from nematic_shear.infrastructure.repositories import load_config

from conftest import CONFIG_DIR, build_stack

SHIPPED = ["p0", "p0_bend", "p0_shifted", "dominant_gamma1", "isotropic_gamma"]


# --- quadrature ---------------------------------------------------------

def test_unit_rule_is_exact_for_polynomials():
    nodes, weights = unit_rule(8)
    assert weights.sum() == pytest.approx(1.0, abs=1e-15)
    assert weights @ nodes ** 7 == pytest.approx(1 / 8, abs=1e-15)


def test_adaptive_gauss_vector_integrand():
    total, panels = adaptive_gauss(lambda x: np.vstack([np.sin(x), np.cos(x) ** 2]), 0.0, math.pi, n=16, tol=1e-12)
    assert total[0] == pytest.approx(2.0, abs=1e-12)
    assert total[1] == pytest.approx(math.pi / 2, abs=1e-12)
    assert [p[0] for p in panels] == sorted(p[0] for p in panels)


def test_adaptive_gauss_rejects_empty_interval():
    with pytest.raises(QuadratureError):
        adaptive_gauss(np.sin, 1.0, 1.0)


# --- potential ----------------------------------------------------------

def test_potential_vanishes_at_theta0(potential, theta0):
    assert potential.G(theta0) == 0.0


def test_potential_against_simpson(potential, coef, theta0):
    target = theta0 - math.pi / 6
    ref = composite_simpson(coef.hg, theta0, target, 20000)
    assert potential.G(target) == pytest.approx(ref, abs=1e-10)


def test_potential_outside_window_uses_adaptive_quadrature(potential, coef, theta0):
    far = potential.window[1] + 0.5
    ref = composite_simpson(coef.hg, theta0, far, 40000)
    assert potential.G(far) == pytest.approx(ref, rel=1e-9)


def test_inverse_potential(potential):
    theta = np.array([-9.0, -3.0, -0.2, 0.5, 2.0, 6.0])
    np.testing.assert_allclose(potential.F(potential.G(theta)), theta, atol=1e-10)


def test_inverse_potential_out_of_range(potential):
    lo, _ = potential.range
    with pytest.raises(RangeError):
        potential.F(lo - 1.0)


def test_regime_classification():
    assert classify_regime(1.0, -1.0) == REGIME_ANTI
    assert classify_regime(1.0, 1.0) == REGIME_SHIFTED
    assert classify_regime(1.0, 0.5) == REGIME_DOMINANT
    assert classify_regime(1.0, -2.0) == REGIME_UNSUPPORTED


def test_p0_equilibria(potential):
    eq = potential.equilibria()
    assert eq.regime == REGIME_ANTI
    assert 0.0 in eq.e_n
    assert eq.pole_angles[0] == 0.0
    assert list(eq.beta_n) == sorted(eq.beta_n)
    assert all(b > 0 for b in eq.beta_n)
    assert eq.beta_n[0] == pytest.approx(-potential.G(0.0))


def test_shifted_equilibria_sit_on_half_periods():
    _, _, potential, _ = build_stack(default_material().replace(alpha2=0.0, alpha3=1.0, alpha5=-0.5, alpha6=0.5))
    eq = potential.equilibria()
    assert eq.regime == REGIME_SHIFTED
    np.testing.assert_allclose(np.mod(np.array(eq.e_n) - math.pi / 2, math.pi), 0.0, atol=1e-12)


def test_dominant_regime_has_no_poles():
    _, _, potential, bmap = build_stack(default_material().replace(alpha3=0.2, alpha5=0.4, alpha6=-0.4))
    eq = potential.equilibria()
    assert eq.regime == REGIME_DOMINANT
    assert not eq.has_poles
    assert eq.h_minima
    assert bmap.poles == ()


# --- D(beta) ------------------------------------------------------------

def test_levels_near_poles_are_rejected(bmap):
    with pytest.raises(PoleError):
        bmap.D(bmap.poles[0])
    with pytest.raises(RangeError):
        bmap.D(-1.0)


def test_angle_form_matches_t_form(bmap, first_level):
    assert bmap.D_tform(first_level) == pytest.approx(bmap.D(first_level), rel=1e-6)


def test_t_form_only_on_first_interval(bmap, minimum):
    with pytest.raises(RangeError):
        bmap.D_tform(minimum.beta_star)


def test_derivative_matches_differences(bmap, first_level):
    step = 1e-5 * first_level
    fd = (bmap.D(first_level + step) - bmap.D(first_level - step)) / (2 * step)
    assert bmap.D_prime(first_level) == pytest.approx(fd, rel=1e-6)


def test_regularized_m_integrals_equal_literal_ones(bmap, first_level):
    regular = bmap.m_integrals(first_level)
    literal = bmap.literal_m_integrals(first_level)
    np.testing.assert_allclose(regular, literal, rtol=1e-6)


def test_literal_m_integrals_diverge_past_a_pole(bmap, minimum):
    with pytest.raises(RangeError):
        bmap.literal_m_integrals(minimum.beta_star)


# --- profiles -----------------------------------------------------------

def test_shooting_oracle_reproduces_ubar(bmap, builder, first_level):
    shot = builder.shooting_ubar(first_level)
    assert shot.ubar == pytest.approx(2 * bmap.D(first_level), rel=1e-6)
    assert shot.p0 == pytest.approx(bmap.p0(first_level), rel=1e-6)


def test_profile_boundary_and_symmetry(builder, first_level, theta0):
    profile = builder.reconstruct(first_level, 257)
    builder.check(profile)
    assert profile.u[0] == 0.0
    assert profile.u[-1] == pytest.approx(profile.ubar, rel=1e-10)
    assert profile.theta[0] == pytest.approx(theta0, abs=1e-12)
    assert profile.theta[profile.mid] == pytest.approx(profile.theta_tilde, abs=1e-12)
    assert np.all(np.diff(profile.u) > 0)
    np.testing.assert_allclose(profile.theta, profile.theta[::-1], atol=1e-10)


def test_profile_on_second_interval_crosses_equilibrium(builder, minimum):
    profile = builder.reconstruct(minimum.beta_star, 257)
    builder.check(profile)
    assert profile.theta_tilde < 0.0 < profile.theta[0]


def test_conserved_quantities(builder, first_level):
    drift = builder.conserved_drift(builder.reconstruct(first_level, 513))
    assert drift.dH1 < 1e-7
    assert drift.dH2 < 1e-8 * max(1.0, abs(drift.H2_start))
    assert drift.dH3 < 1e-7
    assert drift.H2_start == pytest.approx(builder.bmap.p0(first_level) * first_level, rel=1e-10)


def test_residual_is_second_order(builder, first_level):
    coarse = builder.residual(builder.reconstruct(first_level, 129))
    fine = builder.residual(builder.reconstruct(first_level, 257))
    assert coarse / fine > 3.0


def test_even_grid_is_rejected(builder, first_level):
    with pytest.raises(ProfileError):
        builder.reconstruct(first_level, 128)


def test_simpson_reference_is_exact_for_cubics():
    assert composite_simpson(lambda x: x ** 3 - 2 * x, 0.0, 2.0, 3) == pytest.approx(0.0, abs=1e-14)
    assert composite_simpson(np.cos, 0.0, math.pi / 2, 2000) == pytest.approx(1.0, abs=1e-12)


def test_D_vanishes_at_small_levels(bmap):
    assert bmap.D(1e-4) < bmap.D(1e-3) < 0.1


def test_D_diverges_monotonically_at_the_first_pole(bmap):
    pole = bmap.poles[0]
    values = [bmap.D(pole * (1.0 - 2.0 ** -k)) for k in range(4, 13)]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_conserved_drift_sees_a_perturbed_angle(builder, first_level):
    profile = builder.reconstruct(first_level, 513)
    bumped = replace(profile, theta=profile.theta + 1e-3 * np.sin(np.pi * profile.x))
    assert builder.conserved_drift(bumped).dH2 > 1e-5
    assert builder.conserved_drift(profile).dH2 < 1e-8 * max(1.0, profile.p0 * profile.beta)


@pytest.mark.parametrize("name", SHIPPED)
def test_conservation_on_shipped_configs(name):
    config = load_config(str(CONFIG_DIR / f"{name}.json"))
    _, _, _, bmap = build_stack(config.material)
    builder = ProfileBuilder(bmap)
    _, hi = bmap.interval(0)
    for f in (0.25, 0.5, 0.75):
        drift = builder.conserved_drift(builder.reconstruct(f * hi, config.solver.profile_points))
        assert drift.dH1 < 1e-7
        assert drift.dH2 < 1e-7 * max(1.0, abs(drift.H2_start))
        assert drift.dH3 < 1e-7


def test_reconstruction_across_the_second_interval(bmap, builder):
    lo, hi = bmap.interval(1)
    # levels where the inversion once stalled on the quadrature noise
    betas = list(np.linspace(lo, hi, 52)[1:-1]) + [1.126016, 1.204058]
    for beta in betas:
        if not lo < beta < hi:
            continue
        profile = builder.reconstruct(float(beta))
        assert abs(profile.u[-1] - profile.ubar) < 1e-8 * max(1.0, profile.ubar)
