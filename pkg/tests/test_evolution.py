import math
from dataclasses import replace

import numpy as np
import pytest

from nematic_shear.domain.errors import EvolutionError, RangeError
from nematic_shear.domain.models import EvolutionSettings
from nematic_shear.domain.services import EvolutionSolver, energy, perturbation
from nematic_shear.domain.services.evolution import MAX_FACTORS


def test_perturbation_is_seeded_and_pinned():
    x = np.linspace(0.0, 1.0, 129)
    U, Theta = perturbation(x, seed=7, amplitude=1e-3)
    U2, Theta2 = perturbation(x, seed=7, amplitude=1e-3)
    np.testing.assert_array_equal(U, U2)
    np.testing.assert_array_equal(Theta, Theta2)
    assert U[0] == U[-1] == Theta[0] == Theta[-1] == 0.0
    assert np.max(np.abs(U)) == pytest.approx(1e-3)
    assert not np.array_equal(U, perturbation(x, seed=8)[0])


def test_energy_of_zero_perturbation(coef, small_profile):
    zero = np.zeros_like(small_profile.x)
    assert energy(coef, small_profile.x, zero, zero, small_profile.theta, 0.5) == 0.0


def test_energy_of_a_sine_mode(coef, small_profile):
    x = small_profile.x
    mode = np.sin(np.pi * x)
    # K1 = K3 = 1 makes the gradient weight 1
    value = energy(coef, x, mode, np.zeros_like(x), small_profile.theta, 0.5)
    assert value == pytest.approx(0.5, rel=1e-4)
    value = energy(coef, x, np.zeros_like(x), mode, small_profile.theta, 0.0)
    assert value == pytest.approx(0.5 * np.pi ** 2, rel=1e-4)


def test_default_step_size(coef, small_profile):
    implicit = EvolutionSolver(coef, EvolutionSettings(implicit=True))
    explicit = EvolutionSolver(coef, EvolutionSettings(implicit=False))
    dx = small_profile.x[1] - small_profile.x[0]
    assert implicit.default_dt(small_profile.x, small_profile.theta) == pytest.approx(dx)
    assert explicit.default_dt(small_profile.x, small_profile.theta) < 0.25 * dx * dx


def test_stationary_profile_stays_put(solver, small_profile):
    state = solver.nonlinear_state(small_profile.x, small_profile.u, small_profile.theta, small_profile.ubar)
    final = solver.run(state, 1.0)
    assert final.t == pytest.approx(1.0)
    assert np.max(np.abs(final.u - small_profile.u)) < 1e-6
    assert np.max(np.abs(final.theta - small_profile.theta)) < 1e-6


def test_nonlinear_run_keeps_wall_values(solver, small_profile, theta0):
    bump = 1e-2 * np.sin(np.pi * small_profile.x)
    state = solver.nonlinear_state(small_profile.x, small_profile.u + bump, small_profile.theta + bump,
                                   small_profile.ubar, background=small_profile)
    final = solver.run(state, 0.2, b=0.5)
    assert final.u[0] == 0.0 and final.u[-1] == small_profile.ubar
    assert final.theta[0] == final.theta[-1] == theta0
    trace = [e for _, e in final.energy_trace]
    assert trace[-1] < trace[0]


def test_linearized_run_matches_nonlinear_difference(solver, small_profile):
    a = 1e-4
    x = small_profile.x
    mode = np.sin(np.pi * x)
    T = 0.05
    base = solver.run(solver.nonlinear_state(x, small_profile.u, small_profile.theta, small_profile.ubar), T)
    bumped = solver.run(
        solver.nonlinear_state(x, small_profile.u + a * mode, small_profile.theta + a * mode, small_profile.ubar), T,
    )
    linear = solver.run(solver.linearized_state(small_profile, mode, mode), T)
    du = (bumped.u - base.u) / a
    dtheta = (bumped.theta - base.theta) / a
    scale = max(np.max(np.abs(linear.first)), np.max(np.abs(linear.second)))
    assert np.max(np.abs(du - linear.first)) < 0.1 * scale
    assert np.max(np.abs(dtheta - linear.second)) < 0.1 * scale


def test_explicit_and_implicit_linearized_steps_agree(coef, small_profile, builder):
    coarse = builder.reconstruct(small_profile.beta, 129)
    x = coarse.x
    U, Theta = perturbation(x, seed=3)
    explicit = EvolutionSolver(coef, EvolutionSettings(implicit=False))
    implicit = EvolutionSolver(coef, EvolutionSettings(implicit=True))
    dt = explicit.default_dt(x, coarse.theta)
    a = explicit.run(explicit.linearized_state(coarse, U, Theta), 0.02, dt=dt)
    b = implicit.run(implicit.linearized_state(coarse, U, Theta), 0.02, dt=dt)
    scale = np.max(np.abs(a.second))
    assert np.max(np.abs(a.second - b.second)) < 0.05 * scale


def test_wrong_state_kind_is_rejected(solver, small_profile):
    state = solver.linearized_state(small_profile, np.zeros_like(small_profile.x), np.zeros_like(small_profile.x))
    with pytest.raises(EvolutionError):
        solver.step_nonlinear(state, 1e-3)
    plain = solver.nonlinear_state(small_profile.x, small_profile.u, small_profile.theta, small_profile.ubar)
    with pytest.raises(EvolutionError):
        solver.step_linearized(plain, 1e-3)


def test_admissible_weight(solver, small_profile, builder, bmap):
    b, eps = solver.admissible_b(small_profile)
    assert eps == pytest.approx(0.05)
    assert b > 0
    r1, r2, r3 = solver.rates(small_profile, b, eps)
    assert r1 > 0 and r3 > 0
    large = builder.reconstruct(bmap.solve_ubar(2.0, bmap.interval(0))[0], 129)
    assert math.isnan(solver.admissible_b(large)[0])


def test_small_ubar_energy_decays(solver, small_profile):
    report, final = solver.decay_report(small_profile, T=2.0, seed=1)
    assert report.passed
    assert report.monotone
    assert report.L_fit > 0
    assert report.b > 0
    assert final.t == pytest.approx(2.0)
    assert len(final.energy_trace) > 2


def test_decay_is_reproducible_per_seed(solver, small_profile):
    first, _ = solver.decay_report(small_profile, T=0.5, seed=4)
    second, _ = solver.decay_report(small_profile, T=0.5, seed=4)
    assert first == second


def test_large_ubar_falls_back_to_unit_weight(solver, builder, bmap):
    profile = builder.reconstruct(bmap.solve_ubar(2.0, bmap.interval(0))[0], 129)
    report, _ = solver.decay_report(profile, T=0.5, seed=0)
    assert report.b == 1.0
    assert math.isnan(report.r1)


def _mode(spectral, lam, beta, profile, amplitude=1e-3):
    shape = spectral.eigenfunction(lam, beta, profile.x)
    return amplitude * shape.U, amplitude * shape.Theta


def test_eigenmode_energy_rate(solver, spectral, small_profile):
    roots = spectral.eigen_scan(small_profile.beta, (-60.0, -0.01), 61)
    assert roots
    lam = max(r[0] for r in roots)
    initial = _mode(spectral, lam, small_profile.beta, small_profile)
    report, _ = solver.decay_report(small_profile, T=0.5, initial=initial)
    assert report.L_fit == pytest.approx(-2.0 * lam, rel=0.1)


def test_unstable_fold_branch_grows(solver, builder, analysis, spectral, minimum):
    slope = spectral.eigenvalue_slope(minimum.beta_star)
    lower, upper = analysis.two_roots_near(minimum, minimum.ubar_n + 0.1 * max(1.0, minimum.ubar_n))
    unstable = upper if slope.fit > 0 else lower
    lam = spectral.track_root(unstable, slope.fit * (unstable - minimum.beta_star))
    assert lam > 0
    profile = builder.reconstruct(unstable, 257)
    report, _ = solver.decay_report(profile, T=2.0, initial=_mode(spectral, lam, unstable, profile))
    assert not report.passed
    assert report.L_fit < 0


def test_small_ubar_bounds_scale_linearly(solver, bmap, builder):
    ratios = []
    for ubar in (0.05, 0.025):
        beta = bmap.solve_ubar(ubar, bmap.interval(0))[0]
        bounds = solver.small_ubar_bounds(builder.reconstruct(beta, 513))
        assert bounds.argmax_theta_x in (0.0, 1.0)
        ratios.append(bounds.ratios)
    np.testing.assert_allclose(ratios[0], ratios[1], rtol=0.1)


def test_energy_weight_switch(coef, small_profile):
    solver = EvolutionSolver(coef, replace(EvolutionSettings(), energy_weight="c"))
    state = solver.linearized_state(small_profile, *perturbation(small_profile.x, seed=0))
    assert solver.state_energy(state, 0.5) > 0


def test_uniform_angle_is_driven_by_the_shear(solver, small_profile, theta0):
    x = small_profile.x
    ubar = 0.05
    state = solver.nonlinear_state(x, ubar * x, np.full_like(x, theta0), ubar)
    final = solver.run(state, 0.05)
    # h(theta0) > 0 pushes theta below theta0 away from the walls
    assert np.all(final.theta[1:-1] < theta0)
    assert np.max(theta0 - final.theta) > 1e-4


def test_linearized_steps_superpose(solver, small_profile):
    x = small_profile.x
    U1, T1 = perturbation(x, seed=11)
    U2, T2 = perturbation(x, seed=12)
    T = 0.05
    one = solver.run(solver.linearized_state(small_profile, U1, T1), T)
    two = solver.run(solver.linearized_state(small_profile, U2, T2), T)
    both = solver.run(solver.linearized_state(small_profile, 2.0 * U1 - 3.0 * U2, 2.0 * T1 - 3.0 * T2), T)
    scale = max(np.max(np.abs(both.first)), np.max(np.abs(both.second)))
    np.testing.assert_allclose(both.first, 2.0 * one.first - 3.0 * two.first, atol=1e-12 * scale)
    np.testing.assert_allclose(both.second, 2.0 * one.second - 3.0 * two.second, atol=1e-12 * scale)
    zero = np.zeros_like(x)
    still = solver.run(solver.linearized_state(small_profile, zero, zero), T)
    assert not np.any(still.first) and not np.any(still.second)


def test_decay_over_ten_seeds_and_doubled_horizon(solver, small_profile):
    reports = [solver.decay_report(small_profile, T=2.0, seed=s)[0] for s in range(10)]
    assert all(r.passed for r in reports)
    doubled, _ = solver.decay_report(small_profile, T=4.0, seed=0)
    assert doubled.passed
    assert abs(doubled.L_fit - reports[0].L_fit) < 0.05 * reports[0].L_fit


def test_nonlinear_scheme_is_second_order(solver, builder, first_level):
    profiles = [builder.reconstruct(first_level, n) for n in (65, 129, 257)]
    coarse, fine = solver.self_convergence(profiles)
    assert 3.0 < coarse / fine < 5.0


def test_self_convergence_needs_nested_grids(solver, builder, first_level):
    profiles = [builder.reconstruct(first_level, n) for n in (65, 97)]
    with pytest.raises(RangeError):
        solver.self_convergence(profiles, T=0.01)


def test_terminal_fields_add_the_background(solver, small_profile):
    U, Theta = perturbation(small_profile.x, seed=2)
    state = solver.linearized_state(small_profile, U, Theta)
    fields = solver.terminal_fields(state)
    assert list(fields) == ["x", "u", "theta", "eta"]
    np.testing.assert_allclose(fields["u"], small_profile.u + U)
    np.testing.assert_allclose(fields["theta"], small_profile.theta + Theta)
    zero = np.zeros_like(U)
    rest = solver.terminal_fields(solver.linearized_state(small_profile, zero, zero))
    np.testing.assert_allclose(rest["eta"], small_profile.eta, atol=1e-6)


def test_linear_caches_stay_bounded(coef, small_profile, builder):
    solver = EvolutionSolver(coef)
    first = solver._stepper(small_profile)
    assert solver._stepper(small_profile) is first
    other = builder.reconstruct(small_profile.beta, 129)
    second = solver._stepper(other)
    assert second is not first
    assert solver._linear[0] is other
    for k in range(MAX_FACTORS + 3):
        second.factor(1e-3 * (k + 1))
    assert len(second._factors) == MAX_FACTORS
    assert 1e-3 * (MAX_FACTORS + 3) in second._factors
