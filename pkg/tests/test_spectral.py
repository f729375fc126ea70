import numpy as np
import pytest

from nematic_shear.domain.services import wall_det

E = np.eye(4)


@pytest.fixture(scope="module")
def second_level(bmap, minimum):
    """A level of the second interval between its left end and beta*."""
    lo, _ = bmap.interval(1)
    return 0.5 * (lo + minimum.beta_star)


@pytest.fixture(scope="module")
def slope(spectral, minimum):
    return spectral.eigenvalue_slope(minimum.beta_star)


def test_wall_determinant_orientation():
    assert wall_det(E[0], E[2]) == pytest.approx(-1.0)
    assert wall_det(E[2], E[0]) == pytest.approx(1.0)
    assert wall_det(E[1], E[2]) == pytest.approx(0.0)


def test_system_is_trace_free(spectral, first_level):
    system = spectral.system(first_level)
    for x in (0.1, 0.5, 0.93):
        assert np.trace(system.matrix(x, 3.0)) == pytest.approx(0.0, abs=1e-12)


def test_evans_does_not_depend_on_match_point(spectral, first_level):
    ev = spectral.evans(-2.0, first_level)
    scale = max(abs(v) for _, v in ev.checkpoints)
    assert ev.x_residual <= 1e-6 * scale
    assert ev.diagnostics["nfev"] > 0


def test_zero_lambda_identity_on_first_interval(spectral, first_level):
    shot, predicted, gap = spectral.evans_zero_identity(first_level)
    assert predicted < 0
    assert gap < 1e-5


def test_zero_lambda_identity_on_second_interval(spectral, second_level):
    shot, predicted, gap = spectral.evans_zero_identity(second_level)
    assert predicted > 0
    assert gap < 1e-5


def test_monodromy_closed_forms(spectral, first_level):
    mono = spectral.monodromy(first_level)
    assert mono.det_max_drift < 1e-8
    assert max(mono.gaps().values()) < 1e-5
    shot = spectral.E(0.0, first_level)
    assert mono.evans_from_monodromy == pytest.approx(shot, rel=1e-6)
    data = mono.to_dict()
    assert set(data["gaps"]) == {"T12", "T14", "T32", "T34"}


def test_lambda_derivative_three_ways(spectral, first_level):
    deriv = spectral.evans_lambda_derivative(first_level)
    assert deriv.gap < 1e-4
    assert deriv.fd_half == pytest.approx(deriv.fd, rel=1e-3)
    assert deriv.reduced == pytest.approx(deriv.vp, rel=1e-6)


def test_zero_eigenvalue_at_the_fold(slope):
    assert abs(slope.lam_star) < 1e-7
    assert slope.lam_minus * slope.lam_plus < 0


def test_eigenvalue_slope_formula(slope):
    assert slope.gap < 5e-3
    assert np.sign(slope.formula) == np.sign(slope.fit)


def test_eigenfunction_satisfies_both_walls(spectral, minimum, slope):
    x = np.linspace(0.0, 1.0, 101)
    mode = spectral.eigenfunction(slope.lam_star, minimum.beta_star, x)
    assert mode.boundary_residual < 1e-6
    assert max(np.max(np.abs(mode.U)), np.max(np.abs(mode.Theta))) == pytest.approx(1.0)
    assert abs(mode.U[0]) < 1e-12 and abs(mode.Theta[0]) < 1e-12


def test_scan_brackets_the_fold_eigenvalue(spectral, minimum, slope):
    roots = spectral.eigen_scan(minimum.beta_star, (-0.35, 0.25), 7)
    assert any(abs(lam - slope.lam_star) < 1e-6 for lam, _ in roots)


def test_first_interval_has_no_unstable_eigenvalue(spectral, first_level):
    assert spectral.eigen_scan(first_level, (0.01, 10.0), 9) == []


def test_eigen_report(spectral, first_level):
    report = spectral.eigen_report(first_level, (-5.0, 1.0), 5)
    data = report.to_dict()
    assert data["identity_gap"] < 1e-5
    assert data["Dprime"] > 0
    assert isinstance(data["eigenvalues"], list)


def test_identity_gap_is_symmetric_at_the_fold(spectral, minimum, second_level):
    shot, predicted, gap = spectral.evans_zero_identity(minimum.beta_star)
    scale = abs(spectral.E(0.0, second_level))
    # both sides vanish at beta*, the gap stays bounded
    assert abs(shot) < 1e-6 * scale
    assert abs(predicted) < 1e-6 * scale
    assert 0.0 <= gap <= 2.0


def test_monodromy_on_the_second_interval(spectral, second_level):
    mono = spectral.monodromy(second_level)
    assert mono.det_max_drift < 1e-8
    assert max(mono.gaps().values()) < 1e-5
