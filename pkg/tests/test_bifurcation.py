import logging
from dataclasses import replace

import pytest
from scipy import optimize

from nematic_shear.domain.errors import NoRootError, PoleError, RangeError
from nematic_shear.domain.services import BifurcationAnalysis, BifurcationMap


def test_intervals_are_guarded(bmap):
    intervals = bmap.intervals()
    assert len(intervals) == 3
    assert intervals[0][0] == 0.0
    for (lo, hi), pole in zip(intervals, bmap.poles):
        assert lo < hi < pole
    assert intervals[1][0] > bmap.poles[0]
    with pytest.raises(RangeError):
        bmap.interval(3)


def test_first_interval_has_a_single_branch(bmap):
    for ubar in (0.05, 1.0, 10.0):
        assert len(bmap.solve_ubar(ubar, bmap.interval(0))) == 1


def test_solve_ubar_rejects_pole_crossing_interval(bmap):
    with pytest.raises(PoleError):
        bmap.solve_ubar(1.0, (0.5 * bmap.poles[0], 1.5 * bmap.poles[0]))


def test_minimum_on_second_interval(bmap, minimum):
    lo, hi = bmap.interval(1)
    assert lo < minimum.beta_star < hi
    assert minimum.d_second > 0
    assert abs(minimum.d_prime) < 1e-6 * minimum.d_second * max(1.0, minimum.beta_star)
    assert minimum.ubar_n == pytest.approx(2 * bmap.D(minimum.beta_star))


def test_fold_root_counts(bmap, minimum):
    interval = bmap.interval(1)
    assert bmap.solve_ubar(0.99 * minimum.ubar_n, interval) == []
    lower, upper = bmap.solve_ubar(1.01 * minimum.ubar_n, interval)
    assert lower < minimum.beta_star < upper


def test_fold_roots_open_like_a_square_root(analysis, minimum):
    widths = []
    for k in range(3):
        du = 0.01 * minimum.ubar_n * 4.0 ** (-k)
        lower, upper = analysis.two_roots_near(minimum, minimum.ubar_n + du)
        assert lower < minimum.beta_star < upper
        widths.append(upper - lower)
    assert widths[0] / widths[1] == pytest.approx(2.0, rel=0.1)
    assert widths[1] / widths[2] == pytest.approx(2.0, rel=0.1)


def test_no_roots_below_critical_speed(analysis, minimum):
    with pytest.raises(NoRootError):
        analysis.two_roots_near(minimum, 0.5 * minimum.ubar_n)


def test_roots_at_labels_sides(analysis, minimum):
    roots = analysis.roots_at(1.05 * minimum.ubar_n)
    sides = {(n, side) for n, side, _ in roots}
    assert (0, "single") in sides
    assert {(1, "lower"), (1, "upper")} <= sides


def test_branch_diagram(analysis, bmap):
    minima = analysis.minima()
    ubar_max = 1.5 * minima[0].ubar_n
    diagram = analysis.branch_diagram(ubar_max, samples=6)
    assert diagram.poles == list(bmap.poles)
    assert diagram.ubar_max == ubar_max
    first = [b for b in diagram.branches if b.n == 0]
    assert len(first) == 1 and first[0].side == "single"
    assert all(s > 0 for s in first[0].signs)
    lower = next(b for b in diagram.branches if (b.n, b.side) == (1, "lower"))
    assert all(s < 0 for s in lower.signs)
    assert all(u > minima[0].ubar_n for u, _ in lower.points)
    rows = diagram.rows()
    assert rows == sorted(rows, key=lambda r: (r[0], r[1]))
    assert diagram.root_count(ubar_max) == len(analysis.roots_at(ubar_max))
    assert diagram.root_count(ubar_max / 6) == 1


def test_branch_diagram_with_thread_map(analysis, minimum):
    from concurrent.futures import ThreadPoolExecutor

    serial = analysis.branch_diagram(1.2 * minimum.ubar_n, samples=4)
    with ThreadPoolExecutor(max_workers=3) as executor:
        threaded = analysis.branch_diagram(1.2 * minimum.ubar_n, samples=4, map_fn=executor.map)
    assert threaded.rows() == serial.rows()


def test_large_speed_has_three_or_more_roots(analysis, minimum):
    roots = analysis.roots_at(2.0 * minimum.ubar_n)
    assert len(roots) >= 3


def test_every_root_reproduces_its_speed(analysis, builder, minimum):
    for ubar in (0.05, 1.05 * minimum.ubar_n, 2.0 * minimum.ubar_n):
        for _, _, beta in analysis.roots_at(ubar):
            profile = builder.reconstruct(beta, 257)
            assert abs(profile.u[-1] - ubar) < 1e-8 * max(1.0, ubar)


def test_roots_meet_the_residual_tolerance(bmap, minimum, caplog):
    ubar = 1.05 * minimum.ubar_n
    with caplog.at_level(logging.WARNING, logger="nematic_shear.domain.services.bifurcation_map"):
        roots = bmap.solve_ubar(ubar, bmap.interval(1))
    assert len(roots) == 2
    for beta in roots:
        assert abs(2.0 * bmap.D(beta) - ubar) < bmap.settings.root_tol * max(1.0, ubar)
    assert "root_tol" not in caplog.text


def test_root_tol_sets_the_minimum_search_tolerance(potential, config, monkeypatch):
    settings = replace(config.solver, root_tol=1e-6)
    analysis = BifurcationAnalysis(BifurcationMap(potential, settings, config.windows.beta_intervals))
    seen = []
    brentq = optimize.brentq

    def spy(f, a, b, **kwargs):
        seen.append(kwargs["xtol"])
        return brentq(f, a, b, **kwargs)

    monkeypatch.setattr(optimize, "brentq", spy)
    minimum = analysis.find_minimum(1)
    assert seen
    assert seen[0] == pytest.approx(1e-6 * max(1.0, minimum.beta_star), rel=0.1)
