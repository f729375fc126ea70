import math
from pathlib import Path

import pytest

from nematic_shear.domain.models import RunConfig, default_material
from nematic_shear.domain.services import (
    BifurcationAnalysis,
    BifurcationMap,
    Coefficients,
    EvolutionSolver,
    Potential,
    ProfileBuilder,
    SpectralAnalysis,
)

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def build_stack(material):
    config = RunConfig(material=material)
    coef = Coefficients(material)
    potential = Potential(coef, config.theta_window(), config.solver.potential_tol)
    bmap = BifurcationMap(potential, config.solver, config.windows.beta_intervals)
    return config, coef, potential, bmap


@pytest.fixture(scope="session")
def config():
    return RunConfig()


@pytest.fixture(scope="session")
def p0_stack():
    return build_stack(default_material())


@pytest.fixture(scope="session")
def coef(p0_stack):
    return p0_stack[1]


@pytest.fixture(scope="session")
def potential(p0_stack):
    return p0_stack[2]


@pytest.fixture(scope="session")
def bmap(p0_stack):
    return p0_stack[3]


@pytest.fixture(scope="session")
def analysis(bmap):
    return BifurcationAnalysis(bmap)


@pytest.fixture(scope="session")
def builder(bmap):
    return ProfileBuilder(bmap)


@pytest.fixture(scope="session")
def spectral(bmap, builder):
    return SpectralAnalysis(bmap, builder)


@pytest.fixture(scope="session")
def solver(coef, config):
    return EvolutionSolver(coef, config.evolution)


@pytest.fixture(scope="session")
def minimum(analysis):
    found = analysis.find_minimum(1)
    assert found is not None
    return found


@pytest.fixture(scope="session")
def first_level(bmap):
    """A level in the middle of the pole-free first interval."""
    _, hi = bmap.interval(0)
    return 0.5 * hi


@pytest.fixture(scope="session")
def small_profile(bmap, builder, config):
    """Stationary profile with ubar = 0.05 on the first interval."""
    roots = bmap.solve_ubar(0.05, bmap.interval(0))
    assert len(roots) == 1
    return builder.reconstruct(roots[0], config.solver.evolution_points)


@pytest.fixture
def theta0():
    return math.pi / 3
