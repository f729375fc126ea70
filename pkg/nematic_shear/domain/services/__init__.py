from .artifact_builder import build_columns_csv, build_csv, build_json, format_value, plain
from .bifurcation import BifurcationAnalysis
from .bifurcation_map import BifurcationMap, LevelIntegrals
from .coefficients import Coefficients
from .evans import SpectralAnalysis, wall_det
from .evolution import EvolutionSolver, energy, perturbation
from .linearization import LinearizedSystem
from .potential import EQUILIBRIUM_GUARD, Potential, classify_regime, composite_simpson, distance_to_equilibria
from .profile_builder import ConservedDrift, ProfileBuilder, ShootingResult, elastic_term
from .quadrature import adaptive_gauss, composite_nodes, segment_mean, unit_rule
