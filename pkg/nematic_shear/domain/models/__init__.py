from .bifurcation_diagram import BifurcationDiagram, Branch, Minimum
from .equilibrium_set import (
    EquilibriumSet,
    REGIME_ANTI,
    REGIME_DOMINANT,
    REGIME_SHIFTED,
    REGIME_UNSUPPORTED,
)
from .evolution_state import (
    DecayReport,
    EvolutionState,
    LINEARIZED,
    NONLINEAR,
    SmallUbarBounds,
)
from .material_params import MaterialParams, PARAM_KEYS, default_material
from .run_config import EvolutionSettings, OutputSettings, RunConfig, SolverSettings, Windows
from .spectral import EigenReport, Eigenfunction, EigenvalueSlope, EvansEvaluation, LambdaDerivative, Monodromy
from .stationary_profile import StationaryProfile
from .validation_report import CheckResult, ValidationReport

__all__ = [
    "BifurcationDiagram", "Branch", "Minimum",
    "EquilibriumSet", "REGIME_ANTI", "REGIME_DOMINANT", "REGIME_SHIFTED", "REGIME_UNSUPPORTED",
    "DecayReport", "EvolutionState", "LINEARIZED", "NONLINEAR", "SmallUbarBounds",
    "MaterialParams", "PARAM_KEYS", "default_material",
    "EvolutionSettings", "OutputSettings", "RunConfig", "SolverSettings", "Windows",
    "EigenReport", "Eigenfunction", "EigenvalueSlope", "EvansEvaluation", "LambdaDerivative", "Monodromy",
    "StationaryProfile",
    "CheckResult", "ValidationReport",
]
