from __future__ import annotations
from typing import List

from nematic_shear.domain.errors import ConfigError
from nematic_shear.domain.models import RunConfig

MIN_GRID = 65


def config_problems(config: RunConfig) -> List[str]:
    s = config.solver
    w = config.windows
    ev = config.evolution
    problems = []
    for name in ("quad_tol", "potential_tol", "ode_rtol", "root_tol", "pole_guard"):
        if not getattr(s, name) > 0.0:
            problems.append(f"solver.{name} debe ser positivo")
    for name in ("profile_points", "evolution_points"):
        n = getattr(s, name)
        if n < MIN_GRID or n % 2 == 0:
            problems.append(f"solver.{name} debe ser impar y >= {MIN_GRID}")
    if s.gl_nodes < 2:
        problems.append("solver.gl_nodes debe ser al menos 2")
    if s.evans_lambda_grid < 2:
        problems.append("solver.evans_lambda_grid debe ser al menos 2")
    if not w.lam[0] < w.lam[1]:
        problems.append("windows.lam debe estar ordenada")
    if not 0.0 <= w.ubar[0] < w.ubar[1]:
        problems.append("windows.ubar debe estar ordenada y ser no negativa")
    if not (w.theta_below > 0.0 and w.theta_above > 0.0):
        problems.append("la ventana angular debe rodear a theta0")
    if w.beta_intervals < 1:
        problems.append("windows.beta_intervals debe ser al menos 1")
    if not ev.T > 0.0:
        problems.append("evolution.T debe ser positivo")
    if not 0.0 < ev.b_safety <= 1.0:
        problems.append("evolution.b_safety debe estar en (0, 1]")
    if ev.energy_weight not in ("c2", "c"):
        problems.append("evolution.energy_weight debe ser 'c2' o 'c'")
    if ev.modes < 1 or ev.max_retries < 0 or not ev.amplitude > 0.0:
        problems.append("parámetros de perturbación inválidos")
    unknown = set(config.output.formats) - {"csv", "json", "svg"}
    if unknown:
        problems.append(f"formatos de salida desconocidos: {sorted(unknown)}")
    return problems


def validate_config(config: RunConfig) -> RunConfig:
    problems = config_problems(config)
    if problems:
        raise ConfigError("configuración inválida: " + "; ".join(problems))
    return config
