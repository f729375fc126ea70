from __future__ import annotations
from dataclasses import dataclass, field, asdict, fields
from typing import Dict, Any, Tuple

from .material_params import MaterialParams, default_material


def _pick(cls, d: Dict[str, Any]):
    names = {f.name for f in fields(cls)}
    return {k: v for k, v in (d or {}).items() if k in names}


@dataclass(frozen=True)
class SolverSettings:
    quad_tol: float = 1e-10
    potential_tol: float = 1e-12
    ode_rtol: float = 1e-10
    root_tol: float = 1e-10
    pole_guard: float = 1e-8
    gl_nodes: int = 64
    profile_points: int = 1025
    evolution_points: int = 513
    evans_lambda_grid: int = 121

    @staticmethod
    def from_dict(d: Dict[str, Any]) -> "SolverSettings":
        return SolverSettings(**_pick(SolverSettings, d))


@dataclass(frozen=True)
class Windows:
    beta_intervals: int = 3
    lam: Tuple[float, float] = (-50.0, 10.0)
    ubar: Tuple[float, float] = (0.0, 40.0)
    theta_below: float = 12.566370614359172  # 4*pi under theta0
    theta_above: float = 6.283185307179586

    @staticmethod
    def from_dict(d: Dict[str, Any]) -> "Windows":
        data = _pick(Windows, d)
        for key in ("lam", "ubar"):
            if key in data:
                data[key] = tuple(float(v) for v in data[key])
        return Windows(**data)

    def to_dict(self) -> Dict[str, Any]:
        d = asdict(self)
        d["lam"] = list(self.lam)
        d["ubar"] = list(self.ubar)
        return d


@dataclass(frozen=True)
class EvolutionSettings:
    T: float = 10.0
    ubar_eps: float = 0.1
    b_safety: float = 0.9
    energy_weight: str = "c2"
    implicit: bool = True
    amplitude: float = 1e-3
    modes: int = 16
    max_retries: int = 4

    @staticmethod
    def from_dict(d: Dict[str, Any]) -> "EvolutionSettings":
        return EvolutionSettings(**_pick(EvolutionSettings, d))


@dataclass(frozen=True)
class OutputSettings:
    directory: str = "out"
    formats: Tuple[str, ...] = ("csv", "json", "svg")

    @staticmethod
    def from_dict(d: Dict[str, Any]) -> "OutputSettings":
        data = _pick(OutputSettings, d)
        if "formats" in data:
            data["formats"] = tuple(data["formats"])
        return OutputSettings(**data)

    def to_dict(self) -> Dict[str, Any]:
        return {"directory": self.directory, "formats": list(self.formats)}


@dataclass(frozen=True)
class RunConfig:
    material: MaterialParams = field(default_factory=default_material)
    solver: SolverSettings = field(default_factory=SolverSettings)
    windows: Windows = field(default_factory=Windows)
    evolution: EvolutionSettings = field(default_factory=EvolutionSettings)
    output: OutputSettings = field(default_factory=OutputSettings)

    @staticmethod
    def from_dict(d: Dict[str, Any]) -> "RunConfig":
        mat = d.get("material")
        material = MaterialParams.from_dict(mat) if mat else default_material()
        return RunConfig(
            material=material,
            solver=SolverSettings.from_dict(d.get("solver", {})),
            windows=Windows.from_dict(d.get("windows", {})),
            evolution=EvolutionSettings.from_dict(d.get("evolution", {})),
            output=OutputSettings.from_dict(d.get("output", {})),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "material": self.material.to_dict(),
            "solver": asdict(self.solver),
            "windows": self.windows.to_dict(),
            "evolution": asdict(self.evolution),
            "output": self.output.to_dict(),
        }

    def theta_window(self) -> Tuple[float, float]:
        t0 = self.material.theta0
        return (t0 - self.windows.theta_below, t0 + self.windows.theta_above)
