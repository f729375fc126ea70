from __future__ import annotations

from typing import Optional

from nematic_shear.application.use_cases import OutputPaths, UseCases
from nematic_shear.infrastructure.repositories import load_config
from nematic_shear.infrastructure.system import FileSystemGateway


def make_usecases(config_path: Optional[str] = None, out_dir: Optional[str] = None,
                  jobs: int = 1, seed: int = 0) -> UseCases:
    """Factory helper para construir UseCases con dependencias reales."""
    config = load_config(config_path)
    return UseCases(
        FileSystemGateway,
        config,
        OutputPaths(out_dir or config.output.directory),
        jobs=jobs,
        seed=seed,
    )
