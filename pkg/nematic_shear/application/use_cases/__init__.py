from .main import UseCases
from .paths import OutputPaths

__all__ = ["UseCases", "OutputPaths"]
