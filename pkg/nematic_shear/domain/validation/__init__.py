from .config_validator import config_problems, validate_config
from .material_validator import min_damping, validate_material
