from .config_repository import load_config, parse_config
