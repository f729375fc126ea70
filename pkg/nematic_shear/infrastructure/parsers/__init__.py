from .artifact_parser import parse_columns, parse_csv, parse_json
