from __future__ import annotations
import os
from dataclasses import dataclass


@dataclass
class OutputPaths:
    directory: str

    def file(self, name: str) -> str:
        return os.path.join(self.directory, name)
