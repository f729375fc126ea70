from .artifacts_port import ArtifactsPort

__all__ = ["ArtifactsPort"]
