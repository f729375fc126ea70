from .file_system_gateway import FileSystemGateway

__all__ = ["FileSystemGateway"]
