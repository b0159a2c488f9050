"""
Radial Yamabe Core Module

Contains configuration management, the logging system, the exception
hierarchy and output utilities
"""

try:
    from .config import settings
    __all__ = ["settings"]
except ImportError:
    __all__ = []

from .errors import ConfigError, YamabeError
from .utils import format_number, get_project_root, write_csv

__all__.extend(["ConfigError", "YamabeError", "format_number", "get_project_root", "write_csv"])
