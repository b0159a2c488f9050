"""
Radial Yamabe Unified Logging Management

Provides project-level log management with support for:
- Level-based logging (DEBUG, INFO, WARNING, ERROR, CRITICAL)
- Dual output to console (stderr) and rotating files under runtime/logs
- Colored console output when stderr is a terminal
- Per-volume rotation profiles (solver traces are high volume)
- Performance logging of expensive numerical routines
"""

import functools
import logging
import logging.handlers
import os
import sys
import threading
import time
from typing import Dict, Optional, Tuple

from src.core.utils import get_project_root


class ColoredFormatter(logging.Formatter):
    """Colored log formatter"""

    COLORS = {
        'DEBUG': '\033[36m',      # Cyan
        'INFO': '\033[32m',       # Green
        'WARNING': '\033[33m',    # Yellow
        'ERROR': '\033[31m',      # Red
        'CRITICAL': '\033[35m',   # Purple
        'RESET': '\033[0m'
    }

    def format(self, record):
        formatted = super().format(record)
        if hasattr(sys.stderr, 'isatty') and sys.stderr.isatty():
            color = self.COLORS.get(record.levelname, '')
            return f"{color}{formatted}{self.COLORS['RESET']}"
        return formatted


class YamabeLogger:
    """Process-wide log manager"""

    _instance = None
    _lock = threading.Lock()
    _loggers: Dict[str, logging.Logger] = {}
    _profiles: Dict[str, str] = {}

    LOG_CONFIGS = {
        # Per-iteration solver traces at DEBUG
        "high_volume": {
            "max_bytes": 30 * 1024 * 1024,
            "backup_count": 3,
            "description": "High-volume (30MB per file, 3 backups)"
        },
        "default": {
            "max_bytes": 10 * 1024 * 1024,
            "backup_count": 5,
            "description": "Default configuration (10MB per file, 5 backups)"
        }
    }

    def __new__(cls):
        if cls._instance is None:
            with cls._lock:
                if cls._instance is None:
                    cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self):
        if not hasattr(self, 'initialized'):
            self.project_root = get_project_root()
            self.log_dir = self.project_root / "runtime" / "logs"

            self.log_levels = {
                'DEBUG': logging.DEBUG,
                'INFO': logging.INFO,
                'WARNING': logging.WARNING,
                'ERROR': logging.ERROR,
                'CRITICAL': logging.CRITICAL
            }

            self.default_level = logging.INFO
            self.console_level = logging.INFO
            self.file_level = logging.DEBUG
            self.console_enabled = True
            self.file_enabled = os.getenv('YAMABE_LOG_FILES', '1') != '0'

            env_level = os.getenv('YAMABE_LOG_LEVEL', 'INFO').upper()
            if env_level in self.log_levels:
                self.default_level = self.log_levels[env_level]
                self.console_level = self.log_levels[env_level]

            self.initialized = True

    def _get_log_config(self, config_type: str = "default") -> Tuple[int, int, str]:
        """Get the rotation profile (max_bytes, backup_count, description)"""
        config = self.LOG_CONFIGS.get(config_type, self.LOG_CONFIGS["default"])
        return config["max_bytes"], config["backup_count"], config["description"]

    def get_logger(self, name: str = "yamabe",
                   log_file: Optional[str] = None,
                   console_output: Optional[bool] = None,
                   file_output: Optional[bool] = None,
                   log_config_type: str = "default") -> logging.Logger:
        """Get or create a logger

        Args:
            name: Logger name, typically yamabe.<module>
            log_file: Log file name, defaults to name.log
            console_output: Whether to output to console, defaults to the manager setting
            file_output: Whether to output to file, defaults to the manager setting
            log_config_type: Rotation profile (high_volume, default)

        Returns:
            Configured logger instance
        """
        if name in self._loggers:
            return self._loggers[name]

        console_output = self.console_enabled if console_output is None else console_output
        file_output = self.file_enabled if file_output is None else file_output

        logger = logging.getLogger(name)
        logger.setLevel(min(self.default_level, self.file_level) if file_output else self.default_level)
        logger.propagate = False

        for handler in logger.handlers[:]:
            logger.removeHandler(handler)

        if console_output:
            console_handler = logging.StreamHandler(sys.stderr)
            console_handler.setLevel(self.console_level)
            console_handler.setFormatter(ColoredFormatter(
                '%(asctime)s [%(levelname)s] %(name)s: %(message)s',
                datefmt='%H:%M:%S'
            ))
            logger.addHandler(console_handler)

        if file_output:
            self.log_dir.mkdir(parents=True, exist_ok=True)
            if not log_file:
                log_file = f"{name.replace('.', '_')}.log"
            max_bytes, backup_count, config_desc = self._get_log_config(log_config_type)
            file_handler = logging.handlers.RotatingFileHandler(
                self.log_dir / log_file,
                maxBytes=max_bytes,
                backupCount=backup_count,
                encoding='utf-8'
            )
            file_handler.setLevel(self.file_level)
            file_handler.setFormatter(logging.Formatter(
                '%(asctime)s [%(levelname)s] %(name)s:%(lineno)d - %(funcName)s(): %(message)s',
                datefmt='%Y-%m-%d %H:%M:%S'
            ))
            logger.addHandler(file_handler)
            logger.debug(f"Logger created - {config_desc}")

        self._loggers[name] = logger
        self._profiles[name] = log_config_type
        return logger

    def set_level(self, level: str):
        """Set global console level"""
        if level.upper() not in self.log_levels:
            return
        new_level = self.log_levels[level.upper()]
        self.default_level = new_level
        self.console_level = new_level

        for logger in self._loggers.values():
            has_file = any(isinstance(h, logging.handlers.RotatingFileHandler) for h in logger.handlers)
            logger.setLevel(min(new_level, self.file_level) if has_file else new_level)
            for handler in logger.handlers:
                if not isinstance(handler, logging.handlers.RotatingFileHandler):
                    handler.setLevel(new_level)

    def set_outputs(self, console_output: bool, file_output: bool):
        """Choose outputs for loggers created from now on"""
        self.console_enabled = console_output
        self.file_enabled = file_output

    def clear_loggers(self):
        """Close and forget all loggers (tests and CLI re-initialization)"""
        for logger in self._loggers.values():
            for handler in logger.handlers[:]:
                handler.close()
                logger.removeHandler(handler)
        self._loggers.clear()

    def rebuild(self):
        """Re-create handlers of every known logger with the current settings

        Module-level logger references stay valid because logging.getLogger
        returns the same object for a name.
        """
        profiles = dict(self._profiles)
        self.clear_loggers()
        for name, profile in profiles.items():
            self.get_logger(name, log_config_type=profile)


class LoggerMixin:
    """Logger mixin class

    Gives numerical driver classes a lazy ``logger`` property named
    ``yamabe.<module>.<Class>``. Subclasses may set ``_log_config_type``.
    """

    _log_config_type = "default"

    @property
    def logger(self) -> logging.Logger:
        """Lazy-loaded logger property"""
        cached = self.__dict__.get('_logger')
        if cached is None:
            module = self.__class__.__module__.rsplit('.', 1)[-1]
            cached = get_logger(f"yamabe.{module}.{self.__class__.__name__}",
                                log_config_type=self._log_config_type)
            self.__dict__['_logger'] = cached
        return cached


_log_manager = YamabeLogger()


def get_logger(name: str = "yamabe", log_config_type: str = "default", **kwargs) -> logging.Logger:
    """Convenience function to get a logger

    Args:
        name: Logger name
        log_config_type: Rotation profile (high_volume, default)
        **kwargs: Forwarded to YamabeLogger.get_logger
    """
    return _log_manager.get_logger(name, log_config_type=log_config_type, **kwargs)


def set_log_level(level: str):
    """Convenience function to set global log level"""
    _log_manager.set_level(level)


def log_performance(func):
    """Log wall time of the wrapped call at DEBUG, failures at ERROR"""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        start_time = time.perf_counter()
        logger = get_logger(f"yamabe.performance.{func.__name__}")
        try:
            result = func(*args, **kwargs)
        except Exception as e:
            logger.error(f"{func.__qualname__} failed after {time.perf_counter() - start_time:.3f}s: {e}")
            raise
        logger.debug(f"{func.__qualname__} completed in {time.perf_counter() - start_time:.3f}s")
        return result

    return wrapper


def init_logging(level: str = "INFO",
                 console_output: bool = True,
                 file_output: bool = True) -> logging.Logger:
    """Initialize logging system

    Existing loggers are rebuilt so the requested outputs apply everywhere.

    Args:
        level: Log level
        console_output: Whether to output to console
        file_output: Whether to output to file
    """
    _log_manager.set_outputs(console_output, file_output)
    set_log_level(level)
    _log_manager.rebuild()

    main_logger = get_logger("yamabe")
    main_logger.debug(f"Logging initialized: level={level}, directory={_log_manager.log_dir}")
    return main_logger
