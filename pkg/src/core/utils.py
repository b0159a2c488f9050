"""
Radial Yamabe Utilities - project root discovery and deterministic output helpers
"""
import csv
import os
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


def get_project_root() -> Path:
    """
    Get project root directory path

    Find project root directory using the following strategies by priority:
    1. The YAMABE_ROOT environment variable, if it points at a valid root
    2. Search upward from this file
    3. Search upward from the current working directory

    Returns:
        Path: Path object of project root directory

    Raises:
        RuntimeError: If unable to determine project root directory

    Examples:
        >>> root_path = get_project_root()
        >>> (root_path / "config").is_dir()
        True
    """
    if 'YAMABE_ROOT' in os.environ:
        root_path = Path(os.environ['YAMABE_ROOT'])
        if _is_valid_project_root(root_path):
            return root_path

    current_file = Path(__file__).resolve()
    for parent in [current_file, *current_file.parents]:
        if _is_valid_project_root(parent):
            return parent

    current = Path.cwd().resolve()
    while current != current.parent:
        if _is_valid_project_root(current):
            return current
        current = current.parent

    raise RuntimeError(
        "Unable to determine project root directory. Please ensure:\n"
        "1. Current directory is within project structure, or\n"
        "2. Set YAMABE_ROOT environment variable pointing to project root"
    )


def _is_valid_project_root(path: Path) -> bool:
    """
    Validate if given path is a valid project root directory

    Validation criteria:
    1. src/core and src/numerics exist
    2. At least one of config/, runtime/ or pyproject.toml exists

    Args:
        path: Path to validate

    Returns:
        bool: Whether it's a valid project root directory
    """
    if not path.is_dir():
        return False

    required_paths = [
        path / 'src',
        path / 'src' / 'core',
        path / 'src' / 'numerics'
    ]
    if not all(p.is_dir() for p in required_paths):
        return False

    optional_indicators = [
        path / 'config',
        path / 'runtime',
        path / 'pyproject.toml'
    ]
    return any(p.exists() for p in optional_indicators)


def format_number(value: float) -> str:
    """Format a float with 17 significant digits (lossless double round-trip)"""
    return format(float(value), ".17g")


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[float]]) -> Path:
    """
    Write numeric rows as RFC-4180 CSV with 17 significant digits

    Integers are written as integers; everything else goes through format_number.

    Args:
        path: Output file, parent directories are created
        header: Column names
        rows: Row sequences

    Returns:
        Path: The written file
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        writer = csv.writer(fh, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([
                str(v) if isinstance(v, (int, np.integer)) and not isinstance(v, bool) else format_number(v)
                for v in row
            ])
    return path


def read_csv(path: Path) -> tuple[list[str], np.ndarray]:
    """Read a CSV written by write_csv back into (header, float array)"""
    with open(path, 'r', encoding='utf-8', newline='') as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = [[float(x) for x in row] for row in reader]
    return header, np.asarray(data, dtype=float).reshape(-1, len(header))
