"""
Shared pytest setup: no log files during tests, project root on sys.path
"""

import os
import sys
from pathlib import Path

# Must be set before src.core is imported
os.environ.setdefault("YAMABE_LOG_FILES", "0")
os.environ.setdefault("YAMABE_FILE_LOGGING", "0")

project_root = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root))
