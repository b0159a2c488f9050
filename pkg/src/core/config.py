"""
Configuration Management - run configurations and application settings

Run configurations are YAML files under config/runs/ with the sections
manifold, coefficients, boundary, solver and bubble. Keys may be nested or
written flat with dotted section prefixes (``manifold.n: 5``). Application
settings are read from config/settings.yaml and YAMABE_* environment variables.
"""

import os
import re
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.core.errors import ConfigError, DomainError
from src.core.utils import get_project_root


class ManifoldConfig(BaseModel):
    """Radial model manifold: ball (r_min = 0) or annulus"""
    model_config = ConfigDict(extra="forbid")

    n: int = Field(ge=3)
    kappa: float = 0.0
    r_min: float = Field(default=0.0, ge=0.0)
    r_max: float = Field(default=1.0, gt=0.0)


class CoefficientsConfig(BaseModel):
    """Even-polynomial coefficients (c0, c2, c4, ...) of a, b and f"""
    model_config = ConfigDict(extra="forbid")

    a: List[float] = Field(default_factory=lambda: [1.0], min_length=1)
    b: List[float] = Field(default_factory=lambda: [0.0], min_length=1)
    f: List[float] = Field(default_factory=lambda: [1.0], min_length=1)


class BoundaryConfig(BaseModel):
    """Dirichlet values, one per boundary sphere (inner sphere first); zero when omitted"""
    model_config = ConfigDict(extra="forbid")

    phi: Optional[List[float]] = None


class SolverConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    gamma: float | Literal["auto"] = "auto"
    q: float | Literal["critical"] = "critical"
    q_schedule: List[float] | Literal["default"] = "default"
    mesh_elements: int = Field(default=400, ge=8)
    grading: float = Field(default=1.0, gt=0.0)
    tol: float = Field(default=1e-9, gt=0.0)
    max_iter: int = Field(default=20000, ge=1)
    restarts: int = Field(default=0, ge=0)
    seed: int = Field(default=0, ge=0)
    coercivity_tol: float = Field(default=1e-8, ge=0.0)

    @field_validator("gamma")
    @classmethod
    def _positive_gamma(cls, value):
        if value != "auto" and not value > 0.0:
            raise ValueError(f"gamma must be positive or 'auto', got {value}")
        return value


class BubbleConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    delta: float | Literal["default"] = "default"
    epsilons: List[float] | Literal["default"] = "default"
    gap_threshold: float = Field(default=0.02, gt=0.0)


class RunConfig(BaseModel):
    """One experiment: every run is determined by this model and the seed"""
    model_config = ConfigDict(extra="forbid")

    manifold: ManifoldConfig
    coefficients: CoefficientsConfig = Field(default_factory=CoefficientsConfig)
    boundary: BoundaryConfig = Field(default_factory=BoundaryConfig)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    bubble: BubbleConfig = Field(default_factory=BubbleConfig)

    @model_validator(mode="after")
    def _check_invariants(self) -> "RunConfig":
        # Numerics raise ValueError subclasses, which pydantic turns into field errors;
        # ConfigError passes through pydantic unchanged
        from src.numerics.discretization import CoefficientField, check_exponent
        from src.numerics.model_geometry import RadialManifold
        from src.numerics.test_functions import BubbleFamily
        from src.numerics.variational_solver import check_schedule

        manifold = RadialManifold(**self.manifold.model_dump())
        coeffs = CoefficientField.from_lists(self.coefficients.a, self.coefficients.b, self.coefficients.f)
        coeffs.validate(manifold)
        if self.boundary.phi is not None and len(self.boundary.phi) != manifold.boundary_count:
            raise ValueError(
                f"boundary.phi needs {manifold.boundary_count} value(s) for this manifold, got {len(self.boundary.phi)}"
            )
        solver = self.solver
        try:
            if solver.q != "critical":
                check_exponent(manifold.n, solver.q)
        except DomainError as e:
            raise ConfigError(str(e), field="solver.q") from e
        try:
            if solver.q_schedule != "default":
                check_schedule(manifold.n, solver.q_schedule)
        except DomainError as e:
            raise ConfigError(str(e), field="solver.q_schedule") from e
        if manifold.is_ball and self.bubble.model_fields_set & {"delta", "epsilons"}:
            delta = None if self.bubble.delta == "default" else self.bubble.delta
            epsilons = None if self.bubble.epsilons == "default" else self.bubble.epsilons
            BubbleFamily.default(manifold, coeffs, delta=delta, epsilons=epsilons)
        return self

    def boundary_values(self) -> List[float]:
        if self.boundary.phi is not None:
            return list(self.boundary.phi)
        return [0.0] * (1 if self.manifold.r_min == 0.0 else 2)

    def to_yaml(self) -> str:
        """Nested YAML of the explicitly set fields; load_run_config reads it back into an equal model"""
        data = self.model_dump(mode="json", exclude_unset=True)
        return yaml.safe_dump(data, sort_keys=False, default_flow_style=None)


def _expand_dotted(data: Dict[str, Any]) -> Dict[str, Any]:
    """{'manifold.n': 5} -> {'manifold': {'n': 5}}, merged with nested sections"""
    expanded: Dict[str, Any] = {}
    for key, value in data.items():
        parts = str(key).split(".")
        target = expanded
        for part in parts[:-1]:
            node = target.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"'{part}' is both a value and a section", field=str(key))
            target = node
        leaf = parts[-1]
        if isinstance(value, dict):
            section = target.setdefault(leaf, {})
            if not isinstance(section, dict):
                raise ConfigError(f"'{leaf}' is both a value and a section", field=str(key))
            for sub_key, sub_value in _expand_dotted(value).items():
                if sub_key in section:
                    raise ConfigError("duplicate key", field=f"{key}.{sub_key}")
                section[sub_key] = sub_value
        elif leaf in target:
            raise ConfigError("duplicate key", field=str(key))
        else:
            target[leaf] = value
    return expanded


def _find_line(text: str, dotted: str) -> Optional[int]:
    """Line of the key for a dotted field path, in dotted or nested spelling"""
    lines = text.splitlines()
    flat = re.compile(rf"^\s*{re.escape(dotted)}\s*:")
    for number, line in enumerate(lines, start=1):
        if flat.match(line):
            return number
    parts = dotted.split(".")
    for depth in range(len(parts), 0, -1):
        pattern = re.compile(rf"^\s*{re.escape(parts[depth - 1])}\s*:")
        for number, line in enumerate(lines, start=1):
            if pattern.match(line):
                return number
    return None


def parse_run_config(text: str) -> RunConfig:
    """Parse and validate run configuration text

    Raises:
        ConfigError: YAML syntax error (with line) or failed validation (with field and line)
    """
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise ConfigError(f"invalid YAML: {getattr(e, 'problem', e)}",
                          line=mark.line + 1 if mark is not None else None) from e
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a mapping of sections")

    try:
        return RunConfig.model_validate(_expand_dotted(data))
    except ConfigError as e:
        if e.field is None or e.line is not None:
            raise
        raise ConfigError(e.reason, field=e.field, line=_find_line(text, e.field)) from e
    except ValidationError as e:
        error = e.errors()[0]
        loc = [str(part) for part in error["loc"] if not isinstance(part, int)]
        # Union members add their type name to the location
        loc = [part for part in loc if not part.startswith(("literal[", "float", "list["))]
        dotted = ".".join(loc) or None
        line = _find_line(text, dotted) if dotted else None
        raise ConfigError(error["msg"], field=dotted, line=line) from e


def load_run_config(path: Path) -> RunConfig:
    """Read a run configuration file

    Raises:
        ConfigError: unreadable file, YAML error or validation failure
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}") from e
    return parse_run_config(text)


class Settings(BaseSettings):
    """Application settings - config/settings.yaml, overridden by YAMABE_* environment variables"""

    log_level: str = "INFO"
    console_logging: bool = True
    file_logging: bool = True
    output_dir: str = "runtime/output"
    jobs: int = Field(default=1, ge=1)

    model_config = SettingsConfigDict(env_prefix="YAMABE_", extra="ignore")

    @classmethod
    def load_from_yaml(cls, config_file: Optional[Path] = None) -> "Settings":
        """Load settings from YAML; keys also set in the environment are left to the environment"""
        if config_file is None:
            config_file = get_project_root() / "config" / "settings.yaml"

        if not config_file.exists():
            return cls()

        try:
            with open(config_file, 'r', encoding='utf-8') as f:
                yaml_config = yaml.safe_load(f) or {}
            config_data = {
                key: value for key, value in yaml_config.items()
                if f"YAMABE_{key.upper()}" not in os.environ
            }
            return cls(**config_data)
        except Exception as e:
            print(f"Warning: Failed to load settings from {config_file}: {e}")
            return cls()

    @property
    def output_path(self) -> Path:
        path = Path(self.output_dir)
        return path if path.is_absolute() else get_project_root() / path


settings = Settings.load_from_yaml()
