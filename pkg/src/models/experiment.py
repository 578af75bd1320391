import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

import yaml
from pydantic import AliasChoices, BaseModel, Field, ValidationError, field_validator

from src.config.settings import settings
from src.models.disorder import InteractionSpec, Mesh, PotentialLaw
from src.utils.errors import ConfigurationError


class ModelBlock(BaseModel):
    """Particle number, dimension, single-site law and interaction."""
    N: int = Field(..., ge=1, validation_alias=AliasChoices("N", "n"))
    d: int = Field(default=1, ge=1)
    law: PotentialLaw = Field(default_factory=PotentialLaw)
    interaction: InteractionSpec = Field(default_factory=InteractionSpec)

    @field_validator("N")
    @classmethod
    def _check_particles(cls, value: int) -> int:
        if value > settings.max_particles:
            raise ValueError(f"at most {settings.max_particles} particles supported")
        return value

    @field_validator("d")
    @classmethod
    def _check_dimension(cls, value: int) -> int:
        if value > settings.max_dimension:
            raise ValueError(f"at most dimension {settings.max_dimension} supported")
        return value


class GeometryBlock(BaseModel):
    """Default box: half-side(s) and an optional center."""
    L: int = Field(default=4, ge=1)
    sides: Optional[List[int]] = Field(None, description="Per-particle half-sides")
    center: Optional[List[List[int]]] = Field(None, description="Per-particle centers")
    L_list: Optional[List[int]] = Field(None, description="Scale grid for sweeps")


class MeshBlock(BaseModel):
    M: int = Field(default=4, ge=2)


class DiagnosticSpec(BaseModel):
    """One requested diagnostic and its parameters."""
    name: str
    params: Dict[str, Any] = Field(default_factory=dict)
    trials: Optional[int] = Field(None, ge=1)
    seed: Optional[int] = None
    tolerance: Optional[float] = Field(None, gt=0)


class OutputBlock(BaseModel):
    directory: str = Field(default_factory=lambda: settings.output_dir)
    formats: List[Literal["csv", "json"]] = Field(default_factory=lambda: ["csv", "json"])


class ExperimentConfig(BaseModel):
    """A complete experiment description."""
    model: ModelBlock
    geometry: GeometryBlock = Field(default_factory=GeometryBlock)
    mesh: MeshBlock = Field(default_factory=MeshBlock)
    diagnostics: List[DiagnosticSpec] = Field(default_factory=list)
    output: OutputBlock = Field(default_factory=OutputBlock)
    seed: int = Field(default=0)
    threads: Optional[int] = Field(None, ge=1)

    def params_for(self, spec: DiagnosticSpec) -> Dict[str, Any]:
        """Flat parameters of one diagnostic: model and geometry defaults overridden by the spec."""
        params: Dict[str, Any] = {
            "n": self.model.N,
            "N": self.model.N,
            "d": self.model.d,
            "law": self.model.law,
            "interaction": self.model.interaction,
            "mesh": Mesh(M=self.mesh.M),
            "L": self.geometry.L,
            "seed": self.seed if spec.seed is None else spec.seed,
            "workers": self.threads,
        }
        if self.geometry.center is not None:
            params["center"] = self.geometry.center
        if self.geometry.sides is not None:
            params["sides"] = self.geometry.sides
        if spec.trials is not None:
            params["trials"] = spec.trials
        if spec.tolerance is not None:
            params["tolerance"] = spec.tolerance
        params.update(spec.params)
        return params

    def resolved(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")


def _field_path(error: ValidationError) -> str:
    first = error.errors()[0]
    return ".".join(str(part) for part in first["loc"])


def parse_config(raw: Dict[str, Any]) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        raise ConfigurationError(first["msg"], field_path=_field_path(exc))


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """Read a YAML or JSON (by extension) experiment file."""
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"config file {path} not found")
    text = path.read_text()
    try:
        raw = json.loads(text) if path.suffix.lower() == ".json" else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigurationError(f"cannot parse {path.name}: {exc}")
    if not isinstance(raw, dict):
        raise ConfigurationError(f"{path.name} does not hold a mapping")
    return parse_config(raw)
