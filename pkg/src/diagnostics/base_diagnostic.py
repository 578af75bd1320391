import logging
import time
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field, ValidationError

from src.fem.assembly import OperatorFactory
from src.models.disorder import InteractionSpec, Mesh, PotentialLaw
from src.models.geometry import BoxSpec
from src.utils.errors import ConfigurationError, QGraphError


class DiagnosticResponse(BaseModel):
    """Standard result envelope for diagnostics."""
    success: bool
    diagnostic: Optional[str] = None
    schema_name: Optional[str] = None
    data: Optional[Dict[str, Any]] = None
    error: Optional[str] = None
    error_type: Optional[str] = None
    exit_code: int = 0
    passed: Optional[bool] = None
    assertable: bool = False
    rows: List[Dict[str, Any]] = Field(default_factory=list)
    tables: Dict[str, List[Dict[str, Any]]] = Field(default_factory=dict, description="Extra named CSV tables")
    execution_time_ms: float = 0.0

    @property
    def failed_assertion(self) -> bool:
        return self.success and self.assertable and self.passed is False

    def summary(self) -> Dict[str, Any]:
        """Everything except the row tables."""
        return self.model_dump(exclude={"rows", "tables"})


class BaseDiagnostic(ABC):
    """Base class for all diagnostics."""

    assertable: bool = False

    def __init__(self, name: str, description: str, schema_name: Optional[str] = None):
        self.name = name
        self.description = description
        self.schema_name = schema_name or name.replace("-", "_")
        self.logger = logging.getLogger(f"diagnostic.{name}")

    @abstractmethod
    def execute(self, **params) -> DiagnosticResponse:
        """Run the diagnostic with the given parameters."""
        pass

    @abstractmethod
    def get_schema(self) -> Dict[str, Any]:
        """Parameter schema."""
        pass

    def validate_parameters(self, params: Dict[str, Any]) -> List[str]:
        """Names of required parameters that are missing."""
        required = self.get_schema().get("required", [])
        return [key for key in required if params.get(key) is None]

    def _handle_success(self, data: Dict[str, Any], rows: Optional[List[Dict[str, Any]]] = None,
                        passed: Optional[bool] = None, tables: Optional[Dict[str, List[Dict[str, Any]]]] = None
                        ) -> DiagnosticResponse:
        if self.assertable and passed is False:
            self.logger.warning(f"Diagnostic {self.name} did not pass")
        return DiagnosticResponse(success=True, diagnostic=self.name, schema_name=self.schema_name, data=data,
                                  passed=passed, assertable=self.assertable, rows=rows or [], tables=tables or {})

    def _handle_error(self, error: str, exit_code: int = 3, error_type: Optional[str] = None) -> DiagnosticResponse:
        self.logger.error(f"Diagnostic {self.name} error: {error}")
        return DiagnosticResponse(success=False, diagnostic=self.name, schema_name=self.schema_name, error=error,
                                  error_type=error_type, exit_code=exit_code, assertable=self.assertable)


def ints_of(value, default: Sequence[int]) -> List[int]:
    if value is None:
        return list(default)
    return [int(v) for v in (value if isinstance(value, (list, tuple)) else [value])]


def floats_of(value, default: Sequence[float]) -> List[float]:
    if value is None:
        return list(default)
    return [float(v) for v in (value if isinstance(value, (list, tuple)) else [value])]


def _model(cls, values: Dict[str, Any], prefix: str):
    try:
        return cls(**values)
    except ValidationError as exc:
        first = exc.errors()[0]
        path = ".".join([prefix] + [str(p) for p in first["loc"]])
        raise ConfigurationError(first["msg"], field_path=path)


def law_from(params: Dict[str, Any]) -> PotentialLaw:
    law = params.get("law", "uniform")
    if isinstance(law, PotentialLaw):
        return law
    if isinstance(law, dict):
        return _model(PotentialLaw, law, "law")
    values = {"kind": law}
    for key in ("q_minus", "q_plus", "shape"):
        if params.get(key) is not None:
            values[key] = params[key]
    return _model(PotentialLaw, values, "law")


def interaction_from(params: Dict[str, Any]) -> Optional[InteractionSpec]:
    spec = params.get("interaction")
    if isinstance(spec, InteractionSpec):
        return spec
    if isinstance(spec, dict):
        return _model(InteractionSpec, spec, "interaction")
    values = {key: params[key] for key in ("u0", "r0", "kernel") if params.get(key) is not None}
    return _model(InteractionSpec, values, "interaction")


def factory_from(params: Dict[str, Any], seed: Optional[int] = None) -> OperatorFactory:
    """Operator factory for the model described by the flat parameters."""
    mesh = params.get("mesh")
    if not isinstance(mesh, Mesh):
        mesh = _model(Mesh, {"M": params.get("M", 4)}, "mesh")
    interaction = interaction_from(params) if int(params.get("n", 1)) > 1 else None
    return OperatorFactory(law_from(params), interaction, mesh, int(params.get("seed", 0) if seed is None else seed))


def center_from(raw: Optional[Sequence], n: int, d: int) -> Tuple[Tuple[int, ...], ...]:
    """Nested n x d center, from a nested list, a flat list or nothing (origin)."""
    if raw is None:
        return tuple((0,) * d for _ in range(n))
    flat = [int(c) for c in (c for p in raw for c in (p if isinstance(p, (list, tuple)) else [p]))]
    if len(flat) != n * d:
        raise ConfigurationError(f"expected {n * d} coordinates, got {len(flat)}", field_path="center")
    return tuple(tuple(flat[i * d:(i + 1) * d]) for i in range(n))


def box_from(params: Dict[str, Any], key: str = "center", L_key: str = "L") -> BoxSpec:
    n, d = int(params.get("n", 1)), int(params.get("d", 1))
    center = center_from(params.get(key), n, d)
    sides = params.get("sides")
    if sides is not None:
        return BoxSpec(center=center, sides=tuple(int(L) for L in sides))
    return BoxSpec.cube(center, int(params.get(L_key, 4)))


class DiagnosticRegistry:
    """Registry for managing diagnostics."""

    def __init__(self):
        self.diagnostics: Dict[str, BaseDiagnostic] = {}
        self.logger = logging.getLogger("diagnostic_registry")

    def register(self, diagnostic: BaseDiagnostic):
        self.diagnostics[diagnostic.name] = diagnostic
        self.logger.debug(f"Registered diagnostic: {diagnostic.name}")

    def get(self, name: str) -> Optional[BaseDiagnostic]:
        return self.diagnostics.get(name)

    def list_diagnostics(self) -> List[str]:
        return list(self.diagnostics.keys())

    def get_all_schemas(self) -> Dict[str, Dict[str, Any]]:
        return {name: diagnostic.get_schema() for name, diagnostic in self.diagnostics.items()}

    def execute(self, name: str, **params) -> DiagnosticResponse:
        """Run a diagnostic by name; library errors come back inside the envelope."""
        diagnostic = self.get(name)
        if not diagnostic:
            return DiagnosticResponse(success=False, error=f"Diagnostic '{name}' not found", exit_code=2,
                                      error_type="ConfigurationError")
        missing = diagnostic.validate_parameters(params)
        if missing:
            return diagnostic._handle_error(f"Missing parameters: {', '.join(missing)}", 2, "ConfigurationError")

        started = time.perf_counter()
        try:
            response = diagnostic.execute(**params)
        except QGraphError as e:
            response = diagnostic._handle_error(str(e), e.exit_code, type(e).__name__)
        response.execution_time_ms = (time.perf_counter() - started) * 1000.0
        self.logger.info(f"{name}: success={response.success} passed={response.passed} "
                         f"({response.execution_time_ms:.0f} ms)")
        return response


# Global diagnostic registry instance
diagnostic_registry = DiagnosticRegistry()
