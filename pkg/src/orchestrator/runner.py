import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from src.config.settings import settings
from src.diagnostics import diagnostic_registry
from src.diagnostics.base_diagnostic import DiagnosticResponse
from src.models.experiment import DiagnosticSpec, ExperimentConfig, load_config
from src.storage import ResultStore
from src.utils.errors import ConfigurationError, QGraphError

logger = logging.getLogger("orchestrator")

# keys that change scheduling but not results
RUNTIME_KEYS = ("workers",)


class RunState(str, Enum):
    PENDING = "pending"
    PASSED = "passed"
    REPORTED = "reported"
    FAILED = "failed"
    CONFIG_ERROR = "config_error"
    SOLVER_ERROR = "solver_error"


EXIT_CODES = {
    RunState.PENDING: 0,
    RunState.PASSED: 0,
    RunState.REPORTED: 0,
    RunState.FAILED: 1,
    RunState.CONFIG_ERROR: 2,
    RunState.SOLVER_ERROR: 3,
}


def state_of(response: DiagnosticResponse) -> RunState:
    if not response.success:
        return RunState.CONFIG_ERROR if response.exit_code == 2 else (
            RunState.FAILED if response.exit_code == 1 else RunState.SOLVER_ERROR)
    if response.failed_assertion:
        return RunState.FAILED
    return RunState.PASSED if response.assertable else RunState.REPORTED


def hashed_params(params: Dict[str, Any]) -> Dict[str, Any]:
    return {key: value for key, value in params.items() if key not in RUNTIME_KEYS}


def flagged_defaults(config: ExperimentConfig) -> Dict[str, Any]:
    """Defaults a reader of the results should know were not chosen by the user."""
    flagged: Dict[str, Any] = {}
    interaction = config.model.interaction
    if "interaction" not in config.model.model_fields_set or "u0" not in interaction.model_fields_set:
        flagged["interaction.u0"] = interaction.u0
    if "interaction" not in config.model.model_fields_set or "kernel" not in interaction.model_fields_set:
        flagged["interaction.kernel"] = interaction.kernel.value
    for spec in config.diagnostics:
        if spec.name in ("schedule", "ds"):
            flagged[f"{spec.name}.L0"] = "user supplied, not derived"
            if str(spec.params.get("p1", "auto")) == "auto":
                flagged[f"{spec.name}.p1"] = "auto (smallest feasible)"
        if spec.name == "ils":
            flagged["ils.l_star"] = "regime threshold not verifiable numerically"
    return flagged


@dataclass
class RunRecord:
    """Outcome of one diagnostic within an experiment."""
    name: str
    state: RunState = RunState.PENDING
    response: Optional[DiagnosticResponse] = None
    files: Dict[str, str] = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.state]

    def to_dict(self) -> Dict[str, Any]:
        summary = self.response.summary() if self.response else {}
        summary.pop("execution_time_ms", None)
        return {"name": self.name, "state": self.state.value, "exit_code": self.exit_code,
                "files": self.files, "result": summary}


class ExperimentRunner:
    """Runs every diagnostic of an experiment and persists the results."""

    def __init__(self, config: ExperimentConfig, store: Optional[ResultStore] = None):
        self.config = config
        self.store = store or ResultStore(config.output.directory)
        self.records: List[RunRecord] = []

    def run_one(self, spec: DiagnosticSpec) -> RunRecord:
        record = RunRecord(name=spec.name)
        if diagnostic_registry.get(spec.name) is None:
            logger.error(f"Unknown diagnostic '{spec.name}'")
            record.state = RunState.CONFIG_ERROR
            record.response = DiagnosticResponse(success=False, diagnostic=spec.name, exit_code=2,
                                                 error=f"Diagnostic '{spec.name}' not found",
                                                 error_type="ConfigurationError")
            return record

        params = self.config.params_for(spec)
        logger.info(f"Running {spec.name}")
        response = diagnostic_registry.execute(spec.name, **params)
        record.response = response
        record.state = state_of(response)
        if response.success:
            written = self.store.write_response(response, hashed_params(params), self.config.output.formats)
            record.files = {key: path.name for key, path in written.items()}
        return record

    def run(self) -> int:
        """Execute all diagnostics; exit code of the worst outcome."""
        if self.config.threads:
            settings.threads = self.config.threads
        self.records = [self.run_one(spec) for spec in self.config.diagnostics]
        self.store.write_manifest(self.config.resolved(), [r.to_dict() for r in self.records],
                                  flagged_defaults(self.config))
        code = max((r.exit_code for r in self.records), default=0)
        logger.info(f"Experiment finished with exit code {code}")
        return code


def run(config_path: Union[str, Path], out: Optional[str] = None) -> int:
    """Run the experiment file at config_path; returns the process exit code."""
    try:
        config = load_config(config_path)
        if out is not None:
            config.output.directory = out
        return ExperimentRunner(config).run()
    except ConfigurationError as e:
        logger.error(f"Configuration error: {e}")
        return e.exit_code
    except QGraphError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
