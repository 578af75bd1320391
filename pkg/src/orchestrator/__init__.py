from .runner import ExperimentRunner, RunRecord, RunState, run

__all__ = ["ExperimentRunner", "RunRecord", "RunState", "run"]
