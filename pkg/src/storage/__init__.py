"""
Persistence of experiment results.
"""

from .result_store import ResultStore, canonical_json, param_hash, read_csv, to_jsonable

__all__ = ["ResultStore", "canonical_json", "param_hash", "read_csv", "to_jsonable"]
