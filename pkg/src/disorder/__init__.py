"""
Disorder laws and random potentials.
"""

from .random_model import (
    concentration, constant_omega, eval_U, eval_W, export_omega, holder_certificate,
    import_omega, quantile, sample_omega,
)

__all__ = [
    "concentration", "constant_omega", "eval_U", "eval_W", "export_omega",
    "holder_certificate", "import_omega", "quantile", "sample_omega",
]
