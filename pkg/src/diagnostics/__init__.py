"""
Diagnostics for the multi-particle quantum-graph model.

Every subcommand of the command line is a registered diagnostic returning a
DiagnosticResponse envelope.
"""

from .base_diagnostic import BaseDiagnostic, DiagnosticRegistry, DiagnosticResponse, diagnostic_registry
from .checks import (
    AssembleDiagnostic, CheegerDiagnostic, CombesThomasDiagnostic, DaviesGaffneyDiagnostic,
    DynMomentDiagnostic, GeometryDiagnostic, GreenDiagnostic, GriAuditDiagnostic, KroneckerDiagnostic,
    MassFitDiagnostic, NeumannDiagnostic, ScheduleDiagnostic, SpectrumDiagnostic, WeylDiagnostic,
)
from .estimators import (
    DsDiagnostic, IlsDiagnostic, LifshitzDiagnostic, WegnerOneDiagnostic, WegnerTwoDiagnostic,
)


# Register all diagnostics
def register_all_diagnostics():
    """Register every available diagnostic."""
    for diagnostic in (
        GeometryDiagnostic(), ScheduleDiagnostic(), AssembleDiagnostic(), SpectrumDiagnostic(),
        GreenDiagnostic(), CombesThomasDiagnostic(), DaviesGaffneyDiagnostic(), WegnerOneDiagnostic(),
        WegnerTwoDiagnostic(), LifshitzDiagnostic(), IlsDiagnostic(), DsDiagnostic(), GriAuditDiagnostic(),
        MassFitDiagnostic(), DynMomentDiagnostic(), CheegerDiagnostic(), WeylDiagnostic(),
        KroneckerDiagnostic(), NeumannDiagnostic(),
    ):
        diagnostic_registry.register(diagnostic)


# Auto-register diagnostics when the package is imported
register_all_diagnostics()

__all__ = [
    "BaseDiagnostic",
    "DiagnosticRegistry",
    "DiagnosticResponse",
    "diagnostic_registry",
    "register_all_diagnostics",
    "AssembleDiagnostic",
    "CheegerDiagnostic",
    "CombesThomasDiagnostic",
    "DaviesGaffneyDiagnostic",
    "DsDiagnostic",
    "DynMomentDiagnostic",
    "GeometryDiagnostic",
    "GreenDiagnostic",
    "GriAuditDiagnostic",
    "IlsDiagnostic",
    "KroneckerDiagnostic",
    "LifshitzDiagnostic",
    "MassFitDiagnostic",
    "NeumannDiagnostic",
    "ScheduleDiagnostic",
    "SpectrumDiagnostic",
    "WegnerOneDiagnostic",
    "WegnerTwoDiagnostic",
    "WeylDiagnostic",
]
