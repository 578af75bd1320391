"""
Per-sample diagnostics: geometry, schedule, operators, spectra, resolvents and
the deterministic finite-volume estimates.
"""

import math
import re
from dataclasses import asdict
from functools import partial
from typing import Any, Dict, List, Tuple

import numpy as np

from src.diagnostics.base_diagnostic import (
    BaseDiagnostic, DiagnosticResponse, box_from, center_from, factory_from, floats_of, ints_of,
)
from src.diagnostics.estimates import (
    cheeger_gap_check, default_ct_targets, kronecker_check, neumann_convergence, rows_of,
    verify_combes_thomas, verify_davies_gaffney, verify_gri_three, verify_gri_two, verify_weyl,
)
from src.diagnostics.localization import eigenfunction_mass
from src.diagnostics.msa_predicates import (
    DEFAULT_J, check_good, check_NR_CNR, check_NT_HNR, classify_NS,
)
from src.fem.assembly import to_triplets
from src.geometry.lattice import (
    complex_summary, count_cubes, count_edges, enumerate_cubes, enumerate_edges, out_layer,
)
from src.geometry.separability import classify_interactive, separability, separability_audit
from src.models.geometry import BoxSpec
from src.msa.scheduler import build_schedule, ils_threshold, limit_mass, radii_consistent
from src.spectral.engine import GreenFunction, count_below, dyn_moment, lowest_eigs
from src.utils.errors import ConfigurationError
from src.utils.parallel import TrialPool
from src.utils.seeding import generator, mix

ENUMERATION_LIMIT = 200_000


def _point(raw, n: int, d: int) -> Tuple[int, ...]:
    return tuple(c for p in center_from(raw, n, d) for c in p)


class GeometryDiagnostic(BaseDiagnostic):
    """Lattice counts, separability criteria, interactivity and complex summaries."""

    assertable = True

    def __init__(self):
        super().__init__(name="geometry", description="Exact combinatorics and separability oracles")

    def get_schema(self) -> Dict[str, Any]:
        return {
            "type": "object",
            "properties": {
                "check": {"type": "string", "enum": ["counts", "separability", "interactivity", "summary"],
                          "default": "counts"},
                "exhaustive": {"type": "string", "description": "Compact grid code such as d1n2L2"},
                "n": {"type": "integer", "minimum": 1},
                "d": {"type": "integer", "minimum": 1},
                "L": {"type": "integer", "minimum": 1},
                "r0": {"type": "integer", "minimum": 1, "default": 1},
                "radius": {"type": "integer", "minimum": 1, "default": 30},
                "n_max": {"type": "integer", "default": 3},
                "d_max": {"type": "integer", "default": 3},
                "L_max": {"type": "integer", "default": 4},
                "M": {"type": "integer", "minimum": 2, "default": 4},
            },
            "required": [],
        }

    def execute(self, **params) -> DiagnosticResponse:
        code = params.get("exhaustive")
        if code:
            match = re.fullmatch(r"d(\d+)n(\d+)L(\d+)", str(code))
            if not match:
                raise ConfigurationError(f"cannot parse grid code '{code}'", field_path="exhaustive")
            params.update(d=int(match[1]), n=int(match[2]), L=int(match[3]))
            params.setdefault("check", "separability")
        check = params.get("check", "counts")

        if check == "counts":
            return self._counts(params)
        if check == "separability":
            n, d, L = int(params.get("n", 2)), int(params.get("d", 1)), int(params.get("L", 2))
            r0, radius = int(params.get("r0", 1)), int(params.get("radius", 30))
            audit = separability_audit(n, d, L, r0, radius)
            data = {"n": n, "d": d, "L": L, "r0": r0, "radius": radius, **asdict(audit)}
            return self._handle_success(data, [data], passed=audit.passed)
        if check == "interactivity":
            box = box_from(params)
            r0 = int(params.get("r0", 1))
            report = classify_interactive(box.center, box.L, r0)
            data = {"box": box.to_dict(), "kind": report.kind.value, "distance": report.distance_to_diagonal,
                    "threshold": report.threshold, "partition": report.partition}
            if params.get("other") is not None:
                other = center_from(params["other"], box.n, box.d)
                sep = separability(box.center, other, box.L, r0)
                data["separability"] = asdict(sep)
            return self._handle_success(data)
        if check == "summary":
            box = box_from(params)
            return self._handle_success(complex_summary(box, int(params.get("M", 4))))
        raise ConfigurationError(f"unknown check '{check}'", field_path="check")

    def _counts(self, params: Dict[str, Any]) -> DiagnosticResponse:
        rows = []
        for d in range(1, int(params.get("d_max", 3)) + 1):
            for L in range(1, int(params.get("L_max", 4)) + 1):
                edges = count_edges(d, L)
                enumerated_edges = len(enumerate_edges(d, L))
                for n in range(1, int(params.get("n_max", 3)) + 1):
                    cubes = count_cubes(n, d, (L,) * n)
                    if cubes <= ENUMERATION_LIMIT:
                        listed = len(enumerate_cubes(BoxSpec.cube(tuple((0,) * d for _ in range(n)), L)))
                    else:
                        listed = enumerated_edges ** n
                    rows.append({
                        "n": n, "d": d, "L": L,
                        "edges": edges, "edges_enumerated": enumerated_edges,
                        "cubes": cubes, "cubes_enumerated": listed,
                        "exhaustive": cubes <= ENUMERATION_LIMIT,
                        "passed": edges == enumerated_edges and cubes == listed,
                    })
        passed = all(row["passed"] for row in rows)
        return self._handle_success({"cases": len(rows), "failures": sum(not r["passed"] for r in rows)},
                                    rows, passed=passed)


class ScheduleDiagnostic(BaseDiagnostic):
    """Scale schedule with invariant checks and the limit mass."""

    def __init__(self):
        super().__init__(name="schedule", description="Scales, masses and exponents of the multi-scale induction")

    def get_schema(self) -> Dict[str, Any]:
        return {
            "type": "object",
            "properties": {
                "N": {"type": "integer", "minimum": 1},
                "d": {"type": "integer", "minimum": 1},
                "p1": {"type": ["number", "string"], "description": "Number or 'auto'"},
                "L0": {"type": "integer", "minimum": 2},
                "K": {"type": "integer", "minimum": 0},
                "q_minus": {"type": "number", "default": 0.0},
                "r0": {"type": "integer", "default": 1},
                "strict": {"type": "boolean", "default": False},
                "xi": {"type": "number"}, "b": {"type": "number"}, "gamma": {"type": "number"},
            },
            "required": ["N", "d", "p1", "L0", "K"],
        }

    def execute(self, **params) -> DiagnosticResponse:
        p1 = params["p1"]
        schedule = build_schedule(int(params["N"]), int(params["d"]), p1 if p1 == "auto" else str(p1),
                                  int(params["L0"]), int(params["K"]), float(params.get("q_minus", 0.0)),
                                  strict=bool(params.get("strict", False)))
        data = schedule.to_dict()
        limit = limit_mass(schedule)
        data["limit_mass"] = asdict(limit)
        data["radii_consistent"] = radii_consistent(schedule, int(params.get("r0", 1)))
        if all(params.get(key) is not None for key in ("xi", "b", "gamma")):
            data["ils_threshold"] = {
                n: ils_threshold(n, schedule.d, float(schedule.beta), float(params["xi"]),
                                 float(params["b"]), float(params["gamma"]))
                for n in range(1, schedule.N + 1)
            }
        return self._handle_success(data, schedule.to_rows())


class AssembleDiagnostic(BaseDiagnostic):
    """Finite-element assembly with triplet and disorder exports."""

    def __init__(self):
        super().__init__(name="assemble", description="Assemble (A, B) for one disorder sample",
                         schema_name="triplets")

    def get_schema(self) -> Dict[str, Any]:
        return {
            "type": "object",
            "properties": {
                "n": {"type": "integer"}, "d": {"type": "integer"}, "L": {"type": "integer"},
                "center": {"type": "array"}, "M": {"type": "integer", "minimum": 2},
                "seed": {"type": "integer"}, "decoupled": {"type": "boolean", "default": False},
                "triplets": {"type": "boolean", "default": True},
            },
            "required": [],
        }

    def execute(self, **params) -> DiagnosticResponse:
        factory = factory_from(params)
        box = box_from(params)
        omega = factory.omega(box)
        op = factory(box, decoupled=bool(params.get("decoupled", False)))
        data = {
            "box": box.to_dict(),
            "dofs": op.size,
            "nnz_A": int(op.A.nnz),
            "nnz_B": int(op.B.nnz),
            "floor": op.floor,
            "symmetry_error": float(abs(op.A - op.A.T).max()) if op.A.nnz else 0.0,
            **op.meta,
        }
        rows: List[Dict[str, Any]] = []
        if params.get("triplets", True):
            for label, matrix in (("A", op.A), ("B", op.B)):
                for i, j, v in zip(*to_triplets(matrix)):
                    rows.append({"matrix": label, "row": int(i), "col": int(j), "value": float(v)})
        omega_rows = [{"edge": edge.address(), "value": omega[edge]} for edge in sorted(omega.values)]
        return self._handle_success(data, rows, tables={"omega": omega_rows})


class SpectrumDiagnostic(BaseDiagnostic):
    """Lowest eigenvalues with residuals and an optional count below S."""

    def __init__(self):
        super().__init__(name="spectrum", description="Lowest generalized eigenvalues of one sample")

    def get_schema(self) -> Dict[str, Any]:
        return {
            "type": "object",
            "properties": {
                "k": {"type": "integer", "minimum": 1, "default": 10},
                "S": {"type": "number"},
                "n": {"type": "integer"}, "d": {"type": "integer"}, "L": {"type": "integer"},
                "seed": {"type": "integer"},
            },
            "required": [],
        }

    def execute(self, **params) -> DiagnosticResponse:
        op = factory_from(params)(box_from(params))
        result = lowest_eigs(op, min(int(params.get("k", 10)), op.size))
        rows = [{"index": j, "eigenvalue": float(E), "residual": float(r)}
                for j, (E, r) in enumerate(zip(result.eigenvalues, result.residual_norms))]
        data = {"dofs": op.size, "ground_energy": result.ground_energy, "floor": op.floor}
        if params.get("S") is not None:
            data["count_below_S"] = count_below(op, float(params["S"]))
        return self._handle_success(data, rows)


class GreenDiagnostic(BaseDiagnostic):
    """Green block norms and the multi-scale predicates of one cube."""

    def __init__(self):
        super().__init__(name="green", description="Resolvent block norms, NS/NR/CNR/good/NT/HNR predicates")

    def get_schema(self) -> Dict[str, Any]:
        return {
            "type": "object",
            "properties": {
                "E": {"type": "number"},
                "predicate": {"type": "string", "enum": ["norms", "ns", "cnr", "good", "nt_hnr"],
                              "default": "norms"},
                "x": {"type": "array"}, "y": {"type": "array"},
                "m": {"type": "number", "default": 0.0},
                "ell": {"type": "integer", "minimum": 7},
                "J": {"type": "integer", "default": DEFAULT_J},
                "budget": {"type": "integer"},
            },
            "required": ["E"],
        }

    def execute(self, **params) -> DiagnosticResponse:
        factory = factory_from(params)
        box = box_from(params)
        E = float(params["E"])
        m = float(params.get("m", 0.0))
        predicate = params.get("predicate", "norms")
        budget = params.get("budget")
        budget = int(budget) if budget is not None else None

        if predicate == "norms":
            op = factory(box)
            green = GreenFunction(op, E)
            source = _point(params.get("y"), box.n, box.d) if params.get("y") else tuple(box.flat_center())
            if params.get("x") is not None:
                targets = [_point(params["x"], box.n, box.d)]
            else:
                targets = out_layer(source, box.L)
            norms = green.sweep(source, targets)
            rows = [{"source": list(source), "target": list(x), "norm": float(v)} for x, v in zip(targets, norms)]
            return self._handle_success({"energy": E, "distance": green.distance,
                                         "max_norm": float(norms.max())}, rows)
        if predicate == "ns":
            report = classify_NS(factory(box), box, E, m)
        elif predicate == "cnr":
            report = check_NR_CNR(factory, box, E, budget, int(params.get("seed", 0)))
        elif predicate == "good":
            report = check_good(factory, box, E, m, int(params.get("ell", 7)), int(params.get("J", DEFAULT_J)),
                                int(params.get("r0", 1)), budget)
        elif predicate == "nt_hnr":
            report = check_NT_HNR(factory, box, E, m, int(params.get("ell", 7)), factory.law.q_minus,
                                  int(params.get("r0", 1)), budget)
        else:
            raise ConfigurationError(f"unknown predicate '{predicate}'", field_path="predicate")
        return self._handle_success(report.to_dict())


def _ct_trial(factory, box: BoxSpec, etas: Tuple[float, ...], base: int, index: int) -> List[Dict[str, Any]]:
    op = factory.with_seed(mix(base, index))(box)
    s = lowest_eigs(op, 1).ground_energy
    u = tuple(int(c) for c in box.flat_center())
    pairs = [(u, x) for x in default_ct_targets(box)]
    rows = []
    for eta in etas:
        for row in rows_of(verify_combes_thomas(op, s - eta, pairs)):
            rows.append({"trial": index, **row})
    return rows


class CombesThomasDiagnostic(BaseDiagnostic):
    """Resolvent decay below the spectrum over disorder samples."""

    assertable = True

    def __init__(self):
        super().__init__(name="ct-check", description="Combes-Thomas resolvent envelope")

    def get_schema(self) -> Dict[str, Any]:
        return {
            "type": "object",
            "properties": {
                "trials": {"type": "integer", "minimum": 1, "default": 50},
                "eta": {"type": "array", "items": {"type": "number"}, "default": [0.25, 0.5]},
                "n": {"type": "integer"}, "d": {"type": "integer"}, "L": {"type": "integer", "default": 8},
                "seed": {"type": "integer"}, "workers": {"type": "integer"},
            },
            "required": [],
        }

    def execute(self, **params) -> DiagnosticResponse:
        params.setdefault("L", 8)
        factory = factory_from(params)
        box = box_from(params)
        etas = tuple(floats_of(params.get("eta"), (0.25, 0.5)))
        trials, seed = int(params.get("trials", 50)), int(params.get("seed", 0))
        fn = partial(_ct_trial, factory, box, etas, seed)
        rows = [row for chunk in TrialPool(params.get("workers")).map(fn, range(trials)) for row in chunk]
        passes = sum(1 for row in rows if row["passed"])
        failed_trials = sorted({row["trial"] for row in rows if not row["passed"]})
        data = {"cases": len(rows), "passes": passes, "trials": trials,
                "pass_rate": f"{trials - len(failed_trials)}/{trials}"}
        return self._handle_success(data, rows, passed=passes == len(rows))


def _dg_trial(factory, box: BoxSpec, t_grid: Tuple[float, ...], offsets: Tuple[int, ...], base: int,
              index: int) -> List[Dict[str, Any]]:
    seed = mix(base, index)
    op = factory.with_seed(seed)(box)
    u = tuple(int(c) for c in box.flat_center())
    pairs = [([u], [(u[0] + k,) + u[1:]]) for k in offsets]
    return [{"trial": index, **row} for row in rows_of(verify_davies_gaffney(op, t_grid, pairs, seed))]


class DaviesGaffneyDiagnostic(BaseDiagnostic):
    """Heat-kernel decay between separated cells over disorder samples."""

    assertable = True

    def __init__(self):
        super().__init__(name="dg-check", description="Davies-Gaffney semigroup envelope")

    def get_schema(self) -> Dict[str, Any]:
        return {
            "type": "object",
            "properties": {
                "trials": {"type": "integer", "minimum": 1, "default": 50},
                "t": {"type": "array", "items": {"type": "number"}, "default": [0.5, 1.0, 2.0]},
                "offsets": {"type": "array", "items": {"type": "integer"}, "default": [3, 4, 5]},
                "n": {"type": "integer"}, "d": {"type": "integer"}, "L": {"type": "integer", "default": 8},
                "seed": {"type": "integer"}, "workers": {"type": "integer"},
            },
            "required": [],
        }

    def execute(self, **params) -> DiagnosticResponse:
        params.setdefault("L", 8)
        factory = factory_from(params)
        box = box_from(params)
        t_grid = tuple(floats_of(params.get("t"), (0.5, 1.0, 2.0)))
        offsets = tuple(ints_of(params.get("offsets"), (3, 4, 5)))
        if max(offsets) >= box.sides[0]:
            raise ConfigurationError(f"offsets must stay below L={box.sides[0]}", field_path="offsets")
        trials, seed = int(params.get("trials", 50)), int(params.get("seed", 0))
        fn = partial(_dg_trial, factory, box, t_grid, offsets, seed)
        rows = [row for chunk in TrialPool(params.get("workers")).map(fn, range(trials)) for row in chunk]
        counts = {status: sum(1 for row in rows if row["status"] == status)
                  for status in ("pass", "fail", "inconclusive")}
        data = {"cases": len(rows), **counts}
        return self._handle_success(data, rows, passed=counts["fail"] == 0 and counts["inconclusive"] == 0)


class GriAuditDiagnostic(BaseDiagnostic):
    """Geometric resolvent inequalities with the unknown constants reported."""

    def __init__(self):
        super().__init__(name="gri-audit", description="Geometric resolvent inequality audit")

    def get_schema(self) -> Dict[str, Any]:
        return {
            "type": "object",
            "properties": {
                "mode": {"type": "string", "enum": ["two", "three"], "default": "two"},
                "E": {"type": "number"},
                "l": {"type": "integer", "minimum": 8, "default": 8},
                "L": {"type": "integer", "default": 16},
                "u": {"type": "array"}, "x": {"type": "array"}, "y": {"type": "array"},
                "S": {"type": "number", "default": 1.0},
                "J": {"type": "array", "items": {"type": "integer"}},
                "split": {"type": "string", "enum": ["complement", "part"], "default": "complement"},
            },
            "required": ["E"],
        }

    def execute(self, **params) -> DiagnosticResponse:
        factory = factory_from(params)
        n, d = int(params.get("n", 1)), int(params.get("d", 1))
        E = float(params["E"])
        if params.get("mode", "two") == "two":
            outer = box_from({**params, "L": params.get("L", 16)})
            inner = BoxSpec.cube(outer.center, int(params.get("l", 8)))
            u = _point(params.get("u"), n, d) if params.get("u") else tuple(inner.flat_center())
            rows = rows_of(verify_gri_two(factory, inner, outer, E, u))
            constants = [row["empirical_C"] for row in rows]
            return self._handle_success({"l": inner.L, "L": outer.L, "max_empirical_C": max(constants),
                                         "min_empirical_C": min(constants)}, rows)

        L, r0 = int(params.get("L", 4)), int(params.get("r0", 1))
        if params.get("center") is None:
            params["center"] = [[j * (2 * L + r0 + 1)] + [0] * (d - 1) for j in range(n)]
        box = box_from({**params, "L": L})
        x = _point(params.get("x"), n, d) if params.get("x") else tuple(int(c) for c in box.flat_center())
        if params.get("y"):
            y = _point(params["y"], n, d)
        else:
            y = x[:-1] + (x[-1] + L - 1,)
        J = params.get("J")
        audit = verify_gri_three(factory, box, E, x, y, float(params.get("S", 1.0)), factory.law.q_minus, r0,
                                 tuple(J) if J is not None else None, params.get("split", "complement"))
        return self._handle_success(asdict(audit), [asdict(audit)])


class MassFitDiagnostic(BaseDiagnostic):
    """Exponential decay mass of eigenfunctions."""

    def __init__(self):
        super().__init__(name="mass-fit", description="Fitted eigenfunction decay mass")

    def get_schema(self) -> Dict[str, Any]:
        return {
            "type": "object",
            "properties": {
                "interval": {"type": "array", "items": {"type": "number"}},
                "count": {"type": "integer", "minimum": 1, "default": 5},
                "n": {"type": "integer"}, "d": {"type": "integer"}, "L": {"type": "integer"},
                "seed": {"type": "integer"},
            },
            "required": [],
        }

    def execute(self, **params) -> DiagnosticResponse:
        op = factory_from(params)(box_from(params))
        if params.get("interval") is not None:
            interval = tuple(floats_of(params["interval"], ()))
        else:
            vals = lowest_eigs(op, min(int(params.get("count", 5)), op.size)).eigenvalues
            interval = (float(vals[0]), float(vals[-1]))
        fit = eigenfunction_mass(op, interval)
        return self._handle_success({"mass": fit.mass, "r_squared": fit.r_squared, "interval": list(fit.interval),
                                     "eigenfunctions": fit.count}, fit.rows)


class DynMomentDiagnostic(BaseDiagnostic):
    """Hilbert-Schmidt moments of spectrally localized functions of H."""

    def __init__(self):
        super().__init__(name="dyn-moment", description="‖X^{s/2} f(H) E(I) χ_K‖²")

    def get_schema(self) -> Dict[str, Any]:
        return {
            "type": "object",
            "properties": {
                "interval": {"type": "array", "items": {"type": "number"}},
                "s": {"type": "array", "items": {"type": "number"}, "default": [0.0, 1.0, 2.0]},
                "cells": {"type": "array"},
                "f": {"type": "string", "enum": ["one", "heat"], "default": "one"},
                "t": {"type": "number", "default": 1.0},
            },
            "required": ["interval"],
        }

    def execute(self, **params) -> DiagnosticResponse:
        box = box_from(params)
        op = factory_from(params)(box)
        interval = tuple(floats_of(params["interval"], ()))
        cells = [_point(c, box.n, box.d) for c in params["cells"]] if params.get("cells") else [
            tuple(int(c) for c in box.flat_center())]
        t = float(params.get("t", 1.0))
        f = (lambda E: np.exp(-t * E)) if params.get("f", "one") == "heat" else np.ones_like
        rows = [{"s": s, "moment": dyn_moment(op, interval, cells, s, f)}
                for s in floats_of(params.get("s"), (0.0, 1.0, 2.0))]
        return self._handle_success({"interval": list(interval), "cells": [list(c) for c in cells]}, rows)


class CheegerDiagnostic(BaseDiagnostic):
    """Spectral gap of the free Kirchhoff Laplacian."""

    assertable = True

    def __init__(self):
        super().__init__(name="cheeger", description="Discrete E₂ of the free Laplacian against n_l⁻²")

    def get_schema(self) -> Dict[str, Any]:
        return {
            "type": "object",
            "properties": {
                "l": {"type": "array", "items": {"type": "integer"}, "default": [2, 3, 4, 5]},
                "d": {"type": "array", "items": {"type": "integer"}, "default": [1, 2]},
                "M": {"type": "integer", "minimum": 2, "default": 4},
            },
            "required": [],
        }

    def execute(self, **params) -> DiagnosticResponse:
        M = int(params.get("M", 4))
        rows = rows_of(cheeger_gap_check(l, d, M)
                       for d in ints_of(params.get("d"), (1, 2)) for l in ints_of(params.get("l"), (2, 3, 4, 5)))
        passed = all(row["passed"] for row in rows)
        return self._handle_success({"cases": len(rows), "passes": sum(r["passed"] for r in rows)}, rows,
                                    passed=passed)


def _weyl_trial(factory, box: BoxSpec, S: float, base: int, index: int) -> Dict[str, Any]:
    check = verify_weyl(factory.with_seed(mix(base, index))(box), S, factory.law.q_minus)
    return {"trial": index, **asdict(check)}


class WeylDiagnostic(BaseDiagnostic):
    """Eigenvalue counting bound with the explicit constant."""

    assertable = True

    def __init__(self):
        super().__init__(name="weyl", description="#{E_j ≤ S} ≤ C|Λ|")

    def get_schema(self) -> Dict[str, Any]:
        return {
            "type": "object",
            "properties": {
                "S": {"type": "number", "default": 4 * math.pi},
                "trials": {"type": "integer", "minimum": 1, "default": 20},
                "n": {"type": "integer", "default": 2}, "d": {"type": "integer"}, "L": {"type": "integer"},
            },
            "required": [],
        }

    def execute(self, **params) -> DiagnosticResponse:
        params.setdefault("n", 2)
        factory = factory_from(params)
        box = box_from(params)
        S = float(params.get("S", 4 * math.pi))
        fn = partial(_weyl_trial, factory, box, S, int(params.get("seed", 0)))
        rows = TrialPool(params.get("workers")).map(fn, range(int(params.get("trials", 20))))
        return self._handle_success({"S": S, "constant": rows[0]["constant"], "volume": box.volume(),
                                     "max_count": max(r["count"] for r in rows)}, rows,
                                    passed=all(r["passed"] for r in rows))


def pi_box(n: int, d: int, L: int, r0: int, rng: np.random.Generator) -> BoxSpec:
    """A decomposable cube: particle j sits j·g along the first axis, g ≥ 2L + r0."""
    gap = 2 * L + r0 + int(rng.integers(0, 4))
    sign = 1 if rng.random() < 0.5 else -1
    center = tuple((sign * j * gap,) + (0,) * (d - 1) for j in range(n))
    return BoxSpec.cube(center, L)


class KroneckerDiagnostic(BaseDiagnostic):
    """Spectra of decomposable cubes against sums of factor spectra."""

    assertable = True

    def __init__(self):
        super().__init__(name="kronecker", description="Kronecker-sum oracle on random decomposable cubes")

    def get_schema(self) -> Dict[str, Any]:
        return {
            "type": "object",
            "properties": {
                "trials": {"type": "integer", "minimum": 1, "default": 10},
                "count": {"type": "integer", "minimum": 1, "default": 20},
                "tolerance": {"type": "number", "default": 1e-9},
                "n": {"type": "integer", "default": 2}, "d": {"type": "integer"},
                "L": {"type": "integer", "default": 6}, "r0": {"type": "integer", "default": 1},
            },
            "required": [],
        }

    def execute(self, **params) -> DiagnosticResponse:
        params.setdefault("n", 2)
        n, d, L, r0 = int(params["n"]), int(params.get("d", 1)), int(params.get("L", 6)), int(params.get("r0", 1))
        seed = int(params.get("seed", 0))
        rows = []
        for i in range(int(params.get("trials", 10))):
            box = pi_box(n, d, L, r0, generator(mix(seed, i)))
            check = kronecker_check(factory_from(params, seed=mix(seed, i)), box, r0,
                                    int(params.get("count", 20)), float(params.get("tolerance", 1e-9)))
            rows.append({"trial": i, **asdict(check)})
        worst = max(row["max_relative_error"] for row in rows)
        return self._handle_success({"max_relative_error": worst}, rows, passed=all(r["passed"] for r in rows))


class NeumannDiagnostic(BaseDiagnostic):
    """Mesh convergence order of the free interval spectrum."""

    assertable = True

    def __init__(self):
        super().__init__(name="neumann", description="Fitted order of |E_k(M) − (kπ/2L)²| for every k")

    def get_schema(self) -> Dict[str, Any]:
        return {
            "type": "object",
            "properties": {
                "L": {"type": "integer", "default": 5},
                "meshes": {"type": "array", "items": {"type": "integer"}, "default": [8, 16, 32]},
                "k_max": {"type": "integer", "default": 5},
                "tolerance": {"type": "number", "default": 0.3},
            },
            "required": [],
        }

    def execute(self, **params) -> DiagnosticResponse:
        result = neumann_convergence(int(params.get("L", 5)), ints_of(params.get("meshes"), (8, 16, 32)),
                                     int(params.get("k_max", 5)))
        rows = [{"k": k + 1, "order": order, **{f"error_M{M}": result.errors[M][k] for M in result.meshes}}
                for k, order in enumerate(result.orders)]
        tolerance = float(params.get("tolerance", 0.3))
        low, high = min(result.orders), max(result.orders)
        passed = 2.0 - tolerance <= low and high <= 2.0 + tolerance
        data = {"mean_order": result.mean_order, "min_order": low, "max_order": high, "L": result.L}
        return self._handle_success(data, rows, passed=passed)
