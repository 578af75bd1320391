"""
Monte Carlo diagnostics. All of them report estimates against the bounds they
probe and never fail a run.
"""

from dataclasses import asdict
from typing import Any, Dict

from src.diagnostics.base_diagnostic import (
    BaseDiagnostic, DiagnosticResponse, box_from, factory_from, floats_of, ints_of,
)
from src.diagnostics.monte_carlo import (
    mc_ds, mc_ils, mc_lifshitz, mc_wegner_one, mc_wegner_two, wegner_slope,
)
from src.geometry.separability import separated_pair
from src.msa.scheduler import build_schedule, ils_threshold


def _estimate(est) -> Dict[str, Any]:
    return est.model_dump(mode="json") if est is not None else None


class WegnerOneDiagnostic(BaseDiagnostic):
    """One-volume Wegner estimate over a dyadic ε grid."""

    def __init__(self):
        super().__init__(name="wegner1", description="ℙ{dist(σ(H), E) < ε} against |Λ||Π_iΛ|s(μ,2ε)")

    def get_schema(self) -> Dict[str, Any]:
        return {
            "type": "object",
            "properties": {
                "E": {"type": "number"},
                "eps": {"type": "array", "items": {"type": "number"}, "default": [0.04, 0.02, 0.01]},
                "trials": {"type": "integer", "minimum": 1, "default": 10000},
                "particle": {"type": "integer", "default": 0},
                "n": {"type": "integer"}, "d": {"type": "integer"}, "L": {"type": "integer"},
                "seed": {"type": "integer"}, "workers": {"type": "integer"},
            },
            "required": ["E"],
        }

    def execute(self, **params) -> DiagnosticResponse:
        factory = factory_from(params)
        box = box_from(params)
        trials, seed = int(params.get("trials", 10000)), int(params.get("seed", 0))
        reports = [mc_wegner_one(factory, box, float(params["E"]), eps, trials, seed, params.get("workers"),
                                 int(params.get("particle", 0)))
                   for eps in floats_of(params.get("eps"), (0.04, 0.02, 0.01))]
        rows = [{"eps": r.eps, **_estimate(r.estimate), "concentration": r.concentration,
                 "volume_factor": r.volume_factor, "ratio": r.ratio} for r in reports]
        ratios = [r.ratio for r in reports if r.estimate.successes > 0]
        data = {
            "E": float(params["E"]),
            "slope": wegner_slope(reports) if len(reports) >= 2 and all(r.estimate.successes for r in reports)
            else None,
            "ratio_spread": max(ratios) / min(ratios) if ratios and min(ratios) > 0 else None,
        }
        return self._handle_success(data, rows, tables={"wegner1_trials": [
            {"eps": r.eps, **row} for r in reports for row in r.rows]})


class WegnerTwoDiagnostic(BaseDiagnostic):
    """Two-volume Wegner estimate on a pre-separable pair with the independence oracle."""

    def __init__(self):
        super().__init__(name="wegner2", description="ℙ{dist(σ_I(H_1), σ_I(H_2)) < ε}")

    def get_schema(self) -> Dict[str, Any]:
        return {
            "type": "object",
            "properties": {
                "interval": {"type": "array", "items": {"type": "number"}},
                "eps": {"type": "number", "default": 0.05},
                "other": {"type": "array", "description": "Center of the second cube"},
                "trials": {"type": "integer", "minimum": 1, "default": 1000},
                "n": {"type": "integer"}, "d": {"type": "integer"}, "L": {"type": "integer"},
            },
            "required": ["interval"],
        }

    def execute(self, **params) -> DiagnosticResponse:
        factory = factory_from(params)
        n, d, L = int(params.get("n", 1)), int(params.get("d", 1)), int(params.get("L", 4))
        if params.get("other") is None and params.get("center") is None:
            first, second = separated_pair(n, d, L, int(params.get("r0", 1)))
        else:
            first = box_from(params)
            second = box_from(params, key="other")
        interval = tuple(floats_of(params["interval"], ()))
        report = mc_wegner_two(factory, first, second, interval, float(params.get("eps", 0.05)),
                               int(params.get("trials", 1000)), int(params.get("seed", 0)), params.get("workers"))
        data = {"first": first.to_dict(), "second": second.to_dict(), "interval": list(interval),
                "eps": report.eps, "estimate": _estimate(report.estimate), "oracle": _estimate(report.oracle),
                "concentration": report.concentration, "volume_factor": report.volume_factor,
                "ratio": report.ratio}
        return self._handle_success(data, report.rows)


class LifshitzDiagnostic(BaseDiagnostic):
    """Lifshitz-tail probabilities over a grid of cube sizes."""

    def __init__(self):
        super().__init__(name="lifshitz", description="ℙ{E₁ ≤ nq₋ + n b n_l⁻²} per cube size")

    def get_schema(self) -> Dict[str, Any]:
        return {
            "type": "object",
            "properties": {
                "l": {"type": "array", "items": {"type": "integer"}, "default": [1, 2, 3, 4, 5]},
                "b": {"type": "number", "default": 0.5},
                "trials": {"type": "integer", "minimum": 1, "default": 10000},
                "n": {"type": "integer", "default": 1}, "d": {"type": "integer", "default": 1},
            },
            "required": [],
        }

    def execute(self, **params) -> DiagnosticResponse:
        report = mc_lifshitz(factory_from(params), ints_of(params.get("l"), (1, 2, 3, 4, 5)),
                             float(params.get("b", 0.5)), int(params.get("trials", 10000)),
                             int(params.get("seed", 0)), int(params.get("n", 1)), int(params.get("d", 1)),
                             params.get("workers"))
        rows = [{"l": l, "n_l": n_l, **_estimate(est), "neg_log": est.neg_log}
                for l, n_l, est in zip(ints_of(params.get("l"), (1, 2, 3, 4, 5)), report.n_l, report.estimates)]
        return self._handle_success({"b": report.b, "n": report.n, "d": report.d, "gamma_hat": report.gamma_hat,
                                     "trend_holds": report.trend_holds}, rows)


class IlsDiagnostic(BaseDiagnostic):
    """Initial-scale gap event, optional grid scan and the constraint threshold."""

    def __init__(self):
        super().__init__(name="ils", description="ℙ{s_ω − nq₋ ≤ L₀^{β−1}} at the initial scale")

    def get_schema(self) -> Dict[str, Any]:
        return {
            "type": "object",
            "properties": {
                "L": {"type": "integer", "minimum": 2},
                "beta": {"type": "number", "default": 0.5},
                "trials": {"type": "integer", "minimum": 1, "default": 1000},
                "ns_scan": {"type": "boolean", "default": False},
                "xi": {"type": "number"}, "b": {"type": "number"}, "gamma": {"type": "number"},
            },
            "required": ["L"],
        }

    def execute(self, **params) -> DiagnosticResponse:
        box = box_from(params)
        beta = float(params.get("beta", 0.5))
        report = mc_ils(factory_from(params), box, int(params.get("trials", 1000)), int(params.get("seed", 0)),
                        beta, bool(params.get("ns_scan", False)), params.get("workers"))
        data = {"L0": report.L0, "beta": report.beta, "mass": report.mass, "eps0": report.eps0,
                "gap": _estimate(report.gap), "ns_scan": _estimate(report.ns_scan),
                "grid_points": report.grid_points, "grid_approximate": report.ns_scan is not None}
        if all(params.get(key) is not None for key in ("xi", "b", "gamma")):
            data["threshold"] = ils_threshold(box.n, box.d, beta, float(params["xi"]), float(params["b"]),
                                              float(params["gamma"]))
        return self._handle_success(data, [data["gap"]])


class DsDiagnostic(BaseDiagnostic):
    """Double-singularity probability of a separable pair at one scale."""

    def __init__(self):
        super().__init__(name="ds", description="ℙ{∃E: both cubes of a separable pair singular}")

    def get_schema(self) -> Dict[str, Any]:
        return {
            "type": "object",
            "properties": {
                "N": {"type": "integer"}, "p1": {"type": ["number", "string"], "default": "auto"},
                "L0": {"type": "integer"}, "K": {"type": "integer", "default": 0},
                "n": {"type": "integer", "default": 1}, "k": {"type": "integer", "default": 0},
                "trials": {"type": "integer", "default": 100},
                "grid_points": {"type": "integer", "default": 8, "description": "minimum energy grid size"},
            },
            "required": ["L0"],
        }

    def execute(self, **params) -> DiagnosticResponse:
        factory = factory_from(params)
        n, k = int(params.get("n", 1)), int(params.get("k", 0))
        N = int(params.get("N", n))
        p1 = params.get("p1", "auto")
        schedule = build_schedule(N, int(params.get("d", 1)), p1 if p1 == "auto" else str(p1),
                                  int(params["L0"]), max(k, int(params.get("K", 0))), factory.law.q_minus)
        report = mc_ds(factory, n, k, schedule, int(params.get("trials", 100)), int(params.get("seed", 0)),
                       int(params.get("r0", 1)), int(params.get("grid_points", 8)), params.get("workers"))
        data = {key: value for key, value in asdict(report).items() if key != "estimate"}
        data["estimate"] = _estimate(report.estimate)
        data["grid_approximate"] = True
        return self._handle_success(data, [{"n": n, "k": k, "L": report.L, **data["estimate"],
                                            "target": report.target, "margin": report.margin}])

