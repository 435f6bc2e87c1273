"""Evaluation metrics, the convergence-bound diagnostic, and report I/O.

The report separates deterministic content (accuracy, simulated time) from
wall-clock timing: ``report.json`` is byte-stable for a fixed config+seed
(wall times enter it only on request), while ``rounds.csv`` always carries
the measured wall time per round.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

from .datasets import Dataset
from .models import ModelSpec, evaluate_accuracy

__all__ = [
    "RoundMetrics",
    "ExperimentReport",
    "BoundInputs",
    "accuracy",
    "efficiency_ratio",
    "theorem_bound",
    "emit_report",
    "parse_report_json",
    "CSV_HEADER",
]

CSV_HEADER = ["round", "r_t", "accuracy", "sim_time_s", "wall_time_s"]


@dataclass
class RoundMetrics:
    round: int
    r_t: float
    accuracy: float
    sim_time_s: float
    wall_time_s: float

    def __post_init__(self):
        self.round = int(self.round)
        for name in ("r_t", "accuracy", "sim_time_s", "wall_time_s"):
            setattr(self, name, float(getattr(self, name)))
        if not 0.0 <= self.accuracy <= 1.0:
            raise ValueError(f"accuracy must lie in [0, 1], got {self.accuracy}")
        if self.sim_time_s < 0 or self.wall_time_s < 0:
            raise ValueError("times must be nonnegative")


@dataclass
class ExperimentReport:
    config: dict
    seed: int
    backend: str
    time_basis: str  # "simulated" (mock backend) or "wall" (real crypto)
    rounds: list = field(default_factory=list)
    final_accuracy: float = 0.0
    total_sim_time_s: float = 0.0
    total_wall_time_s: float = 0.0
    efficiency_ratio: float | None = None
    complete: bool = False
    notes: list = field(default_factory=list)


def accuracy(spec: ModelSpec, params, test_set: Dataset) -> float:
    """Argmax accuracy of the model on a held-out set; empty set rejected."""
    if len(test_set) == 0:
        raise ValueError("test set is empty")
    return evaluate_accuracy(spec, params, test_set.features, test_set.labels)


def efficiency_ratio(accuracy_pct: float, time_s: float) -> float:
    """Trade-off score (accuracy / time) x 100, accuracy in percent."""
    if not time_s > 0:
        raise ValueError(f"time must be positive, got {time_s}")
    return accuracy_pct / time_s * 100.0


@dataclass(frozen=True)
class BoundInputs:
    """Inputs to the convergence-bound diagnostic.

    C1 scales the clipping term and C2 the privacy-noise term; both fold
    together smoothness/gradient constants the analysis leaves abstract, so
    the output is a qualitative diagnostic, not a certified bound.
    """

    C1: float
    C2: float
    r: float
    epsilon: float
    delta: float
    N: int
    T: int

    def __post_init__(self):
        if self.C1 < 0 or self.C2 < 0:
            raise ValueError("C1 and C2 must be nonnegative")
        if not 0.0 <= self.r <= 1.0:
            raise ValueError(f"r must lie in [0, 1], got {self.r}")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if self.N < 1 or self.T < 1:
            raise ValueError("N and T must be >= 1")


def theorem_bound(b: BoundInputs) -> float:
    """Gradient-norm bound: 1/T + C1(1-r) + C2(1-r) ln(1/delta) / (N^2 eps^2).

    The O(1/T) term is taken with unit constant.  Strictly decreasing in r
    (for C1 + C2 > 0), in epsilon, and in N.
    """
    noise_term = b.C2 * (1.0 - b.r) * math.log(1.0 / b.delta) / (b.N ** 2 * b.epsilon ** 2)
    return 1.0 / b.T + b.C1 * (1.0 - b.r) + noise_term


# -- serialization --------------------------------------------------------------


def _round_dict(rm: RoundMetrics, include_wall_time: bool) -> dict:
    out = {"round": rm.round, "r_t": rm.r_t, "accuracy": rm.accuracy,
           "sim_time_s": rm.sim_time_s}
    if include_wall_time:
        out["wall_time_s"] = rm.wall_time_s
    return out


def emit_report(report: ExperimentReport, fmt: str,
                include_wall_time: bool = False) -> bytes:
    """Serialize to JSON (full report) or CSV (per-round table).

    JSON field ordering is fixed, so equal reports serialize to equal
    bytes.  Wall-clock fields enter the JSON only when requested; the CSV
    always carries them.
    """
    if fmt == "json":
        doc = {
            "schema": "fedsplit-report-v1",
            "complete": report.complete,
            "seed": report.seed,
            "backend": report.backend,
            "time_basis": report.time_basis,
            "config": {k: report.config[k] for k in sorted(report.config)},
            "rounds": [_round_dict(rm, include_wall_time) for rm in report.rounds],
            "final_accuracy": report.final_accuracy,
            "total_sim_time_s": report.total_sim_time_s,
            "efficiency_ratio": report.efficiency_ratio,
            "notes": list(report.notes),
        }
        if include_wall_time:
            doc["total_wall_time_s"] = report.total_wall_time_s
        return (json.dumps(doc, indent=2) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for rm in report.rounds:
            writer.writerow([rm.round, repr(rm.r_t), repr(rm.accuracy),
                             repr(rm.sim_time_s), repr(rm.wall_time_s)])
        return buf.getvalue().encode()
    raise ValueError(f"unknown report format {fmt!r}")


def parse_report_json(blob: bytes) -> ExperimentReport:
    doc = json.loads(blob.decode())
    if doc.get("schema") != "fedsplit-report-v1":
        raise ValueError(f"unknown report schema {doc.get('schema')!r}")
    rounds = [RoundMetrics(round=r["round"], r_t=r["r_t"], accuracy=r["accuracy"],
                           sim_time_s=r["sim_time_s"],
                           wall_time_s=r.get("wall_time_s", 0.0))
              for r in doc["rounds"]]
    return ExperimentReport(
        config=dict(doc["config"]),
        seed=doc["seed"],
        backend=doc["backend"],
        time_basis=doc["time_basis"],
        rounds=rounds,
        final_accuracy=doc["final_accuracy"],
        total_sim_time_s=doc["total_sim_time_s"],
        total_wall_time_s=doc.get("total_wall_time_s", 0.0),
        efficiency_ratio=doc["efficiency_ratio"],
        complete=doc["complete"],
        notes=list(doc["notes"]),
    )
