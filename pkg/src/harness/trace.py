from __future__ import annotations

import csv
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from decentral_apm.errors import TraceFormatError
from harness.counters import Counters
from harness.evaluation import evaluate_metrics
from network.weights import AgentMatrix
from problems.base import Problem
from problems.reference import Reference

logger = logging.getLogger(__name__)

HEADER = ["k", "grad_evals", "subgrad_evals", "comms", "obj_gap", "consensus_violation", "wall_ms"]


@dataclass(frozen=True)
class TraceRow:
    k: int
    grad_evals: int
    subgrad_evals: int
    comms: int
    obj_gap: float
    consensus_violation: float
    wall_ms: float


@dataclass
class RunTrace:
    rows: list[TraceRow] = field(default_factory=list)
    metadata: dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def last(self) -> TraceRow:
        return self.rows[-1]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])

    def cost_to_reach(self, threshold: float, cost: str = "grad_evals") -> Optional[int]:
        """Cost column at the first row whose objective gap is <= threshold."""
        for r in self.rows:
            if r.obj_gap <= threshold:
                return int(getattr(r, cost))
        return None


class TraceRecorder:
    """Emits one row every `metric_every` outer iterations and at the final one."""

    def __init__(
        self,
        problem: Problem,
        reference: Reference,
        counters: Counters,
        *,
        horizon: int,
        metric_every: int = 1,
        record_wall_time: bool = True,
        metadata: Optional[dict[str, Any]] = None,
    ):
        if metric_every < 1:
            raise ValueError("metric_every must be >= 1")
        self.problem = problem
        self.reference = reference
        self.counters = counters
        self.horizon = horizon
        self.metric_every = metric_every
        self.record_wall_time = record_wall_time
        self.trace = RunTrace(metadata=dict(metadata or {}))
        self._started = time.perf_counter()

    def record(self, k: int, x: AgentMatrix) -> None:
        if k % self.metric_every and k != self.horizon:
            return
        comms, grads, subgrads = self.counters.snapshot()
        wall_ms = (time.perf_counter() - self._started) * 1000.0 if self.record_wall_time else 0.0
        obj_gap, violation = evaluate_metrics(x, self.problem, self.reference)
        self.trace.rows.append(TraceRow(k, grads, subgrads, comms, obj_gap, violation, wall_ms))


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_trace_csv(trace: RunTrace, path: str | Path) -> Path:
    """`#`-prefixed metadata lines (key: JSON value), then the header and one line per row."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as fh:
            for key, value in trace.metadata.items():
                fh.write(f"# {key}: {json.dumps(value, sort_keys=True, default=str)}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(HEADER)
            for r in trace.rows:
                writer.writerow([_fmt(getattr(r, name)) for name in HEADER])
    except OSError as e:
        raise OSError(e.errno, f"cannot write trace to {path}: {e.strerror}") from e
    logger.info("Wrote %d trace rows to %s", len(trace.rows), path)
    return path


def read_trace_csv(path: str | Path) -> RunTrace:
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise OSError(e.errno, f"cannot read trace from {path}: {e.strerror}") from e

    metadata: dict[str, Any] = {}
    body_start = 0
    for body_start, line in enumerate(lines):
        if not line.startswith("#"):
            break
        key, sep, value = line[1:].strip().partition(": ")
        if not sep:
            raise TraceFormatError(f"{path}: malformed metadata line {line!r}")
        metadata[key] = json.loads(value)
    else:
        raise TraceFormatError(f"{path}: missing header")

    reader = csv.reader(lines[body_start:])
    header = next(reader)
    if header != HEADER:
        raise TraceFormatError(f"{path}: unexpected header {header}")

    rows: list[TraceRow] = []
    for values in reader:
        try:
            rows.append(
                TraceRow(
                    k=int(values[0]),
                    grad_evals=int(values[1]),
                    subgrad_evals=int(values[2]),
                    comms=int(values[3]),
                    obj_gap=float(values[4]),
                    consensus_violation=float(values[5]),
                    wall_ms=float(values[6]),
                )
            )
        except (ValueError, IndexError) as e:
            raise TraceFormatError(f"{path}: bad row {values}: {e}") from e
    return RunTrace(rows=rows, metadata=metadata)
