"""Sampled signal traces and their CSV / JSON serialization."""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import qmat

COLUMNS = ("t_ms", "s_x", "s_y", "magnitude", "fidelity")


@dataclass
class SignalTrace:
    """Time series of the transverse signal of S.

    ``s_x`` and ``s_y`` are ``Tr((X or Y) (x) I rho)``; ``fidelity`` is the
    fidelity of the reduced S state to the reduced initial state.
    """

    t_ms: np.ndarray
    s_x: np.ndarray
    s_y: np.ndarray
    magnitude: np.ndarray
    fidelity: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in COLUMNS:
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))
        n = len(self.t_ms)
        if any(len(getattr(self, c)) != n for c in COLUMNS):
            raise ValueError("trace columns differ in length")
        if n > 1 and np.any(np.diff(self.t_ms) <= 0):
            raise ValueError("trace times must be strictly increasing")

    def __len__(self):
        return len(self.t_ms)

    @property
    def signal(self) -> np.ndarray:
        """Complex signal ``s_x + i s_y``."""
        return self.s_x + 1j * self.s_y

    def with_times(self, t_ms) -> "SignalTrace":
        return SignalTrace(t_ms, self.s_x, self.s_y, self.magnitude, self.fidelity, dict(self.metadata))

    def rows(self):
        return zip(*(getattr(self, c) for c in COLUMNS))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for row in self.rows():
            # repr gives the shortest string that round-trips exactly
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {c: [float(v) for v in getattr(self, c)] for c in COLUMNS}
        payload["metadata"] = self.metadata
        return json.dumps(payload, indent=1, default=_json_default)

    @classmethod
    def from_csv(cls, text: str) -> "SignalTrace":
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        if tuple(header) != COLUMNS:
            raise ValueError(f"unexpected CSV header {header}")
        cols = list(zip(*[[float(v) for v in row] for row in reader])) or [()] * len(COLUMNS)
        return cls(*cols)

    @classmethod
    def from_json(cls, text: str) -> "SignalTrace":
        d = json.loads(text)
        return cls(*(d[c] for c in COLUMNS), metadata=d.get("metadata", {}))

    def write(self, path, fmt: str = "csv") -> Path:
        if fmt == "csv":
            text = self.to_csv()
        elif fmt == "json":
            text = self.to_json()
        else:
            raise ValueError(f"unknown format {fmt!r}")
        return write_atomic(path, text)


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    return str(o)


def write_atomic(path, text: str) -> Path:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


class TraceRecorder:
    """Accumulates samples of a 4x4 S-E state against a reference S state."""

    SX = qmat.kron(qmat.X, qmat.I2)
    SY = qmat.kron(qmat.Y, qmat.I2)

    def __init__(self, initial: np.ndarray):
        self.set_reference(initial)
        self.t, self.sx, self.sy, self.fid = [], [], [], []

    def set_reference(self, rho: np.ndarray):
        self.reference = qmat.ptrace(rho, [0])

    def sample(self, t: float, rho: np.ndarray):
        self.t.append(t)
        self.sx.append(qmat.expect(self.SX, rho).real)
        self.sy.append(qmat.expect(self.SY, rho).real)
        self.fid.append(qmat.fidelity(self.reference, qmat.ptrace(rho, [0])))

    def trace(self, metadata=None) -> SignalTrace:
        sx = np.array(self.sx)
        sy = np.array(self.sy)
        return SignalTrace(self.t, sx, sy, np.hypot(sx, sy), self.fid, metadata or {})
