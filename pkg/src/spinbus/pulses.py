"""Piecewise-constant control pulses and their file formats.

JSON: {"dt": float, "samples_b1": [...], "samples_beta1": [...]?, "units": "J"}.
CSV export has columns t, b1[, beta1]; t is the left edge of each step.
The step-product ordering convention is fixed package-wide: later steps
multiply from the left.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = ["ControlPulse"]


@dataclass(frozen=True)
class ControlPulse:
    dt: float
    samples_b1: tuple[float, ...]
    samples_beta1: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "samples_b1", tuple(float(v) for v in self.samples_b1))
        if self.samples_beta1 is not None:
            object.__setattr__(self, "samples_beta1",
                               tuple(float(v) for v in self.samples_beta1))
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if len(self.samples_b1) < 1:
            raise ValueError("pulse needs at least one sample")
        if self.samples_beta1 is not None and len(self.samples_beta1) != len(self.samples_b1):
            raise ValueError("beta1 samples must match b1 samples in length")

    @property
    def n_steps(self) -> int:
        return len(self.samples_b1)

    @property
    def duration(self) -> float:
        return self.n_steps * self.dt

    @property
    def has_beta1(self) -> bool:
        return self.samples_beta1 is not None

    @classmethod
    def constant(cls, b1: float, dt: float, n_steps: int,
                 beta1: float | None = None) -> "ControlPulse":
        beta = None if beta1 is None else (beta1,) * n_steps
        return cls(dt, (b1,) * n_steps, beta)

    @classmethod
    def for_duration(cls, duration: float, dt: float = 0.25, b1: float = 1.0,
                     beta1: float | None = None) -> "ControlPulse":
        n = max(1, int(round(duration / dt)))
        return cls.constant(b1, dt, n, beta1)

    def with_samples(self, b1: np.ndarray, beta1: np.ndarray | None = None) -> "ControlPulse":
        beta = self.samples_beta1 if beta1 is None else tuple(beta1)
        return ControlPulse(self.dt, tuple(b1), beta)

    def to_dict(self) -> dict:
        out = {"dt": self.dt, "samples_b1": list(self.samples_b1), "units": "J"}
        if self.has_beta1:
            out["samples_beta1"] = list(self.samples_beta1)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ControlPulse":
        beta = data.get("samples_beta1")
        return cls(float(data["dt"]), tuple(data["samples_b1"]),
                   None if beta is None else tuple(beta))

    def save_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()))

    @classmethod
    def from_json(cls, path: str | Path) -> "ControlPulse":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def save_csv(self, path: str | Path) -> None:
        header = "t,b1,beta1" if self.has_beta1 else "t,b1"
        lines = [header]
        for m in range(self.n_steps):
            row = [repr(m * self.dt), repr(self.samples_b1[m])]
            if self.has_beta1:
                row.append(repr(self.samples_beta1[m]))
            lines.append(",".join(row))
        Path(path).write_text("\n".join(lines) + "\n")
