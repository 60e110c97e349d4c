"""Shared parameter types, result containers and exceptions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Sequence

__all__ = [
    "CloneInvertError",
    "OutOfRange",
    "MissingField",
    "DomainError",
    "NoSolution",
    "Divergent",
    "Overflow",
    "TruncationExceeded",
    "ExperimentParams",
    "WitnessReport",
    "CloneStats",
    "SweepTable",
    "validate_params",
]


class CloneInvertError(Exception):
    """Base class for every error raised by this package."""


class OutOfRange(CloneInvertError, ValueError):
    pass


class MissingField(CloneInvertError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "missing field"


class DomainError(CloneInvertError, ValueError):
    pass


class NoSolution(CloneInvertError, ValueError):
    pass


class Divergent(CloneInvertError, ZeroDivisionError):
    pass


class Overflow(CloneInvertError, OverflowError):
    pass


class TruncationExceeded(CloneInvertError, RuntimeError):
    """Fock-space cutoff too small for the requested evolution.

    ``stage`` names the pipeline step at which the tail test failed.
    """

    def __init__(self, message: str, stage: Optional[str] = None, tail: float = float("nan")):
        super().__init__(message)
        self.stage = stage
        self.tail = tail


@dataclass(frozen=True)
class ExperimentParams:
    """Transmissions before, between and after the two cloners, plus both gains."""

    eta1: float
    eta2: float
    eta3: float
    g1: float
    g2: float

    @property
    def epsilon(self) -> float:
        return self.g2 - self.g1

    @property
    def matched(self) -> bool:
        return self.g2 == self.g1

    def replace(self, **changes: float) -> "ExperimentParams":
        values = self.as_dict()
        values.update(changes)
        return validate_params(values)

    def as_dict(self) -> dict:
        return {"eta1": self.eta1, "eta2": self.eta2, "eta3": self.eta3, "g1": self.g1, "g2": self.g2}


def validate_params(raw: Mapping[str, Any]) -> ExperimentParams:
    """Build an :class:`ExperimentParams` from a name -> value mapping.

    ``g`` is accepted as an alias of ``g1``; ``g2`` defaults to ``g1``.
    """
    if isinstance(raw, ExperimentParams):
        raw = raw.as_dict()
    values = dict(raw)
    if "g1" not in values and "g" in values:
        values["g1"] = values["g"]
    for name in ("eta1", "eta2", "eta3", "g1"):
        if values.get(name) is None:
            raise MissingField(f"missing required parameter {name!r}")
    if values.get("g2") is None:
        values["g2"] = values["g1"]

    out = {}
    for name in ("eta1", "eta2", "eta3", "g1", "g2"):
        try:
            x = float(values[name])
        except (TypeError, ValueError):
            raise OutOfRange(f"{name}={values[name]!r} is not a real number") from None
        if math.isnan(x):
            raise OutOfRange(f"{name} is NaN")
        if name.startswith("eta") and not 0.0 <= x <= 1.0:
            raise OutOfRange(f"{name}={x} outside [0, 1]")
        if name.startswith("g") and not (x >= 0.0 and math.isfinite(x)):
            raise OutOfRange(f"{name}={x} must be a finite gain >= 0")
        out[name] = x
    return ExperimentParams(**out)


@dataclass(frozen=True)
class WitnessReport:
    """Correlators <J_k sigma_k>, final mean photon number in A, and the witness."""

    corr_xx: float
    corr_yy: float
    corr_zz: float
    n_a: float
    witness: float

    @classmethod
    def from_parts(cls, xx: float, yy: float, zz: float, n_a: float) -> "WitnessReport":
        return cls(xx, yy, zz, n_a, abs(xx + yy + zz) - n_a)

    def as_dict(self) -> dict:
        return {
            "corr_xx": self.corr_xx,
            "corr_yy": self.corr_yy,
            "corr_zz": self.corr_zz,
            "n_a": self.n_a,
            "witness": self.witness,
        }


@dataclass(frozen=True)
class CloneStats:
    n_clones: float

    def __float__(self):
        return float(self.n_clones)


@dataclass
class SweepTable:
    """Named columns of real values; ``None`` marks a cell with no solution."""

    columns: Sequence[str]
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = list(self.columns)
        self.rows = [tuple(r) for r in self.rows]
        for i, row in enumerate(self.rows):
            if len(row) != len(self.columns):
                raise ValueError(f"row {i} has {len(row)} entries, expected {len(self.columns)}")

    def append(self, row: Sequence[Optional[float]]) -> None:
        row = tuple(row)
        if len(row) != len(self.columns):
            raise ValueError(f"row has {len(row)} entries, expected {len(self.columns)}")
        self.rows.append(row)

    def column(self, name: str) -> list:
        j = self.columns.index(name)
        return [r[j] for r in self.rows]

    def __len__(self):
        return len(self.rows)
