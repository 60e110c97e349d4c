"""Validation and science scans built on the analytic and Fock engines."""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from . import __version__, analytic, fock
from .core import ExperimentParams, NoSolution, OutOfRange, SweepTable, validate_params

__all__ = [
    "DiscrepancyReport",
    "ScanSpec",
    "DEFAULT_GRID",
    "worker_count",
    "oracle_compare",
    "oracle_grid",
    "figure2_sweep",
    "mismatch_scan",
    "sensitivity_scan",
]

THREADS_ENV = "CLONE_INVERT_THREADS"

DEFAULT_GRID = {
    "eta": (0.7, 0.9, 1.0),
    "g": (0.0, 0.3, 0.7, 1.0),
}

_SCANNABLE = ("eta1", "eta2", "eta3", "g1", "epsilon")


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _map_cells(fn: Callable, items: Sequence) -> list:
    """Evaluate ``fn`` on every item; results come back in input order."""
    items = list(items)
    n = min(worker_count(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class DiscrepancyReport:
    """Absolute analytic-vs-oracle differences for one parameter point."""

    params: ExperimentParams
    diffs: Dict[str, float]
    tolerance: float
    n_max: int
    max_tail: float
    trace_drift: float

    @property
    def pass_(self) -> bool:
        return all(d <= self.tolerance for d in self.diffs.values())

    @property
    def worst(self) -> float:
        return max(self.diffs.values())

    def as_dict(self) -> dict:
        return {
            "params": self.params.as_dict(),
            "diffs": dict(self.diffs),
            "tolerance": self.tolerance,
            "pass": self.pass_,
            "n_max": self.n_max,
            "max_tail": self.max_tail,
            "trace_drift": self.trace_drift,
        }


@dataclass
class ScanSpec:
    """Ranges ``name -> (start, stop, count)`` plus fixed values for the rest.

    ``dw_min`` is the smallest resolvable witness change; it is
    experiment-dependent and only used by :func:`sensitivity_scan`.
    """

    ranges: Dict[str, Tuple[float, float, int]] = field(default_factory=dict)
    fixed: Dict[str, float] = field(default_factory=dict)
    targets: Sequence[float] = (0.0, 0.5, 1.0)
    dw_min: Optional[float] = None

    def __post_init__(self):
        for name, (start, stop, count) in self.ranges.items():
            if name not in _SCANNABLE:
                raise OutOfRange(f"cannot scan {name!r}; choose from {_SCANNABLE}")
            if int(count) != count or count < 1:
                raise OutOfRange(f"count for {name} must be an integer >= 1")
            if name.startswith("eta"):
                if not (0.0 <= start <= 1.0 and 0.0 <= stop <= 1.0):
                    raise OutOfRange(f"{name} range [{start}, {stop}] leaves [0, 1]")
            elif name == "g1" and min(start, stop) < 0:
                raise OutOfRange(f"g1 range [{start}, {stop}] includes negative gains")
        if self.dw_min is not None and not self.dw_min > 0:
            raise OutOfRange("dw_min must be > 0")

    def values(self, name: str) -> np.ndarray:
        start, stop, count = self.ranges[name]
        return np.linspace(start, stop, int(count))

    def params(self, **point: float) -> ExperimentParams:
        raw = dict(self.fixed)
        raw.update(point)
        eps = raw.pop("epsilon", None)
        if "g1" not in raw and "g" in raw:
            raw["g1"] = raw.pop("g")
        if eps is not None:
            raw["g2"] = raw["g1"] + eps
        return validate_params(raw)

    def describe(self) -> dict:
        return {
            "ranges": {k: list(v) for k, v in self.ranges.items()},
            "fixed": dict(self.fixed),
            "targets": list(self.targets),
            "dw_min": self.dw_min,
            "version": __version__,
        }


def oracle_compare(params, policy: Optional[fock.TruncationPolicy] = None, tolerance: float = 1e-8) -> DiscrepancyReport:
    """Run the Fock simulation and the closed forms at one matched-gain point."""
    p = params if isinstance(params, ExperimentParams) else validate_params(params)
    if not p.matched:
        raise OutOfRange("oracle_compare needs matched gains (g2 == g1); see mismatch_scan")
    rep = fock.run_pipeline(p, policy)
    xx, yy, zz = analytic.correlators(p)
    diffs = {
        "witness": abs(rep.witness - analytic.witness(p)),
        "n_a": abs(rep.n_a - analytic.mean_photon_final(p)),
        "n_clones": abs(rep.n_clones_measured - analytic.clone_number(p).n_clones),
        "corr_xx": abs(rep.corr_xx - xx),
        "corr_yy": abs(rep.corr_yy - yy),
        "corr_zz": abs(rep.corr_zz - zz),
    }
    return DiscrepancyReport(p, diffs, tolerance, rep.n_max, rep.max_tail, rep.trace_drift)


def oracle_grid(
    etas: Iterable[float] = DEFAULT_GRID["eta"],
    gains: Iterable[float] = DEFAULT_GRID["g"],
    tolerance: float = 1e-8,
    policy: Optional[fock.TruncationPolicy] = None,
) -> list:
    """:func:`oracle_compare` over ``etas^3 x gains``; reports in grid order."""
    etas = list(etas)
    points = [
        validate_params({"eta1": e1, "eta2": e2, "eta3": e3, "g1": g})
        for e1, e2, e3 in itertools.product(etas, repeat=3)
        for g in gains
    ]
    return _map_cells(lambda p: oracle_compare(p, policy, tolerance), points)


def _level_name(w: float) -> str:
    return f"n_clones_w{w:g}"


def figure2_sweep(spec: ScanSpec) -> SweepTable:
    """Clone number at each witness level versus intermediate transmission.

    Cells with no solution are ``None``.
    """
    if "eta2" not in spec.ranges:
        raise OutOfRange("figure2_sweep needs an eta2 range")
    eta1 = spec.fixed.get("eta1", 0.8)
    eta3 = spec.fixed.get("eta3", 0.8)
    levels = list(spec.targets)

    def cell(eta2):
        row = [float(eta2)]
        for w in levels:
            try:
                row.append(analytic.clones_at_witness_level(eta1, eta3, eta2, w))
            except (NoSolution, analytic.Divergent):
                row.append(None)
        return tuple(row)

    rows = _map_cells(cell, spec.values("eta2"))
    meta = spec.describe()
    meta.update({"eta1": eta1, "eta3": eta3, "kind": "figure2"})
    return SweepTable(["eta2"] + [_level_name(w) for w in levels], rows, meta)


def mismatch_scan(spec: ScanSpec, policy: Optional[fock.TruncationPolicy] = None) -> SweepTable:
    """Published mismatch formula vs the Fock simulation over a grid of ``epsilon``.

    Metadata holds a quadratic fit ``W_oracle(eps) = c0 + c1 eps + c2 eps^2``
    and the ratio of ``c2`` to the published coefficient ``-eta1 eta2 eta3``.
    """
    if "epsilon" not in spec.ranges:
        raise OutOfRange("mismatch_scan needs an epsilon range")
    base = spec.params(epsilon=0.0)

    def cell(eps):
        p = spec.params(epsilon=float(eps))
        paper = analytic.witness_mismatch(p).value
        try:
            w_oracle = fock.run_pipeline(p, policy).witness
        except fock.TruncationExceeded:
            return (float(eps), paper, None, None)
        return (float(eps), paper, w_oracle, w_oracle - paper)

    rows = _map_cells(cell, spec.values("epsilon"))
    table = SweepTable(["epsilon", "w_paper", "w_oracle", "difference"], rows, spec.describe())

    pts = [(r[0], r[2]) for r in rows if r[2] is not None]
    paper_c2 = -base.eta1 * base.eta2 * base.eta3
    fit = {"paper_quadratic": paper_c2}
    if len(pts) >= 3:
        eps, w = np.array(pts).T
        c2, c1, c0 = np.polyfit(eps, w, 2)
        fit.update(
            {
                "constant": float(c0),
                "linear": float(c1),
                "quadratic": float(c2),
                "quadratic_ratio": float(c2 / paper_c2) if paper_c2 else None,
            }
        )
    table.metadata.update({"kind": "mismatch", "base_params": base.as_dict(), "fit": fit})
    return table


def sensitivity_scan(spec: ScanSpec) -> SweepTable:
    """Smallest detectable change of the intermediate transmission versus gain.

    Columns: gain, clone number N, dW/d eta2, ``dw_min / (dW/d eta2)`` and the
    coherent-state baseline ``1/sqrt(N)``.  Metadata carries log-log slopes
    of both against N.
    """
    if spec.dw_min is None:
        raise OutOfRange("sensitivity_scan needs dw_min > 0")
    if "g1" not in spec.ranges:
        raise OutOfRange("sensitivity_scan needs a g1 range")

    def cell(g):
        p = spec.params(g1=float(g), eta2=spec.fixed.get("eta2", 1.0))
        n = analytic.clone_number(p).n_clones
        dw = analytic.sensitivity(p)
        return (float(g), n, dw, spec.dw_min / dw, 1.0 / math.sqrt(n))

    rows = _map_cells(cell, spec.values("g1"))
    table = SweepTable(["g1", "n_clones", "dw_deta2", "deta2_min", "classical"], rows, spec.describe())
    slopes = {}
    if len(rows) >= 2:
        arr = np.array(rows)
        log_n = np.log(arr[:, 1])
        slopes["quantum"] = float(np.polyfit(log_n, np.log(arr[:, 3]), 1)[0])
        slopes["classical"] = float(np.polyfit(log_n, np.log(arr[:, 4]), 1)[0])
    table.metadata.update({"kind": "sensitivity", "loglog_slope": slopes})
    return table
