"""Closed-form Heisenberg-picture results for clone-then-uncloning with loss.

Every function here is a pure function of the transmissions ``eta1``,
``eta2``, ``eta3`` (loss before, between and after the cloners) and the
cloner gain ``g``.  Unless stated otherwise the gains are taken as matched,
i.e. ``params.g1`` is used for both cloners.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (
    CloneStats,
    Divergent,
    DomainError,
    ExperimentParams,
    NoSolution,
    Overflow,
    WitnessReport,
    validate_params,
)

__all__ = [
    "BogoliubovCoeffs",
    "MismatchEstimate",
    "bogoliubov_coeffs",
    "mean_photon_final",
    "correlators",
    "witness",
    "witness_report",
    "clone_number",
    "witness_from_clones",
    "sensitivity",
    "witness_mismatch",
    "entanglement_threshold",
    "clones_at_witness_level",
]


def _as_params(params) -> ExperimentParams:
    if isinstance(params, ExperimentParams):
        return params
    return validate_params(params)


def _sinh2(g: float) -> float:
    try:
        s = math.sinh(g) ** 2
    except OverflowError:
        s = math.inf
    if not math.isfinite(s):
        raise Overflow(f"sinh^2({g}) overflows double precision")
    return s


def _cosh(g: float) -> float:
    try:
        c = math.cosh(g)
    except OverflowError:
        c = math.inf
    if not math.isfinite(c) or not math.isfinite(c * c):
        raise Overflow(f"cosh({g}) overflows double precision")
    return c


@dataclass(frozen=True)
class BogoliubovCoeffs:
    """Amplitudes of the final equatorial mode on the input and vacuum modes.

    ``a' = c_a a + c_loss1 c1 + c_mid_cosh c2 - c_mid_sinh c2^dag + c_loss3 c3``
    """

    c_a: float
    c_loss1: float
    c_mid_cosh: float
    c_mid_sinh: float
    c_loss3: float

    def commutator(self) -> float:
        """``[a', a'^dag]``, which a valid transform keeps equal to 1."""
        return (
            self.c_a**2
            + self.c_loss1**2
            + self.c_mid_cosh**2
            - self.c_mid_sinh**2
            + self.c_loss3**2
        )


def bogoliubov_coeffs(params) -> BogoliubovCoeffs:
    p = _as_params(params)
    mid = math.sqrt((1.0 - p.eta2) * p.eta3)
    sh = math.sqrt(_sinh2(p.g1))
    return BogoliubovCoeffs(
        c_a=math.sqrt(p.eta1 * p.eta2 * p.eta3),
        c_loss1=math.sqrt((1.0 - p.eta1) * p.eta2 * p.eta3),
        c_mid_cosh=mid * _cosh(p.g1),
        c_mid_sinh=mid * sh,
        c_loss3=math.sqrt(1.0 - p.eta3),
    )


def mean_photon_final(params) -> float:
    """Mean photon number in mode A after both cloners and all losses."""
    p = _as_params(params)
    return p.eta1 * p.eta2 * p.eta3 + 2.0 * (1.0 - p.eta2) * p.eta3 * _sinh2(p.g1)


def correlators(params) -> tuple:
    """``(<J_x s_x>, <J_y s_y>, <J_z s_z>)``; independent of the gain."""
    p = _as_params(params)
    c = -p.eta1 * p.eta2 * p.eta3
    return (c, c, c)


def witness(params) -> float:
    """Witness value; positive certifies A-B entanglement.

    Negative values are returned as-is: they mean "not proven", not separable.
    """
    p = _as_params(params)
    return 2.0 * (p.eta1 * p.eta2 - (1.0 - p.eta2) * _sinh2(p.g1)) * p.eta3


def witness_report(params) -> WitnessReport:
    xx, yy, zz = correlators(params)
    return WitnessReport.from_parts(xx, yy, zz, mean_photon_final(params))


def clone_number(params) -> CloneStats:
    """Mean photon number between the cloners (uses ``eta1`` and ``g1`` only)."""
    p = _as_params(params)
    return CloneStats(2.0 * (1.0 + p.eta1) * _sinh2(p.g1) + p.eta1)


def witness_from_clones(eta1: float, eta2: float, eta3: float, n_clones: float) -> float:
    """Witness expressed through the intermediate clone number."""
    n_clones = float(n_clones)
    if n_clones < eta1:
        raise DomainError(f"n_clones={n_clones} < eta1={eta1} is not reachable by any gain")
    head = eta1 * (1.0 + eta2 + 2.0 * eta1 * eta2) * eta3
    return (head - (1.0 - eta2) * eta3 * n_clones) / (1.0 + eta1)


def sensitivity(params) -> float:
    """dW/d eta2, written through the clone number."""
    p = _as_params(params)
    n_c = clone_number(p).n_clones
    return p.eta3 / (1.0 + p.eta1) * n_c + p.eta1 * p.eta3 * (1.0 + 2.0 * p.eta1) / (1.0 + p.eta1)


@dataclass(frozen=True)
class MismatchEstimate:
    """Witness under a gain mismatch, as given by the published leading-order formula.

    ``paper_claim`` stays True: the value is not derived here and should be
    checked against the Fock-space simulation (see ``experiment.mismatch_scan``).
    """

    value: float
    epsilon: float
    paper_claim: bool = True

    def __float__(self):
        return self.value


def witness_mismatch(params) -> MismatchEstimate:
    p = _as_params(params)
    eps = p.epsilon
    w = witness(p)
    return MismatchEstimate(w - p.eta1 * p.eta2 * p.eta3 * eps * eps, eps)


def entanglement_threshold(eta1: float, g: float) -> float:
    """Smallest intermediate transmission for which the witness stays positive.

    ``witness > 0`` iff ``eta2 > threshold``; ``eta3`` drops out.
    """
    if not 0.0 <= eta1 <= 1.0:
        raise DomainError(f"eta1={eta1} outside [0, 1]")
    if g < 0:
        raise DomainError(f"gain {g} < 0")
    s = _sinh2(g)
    if eta1 + s == 0.0:
        raise DomainError("threshold undefined for eta1 = 0 and g = 0")
    return s / (eta1 + s)


def clones_at_witness_level(eta1: float, eta3: float, eta2: float, w_target: float) -> float:
    """Clone number at which the witness equals ``w_target`` (Figure-2 curves)."""
    if eta2 >= 1.0:
        raise Divergent("eta2 = 1: the witness does not depend on the clone number")
    denom = (1.0 - eta2) * eta3
    if denom == 0.0:
        raise Divergent("eta3 = 0: the witness is identically zero")
    n_c = (eta1 * (1.0 + eta2 + 2.0 * eta1 * eta2) * eta3 - (1.0 + eta1) * w_target) / denom
    if n_c < eta1:
        raise NoSolution(
            f"witness level {w_target} is not reached for any clone number >= eta1 "
            f"(eta1={eta1}, eta2={eta2}, eta3={eta3})"
        )
    return n_c
