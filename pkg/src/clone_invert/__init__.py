"""Clone a photon, invert the cloning, and check what entanglement survives.

``analytic`` holds the closed forms, ``fock`` an independent truncated
Fock-space simulation, ``experiment`` the comparison and science scans and
``cli`` the command-line front end.
"""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    CloneInvertError,
    CloneStats,
    Divergent,
    DomainError,
    ExperimentParams,
    MissingField,
    NoSolution,
    OutOfRange,
    Overflow,
    SweepTable,
    TruncationExceeded,
    WitnessReport,
    validate_params,
)

__all__ = [
    "__version__",
    "CloneInvertError",
    "CloneStats",
    "Divergent",
    "DomainError",
    "ExperimentParams",
    "MissingField",
    "NoSolution",
    "OutOfRange",
    "Overflow",
    "SweepTable",
    "TruncationExceeded",
    "WitnessReport",
    "validate_params",
]
