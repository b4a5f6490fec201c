"""Relative entropy, relative mean dimension and Wasserstein geometry on subshifts."""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    ConfigError,
    EmptyFiber,
    InvalidArgument,
    MathematicalFailure,
    NoSeparation,
    RelmdimError,
    ResourceLimit,
    StructureError,
)
from .group import FiniteSubset, FolnerWindow, folner_defect, folner_window  # noqa: F401
from .symbolic import (  # noqa: F401
    Cylinder,
    PeriodicPoint,
    SlidingBlockCode,
    SymbolicSystem,
    apply_factor,
    fiber_points,
    full_shift,
    metric_d,
    metric_dH,
    shift_action,
)
from .transport import EmpiricalMeasure, dirac, kantorovich_dual, pushforward, wasserstein1  # noqa: F401
