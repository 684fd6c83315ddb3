"""Joint spectra of solvable Lie algebras of matrices via Koszul complexes."""
from .errors import (
    CharacterError,
    ClassificationError,
    ConsistencyError,
    DegenerateBasisError,
    DimensionError,
    FlagError,
    InstanceError,
    LieSpecError,
    NotApplicableError,
    NotClosedError,
    SingularMatrixError,
    ToleranceError,
)
from .instance import Instance, parse_instance
from .koszul import KoszulComplex, boundary, homotopy, split_check
from .liealg import OperatorFamily, classify, jordan_holder_flag, verify_closure
from .numkit import DEFAULT_TOL, Tolerances
from .spectrum import (
    SpectrumResult,
    component_spectrum,
    homology_dims,
    is_in_spectrum,
    joint_spectrum,
    taylor_oracle,
)

__version__ = "0.1.0"

__all__ = [
    "CharacterError",
    "ClassificationError",
    "ConsistencyError",
    "DEFAULT_TOL",
    "DegenerateBasisError",
    "DimensionError",
    "FlagError",
    "Instance",
    "InstanceError",
    "KoszulComplex",
    "LieSpecError",
    "NotApplicableError",
    "NotClosedError",
    "OperatorFamily",
    "SingularMatrixError",
    "SpectrumResult",
    "ToleranceError",
    "Tolerances",
    "boundary",
    "classify",
    "component_spectrum",
    "homology_dims",
    "homotopy",
    "is_in_spectrum",
    "joint_spectrum",
    "jordan_holder_flag",
    "parse_instance",
    "split_check",
    "taylor_oracle",
    "verify_closure",
]
