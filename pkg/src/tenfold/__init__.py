"""Tenfold-way classification of Fermi projection families in d = 0, 1.

Validates symmetry class membership, computes the class's topological
index, and constructs explicit in-class homotopies between same-index
families, backed by structured matrix factorizations.
"""

from .linalg import Tolerance, pfaffian
from .symmetry import (
    CLASSES,
    CartanClass,
    ProjectionFamily,
    SymmetryOps,
    get_class,
    validate_class,
)
from .indices import ClassIndex, index, semi_winding, winding
from .homotopy import (
    FillFailedError,
    Homotopy,
    NotConnectedError,
    WindingObstructionError,
    connect,
    connect0,
    verify_homotopy,
)
from .models import ModelSpec, generate, random_in_class, random_pair_in_class

__version__ = "0.1.0"

__all__ = [
    "CLASSES",
    "CartanClass",
    "ClassIndex",
    "FillFailedError",
    "Homotopy",
    "ModelSpec",
    "NotConnectedError",
    "ProjectionFamily",
    "SymmetryOps",
    "Tolerance",
    "WindingObstructionError",
    "connect",
    "connect0",
    "generate",
    "get_class",
    "index",
    "pfaffian",
    "random_in_class",
    "random_pair_in_class",
    "semi_winding",
    "validate_class",
    "verify_homotopy",
    "winding",
    "__version__",
]
