"""Finite, checkable models of bivariant theories and the universal
oriented theory over a finite category with fiber products."""

from .catcore import (
    Category,
    FiberedCategory,
    Square,
    load_category,
    load_category_file,
    validate_category,
)
from .freeab import FreeAbelianElement
from .targets import FiberwiseTheory, TheoryAdapter, make_adapter
from .universal import BivariantElement, Bounds, Cycle, UniversalTheory

__version__ = "0.1.0"

__all__ = [
    "BivariantElement",
    "Bounds",
    "Category",
    "Cycle",
    "FiberedCategory",
    "FiberwiseTheory",
    "FreeAbelianElement",
    "Square",
    "TheoryAdapter",
    "UniversalTheory",
    "load_category",
    "load_category_file",
    "make_adapter",
    "validate_category",
]
