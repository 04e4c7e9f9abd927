"""Decision procedures for the built-in logics."""

from .intuitionistic import Budget, Prover, intuitionistic_validates
from .kripke import KripkeModel, forces, kripke_countermodel, model_family
from .matrix import (
    BUILTIN_MATRICES,
    CLASSICAL,
    K3,
    L3,
    LP,
    Matrix,
    classical_validates,
    evaluate,
    matrix_validates,
    restrict_matrix,
)

__all__ = [
    "BUILTIN_MATRICES", "Budget", "CLASSICAL", "K3", "KripkeModel", "L3", "LP", "Matrix",
    "Prover", "classical_validates", "evaluate", "forces", "intuitionistic_validates",
    "kripke_countermodel", "matrix_validates", "model_family", "restrict_matrix",
]
