"""
Finite element discretization of the finite-volume forms.
"""

from .assembly import (
    AssembledOperator, Assembler, OperatorFactory, assemble, assemble_decomposed, assembler_for,
    check_decomposable, kronecker_sum, reference_cube, tensor_permutation, to_triplets,
)

__all__ = [
    "AssembledOperator", "Assembler", "OperatorFactory", "assemble", "assemble_decomposed", "assembler_for",
    "check_decomposable", "kronecker_sum", "reference_cube", "tensor_permutation", "to_triplets",
]
