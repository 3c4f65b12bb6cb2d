"""Exact experiments with pencils of quadrics over finite fields of odd characteristic.

The package builds pencils, enumerates the maximal linear subspaces in
their base loci by pruned brute force, and checks the finite group
actions and reduction maps that govern those sets.
"""

from __future__ import annotations

from .errors import PencilLabError
from .gf import GF, FieldSpec, Fq, extend_for_sqrts, extend_to_split, get_field
from .linalg import Subspace
from .poly import Poly
from .quadrics import Pencil, PencilClass, PencilTag, QuadraticForm, classify, pencil_poly, self_adjoint_T

__all__ = [
    "FieldSpec",
    "Fq",
    "GF",
    "Pencil",
    "PencilClass",
    "PencilLabError",
    "PencilTag",
    "Poly",
    "QuadraticForm",
    "Subspace",
    "classify",
    "extend_for_sqrts",
    "extend_to_split",
    "get_field",
    "pencil_poly",
    "self_adjoint_T",
]

__version__ = "0.1.0"
