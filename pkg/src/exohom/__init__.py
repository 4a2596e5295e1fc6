"""Exact computations of exotic homology for perturbed de Rham differentials.

Everything runs over the rationals on finite-dimensional models: Lie
algebra (Chevalley-Eilenberg) complexes and window-truncated Fourier models
of tori.
"""

from __future__ import annotations

from .dynamics import d2_evaluation, lemma6_check, rotation_cycle
from .equivariant import build_cartan, cartan_spectral_sequence, equivariant_cohomology
from .errors import ExoHomError
from .forms import (
    Form,
    FormOperator,
    MultiVector,
    anticommutator,
    apply_d,
    build_perturbed_d,
    contract,
    contraction_operator,
    d_operator,
    lie_derivative,
    lie_operator,
    operator_square,
    wedge,
    wedge_operator,
)
from .linalg import SparseMatrix, Subquotient, Subspace, kernel, rank, solve
from .models import Model, build_lie_algebra_model, build_torus_model, bundled_model, full_homology, load_model
from .problem import load_bundled_problem, load_problem
from .ring import GradedRingElement, RingDescriptor
from .spectral import massey_cross_check, massey_differential, perturbed_homology_compare, spectral_sequence
from .subcomplexes import (
    exotic_homology,
    flat_subcomplex,
    invariant_subcomplex,
    lemma1_check,
    omega_subcomplex,
    theorem1_sequence,
)

__version__ = "0.1.0"

__all__ = [
    "ExoHomError",
    "Form",
    "FormOperator",
    "GradedRingElement",
    "Model",
    "MultiVector",
    "RingDescriptor",
    "SparseMatrix",
    "Subquotient",
    "Subspace",
    "anticommutator",
    "apply_d",
    "build_cartan",
    "build_lie_algebra_model",
    "build_perturbed_d",
    "build_torus_model",
    "bundled_model",
    "cartan_spectral_sequence",
    "contract",
    "contraction_operator",
    "d2_evaluation",
    "d_operator",
    "equivariant_cohomology",
    "exotic_homology",
    "flat_subcomplex",
    "full_homology",
    "invariant_subcomplex",
    "kernel",
    "lemma1_check",
    "lemma6_check",
    "lie_derivative",
    "lie_operator",
    "load_bundled_problem",
    "load_model",
    "load_problem",
    "massey_cross_check",
    "massey_differential",
    "omega_subcomplex",
    "operator_square",
    "perturbed_homology_compare",
    "rank",
    "rotation_cycle",
    "solve",
    "spectral_sequence",
    "theorem1_sequence",
    "wedge",
    "wedge_operator",
]
