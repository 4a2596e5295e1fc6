"""Rotation cycles of linear flows and the special differential ``H^1_inv -> H^0_inv``."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import PreconditionError, SchemaError, UnsupportedInputError
from .forms import Form, MultiVector, apply_d, contract, lie_derivative
from .graded import Z
from .linalg import SparseMatrix, frac_str, rank
from .models import TORUS, Model
from .subcomplexes import exotic_homology, invariant_subcomplex


@dataclass
class RotationCycle:
    coords: list  # in the basis [dx^1], .., [dx^n] of H_1

    @property
    def is_zero(self) -> bool:
        return not any(self.coords)

    def to_json(self) -> list[str]:
        return [frac_str(c) for c in self.coords]


def rotation_cycle(m: Model, x: MultiVector) -> RotationCycle:
    """Asymptotic cycle of the linear flow of a constant field on a torus.

    The trajectory average of ``x(t) = x(0) + t X`` is exactly X, so the
    cycle is the component vector of the field.
    """
    if m.kind != TORUS:
        raise UnsupportedInputError("rotation cycles are computed for torus models only")
    if x.model != m:
        raise SchemaError("field belongs to a different model")
    if x.order != 1 or not x.is_constant:
        raise UnsupportedInputError("rotation cycles are computed for constant order-1 fields only")
    coords = [Fraction(0)] * m.dim
    for (_, (j,)), c in x.terms.items():
        coords[j - 1] += c
    return RotationCycle(coords)


def d2_evaluation(m: Model, x: MultiVector, u: Form) -> Fraction:
    """Class of ``iota_X u`` in ``H^0`` of the invariant complex (one constant, for tori)."""
    if u.model != m or x.model != m:
        raise SchemaError("form and field must live on the given model")
    if u and u.degree != 1:
        raise PreconditionError("u must be a 1-form")
    if apply_d(u):
        raise PreconditionError("u is not closed")
    if lie_derivative(x, u):
        raise PreconditionError("u is not invariant under the flow of X")
    value = contract(x, u)
    h0 = _h0_inv(m, x)
    coords = h0.coords(value.to_vector())
    if len(coords) != 1:
        raise UnsupportedInputError("H^0 of the invariant complex is not one-dimensional")
    return coords[0]


def _h0_inv(m: Model, x: MultiVector):
    return exotic_homology(invariant_subcomplex(m, x)).groups[0]


@dataclass
class Lemma6Verdict:
    cycle: RotationCycle
    d2_matrix: SparseMatrix
    d2_rank: int
    verdict: str

    def to_dict(self) -> dict:
        return {
            "rotation_cycle": self.cycle.to_json(),
            "d2_rank": self.d2_rank,
            "d2_values": [frac_str(self.d2_matrix.column(j).get(0, 0)) for j in range(self.d2_matrix.ncols)],
            "lemma6": self.verdict,
        }


def lemma6_check(m: Model, x: MultiVector) -> Lemma6Verdict:
    """Evaluate d_2 on a basis of H^1_inv; when the cycle vanishes d_2 must vanish."""
    cycle = rotation_cycle(m, x)
    h = exotic_homology(invariant_subcomplex(m, x))
    assert h.grading == Z
    h0 = h.groups[0]
    values = []
    for rep in h.groups[1].reps:
        u = Form.from_vector(m, rep)
        values.append(h0.coords(contract(x, u).to_vector()))
    mat = SparseMatrix.from_columns(h0.dim, [{i: c for i, c in enumerate(v) if c} for v in values])
    r = rank(mat)
    if cycle.is_zero:
        verdict = "pass" if r == 0 else "fail"
    else:
        verdict = "not-applicable(a≠0)"
    return Lemma6Verdict(cycle, mat, r, verdict)
