"""Graded subspaces of an ambient Q^n and homology of maps between their pieces.

A grading is either ``"Z"`` (integer keys) or ``"Z2"`` (keys 0 = even,
1 = odd, arithmetic mod 2). Everything stays in ambient coordinates so
pieces built by different modules can be compared directly.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .errors import StructuralError
from .linalg import SparseMatrix, Subquotient, Subspace, image_of, kernel_on

Z = "Z"
Z2 = "Z2"


def parity_name(key: int) -> str:
    return "odd" if key % 2 else "even"


class GradedSpace:
    """A direct sum of subspaces ``pieces[key]`` of Q^n."""

    def __init__(self, n: int, grading: str, pieces: Mapping[int, Subspace]):
        if grading not in (Z, Z2):
            raise ValueError(f"unknown grading {grading!r}")
        self.n = n
        self.grading = grading
        self.pieces = {k: pieces[k] for k in sorted(pieces)}

    def shift(self, key: int, s: int) -> int:
        return (key + s) % 2 if self.grading == Z2 else key + s

    def piece(self, key: int) -> Subspace:
        if self.grading == Z2:
            key %= 2
        return self.pieces.get(key, Subspace(self.n))

    @property
    def keys(self) -> list[int]:
        return list(self.pieces)

    @property
    def dim(self) -> int:
        return sum(p.dim for p in self.pieces.values())

    @property
    def dims(self) -> dict[int, int]:
        return {k: p.dim for k, p in self.pieces.items()}

    def total(self) -> Subspace:
        rows = [r for p in self.pieces.values() for r in p.rows]
        return Subspace(self.n, rows)

    def parity_dims(self) -> tuple[int, int]:
        even = sum(p.dim for k, p in self.pieces.items() if k % 2 == 0)
        return even, self.dim - even

    def to_parity(self) -> "GradedSpace":
        if self.grading == Z2:
            return self
        rows: dict[int, list] = {0: [], 1: []}
        for k, p in self.pieces.items():
            rows[k % 2].extend(p.rows)
        return GradedSpace(self.n, Z2, {k: Subspace(self.n, v) for k, v in rows.items()})

    def check_invariant(self, m: SparseMatrix, label: str) -> None:
        """Raise StructuralError unless ``m`` maps the whole space into itself."""
        whole = self.total()
        for p in self.pieces.values():
            for row in p.rows:
                if not whole.contains(m.apply(row)):
                    raise StructuralError(f"{label} does not preserve the subspace", witness=row)

    def check_annihilates(self, m: SparseMatrix, label: str) -> None:
        for p in self.pieces.values():
            for row in p.rows:
                if m.apply(row):
                    raise StructuralError(f"{label} does not vanish on the subspace", witness=row)


def split_by_degree(n: int, degrees: list[int], space: Subspace, grading: str, keys) -> dict[int, Subspace]:
    """Pieces of a subspace that is known to be spanned by homogeneous vectors."""
    out = {}
    for k in keys:
        cols = {i for i, d in enumerate(degrees) if (d % 2 if grading == Z2 else d) == k}
        out[k] = space.intersect(Subspace(n, [{i: Fraction(1)} for i in sorted(cols)]))
    return out


def homology(space: GradedSpace, d: SparseMatrix, shift: int) -> dict[int, Subquotient]:
    """``ker d / im d`` on each piece, for ``d`` moving key ``k`` to ``k + shift``."""
    out = {}
    for k in space.keys:
        z = kernel_on(d, space.piece(k))
        src = space.shift(k, -shift)
        b = image_of(d, space.piece(src)) if src in space.pieces else Subspace(space.n)
        out[k] = Subquotient(space.n, z, b)
    return out


def homology_total(space: GradedSpace, d: SparseMatrix) -> tuple[int, int]:
    """(even, odd) dims of the Z2-graded homology of an odd ``d`` preserving the space."""
    par = space.to_parity()
    h = homology(par, d, 1)
    return h[0].dim, h[1].dim
