"""Cartan model ``(invariant forms) (x) Q[a_1..a_m]`` with ``d' = d + sum a_i iota_{X_i}``.

Each ``a_i`` has degree 2 and polynomials are truncated above total degree D.
Truncation is a quotient by an ideal that d' preserves, so d' stays a
differential; only cohomology in total degree <= 2D - 2 is free of
truncation effects and that is all that gets reported.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

from .errors import NotWellDefinedError, SchemaError, StructuralError
from .forms import MultiVector, contraction_operator, lie_operator
from .graded import Z, GradedSpace, homology
from .linalg import SparseMatrix, Subspace, kernel_on, vstack
from .models import Model
from .spectral import SpectralSequence, spectral_core


def _exponents(m: int, cutoff: int) -> list[tuple[int, ...]]:
    exps = [e for e in product(range(cutoff + 1), repeat=m) if sum(e) <= cutoff]
    return sorted(exps, key=lambda e: (sum(e), tuple(-x for x in e)))


@dataclass
class CartanComplex:
    model: Model
    fields: list
    cutoff: int
    invariant: Subspace  # simultaneous kernel of every L_{X_i}
    exponents: list  # polynomial monomials, by degree
    inv_degrees: list  # form degree of each invariant basis vector
    d: SparseMatrix  # d (x) 1
    p: SparseMatrix  # sum a_i iota_{X_i}

    @property
    def size(self) -> int:
        return len(self.exponents) * self.invariant.dim

    def total_degree(self, i: int) -> int:
        q = self.invariant.dim
        return sum(self.exponents[i // q]) * 2 + self.inv_degrees[i % q]

    @property
    def differential(self) -> SparseMatrix:
        return self.d + self.p

    @property
    def safe_through(self) -> int:
        return 2 * self.cutoff - 2

    def space(self) -> GradedSpace:
        degs = [self.total_degree(i) for i in range(self.size)]
        top = max(degs, default=0)
        pieces = {
            k: Subspace(self.size, [{i: Fraction(1)} for i, g in enumerate(degs) if g == k]) for k in range(top + 1)
        }
        return GradedSpace(self.size, Z, pieces)


def _check_commuting(fields: Sequence[MultiVector]) -> list[SparseMatrix]:
    lies = [lie_operator(x).matrix for x in fields]
    for i in range(len(lies)):
        for j in range(i + 1, len(lies)):
            if not (lies[i] @ lies[j] - lies[j] @ lies[i]).is_zero():
                raise StructuralError("fields do not commute", witness=[i, j])
    return lies


def build_cartan(m: Model, fields: Sequence[MultiVector], cutoff: int) -> CartanComplex:
    if isinstance(cutoff, bool) or not isinstance(cutoff, int) or cutoff < 2:
        raise SchemaError("the polynomial cutoff D must be an integer >= 2")
    if not fields:
        raise SchemaError("at least one field is required")
    for x in fields:
        if x.model != m or x.order != 1:
            raise SchemaError("fields must be order-1 multivectors on the model")
    lies = _check_commuting(fields)
    inv_rows = []
    for k in range(m.dim + 1):
        space = m.degree_space(k)
        inv_rows.extend(kernel_on(vstack(lies), space).rows)
    inv = Subspace(m.size, inv_rows)
    degs = [m.degrees[min(r)] for r in inv.rows]
    exps = _exponents(len(fields), cutoff)
    pos = {e: i for i, e in enumerate(exps)}
    q = inv.dim
    ctr = [contraction_operator(x).matrix for x in fields]

    def coords(v: dict) -> list:
        try:
            return inv.coords(v)
        except NotWellDefinedError as exc:
            raise StructuralError("an operator leaves the invariant forms", witness=exc.witness) from None

    d_img = [coords(m.d.apply(r)) for r in inv.rows]
    c_img = [[coords(c.apply(r)) for r in inv.rows] for c in ctr]
    d_ent, p_ent = {}, {}
    for ai, e in enumerate(exps):
        for b in range(q):
            col = ai * q + b
            for b2, c in enumerate(d_img[b]):
                if c:
                    d_ent[(ai * q + b2, col)] = c
            for f in range(len(fields)):
                raised = tuple(x + (1 if g == f else 0) for g, x in enumerate(e))
                if raised not in pos:
                    continue
                row0 = pos[raised] * q
                for b2, c in enumerate(c_img[f][b]):
                    if c:
                        p_ent[(row0 + b2, col)] = p_ent.get((row0 + b2, col), 0) + c
    n = len(exps) * q
    cc = CartanComplex(m, list(fields), cutoff, inv, exps, degs, SparseMatrix(n, n, d_ent), SparseMatrix(n, n, p_ent))
    sq = cc.differential @ cc.differential
    if not sq.is_zero():
        j = min(c for _, c in sq.entries())
        raise StructuralError("(d')^2 does not vanish on the Cartan complex", witness=j)
    return cc


def raw_dims(c: CartanComplex) -> list[int]:
    """Cohomology dims in every total degree, including truncation-affected ones."""
    h = homology(c.space(), c.differential, 1)
    return [g.dim for g in h.values()]


@dataclass
class EquivariantReport:
    cutoff: int
    dims: list

    @property
    def truncation_safe_through(self) -> int:
        return 2 * self.cutoff - 2

    def to_dict(self) -> dict:
        return {"cutoff": self.cutoff, "dims": self.dims, "truncation_safe_through": self.truncation_safe_through}


def equivariant_cohomology(c: CartanComplex) -> EquivariantReport:
    dims = raw_dims(c)
    top = c.safe_through
    dims = (dims + [0] * (top + 1))[: top + 1]
    return EquivariantReport(c.cutoff, dims)


def cartan_spectral_sequence(c: CartanComplex, max_page: int | None = None) -> SpectralSequence:
    """Filtration spectral sequence of ``d + sum a_i iota_i`` on the Cartan complex."""
    return spectral_core(c.space(), c.d, c.p, 1, max_page)


def polynomial_counts(m: int, cutoff: int, top: int) -> list[int]:
    """Number of monomials of total degree k in m degree-2 generators, up to ``top``."""
    out = [0] * (top + 1)
    for e in _exponents(m, cutoff):
        if 2 * sum(e) <= top:
            out[2 * sum(e)] += 1
    return out

