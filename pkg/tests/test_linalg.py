from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from conftest import to_sympy
from hypothesis import given
from hypothesis import strategies as st

from exohom.errors import DimensionMismatchError, NotWellDefinedError
from exohom.linalg import (
    LinearSolver,
    SparseMatrix,
    Subquotient,
    Subspace,
    frac_str,
    image_of,
    kernel,
    kernel_on,
    parse_frac,
    rank,
    rref,
    subquotient_induced_map,
)

small = st.fractions(min_value=-3, max_value=3, max_denominator=3)


@st.composite
def matrices(draw, max_rows=6, max_cols=6):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    # bias toward zeros so ranks vary
    cell = st.one_of(st.just(Fraction(0)), st.just(Fraction(0)), small)
    rows = draw(st.lists(st.lists(cell, min_size=c, max_size=c), min_size=r, max_size=r))
    return SparseMatrix.from_dense(rows)


@given(matrices())
def test_rank_matches_sympy(m):
    assert rank(m) == to_sympy(m).rank()


@given(matrices())
def test_kernel_is_kernel_and_complete(m):
    ker = kernel(m)
    for v in ker:
        assert not m.apply(v)
    assert len(ker) + rank(m) == m.ncols


@given(matrices())
def test_rref_is_reduced(m):
    rows, pivots = rref(m.rows())
    assert pivots == sorted(pivots)
    for row, p in zip(rows, pivots):
        assert row[p] == 1
        assert all(p2 == p or p2 not in row for p2 in pivots)


@given(matrices(), matrices())
def test_product_matches_sympy(a, b):
    if a.ncols != b.nrows:
        b = SparseMatrix.from_dense([[Fraction(1)] * b.ncols] * a.ncols)
    assert to_sympy(a @ b) == to_sympy(a) * to_sympy(b)


@given(matrices())
def test_solver_returns_canonical_solutions(m):
    solver = LinearSolver(m)
    x = {j: Fraction(j + 1) for j in range(m.ncols)}
    rhs = m.apply(x)
    sol = solver.solve(rhs)
    assert sol is not None and m.apply(sol) == rhs
    # the canonical solution does not depend on which preimage produced rhs
    for k in kernel(m):
        shifted = {j: x.get(j, 0) + k.get(j, 0) for j in range(m.ncols)}
        assert solver.solve(m.apply(shifted)) == sol


def test_solver_reports_inconsistent_systems():
    m = SparseMatrix.from_dense([[1, 0], [0, 0]])
    assert LinearSolver(m).solve({1: Fraction(1)}) is None


@given(matrices(), matrices())
def test_intersection_dimension(a, b):
    n = a.nrows
    u = image_of(a)
    w = Subspace(n, [{i: c for i, c in r.items() if i < n} for r in b.rows()])
    both = u.intersect(w)
    assert both.dim == u.dim + w.dim - (u + w).dim
    assert all(u.contains(r) and w.contains(r) for r in both.rows)


@given(matrices())
def test_kernel_on_subspace(m):
    space = Subspace(m.ncols, [{0: Fraction(1)}, {j: Fraction(1) for j in range(m.ncols)}])
    k = kernel_on(m, space)
    assert space.contains_space(k)
    for r in k.rows:
        assert not m.apply(r)


def test_subquotient_coords_and_classes():
    z = [{0: Fraction(1)}, {1: Fraction(1)}, {2: Fraction(1)}]
    b = [{0: Fraction(1), 1: Fraction(1)}]
    q = Subquotient(4, z, b)
    assert q.dim == 2
    assert q.is_zero_class({0: Fraction(2), 1: Fraction(2)})
    assert q.coords({0: Fraction(1), 1: Fraction(1)}) == [0, 0]
    with pytest.raises(NotWellDefinedError):
        q.coords({3: Fraction(1)})
    with pytest.raises(NotWellDefinedError):
        Subquotient(3, [{0: Fraction(1)}], [{1: Fraction(1)}])


def test_induced_map_checks_well_definedness():
    src = Subquotient(2, Subspace.full(2), [{0: Fraction(1)}])
    dst = Subquotient(2, Subspace.full(2))
    swap = SparseMatrix.from_dense([[0, 1], [1, 0]])
    assert subquotient_induced_map(swap, src, src.__class__(2, Subspace.full(2), [{1: Fraction(1)}])).shape == (1, 1)
    ident = SparseMatrix.identity(2)
    assert subquotient_induced_map(ident, src, src).to_dense() == [[1]]
    with pytest.raises(NotWellDefinedError):
        subquotient_induced_map(ident, dst, src.__class__(2, [{1: Fraction(1)}]))
    with pytest.raises(DimensionMismatchError):
        subquotient_induced_map(SparseMatrix.identity(3), src, dst)


def test_fraction_text_round_trip():
    for s in ("0", "-3", "7/2", "-1/9"):
        assert frac_str(parse_frac(s)) == s
    assert sympy.Rational(3, 4) == parse_frac("3/4")
