from __future__ import annotations

from fractions import Fraction

import pytest
from conftest import oracle_for, reorder, to_sympy
from oracle import generic_total, perturbed_total, total_subspace

from exohom.errors import SchemaError, StructuralError
from exohom.forms import Form, MultiVector, build_perturbed_d, contraction_operator, wedge_operator
from exohom.graded import Z, Z2, GradedSpace
from exohom.linalg import SparseMatrix, Subspace
from exohom.models import bundled_model
from exohom.ring import RingDescriptor
from exohom.spectral import (
    massey_cross_check,
    massey_differential,
    perturbed_homology_compare,
    spectral_core,
    spectral_sequence,
)
from exohom.subcomplexes import flat_subcomplex, invariant_subcomplex

RING = RingDescriptor((), ("lam",), 2)


def wedge_run(model_name, idx):
    m = bundled_model(model_name)
    omega = Form.monomial(m, idx)
    t = flat_subcomplex(build_perturbed_d(m, [("lam", omega)], ring=RING))
    p = wedge_operator(omega)
    return t, p, spectral_sequence(t, p)


def contraction_run():
    m = bundled_model("torus2")
    x = MultiVector.basis_field(m, 1)
    t = invariant_subcomplex(m, x)
    p = contraction_operator(x)
    return t, p, spectral_sequence(t, p)


def euler(page) -> int:
    if page.grading == Z2:
        even, odd = page.parity_dims()
        return even - odd
    return sum((-1) ** k * dim for k, dim in page.dims.items())


def runs():
    return {
        "heisenberg3_e3": wedge_run("heisenberg3", (3,)),
        "heisenberg5_e5": wedge_run("heisenberg5", (5,)),
        "torus2_dx1": wedge_run("torus2", (1,)),
        "torus2_contract": contraction_run(),
    }


RUNS = runs()


def test_heisenberg3_pages():
    _, _, ss = RUNS["heisenberg3_e3"]
    assert ss.page(1).total == 6
    assert ss.page(2).parity_dims() == (3, 3)
    assert ss.page(3).total == 0
    assert ss.e_infinity.total == 0 and ss.stable_page == 3
    assert sum(ss.page(2).ranks.values()) == 3
    for page in ss.pages:
        assert page.shift % 2 == 1


def test_heisenberg5_higher_differentials_vanish():
    _, _, ss = RUNS["heisenberg5_e5"]
    assert ss.page(1).dims == {0: 0, 1: 0, 2: 5, 3: 9, 4: 5, 5: 1}
    for page in ss.pages[2:]:
        assert page.is_zero_differential()
    assert ss.e_infinity.total == ss.target_total == 0


def test_torus2_contraction_shifts():
    _, _, ss = RUNS["torus2_contract"]
    assert ss.grading == Z
    for page in ss.pages[1:]:
        # d_l : E^k -> E^{k - 2l + 3}
        assert page.shift == -2 * page.page + 3
    assert ss.e_infinity.total == 0


def test_torus2_dx1_totals():
    _, _, ss = RUNS["torus2_dx1"]
    assert [pg.total for pg in ss.pages] == [36, 4, 0]


@pytest.mark.parametrize("name", sorted(RUNS))
def test_euler_characteristic_is_constant(name):
    _, _, ss = RUNS[name]
    assert len({euler(pg) for pg in ss.pages}) == 1


@pytest.mark.parametrize("name", sorted(RUNS))
def test_page_checks(name):
    _, _, ss = RUNS[name]
    assert ss.checks == {"d_squared_zero": True, "page_recursion": True, "stopped_at_generic_total": True}


@pytest.mark.parametrize("name", sorted(RUNS))
def test_massey_cross_check(name):
    _, _, ss = RUNS[name]
    out = massey_cross_check(ss)
    assert out["pass"] and out["checked"] > 0


@pytest.mark.parametrize("name", sorted(RUNS))
def test_perturbed_comparison(name):
    t, p, ss = RUNS[name]
    cmp = perturbed_homology_compare(t, p, ["1", "2", "-3"], ss=ss)
    assert cmp.agrees
    assert cmp.minimum_total == ss.e_infinity.total


@pytest.mark.parametrize("name", ["heisenberg3_e3", "torus2_contract"])
def test_generic_total_against_oracle(name):
    t, p, ss = RUNS[name]
    m = t.model
    om = oracle_for(m)
    d = reorder(m, om, om.d())
    pm = to_sympy(p.matrix)
    kill = to_sympy(next(iter(t.curvature.values())))
    basis = total_subspace(kill) if t.curvature else None
    assert basis.cols == t.dim
    assert generic_total(basis, d, pm) == ss.target_total
    for value in (1, 2, -3):
        assert perturbed_total(basis, d, pm, value) >= ss.e_infinity.total


def test_comparison_sample_rules():
    t, p, ss = RUNS["heisenberg3_e3"]
    with pytest.raises(SchemaError):
        perturbed_homology_compare(t, p, ["1", "2"], ss=ss)
    with pytest.raises(SchemaError):
        perturbed_homology_compare(t, p, ["1", "0", "2"], ss=ss)


def zigzag():
    """x0 -> P x0 = d x1 = z, P x1 = y: a class surviving to E_3 and killed by d_3."""
    x0, x1, z, y = range(4)
    d = SparseMatrix(4, 4, {(z, x1): Fraction(1)})
    p = SparseMatrix(4, 4, {(z, x0): Fraction(1), (y, x1): Fraction(1)})
    pieces = {
        0: Subspace(4, [{x0: Fraction(1)}, {x1: Fraction(1)}]),
        1: Subspace(4, [{z: Fraction(1)}, {y: Fraction(1)}]),
    }
    return GradedSpace(4, Z, pieces), d, p


def test_synthetic_third_differential():
    space, d, p = zigzag()
    ss = spectral_core(space, d, p, 1)
    assert [pg.total for pg in ss.pages] == [4, 2, 2, 0]
    assert ss.page(2).is_zero_differential()
    assert sum(ss.page(3).ranks.values()) == 1
    assert massey_cross_check(ss)["pass"]
    # the chain-built value on the surviving class x0 is [y], i.e. nonzero
    assert any(massey_differential(ss, 3, {0: Fraction(1)}))


def test_core_rejects_non_anticommuting_operators():
    space, d, _ = zigzag()
    # P x1 = z and P z = y: P^2 x1 = y is nonzero
    p = SparseMatrix(4, 4, {(3, 2): Fraction(1), (2, 1): Fraction(1)})
    with pytest.raises(StructuralError):
        spectral_core(space, d, p, 1)
    # P x0 = y alone: d P x1 + P d x1 = P z = 0 holds, but P must map key 0 to key 1 only
    q = SparseMatrix(4, 4, {(0, 2): Fraction(1)})
    with pytest.raises(StructuralError):
        spectral_core(space, d, q, 1)
