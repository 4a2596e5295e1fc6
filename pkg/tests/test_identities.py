from __future__ import annotations

import time

import pytest
from hypothesis import given
from hypothesis import strategies as st

from exohom.errors import ParityViolationError, SchemaError, StructuralError
from exohom.forms import (
    Form,
    FormOperator,
    MultiVector,
    build_perturbed_d,
    contraction_operator,
    evaluate,
    lie_operator,
    operator_square,
    wedge_operator,
)
from exohom.identities import expected_square, identity_suite, square_check
from exohom.models import BUNDLED, bundled_model
from exohom.ring import RingDescriptor

RING = RingDescriptor((), ("lam", "mu"), 2)


def standard_setup(name):
    m = bundled_model(name)
    omega = Form.monomial(m, (m.dim,))
    x = MultiVector.basis_field(m, m.dim)
    return m, omega, x


@pytest.mark.parametrize("name", BUNDLED)
def test_suite_passes_on_every_bundled_model(name):
    m, omega, x = standard_setup(name)
    start = time.perf_counter()
    dp = build_perturbed_d(m, [("lam", omega)], [("mu", x)], ring=RING)
    results = identity_suite(m, {"omega": omega}, {"X": x}, dp)
    elapsed = time.perf_counter() - start
    failed = [r.name for r in results if not r.passed]
    assert not failed
    assert any(r.name.startswith("(d')^2") and r.method == "closed-form" for r in results)
    assert elapsed < 1.0


def test_square_reduces_for_closed_forms_on_a_torus():
    m = bundled_model("torus3")
    omega = Form.monomial(m, (1,))
    x = MultiVector.constant(m, [2, 0, 1])
    dp = build_perturbed_d(m, [("lam", omega)], [("mu", x)], ring=RING)
    lam_mu = dict(operator_square(dp).components)
    want = lie_operator(x).times(dp.terms[1].param) + wedge_operator(evaluate(omega, x)).times(
        dp.terms[0].param * dp.terms[1].param
    )
    assert operator_square(dp) == want
    assert lam_mu


def test_empty_operator_checks_only_d_squared():
    m = bundled_model("heisenberg3")
    results = identity_suite(m)
    names = [r.name for r in results]
    assert "d^2 = 0" in names
    assert not any("(d')" in n for n in names)
    assert all(r.passed for r in results)


def test_odd_parameters_with_even_operators():
    m = bundled_model("heisenberg3")
    ring = RingDescriptor(("tau",), ("lam",), 2)
    omega = Form.monomial(m, (3,))
    big = Form.monomial(m, (1, 2))
    dp = build_perturbed_d(m, [("lam", omega), ("tau", big)], ring=ring)
    assert square_check(dp).passed
    with pytest.raises(ParityViolationError):
        build_perturbed_d(m, [("tau", omega)], ring=ring)
    with pytest.raises(ParityViolationError):
        build_perturbed_d(m, [("lam", big)], ring=ring)


def test_nonzero_wedge_square_is_structural():
    m = bundled_model("abelian3")
    ring = RingDescriptor(("tau",), (), 1)
    # an even form times an odd parameter is odd, but its square need not vanish
    f = Form.monomial(m, (1, 2)) + Form.monomial(m, ())
    with pytest.raises((StructuralError, SchemaError)):
        build_perturbed_d(m, [("tau", f)], ring=ring)


coeff = st.integers(-3, 3)


@given(st.lists(coeff, min_size=3, max_size=3), st.lists(coeff, min_size=3, max_size=3))
def test_square_formula_property(wc, xc):
    m = bundled_model("heisenberg3")
    omega = sum((Form.monomial(m, (i + 1,), coeff=c) for i, c in enumerate(wc)), Form(m))
    x = MultiVector.constant(m, xc)
    wedges = [("lam", omega)] if omega else []
    contracts = [("mu", x)] if x.terms else []
    dp = build_perturbed_d(m, wedges, contracts, ring=RING)
    want, closed = expected_square(dp)
    assert closed
    assert operator_square(dp) == want


@given(st.lists(coeff, min_size=2, max_size=2), st.lists(coeff, min_size=2, max_size=2))
def test_cartan_formula_property(xa, xb):
    m = bundled_model("torus2")
    x = MultiVector.constant(m, xa)
    y = MultiVector.constant(m, xb)
    # constant fields commute, and so do their contractions
    assert (lie_operator(x) @ lie_operator(y)) == (lie_operator(y) @ lie_operator(x))
    c = contraction_operator(x) @ contraction_operator(y) + contraction_operator(y) @ contraction_operator(x)
    assert c == FormOperator.zero(m)
