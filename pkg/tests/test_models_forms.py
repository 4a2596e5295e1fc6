from __future__ import annotations

from fractions import Fraction

import pytest
from conftest import oracle_for, reorder, to_sympy
from hypothesis import given
from hypothesis import strategies as st
from oracle import DenseModel, cohomology_dims

from exohom.errors import ModelValidationError, SchemaError, WindowOverflowError
from exohom.forms import (
    Form,
    MultiVector,
    anticommutator,
    apply_d,
    contract,
    contraction_operator,
    d_operator,
    evaluate,
    lie_derivative,
    lie_operator,
    wedge,
    wedge_operator,
)
from exohom.models import (
    BUNDLED,
    LIE,
    Model,
    build_lie_algebra_model,
    build_torus_model,
    bundled_model,
    full_homology,
    load_model,
    model_from_dict,
)

EXPECTED_BETTI = {
    "abelian3": [1, 3, 3, 1],
    "heisenberg3": [1, 2, 2, 1],
    "heisenberg5": [1, 4, 5, 5, 4, 1],
    "torus1": [1, 1],
    "torus2": [1, 2, 1],
    "torus3": [1, 3, 3, 1],
}


@pytest.mark.parametrize("name", BUNDLED)
def test_bundled_d_matches_oracle(name):
    m = bundled_model(name)
    om = oracle_for(m)
    assert to_sympy(m.d) == reorder(m, om, om.d())
    assert (m.d @ m.d).is_zero()


@pytest.mark.parametrize("name", BUNDLED)
def test_betti_numbers(name):
    m = bundled_model(name)
    assert full_homology(m) == EXPECTED_BETTI[name]
    if m.size <= 64:
        assert cohomology_dims(oracle_for(m)) == EXPECTED_BETTI[name]


def test_model_sizes():
    assert bundled_model("torus3").size == 27 * 8
    assert bundled_model("heisenberg5").size == 32
    assert model_from_dict(bundled_model("torus2").to_dict()) == bundled_model("torus2")


def test_jacobi_violation_is_reported(data_dir):
    with pytest.raises(ModelValidationError) as exc:
        load_model(data_dir / "jacobi_violation.json")
    assert exc.value.witness == {"freq": [0, 0, 0], "idx": [2]}


def test_window_must_contain_zero_mode():
    with pytest.raises(ModelValidationError):
        build_torus_model(1, [[1, 2]])
    with pytest.raises(SchemaError):
        build_torus_model(2, [[-1, 1]])
    with pytest.raises(SchemaError):
        Model(LIE, 2, structure={(1, 2, 1): 1})


def test_window_overflow():
    m = bundled_model("torus2")
    a = Form.monomial(m, (1,), freq=(1, 0))
    b = Form.monomial(m, (2,), freq=(1, 1))
    with pytest.raises(WindowOverflowError) as exc:
        wedge(a, b)
    assert exc.value.frequency == (2, 1)
    with pytest.raises(WindowOverflowError):
        Form.monomial(m, (1,), freq=(0, 2))


@st.composite
def structures(draw, n=3):
    keys = [(t, j, k) for t in range(1, n + 1) for j in range(1, n + 1) for k in range(j + 1, n + 1)]
    chosen = draw(st.dictionaries(st.sampled_from(keys), st.integers(-2, 2).filter(bool), max_size=3))
    return chosen


@given(structures())
def test_jacobi_check_agrees_with_oracle(structure):
    om = DenseModel(3, structure=structure)
    d = om.d()
    nilpotent = (d * d).is_zero_matrix
    if nilpotent:
        m = build_lie_algebra_model(3, structure)
        assert (m.d @ m.d).is_zero()
    else:
        with pytest.raises(ModelValidationError):
            build_lie_algebra_model(3, structure)


def forms(m: Model, degree=None, zero_mode=False):
    freqs = [m.zero_mode] if zero_mode else m.modes
    monos = [(f, idx) for f, idx in m.basis if (degree is None or len(idx) == degree) and f in freqs]
    coeff = st.fractions(min_value=-3, max_value=3, max_denominator=2)
    return st.dictionaries(st.sampled_from(monos), coeff, max_size=4).map(lambda t: Form(m, t))


T2 = bundled_model("torus2")
H3 = bundled_model("heisenberg3")
H5 = bundled_model("heisenberg5")


@pytest.mark.parametrize("m", [T2, H3, H5], ids=["torus2", "heisenberg3", "heisenberg5"])
@given(data=st.data())
def test_leibniz_rule(m, data):
    a = data.draw(forms(m, degree=data.draw(st.integers(0, m.dim)), zero_mode=True))
    b = data.draw(forms(m))
    sign = -1 if a.degree and a.degree % 2 else 1
    assert apply_d(wedge(a, b)) == wedge(apply_d(a), b) + sign * wedge(a, apply_d(b))


@pytest.mark.parametrize("m", [T2, H3], ids=["torus2", "heisenberg3"])
@given(data=st.data())
def test_d_squared_zero_on_forms(m, data):
    f = data.draw(forms(m))
    assert not apply_d(apply_d(f))


@given(st.lists(st.integers(-3, 3), min_size=2, max_size=2), st.data())
def test_contraction_and_lie_match_oracle(components, data):
    x = MultiVector.constant(T2, components)
    om = oracle_for(T2)
    c = om.contraction(components)
    assert to_sympy(contraction_operator(x).matrix) == reorder(T2, om, c)
    d = om.d()
    assert to_sympy(lie_operator(x).matrix) == reorder(T2, om, d * c + c * d)
    f = data.draw(forms(T2))
    assert lie_derivative(x, f) == apply_d(contract(x, f)) + contract(x, apply_d(f))


def test_wedge_operator_matches_oracle():
    om = oracle_for(H5)
    omega = Form.monomial(H5, (5,)) + Form.monomial(H5, (1, 2), coeff=Fraction(1, 2))
    want = om.wedge([(1, (0,) * 5, (5,)), (Fraction(1, 2), (0,) * 5, (1, 2))])
    assert to_sympy(wedge_operator(omega).matrix) == reorder(H5, om, want)


def test_lie_derivative_of_non_constant_field():
    m = bundled_model("torus2")
    x = MultiVector(m, 1, {((1, 0), (2,)): 1})  # chi_(1,0) d/dx2
    f = Form.monomial(m, (1,))
    # L_X dx1 = d(iota_X dx1) + iota_X d dx1 = 0; L_X dx2 = d chi_(1,0) = chi_(1,0) dx1
    assert not lie_derivative(x, f)
    assert lie_derivative(x, Form.monomial(m, (2,))) == Form.monomial(m, (1,), freq=(1, 0))


def test_evaluate_pairs_one_forms_with_fields():
    m = bundled_model("torus3")
    u = Form.monomial(m, (1,), coeff=2) + Form.monomial(m, (3,), coeff=-1)
    x = MultiVector.constant(m, [5, 7, 1])
    assert evaluate(u, x) == Form.vacuum(m).__rmul__(9)


def test_cartan_formula_on_operators():
    x = MultiVector.constant(H3, [0, 0, 1])
    assert lie_operator(x) == anticommutator(d_operator(H3), contraction_operator(x))


def test_form_json_round_trip():
    f = Form.monomial(T2, (1, 2), freq=(1, -1), coeff=Fraction(-2, 3)) + Form.monomial(T2, ())
    assert Form.from_json(T2, f.to_json()) == f
    with pytest.raises(SchemaError):
        Form.from_json(T2, [{"coeff": "1", "idx": [1]}])
