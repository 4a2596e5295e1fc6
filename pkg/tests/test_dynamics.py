from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from exohom.dynamics import d2_evaluation, lemma6_check, rotation_cycle
from exohom.errors import PreconditionError, UnsupportedInputError
from exohom.forms import Form, MultiVector
from exohom.models import bundled_model

T2 = bundled_model("torus2")
T3 = bundled_model("torus3")

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=4)


def constant_form(m, comps):
    return sum((Form.monomial(m, (j + 1,), coeff=c) for j, c in enumerate(comps)), Form(m))


def test_rotation_cycle_is_the_field():
    x = MultiVector.constant(T2, [1, 2])
    assert rotation_cycle(T2, x).to_json() == ["1", "2"]
    assert rotation_cycle(T2, MultiVector(T2, 1)).is_zero


@given(st.lists(rationals, min_size=2, max_size=2), st.lists(rationals, min_size=2, max_size=2), rationals)
def test_rotation_cycle_is_linear(a, b, c):
    xa, xb = MultiVector.constant(T2, a), MultiVector.constant(T2, b)
    lhs = rotation_cycle(T2, xa + c * xb).coords
    assert lhs == [p + c * q for p, q in zip(rotation_cycle(T2, xa).coords, rotation_cycle(T2, xb).coords)]


def test_spec_pairings():
    x = MultiVector.constant(T2, [1, 2])
    assert d2_evaluation(T2, x, constant_form(T2, [1, 3])) == 7
    assert d2_evaluation(T2, MultiVector.basis_field(T2, 2), Form.monomial(T2, (1,))) == 0


@pytest.mark.parametrize("m", [T2, T3], ids=["torus2", "torus3"])
@given(data=st.data())
def test_pairing_law(m, data):
    u = data.draw(st.lists(rationals, min_size=m.dim, max_size=m.dim))
    a = data.draw(st.lists(rationals, min_size=m.dim, max_size=m.dim))
    x = MultiVector.constant(m, a)
    assert d2_evaluation(m, x, constant_form(m, u)) == sum(p * q for p, q in zip(u, a))


def test_zero_cycle_verdicts():
    zero = lemma6_check(T2, MultiVector(T2, 1))
    assert zero.verdict == "pass" and zero.d2_rank == 0
    assert lemma6_check(T2, MultiVector.basis_field(T2, 1)).to_dict() == {
        "rotation_cycle": ["1", "0"],
        "d2_rank": 1,
        "d2_values": ["1", "0"],
        "lemma6": "not-applicable(a≠0)",
    }
    assert lemma6_check(T3, MultiVector.constant(T3, [2, -1, 0])).d2_rank == 1
    assert lemma6_check(T3, MultiVector(T3, 1)).verdict == "pass"


def test_preconditions():
    x = MultiVector.basis_field(T2, 1)
    with pytest.raises(PreconditionError):
        d2_evaluation(T2, x, Form.monomial(T2, (1, 2)))
    with pytest.raises(PreconditionError):
        d2_evaluation(T2, x, Form.monomial(T2, (2,), freq=(1, 0)))  # not closed
    with pytest.raises(PreconditionError):
        # closed but not invariant: d chi_(1,0) = chi_(1,0) dx1 and L_X multiplies by 1
        d2_evaluation(T2, x, Form.monomial(T2, (1,), freq=(1, 0)))
    h3 = bundled_model("heisenberg3")
    with pytest.raises(UnsupportedInputError):
        rotation_cycle(h3, MultiVector.basis_field(h3, 1))
    with pytest.raises(UnsupportedInputError):
        rotation_cycle(T2, MultiVector(T2, 1, {((1, 0), (1,)): Fraction(1)}))
