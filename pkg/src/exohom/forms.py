"""Differential forms and metric-free operators on a model.

Forms are sparse maps from basis monomials ``(freq, idx)`` to coefficients.
A coefficient is a ``Fraction`` or a ``GradedRingElement``; ring-valued
forms live in ``R (x) Lambda`` with the Koszul sign rule, so an operator of
parity ``p`` acting on ``r (x) m`` picks up ``(-1)^(p |r|)``.

In fermionic language ``dx^i`` is the creation operator ``a^i`` applied to
the vacuum (the constant function 1) and contraction with ``d/dx^j`` is the
annihilation operator ``a^+_j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import (
    ParityViolationError,
    SchemaError,
    StructuralError,
    UnsupportedCoefficientError,
    UnsupportedInputError,
)
from .linalg import SparseMatrix, frac_str, parse_frac, to_fraction
from .models import LIE, Model, merge_indices
from .ring import GradedRingElement, RingDescriptor, coefficient_parity, monomial_parity

TRIVIAL_RING = RingDescriptor((), (), 0)


def _clean(terms: Mapping) -> dict:
    return {m: c for m, c in terms.items() if c}


def _acc(out: dict, key, c) -> None:
    s = out.get(key, 0) + c
    if s:
        out[key] = s
    else:
        out.pop(key, None)


def _coerce_coeff(c):
    if isinstance(c, GradedRingElement):
        return c
    return to_fraction(c)


def _check_idx(model: Model, idx) -> tuple[int, ...]:
    idx = tuple(idx)
    if any(not isinstance(i, int) or isinstance(i, bool) for i in idx):
        raise SchemaError(f"indices must be integers: {list(idx)}")
    if list(idx) != sorted(set(idx)) or any(not 1 <= i <= model.dim for i in idx):
        raise SchemaError(f"indices {list(idx)} must be strictly increasing within 1..{model.dim}")
    return idx


class Form:
    """A differential form on a model."""

    __slots__ = ("model", "terms")

    def __init__(self, model: Model, terms: Mapping | None = None):
        self.model = model
        clean = {}
        for (freq, idx), c in (terms or {}).items():
            freq = model.check_window(freq)
            idx = _check_idx(model, idx)
            c = _coerce_coeff(c)
            if c:
                _acc(clean, (freq, idx), c)
        self.terms = clean

    @classmethod
    def monomial(cls, model: Model, idx=(), freq=None, coeff=1) -> "Form":
        freq = model.zero_mode if freq is None else tuple(freq)
        return cls(model, {(freq, tuple(idx)): coeff})

    @classmethod
    def vacuum(cls, model: Model) -> "Form":
        return cls.monomial(model, ())

    @classmethod
    def from_vector(cls, model: Model, v: Mapping[int, Fraction]) -> "Form":
        return cls(model, {model.basis[i]: c for i, c in v.items()})

    def to_vector(self) -> dict[int, Fraction]:
        out = {}
        for m, c in self.terms.items():
            if isinstance(c, GradedRingElement):
                raise UnsupportedCoefficientError("ring-valued forms have no rational coordinate vector")
            out[self.model.index[m]] = c
        return out

    @property
    def degrees(self) -> set[int]:
        return {len(idx) for _, idx in self.terms}

    @property
    def degree(self) -> int | None:
        ds = self.degrees
        if len(ds) > 1:
            return None
        return ds.pop() if ds else None

    @property
    def is_rational(self) -> bool:
        return not any(isinstance(c, GradedRingElement) for c in self.terms.values())

    def _same(self, other: "Form") -> None:
        if not isinstance(other, Form) or other.model != self.model:
            raise SchemaError("forms live on different models")

    def __add__(self, other: "Form") -> "Form":
        self._same(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            _acc(out, m, c)
        return Form(self.model, out)

    def __neg__(self) -> "Form":
        return Form(self.model, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def __rmul__(self, c) -> "Form":
        # left multiplication by a scalar or ring element; no sign since c is leftmost
        c = _coerce_coeff(c)
        return Form(self.model, {m: c * v for m, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, Form):
            return NotImplemented
        return self.model == other.model and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def to_json(self) -> list[dict]:
        out = []
        for (freq, idx), c in sorted(self.terms.items(), key=lambda t: (len(t[0][1]), t[0][1], t[0][0])):
            if isinstance(c, GradedRingElement):
                raise UnsupportedCoefficientError("only rational forms serialize as literals")
            out.append({"coeff": frac_str(c), "freq": list(freq), "idx": list(idx)})
        return out

    @classmethod
    def from_json(cls, model: Model, obj) -> "Form":
        return cls(model, _parse_literal(model, obj))

    def __repr__(self) -> str:
        if not self.terms:
            return "Form(0)"
        parts = []
        for (freq, idx), c in sorted(self.terms.items()):
            mono = "^".join(f"dx{i}" for i in idx) or "1"
            if any(freq):
                mono = f"chi{list(freq)}*{mono}"
            parts.append(f"{c}*{mono}")
        return "Form(" + " + ".join(parts) + ")"


def _parse_literal(model: Model, obj) -> dict:
    if not isinstance(obj, list):
        raise SchemaError("form literal must be a list of terms")
    terms: dict = {}
    for item in obj:
        if not isinstance(item, dict) or set(item) != {"coeff", "freq", "idx"}:
            raise SchemaError(f"form term needs exactly coeff, freq, idx: {item!r}")
        if not isinstance(item["freq"], list) or not isinstance(item["idx"], list):
            raise SchemaError(f"freq and idx must be lists: {item!r}")
        freq = model.check_window(item["freq"])
        idx = _check_idx(model, item["idx"])
        _acc(terms, (freq, idx), parse_frac(item["coeff"]))
    return terms


class MultiVector:
    """A skew-symmetric contravariant tensor field of fixed order ``k``."""

    __slots__ = ("model", "order", "terms")

    def __init__(self, model: Model, order: int, terms: Mapping | None = None):
        if order < 1:
            raise SchemaError("multivector order must be at least 1")
        self.model = model
        self.order = order
        clean = {}
        for (freq, idx), c in (terms or {}).items():
            freq = model.check_window(freq)
            idx = _check_idx(model, idx)
            if len(idx) != order:
                raise SchemaError(f"multivector term {list(idx)} does not have order {order}")
            c = to_fraction(c)
            if c:
                _acc(clean, (freq, idx), c)
        self.terms = clean

    @classmethod
    def constant(cls, model: Model, components: Sequence) -> "MultiVector":
        """Order-1 constant field ``sum_j X^j d/dx^j`` from its component list."""
        if len(components) != model.dim:
            raise SchemaError("component count must equal the model dimension")
        zero = model.zero_mode
        return cls(model, 1, {(zero, (j + 1,)): c for j, c in enumerate(components)})

    @classmethod
    def basis_field(cls, model: Model, j: int) -> "MultiVector":
        return cls(model, 1, {(model.zero_mode, (j,)): 1})

    @property
    def is_constant(self) -> bool:
        return all(not any(freq) for freq, _ in self.terms)

    def __add__(self, other: "MultiVector") -> "MultiVector":
        if other.model != self.model or other.order != self.order:
            raise SchemaError("incompatible multivectors")
        out = dict(self.terms)
        for m, c in other.terms.items():
            _acc(out, m, c)
        return MultiVector(self.model, self.order, out)

    def __rmul__(self, c) -> "MultiVector":
        c = to_fraction(c)
        return MultiVector(self.model, self.order, {m: c * v for m, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiVector):
            return NotImplemented
        return self.model == other.model and self.order == other.order and self.terms == other.terms

    def to_json(self) -> list[dict]:
        return [
            {"coeff": frac_str(c), "freq": list(freq), "idx": list(idx)}
            for (freq, idx), c in sorted(self.terms.items(), key=lambda t: (t[0][1], t[0][0]))
        ]

    @classmethod
    def from_json(cls, model: Model, obj, order: int | None = None) -> "MultiVector":
        terms = _parse_literal(model, obj)
        orders = {len(idx) for _, idx in terms}
        if len(orders) > 1:
            raise SchemaError("multivector terms have mixed orders")
        if order is None:
            order = orders.pop() if orders else 1
        return cls(model, order, terms)

    def __repr__(self) -> str:
        return f"MultiVector(order={self.order}, {len(self.terms)} terms)"


# -- pointwise operations ------------------------------------------------------


def _add_freq(model: Model, a, b) -> tuple[int, ...]:
    return model.check_window(tuple(x + y for x, y in zip(a, b)))


def _annihilate(j: int, idx: tuple) -> tuple[int, tuple] | None:
    """``a^+_j`` on ``a^{i_1}..a^{i_k} Phi_0``: anticommute through to ``a^j``."""
    if j not in idx:
        return None
    p = idx.index(j)
    return (-1 if p % 2 else 1), idx[:p] + idx[p + 1:]


def apply_d(f: Form) -> Form:
    """Exterior derivative; an odd operator, so ring coefficients pick up ``(-1)^|r|``."""
    out: dict = {}
    for (freq, idx), c in f.terms.items():
        sign = -1 if coefficient_parity(c) else 1
        for m, v in f.model.differential_of(freq, idx).items():
            _acc(out, m, sign * v * c)
    return Form(f.model, out)


def wedge(a: Form, b: Form) -> Form:
    a._same(b)
    model = a.model
    out: dict = {}
    for (fa, ia), ca in a.terms.items():
        for (fb, ib), cb in b.terms.items():
            merged = merge_indices(ia, ib)
            if merged is None:
                continue
            sign, idx = merged
            if len(ia) % 2 and coefficient_parity(cb):
                sign = -sign
            _acc(out, (_add_freq(model, fa, fb), idx), sign * (ca * cb))
    return Form(model, out)


def contract(x: MultiVector, f: Form) -> Form:
    """Apply ``X^{j_1..j_k} a^+_{j_1} ... a^+_{j_k}`` (rightmost annihilator acts first)."""
    if x.model != f.model:
        raise SchemaError("multivector and form live on different models")
    model = f.model
    out: dict = {}
    for (fx, jdx), cx in x.terms.items():
        for (ff, idx), c in f.terms.items():
            if len(idx) < len(jdx):
                continue
            sign = -1 if (x.order % 2 and coefficient_parity(c)) else 1
            cur = idx
            for j in reversed(jdx):
                step = _annihilate(j, cur)
                if step is None:
                    break
                sign *= step[0]
                cur = step[1]
            else:
                _acc(out, (_add_freq(model, fx, ff), cur), sign * cx * c)
    return Form(model, out)


def lie_derivative(x: MultiVector, f: Form) -> Form:
    """Lie derivative along an order-1 field, from the coordinate formula.

    On tori ``L_X(g dx^I) = X(g) dx^I + g sum_p dx^{i_1}..d(X^{i_p})..dx^{i_k}``;
    on Lie algebras ``L_X e^i = iota_X d e^i`` extended as an even derivation.
    Agreement with ``d iota_X + iota_X d`` is checked by the identity suite.
    """
    if x.order != 1:
        raise UnsupportedInputError("Lie derivative is defined here for order-1 fields only")
    if x.model != f.model:
        raise SchemaError("field and form live on different models")
    model = f.model
    out: dict = {}
    if model.kind == LIE:
        # L_X e^i = sum c^i_{jk} (X^j e^k - X^k e^j)
        xs = {idx[0]: c for (_, idx), c in x.terms.items()}
        lie_gen: dict[int, dict] = {}
        for (t, j, k), c in model.structure.items():
            g = lie_gen.setdefault(t, {})
            if xs.get(j):
                _acc(g, (k,), c * xs[j])
            if xs.get(k):
                _acc(g, (j,), -c * xs[k])
        for (freq, idx), cf in f.terms.items():
            for p, i in enumerate(idx):
                for (l,), v in lie_gen.get(i, {}).items():
                    new = _replace(idx, p, l)
                    if new is not None:
                        _acc(out, (freq, new[1]), new[0] * v * cf)
        return Form(model, out)
    for (fx, (j,)), cx in x.terms.items():
        for (ff, idx), cf in f.terms.items():
            kj = ff[j - 1]
            if kj:
                _acc(out, (_add_freq(model, fx, ff), idx), cx * kj * cf)
            # d(X^j) = sum_l (fx)_l X^j chi_fx dx^l replaces dx^j wherever it occurs
            if j in idx:
                p = idx.index(j)
                for l in range(1, model.dim + 1):
                    ml = fx[l - 1]
                    if not ml:
                        continue
                    new = _replace(idx, p, l)
                    if new is not None:
                        _acc(out, (_add_freq(model, fx, ff), new[1]), new[0] * cx * ml * cf)
    return Form(model, out)


def _replace(idx: tuple, p: int, l: int) -> tuple[int, tuple] | None:
    left = merge_indices(idx[:p], (l,))
    if left is None:
        return None
    right = merge_indices(left[1], idx[p + 1:])
    if right is None:
        return None
    return left[0] * right[0], right[1]


def evaluate(f: Form, x: MultiVector) -> Form:
    """Value of a 1-form on a vector field, as a function (0-form)."""
    if f.degree not in (1, None) or x.order != 1:
        raise UnsupportedInputError("evaluation pairs a 1-form with an order-1 field")
    return contract(x, f)


# -- operators -----------------------------------------------------------------


def _matrix_from_map(model: Model, fn) -> SparseMatrix:
    entries = {}
    for j, mono in enumerate(model.basis):
        image = fn(Form(model, {mono: 1}))
        for m, c in image.terms.items():
            entries[(model.index[m], j)] = c
    return SparseMatrix(model.size, model.size, entries)


def matrix_shifts(model: Model, m: SparseMatrix) -> set[int]:
    degs = model.degrees
    return {degs[i] - degs[j] for (i, j) in m.entries()}


class FormOperator:
    """Linear operator on (ring-valued) forms, ``sum_rho rho * A_rho``.

    ``components`` maps ring monomials to rational matrices on the model's
    full form space. Composition follows
    ``(rho A)(sigma B) = (-1)^{|A||sigma|} (rho sigma)(A B)``.
    """

    def __init__(self, model: Model, components: Mapping, ring: RingDescriptor | None = None, terms=()):
        self.model = model
        self.ring = ring or TRIVIAL_RING
        self.components = {m: a for m, a in components.items() if not a.is_zero()}
        for a in self.components.values():
            if a.shape != (model.size, model.size):
                raise SchemaError("operator block does not match the model's form space")
        self.terms = tuple(terms)
        self._parities: dict = {}

    @classmethod
    def from_matrix(cls, model: Model, m: SparseMatrix) -> "FormOperator":
        return cls(model, {TRIVIAL_RING.unit: m})

    @classmethod
    def zero(cls, model: Model, ring: RingDescriptor | None = None) -> "FormOperator":
        return cls(model, {}, ring)

    @classmethod
    def identity(cls, model: Model) -> "FormOperator":
        return cls.from_matrix(model, SparseMatrix.identity(model.size))

    # -- structure --

    def matrix_parity(self, mono) -> int:
        if mono not in self._parities:
            ps = {s % 2 for s in matrix_shifts(self.model, self.components[mono])}
            if len(ps) > 1:
                raise StructuralError("operator component mixes form parities")
            self._parities[mono] = ps.pop() if ps else 0
        return self._parities[mono]

    @property
    def parity(self) -> int | None:
        ps = {(monomial_parity(m) + self.matrix_parity(m)) % 2 for m in self.components}
        if len(ps) != 1:
            return None
        return ps.pop()

    @property
    def shift(self) -> int | None:
        """Common degree shift of all components, if there is one."""
        shifts = set()
        for a in self.components.values():
            shifts |= matrix_shifts(self.model, a)
        return shifts.pop() if len(shifts) == 1 else None

    @property
    def is_rational(self) -> bool:
        return all(m == self.ring.unit for m in self.components)

    @property
    def matrix(self) -> SparseMatrix:
        if not self.is_rational:
            raise UnsupportedCoefficientError("operator has symbolic ring components")
        return self.components.get(self.ring.unit, SparseMatrix.zeros(self.model.size, self.model.size))

    def is_zero(self) -> bool:
        return not self.components

    # -- algebra --

    def _align(self, other: "FormOperator") -> tuple[RingDescriptor, dict, dict]:
        if other.model != self.model:
            raise SchemaError("operators act on different models")
        if self.ring == other.ring:
            return self.ring, self.components, other.components
        if self.ring == TRIVIAL_RING:
            return other.ring, _promote(self.components, other.ring), other.components
        if other.ring == TRIVIAL_RING:
            return self.ring, self.components, _promote(other.components, self.ring)
        raise UnsupportedCoefficientError("operators over different coefficient rings")

    def __add__(self, other: "FormOperator") -> "FormOperator":
        ring, a, b = self._align(other)
        out = dict(a)
        for m, mat in b.items():
            out[m] = out[m] + mat if m in out else mat
        return FormOperator(self.model, out, ring)

    def __neg__(self) -> "FormOperator":
        return FormOperator(self.model, {m: -a for m, a in self.components.items()}, self.ring)

    def __sub__(self, other: "FormOperator") -> "FormOperator":
        return self + (-other)

    def times(self, c) -> "FormOperator":
        """Left multiplication by a scalar or ring element."""
        if isinstance(c, GradedRingElement):
            ring = c.ring
            comps = self.components if self.ring == ring else _promote(self.components, ring)
            if self.ring not in (ring, TRIVIAL_RING):
                raise UnsupportedCoefficientError("ring mismatch")
            out: dict = {}
            for cm, cv in c.terms.items():
                for m, a in comps.items():
                    prod = ring.mul(cm, m)
                    if prod is None:
                        continue
                    sign, mono = prod
                    term = a.scaled(sign * cv)
                    out[mono] = out[mono] + term if mono in out else term
            return FormOperator(self.model, out, ring)
        c = to_fraction(c)
        return FormOperator(self.model, {m: a.scaled(c) for m, a in self.components.items()}, self.ring)

    def __matmul__(self, other: "FormOperator") -> "FormOperator":
        ring, a, b = self._align(other)
        left = FormOperator(self.model, a, ring)
        out: dict = {}
        for ma, A in a.items():
            pa = left.matrix_parity(ma)
            for mb, B in b.items():
                prod = ring.mul(ma, mb)
                if prod is None:
                    continue
                sign, mono = prod
                if pa and monomial_parity(mb):
                    sign = -sign
                term = (A @ B).scaled(sign)
                out[mono] = out[mono] + term if mono in out else term
        return FormOperator(self.model, out, ring)

    def apply(self, f: Form) -> Form:
        if f.model != self.model:
            raise SchemaError("form and operator live on different models")
        op = self
        if self.ring == TRIVIAL_RING:
            rings = {c.ring for c in f.terms.values() if isinstance(c, GradedRingElement)}
            if len(rings) == 1:
                ring = rings.pop()
                op = FormOperator(self.model, _promote(self.components, ring), ring)
        return op._apply(f)

    def _apply(self, f: Form) -> Form:
        out: dict = {}
        for layer_mono, layer in _layers(f, self.ring).items():
            v = {self.model.index[m]: c for m, c in layer.items()}
            for mono, A in self.components.items():
                prod = self.ring.mul(mono, layer_mono)
                if prod is None:
                    continue
                sign, rmono = prod
                if self.matrix_parity(mono) and monomial_parity(layer_mono):
                    sign = -sign
                for i, c in A.apply(v).items():
                    coeff = c * sign
                    if self.ring != TRIVIAL_RING:
                        coeff = GradedRingElement(self.ring, {rmono: coeff})
                    _acc(out, self.model.basis[i], coeff)
        return Form(self.model, out)

    def substitute(self, assignment: Mapping[str, Fraction]) -> "FormOperator":
        """Evaluate symbolic generators at rational values, giving a rational operator.

        Odd generators only admit the value 0; unassigned generators are an error.
        """
        values = {}
        for name in self.ring.odd + self.ring.even:
            if name not in assignment:
                raise SchemaError(f"no value assigned to generator {name!r}")
            v = to_fraction(assignment[name])
            if name in self.ring.odd and v != 0:
                raise ParityViolationError(f"odd generator {name!r} cannot take the nonzero value {v}")
            values[name] = v
        total = SparseMatrix.zeros(self.model.size, self.model.size)
        for (odd, exps), A in self.components.items():
            if odd:
                continue
            w = Fraction(1)
            for name, k in zip(self.ring.even, exps):
                w *= values[name] ** k
            if w:
                total = total + A.scaled(w)
        return FormOperator.from_matrix(self.model, total)

    def component_names(self) -> dict[str, SparseMatrix]:
        return {self.ring.name_of(m): a for m, a in sorted(self.components.items())}

    def __eq__(self, other) -> bool:
        if not isinstance(other, FormOperator):
            return NotImplemented
        try:
            _, a, b = self._align(other)
        except UnsupportedCoefficientError:
            return False
        return a == b

    def __repr__(self) -> str:
        return f"FormOperator({', '.join(self.component_names())} on {self.model!r})"


def _promote(components: Mapping, ring: RingDescriptor) -> dict:
    out = {}
    for m, a in components.items():
        if m != TRIVIAL_RING.unit:
            raise UnsupportedCoefficientError("cannot promote a symbolic operator to another ring")
        out[ring.unit] = a
    return out


def _layers(f: Form, ring: RingDescriptor) -> dict:
    """Split a form into rational layers indexed by ring monomials."""
    out: dict = {}
    for m, c in f.terms.items():
        if isinstance(c, GradedRingElement):
            if c.ring != ring:
                raise UnsupportedCoefficientError("form coefficients live in a different ring")
            for rm, rc in c.terms.items():
                out.setdefault(rm, {})[m] = rc
        else:
            out.setdefault(ring.unit, {})[m] = c
    return out


def d_operator(model: Model) -> FormOperator:
    return FormOperator.from_matrix(model, model.d)


def wedge_operator(form: Form) -> FormOperator:
    """``u -> form ^ u`` (left multiplication)."""
    if not form.is_rational:
        raise UnsupportedCoefficientError("wedge operators take rational forms; put parameters in the coefficient")
    return FormOperator.from_matrix(form.model, _matrix_from_map(form.model, lambda u: wedge(form, u)))


def contraction_operator(x: MultiVector) -> FormOperator:
    return FormOperator.from_matrix(x.model, _matrix_from_map(x.model, lambda u: contract(x, u)))


def lie_operator(x: MultiVector) -> FormOperator:
    return FormOperator.from_matrix(x.model, _matrix_from_map(x.model, lambda u: lie_derivative(x, u)))


def creation(model: Model, i: int) -> FormOperator:
    """``a^i``: wedge by ``dx^i`` from the left."""
    return wedge_operator(Form.monomial(model, (i,)))


def annihilation(model: Model, j: int) -> FormOperator:
    """``a^+_j``: contraction with the constant field ``d/dx^j``."""
    return contraction_operator(MultiVector.basis_field(model, j))


def anticommutator(p: FormOperator, q: FormOperator) -> FormOperator:
    return p @ q + q @ p


def supercommutator(p: FormOperator, q: FormOperator) -> FormOperator:
    if p.is_zero() or q.is_zero():
        return p @ q  # zero, with the ring of the product
    pp, qp = p.parity, q.parity
    if pp is None or qp is None:
        raise StructuralError("supercommutator needs parity-homogeneous operators")
    return p @ q - (q @ p).times(-1 if pp and qp else 1)


def operator_square(p: FormOperator) -> FormOperator:
    if not p.is_zero() and p.parity != 1:
        raise StructuralError("operator_square expects an odd operator")
    return p @ p


@dataclass(frozen=True)
class PerturbationTerm:
    """One summand ``param * op`` of a perturbed differential."""

    kind: str  # "wedge" | "contract"
    param: object  # Fraction or GradedRingElement
    data: object  # Form or MultiVector
    operator: FormOperator

    @property
    def operator_parity(self) -> int:
        return (self.data.degree if self.kind == "wedge" else self.data.order) % 2

    @property
    def param_parity(self) -> int:
        return coefficient_parity(self.param)

    @property
    def label(self) -> str:
        p = self.param if not isinstance(self.param, Fraction) else frac_str(self.param)
        return f"{self.kind}[{p}]"


def _as_param(p, ring: RingDescriptor | None):
    if isinstance(p, GradedRingElement):
        return p
    if isinstance(p, str) and ring is not None and p in ring.odd + ring.even:
        return GradedRingElement.gen(ring, p)
    try:
        return to_fraction(p)
    except (UnsupportedCoefficientError, ValueError, ZeroDivisionError):
        raise SchemaError(f"parameter {p!r} is neither a number nor a generator of the ring") from None


def build_perturbed_d(
    model: Model,
    wedge_terms: Iterable = (),
    contraction_terms: Iterable = (),
    ring: RingDescriptor | None = None,
) -> FormOperator:
    """``d + sum lambda_i omega_i^* + sum mu_j X_j^`` with the oddness rule enforced.

    Every summand must be odd on ring-valued forms: the parity of its
    coefficient plus the parity of the operator's degree shift equals 1.
    """
    terms: list[PerturbationTerm] = []
    for p, omega in wedge_terms:
        deg = omega.degree
        if deg is None or deg < 1:
            raise SchemaError("wedge terms need a nonzero homogeneous form of degree >= 1")
        terms.append(PerturbationTerm("wedge", _as_param(p, ring), omega, wedge_operator(omega)))
    for p, x in contraction_terms:
        terms.append(PerturbationTerm("contract", _as_param(p, ring), x, contraction_operator(x)))

    total = d_operator(model)
    for n, t in enumerate(terms):
        if isinstance(t.param, GradedRingElement) and t.param.parity is None:
            raise ParityViolationError(f"term {n} ({t.label}) has an inhomogeneous coefficient", term=n)
        if (t.param_parity + t.operator_parity) % 2 != 1:
            raise ParityViolationError(
                f"term {n} ({t.label}) is even on ring-valued forms: coefficient parity "
                f"{t.param_parity} + operator parity {t.operator_parity} must be odd",
                term=n,
            )
        total = total + t.operator.times(t.param)

    # sum of the odd elements lambda_i omega_i squares to zero
    wedge_sum = None
    for t in terms:
        if t.kind == "wedge":
            piece = t.data.__rmul__(t.param)
            wedge_sum = piece if wedge_sum is None else wedge_sum + piece
    if wedge_sum is not None and wedge(wedge_sum, wedge_sum):
        raise StructuralError("(sum lambda_i omega^i)^2 does not vanish", witness=wedge_sum)

    return FormOperator(model, total.components, total.ring, terms=terms)
