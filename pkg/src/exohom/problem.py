"""Problem files: a model plus named forms, fields and a perturbation spec.

See ``docs/problem-format.md`` for the schema. Parsing is strict: unknown
keys, dangling references and parity-rule violations are all errors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from .errors import ParityViolationError, SchemaError
from .forms import Form, FormOperator, MultiVector, build_perturbed_d, contraction_operator, wedge_operator
from .linalg import parse_frac
from .models import Model, bundled_model, model_from_dict
from .ring import RingDescriptor

TOP_KEYS = {
    "model",
    "forms",
    "multivectors",
    "operator",
    "omega_2n",
    "reeb",
    "subcomplex",
    "field",
    "fields",
    "evaluate",
    "assignment",
    "samples",
    "cutoff",
    "max_page",
}
OPERATOR_KEYS = {"terms", "ring_cutoff"}
TERM_KEYS = {"param", "parity", "kind", "ref"}
SUBCOMPLEX_KINDS = ("flat", "omega", "invariant", "full")

BUNDLED_PROBLEMS = (
    "heisenberg3_contact",
    "heisenberg3_omega",
    "heisenberg5_contact",
    "heisenberg5_omega",
    "torus1_free",
    "torus1_trivial",
    "torus2_contract",
    "torus2_dx1",
    "torus2_dynamics",
    "torus2_partial",
    "torus3_contact",
    "torus3_dynamics",
)


@dataclass
class TermSpec:
    param: str
    parity: str
    kind: str
    ref: str
    symbolic: bool


@dataclass
class Problem:
    model: Model
    forms: dict = field(default_factory=dict)
    fields: dict = field(default_factory=dict)
    terms: list = field(default_factory=list)
    ring: RingDescriptor | None = None
    raw: dict = field(default_factory=dict)

    def get(self, key, default=None):
        return self.raw.get(key, default)

    def form(self, name: str) -> Form:
        if name not in self.forms:
            raise SchemaError(f"unknown form {name!r}")
        return self.forms[name]

    def multivector(self, name: str) -> MultiVector:
        if name not in self.fields:
            raise SchemaError(f"unknown multivector {name!r}")
        return self.fields[name]

    def require(self, key: str):
        if key not in self.raw:
            raise SchemaError(f"problem needs {key!r} for this command")
        return self.raw[key]

    def perturbed_d(self) -> FormOperator:
        """d' with symbolic parameters as ring generators and numeric ones as rationals."""
        wedges, contracts = [], []
        for t in self.terms:
            param = t.param if t.symbolic else parse_frac(t.param)
            if t.kind == "wedge":
                wedges.append((param, self.form(t.ref)))
            else:
                contracts.append((param, self.multivector(t.ref)))
        return build_perturbed_d(self.model, wedges, contracts, ring=self.ring)

    def perturbation(self) -> FormOperator:
        """P = sum of the term operators, numeric parameters kept as weights."""
        if not self.terms:
            raise SchemaError("the operator has no perturbation terms")
        total = FormOperator.zero(self.model)
        for t in self.terms:
            if t.kind == "wedge":
                op = wedge_operator(self.form(t.ref))
            else:
                op = contraction_operator(self.multivector(t.ref))
            total = total + (op if t.symbolic else op.times(parse_frac(t.param)))
        return total

    def samples(self) -> list[Fraction]:
        vals = self.raw.get("samples", ["1", "2", "-3"])
        if not isinstance(vals, list):
            raise SchemaError("samples must be a list")
        return [parse_frac(v) for v in vals]

    def int_param(self, key: str, default: int | None) -> int | None:
        v = self.raw.get(key, default)
        if v is not None and (isinstance(v, bool) or not isinstance(v, int)):
            raise SchemaError(f"{key} must be an integer")
        return v


def _is_number(s: str) -> bool:
    try:
        Fraction(s)
    except (ValueError, ZeroDivisionError):
        return False
    return True


def problem_from_dict(obj) -> Problem:
    if not isinstance(obj, dict):
        raise SchemaError("problem file must be a JSON object")
    unknown = set(obj) - TOP_KEYS
    if unknown:
        raise SchemaError(f"unknown problem keys: {sorted(unknown)}")
    if "model" not in obj:
        raise SchemaError("problem is missing 'model'")
    spec = obj["model"]
    if isinstance(spec, str):
        model = bundled_model(spec)
    else:
        model = model_from_dict(spec)

    forms = {}
    for name, lit in _named(obj, "forms").items():
        forms[name] = Form.from_json(model, lit)
    fields = {}
    for name, lit in _named(obj, "multivectors").items():
        fields[name] = MultiVector.from_json(model, lit)

    terms, ring = _parse_operator(obj.get("operator"), forms, fields)
    prob = Problem(model, forms, fields, terms, ring, dict(obj))

    for key in ("omega_2n",):
        if key in obj:
            prob.form(_name(obj[key], key))
    for key in ("reeb", "field"):
        if key in obj:
            prob.multivector(_name(obj[key], key))
    if "fields" in obj:
        if not isinstance(obj["fields"], list):
            raise SchemaError("fields must be a list of names")
        for n in obj["fields"]:
            prob.multivector(_name(n, "fields"))
    if "evaluate" in obj:
        if not isinstance(obj["evaluate"], list):
            raise SchemaError("evaluate must be a list of form names")
        for n in obj["evaluate"]:
            prob.form(_name(n, "evaluate"))
    if "subcomplex" in obj and obj["subcomplex"] not in SUBCOMPLEX_KINDS:
        raise SchemaError(f"subcomplex must be one of {SUBCOMPLEX_KINDS}")
    if "assignment" in obj:
        a = obj["assignment"]
        if not isinstance(a, dict):
            raise SchemaError("assignment must map parameter names to rationals")
        for v in a.values():
            parse_frac(v)
    if "samples" in obj:
        prob.samples()
    for key in ("cutoff", "max_page"):
        prob.int_param(key, None)
    if terms:
        prob.perturbed_d()  # enforces the oddness rule up front
    return prob


def _name(v, key: str) -> str:
    if not isinstance(v, str):
        raise SchemaError(f"{key} must name a form or multivector")
    return v


def _named(obj: dict, key: str) -> dict:
    v = obj.get(key, {})
    if not isinstance(v, dict):
        raise SchemaError(f"{key} must be an object of named literals")
    return v


def _parse_operator(spec, forms: dict, fields: dict) -> tuple[list, RingDescriptor | None]:
    if spec is None:
        return [], None
    if not isinstance(spec, dict):
        raise SchemaError("operator must be an object")
    unknown = set(spec) - OPERATOR_KEYS
    if unknown:
        raise SchemaError(f"unknown operator keys: {sorted(unknown)}")
    raw_terms = spec.get("terms", [])
    if not isinstance(raw_terms, list):
        raise SchemaError("operator terms must be a list")
    terms = []
    odd, even = [], []
    for n, t in enumerate(raw_terms):
        if not isinstance(t, dict) or set(t) != TERM_KEYS:
            raise SchemaError(f"operator term {n} needs exactly {sorted(TERM_KEYS)}")
        param, parity, kind, ref = t["param"], t["parity"], t["kind"], t["ref"]
        if not isinstance(param, str) or not isinstance(ref, str):
            raise SchemaError(f"operator term {n}: param and ref must be strings")
        if parity not in ("even", "odd"):
            raise SchemaError(f"operator term {n}: parity must be 'even' or 'odd'")
        if kind not in ("wedge", "contract"):
            raise SchemaError(f"operator term {n}: kind must be 'wedge' or 'contract'")
        if kind == "wedge" and ref not in forms:
            raise SchemaError(f"operator term {n} refers to unknown form {ref!r}")
        if kind == "contract" and ref not in fields:
            raise SchemaError(f"operator term {n} refers to unknown multivector {ref!r}")
        symbolic = not _is_number(param)
        if symbolic:
            bucket, other = (odd, even) if parity == "odd" else (even, odd)
            if param in other:
                raise ParityViolationError(f"parameter {param!r} declared both even and odd", term=n)
            if param not in bucket:
                bucket.append(param)
        elif parity == "odd":
            raise ParityViolationError(f"operator term {n}: a rational coefficient is even", term=n)
        terms.append(TermSpec(param, parity, kind, ref, symbolic))
    ring = None
    if odd or even:
        if "ring_cutoff" not in spec:
            raise SchemaError("operator with symbolic parameters needs ring_cutoff")
        cutoff = spec["ring_cutoff"]
        if isinstance(cutoff, bool) or not isinstance(cutoff, int):
            raise SchemaError("ring_cutoff must be an integer")
        ring = RingDescriptor(tuple(odd), tuple(even), cutoff)
    return terms, ring


def load_problem(path) -> Problem:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    return problem_from_dict(obj)


def bundled_problem_path(name: str):
    if name not in BUNDLED_PROBLEMS:
        raise SchemaError(f"no bundled problem named {name!r}")
    return resources.files("exohom.data.problems").joinpath(f"{name}.json")


def load_bundled_problem(name: str) -> Problem:
    text = bundled_problem_path(name).read_text(encoding="utf-8")
    return problem_from_dict(json.loads(text))

