"""Flat subcomplexes ``T = ker (d')^2`` and their homology.

The kernel of the curvature is computed inside the model's full form space
and kept in ambient coordinates, so homology classes, induced maps and
spectral pages can all be compared as plain subspaces.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .errors import (
    NotConstructibleError,
    OmegaNotClosedError,
    ParityViolationError,
    ReebNotKernelError,
    SchemaError,
    StructuralError,
    UnsupportedInputError,
)
from .forms import (
    TRIVIAL_RING,
    Form,
    FormOperator,
    MultiVector,
    apply_d,
    contract,
    contraction_operator,
    d_operator,
    lie_operator,
    matrix_shifts,
    operator_square,
    wedge_operator,
)
from .graded import Z, Z2, GradedSpace, homology, parity_name
from .linalg import (
    SparseMatrix,
    Subquotient,
    Subspace,
    frac_str,
    image_of,
    kernel_on,
    rank,
    rank_kernel_image,
    solve,
    subquotient_induced_map,
    vstack,
)
from .models import Model


def _degree_space(model: Model, key: int, grading: str) -> Subspace:
    if grading == Z:
        return model.degree_space(key)
    idx = [i for i, d in enumerate(model.degrees) if d % 2 == key]
    return Subspace(model.size, [{i: Fraction(1)} for i in idx])


class FlatSubcomplex:
    """The subspace of forms killed by every component of a curvature.

    ``differential`` is the (possibly symbolic) operator d'; each of its ring
    components is checked to map T into T.
    """

    def __init__(self, model: Model, differential: FormOperator, curvature: Mapping[str, SparseMatrix]):
        self.model = model
        self.differential = differential
        self.curvature = dict(curvature)
        mats = list(self.curvature.values())
        homogeneous = all(len(matrix_shifts(model, a)) <= 1 for a in mats)
        self.grading = Z if homogeneous else Z2
        keys = range(model.dim + 1) if self.grading == Z else (0, 1)
        stacked = vstack(mats) if mats else None
        pieces = {}
        for k in keys:
            space = _degree_space(model, k, self.grading)
            pieces[k] = kernel_on(stacked, space) if stacked is not None else space
        self.space = GradedSpace(model.size, self.grading, pieces)
        for name, a in self.curvature.items():
            self.space.check_annihilates(a, f"curvature component {name}")
        for name, a in differential.component_names().items():
            self.space.check_invariant(a, f"differential component {name}")

    @property
    def dims(self) -> dict[int, int]:
        return self.space.dims

    @property
    def dim(self) -> int:
        return self.space.dim

    def piece(self, key: int) -> Subspace:
        return self.space.piece(key)

    def dims_list(self) -> list[int]:
        return [self.dims.get(k, 0) for k in self.space.keys]

    def restricted(self, m: SparseMatrix) -> SparseMatrix:
        """Matrix of ``m`` on T in the concatenated echelon basis of the pieces."""
        total = self.space.total()
        cols = []
        for row in total.rows:
            img = m.apply(row)
            cols.append({i: c for i, c in enumerate(total.coords(img)) if c})
        return SparseMatrix.from_columns(total.dim, cols)

    def __repr__(self) -> str:
        return f"FlatSubcomplex({self.grading}, dims={self.dims_list()})"


def kernel_subcomplex(differential: FormOperator, curvature: Mapping[str, SparseMatrix]) -> FlatSubcomplex:
    return FlatSubcomplex(differential.model, differential, curvature)


def flat_subcomplex(dp: FormOperator, assignment: Mapping | None = None) -> FlatSubcomplex:
    """T for a perturbed differential.

    Without an assignment the curvature is symbolic and T is the simultaneous
    kernel of its ring components; with one, parameters are substituted first
    and T is the literal kernel of the numeric square.
    """
    if not dp.is_zero() and dp.parity != 1:
        raise StructuralError("the perturbed differential must be odd")
    if assignment is not None:
        dp = dp.substitute(assignment)
    curv = operator_square(dp)
    return FlatSubcomplex(dp.model, dp, curv.component_names())


def omega_subcomplex(model: Model, omega: Form) -> FlatSubcomplex:
    """``T_Omega = ker(Omega ^ .)`` with the plain differential d; Omega must be closed."""
    if apply_d(omega):
        raise OmegaNotClosedError("Omega is not closed")
    return FlatSubcomplex(model, d_operator(model), {"Omega": wedge_operator(omega).matrix})


def invariant_subcomplex(model: Model, x: MultiVector) -> FlatSubcomplex:
    """``ker L_X``: forms invariant under the flow of X."""
    if x.order != 1:
        raise UnsupportedInputError("invariant subcomplex needs an order-1 field")
    return FlatSubcomplex(model, d_operator(model), {"L_X": lie_operator(x).matrix})


# -- exotic homology -------------------------------------------------------------


@dataclass
class ExoticHomology:
    grading: str
    groups: dict  # key -> Subquotient
    model: Model

    @property
    def dims(self) -> dict[int, int]:
        return {k: g.dim for k, g in self.groups.items()}

    def dims_list(self) -> list[int]:
        return [g.dim for g in self.groups.values()]

    def representatives(self, key: int) -> list[Form]:
        return [Form.from_vector(self.model, r) for r in self.groups[key].reps]

    def to_dict(self) -> dict:
        if self.grading == Z:
            dims = {str(k): g.dim for k, g in self.groups.items()}
        else:
            dims = {parity_name(k): g.dim for k, g in self.groups.items()}
        return {
            "grading": self.grading,
            "dims": dims,
            "representatives": {
                (str(k) if self.grading == Z else parity_name(k)): [f.to_json() for f in self.representatives(k)]
                for k in self.groups
            },
        }


def exotic_homology(t: FlatSubcomplex, at: Mapping | None = None) -> ExoticHomology:
    """Homology of d' on T at a parameter assignment (``None`` means every parameter is 0).

    All-zero parameters keep the Z-grading when T has one; any nonzero value
    (necessarily on an even generator) switches to the Z2-grading.
    """
    dp = t.differential
    names = dp.ring.odd + dp.ring.even
    values = {n: Fraction(0) for n in names}
    if at:
        unknown = set(at) - set(names)
        if unknown:
            raise SchemaError(f"assignment names unknown parameters {sorted(unknown)}")
        for n, v in at.items():
            v = Fraction(v)
            if n in dp.ring.odd and v:
                raise ParityViolationError(f"odd generator {n!r} cannot take the nonzero value {v}")
            values[n] = v
    numeric = dp.substitute(values) if dp.ring != TRIVIAL_RING else dp
    m = numeric.matrix
    shifts = matrix_shifts(t.model, m)
    if t.grading == Z and shifts <= {1} and not any(values.values()):
        return ExoticHomology(Z, homology(t.space, m, 1), t.model)
    if any(s % 2 == 0 for s in shifts):
        raise StructuralError("substituted differential is not odd")
    return ExoticHomology(Z2, homology(t.space.to_parity(), m, 1), t.model)


# -- contact data: the shape of T_Omega -----------------------------------------------


@dataclass
class Lemma1Verdict:
    clauses: dict
    dims: list

    @property
    def passed(self) -> bool:
        return all(self.clauses.values())

    def to_dict(self) -> dict:
        return {"clauses": dict(self.clauses), "t_dims": list(self.dims), "pass": self.passed}


def _check_contact_data(m: Model, omega: Form, reeb: MultiVector) -> None:
    if m.dim % 2 != 1:
        raise SchemaError("the model must have odd dimension 2n+1")
    if omega.degree != m.dim - 1:
        raise SchemaError(f"Omega must be a {m.dim - 1}-form")
    if reeb.order != 1:
        raise SchemaError("the Reeb field must have order 1")
    if apply_d(omega):
        raise OmegaNotClosedError("Omega is not closed")
    if contract(reeb, omega):
        raise ReebNotKernelError("contraction of Omega with the Reeb field is nonzero")


def lemma1_check(m: Model, omega_2n: Form, reeb: MultiVector) -> Lemma1Verdict:
    _check_contact_data(m, omega_2n, reeb)
    t = omega_subcomplex(m, omega_2n)
    ann = kernel_on(contraction_operator(reeb).matrix, m.degree_space(1))
    clauses = {
        "a": t.piece(0).dim == 0,
        "b": t.piece(1) == ann,
        "c": all(t.piece(k) == m.degree_space(k) for k in range(2, m.dim + 1)),
    }
    return Lemma1Verdict(clauses, t.dims_list())


# -- the long exact sequence ------------------------------------------------------------


NODE_NAMES = ("R", "Ker L_X", "H1_Omega", "H1", "Lambda0/L_X", "H2_Omega", "H2", "0")


@dataclass
class ExactSequenceReport:
    nodes: list  # (name, dim)
    maps: list  # (name, matrix, rank)
    exactness: list  # {"node", "exact", "witness"}
    theta: Form
    theta_independent: bool
    groups: list = field(default_factory=list, repr=False)

    @property
    def dims(self) -> list[int]:
        return [d for _, d in self.nodes[:-1]]

    @property
    def exact(self) -> bool:
        return all(e["exact"] for e in self.exactness)

    @property
    def alternating_sum(self) -> int:
        return sum((-1) ** i * d for i, (_, d) in enumerate(self.nodes))

    def to_dict(self) -> dict:
        return {
            "nodes": [{"name": n, "dim": d} for n, d in self.nodes],
            "maps": [
                {"name": n, "rank": r, "matrix": [[frac_str(x) for x in row] for row in mat.to_dense()]}
                for n, mat, r in self.maps
            ],
            "exactness": self.exactness,
            "exact": self.exact,
            "alternating_sum": self.alternating_sum,
            "theta": self.theta.to_json(),
            "theta_independent": self.theta_independent,
        }


def _reference_theta(m: Model, contraction: SparseMatrix) -> dict:
    """Canonical 1-form theta with iota_X theta = 1."""
    cols = list(m.degree_ranges[1])
    vacuum = m.index[(m.zero_mode, ())]
    sub = contraction.submatrix([vacuum], cols)
    sol = solve(sub, [1])
    if sol is None:
        raise NotConstructibleError("no 1-form theta with theta(X) = 1 exists in this model")
    return {cols[i]: c for i, c in sol.items()}


def _connecting(m: Model, theta: dict) -> SparseMatrix:
    """Ambient matrix of f -> d(f theta) on functions."""
    wedge_theta = wedge_operator(Form.from_vector(m, theta)).matrix
    return m.d @ wedge_theta


def _exactness(groups: list, maps: list, amb: list) -> list:
    out = []
    n = len(groups)
    for i in range(n):
        dim = groups[i].dim
        if i == 0:
            im = Subspace(dim)
        else:
            im = Subspace(dim, maps[i - 1].columns())
        _, ker_vecs, _ = rank_kernel_image(maps[i]) if i < len(maps) else (0, [], [])
        ker = Subspace(dim, ker_vecs)
        entry = {"node": NODE_NAMES[i], "exact": im == ker, "witness": None}
        if im != ker:
            bad = next((v for v in ker.rows if not im.contains(v)), None)
            kind = "kernel not in image"
            if bad is None:
                bad = next(v for v in im.rows if not ker.contains(v))
                kind = "image not in kernel"
            rep: dict = {}
            for c, r in zip([bad.get(j, 0) for j in range(dim)], groups[i].reps):
                for a, x in r.items():
                    rep[a] = rep.get(a, 0) + c * x
            entry["witness"] = {
                "kind": kind,
                "vector": {str(a): frac_str(x) for a, x in sorted(rep.items()) if x},
            }
        out.append(entry)
    return out


def theorem1_sequence(m: Model, omega_2n: Form, reeb: MultiVector) -> ExactSequenceReport:
    """``0 -> R -> Ker L_X -> H1_Omega -> H1 -> Lambda0/L_X -> H2_Omega -> H2 -> 0`` with checks."""
    _check_contact_data(m, omega_2n, reeb)
    n = m.size
    d = m.d
    t = omega_subcomplex(m, omega_2n)
    lie = lie_operator(reeb).matrix
    ctr = contraction_operator(reeb).matrix
    lam = [m.degree_space(k) for k in range(min(3, m.dim + 1))]
    while len(lam) < 3:
        lam.append(Subspace(n))

    def hom(z_space: Subspace, prev: Subspace) -> Subquotient:
        return Subquotient(n, kernel_on(d, z_space), image_of(d, prev))

    groups = [
        Subquotient(1, [{0: Fraction(1)}]),
        Subquotient(n, kernel_on(lie, lam[0])),
        hom(t.piece(1), t.piece(0)),
        hom(lam[1], lam[0]),
        Subquotient(n, lam[0], image_of(lie, lam[0])),
        hom(t.piece(2), t.piece(1)),
        hom(lam[2], lam[1]),
    ]
    vacuum = m.index[(m.zero_mode, ())]
    theta = _reference_theta(m, ctr)
    ambient = [
        SparseMatrix(n, 1, {(vacuum, 0): 1}),
        d,
        SparseMatrix.identity(n),
        ctr,
        _connecting(m, theta),
        SparseMatrix.identity(n),
    ]
    induced = [subquotient_induced_map(f, groups[i], groups[i + 1]) for i, f in enumerate(ambient)]
    induced.append(SparseMatrix.zeros(0, groups[6].dim))
    map_names = ["1 -> const", "d", "forget", "iota_X", "f -> d(f theta)", "forget", "H2 -> 0"]
    exactness = _exactness(groups, induced, ambient)

    # an alternative section theta + eta with eta in T^1 must induce the same map
    # eta is taken among zero-mode forms so that f * eta stays inside the window
    zero_mode = Subspace(n, [{i: Fraction(1)} for i in m.degree_ranges[1] if not any(m.basis[i][0])])
    t1 = t.piece(1).intersect(zero_mode)
    closed = kernel_on(d, t1)
    eta = closed.rows[0] if closed.dim else (t1.rows[0] if t1.dim else {})
    theta2 = dict(theta)
    for i, c in eta.items():
        theta2[i] = theta2.get(i, 0) + c
    theta2 = {i: c for i, c in theta2.items() if c}
    alt = subquotient_induced_map(_connecting(m, theta2), groups[4], groups[5])

    nodes = [(NODE_NAMES[i], g.dim) for i, g in enumerate(groups)] + [("0", 0)]
    maps = [(name, mat, rank(mat)) for name, mat in zip(map_names, induced)]
    return ExactSequenceReport(
        nodes=nodes,
        maps=maps,
        exactness=exactness,
        theta=Form.from_vector(m, theta),
        theta_independent=alt == induced[4],
        groups=groups,
    )
