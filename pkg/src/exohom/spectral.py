"""Spectral sequence of a perturbation ``d + eps P`` filtered by powers of eps.

Page numbering starts at ``E_1 = T`` with ``d_1 = d``, so ``E_2 = H(T, d)``
and ``d_2`` is induced by P. For page ``l >= 2`` with ``m = l - 1``:

* a chain of length m is ``(x_0, .., x_{m-1})`` in T with ``d x_0 = 0`` and
  ``d x_j = P x_{j-1}``;
* ``Z_l`` is the span of the first entries of such chains;
* ``B_l = d T + P (last entries of chains of length m - 1)``;
* ``d_l [x_0] = [P x_{m-1}]``.

With ``d x_j = -P x_{j-1}`` one gets the usual filtered-complex formulas for
``d + eps P``; flipping the sign of every odd-indexed entry matches the two,
so the pages are the same subspaces and the differentials agree up to sign.
If P has degree shift s, ``x_j`` sits in degree ``k + j (s - 1)`` and
``d_l`` moves degree k to ``k + (l - 2)(s - 1) + s``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import ContradictionError, DimensionMismatchError, SchemaError, StructuralError
from .forms import matrix_shifts
from .graded import Z, Z2, GradedSpace, homology, parity_name
from .linalg import (
    LinearSolver,
    SparseMatrix,
    Subquotient,
    Subspace,
    axpy,
    frac_str,
    image_of,
    kernel,
    kernel_on,
    rank,
    rref,
    subquotient_induced_map,
)


@dataclass
class Chain:
    """A homogeneous chain; ``entries[j]`` is an ambient vector."""

    start: int
    entries: list

    @property
    def first(self) -> dict:
        return self.entries[0]

    @property
    def last(self) -> dict:
        return self.entries[-1]


@dataclass
class SpectralPage:
    page: int
    grading: str
    groups: dict  # key -> Subquotient (Z_l, B_l)
    shift: int  # key shift of d_l
    differential: dict = field(default_factory=dict)  # key -> induced matrix into key + shift
    ambient_maps: dict = field(default_factory=dict, repr=False)

    @property
    def dims(self) -> dict[int, int]:
        return {k: g.dim for k, g in self.groups.items()}

    @property
    def total(self) -> int:
        return sum(self.dims.values())

    def parity_dims(self) -> tuple[int, int]:
        even = sum(d for k, d in self.dims.items() if k % 2 == 0)
        return even, self.total - even

    @property
    def ranks(self) -> dict[int, int]:
        return {k: rank(m) for k, m in self.differential.items()}

    def is_zero_differential(self) -> bool:
        return all(m.is_zero() for m in self.differential.values())

    def to_dict(self) -> dict:
        label = str if self.grading == Z else parity_name
        even, odd = self.parity_dims()
        return {
            "page": self.page,
            "dims": {label(k): d for k, d in self.dims.items()},
            "parity_dims": {"even": even, "odd": odd},
            "differential_shift": self.shift,
            "differential_ranks": {label(k): r for k, r in self.ranks.items()},
        }


@dataclass
class SpectralSequence:
    space: GradedSpace
    d: SparseMatrix
    p: SparseMatrix
    p_shift: int
    pages: list
    target_total: int
    stable_page: int | None
    checks: dict
    builder: object = field(default=None, repr=False)

    @property
    def grading(self) -> str:
        return self.space.grading

    @property
    def e_infinity(self) -> SpectralPage:
        return self.pages[-1]

    def page(self, l: int) -> SpectralPage:
        return self.pages[l - 1]

    def to_dict(self) -> dict:
        label = str if self.grading == Z else parity_name
        einf = self.e_infinity
        return {
            "convention": "E_1 = T with d_1 = d; E_2 = H(T, d); d_l[x_0] = [P x_(l-2)] along chains d x_j = P x_(j-1)",
            "grading": self.grading,
            "pages": [p.to_dict() for p in self.pages],
            "stable_page": self.stable_page,
            "e_infinity": {
                "dims": {label(k): d for k, d in einf.dims.items()},
                "total": einf.total,
            },
            "generic_total": self.target_total,
            "checks": self.checks,
        }


class _ChainBuilder:
    """Chain spaces C_m grown one entry at a time, grouped by starting key."""

    def __init__(self, space: GradedSpace, d: SparseMatrix, p: SparseMatrix, p_shift: int):
        self.space = space
        self.d = d
        self.p = p
        self.s = p_shift
        self.n = space.n
        # C_1: cycles of d in every piece
        self.levels: list[dict[int, list[Chain]]] = [{}]
        first = {}
        for k in space.keys:
            z = kernel_on(d, space.piece(k))
            first[k] = [Chain(k, [r]) for r in z.rows]
        self.levels.append(first)

    def entry_key(self, start: int, j: int) -> int:
        return self.space.shift(start, j * (self.s - 1))

    def chains(self, m: int) -> dict[int, list[Chain]]:
        while len(self.levels) <= m:
            self._grow()
        return self.levels[m]

    def _grow(self) -> None:
        m = len(self.levels) - 1
        prev = self.levels[m]
        nxt: dict[int, list[Chain]] = {}
        for start in self.space.keys:
            key = self.entry_key(start, m)
            piece = self.space.piece(key)
            old = prev.get(start, [])
            # columns: P(last) of each old chain, then d of each basis vector of the new piece
            cols = [self.p.apply(c.last) for c in old] + [self.d.apply(r) for r in piece.rows]
            if not cols:
                nxt[start] = []
                continue
            ker = kernel(SparseMatrix.from_columns(self.n, cols))
            out = []
            na = len(old)
            for kv in ker:
                entries = [dict() for _ in range(m)]
                for i, c in kv.items():
                    if i < na:
                        for j in range(m):
                            entries[j] = axpy(c, old[i].entries[j], entries[j])
                x: dict = {}
                for i, c in kv.items():
                    if i >= na:
                        x = axpy(-c, piece.rows[i - na], x)
                out.append(Chain(start, entries + [x]))
            nxt[start] = _reduce_chains(out, self.n)
        self.levels.append(nxt)


def _reduce_chains(chains: list[Chain], n: int) -> list[Chain]:
    """Drop linearly dependent chains (as vectors in the concatenated space)."""
    if not chains:
        return []
    length = len(chains[0].entries)
    flat = []
    for c in chains:
        v = {}
        for j, e in enumerate(c.entries):
            for i, x in e.items():
                v[j * n + i] = x
        flat.append(v)
    rows, _ = rref(flat)
    out = []
    for r in rows:
        entries = [dict() for _ in range(length)]
        for i, x in r.items():
            entries[i // n][i % n] = x
        out.append(Chain(chains[0].start, entries))
    return out


def _lift_matrix(z: Subspace, chains: list[Chain], p: SparseMatrix) -> SparseMatrix:
    """Ambient matrix sending each echelon row of Z to P(last entry of a chain over it)."""
    n = z.n
    if not z.dim:
        return SparseMatrix.zeros(p.nrows, n)
    firsts = SparseMatrix.from_columns(n, [c.first for c in chains])
    solver = LinearSolver(firsts)
    entries = {}
    for piv, row in zip(z.pivots, z.rows):
        coeffs = solver.solve(row)
        if coeffs is None:
            raise ContradictionError("cycle of the page admits no chain")
        last: dict = {}
        for i, c in coeffs.items():
            last = axpy(c, chains[i].last, last)
        for i, c in p.apply(last).items():
            entries[(i, piv)] = c
    return SparseMatrix(p.nrows, n, entries)


def generic_rank(space: GradedSpace, d: SparseMatrix, p: SparseMatrix) -> int:
    """Rank of ``d + eps P`` on the space over Q(eps).

    A rank-r minor is a polynomial of degree <= r in eps, so among N + 1
    distinct sample points at least one attains the generic rank.
    """
    total = space.total()
    n = total.dim
    best = 0
    for e in range(1, n + 2):
        m = d + p.scaled(e)
        cols = [m.apply(r) for r in total.rows]
        r = rank(SparseMatrix.from_columns(space.n, cols)) if cols else 0
        best = max(best, r)
        if 2 * best >= n:
            break
    return best


def spectral_core(
    space: GradedSpace,
    d: SparseMatrix,
    p: SparseMatrix,
    p_shift: int,
    max_page: int | None = None,
) -> SpectralSequence:
    """Pages of the spectral sequence for ``d + eps P`` on a graded space.

    ``d`` must raise the key by 1 and P by ``p_shift`` (odd, for Z2 keys).
    """
    if d.shape != (space.n, space.n) or p.shape != (space.n, space.n):
        raise DimensionMismatchError("operators do not match the ambient space")
    for label, m in (("d", d), ("P", p)):
        space.check_invariant(m, label)
    whole = space.total()
    for r in whole.rows:
        if d.apply(d.apply(r)):
            raise StructuralError("d^2 does not vanish on the subspace", witness=r)
        if p.apply(p.apply(r)):
            raise StructuralError("P^2 does not vanish on the subspace", witness=r)
        a = d.apply(p.apply(r))
        b = p.apply(d.apply(r))
        if axpy(Fraction(1), a, b):
            raise StructuralError("d and P do not anticommute on the subspace", witness=r)

    n_t = space.dim
    if max_page is None:
        max_page = n_t + 2
    target = n_t - 2 * generic_rank(space, d, p)
    builder = _ChainBuilder(space, d, p, p_shift)

    pages = []
    e1 = {k: Subquotient(space.n, space.piece(k)) for k in space.keys}
    page1 = SpectralPage(1, space.grading, e1, 1)
    for k in space.keys:
        tgt = space.shift(k, 1)
        if tgt in space.pieces:
            page1.ambient_maps[k] = d
            page1.differential[k] = subquotient_induced_map(d, e1[k], e1[tgt])
    pages.append(page1)

    stable = None
    checks = {"d_squared_zero": True, "page_recursion": True, "stopped_at_generic_total": False}
    if page1.total == target and page1.is_zero_differential():
        stable = 1
        checks["stopped_at_generic_total"] = True
    l = 2
    while stable is None and l <= max_page:
        m = l - 1
        chains = builder.chains(m)
        shorter = builder.chains(m - 1) if m >= 2 else {}
        shift = (l - 2) * (p_shift - 1) + p_shift
        groups = {}
        for k in space.keys:
            z = Subspace(space.n, [c.first for c in chains.get(k, [])])
            bvecs = list(image_of(d, space.piece(space.shift(k, -1))).rows)
            for start, cs in shorter.items():
                for c in cs:
                    end_key = builder.entry_key(start, m - 2)
                    if space.shift(end_key, p_shift) == k:
                        bvecs.append(p.apply(c.last))
            groups[k] = Subquotient(space.n, z, Subspace(space.n, bvecs))
        page = SpectralPage(l, space.grading, groups, shift)
        for k in space.keys:
            tgt = space.shift(k, shift)
            if tgt not in groups:
                continue
            f = _lift_matrix(groups[k].z, chains.get(k, []), p)
            page.ambient_maps[k] = f
            page.differential[k] = subquotient_induced_map(f, groups[k], groups[tgt])
        _check_page(pages[-1], page, checks)
        pages.append(page)
        if page.total == target:
            if not page.is_zero_differential():
                raise ContradictionError(f"page {l} reached the generic total but d_{l} is nonzero")
            stable = l
            checks["stopped_at_generic_total"] = True
        l += 1
    for pg in pages:
        for k, mat in pg.differential.items():
            tgt = space.shift(k, pg.shift)
            nxt = pg.differential.get(tgt)
            if nxt is not None and not (nxt @ mat).is_zero():
                checks["d_squared_zero"] = False
    return SpectralSequence(space, d, p, p_shift, pages, target, stable, checks, builder)


def _check_page(prev: SpectralPage, page: SpectralPage, checks: dict) -> None:
    """dim E_{l+1}^k = dim ker(d_l at k) - rank(d_l into k)."""
    for k, g in page.groups.items():
        dim = prev.groups[k].dim
        out = prev.differential.get(k)
        rk_out = rank(out) if out is not None else 0
        rk_in = 0
        for src, mat in prev.differential.items():
            if _target(prev, src) == k:
                rk_in += rank(mat)
        if g.dim != dim - rk_out - rk_in:
            checks["page_recursion"] = False


def _target(page: SpectralPage, key: int) -> int:
    if page.grading == Z2:
        return (key + page.shift) % 2
    return key + page.shift


# -- entry points on flat subcomplexes -------------------------------------------


def _space_for(t, p: SparseMatrix) -> tuple[GradedSpace, int]:
    shifts = matrix_shifts(t.model, p)
    if t.space.grading == Z and len(shifts) <= 1:
        return t.space, (shifts.pop() if shifts else 1)
    if any(s % 2 == 0 for s in shifts):
        raise StructuralError("the perturbation must be odd")
    return t.space.to_parity(), 1


def spectral_sequence(t, p, max_page: int | None = None) -> SpectralSequence:
    """Spectral sequence of a flat subcomplex perturbed by a rational operator P."""
    pm = p.matrix if hasattr(p, "matrix") else p
    space, s = _space_for(t, pm)
    return spectral_core(space, t.model.d, pm, s, max_page)


# -- Massey-style recursion -------------------------------------------------------------


def massey_differential(ss: SpectralSequence, l: int, u0: dict) -> list[Fraction]:
    """``d_l [u0]`` in the coordinates of E_l at the target key, by growing a chain.

    Each step solves ``d u_j = P u_{j-1}`` canonically. When the canonical
    prefix cannot be continued, the chain is corrected by subtracting a
    shorter chain so the obstruction becomes exact, which is always possible
    for classes that survive to page l.
    """
    space, d, p = ss.space, ss.d, ss.p
    page = ss.page(l)
    key = next((k for k, g in page.groups.items() if g.z.contains(u0) and _in_piece(space, k, u0)), None)
    if key is None:
        raise ContradictionError("the vector is not a cycle of this page")
    target = _target(page, key)
    if l == 1:
        return page.groups[target].coords(d.apply(u0))
    builder = ss.builder
    chain = [dict(u0)]
    for q in range(1, l - 1):
        kq = builder.entry_key(key, q)
        piece = space.piece(kq)
        w = p.apply(chain[-1])
        dcols = [d.apply(r) for r in piece.rows]
        v = _solve_in(space.n, dcols, piece.rows, w)
        if v is None:
            # find a chain y of length q with P y_last = w - d v for some v
            # u_j -> u_j - y_{j-1} keeps every relation when y is a chain of length q - 1
            ys = builder.chains(q - 1).get(builder.entry_key(key, 1), []) if q >= 2 else []
            cols = [p.apply(y.last) for y in ys] + dcols
            sol = LinearSolver(SparseMatrix.from_columns(space.n, cols)).solve(w) if cols else None
            if sol is None:
                raise ContradictionError(f"Massey chain cannot be continued at step {q}")
            for i, c in sol.items():
                if i < len(ys):
                    for j in range(1, q):
                        chain[j] = axpy(-c, ys[i].entries[j - 1], chain[j])
            w = p.apply(chain[-1])
            v = _solve_in(space.n, dcols, piece.rows, w)
            if v is None:
                raise ContradictionError(f"Massey chain correction failed at step {q}")
        chain.append(v)
    for j in range(1, len(chain)):
        if d.apply(chain[j]) != _clean(p.apply(chain[j - 1])):
            raise ContradictionError("Massey chain relation violated")
    return page.groups[target].coords(p.apply(chain[-1]))


def _clean(v: dict) -> dict:
    return {i: c for i, c in v.items() if c}


def _in_piece(space: GradedSpace, key: int, v: dict) -> bool:
    return space.piece(key).contains(v) if v else key == space.keys[0]


def _solve_in(n: int, dcols: list, rows: list, w: dict) -> dict | None:
    if not w:
        return {}
    if not dcols:
        return None
    sol = LinearSolver(SparseMatrix.from_columns(n, dcols)).solve(w)
    if sol is None:
        return None
    out: dict = {}
    for i, c in sol.items():
        out = axpy(c, rows[i], out)
    return out


def massey_cross_check(ss: SpectralSequence) -> dict:
    """Compare the chain-built d_l with the page differential on every representative."""
    checked = 0
    mismatches = []
    for page in ss.pages[1:]:
        for k, g in page.groups.items():
            mat = page.differential.get(k)
            if mat is None:
                continue
            for i, rep in enumerate(g.reps):
                got = massey_differential(ss, page.page, rep)
                want = [mat.column(i).get(r, Fraction(0)) for r in range(mat.nrows)]
                checked += 1
                if got != want:
                    mismatches.append({"page": page.page, "key": k, "index": i})
    return {"checked": checked, "mismatches": mismatches, "pass": not mismatches}


# -- comparison with perturbed homology -----------------------------------------------------


@dataclass
class PerturbedComparison:
    samples: list
    per_sample: list  # (even, odd)
    minimum_total: int
    e_infinity_total: int

    @property
    def agrees(self) -> bool:
        return self.minimum_total == self.e_infinity_total

    def to_dict(self) -> dict:
        return {
            "samples": [
                {"value": frac_str(s), "even": e, "odd": o, "total": e + o}
                for s, (e, o) in zip(self.samples, self.per_sample)
            ],
            "minimum_total": self.minimum_total,
            "e_infinity_total": self.e_infinity_total,
            "agrees": self.agrees,
        }


def perturbed_homology_compare(
    t, p, samples: Sequence, ss: SpectralSequence | None = None
) -> PerturbedComparison:
    """Z2-graded homology of ``d + s P`` on T for each sample s, against E_infinity."""
    values = [Fraction(s) for s in samples]
    if len(values) < 3:
        raise SchemaError("need at least three sample values")
    if any(v == 0 for v in values):
        raise SchemaError("sample values must be nonzero")
    pm = p.matrix if hasattr(p, "matrix") else p
    if ss is None:
        ss = spectral_sequence(t, p)
    par = ss.space.to_parity()
    per = []
    for v in values:
        h = homology(par, ss.d + pm.scaled(v), 1)
        per.append((h[0].dim, h[1].dim))
    return PerturbedComparison(values, per, min(e + o for e, o in per), ss.e_infinity.total)
