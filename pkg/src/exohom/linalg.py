"""Exact sparse linear algebra over the rationals.

Vectors are plain ``dict[int, Fraction]`` with no zero entries. Every
subspace is stored in reduced row echelon form, so two spans are equal
exactly when their stored rows are equal.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import DimensionMismatchError, NotWellDefinedError, UnsupportedCoefficientError

Vector = dict


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise UnsupportedCoefficientError(f"unsupported coefficient {x!r}")
    return Fraction(x)


def frac_str(x: Fraction) -> str:
    """Serialize a rational as ``p/q``, dropping ``/1``."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_frac(s) -> Fraction:
    if isinstance(s, bool) or not isinstance(s, (str, int)):
        raise UnsupportedCoefficientError(f"cannot parse rational from {s!r}")
    return Fraction(s)


def vec(v, n: int | None = None) -> Vector:
    """Coerce a dense sequence or sparse mapping into a sparse vector."""
    if isinstance(v, Mapping):
        out = {int(i): to_fraction(c) for i, c in v.items() if c != 0}
    else:
        out = {i: to_fraction(c) for i, c in enumerate(v) if c != 0}
    if n is not None and any(i < 0 or i >= n for i in out):
        raise DimensionMismatchError(f"vector index out of range for dimension {n}")
    return out


def dense(v: Vector, n: int) -> list[Fraction]:
    out = [Fraction(0)] * n
    for i, c in v.items():
        out[i] = c
    return out


def axpy(a: Fraction, x: Vector, y: Vector) -> Vector:
    """Return ``y + a*x`` as a new vector."""
    out = dict(y)
    if a == 0:
        return out
    for i, c in x.items():
        s = out.get(i, 0) + a * c
        if s:
            out[i] = s
        else:
            out.pop(i, None)
    return out


def scale(a: Fraction, x: Vector) -> Vector:
    if a == 0:
        return {}
    return {i: a * c for i, c in x.items()}


def add(*vs: Vector) -> Vector:
    out: Vector = {}
    for v in vs:
        out = axpy(Fraction(1), v, out)
    return out


class SparseMatrix:
    """Immutable sparse rational matrix stored column-wise."""

    __slots__ = ("nrows", "ncols", "_cols", "_rows")

    def __init__(self, nrows: int, ncols: int, entries: Mapping | None = None):
        self.nrows = int(nrows)
        self.ncols = int(ncols)
        cols: dict[int, dict[int, Fraction]] = {}
        for (i, j), c in (entries or {}).items():
            if not (0 <= i < self.nrows and 0 <= j < self.ncols):
                raise DimensionMismatchError(f"entry ({i}, {j}) outside {self.nrows}x{self.ncols}")
            c = to_fraction(c)
            if c:
                cols.setdefault(j, {})[i] = c
        self._cols = cols
        self._rows = None

    @classmethod
    def from_columns(cls, nrows: int, columns: Sequence[Vector]) -> "SparseMatrix":
        m = cls(nrows, len(columns))
        for j, col in enumerate(columns):
            col = {i: c for i, c in col.items() if c}
            if any(i < 0 or i >= nrows for i in col):
                raise DimensionMismatchError("column entry out of range")
            if col:
                m._cols[j] = col
        return m

    @classmethod
    def from_rows(cls, ncols: int, rows: Sequence[Vector]) -> "SparseMatrix":
        entries = {(i, j): c for i, row in enumerate(rows) for j, c in row.items()}
        return cls(len(rows), ncols, entries)

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence]) -> "SparseMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        if any(len(r) != ncols for r in rows):
            raise DimensionMismatchError("ragged dense matrix")
        return cls(nrows, ncols, {(i, j): c for i, r in enumerate(rows) for j, c in enumerate(r) if c != 0})

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "SparseMatrix":
        return cls(nrows, ncols)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def column(self, j: int) -> Vector:
        return dict(self._cols.get(j, {}))

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.ncols)]

    def rows(self) -> list[Vector]:
        if self._rows is None:
            rows: list[dict] = [{} for _ in range(self.nrows)]
            for j in sorted(self._cols):
                for i, c in self._cols[j].items():
                    rows[i][j] = c
            self._rows = rows
        return [dict(r) for r in self._rows]

    def entries(self) -> dict[tuple[int, int], Fraction]:
        return {(i, j): c for j, col in self._cols.items() for i, c in col.items()}

    def nnz(self) -> int:
        return sum(len(c) for c in self._cols.values())

    def is_zero(self) -> bool:
        return not self._cols

    def to_dense(self) -> list[list[Fraction]]:
        out = [[Fraction(0)] * self.ncols for _ in range(self.nrows)]
        for (i, j), c in self.entries().items():
            out[i][j] = c
        return out

    def apply(self, v) -> Vector:
        v = v if isinstance(v, dict) else vec(v)
        out: Vector = {}
        for j, a in v.items():
            if j >= self.ncols or j < 0:
                raise DimensionMismatchError(f"vector index {j} out of range for {self.ncols} columns")
            col = self._cols.get(j)
            if col:
                out = axpy(a, col, out)
        return out

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.ncols != other.nrows:
            raise DimensionMismatchError(f"cannot compose {self.shape} with {other.shape}")
        return SparseMatrix.from_columns(self.nrows, [self.apply(other._cols.get(j, {})) for j in range(other.ncols)])

    def _combine(self, other: "SparseMatrix", a: Fraction) -> "SparseMatrix":
        if self.shape != other.shape:
            raise DimensionMismatchError(f"shape mismatch {self.shape} vs {other.shape}")
        cols = [axpy(a, other._cols.get(j, {}), self._cols.get(j, {})) for j in range(self.ncols)]
        return SparseMatrix.from_columns(self.nrows, cols)

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self._combine(other, Fraction(1))

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self._combine(other, Fraction(-1))

    def __neg__(self) -> "SparseMatrix":
        return self.scaled(-1)

    def scaled(self, a) -> "SparseMatrix":
        a = to_fraction(a)
        return SparseMatrix.from_columns(self.nrows, [scale(a, self._cols.get(j, {})) for j in range(self.ncols)])

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.ncols, self.nrows, {(j, i): c for (i, j), c in self.entries().items()})

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "SparseMatrix":
        rpos = {r: k for k, r in enumerate(rows)}
        out = []
        for j in cols:
            col = self._cols.get(j, {})
            out.append({rpos[i]: c for i, c in col.items() if i in rpos})
        return SparseMatrix.from_columns(len(rows), out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self._cols == other._cols

    def __hash__(self):
        return hash((self.shape, frozenset(self.entries().items())))

    def __repr__(self) -> str:
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"


def hstack(blocks: Sequence[SparseMatrix]) -> SparseMatrix:
    if not blocks:
        raise DimensionMismatchError("hstack of no blocks")
    nrows = blocks[0].nrows
    cols: list[Vector] = []
    for b in blocks:
        if b.nrows != nrows:
            raise DimensionMismatchError("hstack row mismatch")
        cols.extend(b.columns())
    return SparseMatrix.from_columns(nrows, cols)


def vstack(blocks: Sequence[SparseMatrix]) -> SparseMatrix:
    if not blocks:
        raise DimensionMismatchError("vstack of no blocks")
    ncols = blocks[0].ncols
    entries = {}
    off = 0
    for b in blocks:
        if b.ncols != ncols:
            raise DimensionMismatchError("vstack column mismatch")
        for (i, j), c in b.entries().items():
            entries[(i + off, j)] = c
        off += b.nrows
    return SparseMatrix(off, ncols, entries)


# -- echelon machinery --------------------------------------------------------


def rref(vectors: Iterable[Vector]) -> tuple[list[Vector], list[int]]:
    """Reduced row echelon basis of the span of ``vectors``.

    Returns the rows sorted by pivot column and the pivot list. Each row is
    normalized to 1 at its pivot and vanishes at every other pivot.
    """
    basis: dict[int, Vector] = {}
    for v in vectors:
        r = _reduce(v, basis)
        if not r:
            continue
        p = min(r)
        r = scale(1 / r[p], r)
        for q, row in basis.items():
            c = row.get(p)
            if c:
                basis[q] = axpy(-c, r, row)
        basis[p] = r
    pivots = sorted(basis)
    return [basis[p] for p in pivots], pivots


def _reduce(v: Vector, basis: Mapping[int, Vector]) -> Vector:
    hits = [(p, v[p]) for p in v if p in basis]
    out = dict(v)
    for p, c in hits:
        out = axpy(-c, basis[p], out)
    return out


def canonicalize(vectors: Iterable[Vector]) -> list[Vector]:
    return rref(vectors)[0]


def rank_kernel_image(m: SparseMatrix) -> tuple[int, list[Vector], list[Vector]]:
    """Rank, null-space basis and column-space basis of ``m``.

    The kernel basis is the standard one attached to the free columns of the
    row echelon form: vector ``k_f`` is 1 at free column ``f``, 0 at the other
    free columns. The image basis is reduced row echelon.
    """
    rows, pivots = rref(m.rows())
    pivset = set(pivots)
    kernel = []
    for f in range(m.ncols):
        if f in pivset:
            continue
        k = {f: Fraction(1)}
        for p, row in zip(pivots, rows):
            c = row.get(f)
            if c:
                k[p] = -c
        kernel.append(k)
    image = canonicalize(m.columns())
    return len(rows), kernel, image


def rank(m: SparseMatrix) -> int:
    if m.ncols < m.nrows:
        return len(rref(m.columns())[0])
    return len(rref(m.rows())[0])


def kernel(m: SparseMatrix) -> list[Vector]:
    return rank_kernel_image(m)[1]


class LinearSolver:
    """Reusable factorization of ``m`` for repeated canonical solves."""

    def __init__(self, m: SparseMatrix):
        self.matrix = m
        n = m.ncols
        aug = []
        for i, row in enumerate(m.rows()):
            r = dict(row)
            r[n + i] = Fraction(1)
            aug.append(r)
        rows, pivots = rref(aug)
        self._pivot_rows = []  # (pivot column, row of E)
        self._checks = []  # rows of E spanning the left null space
        for p, row in zip(pivots, rows):
            e = {j - n: c for j, c in row.items() if j >= n}
            if p < n:
                self._pivot_rows.append((p, e))
            else:
                self._checks.append(e)
        self.rank = len(self._pivot_rows)

    def solve(self, rhs) -> Vector | None:
        m = self.matrix
        b = rhs if isinstance(rhs, dict) else vec(rhs)
        if any(i < 0 or i >= m.nrows for i in b):
            raise DimensionMismatchError(f"rhs does not fit {m.nrows} rows")
        for e in self._checks:
            if _dot(e, b):
                return None
        x = {}
        for p, e in self._pivot_rows:
            c = _dot(e, b)
            if c:
                x[p] = c
        return x


def _dot(a: Vector, b: Vector) -> Fraction:
    if len(a) > len(b):
        a, b = b, a
    return sum((c * b[i] for i, c in a.items() if i in b), Fraction(0))


def solve(m: SparseMatrix, rhs) -> Vector | None:
    """Canonical particular solution of ``m x = rhs`` or ``None``.

    The returned solution is zero on every free (non-pivot) column.
    """
    b = rhs if isinstance(rhs, dict) else vec(rhs)
    if not isinstance(rhs, dict) and len(rhs) != m.nrows:
        raise DimensionMismatchError(f"rhs of length {len(rhs)} for {m.nrows} rows")
    return LinearSolver(m).solve(b)


class Subspace:
    """A subspace of Q^n held by its reduced row echelon basis."""

    __slots__ = ("n", "rows", "pivots", "_index")

    def __init__(self, n: int, vectors: Iterable[Vector] = ()):
        self.n = int(n)
        vs = list(vectors)
        for v in vs:
            if any(i < 0 or i >= self.n for i in v):
                raise DimensionMismatchError(f"vector outside ambient dimension {self.n}")
        self.rows, self.pivots = rref(vs)
        self._index = dict(zip(self.pivots, self.rows))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, [{i: Fraction(1)} for i in range(n)])

    @property
    def dim(self) -> int:
        return len(self.rows)

    def reduce(self, v: Vector) -> Vector:
        return _reduce(v, self._index)

    def contains(self, v: Vector) -> bool:
        return not self.reduce(v)

    def contains_space(self, other: "Subspace") -> bool:
        return all(self.contains(r) for r in other.rows)

    def coords(self, v: Vector) -> list[Fraction]:
        """Coordinates of ``v`` in the echelon basis; ``v`` must lie in the span."""
        if not self.contains(v):
            raise NotWellDefinedError("vector is not in the subspace", witness=v)
        return [v.get(p, Fraction(0)) for p in self.pivots]

    def combine(self, coefficients: Sequence) -> Vector:
        out: Vector = {}
        for c, row in zip(coefficients, self.rows):
            out = axpy(to_fraction(c), row, out)
        return out

    def __add__(self, other: "Subspace") -> "Subspace":
        if self.n != other.n:
            raise DimensionMismatchError("ambient dimension mismatch")
        return Subspace(self.n, self.rows + other.rows)

    def intersect(self, other: "Subspace") -> "Subspace":
        if self.n != other.n:
            raise DimensionMismatchError("ambient dimension mismatch")
        # sum_i a_i s_i = sum_j b_j o_j  <=>  [S | -O] (a, b) = 0
        cols = list(self.rows) + [scale(Fraction(-1), r) for r in other.rows]
        ker = kernel(SparseMatrix.from_columns(self.n, cols))
        k = self.dim
        return Subspace(self.n, [self.combine([c.get(i, 0) for i in range(k)]) for c in ker])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.n == other.n and self.rows == other.rows

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim} in Q^{self.n})"


def image_of(m: SparseMatrix, space: Subspace | None = None) -> Subspace:
    vecs = m.columns() if space is None else [m.apply(r) for r in space.rows]
    return Subspace(m.nrows, vecs)


def kernel_on(m: SparseMatrix, space: Subspace) -> Subspace:
    """Kernel of ``m`` restricted to ``space``."""
    if not space.dim:
        return Subspace(space.n)
    images = SparseMatrix.from_columns(m.nrows, [m.apply(r) for r in space.rows])
    ker = kernel(images)
    return Subspace(space.n, [space.combine([c.get(i, 0) for i in range(space.dim)]) for c in ker])


class Subquotient:
    """``Z / B`` for subspaces ``B <= Z <= Q^n`` with canonical representatives."""

    def __init__(self, n: int, z: Iterable[Vector] | Subspace, b: Iterable[Vector] | Subspace = ()):
        self.n = int(n)
        self.z = z if isinstance(z, Subspace) else Subspace(self.n, z)
        self.b = b if isinstance(b, Subspace) else Subspace(self.n, b)
        if self.z.n != self.n or self.b.n != self.n:
            raise DimensionMismatchError("ambient dimension mismatch in subquotient")
        for row in self.b.rows:
            if not self.z.contains(row):
                raise NotWellDefinedError("B is not contained in Z", witness=row)
        # complement of B inside Z, reduced modulo B
        reps, pivots = rref(self.b.reduce(r) for r in self.z.rows)
        self.reps = reps
        self.rep_pivots = pivots
        if len(reps) != self.z.dim - self.b.dim:
            raise NotWellDefinedError("inconsistent subquotient dimensions")

    @property
    def dim(self) -> int:
        return len(self.reps)

    def coords(self, v: Vector) -> list[Fraction]:
        if not self.z.contains(v):
            raise NotWellDefinedError("vector is not a cycle of this subquotient", witness=v)
        r = self.b.reduce(v)
        return [r.get(p, Fraction(0)) for p in self.rep_pivots]

    def is_zero_class(self, v: Vector) -> bool:
        return self.b.contains(v)

    def __repr__(self) -> str:
        return f"Subquotient(dim={self.dim}; Z={self.z.dim}, B={self.b.dim} in Q^{self.n})"


def subquotient_induced_map(f: SparseMatrix, src: Subquotient, dst: Subquotient) -> SparseMatrix:
    """Matrix of the map ``src -> dst`` induced by ``f``.

    Raises NotWellDefinedError (carrying the offending source vector) when f
    sends a cycle outside Z_dst or a boundary outside B_dst.
    """
    if f.ncols != src.n or f.nrows != dst.n:
        raise DimensionMismatchError(f"map of shape {f.shape} does not fit {src.n} -> {dst.n}")
    for row in src.b.rows:
        if not dst.b.contains(f.apply(row)):
            raise NotWellDefinedError("map does not send boundaries to boundaries", witness=row)
    cols = []
    for rep in src.reps:
        w = f.apply(rep)
        if not dst.z.contains(w):
            raise NotWellDefinedError("map does not send cycles to cycles", witness=rep)
        cols.append(vec(dst.coords(w)))
    return SparseMatrix.from_columns(dst.dim, cols)
