"""Finite-dimensional models of de Rham complexes.

Two kinds are supported:

* ``lie_algebra``: left-invariant forms on a Lie group, i.e. the
  Chevalley-Eilenberg complex. ``d e^i = sum_{j<k} c^i_{jk} e^j ^ e^k``.
* ``torus``: forms ``chi_k dx^I`` on the n-torus with frequency vectors ``k``
  confined to a box window. Characters satisfy ``d chi_k = sum_j k_j chi_k dx^j``
  (the factor 2*pi*i is dropped so everything stays rational).

Generator indices are 1-based throughout, matching ``dx^1 .. dx^n``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import cached_property
from importlib import resources
from itertools import combinations, product
from typing import Iterable, Mapping

from .errors import ModelValidationError, SchemaError, WindowOverflowError
from .linalg import SparseMatrix, Subspace, frac_str, kernel_on, parse_frac, rank

LIE = "lie_algebra"
TORUS = "torus"

BUNDLED = ("abelian3", "heisenberg3", "heisenberg5", "torus1", "torus2", "torus3")


def merge_indices(a: tuple, b: tuple) -> tuple[int, tuple] | None:
    """Sign and sorted index tuple of ``dx^a ^ dx^b``; None if they overlap."""
    if set(a) & set(b):
        return None
    inversions = sum(1 for i in a for j in b if i > j)
    return (-1 if inversions % 2 else 1), tuple(sorted(a + b))


class Model:
    """A validated finite-dimensional differential graded algebra."""

    def __init__(self, kind: str, dim: int, structure: Mapping | None = None, window: Iterable | None = None):
        if kind not in (LIE, TORUS):
            raise SchemaError(f"unknown model kind {kind!r}")
        if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
            raise SchemaError("dim must be a positive integer")
        self.kind = kind
        self.dim = dim
        self.structure: dict[tuple[int, int, int], Fraction] = {}
        self.window: tuple[tuple[int, int], ...] = ()
        if kind == LIE:
            if window:
                raise SchemaError("lie_algebra models take no window")
            for (t, j, k), c in (structure or {}).items():
                if not (1 <= t <= dim and 1 <= j < k <= dim):
                    raise SchemaError(f"structure constant index ({t},{j},{k}) invalid; need j<k in 1..{dim}")
                c = Fraction(c)
                if c:
                    self.structure[(t, j, k)] = self.structure.get((t, j, k), 0) + c
            self.structure = {key: c for key, c in sorted(self.structure.items()) if c}
        else:
            if structure:
                raise SchemaError("torus models take no structure constants")
            win = [tuple(w) for w in (window or [])]
            if len(win) != dim:
                raise SchemaError(f"window must list {dim} intervals")
            for lo, hi in win:
                if not all(isinstance(x, int) and not isinstance(x, bool) for x in (lo, hi)) or lo > hi:
                    raise SchemaError(f"bad window interval {[lo, hi]}")
                if not lo <= 0 <= hi:
                    raise ModelValidationError(f"window interval {[lo, hi]} does not contain 0", witness=[lo, hi])
            self.window = tuple(win)
        self._validate()

    # -- basis ---------------------------------------------------------------

    @cached_property
    def modes(self) -> list[tuple[int, ...]]:
        if self.kind == LIE:
            return [(0,) * self.dim]
        return [tuple(k) for k in product(*(range(lo, hi + 1) for lo, hi in self.window))]

    @cached_property
    def basis(self) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
        """Basis monomials ``(freq, idx)`` ordered by degree, then frequency, then indices."""
        out = []
        for deg in range(self.dim + 1):
            subsets = list(combinations(range(1, self.dim + 1), deg))
            for k in self.modes:
                for idx in subsets:
                    out.append((k, idx))
        return out

    @cached_property
    def index(self) -> dict:
        return {m: i for i, m in enumerate(self.basis)}

    @property
    def size(self) -> int:
        return len(self.basis)

    @cached_property
    def degrees(self) -> list[int]:
        return [len(idx) for _, idx in self.basis]

    @cached_property
    def degree_ranges(self) -> dict[int, range]:
        out = {}
        start = 0
        for deg in range(self.dim + 1):
            n = sum(1 for d in self.degrees if d == deg)
            out[deg] = range(start, start + n)
            start += n
        return out

    def degree_space(self, deg: int) -> Subspace:
        return Subspace(self.size, [{i: Fraction(1)} for i in self.degree_ranges.get(deg, range(0))])

    def in_window(self, freq) -> bool:
        if self.kind == LIE:
            return all(f == 0 for f in freq)
        return all(lo <= f <= hi for f, (lo, hi) in zip(freq, self.window))

    def check_window(self, freq) -> tuple[int, ...]:
        freq = tuple(freq)
        if len(freq) != self.dim:
            raise SchemaError(f"frequency {list(freq)} has wrong length for dimension {self.dim}")
        if not self.in_window(freq):
            raise WindowOverflowError(freq)
        return freq

    @property
    def zero_mode(self) -> tuple[int, ...]:
        return (0,) * self.dim

    # -- differential --------------------------------------------------------

    def differential_of(self, freq, idx) -> dict:
        """``d`` of one basis monomial as ``{(freq, idx): coeff}``."""
        out: dict = {}
        if self.kind == TORUS:
            for j in range(1, self.dim + 1):
                kj = freq[j - 1]
                if not kj:
                    continue
                merged = merge_indices((j,), idx)
                if merged is None:
                    continue
                s, new = merged
                out[(freq, new)] = out.get((freq, new), 0) + s * kj
        else:
            for p, i in enumerate(idx):
                sign = -1 if p % 2 else 1
                prefix, suffix = idx[:p], idx[p + 1:]
                for (t, j, k), c in self.structure.items():
                    if t != i:
                        continue
                    left = merge_indices(prefix, (j, k))
                    if left is None:
                        continue
                    right = merge_indices(left[1], suffix)
                    if right is None:
                        continue
                    key = (freq, right[1])
                    out[key] = out.get(key, 0) + sign * left[0] * right[0] * c
        return {m: c for m, c in out.items() if c}

    @cached_property
    def d(self) -> SparseMatrix:
        entries = {}
        for j, (freq, idx) in enumerate(self.basis):
            for m, c in self.differential_of(freq, idx).items():
                entries[(self.index[m], j)] = c
        return SparseMatrix(self.size, self.size, entries)

    def _validate(self) -> None:
        dd = self.d @ self.d
        if dd.is_zero():
            return
        j = min(dd.entries(), key=lambda e: (e[1], e[0]))[1]
        freq, idx = self.basis[j]
        raise ModelValidationError(
            f"d^2 != 0 on basis monomial {list(idx)} (Jacobi identity fails)",
            witness={"freq": list(freq), "idx": list(idx)},
        )

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        if self.kind == LIE:
            return {
                "kind": LIE,
                "dim": self.dim,
                "structure": [
                    {"target": t, "j": j, "k": k, "coeff": frac_str(c)} for (t, j, k), c in self.structure.items()
                ],
            }
        return {"kind": TORUS, "dim": self.dim, "window": [list(w) for w in self.window]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Model):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(json.dumps(self.to_dict(), sort_keys=True))

    def __repr__(self) -> str:
        if self.kind == LIE:
            return f"Model(lie_algebra, dim={self.dim}, {len(self.structure)} structure constants)"
        return f"Model(torus, dim={self.dim}, window={[list(w) for w in self.window]})"


def build_lie_algebra_model(n: int, structure: Mapping | Iterable) -> Model:
    """Chevalley-Eilenberg model from ``{(target, j, k): coeff}`` with ``j < k``."""
    if not isinstance(structure, Mapping):
        structure = {(t, j, k): c for t, j, k, c in structure}
    return Model(LIE, n, structure=structure)


def build_torus_model(n: int, window: Iterable) -> Model:
    return Model(TORUS, n, window=window)


def model_from_dict(obj) -> Model:
    if not isinstance(obj, dict):
        raise SchemaError("model must be a JSON object")
    allowed = {"kind", "dim", "structure", "window"}
    unknown = set(obj) - allowed
    if unknown:
        raise SchemaError(f"unknown model keys: {sorted(unknown)}")
    for key in ("kind", "dim"):
        if key not in obj:
            raise SchemaError(f"model is missing {key!r}")
    structure = {}
    for item in obj.get("structure", []) or []:
        if not isinstance(item, dict) or set(item) != {"target", "j", "k", "coeff"}:
            raise SchemaError(f"structure entries need exactly target, j, k, coeff: {item!r}")
        t, j, k = item["target"], item["j"], item["k"]
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in (t, j, k)):
            raise SchemaError(f"structure indices must be integers: {item!r}")
        structure[(t, j, k)] = structure.get((t, j, k), 0) + parse_frac(item["coeff"])
    window = obj.get("window")
    if window is not None and (not isinstance(window, list) or any(not isinstance(w, list) or len(w) != 2 for w in window)):
        raise SchemaError("window must be a list of [lo, hi] pairs")
    return Model(obj["kind"], obj["dim"], structure=structure, window=window)


def load_model(path) -> Model:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from exc
    return model_from_dict(obj)


def bundled_model(name: str) -> Model:
    if name not in BUNDLED:
        raise SchemaError(f"no bundled model named {name!r}; choose from {BUNDLED}")
    text = resources.files("exohom.data.models").joinpath(f"{name}.json").read_text(encoding="utf-8")
    return model_from_dict(json.loads(text))


def full_homology(m: Model) -> list[int]:
    """Betti numbers of the whole complex, degree 0..n."""
    d = m.d
    out = []
    for deg in range(m.dim + 1):
        src = m.degree_space(deg)
        z = kernel_on(d, src).dim
        prev = m.degree_ranges.get(deg - 1, range(0))
        b = rank(d.submatrix(list(m.degree_ranges[deg]), list(prev))) if len(prev) else 0
        out.append(z - b)
    return out


def mode_homology(m: Model) -> dict[tuple[int, ...], list[int]]:
    """Per-frequency Betti numbers; d preserves frequency so the complex splits."""
    d = m.d
    out = {}
    for k in m.modes:
        dims = []
        for deg in range(m.dim + 1):
            cols = [i for i in m.degree_ranges[deg] if m.basis[i][0] == k]
            nxt = [i for i in m.degree_ranges.get(deg + 1, range(0)) if m.basis[i][0] == k]
            prv = [i for i in m.degree_ranges.get(deg - 1, range(0)) if m.basis[i][0] == k]
            r_out = rank(d.submatrix(nxt, cols)) if nxt and cols else 0
            r_in = rank(d.submatrix(cols, prv)) if prv and cols else 0
            dims.append(len(cols) - r_out - r_in)
        out[k] = dims
    return out
