"""Brute-force dense reference computations over Q.

Shares no code with the package: basis enumeration, sign rules and every
operator are rebuilt here from the raw model description, and all ranks come
from sympy on dense matrices.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product

import sympy


def perm_sign(seq) -> int:
    """Sign of the permutation sorting ``seq`` (entries distinct)."""
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


class DenseModel:
    """Forms ``chi_k e^I`` on a torus window, or ``e^I`` on a Lie algebra."""

    def __init__(self, n: int, structure=None, window=None):
        self.n = n
        self.structure = {k: Fraction(v) for k, v in (structure or {}).items()}
        if window is None:
            self.freqs = [(0,) * n]
        else:
            self.freqs = list(product(*[range(lo, hi + 1) for lo, hi in window]))
        self.subsets = [s for k in range(n + 1) for s in combinations(range(1, n + 1), k)]
        self.basis = [(f, s) for f in self.freqs for s in self.subsets]
        self.pos = {b: i for i, b in enumerate(self.basis)}
        self.size = len(self.basis)

    def degree_indices(self, k: int) -> list[int]:
        return [i for i, (_, s) in enumerate(self.basis) if len(s) == k]

    def _put(self, col: dict, freq, seq, c) -> None:
        if len(set(seq)) < len(seq) or c == 0:
            return
        key = (tuple(freq), tuple(sorted(seq)))
        if key not in self.pos:
            raise KeyError(key)
        col[self.pos[key]] = col.get(self.pos[key], 0) + c * perm_sign(seq)

    def _matrix(self, fn) -> sympy.Matrix:
        m = sympy.zeros(self.size, self.size)
        for j, (f, s) in enumerate(self.basis):
            col: dict = {}
            fn(col, f, s)
            for i, c in col.items():
                m[i, j] += sympy.Rational(c.numerator, c.denominator) if isinstance(c, Fraction) else c
        return m

    def d(self) -> sympy.Matrix:
        def fn(col, f, s):
            for j in range(1, self.n + 1):
                if f[j - 1]:
                    self._put(col, f, (j,) + s, Fraction(f[j - 1]))
            # Leibniz on the generators: d(e^{i1}..e^{ip}) = sum (-1)^q e^{i1}..(d e^{iq})..
            for q, i in enumerate(s):
                for (t, a, b), c in self.structure.items():
                    if t == i:
                        seq = s[:q] + (a, b) + s[q + 1:]
                        self._put(col, f, seq, c * (-1) ** q)

        return self._matrix(fn)

    def wedge(self, terms) -> sympy.Matrix:
        """Left multiplication by ``sum c chi_g e^J`` given as ``[(c, g, J), ...]``."""

        def fn(col, f, s):
            for c, g, idx in terms:
                h = tuple(a + b for a, b in zip(f, g))
                if (h, ()) in self.pos:
                    self._put(col, h, tuple(idx) + s, Fraction(c))
                elif not set(idx) & set(s):
                    raise OverflowError(h)

        return self._matrix(fn)

    def contraction(self, components) -> sympy.Matrix:
        """Interior product with a constant vector field ``sum a_j d/dx^j``."""

        def fn(col, f, s):
            for j, a in enumerate(components, start=1):
                if a and j in s:
                    q = s.index(j)
                    col_seq = s[:q] + s[q + 1:]
                    key = (tuple(f), col_seq)
                    col[self.pos[key]] = col.get(self.pos[key], 0) + Fraction(a) * (-1) ** q

        return self._matrix(fn)


def sub(m: sympy.Matrix, rows, cols) -> sympy.Matrix:
    return m.extract(list(rows), list(cols)) if rows and cols else sympy.zeros(len(rows), len(cols))


def kernel_basis(m: sympy.Matrix, cols) -> sympy.Matrix:
    """Columns spanning the kernel of ``m`` restricted to coordinate subset ``cols``, embedded back."""
    vecs = sub(m, range(m.rows), cols).nullspace()
    out = sympy.zeros(m.cols, len(vecs))
    for k, v in enumerate(vecs):
        for a, i in enumerate(cols):
            out[i, k] = v[a]
    return out


def rank(m: sympy.Matrix) -> int:
    return 0 if 0 in m.shape else m.rank()


def cohomology_dims(dm: DenseModel, d: sympy.Matrix | None = None) -> list[int]:
    d = dm.d() if d is None else d
    out = []
    for k in range(dm.n + 1):
        cols = dm.degree_indices(k)
        prev = dm.degree_indices(k - 1) if k else []
        z = len(cols) - rank(sub(d, range(d.rows), cols))
        b = rank(sub(d, range(d.rows), prev))
        out.append(z - b)
    return out


def flat_dims(dm: DenseModel, omega: sympy.Matrix) -> list[int]:
    """Per-degree dimension of ``ker(Omega ^)``."""
    return [kernel_basis(omega, dm.degree_indices(k)).cols for k in range(dm.n + 1)]


def restricted_homology(dm: DenseModel, kill: sympy.Matrix, d: sympy.Matrix) -> list[int]:
    """Homology of ``d`` on ``T = ker(kill)``, degree by degree (both operators degree-homogeneous)."""
    bases = [kernel_basis(kill, dm.degree_indices(k)) for k in range(dm.n + 1)]
    out = []
    for k, t in enumerate(bases):
        z = t.cols - rank(d * t) if t.cols else 0
        b = rank(d * bases[k - 1]) if k and bases[k - 1].cols else 0
        out.append(z - b)
    return out


def total_subspace(kill: sympy.Matrix) -> sympy.Matrix:
    vecs = kill.nullspace()
    return sympy.Matrix.hstack(*vecs) if vecs else sympy.zeros(kill.cols, 0)


def perturbed_total(t: sympy.Matrix, d: sympy.Matrix, p: sympy.Matrix, value) -> int:
    """Total dimension of ``H(T, d + value P)``; T is assumed invariant."""
    if t.cols == 0:
        return 0
    op = d + sympy.Rational(value) * p
    image = op * t
    # coordinates of the image inside T, then dim ker - dim im = dim T - 2 rank
    return t.cols - 2 * rank(image)


def generic_total(t: sympy.Matrix, d: sympy.Matrix, p: sympy.Matrix) -> int:
    """dim T - 2 * rank over Q(lam) of ``d + lam P`` restricted to T."""
    lam = sympy.Symbol("lam")
    if t.cols == 0:
        return 0
    m = (d + lam * p) * t
    return t.cols - 2 * m.rank(simplify=True)


def cartan_dims(dm: DenseModel, components, cutoff: int) -> list[int]:
    """Cohomology of ``(ker L_X) (x) Q[a]/(a^{D+1})`` with ``d + a iota_X``, one field."""
    d = dm.d()
    c = dm.contraction(components)
    lie = d * c + c * d
    inv = total_subspace(lie)
    q = inv.cols
    # coordinates of d and iota_X inside the invariant subspace
    pinv = (inv.T * inv).inv() * inv.T
    dq = pinv * d * inv
    cq = pinv * c * inv
    assert d * inv == inv * dq and c * inv == inv * cq
    size = q * (cutoff + 1)
    big = sympy.zeros(size, size)
    for e in range(cutoff + 1):
        big[e * q:(e + 1) * q, e * q:(e + 1) * q] = dq
        if e < cutoff:
            big[(e + 1) * q:(e + 2) * q, e * q:(e + 1) * q] = cq
    assert (big * big).is_zero_matrix
    form_deg = []
    for k in range(q):
        nz = [i for i in range(inv.rows) if inv[i, k] != 0]
        form_deg.append(len(dm.basis[nz[0]][1]))
    degs = [2 * e + form_deg[k] for e in range(cutoff + 1) for k in range(q)]
    top = max(degs)
    out = []
    for g in range(top + 1):
        cols = [i for i, x in enumerate(degs) if x == g]
        prev = [i for i, x in enumerate(degs) if x == g - 1]
        z = len(cols) - rank(sub(big, range(size), cols))
        b = rank(sub(big, range(size), prev))
        out.append(z - b)
    return out
