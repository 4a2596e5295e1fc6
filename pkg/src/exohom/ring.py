"""Z2-graded supercommutative coefficient rings.

The ring is a Grassmann algebra on odd generators tensored with a polynomial
algebra on even generators, truncated above a total polynomial degree. The
truncation is a quotient by an ideal, so the result is still an honest
associative supercommutative ring and a finite-dimensional Q-space.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import SchemaError, UnsupportedCoefficientError
from .linalg import frac_str, parse_frac, to_fraction

# (sorted odd generator indices, exponent vector of even generators)
Monomial = tuple


@dataclass(frozen=True)
class RingDescriptor:
    odd: tuple[str, ...]
    even: tuple[str, ...]
    cutoff: int

    def __post_init__(self):
        names = self.odd + self.even
        if len(set(names)) != len(names):
            raise SchemaError(f"duplicate generator names in {names}")
        if not isinstance(self.cutoff, int) or self.cutoff < 0:
            raise SchemaError("ring cutoff must be a nonnegative integer")

    @property
    def unit(self) -> Monomial:
        return ((), (0,) * len(self.even))

    def gen_monomial(self, name: str) -> Monomial:
        if name in self.odd:
            return ((self.odd.index(name),), (0,) * len(self.even))
        if name in self.even:
            exps = [0] * len(self.even)
            exps[self.even.index(name)] = 1
            if self.cutoff < 1:
                raise SchemaError(f"cutoff {self.cutoff} kills generator {name}")
            return ((), tuple(exps))
        raise KeyError(name)

    def mul(self, a: Monomial, b: Monomial) -> tuple[int, Monomial] | None:
        """Product of two monomials as (sign, monomial), or None if it vanishes."""
        oa, ea = a
        ob, eb = b
        if set(oa) & set(ob):
            return None
        exps = tuple(x + y for x, y in zip(ea, eb))
        if sum(exps) > self.cutoff:
            return None
        # sign of the shuffle bringing oa + ob into increasing order
        inversions = sum(1 for i in oa for j in ob if i > j)
        return (-1 if inversions % 2 else 1), (tuple(sorted(oa + ob)), exps)

    def monomials(self) -> list[Monomial]:
        """All nonzero monomials, ordered by (odd subset, exponents)."""
        from itertools import combinations, product

        odd_sets = [c for k in range(len(self.odd) + 1) for c in combinations(range(len(self.odd)), k)]
        exps = [e for e in product(range(self.cutoff + 1), repeat=len(self.even)) if sum(e) <= self.cutoff]
        return [(o, e) for o in odd_sets for e in sorted(exps)]

    def name_of(self, mono: Monomial) -> str:
        odd, exps = mono
        parts = [self.odd[i] for i in odd]
        for name, k in zip(self.even, exps):
            if k == 1:
                parts.append(name)
            elif k > 1:
                parts.append(f"{name}^{k}")
        return "*".join(parts) or "1"

    def to_json(self) -> dict:
        return {"odd": list(self.odd), "even": list(self.even), "cutoff": self.cutoff}


def monomial_parity(mono: Monomial) -> int:
    return len(mono[0]) % 2


def monomial_to_json(mono: Monomial) -> dict:
    return {"odd": list(mono[0]), "even": list(mono[1])}


def monomial_from_json(ring: RingDescriptor, obj) -> Monomial:
    if not isinstance(obj, dict) or set(obj) != {"odd", "even"}:
        raise SchemaError(f"ring monomial must have exactly keys odd, even: {obj!r}")
    odd = obj["odd"]
    even = obj["even"]
    if sorted(set(odd)) != list(odd) or any(not 0 <= i < len(ring.odd) for i in odd):
        raise SchemaError(f"odd indices must be strictly increasing and in range: {odd!r}")
    if len(even) != len(ring.even) or any((not isinstance(k, int)) or k < 0 for k in even):
        raise SchemaError(f"bad even exponent vector {even!r}")
    if sum(even) > ring.cutoff:
        raise SchemaError(f"monomial exceeds cutoff {ring.cutoff}")
    return (tuple(odd), tuple(even))


class GradedRingElement:
    """Element of a truncated Grassmann-polynomial ring over Q."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: RingDescriptor, terms: Mapping[Monomial, Fraction] | None = None):
        self.ring = ring
        clean = {}
        for mono, c in (terms or {}).items():
            c = to_fraction(c)
            if c and sum(mono[1]) <= ring.cutoff:
                clean[mono] = c
        self.terms = clean

    @classmethod
    def gen(cls, ring: RingDescriptor, name: str) -> "GradedRingElement":
        return cls(ring, {ring.gen_monomial(name): 1})

    @classmethod
    def scalar(cls, ring: RingDescriptor, c) -> "GradedRingElement":
        return cls(ring, {ring.unit: c})

    def _coerce(self, other) -> "GradedRingElement":
        if isinstance(other, GradedRingElement):
            if other.ring != self.ring:
                raise UnsupportedCoefficientError("elements of different rings")
            return other
        return GradedRingElement.scalar(self.ring, to_fraction(other))

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, 0) + c
        return GradedRingElement(self.ring, terms)

    __radd__ = __add__

    def __neg__(self):
        return GradedRingElement(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        terms: dict = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                prod = self.ring.mul(ma, mb)
                if prod is None:
                    continue
                sign, m = prod
                terms[m] = terms.get(m, 0) + sign * ca * cb
        return GradedRingElement(self.ring, terms)

    def __rmul__(self, other):
        return self._coerce(other) * self

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = GradedRingElement.scalar(self.ring, other)
        if not isinstance(other, GradedRingElement):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def parity(self) -> int | None:
        """0 or 1 for homogeneous elements (zero counts as even), else None."""
        ps = {monomial_parity(m) for m in self.terms}
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def to_json(self) -> list:
        return [
            {"coeff": frac_str(c), "monomial": monomial_to_json(m)}
            for m, c in sorted(self.terms.items())
        ]

    @classmethod
    def from_json(cls, ring: RingDescriptor, obj) -> "GradedRingElement":
        terms: dict = {}
        for item in obj:
            if set(item) != {"coeff", "monomial"}:
                raise SchemaError(f"bad ring term {item!r}")
            m = monomial_from_json(ring, item["monomial"])
            terms[m] = terms.get(m, 0) + parse_frac(item["coeff"])
        return cls(ring, terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{frac_str(c)}*{self.ring.name_of(m)}" for m, c in sorted(self.terms.items()))


def coefficient_parity(c) -> int:
    """Parity of a Form/operator coefficient: rationals are even."""
    if isinstance(c, GradedRingElement):
        p = c.parity
        if p is None:
            raise UnsupportedCoefficientError(f"inhomogeneous ring coefficient {c!r}")
        return p
    return 0
