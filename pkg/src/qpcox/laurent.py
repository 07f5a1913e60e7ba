"""Exact arithmetic in the ring of integer Laurent polynomials in v.

A polynomial is stored sparsely as a map from integer exponent to nonzero
integer coefficient; the zero polynomial is the empty map.  Coefficients are
plain Python ints, so they are arbitrary precision and cannot overflow
silently.  Values are immutable after construction and safe to share.

>>> p = V - V**-1
>>> print(p * (V + V**-1))
-v^-2 + v^2
>>> print(p.bar())
v^-1 - v
"""

from __future__ import annotations

from typing import Iterable

from .errors import SkewViolation


class LaurentPoly:
    __slots__ = ("terms", "_hash")

    def __init__(self, terms: dict[int, int] | None = None):
        t = {}
        if terms:
            for e, c in terms.items():
                if c:
                    t[e] = c
        self.terms = t
        self._hash = None

    @classmethod
    def const(cls, c: int) -> "LaurentPoly":
        return cls({0: c})

    @classmethod
    def monomial(cls, c: int, e: int) -> "LaurentPoly":
        return cls({e: c})

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> "LaurentPoly":
        t: dict[int, int] = {}
        for e, c in pairs:
            t[e] = t.get(e, 0) + c
        return cls(t)

    def to_pairs(self) -> list[list[int]]:
        """Serialize as [exponent, coefficient] pairs with strictly increasing exponents."""
        return [[e, self.terms[e]] for e in sorted(self.terms)]

    # -- queries ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def coeff(self, e: int) -> int:
        return self.terms.get(e, 0)

    @property
    def constant_term(self) -> int:
        return self.terms.get(0, 0)

    def min_exp(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no degree bounds")
        return min(self.terms)

    def max_exp(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no degree bounds")
        return max(self.terms)

    def in_v_inv(self, strict: bool = True) -> bool:
        """True if supported on negative exponents (non-positive when strict=False)."""
        bound = 0 if strict else 1
        return all(e < bound for e in self.terms)

    # -- ring operations --------------------------------------------------

    @staticmethod
    def _coerce(other) -> "LaurentPoly | None":
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, int):
            return LaurentPoly({0: other})
        return None

    def __add__(self, other) -> "LaurentPoly":
        q = self._coerce(other)
        if q is None:
            return NotImplemented
        t = dict(self.terms)
        for e, c in q.terms.items():
            s = t.get(e, 0) + c
            if s:
                t[e] = s
            else:
                t.pop(e, None)
        return LaurentPoly(t)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "LaurentPoly":
        q = self._coerce(other)
        if q is None:
            return NotImplemented
        return self + (-q)

    def __rsub__(self, other) -> "LaurentPoly":
        q = self._coerce(other)
        if q is None:
            return NotImplemented
        return q + (-self)

    def __mul__(self, other) -> "LaurentPoly":
        q = self._coerce(other)
        if q is None:
            return NotImplemented
        t: dict[int, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in q.terms.items():
                e = e1 + e2
                s = t.get(e, 0) + c1 * c2
                if s:
                    t[e] = s
                else:
                    t.pop(e, None)
        return LaurentPoly(t)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPoly":
        if not isinstance(n, int):
            raise TypeError("exponent must be an int")
        if n < 0:
            # negative powers exist only for the units +-v^k
            if len(self.terms) == 1:
                ((e, c),) = self.terms.items()
                if c in (1, -1):
                    return LaurentPoly({e * n: c if n % 2 else 1})
            raise ValueError(f"{self} is not invertible in Z[v, v^-1]")
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by v^k."""
        return LaurentPoly({e + k: c for e, c in self.terms.items()})

    def bar(self) -> "LaurentPoly":
        """The ring involution v -> v^-1: every exponent is negated."""
        return LaurentPoly({-e: c for e, c in self.terms.items()})

    def neg_part(self) -> "LaurentPoly":
        """The strictly-negative-exponent part."""
        return LaurentPoly({e: c for e, c in self.terms.items() if e < 0})

    # -- equality / hashing / display --------------------------------------

    def __eq__(self, other) -> bool:
        q = self._coerce(other)
        if q is None:
            return NotImplemented
        return self.terms == q.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(sorted(self.terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"LaurentPoly({self.terms!r})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for e in sorted(self.terms):
            c = self.terms[e]
            if e == 0:
                body = str(abs(c))
            else:
                va = "v" if e == 1 else f"v^{e}"
                body = va if abs(c) == 1 else f"{abs(c)}{va}"
            if not bits:
                bits.append(body if c > 0 else f"-{body}")
            else:
                bits.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(bits)


ZERO = LaurentPoly()
ONE = LaurentPoly({0: 1})
V = LaurentPoly({1: 1})
VINV = LaurentPoly({-1: 1})


def v_power(k: int) -> LaurentPoly:
    return LaurentPoly({k: 1})


def solve_skew(g: LaurentPoly) -> LaurentPoly:
    """Solve m - bar(m) = g for the unique m supported on negative exponents.

    Requires bar(g) = -g (which forces the constant term of g to vanish); the
    solution is the strictly-negative-exponent part of g.

    >>> print(solve_skew(V - VINV))
    -v^-1
    """
    if g.bar() != -g:
        raise SkewViolation(
            f"not skew under bar (need bar(g) = -g with zero constant term): {g}"
        )
    return g.neg_part()


def canonical_columns(
    bar_col: list[dict[int, LaurentPoly]],
) -> tuple[dict[tuple[int, int], LaurentPoly], dict[tuple[int, int], int]]:
    """Triangular solve producing a bar-invariant basis from a bar matrix.

    ``bar_col[j]`` expands the bar of the j-th standard basis vector over
    positions i <= j, with coefficient 1 at j itself (positions are assumed to
    be listed in a linear extension of the underlying order).  Returns the
    unique coefficients p[i, j] with p[j, j] = 1 and p[i, j] in v^-1.Z[v^-1]
    for i < j making the new basis bar-invariant, together with the map
    mu[i, j] = coefficient of v^-1 in p[i, j].

    Raises SkewViolation if no such basis exists for the supplied bar data.
    """
    n = len(bar_col)
    p: dict[tuple[int, int], LaurentPoly] = {}
    mu: dict[tuple[int, int], int] = {}
    for j in range(n):
        r = bar_col[j]
        if r.get(j, ZERO) != ONE:
            raise SkewViolation(f"bar matrix is not unitriangular at position {j}")
        col: dict[int, LaurentPoly] = {j: ONE}
        for i in range(j - 1, -1, -1):
            g = ZERO
            for z, c in col.items():
                rz = bar_col[z].get(i)
                if rz is not None:
                    g = g + c.bar() * rz
            if g.is_zero():
                continue
            m = solve_skew(g)
            if m:
                col[i] = m
                m1 = m.coeff(-1)
                if m1:
                    mu[(i, j)] = m1
        for i, c in col.items():
            p[(i, j)] = c
    return p, mu
