import random

import pytest

from qpcox.errors import SkewViolation
from qpcox.laurent import (
    LaurentPoly,
    ONE,
    V,
    VINV,
    ZERO,
    canonical_columns,
    solve_skew,
    v_power,
)


# ---------------------------------------------------------------------------
# Dense-array oracle: coefficients on the fixed window [-60, 60], written
# independently of the sparse implementation.

LO, HI = -60, 60


def dense(p: LaurentPoly) -> list[int]:
    a = [0] * (HI - LO + 1)
    for e, c in p.terms.items():
        a[e - LO] = c
    return a


def dense_add(a, b):
    return [x + y for x, y in zip(a, b)]


def dense_mul(a, b):
    out = [0] * (HI - LO + 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            if not y:
                continue
            k = (i + LO) + (j + LO)  # exponent of the product term
            if LO <= k <= HI:
                out[k - LO] += x * y
    return out


def dense_bar(a):
    out = [0] * (HI - LO + 1)
    for i, x in enumerate(a):
        out[(HI - LO) - i] = x  # exponent e -> -e on a symmetric window
    return out


def random_poly(rng, span=20, nterms=6, cmax=9):
    t = {}
    for _ in range(rng.randrange(nterms + 1)):
        t[rng.randrange(-span, span + 1)] = rng.randrange(-cmax, cmax + 1)
    return LaurentPoly(t)


def test_arith_matches_dense_oracle():
    rng = random.Random(20240901)
    for _ in range(300):
        p = random_poly(rng)
        q = random_poly(rng)
        assert dense(p + q) == dense_add(dense(p), dense(q))
        assert dense(p - q) == dense_add(dense(p), [-y for y in dense(q)])
        assert dense(p * q) == dense_mul(dense(p), dense(q))
        assert dense(p.bar()) == dense_bar(dense(p))


def test_examples():
    assert (V - VINV) * (V + VINV) == v_power(2) - v_power(-2)
    p = LaurentPoly({3: 2, 0: -1})
    assert p + ZERO == p
    assert VINV * V == ONE
    assert V + 2 * v_power(-3) == LaurentPoly({1: 1, -3: 2})
    assert (V + 2 * v_power(-3)).bar() == VINV + 2 * v_power(3)
    assert LaurentPoly.const(7).bar() == LaurentPoly.const(7)
    q = 3 * v_power(2) - V
    assert q.bar().bar() == q


def test_bar_is_ring_automorphism():
    rng = random.Random(7)
    for _ in range(200):
        p = random_poly(rng)
        q = random_poly(rng)
        assert (p * q).bar() == p.bar() * q.bar()
        assert (p + q).bar() == p.bar() + q.bar()


def test_int_coercion_and_pow():
    assert 1 + V - 1 == V
    assert (V + VINV) ** 2 == v_power(2) + 2 + v_power(-2)
    assert (-V) ** -3 == -v_power(-3)
    assert V ** -4 == v_power(-4)
    with pytest.raises(ValueError):
        (V + ONE) ** -1


def test_solve_skew_examples():
    assert solve_skew(V - VINV) == -VINV
    assert solve_skew(ZERO) == ZERO
    assert solve_skew(2 * v_power(3) - 2 * v_power(-3)) == -2 * v_power(-3)


def test_solve_skew_roundtrip():
    rng = random.Random(99)
    for _ in range(200):
        m = LaurentPoly(
            {-rng.randrange(1, 15): rng.randrange(-9, 10) for _ in range(rng.randrange(5))}
        )
        assert solve_skew(m - m.bar()) == m


def test_solve_skew_rejects_bad_input():
    with pytest.raises(SkewViolation):
        solve_skew(ONE)  # nonzero constant term
    with pytest.raises(SkewViolation):
        solve_skew(V + VINV)  # symmetric, not skew


def test_serialization_pairs():
    p = LaurentPoly({2: 5, -1: -3})
    assert p.to_pairs() == [[-1, -3], [2, 5]]
    assert LaurentPoly.from_pairs(p.to_pairs()) == p
    assert LaurentPoly.from_pairs([]) == ZERO


def test_str():
    assert str(ZERO) == "0"
    assert str(V - 2 * VINV) == "-2v^-1 + v"
    assert str(LaurentPoly.const(-1)) == "-1"


def test_canonical_columns_smallest_cases():
    # two positions with bar(M1) = M1 + (v^-1 - v) M0, the rank-one parabolic
    # picture: the unique correction in v^-1.Z[v^-1] is p[0,1] = v^-1
    bar_col = [{0: ONE}, {0: VINV - V, 1: ONE}]
    p, mu = canonical_columns(bar_col)
    assert p[(0, 0)] == ONE and p[(1, 1)] == ONE
    assert p[(0, 1)] == VINV
    assert mu == {(0, 1): 1}


def test_canonical_columns_rejects_inconsistent_bar():
    # a "bar" fixing nothing cannot be corrected: g fails skewness
    bar_col = [{0: ONE}, {0: V, 1: ONE}]
    with pytest.raises(SkewViolation):
        canonical_columns(bar_col)
