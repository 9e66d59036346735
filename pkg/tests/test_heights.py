import math
import random
from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from torusheight.heights import (
    AlgNumber,
    Approx,
    Exact,
    Ordering,
    algebraic_height,
    algebraic_height_report,
    compare,
    height_affine,
    height_l2,
    height_sup,
    local_logs,
    matrix_height,
    multinomial_valuation_bound,
    orthogonal_complement,
    poly_height,
    subspace_height,
)
from torusheight.lattice import RatMatrix

nonzero_q = st.fractions(min_value=-50, max_value=50, max_denominator=40).filter(lambda x: x != 0)


def _le(a, b):
    return compare(a, b) in (Ordering.LT, Ordering.EQ)


def test_exact_canonical_form():
    assert Exact.log(25).scale(Fraction(1, 2)) == Exact.log(5)
    assert Exact.log(Fraction(1, 9)) == Exact(-2, 3)
    assert Exact.log(1) == Exact.zero()


def test_height_l2_examples():
    assert height_l2([1, 0, 0]) == Exact.zero()
    assert height_l2([3, 4]) == Exact.log(5)
    assert height_l2([1, Fraction(1, 2)]) == height_l2([2, 1]) == Exact(Fraction(1, 2), 5)


def test_height_l2_zero_vector():
    with pytest.raises(ValueError):
        height_l2([0, 0])


def test_height_sup_examples():
    assert height_sup([1, 1, 1]) == Exact.zero()
    assert height_sup([2, 3]) == Exact.log(3)
    assert height_sup([4, 9]) == height_sup([2, 3]).scale(2)
    with pytest.raises(ValueError):
        height_sup([0, 1])


def test_matrix_height_examples():
    assert matrix_height(RatMatrix.identity(2), 2) == Exact.zero()
    assert matrix_height(RatMatrix.from_rows([[3, 4]]), 1) == Exact.log(5)
    a = RatMatrix.from_rows([[2, 0], [0, 2]])
    assert matrix_height(a, 2) == Exact.zero() == subspace_height(a)
    with pytest.raises(ValueError):
        matrix_height(RatMatrix.from_rows([[1, 2], [2, 4]]), 2)


def test_subspace_height_examples():
    assert subspace_height(RatMatrix.identity(3)) == Exact.zero()
    v = RatMatrix.from_columns([(1, -1, 0), (0, 1, -1)], 3)
    assert subspace_height(v) == Exact(Fraction(1, 2), 3)
    with pytest.raises(ValueError):
        subspace_height(RatMatrix.from_columns([(1, 1, 0), (2, 2, 0)], 3))


def _poly_height_oracle(poly, digits=100):
    """Place-by-place evaluation of the height of the weighted coefficient vector."""
    mpmath.mp.dps = digits
    try:
        items = [(k, Fraction(c), math.factorial(sum(k)) // math.prod(math.factorial(e) for e in k)) for k, c in poly.items()]
        total = mpmath.log(mpmath.sqrt(sum(mpmath.mpf(c.numerator) ** 2 / c.denominator**2 / w for _, c, w in items)))
        primes = set()
        for _, c, w in items:
            primes |= set(sympy.factorint(abs(c.numerator))) | set(sympy.factorint(c.denominator)) | set(sympy.factorint(w))
        for p in primes:
            # |c / sqrt(w)|_p = p^(-v_p(c) + v_p(w)/2)
            best = max(
                -(sympy.multiplicity(p, abs(c.numerator)) - sympy.multiplicity(p, c.denominator))
                + mpmath.mpf(sympy.multiplicity(p, w)) / 2
                for _, c, w in items
            )
            total += best * mpmath.log(p)
        return total
    finally:
        mpmath.mp.dps = 15


@pytest.mark.parametrize(
    "poly,expected",
    [
        ({(2, 0): 7}, Exact.zero()),
        ({(1, 0): 1, (0, 1): 1}, Exact(Fraction(1, 2), 2)),
        ({(2, 0): 1, (1, 1): 1}, None),
        ({(3, 0): 2, (1, 2): Fraction(3, 5), (0, 3): -1}, None),
        ({(2, 0, 0): 1, (0, 1, 1): 6, (1, 0, 1): 4}, None),
    ],
)
def test_poly_height_against_oracle(poly, expected):
    h = poly_height(poly)
    if expected is not None:
        assert h == expected
    oracle = _poly_height_oracle(poly)
    with mpmath.workdps(100):
        assert abs(h.to_mpf(330) - oracle) < mpmath.mpf(10) ** -95


def test_poly_height_rejects_zero():
    with pytest.raises(ValueError):
        poly_height({(1, 0): 0})


@settings(max_examples=200, deadline=None)
@given(nonzero_q)
def test_product_formula(x):
    total = Exact.zero()
    for _, v in local_logs(x):
        total = total + v
    assert total == Exact.zero()


@settings(max_examples=200, deadline=None)
@given(st.lists(nonzero_q, min_size=1, max_size=4), st.integers(1, 5))
def test_sup_height_comparisons(p, k):
    n = len(p)
    hs, h = height_sup(p), height_affine(p)
    assert _le(hs, h)
    assert _le(h, Exact(Fraction(1, 2), n + 1) + hs)
    assert height_sup([x**k for x in p]) == hs.scale(k)
    coords = [height_sup([x]) for x in p]
    assert all(_le(c, hs) for c in coords)
    total = Exact.zero()
    for c in coords:
        total = total + c
    assert _le(hs, total)


@settings(max_examples=100, deadline=None)
@given(st.lists(nonzero_q, min_size=3, max_size=3), st.lists(st.integers(-4, 4), min_size=3, max_size=3))
def test_sup_height_of_monomial(p, u):
    value = math.prod((x**e for x, e in zip(p, u)), start=Fraction(1))
    bound = height_sup(p).scale(len(p) * max(abs(e) for e in u))
    assert _le(height_sup([value]), bound)


@settings(max_examples=60, deadline=None)
@given(nonzero_q, st.lists(nonzero_q, min_size=3, max_size=3))
def test_scaling_invariance(lam, p):
    assert height_l2(p) == height_l2([lam * x for x in p])
    v = RatMatrix.from_columns([p, (1, 0, 2)], 3) if RatMatrix.from_columns([p, (1, 0, 2)], 3).rank() == 2 else None
    if v is not None:
        w = RatMatrix.from_columns([[lam * x for x in p], [a + lam * b for a, b in zip((1, 0, 2), p)]], 3)
        assert subspace_height(v) == subspace_height(w)


def _random_rat_matrix(rng, m, n):
    return RatMatrix.from_rows([[Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(n)] for _ in range(m)])


def test_matrix_height_subadditive():
    rng = random.Random(3)
    checked = 0
    while checked < 40:
        a, b = _random_rat_matrix(rng, 2, 3), _random_rat_matrix(rng, 3, 3)
        t = 2
        ab = a @ b
        if ab.rank() < t:
            continue
        lhs, rhs = matrix_height(ab, t), matrix_height(a, t) + matrix_height(b, t)
        assert _le(lhs, rhs)
        assert lhs.to_mpf(256) <= rhs.to_mpf(256) + mpmath.mpf(2) ** -200
        checked += 1


def test_orthogonal_complement_height():
    rng = random.Random(11)
    done = 0
    while done < 20:
        v = RatMatrix.from_columns([[rng.randint(-5, 5) for _ in range(4)] for _ in range(2)], 4)
        if v.rank() < 2:
            continue
        assert subspace_height(v) == subspace_height(orthogonal_complement(v))
        done += 1


def test_multinomial_examples():
    for p in (2, 3, 5):
        assert multinomial_valuation_bound(1, (1, 0), p).valuation == 0
    r = multinomial_valuation_bound(4, (2, 2), 2)
    assert r.valuation == 1 and r.holds


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 7), min_size=2, max_size=4), st.sampled_from([2, 3, 5, 7, 11, 13, 17, 19]))
def test_multinomial_valuation_property(alpha, p):
    k = sum(alpha)
    if k == 0:
        return
    value = math.factorial(k) // math.prod(math.factorial(a) for a in alpha)
    r = multinomial_valuation_bound(k, alpha, p)
    assert r.valuation == sympy.multiplicity(p, value)
    assert r.holds
    if p <= k:
        assert -r.valuation >= -len(alpha) * math.log(k) / math.log(p) - 1e-12


def _contains(h, x):
    assert isinstance(h, Approx)
    return abs(h.value - x) <= h.abs_err


def test_algebraic_rational_root():
    assert algebraic_height(AlgNumber((1, -2), 0)) == Exact.log(2)


def test_algebraic_sqrt2():
    h = algebraic_height(AlgNumber((1, 0, -2), 1))
    with mpmath.workprec(512):
        assert _contains(h, mpmath.log(2) / 2)
    assert h.abs_err <= mpmath.mpf(2) ** -60


def test_algebraic_golden_ratio():
    h = algebraic_height(AlgNumber((1, -1, -1), 1))
    with mpmath.workprec(512):
        assert _contains(h, mpmath.log((1 + mpmath.sqrt(5)) / 2) / 2)
    assert abs(float(h.value) - 0.2406059125298017) < 1e-15


def test_algebraic_non_minimal_split_and_bracket():
    # (x^2 - 2)(x - 3): the root sqrt2 has height log(2)/2
    coeffs = (1, -3, -2, 6)
    rep = algebraic_height_report(AlgNumber(coeffs, 1, None))
    assert rep.minimal and rep.minimal_poly == (1, 0, -2)
    # (x^2 - 2)(x^2 - 3) has no rational root; without splitting we get a bracket
    coeffs = (1, 0, -5, 0, 6)
    rep = algebraic_height_report(AlgNumber(coeffs, 0, None), split=False)
    assert not rep.minimal and rep.height.note == "non-minimal"
    with mpmath.workprec(512):
        assert _contains(rep.height, mpmath.log(2) / 2)
        assert _contains(rep.height, mpmath.log(3) / 2)


def test_algebraic_rejects_non_squarefree():
    with pytest.raises(ValueError):
        algebraic_height(AlgNumber((1, -2, 1), 0))


def test_compare_orders():
    assert compare(Exact.log(2), Exact.log(3)) is Ordering.LT
    assert compare(Exact.log(4), Exact.log(2).scale(2)) is Ordering.EQ
    h = algebraic_height(AlgNumber((1, -1, -1), 0))
    assert compare(h, Exact.log(2)) is Ordering.LT
    assert compare(h, h) is Ordering.INCONCLUSIVE
