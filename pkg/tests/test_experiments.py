import itertools
import random

import mpmath
import pytest
import sympy

from torusheight.experiments import (
    FOUR_PLANES,
    V0,
    QuadInt,
    _det,
    experiment_fourplanes,
    experiment_line,
    line_polynomial,
    plucker,
    plucker_pairing,
)
from torusheight.lattice import IntMatrix

SQRT2 = QuadInt(0, 1)


def test_quadint_ring():
    assert SQRT2 * SQRT2 == QuadInt(2)
    assert (QuadInt(1, 1) * QuadInt(1, -1)) == QuadInt(-1)
    assert 3 - QuadInt(1, 2) == QuadInt(2, -2)
    assert (QuadInt(1, 1) + 1).a == 2 and -QuadInt(1, 1) == QuadInt(-1, -1)
    assert str(QuadInt(1, -3)) == "1-3*sqrt2"
    rng = random.Random(0)
    for _ in range(50):
        a, b, c = (QuadInt(rng.randint(-9, 9), rng.randint(-9, 9)) for _ in range(3))
        assert a * (b + c) == a * b + a * c
        # norm is multiplicative
        nrm = lambda q: q.a * q.a - 2 * q.b * q.b
        assert nrm(a * b) == nrm(a) * nrm(b)


def test_det_matches_integer_determinant():
    rng = random.Random(1)
    for _ in range(20):
        rows = [[rng.randint(-5, 5) for _ in range(4)] for _ in range(4)]
        m = sympy.Matrix(rows)
        assert _det(rows) == m.det()


def test_four_planes_exact_checks():
    for plane in FOUR_PLANES:
        assert _det([*V0, *[[QuadInt(x) for x in v] for v in plane]]).is_zero()
    for p, q in itertools.combinations(FOUR_PLANES, 2):
        assert _det([*p, *q]) != 0
    # V0 is irrational: no rational plane equals it, and its Plücker vector is not a rational multiple
    assert any(not x.is_zero() and x.b != 0 for x in (*V0[0], *V0[1]))


def test_plucker_pairing_is_determinant():
    rng = random.Random(2)
    for _ in range(100):
        v, w, x, y = ([rng.randint(-4, 4) for _ in range(4)] for _ in range(4))
        assert plucker_pairing(plucker(v, w), plucker(x, y)) == _det([v, w, x, y])


def test_plane_meeting_two_of_the_planes():
    # L3 + L4 is all of Q^4, so a plane meeting both is spanned by one vector from each
    (a, b), (c, d) = FOUR_PLANES[2], FOUR_PLANES[3]
    assert IntMatrix.from_rows([a, b, c, d]).rank() == 4
    p = plucker(a, c)
    assert plucker_pairing(p, plucker(*FOUR_PLANES[2])) == 0
    assert plucker_pairing(p, plucker(*FOUR_PLANES[3])) == 0


def test_fourplanes_report():
    rep = experiment_fourplanes(500, seed=3)
    assert rep.summary["status"] == "PASS" and rep.summary["falsifications"] == 0
    assert rep.summary["random_planes"] == 500
    assert len(rep.cases) == 10 and all(c["pass"] for c in rep.cases)
    assert rep.dumps() == experiment_fourplanes(500, seed=3).dumps()


def test_line_polynomial():
    t = sympy.Symbol("t")
    line = (1, 1, 1, 0, 1, 2)
    assert line_polynomial(line, (1, 0, 0)).as_expr() == t - 1
    # (t+1)/(t+2) = 1 has no solution
    assert line_polynomial(line, (0, 1, -1)).degree() == 0
    # t^2 = t + 2 at t = -1, 2; t = -1 leaves the torus since t + 1 vanishes
    assert line_polynomial(line, (2, 0, -1)).as_expr() == t - 2
    assert line_polynomial((1, 1, 1, 0, 0, 0), (1, -1, 0)).is_zero


def test_line_rational_exact_height():
    rep = experiment_line((3, 1, 1, 0, 1, 1), 1, allow_degenerate=True)
    case = next(c for c in rep.cases if c["abc"] == [1, 0, 0])
    assert case["status"] == "ok" and case["factors"][0]["poly"] == [3, -1]
    with mpmath.workprec(200):
        assert abs(mpmath.mpf(case["max_height"]) - mpmath.log(3)) < mpmath.mpf(10) ** -28


def test_line_empty_and_identity_records():
    rep = experiment_line((0, 1, 1, 2, 0, 0), 1, allow_degenerate=True)
    by_abc = {tuple(c["abc"]): c for c in rep.cases}
    assert by_abc[(1, 0, 0)]["status"] == "empty"
    assert by_abc[(0, 1, -1)]["status"] == "identity"
    assert rep.violations and not rep.inputs["nondegenerate"]
    assert rep.summary["empty"] >= 1


def test_line_preconditions():
    with pytest.raises(ValueError):
        experiment_line((1, 1, 1), 3)
    with pytest.raises(ValueError):
        experiment_line((1, 1, 1, 0, 1, 2), 0)
    with pytest.raises(ValueError, match="degenerate"):
        experiment_line((1, 2, 3, 0, 0, 0), 2)
    with pytest.raises(ValueError):
        experiment_line((1, 1, 1, 0, 1, 2), 2, tolerance=-1)


def test_line_tolerance_counts_loose_enclosures():
    assert experiment_line((1, 1, 1, 0, 1, 2), 2).summary["wider_than_tolerance"] == 0
    rep = experiment_line((1, 1, 1, 0, 1, 2), 2, tolerance=0)
    assert rep.summary["wider_than_tolerance"] > 0 and rep.notes


def test_line_report_reproducible():
    a = experiment_line((1, 1, 1, 0, 1, 2), 2).dumps()
    b = experiment_line((1, 1, 1, 0, 1, 2), 2).dumps()
    assert a == b
    assert experiment_line((1, 1, 1, 0, 1, 2), 2).summary["triples"] == 98
