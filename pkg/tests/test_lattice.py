import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torusheight.lattice import (
    IntMatrix,
    LatticeBasis,
    defbl_bound_holds,
    hnf,
    is_hnf,
    is_saturated,
    kernel_lattice_basis,
    lattice_index,
    reduced_kernel_basis,
    smith_diagonal,
    solve_rational,
)


def _check_hnf(m, h, u):
    assert m @ u == h
    assert abs(u.det()) == 1
    assert is_hnf(h)


def _column_reduce(rows):
    """Independent oracle: Euclid on columns, row by row, then reduce left entries."""
    m = [list(r) for r in rows]
    nr, nc = len(m), len(m[0])
    pivot_col = 0
    pivots = []
    for i in range(nr):
        if pivot_col >= nc:
            break
        while True:
            nz = [j for j in range(pivot_col, nc) if m[i][j] != 0]
            if len(nz) <= 1:
                break
            j0 = min(nz, key=lambda j: abs(m[i][j]))
            for j in nz:
                if j != j0:
                    q = m[i][j] // m[i][j0]
                    for k in range(nr):
                        m[k][j] -= q * m[k][j0]
        nz = [j for j in range(pivot_col, nc) if m[i][j] != 0]
        if not nz:
            continue
        j = nz[0]
        for k in range(nr):
            m[k][j], m[k][pivot_col] = m[k][pivot_col], m[k][j]
        if m[i][pivot_col] < 0:
            for k in range(nr):
                m[k][pivot_col] = -m[k][pivot_col]
        pivots.append((i, pivot_col))
        pivot_col += 1
    for i, pc in pivots:
        for j in range(pc):
            q = m[i][j] // m[i][pc]
            for k in range(nr):
                m[k][j] -= q * m[k][pc]
    return [tuple(r) for r in m]


def test_hnf_identity():
    m = IntMatrix.identity(3)
    h, u = hnf(m)
    assert h == m and u == m


def test_hnf_row_vector_gives_gcd():
    m = IntMatrix.from_rows([[2, 3]])
    h, u = hnf(m)
    _check_hnf(m, h, u)
    assert h.rows == ((1, 0),)


@pytest.mark.parametrize("rows", [[[2, 0], [0, 3]], [[4, 6, 2], [1, 5, 7]], [[3, 1], [6, 2]]])
def test_hnf_matches_column_reduction_oracle(rows):
    m = IntMatrix.from_rows(rows)
    h, u = hnf(m)
    _check_hnf(m, h, u)
    assert h.rows == tuple(_column_reduce(rows))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(-9, 9), min_size=4, max_size=4), min_size=1, max_size=3))
def test_hnf_property(rows):
    m = IntMatrix.from_rows(rows)
    h, u = hnf(m)
    _check_hnf(m, h, u)


def test_kernel_coordinate_projection():
    psi = IntMatrix.from_rows([[1, 0, 0, 0], [0, 1, 0, 0]])
    b = kernel_lattice_basis(psi)
    assert b.same_span(LatticeBasis.of(4, [(0, 0, 1, 0), (0, 0, 0, 1)]))
    assert b.is_saturated()


def test_kernel_of_all_ones_generates_small_vectors():
    b = kernel_lattice_basis(IntMatrix.from_rows([[1, 1, 1]]))
    cols = b.columns
    for v in itertools.product(range(-3, 4), repeat=3):
        if sum(v) != 0:
            continue
        # every small kernel vector is an integer combination of the basis
        c = solve_rational(cols, v)
        assert c is not None and all(Fraction(x).denominator == 1 for x in c)


def test_kernel_of_two_three():
    b = kernel_lattice_basis(IntMatrix.from_rows([[2, 3]]))
    assert b.columns in (((3, -2),), ((-3, 2),))


def test_kernel_not_full_rank():
    with pytest.raises(ValueError, match="not full rank"):
        kernel_lattice_basis(IntMatrix.from_rows([[1, 2], [2, 4]]))


def test_reduced_kernel_examples():
    b = reduced_kernel_basis(IntMatrix.from_rows([[1, 0, 0], [0, 1, 0]]))
    assert b.norm_product() == 1
    b = reduced_kernel_basis(IntMatrix.from_rows([[1, 1, 1]]))
    assert b.norm_product() == 1
    assert defbl_bound_holds(IntMatrix.from_rows([[1, 1, 1]]), b)


def _best_norm_product(psi):
    """Exhaustive oracle: smallest product of sup norms over kernel bases from short vectors."""
    n = psi.ncols
    r = n - psi.rank()
    vecs = [
        v
        for v in itertools.product(range(-3, 4), repeat=n)
        if any(v) and all(sum(a * b for a, b in zip(row, v)) == 0 for row in psi.rows)
    ]
    vecs.sort(key=lambda v: max(map(abs, v)))
    best = None
    for combo in itertools.combinations(vecs, r):
        if IntMatrix.from_columns(combo, n).rank() < r:
            continue
        if not is_saturated(IntMatrix.from_columns(combo, n)):
            continue
        p = math.prod(max(map(abs, v)) for v in combo)
        if best is None or p < best:
            best = p
    return best


def test_reduced_basis_against_exhaustive_oracle():
    rng = random.Random(7)
    for _ in range(8):
        psi = IntMatrix.from_rows([[rng.randint(-2, 2) for _ in range(3)]])
        if psi.rank() < 1:
            continue
        b = reduced_kernel_basis(psi)
        assert defbl_bound_holds(psi, b)
        best = _best_norm_product(psi)
        if best is not None:
            # Mahler completion loses at most a factor r! over the best basis
            assert b.norm_product() <= math.factorial(b.rank) * best


@settings(max_examples=80, deadline=None)
@given(st.lists(st.lists(st.integers(-5, 5), min_size=4, max_size=4), min_size=2, max_size=2))
def test_reduced_basis_bound_2x4(rows):
    psi = IntMatrix.from_rows(rows)
    if psi.rank() < 2:
        return
    b = reduced_kernel_basis(psi)
    assert all(x == 0 for row in (psi @ b.matrix).rows for x in row)
    assert b.is_saturated()
    assert defbl_bound_holds(psi, b)


def test_lattice_index_examples():
    assert lattice_index(IntMatrix.from_rows([[1, 0, 0], [0, 1, 0]]), LatticeBasis.of(3, [(1, 0, 0), (0, 1, 0)])) == 1
    b = LatticeBasis.of(3, [(1, -1, 0), (0, 1, -1)])
    assert lattice_index(IntMatrix.from_rows([[1, 0, 0], [0, 1, 0]]), b) == 1
    assert lattice_index(IntMatrix.from_rows([[1, 0]]), LatticeBasis.of(2, [(2, 3)])) == 2


def test_lattice_index_dimension_mismatch():
    with pytest.raises(ValueError):
        lattice_index(IntMatrix.from_rows([[1, 0]]), LatticeBasis.of(2, [(1, 0), (0, 1)]))


def test_lattice_index_zero_when_degenerate():
    assert lattice_index(IntMatrix.from_rows([[1, 1]]), LatticeBasis.of(2, [(1, -1)])) == 0


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.integers(-4, 4), min_size=6, max_size=6),
    st.integers(-3, 3),
    st.booleans(),
)
def test_lattice_index_unimodular_invariance(phi_entries, k, swap):
    phi = IntMatrix.from_rows([phi_entries[:3], phi_entries[3:]])
    b = LatticeBasis.of(3, [(1, -1, 0), (0, 1, -1)])
    v1, v2 = b.columns
    w1 = tuple(a + k * c for a, c in zip(v1, v2))
    cols = [v2, w1] if swap else [w1, v2]
    assert lattice_index(phi, b) == lattice_index(phi, LatticeBasis.of(3, cols))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(-6, 6), min_size=5, max_size=5), min_size=1, max_size=3))
def test_kernel_is_saturated_by_smith(rows):
    psi = IntMatrix.from_rows(rows)
    if psi.rank() < psi.nrows or psi.rank() == psi.ncols:
        return
    b = kernel_lattice_basis(psi)
    assert all(x == 0 for row in (psi @ b.matrix).rows for x in row)
    assert all(d == 1 for d in smith_diagonal(b.matrix))
