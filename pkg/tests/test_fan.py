import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torusheight.fan import (
    Cone,
    Fan,
    balancing_check,
    candidate_count_bound,
    candidate_spans,
    fan_from_linear_space,
    push_forward_fan,
    sigma,
    trop_hypersurface,
    trop_monomial_curve,
)
from torusheight.lattice import IntMatrix, LatticeBasis


def test_linear_space_fans():
    f = fan_from_linear_space(LatticeBasis.of(3, [(1, 0, 0), (0, 1, 0), (0, 0, 1)]))
    assert f.r == 3 and len(f.cones) == 1 and f.cones[0][1] == 1
    line = fan_from_linear_space(LatticeBasis.of(2, [(2, 3)]))
    assert line.cones[0][0].lineality == ((2, 3),)
    plane = fan_from_linear_space(LatticeBasis.of(4, [(1, 0, 1, 0), (0, 1, 0, 1)]))
    assert plane.r == 2 and balancing_check(plane)


def test_linear_space_requires_saturation():
    with pytest.raises(ValueError):
        fan_from_linear_space(LatticeBasis(2, ((2, 0), (0, 1))))


def test_tropical_line():
    f = trop_hypersurface([(1, 0), (0, 1), (0, 0)])
    rays = sorted(c.rays[0] for c, m in f.cones)
    assert rays == [(-1, -1), (0, 1), (1, 0)]
    assert all(m == 1 for _, m in f.cones)
    assert balancing_check(f)


def test_hypersurface_with_lattice_length_two():
    f = trop_hypersurface([(2, 0), (0, 1), (0, 0)])
    mults = {c.rays[0]: m for c, m in f.cones}
    # the edge from (0,0) to (2,0) has lattice length 2
    assert mults == {(0, 1): 2, (1, 0): 1, (-1, -2): 1}
    assert balancing_check(f)


def test_binomial_is_a_line():
    f = trop_hypersurface([(1, 0), (0, 1)])
    (cone, m), = f.cones
    assert cone.rays == () and cone.lineality in (((1, 1),), ((-1, -1),)) and m == 1


def test_monomial_is_rejected():
    with pytest.raises(ValueError, match="empty tropicalization"):
        trop_hypersurface([(1, 2)])


def test_monomial_curves():
    assert sorted(c.rays[0] for c, _ in trop_monomial_curve((1, 0)).cones) == [(-1, 0), (1, 0)]
    assert sorted(c.rays[0] for c, _ in trop_monomial_curve((2, 3)).cones) == [(-2, -3), (2, 3)]
    f = trop_monomial_curve((1, 1, 1))
    assert sorted(c.rays[0] for c, _ in f.cones) == [(-1, -1, -1), (1, 1, 1)]
    assert balancing_check(f)
    with pytest.warns(UserWarning):
        g = trop_monomial_curve((2, 4))
    assert sorted(c.rays[0] for c, _ in g.cones) == [(-1, -2), (1, 2)]


def test_sigma_examples():
    lin = fan_from_linear_space(LatticeBasis.of(3, [(1, -1, 0), (0, 1, -1)]))
    s = sigma(lin)
    assert len(s) == 1 and s.bases[0].same_span(LatticeBasis.of(3, [(1, -1, 0), (0, 1, -1)]))
    assert len(sigma(trop_hypersurface([(1, 0), (0, 1), (0, 0)]))) == 3
    assert len(sigma(Fan(2, 1, ((Cone(((1, 0),)), 1), (Cone(((-1, 0),)), 1))))) == 1


def test_balancing_failure():
    f = Fan(2, 1, ((Cone(((1, 0),)), 1), (Cone(((0, 1),)), 1)))
    rep = balancing_check(f)
    assert not rep and rep.violations


def test_balancing_of_two_dimensional_fan():
    # tropical plane x + y + z + 1 in Q^3
    f = trop_hypersurface([(1, 0, 0), (0, 1, 0), (0, 0, 1), (0, 0, 0)])
    assert f.r == 2 and len(f.cones) == 6
    assert balancing_check(f)
    # dropping a cone breaks balancing around its faces
    broken = Fan(3, 2, f.cones[1:])
    assert not balancing_check(broken)


def test_fan_validation():
    with pytest.raises(ValueError):
        Fan(2, 1, ((Cone(((1, 0),)), 0),))
    with pytest.raises(ValueError):
        Fan(2, 2, ((Cone(((1, 0),)), 1),))


def test_push_forward():
    line = trop_hypersurface([(1, 0), (0, 1), (0, 0)])
    same = push_forward_fan(IntMatrix.identity(2), line)
    for c, _ in line.cones:
        assert same.contains(c.rays[0])
    image = push_forward_fan(IntMatrix.from_rows([[1, 0]]), line)
    assert image.contains((1,)) and image.contains((-1,)) and image.contains((0,))
    curve = trop_monomial_curve((1, 1))
    point = push_forward_fan(IntMatrix.from_rows([[1, -1]]), curve)
    assert point.cones == () and point.dim == 0 and not point.contains((1,))


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=2, max_size=6, unique=True),
    st.lists(st.integers(-3, 3), min_size=4, max_size=4),
)
def test_push_forward_keeps_images_of_rays(support, phi_entries):
    f = trop_hypersurface(support)
    phi = IntMatrix.from_rows([phi_entries[:2], phi_entries[2:]])
    image = push_forward_fan(phi, f)
    for c, _ in f.cones:
        for v in c.rays + c.lineality:
            assert image.contains(tuple(sum(a * b for a, b in zip(row, v)) for row in phi.rows))


def test_candidate_spans_single_difference():
    out = candidate_spans([((0, 1), [(0, 0), (1, 1)])], 2, 1)
    assert len(out) == 1
    psi, ker = out[0]
    assert psi.rows == ((1, 1),)
    assert ker.same_span(LatticeBasis.of(2, [(1, -1)]))


def test_candidate_spans_singleton_support():
    with pytest.raises(ValueError):
        candidate_spans([((0, 1), [(1, 1)])], 2, 1)


def test_candidate_spans_contain_tropical_line():
    support = [(1, 0), (0, 1), (0, 0)]
    data = [((0, 1), support)]
    out = candidate_spans(data, 2, 1)
    assert len(out) <= candidate_count_bound(data, 2, 1)
    kernels = [k for _, k in out]
    for c, _ in trop_hypersurface(support).cones:
        ray = c.rays[0]
        assert any(k.same_span(LatticeBasis.of(2, [ray])) for k in kernels)


def test_candidate_spans_invariants():
    rng = random.Random(5)
    n, r = 4, 2
    for _ in range(5):
        data = []
        for idx in itertools.combinations(range(n), r + 1):
            pts = {tuple(rng.randint(0, 2) for _ in range(r + 1)) for _ in range(3)}
            if len(pts) < 2:
                pts.add((0,) * (r + 1))
                pts.add((1,) + (0,) * r)
            data.append((idx, sorted(pts)))
        out = candidate_spans(data, n, r)
        assert len(out) <= candidate_count_bound(data, n, r)
        for psi, ker in out:
            assert psi.rank() == n - r and ker.rank == r
            assert all(x == 0 for row in (psi @ ker.matrix).rows for x in row)


def test_canonical_merges_duplicate_cones():
    f = Fan(2, 1, ((Cone(((2, 0),)), 1), (Cone(((1, 0),)), 2)))
    g = f.canonical()
    assert g.cones == ((Cone(((1, 0),)), 3),)
