"""Weighted rational polyhedral fans.

A cone is stored as primitive ray generators plus lineality generators.
Facet descriptions, membership and relative-interior tests are computed
exactly by enumerating candidate hyperplanes, which is fine at the small
dimensions used here.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .lattice import (
    IntMatrix,
    LatticeBasis,
    RatMatrix,
    hnf,
    kernel_lattice_basis,
    primitive,
    rational_nullspace,
    reduced_kernel_basis,
    saturate,
    solve_rational,
    unit_preimage,
)

__all__ = [
    "Cone",
    "Fan",
    "SigmaSet",
    "SupportFan",
    "BalanceReport",
    "fan_from_linear_space",
    "trop_hypersurface",
    "trop_monomial_curve",
    "sigma",
    "balancing_check",
    "push_forward_fan",
    "candidate_spans",
    "candidate_count_bound",
    "cone_from_inequalities",
]

Vec = tuple[int, ...]


def _dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


def _rank(vectors: Sequence[Sequence], n: int) -> int:
    if not vectors:
        return 0
    return RatMatrix.from_rows(vectors, ncols=n).rank()


def _integral(v: Sequence[Fraction]) -> Vec:
    lcm = 1
    for x in v:
        lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
    return primitive([int(x * lcm) for x in v])


def _lattice_key(b: LatticeBasis) -> tuple:
    """Canonical representation of a saturated lattice (its column HNF)."""
    if b.rank == 0:
        return ()
    h, _ = hnf(b.matrix)
    return tuple(h.col(j) for j in range(b.rank))


@dataclass(frozen=True)
class Facet:
    """A facet of a cone: ray indices on it and an inward functional."""

    rays: frozenset[int]
    normal: tuple[Fraction, ...]


@dataclass(frozen=True)
class Cone:
    """cone(rays) + span(lineality), generators primitive."""

    rays: tuple[Vec, ...]
    lineality: tuple[Vec, ...] = ()

    def __post_init__(self):
        rays = tuple(primitive(tuple(int(x) for x in r)) for r in self.rays)
        lin = tuple(primitive(tuple(int(x) for x in r)) for r in self.lineality)
        lens = {len(v) for v in rays + lin}
        if len(lens) > 1:
            raise ValueError("cone generators of different lengths")
        object.__setattr__(self, "rays", rays)
        object.__setattr__(self, "lineality", lin)

    @property
    def ambient(self) -> int:
        v = self.rays + self.lineality
        if not v:
            raise ValueError("cone with no generators has no ambient dimension")
        return len(v[0])

    @cached_property
    def dim(self) -> int:
        return _rank(self.rays + self.lineality, self.ambient)

    @cached_property
    def span(self) -> LatticeBasis:
        return saturate(self.rays + self.lineality, self.ambient)

    @cached_property
    def lineality_dim(self) -> int:
        return _rank(self.lineality, self.ambient)

    @cached_property
    def facets(self) -> tuple[Facet, ...]:
        """Facets with inward normals chosen inside the span of the cone."""
        n = self.ambient
        d = self.dim
        if not self.rays:
            return ()
        need = d - 1 - self.lineality_dim
        if need < 0:
            return ()
        g = self.span.columns
        found: dict[frozenset[int], Facet] = {}
        for subset in itertools.combinations(range(len(self.rays)), need):
            gens = [self.rays[i] for i in subset] + list(self.lineality)
            if _rank(gens, n) != d - 1:
                continue
            # f = sum c_k g_k orthogonal to gens
            m = RatMatrix.from_rows([[_dot(x, gk) for gk in g] for x in gens], ncols=len(g)) if gens else None
            if m is None:
                null = [tuple(Fraction(int(i == j)) for j in range(len(g))) for i in range(len(g))]
            else:
                null = rational_nullspace(m)
            if len(null) != 1:
                continue
            c = null[0]
            f = tuple(sum(c[k] * g[k][i] for k in range(len(g))) for i in range(n))
            vals = [_dot(f, r) for r in self.rays]
            if all(v >= 0 for v in vals):
                pass
            elif all(v <= 0 for v in vals):
                f = tuple(-x for x in f)
                vals = [-v for v in vals]
            else:
                continue
            if all(v == 0 for v in vals):
                continue
            face = frozenset(i for i, v in enumerate(vals) if v == 0)
            if face not in found:
                found[face] = Facet(face, f)
        return tuple(found[k] for k in sorted(found, key=lambda s: sorted(s)))

    def in_span(self, v: Sequence) -> bool:
        if self.dim == 0:
            return all(x == 0 for x in v)
        return solve_rational(self.span.columns, v) is not None

    def contains(self, v: Sequence) -> bool:
        return self.in_span(v) and all(_dot(f.normal, v) >= 0 for f in self.facets)

    def relint_contains(self, v: Sequence) -> bool:
        return self.in_span(v) and all(_dot(f.normal, v) > 0 for f in self.facets)

    def canonical(self) -> "Cone":
        n = self.ambient
        lin_basis = saturate(self.lineality, n)
        lin = tuple(_lattice_key(lin_basis))
        rays = []
        for r in self.rays:
            if lin and solve_rational(lin, r) is not None:
                continue
            rays.append(r)
        return Cone(tuple(sorted(set(rays))), lin)


@dataclass(frozen=True)
class Fan:
    """Pure r-dimensional weighted fan in Q^n, stored by maximal cones."""

    n: int
    r: int
    cones: tuple[tuple[Cone, int], ...]
    notes: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        cones = tuple((c, int(m)) for c, m in self.cones)
        for c, m in cones:
            if m < 1:
                raise ValueError("multiplicities must be positive")
            if c.ambient != self.n:
                raise ValueError("cone lives in the wrong ambient space")
            if c.dim != self.r:
                raise ValueError(f"cone of dimension {c.dim} in a fan of pure dimension {self.r}")
        object.__setattr__(self, "cones", cones)

    def canonical(self) -> "Fan":
        merged: dict[Cone, int] = {}
        for c, m in self.cones:
            cc = c.canonical()
            merged[cc] = merged.get(cc, 0) + m
        order = sorted(merged, key=lambda c: (c.lineality, c.rays))
        return Fan(self.n, self.r, tuple((c, merged[c]) for c in order), self.notes)


@dataclass(frozen=True)
class SigmaSet:
    """Distinct spans of maximal cones, each with a reduced saturated basis.

    ``cone_span[i]`` is the index of the span of the i-th maximal cone.
    """

    n: int
    r: int
    bases: tuple[LatticeBasis, ...]
    cone_span: tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.bases)


def _reduced_span_basis(span: LatticeBasis) -> LatticeBasis:
    n = span.n
    if span.rank == n:
        return LatticeBasis(n, tuple(tuple(int(i == j) for i in range(n)) for j in range(n)))
    if span.rank == 0:
        return span
    perp = kernel_lattice_basis(span.matrix.transpose())
    return reduced_kernel_basis(perp.matrix.transpose())


def sigma(f: Fan) -> SigmaSet:
    """Deduplicated spans of the maximal cones."""
    keys: dict[tuple, int] = {}
    bases: list[LatticeBasis] = []
    idx = []
    for c, _ in f.cones:
        key = _lattice_key(c.span)
        if key not in keys:
            keys[key] = len(bases)
            bases.append(_reduced_span_basis(c.span))
        idx.append(keys[key])
    return SigmaSet(f.n, f.r, tuple(bases), tuple(idx))


def fan_from_linear_space(b: LatticeBasis) -> Fan:
    """Tropicalisation of the subtorus with cocharacter lattice span(B) ∩ Z^n."""
    if b.rank == 0:
        raise ValueError("zero-dimensional linear space")
    if not b.is_saturated():
        raise ValueError("basis is not saturated")
    return Fan(b.n, b.rank, ((Cone((), b.columns), 1),))


def trop_monomial_curve(u: Sequence[int]) -> Fan:
    """Rays +u and -u with multiplicity 1 (u normalised to be primitive)."""
    u = tuple(int(x) for x in u)
    if not any(u):
        raise ValueError("u must be nonzero")
    p = primitive(u)
    if p != u and tuple(-x for x in p) != u:
        warnings.warn(f"normalising non-primitive direction {u} to {p}", stacklevel=2)
    neg = tuple(-x for x in p)
    return Fan(len(u), 1, ((Cone((p,)), 1), (Cone((neg,)), 1)))


def cone_from_inequalities(
    ineqs: Sequence[Sequence], eqs: Sequence[Sequence], n: int
) -> Cone | None:
    """Generators of {w : a·w >= 0 for a in ineqs, e·w = 0 for e in eqs}.

    Returns None for the zero cone.
    """
    lin_rows = [tuple(a) for a in ineqs] + [tuple(e) for e in eqs]
    if lin_rows:
        lin = [_integral(v) for v in rational_nullspace(RatMatrix.from_rows(lin_rows, ncols=n))]
    else:
        lin = [tuple(int(i == j) for i in range(n)) for j in range(n)]
    eq_null = (
        len(rational_nullspace(RatMatrix.from_rows(eqs, ncols=n))) if eqs else n
    )
    pointed = eq_null - len(lin)
    rays: set[Vec] = set()
    if pointed >= 1:
        base = [tuple(e) for e in eqs] + lin
        for subset in itertools.combinations(range(len(ineqs)), pointed - 1):
            rows = base + [tuple(ineqs[i]) for i in subset]
            if _rank(rows, n) != n - 1:
                continue
            null = rational_nullspace(RatMatrix.from_rows(rows, ncols=n))
            w = _integral(null[0])
            for cand in (w, tuple(-x for x in w)):
                if all(_dot(a, cand) >= 0 for a in ineqs):
                    rays.add(cand)
    if not rays and not lin:
        return None
    return Cone(tuple(sorted(rays)), tuple(lin))


def _lattice_length(points: Sequence[Vec]) -> int:
    best = 0
    for a, b in itertools.combinations(points, 2):
        g = 0
        for x, y in zip(a, b):
            g = math.gcd(g, x - y)
        best = max(best, g)
    return best


def trop_hypersurface(support: Iterable[Sequence[int]], irreducible: bool | None = None) -> Fan:
    """Constant-coefficient tropical hypersurface of a Laurent polynomial.

    Maximal cones are the normal cones of the edges of the Newton polytope
    (minimum convention), weighted by the lattice length of the edge.
    """
    pts = sorted({tuple(int(x) for x in a) for a in support})
    if len(pts) < 2:
        raise ValueError("monomial has empty tropicalization")
    n = len(pts[0])
    if any(len(p) != n for p in pts):
        raise ValueError("exponent vectors of different lengths")
    faces: dict[frozenset[int], Cone] = {}
    for i, j in itertools.combinations(range(len(pts)), 2):
        ineqs = [tuple(x - y for x, y in zip(pts[l], pts[i])) for l in range(len(pts)) if l != i]
        eq = [tuple(x - y for x, y in zip(pts[j], pts[i]))]
        cone = cone_from_inequalities(ineqs, eq, n)
        if cone is None or cone.dim != n - 1:
            continue
        w = [sum(col) for col in zip(*(cone.rays or ((0,) * n,)))]
        vals = [_dot(w, p) for p in pts]
        lo = min(vals)
        face = frozenset(k for k, v in enumerate(vals) if v == lo)
        faces.setdefault(face, cone)
    cones = []
    for face in sorted(faces, key=sorted):
        mult = _lattice_length([pts[k] for k in face])
        cones.append((faces[face], mult))
    notes = () if irreducible is None else (f"irreducible={irreducible}",)
    return Fan(n, n - 1, tuple(cones), notes)


@dataclass(frozen=True)
class BalanceReport:
    balanced: bool
    violations: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.balanced


def _quotient_generator(big: LatticeBasis, small: LatticeBasis, inside: Vec) -> Vec:
    """Primitive generator of big/small (rank 1 quotient) pointing towards ``inside``."""
    k = big.rank
    coords = [tuple(int(c) for c in solve_rational(big.columns, v)) for v in small.columns]
    if coords:
        f = kernel_lattice_basis(IntMatrix.from_rows(coords, ncols=k)).columns[0]
    else:
        f = (1,)
    z = unit_preimage(f)
    u = tuple(sum(big.columns[j][i] * z[j] for j in range(k)) for i in range(big.n))
    side = sum(a * int(c) for a, c in zip(f, solve_rational(big.columns, inside)))
    if side < 0:
        u = tuple(-x for x in u)
    return u


def balancing_check(f: Fan) -> BalanceReport:
    """Balancing condition; for r >= 2 only around faces shared by listed cones."""
    n, r = f.n, f.r
    if r == 0:
        return BalanceReport(True)
    if r == 1:
        total = [0] * n
        for c, m in f.cones:
            if c.lineality:
                continue
            for ray in c.rays:
                total = [t + m * x for t, x in zip(total, ray)]
        if any(total):
            return BalanceReport(False, (f"weighted ray sum {tuple(total)} is not zero",))
        return BalanceReport(True)
    around: dict[tuple, list[tuple[int, Vec]]] = {}
    face_span: dict[tuple, LatticeBasis] = {}
    for ci, (c, m) in enumerate(f.cones):
        for facet in c.facets:
            gens = [c.rays[i] for i in sorted(facet.rays)] + list(c.lineality)
            tau = saturate(gens, n)
            key = (_lattice_key(tau), frozenset(c.rays[i] for i in facet.rays))
            outside = next(c.rays[i] for i in range(len(c.rays)) if i not in facet.rays)
            u = _quotient_generator(c.span, tau, outside)
            around.setdefault(key, []).append((m, u))
            face_span[key] = tau
    violations, warns = [], []
    for key, items in around.items():
        if len(items) == 1:
            warns.append(f"face {sorted(key[1])} belongs to a single listed cone")
            continue
        total = [0] * n
        for m, u in items:
            total = [t + m * x for t, x in zip(total, u)]
        tau = face_span[key]
        if any(total) and (tau.rank == 0 or solve_rational(tau.columns, total) is None):
            violations.append(f"around face {sorted(key[1])}: weighted sum {tuple(total)} leaves the face span")
    return BalanceReport(not violations, tuple(violations), tuple(warns))


@dataclass(frozen=True)
class SupportFan:
    """Union of cones with no multiplicities and no purity requirement."""

    n: int
    cones: tuple[Cone, ...]
    has_origin: bool = True

    def contains(self, w: Sequence) -> bool:
        if not any(w):
            return True
        return any(c.contains(w) for c in self.cones)

    @property
    def dim(self) -> int:
        return max((c.dim for c in self.cones), default=0)


def push_forward_fan(phi: IntMatrix, f: Fan) -> SupportFan:
    """Support of phi(f) as the union of the image cones."""
    if phi.ncols != f.n:
        raise ValueError("phi has the wrong number of columns")
    out: list[Cone] = []
    for c, _ in f.cones:
        rays = [tuple(_dot(row, v) for row in phi.rows) for v in c.rays]
        lin = [tuple(_dot(row, v) for row in phi.rows) for v in c.lineality]
        rays = [v for v in rays if any(v)]
        lin = [v for v in lin if any(v)]
        if rays or lin:
            cone = Cone(tuple(rays), tuple(lin)).canonical()
            if cone not in out:
                out.append(cone)
    return SupportFan(phi.nrows, tuple(out))


def _differences(support: Sequence[Sequence[int]]) -> list[Vec]:
    pts = sorted({tuple(int(x) for x in a) for a in support})
    diffs = set()
    for a, b in itertools.combinations(pts, 2):
        d = tuple(x - y for x, y in zip(a, b))
        if d[next(i for i, x in enumerate(d) if x)] < 0:
            d = tuple(-x for x in d)
        diffs.add(d)
    return sorted(diffs)


def candidate_count_bound(projection_data, n: int, r: int) -> int:
    """binom(#I, n-r)·(1 + 2s)^((r+1)(n-r)) with s the largest difference sup norm."""
    s = 0
    for _, support in projection_data:
        for d in _differences(support):
            s = max(s, max(abs(x) for x in d))
    return math.comb(len(projection_data), n - r) * (1 + 2 * s) ** ((r + 1) * (n - r))


def candidate_spans(
    projection_data: Sequence[tuple[Sequence[int], Sequence[Sequence[int]]]], n: int, r: int
) -> list[tuple[IntMatrix, LatticeBasis]]:
    """Candidate spans ker(psi) from difference vectors of projected supports.

    ``projection_data`` lists (I, support of f_I) with |I| = r + 1.  Each psi
    takes one difference vector from each of n - r distinct I.
    """
    if not 0 <= r < n:
        raise ValueError("need 0 <= r < n")
    per_i: list[list[Vec]] = []
    for idx, support in projection_data:
        idx = tuple(idx)
        if len(idx) != r + 1 or len(set(idx)) != r + 1 or not all(0 <= i < n for i in idx):
            raise ValueError(f"index set {idx} must have r+1 distinct entries in range(n)")
        pts = {tuple(a) for a in support}
        if len(pts) < 2:
            raise ValueError("support with fewer than two monomials")
        embedded = []
        for d in _differences(pts):
            v = [0] * n
            for pos, x in zip(idx, d):
                v[pos] = x
            embedded.append(tuple(v))
        per_i.append(embedded)
    out: list[tuple[IntMatrix, LatticeBasis]] = []
    seen: set[tuple] = set()
    for choice in itertools.combinations(range(len(per_i)), n - r):
        for rows in itertools.product(*(per_i[k] for k in choice)):
            psi = IntMatrix.from_rows(rows, ncols=n)
            if psi.rank() != n - r:
                continue
            if psi.rows in seen:
                continue
            seen.add(psi.rows)
            out.append((psi, kernel_lattice_basis(psi)))
    return out
