"""Degrees of monomial maps restricted to a variety, from its tropical fan.

deg(phi|_X) = sum over v in a generic fiber phi^{-1}(w) ∩ trop X of
m_X(v)·[Z^r : phi(L_v ∩ Z^n)].
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .fan import Fan, sigma
from .lattice import IntMatrix, LatticeBasis, RatMatrix, lattice_index, solve_rational

__all__ = [
    "DegreeTerm",
    "DegreeResult",
    "GenericityError",
    "st_degree",
    "degree_upper_bound",
    "degree_lower_bound",
    "monomial_degree_oracle",
]

MAX_RETRIES = 8
_START_RANGE = 16


class GenericityError(RuntimeError):
    """No generic point was found within the retry budget."""


@dataclass(frozen=True)
class DegreeTerm:
    cone: int
    fiber_point: tuple[Fraction, ...]
    multiplicity: int
    index: int


@dataclass(frozen=True)
class DegreeResult:
    degree: Fraction
    w: tuple[int, ...]
    terms: tuple[DegreeTerm, ...]
    scale: int
    dominant: bool = True

    def recomputed(self) -> Fraction:
        total = sum(t.multiplicity * t.index for t in self.terms)
        return Fraction(total, self.scale ** len(self.w)) if self.w else Fraction(total)


def _clear_denominators(phi: RatMatrix) -> tuple[int, IntMatrix]:
    lam = phi.denominator_lcm()
    return lam, phi.scale(lam).to_int()


def _image_span_contains(phi: IntMatrix, basis: LatticeBasis, w: Sequence[int]) -> bool:
    images = [tuple(sum(a * b for a, b in zip(row, c)) for row in phi.rows) for c in basis.columns]
    images = [v for v in images if any(v)]
    if not images:
        return not any(w)
    indep = []
    for v in images:
        if RatMatrix.from_rows(indep + [v], ncols=len(w)).rank() > len(indep):
            indep.append(v)
    return solve_rational(indep, w) is not None


def _fiber(phi: IntMatrix, f: Fan, sig, w: tuple[int, ...]):
    """Terms of the fiber over w, or None when w is not generic."""
    terms = []
    for ci, (cone, mult) in enumerate(f.cones):
        b = sig.bases[sig.cone_span[ci]]
        index = lattice_index(phi, b)
        if index == 0:
            if _image_span_contains(phi, b, w):
                return None
            continue
        m = phi @ b.matrix
        coeffs = solve_rational(m.columns(), w)
        v = tuple(sum(coeffs[j] * b.columns[j][i] for j in range(b.rank)) for i in range(f.n))
        if cone.relint_contains(v):
            terms.append(DegreeTerm(ci, v, mult, index))
        elif cone.contains(v):
            return None
    return terms


def st_degree(f: Fan, phi, seed: int = 0) -> DegreeResult:
    """Degree of phi restricted to a variety with tropicalisation f.

    phi may be rational; it is scaled to an integer matrix lambda·phi and the
    count is divided by lambda^r.  Generic w are drawn with entries in
    [-N, N], N doubling on each rejected draw.
    """
    if not isinstance(phi, RatMatrix):
        phi = phi.to_rat() if hasattr(phi, "to_rat") else RatMatrix.from_rows(phi)
    if phi.nrows != f.r or phi.ncols != f.n:
        raise ValueError(f"phi must be {f.r}x{f.n}, got {phi.nrows}x{phi.ncols}")
    lam, iphi = _clear_denominators(phi)
    r = f.r
    sig = sigma(f)
    if all(lattice_index(iphi, sig.bases[sig.cone_span[ci]]) == 0 for ci in range(len(f.cones))):
        return DegreeResult(Fraction(0), (0,) * r, (), lam, dominant=False)
    rng = random.Random(seed)
    bound = _START_RANGE
    for _ in range(MAX_RETRIES):
        w = tuple(rng.randint(-bound, bound) for _ in range(r))
        bound *= 2
        if not any(w):
            continue
        terms = _fiber(iphi, f, sig, w)
        if terms is None:
            continue
        total = sum(t.multiplicity * t.index for t in terms)
        return DegreeResult(Fraction(total, lam**r), w, tuple(terms), lam, dominant=True)
    raise GenericityError("genericity failure")


def degree_upper_bound(f: Fan, degX: int, phi: IntMatrix) -> int:
    """degX · max_L |det(phi B_L)| · #Sigma."""
    sig = sigma(f)
    best = max((lattice_index(phi, b) for b in sig.bases), default=0)
    return degX * best * len(sig)


def degree_lower_bound(phi: IntMatrix, b: LatticeBasis) -> int:
    """|det(phi B)|; st_degree dominates this for every span of the fan."""
    return lattice_index(phi, b)


def monomial_degree_oracle(u: Sequence[int], phi: IntMatrix) -> int:
    """Degree of t -> t^(phi·u) on the curve t -> t^u: |phi·u|."""
    if phi.nrows != 1 or phi.ncols != len(u):
        raise ValueError("phi must be a single row of matching length")
    return abs(sum(a * b for a, b in zip(phi.rows[0], u)))
