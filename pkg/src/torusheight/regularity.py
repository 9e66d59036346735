"""Coordinate projections, the D_X polynomial and epsilon-regularity.

D_X(M) = sum over projections pi and spans L of det(pi M B_L)^2, a polynomial
in the s·n entries of M (row-major, variable i·n + j is M[i][j]).  A matrix
phi0 is epsilon-regular when every matrix of rank < s is at sup-norm distance
at least epsilon from it.  We certify (sound), falsify (sound), or say
Unknown.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .bounds import BoundExpr, dx_supnorm_bound
from .fan import SigmaSet
from .lattice import IntMatrix, LatticeBasis, RatMatrix, as_fraction

__all__ = [
    "projections",
    "DxPolynomial",
    "build_dx",
    "eval_dx",
    "dx_minors",
    "SupnormReport",
    "supnorm_dx",
    "Certified",
    "Falsified",
    "Unknown",
    "certify_regular",
    "falsify_regular",
    "regularity_verdict",
    "lojasiewicz_bound",
    "degreelb_bound",
]

MAX_VARIABLES = 12
MAX_R = 3

Poly = dict[tuple[int, ...], int]


def projections(r: int, s: int) -> list[IntMatrix]:
    """All r×s matrices projecting onto r distinct coordinates, lexicographic."""
    if not 1 <= r <= s:
        raise ValueError(f"need 1 <= r <= s, got r={r}, s={s}")
    return [
        IntMatrix.from_rows([[int(j == c) for j in range(s)] for c in combo], ncols=s)
        for combo in itertools.combinations(range(s), r)
    ]


# ---------------------------------------------------------------- polynomials


def _padd(acc: Poly, p: Poly, c: int = 1) -> None:
    for e, v in p.items():
        w = acc.get(e, 0) + c * v
        if w:
            acc[e] = w
        else:
            acc.pop(e, None)


def _pmul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            w = out.get(e, 0) + c1 * c2
            if w:
                out[e] = w
            else:
                out.pop(e, None)
    return out


def _perm_sign(p: Sequence[int]) -> int:
    sign, seen = 1, [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _leibniz(entries: list[list[Poly]], nvars: int) -> Poly:
    k = len(entries)
    total: Poly = {}
    for perm in itertools.permutations(range(k)):
        term: Poly = {(0,) * nvars: 1}
        for i in range(k):
            term = _pmul(term, entries[i][perm[i]])
            if not term:
                break
        _padd(total, term, _perm_sign(perm))
    return total


@dataclass(frozen=True)
class DxPolynomial:
    n: int
    r: int
    s: int
    terms: dict = field(hash=False, compare=True)
    degX: int | None = None
    nspans: int = 0

    @property
    def degenerate(self) -> bool:
        return not self.terms

    @property
    def nvars(self) -> int:
        return self.s * self.n

    def is_homogeneous(self, degree: int) -> bool:
        return all(sum(e) == degree for e in self.terms)

    def render(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(
                f"M{k // self.n + 1}{k % self.n + 1}" + (f"^{a}" if a > 1 else "") for k, a in enumerate(e) if a
            )
            parts.append(f"{c}*{mono}" if c != 1 else mono)
        return " + ".join(parts).replace("+ -", "- ")


def _bases_of(sig) -> list[LatticeBasis]:
    if isinstance(sig, SigmaSet):
        return list(sig.bases)
    return list(sig)


def build_dx(sig: SigmaSet | Iterable[LatticeBasis], r: int, s: int, n: int, degX: int | None = None) -> DxPolynomial:
    """Expanded sum of squared determinants det(pi M B_L)^2."""
    bases = _bases_of(sig)
    if not 1 <= r <= s:
        raise ValueError(f"need 1 <= r <= s, got r={r}, s={s}")
    if s * n > MAX_VARIABLES or r > MAX_R:
        raise ValueError(f"D_X too large to expand: s·n = {s * n} (max {MAX_VARIABLES}), r = {r} (max {MAX_R})")
    nv = s * n
    total: Poly = {}
    for b in bases:
        if b.n != n or b.rank != r:
            raise ValueError(f"span basis has shape {b.n}x{b.rank}, expected {n}x{r}")
        for pi in projections(r, s):
            rows = [pi.rows[a].index(1) for a in range(r)]
            entries = []
            for a in range(r):
                line = []
                for c in range(r):
                    form: Poly = {}
                    for j in range(n):
                        coef = b.columns[c][j]
                        if coef:
                            e = [0] * nv
                            e[rows[a] * n + j] = 1
                            form[tuple(e)] = coef
                    line.append(form)
                entries.append(line)
            det = _leibniz(entries, nv)
            _padd(total, _pmul(det, det))
    d = DxPolynomial(n, r, s, total, degX, len(bases))
    if not d.is_homogeneous(2 * r):
        raise AssertionError("D_X is not homogeneous of degree 2r")
    return d


def _as_rat(phi) -> RatMatrix:
    if isinstance(phi, RatMatrix):
        return phi
    if isinstance(phi, IntMatrix):
        return phi.to_rat()
    return RatMatrix.from_rows(phi)


def eval_dx(d: DxPolynomial, phi) -> Fraction:
    phi = _as_rat(phi)
    if phi.shape != (d.s, d.n):
        raise ValueError(f"phi must be {d.s}x{d.n}, got {phi.nrows}x{phi.ncols}")
    x = [phi.rows[k // d.n][k % d.n] for k in range(d.nvars)]
    total = Fraction(0)
    for e, c in d.terms.items():
        v = Fraction(c)
        for xi, a in zip(x, e):
            if a:
                v *= xi**a
        total += v
    return total


def dx_minors(bases: Iterable[LatticeBasis], phi, r: int) -> list[Fraction]:
    """Every det(pi phi B_L), the summands of D_X before squaring."""
    phi = _as_rat(phi)
    out = []
    for b in _bases_of(bases):
        pb = phi @ b.matrix.to_rat()
        for pi in projections(r, phi.nrows):
            out.append((pi.to_rat() @ pb).det())
    return out


@dataclass(frozen=True)
class SupnormReport:
    value: int
    bound: BoundExpr | None
    holds: bool | None


def supnorm_dx(d: DxPolynomial) -> SupnormReport:
    """Largest absolute coefficient, checked against the a priori bound."""
    value = max((abs(c) for c in d.terms.values()), default=0)
    if d.degX is None:
        return SupnormReport(value, None, None)
    bound = dx_supnorm_bound(d.n, d.r, d.degX)
    holds = True if value == 0 else BoundExpr.log2_of(value).compare(bound) <= 0
    return SupnormReport(value, bound, holds)


# ---------------------------------------------------------------- regularity


@dataclass(frozen=True)
class Certified:
    minor: tuple[int, ...]
    margin: Fraction
    criterion: str


@dataclass(frozen=True)
class Falsified:
    witness: RatMatrix
    distance: Fraction


@dataclass(frozen=True)
class Unknown:
    reason: str = "neither criterion applies"


def _inverse(a: list[list[Fraction]]) -> list[list[Fraction]] | None:
    k = len(a)
    m = [list(row) + [Fraction(int(i == j)) for j in range(k)] for i, row in enumerate(a)]
    for c in range(k):
        p = next((i for i in range(c, k) if m[i][c] != 0), None)
        if p is None:
            return None
        m[c], m[p] = m[p], m[c]
        inv = 1 / m[c][c]
        m[c] = [x * inv for x in m[c]]
        for i in range(k):
            if i != c and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return [row[k:] for row in m]


def certify_regular(phi0, eps) -> Certified | Unknown:
    """Sound sufficient test: some s×s minor stays invertible under every
    perturbation of sup-norm < eps.

    Two criteria are tried per minor A.  The determinant expansion bound
    |det A| > s!((|A| + eps)^s − |A|^s), and the Neumann series bound
    s·eps·||A^-1||_rowsum <= 1.  The second is much sharper near scaled
    identities.
    """
    phi0 = _as_rat(phi0)
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    s, n = phi0.shape
    by_det: Certified | None = None
    by_neumann: Certified | None = None
    for cols in itertools.combinations(range(n), s):
        a = phi0.submatrix(range(s), cols)
        det = a.det()
        if det == 0:
            continue
        sup = a.sup_norm()
        leib = abs(det) - math.factorial(s) * ((sup + eps) ** s - sup**s)
        if leib > 0 and (by_det is None or leib > by_det.margin):
            by_det = Certified(cols, leib, "determinant")
        inv = _inverse([list(row) for row in a.rows])
        neu = 1 - s * eps * max(sum(abs(x) for x in row) for row in inv)
        if neu >= 0 and (by_neumann is None or neu > by_neumann.margin):
            by_neumann = Certified(cols, neu, "neumann")
    best = by_det or by_neumann
    return best if best is not None else Unknown()


def _dist(a: RatMatrix, b: RatMatrix) -> Fraction:
    return max(abs(x - y) for ra, rb in zip(a.rows, b.rows) for x, y in zip(ra, rb))


def _ok(phi0: RatMatrix, cand: RatMatrix, eps: Fraction) -> bool:
    return cand.rank() < phi0.nrows and _dist(phi0, cand) < eps


def _rat(x: float, den: int) -> Fraction:
    return Fraction(x).limit_denominator(den)


def _row_projection(phi0: RatMatrix, b: list[list[Fraction]]) -> RatMatrix | None:
    """phi0·B(BᵀB)^-1 Bᵀ: rows projected onto the span of the columns of B."""
    bm = RatMatrix.from_rows(b)
    g = _inverse([list(r) for r in (bm.transpose() @ bm).rows])
    if g is None:
        return None
    return phi0 @ bm @ RatMatrix.from_rows(g) @ bm.transpose()


def falsify_regular(phi0, eps, trials: int = 1000, seed: int = 0) -> Falsified | None:
    """Search for a matrix of rank < s strictly within eps of phi0."""
    phi0 = _as_rat(phi0)
    eps = as_fraction(eps)
    if trials < 1:
        raise ValueError("trials must be at least 1")
    s, n = phi0.shape
    if phi0.rank() < s:
        return Falsified(phi0, Fraction(0))
    for i, row in enumerate(phi0.rows):
        if max(abs(x) for x in row) < eps:
            cand = RatMatrix.from_rows([r if k != i else [0] * n for k, r in enumerate(phi0.rows)], ncols=n)
            return Falsified(cand, _dist(phi0, cand))
    if s == 1:
        return None  # a nonzero row is at distance |row| from zero
    f0 = np.array([[float(x) for x in row] for row in phi0.rows])
    u, sv, vt = np.linalg.svd(f0)
    top = vt[: s - 1].T  # n×(s−1)
    rng = np.random.default_rng(seed)
    fe = float(eps)
    for t in range(trials):
        den = 10 ** (1 + t % 8)
        if t == 0:
            b = top
        else:
            b = top + rng.normal(scale=fe * rng.uniform(0, 2), size=top.shape)
        if t % 3 == 2:
            # integer directions occasionally land exactly
            b = np.round(b * rng.integers(1, 6))
        approx = f0 @ b @ np.linalg.pinv(b)
        if np.max(np.abs(approx - f0)) >= fe * (1 + 1e-9):
            continue
        bq = [[_rat(x, den) for x in row] for row in b]
        cand = _row_projection(phi0, bq)
        if cand is not None and _ok(phi0, cand, eps):
            return Falsified(cand, _dist(phi0, cand))
    return None


def regularity_verdict(phi0, eps, trials: int = 1000, seed: int = 0):
    """Certified, Falsified or Unknown; certification is tried first."""
    cert = certify_regular(phi0, eps)
    if isinstance(cert, Certified):
        return cert
    fals = falsify_regular(phi0, eps, trials, seed)
    return fals if fals is not None else cert


# ---------------------------------------------------------------- lower bounds


def _check_params(n, r, s, degX, eps, phi_sup):
    if not 1 <= r <= s <= n:
        raise ValueError("need 1 <= r <= s <= n")
    if not isinstance(degX, str) and as_fraction(degX) < 1:
        raise ValueError("degX must be at least 1")
    if not isinstance(eps, str):
        e = as_fraction(eps)
        if not 0 < e <= 1:
            raise ValueError("eps must lie in (0, 1]")
    if not isinstance(phi_sup, str) and as_fraction(phi_sup) < 0:
        raise ValueError("phi_sup must be nonnegative")


def _delta(n, r, s, eps, phi_sup) -> BoundExpr:
    e = s * n * (2 * r) ** (s * n)
    big = phi_sup if isinstance(phi_sup, str) else max(Fraction(1), as_fraction(phi_sup))
    return (BoundExpr.log2_of(eps) - BoundExpr.log2_of(big)) * e


def lojasiewicz_bound(n: int, r: int, s: int, degX, eps, phi_sup) -> BoundExpr:
    """Lower bound for D_X(phi) at an eps-regular phi."""
    _check_params(n, r, s, degX, eps, phi_sup)
    k = (2 * r) ** (s * n)
    return (
        BoundExpr.pow2(-50 * n**5 * (2 * n) ** (n * n))
        + BoundExpr.log2_of(degX, -(s * n + 1) * k * (r + 3) * (n - r))
        + _delta(n, r, s, eps, phi_sup)
    )


def degreelb_bound(n: int, r: int, s: int, degX, eps, phi_sup) -> BoundExpr:
    """Lower bound for deg(pi phi|_X) for some projection pi."""
    _check_params(n, r, s, degX, eps, phi_sup)
    k = (2 * r) ** (s * n)
    expo = -Fraction(n - r, 2) * (r + 1 + (r + 3) * (s * n + 1) * k)
    return BoundExpr.pow2(-50 * n**5 * (2 * n) ** (n * n)) + BoundExpr.log2_of(degX, expo) + _delta(n, r, s, eps, phi_sup)
