"""Integer approximations psi ≈ Q·alpha·psi0 with an identity minor.

Given psi0 of full row rank s and Q >= 2·s!, pick the s×s minor A of psi0 with
the largest |det|, set alpha = A^-1 so alpha·psi0 has sup-norm 1 and an
identity minor, and round Q·alpha·psi0 entrywise.  psi/Q is then
1/(2s!)-regular, and psi(p) has small height whenever psi0(p) = 1.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .heights import Exact, Ordering, compare, height_affine
from .lattice import IntMatrix, RatMatrix, as_fraction, solve_rational
from .regularity import Certified, certify_regular

__all__ = ["ApproxData", "dirichlet_round", "approx_data", "ApproxReport", "verify_approx", "monomial_eval"]


def _round_half_away(x: Fraction) -> int:
    f = math.floor(abs(x) + Fraction(1, 2))
    return f if x >= 0 else -f


def _ceil_away(x: Fraction) -> int:
    c = math.ceil(abs(x))
    return c if x >= 0 else -c


def _inverse(a: RatMatrix) -> RatMatrix:
    k = a.nrows
    cols = [solve_rational(a.columns(), [Fraction(int(i == j)) for i in range(k)]) for j in range(k)]
    return RatMatrix.from_columns(cols, k)


@dataclass(frozen=True)
class ApproxData:
    """The rounding target Q·alpha·psi0 and the chosen minor."""

    minor: tuple[int, ...]
    alpha: RatMatrix
    target: RatMatrix


def approx_data(psi0: IntMatrix, q) -> ApproxData:
    q = as_fraction(q)
    s, n = psi0.shape
    if psi0.rank() < s:
        raise ValueError("psi0 must have full row rank")
    best, best_det = None, Fraction(0)
    for cols in itertools.combinations(range(n), s):
        det = abs(psi0.submatrix(range(s), cols).det())
        if det > best_det:
            best, best_det = cols, det
    alpha = _inverse(psi0.submatrix(range(s), best).to_rat())
    target = (alpha @ psi0.to_rat()).scale(q)
    return ApproxData(best, alpha, target)


def dirichlet_round(psi0, q) -> IntMatrix:
    """Round Q·alpha·psi0; rows whose sup-norm fell below Q get their largest
    unrounded entry pushed away from zero to its ceiling."""
    psi0 = psi0 if isinstance(psi0, IntMatrix) else IntMatrix.from_rows(psi0)
    q = as_fraction(q)
    s = psi0.nrows
    if q < 2 * math.factorial(s):
        raise ValueError(f"Q must be at least 2·s! = {2 * math.factorial(s)}")
    data = approx_data(psi0, q)
    rows = []
    for trow in data.target.rows:
        row = [_round_half_away(x) for x in trow]
        if max(abs(v) for v in row) < q:
            j = max(range(len(trow)), key=lambda k: (abs(trow[k]), -k))
            row[j] = _ceil_away(trow[j])
        rows.append(row)
    return IntMatrix.from_rows(rows, ncols=psi0.ncols)


def monomial_eval(p: Sequence[Fraction], row: Sequence[int]) -> Fraction:
    out = Fraction(1)
    for x, a in zip(p, row):
        out *= x**a
    return out


@dataclass(frozen=True)
class ApproxReport:
    rows_at_least_q: bool
    sup_below_q_plus_1: bool
    rounding_error_below_1: bool
    regular: Certified | None
    height_ok: bool | None
    note: str = ""

    @property
    def ok(self) -> bool:
        return (
            self.rows_at_least_q
            and self.sup_below_q_plus_1
            and self.rounding_error_below_1
            and self.regular is not None
            and self.height_ok is not False
        )


def verify_approx(psi0, psi, q, p: Sequence | None = None) -> ApproxReport:
    """Check the approximation contract, and the height clause when p is given."""
    psi0 = psi0 if isinstance(psi0, IntMatrix) else IntMatrix.from_rows(psi0)
    psi = psi if isinstance(psi, IntMatrix) else IntMatrix.from_rows(psi)
    q = as_fraction(q)
    s, n = psi0.shape
    if psi.shape != (s, n):
        raise ValueError("psi and psi0 must have the same shape")
    rows_ok = all(max(abs(x) for x in row) >= q for row in psi.rows)
    sup_ok = psi.sup_norm() < q + 1
    data = approx_data(psi0, q)
    err_ok = all(abs(x - y) < 1 for rt, rp in zip(data.target.rows, psi.rows) for x, y in zip(rt, rp))
    eps = Fraction(1, 2 * math.factorial(s))
    verdict = certify_regular(psi.to_rat().scale(1 / q), eps)
    regular = verdict if isinstance(verdict, Certified) else None
    height_ok, note = None, ""
    if p is not None:
        try:
            pt = [as_fraction(x) for x in p]
        except (TypeError, ValueError):
            pt = None
        if pt is None or len(pt) != n:
            note = "height clause skipped: p is not a rational point of matching dimension"
        elif any(x == 0 for x in pt):
            note = "height clause skipped: p has a zero coordinate"
        elif any(monomial_eval(pt, row) != 1 for row in psi0.rows):
            note = "height clause skipped: psi0(p) != 1"
        else:
            image = [monomial_eval(pt, row) for row in psi.rows]
            lhs = height_affine(image)
            rhs = Exact.log(n + 1).scale(Fraction(1, 2)) + height_affine(pt).scale(s * n)
            order = compare(lhs, rhs)
            if order is Ordering.INCONCLUSIVE:
                note = "height comparison inconclusive"
            else:
                height_ok = order in (Ordering.LT, Ordering.EQ)
    return ApproxReport(rows_ok, sup_ok, err_ok, regular, height_ok, note)
