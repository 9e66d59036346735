"""Exact integer and rational linear algebra.

Matrices are immutable row tuples of Python ints (``IntMatrix``) or reduced
``Fraction`` objects (``RatMatrix``).  Everything here is exact; there is no
fixed-width fast path.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

__all__ = [
    "IntMatrix",
    "RatMatrix",
    "LatticeBasis",
    "hnf",
    "is_hnf",
    "smith_diagonal",
    "is_saturated",
    "kernel_lattice_basis",
    "reduced_kernel_basis",
    "defbl_bound_holds",
    "lattice_index",
    "saturate",
    "rational_nullspace",
    "solve_rational",
    "primitive",
    "as_fraction",
    "unit_preimage",
]


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions and strings like ``"3/4"`` to ``Fraction``."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not matrix entries")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot use {type(x).__name__} as an exact rational")


def _as_int(x) -> int:
    if isinstance(x, bool):
        raise TypeError("booleans are not matrix entries")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    if isinstance(x, str):
        return int(x.strip())
    raise TypeError(f"{x!r} is not an integer")


def primitive(v: Sequence[int]) -> tuple[int, ...]:
    """Divide an integer vector by the gcd of its entries."""
    g = 0
    for x in v:
        g = math.gcd(g, x)
    if g == 0:
        raise ValueError("zero vector has no primitive form")
    return tuple(x // g for x in v)


class _MatrixBase:
    """Shared behaviour; subclasses fix the entry type."""

    rows: tuple
    ncols: int

    @classmethod
    def _coerce(cls, x):
        raise NotImplementedError

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable], ncols: int | None = None):
        data = tuple(tuple(cls._coerce(x) for x in row) for row in rows)
        if ncols is None:
            if not data:
                raise ValueError("ncols required for a matrix with no rows")
            ncols = len(data[0])
        for row in data:
            if len(row) != ncols:
                raise ValueError("ragged matrix rows")
        return cls(data, ncols)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], nrows: int):
        for c in cols:
            if len(c) != nrows:
                raise ValueError("column length mismatch")
        rows = [[c[i] for c in cols] for i in range(nrows)]
        return cls.from_rows(rows, ncols=len(cols))

    @classmethod
    def identity(cls, n: int):
        return cls.from_rows([[1 if i == j else 0 for j in range(n)] for i in range(n)], ncols=n)

    @classmethod
    def zeros(cls, m: int, n: int):
        return cls.from_rows([[0] * n for _ in range(m)], ncols=n)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def col(self, j: int) -> tuple:
        return tuple(row[j] for row in self.rows)

    def columns(self) -> list[tuple]:
        return [self.col(j) for j in range(self.ncols)]

    def transpose(self):
        return type(self).from_rows(self.columns(), ncols=self.nrows)

    @property
    def T(self):
        return self.transpose()

    def sup_norm(self):
        return max((abs(x) for row in self.rows for x in row), default=0)

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]):
        return type(self).from_rows(
            [[self.rows[i][j] for j in col_idx] for i in row_idx], ncols=len(col_idx)
        )

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.rows for x in row)

    def __matmul__(self, other):
        if not isinstance(other, _MatrixBase):
            return NotImplemented
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cls = IntMatrix if isinstance(self, IntMatrix) and isinstance(other, IntMatrix) else RatMatrix
        ocols = other.columns()
        out = [[sum(a * b for a, b in zip(row, c)) for c in ocols] for row in self.rows]
        return cls.from_rows(out, ncols=other.ncols)

    def scale(self, c):
        if isinstance(self, IntMatrix) and isinstance(c, int):
            return IntMatrix.from_rows([[c * x for x in row] for row in self.rows], ncols=self.ncols)
        c = as_fraction(c)
        return RatMatrix.from_rows([[c * x for x in row] for row in self.rows], ncols=self.ncols)

    def to_rat(self) -> "RatMatrix":
        return RatMatrix.from_rows(self.rows, ncols=self.ncols)

    def det(self):
        if self.nrows != self.ncols:
            raise ValueError("determinant of a non-square matrix")
        if isinstance(self, IntMatrix):
            return _bareiss_det([list(r) for r in self.rows])
        return _fraction_det([list(r) for r in self.rows])

    def rank(self) -> int:
        return len(_row_echelon([[Fraction(x) for x in r] for r in self.rows])[1])

    def minors(self, t: int) -> Iterator[tuple[tuple[int, ...], tuple[int, ...], object]]:
        """Yield (row set, column set, determinant) over all t×t submatrices."""
        for ri in itertools.combinations(range(self.nrows), t):
            for ci in itertools.combinations(range(self.ncols), t):
                yield ri, ci, self.submatrix(ri, ci).det()

    def tolist(self) -> list[list]:
        return [list(r) for r in self.rows]

    def __str__(self) -> str:
        return "[" + "; ".join(" ".join(str(x) for x in r) for r in self.rows) + "]"


@dataclass(frozen=True)
class IntMatrix(_MatrixBase):
    rows: tuple[tuple[int, ...], ...]
    ncols: int

    @classmethod
    def _coerce(cls, x):
        return _as_int(x)


@dataclass(frozen=True)
class RatMatrix(_MatrixBase):
    rows: tuple[tuple[Fraction, ...], ...]
    ncols: int

    @classmethod
    def _coerce(cls, x):
        return as_fraction(x)

    def denominator_lcm(self) -> int:
        out = 1
        for row in self.rows:
            for x in row:
                out = out * x.denominator // math.gcd(out, x.denominator)
        return out

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for row in self.rows for x in row)

    def to_int(self) -> IntMatrix:
        if not self.is_integral():
            raise ValueError("matrix has non-integral entries")
        return IntMatrix.from_rows(self.rows, ncols=self.ncols)


def _bareiss_det(a: list[list[int]]) -> int:
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def _fraction_det(a: list[list[Fraction]]) -> Fraction:
    n = len(a)
    det = Fraction(1)
    a = [[Fraction(x) for x in r] for r in a]
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        det *= a[k][k]
        inv = 1 / a[k][k]
        for i in range(k + 1, n):
            f = a[i][k] * inv
            if f:
                for j in range(k, n):
                    a[i][j] -= f * a[k][j]
    return det


def _row_echelon(a: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form in place; returns (matrix, pivot columns)."""
    m = len(a)
    n = len(a[0]) if a else 0
    pivots: list[int] = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return a, pivots


def rational_nullspace(m: _MatrixBase) -> list[tuple[Fraction, ...]]:
    """Basis of {x : m x = 0} over Q."""
    a, pivots = _row_echelon([[Fraction(x) for x in r] for r in m.rows])
    free = [c for c in range(m.ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * m.ncols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -a[i][f]
        basis.append(tuple(v))
    return basis


def solve_rational(cols: Sequence[Sequence], v: Sequence) -> tuple[Fraction, ...] | None:
    """Coefficients c with sum_j c_j cols[j] = v, or None if v is outside the span.

    ``cols`` must be linearly independent.
    """
    k = len(cols)
    n = len(v)
    aug = [[Fraction(cols[j][i]) for j in range(k)] + [Fraction(v[i])] for i in range(n)]
    a, pivots = _row_echelon(aug)
    if k in pivots:
        return None
    if len(pivots) != k:
        raise ValueError("columns are linearly dependent")
    return tuple(a[i][k] for i in range(k))


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def hnf(m: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Column Hermite normal form: returns (H, U) with H = m·U, U unimodular.

    H is lower echelon by columns, pivots are positive and entries to the
    left of a pivot lie in [0, pivot).  Zero columns come last.
    """
    nr, nc = m.shape
    h = [list(m.col(j)) for j in range(nc)]
    u = [[1 if i == j else 0 for i in range(nc)] for j in range(nc)]
    k = 0
    for i in range(nr):
        if k == nc:
            break
        for j in range(k + 1, nc):
            y = h[j][i]
            if y == 0:
                continue
            x = h[k][i]
            g, s, t = _xgcd(x, y)
            a, b = -y // g, x // g
            hk, hj, uk, uj = h[k], h[j], u[k], u[j]
            h[k] = [s * p + t * q for p, q in zip(hk, hj)]
            h[j] = [a * p + b * q for p, q in zip(hk, hj)]
            u[k] = [s * p + t * q for p, q in zip(uk, uj)]
            u[j] = [a * p + b * q for p, q in zip(uk, uj)]
        piv = h[k][i]
        if piv == 0:
            continue
        if piv < 0:
            h[k] = [-x for x in h[k]]
            u[k] = [-x for x in u[k]]
            piv = -piv
        for j in range(k):
            q = h[j][i] // piv
            if q:
                h[j] = [p - q * r for p, r in zip(h[j], h[k])]
                u[j] = [p - q * r for p, r in zip(u[j], u[k])]
        k += 1
    return IntMatrix.from_columns(h, nr), IntMatrix.from_columns(u, nc)


def is_hnf(h: IntMatrix) -> bool:
    """Shape predicate for the column HNF convention used by :func:`hnf`."""
    nr, nc = h.shape
    k = 0
    prev_row = -1
    for j in range(nc):
        col = h.col(j)
        lead = next((i for i in range(nr) if col[i] != 0), None)
        if lead is None:
            # zero columns must all be trailing
            return all(x == 0 for jj in range(j, nc) for x in h.col(jj))
        if lead <= prev_row or col[lead] <= 0:
            return False
        for jj in range(j):
            if not 0 <= h[lead, jj] < col[lead]:
                return False
        prev_row = lead
        k += 1
    return True


def smith_diagonal(m: IntMatrix) -> list[int]:
    """Nonzero elementary divisors d_1 | d_2 | ... of m."""
    a = [list(r) for r in m.rows]
    nr, nc = m.shape
    out: list[int] = []
    t = 0
    while t < min(nr, nc):
        nz = [(abs(a[i][j]), i, j) for i in range(t, nr) for j in range(t, nc) if a[i][j] != 0]
        if not nz:
            break
        _, pi, pj = min(nz)
        a[t], a[pi] = a[pi], a[t]
        for row in a:
            row[t], row[pj] = row[pj], row[t]
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, nr):
                q = a[i][t] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                if a[i][t]:
                    dirty = True
            for j in range(t + 1, nc):
                q = a[t][j] // p
                if q:
                    for row in a:
                        row[j] -= q * row[t]
                if a[t][j]:
                    dirty = True
            if not dirty:
                bad = next(
                    ((i, j) for i in range(t + 1, nr) for j in range(t + 1, nc) if a[i][j] % p),
                    None,
                )
                if bad is None:
                    break
                a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
                continue
            # move the smallest nonzero entry of row/column t to the pivot
            cand = [(abs(a[i][t]), i, t) for i in range(t, nr) if a[i][t]]
            cand += [(abs(a[t][j]), t, j) for j in range(t, nc) if a[t][j]]
            _, pi, pj = min(cand)
            a[t], a[pi] = a[pi], a[t]
            for row in a:
                row[t], row[pj] = row[pj], row[t]
        out.append(abs(a[t][t]))
        t += 1
    return out


def is_saturated(b: IntMatrix) -> bool:
    """True iff the columns are independent and generate span ∩ Z^n."""
    divisors = smith_diagonal(b)
    return len(divisors) == b.ncols and all(d == 1 for d in divisors)


@dataclass(frozen=True)
class LatticeBasis:
    """Columns v_1..v_k of a saturated sublattice of Z^n."""

    n: int
    columns: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for c in self.columns:
            if len(c) != self.n:
                raise ValueError("basis vector has wrong length")
        if self.columns and self.matrix.rank() != len(self.columns):
            raise ValueError("basis vectors are linearly dependent")

    @classmethod
    def of(cls, n: int, cols: Iterable[Sequence[int]]) -> "LatticeBasis":
        return cls(n, tuple(tuple(_as_int(x) for x in c) for c in cols))

    @property
    def rank(self) -> int:
        return len(self.columns)

    @property
    def matrix(self) -> IntMatrix:
        return IntMatrix.from_columns(self.columns, self.n)

    def is_saturated(self) -> bool:
        return self.rank == 0 or is_saturated(self.matrix)

    def norm_product(self) -> int:
        out = 1
        for c in self.columns:
            out *= max(abs(x) for x in c)
        return out

    def same_span(self, other: "LatticeBasis") -> bool:
        if self.n != other.n or self.rank != other.rank:
            return False
        if self.rank == 0:
            return True
        stacked = IntMatrix.from_columns(self.columns + other.columns, self.n)
        return stacked.rank() == self.rank


def _sign_normalize(v: Sequence[int]) -> tuple[int, ...]:
    for x in v:
        if x:
            return tuple(v) if x > 0 else tuple(-y for y in v)
    return tuple(v)


def kernel_lattice_basis(psi: IntMatrix) -> LatticeBasis:
    """Basis of ker(psi) ∩ Z^n for psi of full row rank."""
    s, n = psi.shape
    if psi.rank() != s:
        raise ValueError("not full rank")
    _, u = hnf(psi)
    cols = [_sign_normalize(u.col(j)) for j in range(s, n)]
    return LatticeBasis(n, tuple(cols))


def saturate(vectors: Sequence[Sequence[int]], n: int) -> LatticeBasis:
    """Basis of Z^n ∩ span(vectors)."""
    vectors = [tuple(v) for v in vectors if any(v)]
    if not vectors:
        return LatticeBasis(n, ())
    a = RatMatrix.from_rows(vectors, ncols=n)
    _, pivots = _row_echelon([[Fraction(x) for x in r] for r in a.transpose().rows])
    indep = IntMatrix.from_rows([vectors[i] for i in pivots], ncols=n)
    if indep.nrows == n:
        return LatticeBasis(n, tuple(tuple(int(i == j) for i in range(n)) for j in range(n)))
    perp = kernel_lattice_basis(indep)
    return kernel_lattice_basis(perp.matrix.transpose())


def _sup(v: Sequence[int]) -> int:
    return max(abs(x) for x in v)


def _best_multiple(v: Sequence[int], w: Sequence[int]) -> int:
    """Integer k minimising |v - k w|_inf (convex in k, so walk downhill)."""
    l = max(range(len(w)), key=lambda i: abs(w[i]))
    k = round(Fraction(v[l], w[l]))

    def f(t):
        return max(abs(a - t * b) for a, b in zip(v, w))

    best = f(k)
    for step in (1, -1):
        while True:
            val = f(k + step)
            if val < best:
                k, best = k + step, val
            else:
                break
    return k


def _greedy_reduce(vecs: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    vecs = list(vecs)
    changed = True
    while changed:
        changed = False
        for i in range(len(vecs)):
            for j in range(len(vecs)):
                if i == j:
                    continue
                k = _best_multiple(vecs[i], vecs[j])
                if k:
                    cand = tuple(a - k * b for a, b in zip(vecs[i], vecs[j]))
                    if _sup(cand) < _sup(vecs[i]):
                        vecs[i] = cand
                        changed = True
    return sorted((_sign_normalize(v) for v in vecs), key=lambda v: (_sup(v), v))


# Enumeration budget for the exhaustive short-vector search.
_ENUM_LIMIT = 4_000_000


def _short_independent(base: LatticeBasis, radius: int) -> list[tuple[int, ...]]:
    """Vectors attaining the successive minima (sup norm) of the lattice.

    Lattice points with |x|_inf <= radius are enumerated through r
    coordinates on which the basis is invertible; ``radius`` must be large
    enough that r independent vectors exist in the box.
    """
    r, n = base.rank, base.n
    b = base.matrix
    best_rows, best_det = None, 0
    for rows in itertools.combinations(range(n), r):
        d = b.submatrix(rows, range(r)).det()
        if abs(d) > abs(best_det):
            best_rows, best_det = rows, d
    if (2 * radius + 1) ** r // 2 > _ENUM_LIMIT:
        raise ValueError("short-vector search beyond desk scale")
    bi = b.submatrix(best_rows, range(r))
    adj = _adjugate(bi)
    det = best_det
    found: list[tuple[int, tuple[int, ...]]] = []
    for xi in itertools.product(range(-radius, radius + 1), repeat=r):
        first = next((x for x in xi if x), 0)
        if first <= 0:
            continue
        num = [sum(adj[i][j] * xi[j] for j in range(r)) for i in range(r)]
        if any(t % det for t in num):
            continue
        c = [t // det for t in num]
        x = tuple(sum(b.rows[i][j] * c[j] for j in range(r)) for i in range(n))
        s = _sup(x)
        if s <= radius:
            found.append((s, _sign_normalize(x)))
    found.sort()
    chosen: list[tuple[int, ...]] = []
    for _, x in found:
        if IntMatrix.from_rows(chosen + [x], ncols=n).rank() > len(chosen):
            chosen.append(x)
            if len(chosen) == r:
                break
    if len(chosen) < r:
        raise ValueError("radius too small for the short-vector search")
    return chosen


def _adjugate(m: IntMatrix) -> list[list[int]]:
    k = m.nrows
    if k == 1:
        return [[1]]
    adj = [[0] * k for _ in range(k)]
    for i in range(k):
        for j in range(k):
            minor = m.submatrix([a for a in range(k) if a != j], [c for c in range(k) if c != i])
            adj[i][j] = (-1) ** (i + j) * minor.det()
    return adj


def _mahler_complete(short: list[tuple[int, ...]], n: int) -> list[tuple[int, ...]]:
    """Turn independent lattice vectors v'_1..v'_r (sorted by norm) into a basis.

    The k-th output lies in span(v'_1..v'_k) and has sup norm at most
    k·|v'_k|; the outputs form a basis of Z^n ∩ span(v'_1..v'_r).
    """
    basis: list[tuple[int, ...]] = []
    for k in range(1, len(short) + 1):
        lam = saturate(short[:k], n)
        coords_prev = [tuple(int(c) for c in solve_rational(lam.columns, v)) for v in basis]
        if k == 1:
            f = (1,)
        else:
            a_t = IntMatrix.from_rows(coords_prev, ncols=k)
            f = kernel_lattice_basis(a_t).columns[0]
        z = unit_preimage(f)
        w = tuple(sum(lam.columns[j][i] * z[j] for j in range(k)) for i in range(n))
        vk = short[k - 1]
        c = sum(fi * int(ci) for fi, ci in zip(f, solve_rational(lam.columns, vk)))
        if k == 1:
            cand = w
        else:
            diff = [Fraction(x) - Fraction(y, c) for x, y in zip(w, vk)]
            y = solve_rational(short[: k - 1], diff)
            cand = tuple(
                x - sum(round(y[j]) * short[j][i] for j in range(k - 1)) for i, x in enumerate(w)
            )
        if _sup(cand) > k * _sup(vk):
            raise AssertionError("basis completion exceeded its norm guarantee")
        basis.append(_sign_normalize(cand))
    return basis


def unit_preimage(f: Sequence[int]) -> list[int]:
    """Integer z with f·z = 1 for a primitive integer vector f."""
    z = [0] * len(f)
    g = 0
    for i, fi in enumerate(f):
        if fi == 0:
            continue
        if g == 0:
            g, z[i] = abs(fi), (1 if fi > 0 else -1)
            continue
        g2, s, t = _xgcd(g, fi)
        z = [s * x for x in z]
        z[i] = t
        g = g2
    if g != 1:
        raise ValueError("functional is not primitive")
    return z


def defbl_bound_holds(psi: IntMatrix, basis: LatticeBasis) -> bool:
    """Check prod |v_k|_inf <= r!·n^((n-r)/2)·|psi|_inf^(n-r), squared to stay integral."""
    n = psi.ncols
    r = n - psi.rank()
    lhs = basis.norm_product()
    rhs_sq = math.factorial(r) ** 2 * n ** (n - r) * psi.sup_norm() ** (2 * (n - r))
    return lhs * lhs <= rhs_sq


def reduced_kernel_basis(psi: IntMatrix) -> LatticeBasis:
    """Basis of ker(psi) ∩ Z^n with a small product of sup norms.

    A greedy pairwise reduction usually suffices; when the norm-product
    bound is not met, the successive minima are found by enumeration and
    completed to a basis.
    """
    base = kernel_lattice_basis(psi)
    if base.rank == 0:
        return base
    greedy = _mahler_complete(_greedy_reduce(list(base.columns)), psi.ncols)
    cand = LatticeBasis(psi.ncols, tuple(greedy))
    if defbl_bound_holds(psi, cand):
        return cand
    radius = max(_sup(v) for v in greedy)
    short = _short_independent(cand, radius)
    out = LatticeBasis(psi.ncols, tuple(_mahler_complete(short, psi.ncols)))
    if not defbl_bound_holds(psi, out):
        raise AssertionError("norm-product bound failed after exhaustive search")
    return out


def lattice_index(phi: IntMatrix, b: LatticeBasis) -> int:
    """|det(phi·B)|, the index of phi(lattice) in Z^r (0 if rank drops)."""
    if b.rank != phi.nrows or b.n != phi.ncols:
        raise ValueError(
            f"dimension mismatch: phi is {phi.shape}, basis has {b.rank} columns in Z^{b.n}"
        )
    if b.rank == 0:
        return 1
    return abs((phi @ b.matrix).det())
