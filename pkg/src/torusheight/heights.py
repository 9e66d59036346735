"""Logarithmic Weil heights over Q and of single algebraic numbers.

Heights of rational data are returned as :class:`Exact` values
``coef * log(arg)``; everything else is an :class:`Approx` value carrying a
rigorous absolute error.  Exact values are kept in a canonical form so that
equality is structural.
"""

from __future__ import annotations

import contextlib
import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Mapping, Sequence, Union

import mpmath
import numpy as np
import sympy
from mpmath import iv

from .lattice import RatMatrix, as_fraction, rational_nullspace

__all__ = [
    "Exact",
    "Approx",
    "HeightValue",
    "Ordering",
    "compare",
    "render",
    "interval",
    "ProjPoint",
    "AlgNumber",
    "AlgebraicHeightReport",
    "local_logs",
    "height_l2",
    "height_affine",
    "height_sup",
    "matrix_height",
    "subspace_height",
    "orthogonal_complement",
    "poly_height",
    "certified_roots",
    "algebraic_height",
    "algebraic_height_report",
    "multinomial_valuation_bound",
    "MultinomialValuation",
]

# Exact sums whose combined argument would exceed this many bits fall back
# to interval evaluation.
_EXACT_BIT_CAP = 200_000

_PRECISION_LADDER = (64, 256, 1024)
_SMALL_PRIMES = tuple(sympy.primerange(2, 200))


def _integer_perfect_power(n: int) -> tuple[int, int]:
    """n = b**k with k maximal, for n >= 2.

    sympy.perfect_power goes through floats and overflows on large inputs.
    """
    k = 1
    changed = True
    while changed:
        changed = False
        # any exponent divides the multiplicity of each small prime factor
        g = 0
        for q in _SMALL_PRIMES:
            if n % q == 0:
                g = math.gcd(g, _vp(n, q))
                if g == 1:
                    return n, k
        candidates = sympy.primefactors(g) if g else sympy.primerange(2, n.bit_length() + 1)
        for p in candidates:
            root, exact = sympy.integer_nthroot(n, p)
            if exact:
                n, k, changed = int(root), k * p, True
                break
    return n, k


def _rational_perfect_power(x: Fraction) -> tuple[Fraction, int]:
    """Write x > 0 as b**e with e maximal."""
    exps = []
    bases = []
    for part in (x.numerator, x.denominator):
        if part == 1:
            exps.append(0)
            bases.append(1)
            continue
        b, k = _integer_perfect_power(part)
        bases.append(b)
        exps.append(k)
    e = math.gcd(exps[0], exps[1])
    if e <= 1:
        return x, 1
    num = bases[0] ** (exps[0] // e) if x.numerator != 1 else 1
    den = bases[1] ** (exps[1] // e) if x.denominator != 1 else 1
    return Fraction(num, den), e


@dataclass(frozen=True)
class Exact:
    """The real number coef·log(arg), arg a positive rational.

    Stored canonically: arg > 1 and not a perfect power, or arg = 1 and coef = 0.
    """

    coef: Fraction
    arg: Fraction

    def __post_init__(self):
        coef = as_fraction(self.coef)
        arg = as_fraction(self.arg)
        if arg <= 0:
            raise ValueError("logarithm of a non-positive number")
        if coef == 0 or arg == 1:
            coef, arg = Fraction(0), Fraction(1)
        else:
            if arg < 1:
                arg, coef = 1 / arg, -coef
            base, e = _rational_perfect_power(arg)
            arg, coef = base, coef * e
        object.__setattr__(self, "coef", coef)
        object.__setattr__(self, "arg", arg)

    @classmethod
    def log(cls, x) -> "Exact":
        return cls(Fraction(1), as_fraction(x))

    @classmethod
    def zero(cls) -> "Exact":
        return cls(Fraction(0), Fraction(1))

    def is_zero(self) -> bool:
        return self.coef == 0

    def sign(self) -> int:
        return (self.coef > 0) - (self.coef < 0)

    def __neg__(self) -> "Exact":
        return Exact(-self.coef, self.arg)

    def scale(self, c) -> "Exact":
        return Exact(self.coef * as_fraction(c), self.arg)

    def __add__(self, other):
        if isinstance(other, Exact):
            out = _exact_sum([self, other])
            return out if out is not None else _to_approx(self) + _to_approx(other)
        if isinstance(other, Approx):
            return _to_approx(self) + other
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def interval(self, prec: int):
        with _ivprec(prec):
            if self.coef == 0:
                return iv.mpf(0)
            c = iv.mpf(self.coef.numerator) / self.coef.denominator
            a = iv.mpf(self.arg.numerator) / self.arg.denominator
            return c * iv.log(a)

    def to_mpf(self, prec: int = 256):
        with mpmath.workprec(prec + 20):
            if self.coef == 0:
                v = mpmath.mpf(0)
            else:
                v = mpmath.mpf(self.coef.numerator) / self.coef.denominator * mpmath.log(
                    mpmath.mpf(self.arg.numerator) / self.arg.denominator
                )
        with mpmath.workprec(prec):
            return +v

    def __float__(self) -> float:
        return float(self.to_mpf(64))

    def __str__(self) -> str:
        if self.coef == 0:
            return "0"
        c = "" if self.coef == 1 else f"{self.coef}*"
        return f"{c}log({self.arg})"


def _exact_sum(terms: Sequence[Exact]) -> Exact | None:
    terms = [t for t in terms if t.coef != 0]
    if not terms:
        return Exact.zero()
    lcm = reduce(lambda a, b: a * b // math.gcd(a, b), (t.coef.denominator for t in terms), 1)
    bits = sum(abs(t.coef * lcm) * (t.arg.numerator.bit_length() + t.arg.denominator.bit_length()) for t in terms)
    if bits > _EXACT_BIT_CAP:
        return None
    prod = Fraction(1)
    for t in terms:
        e = int(t.coef * lcm)
        prod *= t.arg**e
    return Exact(Fraction(1, lcm), prod)


@dataclass(frozen=True)
class Approx:
    """A real number known to lie in [value - abs_err, value + abs_err].

    ``value`` and ``abs_err`` are mpmath numbers so that the enclosure can be
    as tight as the requested precision.
    """

    value: mpmath.mpf
    abs_err: mpmath.mpf
    note: str = ""

    @classmethod
    def from_interval(cls, x, note: str = "") -> "Approx":
        lo, hi = _ends(x)
        prec = max(lo._mpf_[3], hi._mpf_[3], 64) + 8
        with mpmath.workprec(prec):
            mid = (lo + hi) / 2
        with _ivprec(prec):
            up = iv.mpf(hi) - iv.mpf(mid)
            down = iv.mpf(mid) - iv.mpf(lo)
            err = max(_ends(up)[1], _ends(down)[1])
        return cls(mid, err, note)

    def interval(self, prec: int):
        with _ivprec(prec):
            v = iv.mpf(self.value)
            e = iv.mpf(self.abs_err)
            return iv.mpf([_ends(v - e)[0], _ends(v + e)[1]])

    def to_mpf(self, prec: int = 256):
        with mpmath.workprec(prec):
            return +self.value

    def __float__(self) -> float:
        return float(self.value)

    def __neg__(self) -> "Approx":
        return Approx(-self.value, self.abs_err, self.note)

    def __add__(self, other):
        if isinstance(other, Exact):
            other = _to_approx(other)
        if not isinstance(other, Approx):
            return NotImplemented
        x = _iv_add(self.interval(1024), other.interval(1024))
        return Approx.from_interval(x)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __str__(self) -> str:
        return f"{mpmath.nstr(self.value, 20)} +/- {mpmath.nstr(self.abs_err, 3)}"


@contextlib.contextmanager
def _ivprec(prec: int):
    old = iv.prec
    iv.prec = prec
    try:
        yield
    finally:
        iv.prec = old


def _ends(x) -> tuple[mpmath.mpf, mpmath.mpf]:
    """Endpoints of an mpmath interval as exact mpf values."""
    lo, hi = x._mpi_
    return mpmath.mp.make_mpf(lo), mpmath.mp.make_mpf(hi)


def _iv_add(a, b):
    with _ivprec(1024):
        return a + b


def _to_approx(e: Exact, prec: int = 1024) -> Approx:
    return Approx.from_interval(e.interval(prec))


HeightValue = Union[Exact, Approx]


class Ordering(enum.Enum):
    LT = "<"
    EQ = "="
    GT = ">"
    INCONCLUSIVE = "inconclusive"


def interval(h: HeightValue, prec: int):
    return h.interval(prec)


def render(h: HeightValue, prec: int = 256):
    """Deterministic mpmath rendering at ``prec`` bits."""
    return h.to_mpf(prec)


def compare(a: HeightValue, b: HeightValue) -> Ordering:
    """Three-way comparison; exact when both sides are Exact.

    Otherwise interval arithmetic at 64, 256 and 1024 bits; if the enclosures
    still overlap the answer is INCONCLUSIVE.
    """
    if isinstance(a, Exact) and isinstance(b, Exact):
        diff = _exact_sum([a, -b])
        if diff is not None:
            return {1: Ordering.GT, 0: Ordering.EQ, -1: Ordering.LT}[diff.sign()]
    for prec in _PRECISION_LADDER:
        (alo, ahi), (blo, bhi) = _ends(a.interval(prec)), _ends(b.interval(prec))
        if ahi < blo:
            return Ordering.LT
        if alo > bhi:
            return Ordering.GT
    return Ordering.INCONCLUSIVE


def _exact_le(a: HeightValue, b: HeightValue) -> bool:
    return compare(a, b) in (Ordering.LT, Ordering.EQ)


def _content(values: Sequence[Fraction]) -> Fraction:
    """Positive rational c with values/c coprime integers."""
    nz = [v for v in values if v != 0]
    if not nz:
        raise ValueError("content of the zero vector")
    lcm = reduce(lambda a, b: a * b // math.gcd(a, b), (v.denominator for v in nz), 1)
    g = 0
    for v in nz:
        g = math.gcd(g, (v * lcm).numerator)
    return Fraction(g, lcm)


def _coprime_integers(values: Sequence[Fraction]) -> tuple[int, ...]:
    c = _content(values)
    return tuple(int(v / c) for v in values)


@dataclass(frozen=True)
class ProjPoint:
    """A point [p_0 : ... : p_n] of projective space over Q."""

    coords: tuple[Fraction, ...]

    def __init__(self, coords: Sequence):
        cs = tuple(as_fraction(c) for c in coords)
        if not cs or all(c == 0 for c in cs):
            raise ValueError("zero vector is not a projective point")
        object.__setattr__(self, "coords", cs)

    def normalized(self) -> tuple[int, ...]:
        """Coprime integer coordinates (the overall sign is kept)."""
        return _coprime_integers(self.coords)


def local_logs(x) -> list[tuple[object, Exact]]:
    """Every place v with |x|_v != 1 and the value log|x|_v.

    The infinite place is reported as ``"inf"``, finite places by their
    prime.
    """
    x = as_fraction(x)
    if x == 0:
        raise ValueError("zero has no absolute values")
    out: list[tuple[object, Exact]] = []
    if abs(x) != 1:
        out.append(("inf", Exact.log(abs(x))))
    for p, e in sorted(sympy.factorint(abs(x.numerator)).items()):
        out.append((int(p), Exact(Fraction(-e), int(p))))
    for p, e in sorted(sympy.factorint(x.denominator).items()):
        out.append((int(p), Exact(Fraction(e), int(p))))
    return out


def height_l2(p: ProjPoint | Sequence) -> Exact:
    """h(p) with the l2 norm at the infinite place."""
    if not isinstance(p, ProjPoint):
        p = ProjPoint(p)
    x = p.normalized()
    return Exact(Fraction(1, 2), sum(t * t for t in x))


def height_affine(p: Sequence) -> Exact:
    """h of a point of G_m^n or Q^n, viewed as [1 : p_1 : ... : p_n]."""
    return height_l2([1, *p])


def height_sup(p: Sequence) -> Exact:
    """h_s(p) = log max|x_i| over the coprime normalisation of [1 : p]."""
    cs = [as_fraction(c) for c in p]
    if any(c == 0 for c in cs):
        raise ValueError("point has a zero coordinate")
    x = _coprime_integers([Fraction(1), *cs])
    return Exact.log(max(abs(t) for t in x))


def matrix_height(a: RatMatrix, t: int) -> Exact:
    """h_t(A) over Q: ½log(sum of squared t-minors) minus log of their content."""
    if not isinstance(a, RatMatrix):
        a = a.to_rat()
    if t < 1:
        raise ValueError("t must be positive")
    if t > min(a.shape) or t > a.rank():
        raise ValueError("t exceeds the rank")
    dets = [d for _, _, d in a.minors(t)]
    c = _content(dets)
    s = sum(d * d for d in dets)
    return Exact(Fraction(1, 2), s / (c * c))


def subspace_height(v: RatMatrix) -> Exact:
    """Height of the column span of v (basis independent)."""
    if not isinstance(v, RatMatrix):
        v = v.to_rat()
    k = v.ncols
    if k == 0:
        return Exact.zero()
    if v.rank() != k:
        raise ValueError("basis columns are dependent")
    return matrix_height(v, k)


def orthogonal_complement(v: RatMatrix) -> RatMatrix:
    """Columns spanning the orthogonal complement of the column span of v."""
    basis = rational_nullspace(v.transpose())
    return RatMatrix.from_columns(basis, v.nrows)


def _multinomial(exps: Sequence[int]) -> int:
    out = math.factorial(sum(exps))
    for e in exps:
        out //= math.factorial(e)
    return out


def _vp(x: int, p: int) -> int:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def poly_height(poly: Mapping[Sequence[int], object]) -> Exact:
    """Height of the coefficient vector ι(P), ι(X^i) = binom(a, i)^(-1/2) e_i.

    All absolute values of binom^(-1/2) are square roots of rational
    absolute values, so the height is ½log of a positive rational.
    """
    terms = {tuple(k): as_fraction(c) for k, c in poly.items() if as_fraction(c) != 0}
    if not terms:
        raise ValueError("zero polynomial")
    degs = {sum(k) for k in terms}
    if len(degs) != 1:
        raise ValueError("polynomial is not homogeneous")
    if any(e < 0 for k in terms for e in k):
        raise ValueError("negative exponent")
    weights = {k: _multinomial(k) for k in terms}
    s = sum(c * c / weights[k] for k, c in terms.items())
    primes: set[int] = set()
    for k, c in terms.items():
        for part in (c.numerator, c.denominator, weights[k]):
            primes.update(int(p) for p in sympy.factorint(abs(part)))
    finite = Fraction(1)
    for p in sorted(primes):
        # twice the local exponent: max_i (-2 v_p(P_i) + v_p(binom_i))
        e2 = max(
            -2 * (_vp(c.numerator, p) - _vp(c.denominator, p)) + _vp(weights[k], p)
            for k, c in terms.items()
        )
        finite *= Fraction(p) ** e2
    return Exact(Fraction(1, 2), s * finite)


@dataclass(frozen=True)
class MultinomialValuation:
    valuation: int
    lower_bound: int
    holds: bool


def multinomial_valuation_bound(k: int, alpha: Sequence[int], p: int) -> MultinomialValuation:
    """Exact -v_p(binom(k; alpha)) against -(n+1)·floor(log_p k) (0 when p > k).

    ``lower_bound`` is the bound on log|binom|_p / log p; ``holds`` compares
    it with the exact value, and the weaker -(n+1)·log k/log p bound follows
    since floor(log_p k) <= log_p k.
    """
    if sum(alpha) != k or any(a < 0 for a in alpha):
        raise ValueError("alpha must be a multi-index with |alpha|_1 = k")
    if not sympy.isprime(p):
        raise ValueError("p must be prime")
    val = 0
    pe = p
    while pe <= k:
        val += k // pe - sum(a // pe for a in alpha)
        pe *= p
    if p <= k:
        e = 0
        while p ** (e + 1) <= k:
            e += 1
        bound = -len(alpha) * e
    else:
        bound = 0
    return MultinomialValuation(val, bound, -val >= bound)


# ---------------------------------------------------------------------------
# algebraic numbers


@dataclass(frozen=True)
class AlgNumber:
    """A root of an integer polynomial (coefficients highest degree first).

    ``root`` indexes the roots sorted by (real part, imaginary part);
    ``minimal`` is True, or None when minimality is unknown.
    """

    coeffs: tuple[int, ...]
    root: int = 0
    minimal: bool | None = None

    def __post_init__(self):
        cs = tuple(int(c) for c in self.coeffs)
        while cs and cs[0] == 0:
            cs = cs[1:]
        if len(cs) < 2:
            raise ValueError("defining polynomial must have positive degree")
        object.__setattr__(self, "coeffs", cs)
        if not 0 <= self.root < len(cs) - 1:
            raise ValueError("root index out of range")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


@dataclass(frozen=True)
class RootDisk:
    center: mpmath.mpc
    radius: mpmath.mpf


def _cx_iv(z):
    return iv.mpc(iv.mpf(z.real), iv.mpf(z.imag))


def _newton(coeffs: Sequence[int], z, steps: int = 200):
    p = [mpmath.mpf(c) for c in coeffs]
    dp = [c * (len(p) - 1 - i) for i, c in enumerate(p[:-1])]
    eps = mpmath.mpf(2) ** (-mpmath.mp.prec + 4)
    prev = None
    for _ in range(steps):
        f = mpmath.polyval(p, z)
        d = mpmath.polyval(dp, z)
        if d == 0:
            break
        step = f / d
        z -= step
        size = abs(step)
        if size <= eps * max(1, abs(z)):
            break
        # quadratic convergence has stalled at the rounding floor
        if prev is not None and size > prev / 2 and size < mpmath.mpf(2) ** (-mpmath.mp.prec // 2):
            break
        prev = size
    return z


def certified_roots(coeffs: Sequence[int], prec: int = 128) -> list[RootDisk]:
    """Disjoint disks each containing exactly one root of a squarefree polynomial.

    Starting points are companion-matrix eigenvalues, refined by Newton's
    method at ``prec`` bits.  Each disk has radius d·|W_i| with W_i the
    Weierstrass correction, bounded above in interval arithmetic; pairwise
    disjoint disks of this kind isolate the roots.
    """
    coeffs = [int(c) for c in coeffs]
    d = len(coeffs) - 1
    if d < 1:
        return []
    with mpmath.workprec(prec + 32):
        if d == 1:
            centers = [mpmath.mpc(mpmath.mpf(-coeffs[1]) / coeffs[0])]
        else:
            init = np.roots(np.array([float(c) for c in coeffs], dtype=float))
            centers = [_newton(coeffs, mpmath.mpc(complex(z))) for z in init]
            if _too_close(centers, prec):
                centers = list(mpmath.polyroots(coeffs, maxsteps=400, extraprec=2 * prec))
                centers = [_newton(coeffs, mpmath.mpc(z)) for z in centers]
    with _ivprec(prec + 32):
        cz = [_cx_iv(z) for z in centers]
        lead = iv.mpf(coeffs[0])
        radii = []
        for i in range(d):
            val = iv.mpf(0)
            for c in coeffs:
                val = val * cz[i] + c
            den = lead
            for j in range(d):
                if j != i:
                    den = den * (cz[i] - cz[j])
            absden = abs(den)
            if _ends(absden)[0] <= 0:
                raise ArithmeticError("root approximations collide")
            radii.append(_ends(d * abs(val) / absden)[1])
        for i in range(d):
            for j in range(i + 1, d):
                dist = _ends(abs(cz[i] - cz[j]))[0]
                if not dist > _ends(iv.mpf(radii[i]) + iv.mpf(radii[j]))[1]:
                    raise ArithmeticError("root disks overlap; increase precision")
    disks = [RootDisk(z, r) for z, r in zip(centers, radii)]
    disks.sort(key=lambda D: (D.center.real, D.center.imag))
    return disks


def _too_close(centers, prec) -> bool:
    tol = mpmath.mpf(2) ** (-prec // 4)
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            if abs(centers[i] - centers[j]) < tol:
                return True
    return False


def _roots_with_escalation(coeffs: Sequence[int], prec: int) -> tuple[list[RootDisk], int]:
    while True:
        try:
            return certified_roots(coeffs, prec), prec
        except ArithmeticError:
            if prec >= 8192:
                raise
            prec *= 2


def _log_mahler_interval(coeffs: Sequence[int], disks: Sequence[RootDisk], prec: int):
    with _ivprec(prec + 32):
        total = iv.log(iv.mpf(abs(coeffs[0])))
        for D in disks:
            c = abs(_cx_iv(D.center))
            r = iv.mpf(D.radius)
            lo = _ends(c - r)[0]
            hi = _ends(c + r)[1]
            lo_log = _ends(iv.log(iv.mpf(lo)))[0] if lo > 1 else mpmath.mpf(0)
            hi_log = _ends(iv.log(iv.mpf(hi)))[1] if hi > 1 else mpmath.mpf(0)
            total = total + iv.mpf([lo_log, hi_log])
        return total


def _poly_from_coeffs(coeffs: Sequence[int]) -> sympy.Poly:
    x = sympy.Symbol("x")
    return sympy.Poly([int(c) for c in coeffs], x, domain="ZZ")


def _int_coeffs(poly: sympy.Poly) -> tuple[int, ...]:
    cs = [int(c) for c in poly.all_coeffs()]
    if cs[0] < 0:
        cs = [-c for c in cs]
    g = reduce(math.gcd, cs)
    return tuple(c // g for c in cs)


_SMALL_PRIMES = [int(p) for p in sympy.primerange(3, 400)]


def _modp_irreducibility(coeffs: Sequence[int], max_primes: int = 40) -> list[int] | None:
    """Primes whose factorisation degree patterns rule out every proper factor.

    Returns the list of primes used as a certificate, or None.
    """
    d = len(coeffs) - 1
    if d <= 1:
        return []
    possible = set(range(1, d))
    used = []
    poly = _poly_from_coeffs(coeffs)
    tried = 0
    for p in _SMALL_PRIMES:
        if tried >= max_primes:
            break
        if coeffs[0] % p == 0:
            continue
        pp = sympy.Poly(poly.all_coeffs(), poly.gen, modulus=p)
        if sympy.gcd(pp, pp.diff()).degree() > 0:
            continue
        tried += 1
        degs = [f.degree() for f, e in pp.factor_list()[1] for _ in range(e)]
        sums = {0}
        for k in degs:
            sums |= {s + k for s in sums}
        new = possible & sums
        if new != possible:
            used.append(p)
            possible = new
        if not possible:
            return used
    return None


def _rational_roots(coeffs: Sequence[int]) -> list[Fraction]:
    """Rational roots via the rational root theorem."""
    cs = list(coeffs)
    roots = []
    shift = 0
    while cs and cs[-1] == 0:
        cs.pop()
        shift += 1
    if shift:
        roots.append(Fraction(0))
    if len(cs) <= 1:
        return roots
    lead, const = abs(cs[0]), abs(cs[-1])
    for q in sympy.divisors(lead):
        for p in sympy.divisors(const):
            if math.gcd(p, q) != 1:
                continue
            for cand in (Fraction(p, q), Fraction(-p, q)):
                val = Fraction(0)
                for c in cs:
                    val = val * cand + c
                if val == 0:
                    roots.append(cand)
    return sorted(set(roots))


@dataclass(frozen=True)
class AlgebraicHeightReport:
    height: HeightValue
    minimal_poly: tuple[int, ...]
    certificate: str
    minimal: bool


def _closest_factor(factors: Sequence[tuple[int, ...]], z) -> tuple[int, ...]:
    best, best_val = None, None
    for f in factors:
        with mpmath.workprec(256):
            v = abs(mpmath.polyval([mpmath.mpf(c) for c in f], z))
            scale = sum(abs(c) for c in f) * max(1, abs(z)) ** (len(f) - 1)
            v = v / scale
        if best_val is None or v < best_val:
            best, best_val = f, v
    return best


def algebraic_height_report(
    t: AlgNumber, tol=mpmath.mpf(2) ** -60, split: bool = True
) -> AlgebraicHeightReport:
    """h(t) = (1/deg)(log|lead| + Σ log⁺|root|) of the minimal polynomial of t.

    Minimality: squarefree check, rational root extraction, then a degree
    pattern certificate modulo small primes.  Without a certificate the
    polynomial is split by a complete factorisation over Z when ``split`` is
    set; otherwise the bracket [0, log M(P)] is returned flagged non-minimal.
    """
    poly = _poly_from_coeffs(t.coeffs)
    if sympy.gcd(poly, poly.diff()).degree() > 0:
        raise ValueError("defining polynomial is not squarefree")
    disks, prec = _roots_with_escalation(t.coeffs, 128)
    z = disks[t.root].center
    coeffs = tuple(t.coeffs)
    cert = "given"
    if t.minimal is not True:
        rat = _rational_roots(coeffs)
        hit = None
        for q in rat:
            if abs(z - mpmath.mpf(q.numerator) / q.denominator) <= disks[t.root].radius + mpmath.mpf(2) ** -40:
                hit = q
        if hit is not None:
            return AlgebraicHeightReport(
                Exact.log(max(abs(hit.numerator), hit.denominator)),
                (hit.denominator, -hit.numerator),
                "rational root",
                True,
            )
        rest = poly
        x = poly.gen
        for q in rat:
            rest = sympy.Poly(sympy.quo(rest, sympy.Poly(q.denominator * x - q.numerator, x)), x, domain="ZZ")
        coeffs = _int_coeffs(rest)
        modp = _modp_irreducibility(coeffs)
        if modp is not None:
            cert = "irreducible mod primes " + ",".join(map(str, modp)) if modp else "linear"
        elif split:
            factors = [_int_coeffs(f) for f, _ in rest.factor_list()[1]]
            factors = [f for f in factors if len(f) > 1]
            coeffs = _closest_factor(factors, z)
            modp = _modp_irreducibility(coeffs)
            cert = (
                "irreducible mod primes " + ",".join(map(str, modp))
                if modp
                else "complete factorisation over Z"
            )
        else:
            disks_r, prec_r = _roots_with_escalation(coeffs, prec)
            m = _log_mahler_interval(coeffs, disks_r, prec_r)
            with _ivprec(prec_r + 32):
                bracket = iv.mpf([0, _ends(m)[1]])
            return AlgebraicHeightReport(
                Approx.from_interval(bracket, note="non-minimal"), coeffs, "none", False
            )
    if len(coeffs) == 2:
        a, b = coeffs
        q = Fraction(-b, a)
        return AlgebraicHeightReport(
            Exact.log(max(abs(q.numerator), q.denominator)), coeffs, cert, True
        )
    tol = mpmath.mpf(tol)
    prec = max(prec, 128)
    reuse = tuple(coeffs) == tuple(t.coeffs)
    while True:
        if reuse:
            disks_f, reuse = disks, False
        else:
            disks_f, prec = _roots_with_escalation(coeffs, prec)
        m = _log_mahler_interval(coeffs, disks_f, prec)
        with _ivprec(prec + 32):
            h = m / (len(coeffs) - 1)
        approx = Approx.from_interval(h)
        if approx.abs_err <= tol or prec >= 8192:
            return AlgebraicHeightReport(approx, coeffs, cert, True)
        prec *= 2


def algebraic_height(t: AlgNumber, tol=mpmath.mpf(2) ** -60, split: bool = True) -> HeightValue:
    return algebraic_height_report(t, tol, split).height
