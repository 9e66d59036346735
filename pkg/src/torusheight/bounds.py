"""Explicit constants of the bounded-height results, in exact log2 form.

Every constant is a BoundExpr: a rational constant plus rational multiples of
log2 of positive atoms.  Atoms are integers or symbolic expressions (sympy);
binding the symbols to rationals makes the whole expression numeric, and
numeric expressions compare exactly whenever the integers involved stay of
manageable size.  Floats appear only when rendering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Mapping, Sequence

import mpmath
import sympy

from .heights import Exact, _ends, _ivprec
from .lattice import as_fraction

__all__ = [
    "BoundExpr",
    "Kappa",
    "kappa",
    "mu",
    "mu_bound",
    "effbhc_bounds",
    "genhb_bound",
    "genheightbound",
    "sigma_count_bound",
    "psi_sup_bound",
    "findlv_instance_count",
    "defbl_product_bound",
    "dx_supnorm_bound",
    "correspondence_constants",
    "compactification_bounds",
    "hilbert_poly",
    "hilbert_bounds",
    "ArithHilbertBound",
    "arith_hilbert_bound",
    "de_selection",
]

# Above this many bits an exact power comparison is abandoned for intervals.
_EXACT_BITS = 1 << 21
_GUARD = 64


def _atom(x) -> sympy.Expr:
    if isinstance(x, sympy.Basic):
        return x
    if isinstance(x, str):
        return sympy.Symbol(x, positive=True)
    q = as_fraction(x)
    return sympy.Rational(q.numerator, q.denominator)


def _split_rational(atom: sympy.Rational, coef: Fraction):
    """log2(p/q) as 2-adic constant plus odd integer atoms."""
    out = []
    const = Fraction(0)
    for v, sign in ((int(atom.p), 1), (int(atom.q), -1)):
        k = (v & -v).bit_length() - 1
        const += sign * coef * k
        odd = v >> k
        if odd > 1:
            out.append((sympy.Integer(odd), sign * coef))
    return const, out


@dataclass(frozen=True)
class BoundExpr:
    """log2 of a positive quantity: const + sum coef·log2(atom)."""

    const: Fraction
    terms: tuple[tuple[sympy.Expr, Fraction], ...] = ()

    def __post_init__(self):
        const = as_fraction(self.const)
        acc: dict[sympy.Expr, Fraction] = {}
        for atom, c in self.terms:
            atom = _atom(atom)
            c = as_fraction(c)
            if atom.is_Rational:
                if atom <= 0:
                    raise ValueError(f"log2 of non-positive atom {atom}")
                k, parts = _split_rational(atom, c)
                const += k
            else:
                parts = [(atom, c)]
            for a, cc in parts:
                acc[a] = acc.get(a, Fraction(0)) + cc
        terms = tuple(sorted(((a, c) for a, c in acc.items() if c), key=lambda t: sympy.default_sort_key(t[0])))
        object.__setattr__(self, "const", const)
        object.__setattr__(self, "terms", terms)

    @classmethod
    def log2_of(cls, x, coef=1) -> "BoundExpr":
        """The expression x^coef."""
        return cls(Fraction(0), ((x, coef),))

    @classmethod
    def pow2(cls, e) -> "BoundExpr":
        return cls(as_fraction(e))

    @classmethod
    def one(cls) -> "BoundExpr":
        return cls(Fraction(0))

    # multiplication of the underlying quantities is addition here
    def __add__(self, other: "BoundExpr") -> "BoundExpr":
        return BoundExpr(self.const + other.const, self.terms + other.terms)

    def __neg__(self) -> "BoundExpr":
        return BoundExpr(-self.const, tuple((a, -c) for a, c in self.terms))

    def __sub__(self, other: "BoundExpr") -> "BoundExpr":
        return self + (-other)

    def __mul__(self, k) -> "BoundExpr":
        k = as_fraction(k)
        return BoundExpr(self.const * k, tuple((a, c * k) for a, c in self.terms))

    __rmul__ = __mul__

    @property
    def free_symbols(self) -> set[str]:
        out: set[str] = set()
        for a, _ in self.terms:
            out |= {s.name for s in a.free_symbols}
        return out

    @property
    def is_numeric(self) -> bool:
        return all(a.is_Rational for a, _ in self.terms)

    def bind(self, values: Mapping[str, object] | None = None, **kw) -> "BoundExpr":
        vals = dict(values or {}, **kw)
        subs = {sympy.Symbol(k, positive=True): _atom(v) for k, v in vals.items()}
        return BoundExpr(self.const, tuple((sympy.nsimplify(a.subs(subs)) if subs else a, c) for a, c in self.terms))

    def exact_log2(self) -> Fraction | None:
        """The log2 value when it is rational (no odd atoms remain)."""
        return self.const if not self.terms else None

    def log2(self, prec: int = 256) -> mpmath.mpf:
        """log2 of the quantity, correctly rounded up to a final ulp."""
        if not self.is_numeric:
            raise ValueError(f"unbound symbols: {sorted(self.free_symbols)}")
        with mpmath.workprec(prec + _GUARD):
            ln2 = mpmath.log(2)
            acc = mpmath.mpf(self.const.numerator) / self.const.denominator
            for a, c in self.terms:
                acc += mpmath.mpf(c.numerator) / c.denominator * mpmath.log(int(a)) / ln2
        with mpmath.workprec(prec):
            return +acc

    def value(self, prec: int = 256) -> mpmath.mpf:
        lg = self.log2(prec + _GUARD)
        with mpmath.workprec(prec + _GUARD):
            v = mpmath.power(2, lg)
        with mpmath.workprec(prec):
            return +v

    def compare(self, other: "BoundExpr") -> int | None:
        """Sign of self − other as quantities (-1, 0, 1); None if undecided."""
        d = self - other
        if not d.is_numeric:
            raise ValueError("cannot compare expressions with free symbols")
        if not d.terms:
            return (d.const > 0) - (d.const < 0)
        lcm = reduce(math.lcm, [d.const.denominator] + [c.denominator for _, c in d.terms])
        bits = abs(d.const * lcm) + sum(abs(c * lcm) * int(a).bit_length() for a, c in d.terms)
        if bits <= _EXACT_BITS:
            pos, neg = 1, 1
            e2 = int(d.const * lcm)
            if e2 >= 0:
                pos <<= e2
            else:
                neg <<= -e2
            for a, c in d.terms:
                e = int(c * lcm)
                if e > 0:
                    pos *= int(a) ** e
                else:
                    neg *= int(a) ** (-e)
            return (pos > neg) - (pos < neg)
        prec = 128
        while prec <= 1 << 14:
            with _ivprec(prec):
                acc = mpmath.iv.mpf(d.const.numerator) / d.const.denominator
                ln2 = mpmath.iv.log(2)
                for a, c in d.terms:
                    acc += mpmath.iv.mpf(c.numerator) / c.denominator * mpmath.iv.log(int(a)) / ln2
                lo, hi = _ends(acc)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            prec *= 4
        return None

    def __le__(self, other: "BoundExpr") -> bool:
        c = self.compare(other)
        if c is None:
            raise ArithmeticError("comparison undecided")
        return c <= 0

    def render(self, prec: int | None = None) -> str:
        """Symbolic form; with prec the numeric log2 value is appended."""
        parts = []
        if self.const or not self.terms:
            parts.append(_frac_str(self.const))
        for a, c in self.terms:
            coef = "" if c == 1 else ("-" if c == -1 else f"{_frac_str(c)}*")
            parts.append(f"{coef}log2({a})")
        s = " + ".join(parts).replace("+ -", "- ")
        if prec is not None and self.is_numeric:
            s += f" = {mpmath.nstr(self.log2(prec), max(15, prec * 3 // 10))}"
        return s

    def to_record(self, prec: int = 256) -> dict:
        rec = {
            "log2_const": _frac_str(self.const),
            "log2_terms": [[str(a), _frac_str(c)] for a, c in self.terms],
            "form": self.render(),
        }
        if self.is_numeric:
            rec["log2"] = mpmath.nstr(self.log2(prec), prec * 3 // 10)
        return rec

    def __str__(self) -> str:
        return self.render()


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _numeric(x, name: str, positive=False, nonneg=False):
    """Pass symbols through; validate numbers."""
    if isinstance(x, (str, sympy.Basic)):
        return x
    q = as_fraction(x)
    if positive and q <= 0:
        raise ValueError(f"{name} must be positive")
    if nonneg and q < 0:
        raise ValueError(f"{name} must be nonnegative")
    return q


def _one_plus(h) -> object:
    if isinstance(h, (str, sympy.Basic)):
        return 1 + _atom(h)
    return 1 + h


# ---------------------------------------------------------------- kappa


@dataclass(frozen=True)
class Kappa:
    """(ratio)^(1/root), compared against rationals by cross-powering."""

    ratio: Fraction
    root: int

    def cmp(self, q) -> int:
        """Sign of kappa − q for rational q."""
        q = as_fraction(q)
        if q <= 0:
            return 1
        rhs = q**self.root
        return (self.ratio > rhs) - (self.ratio < rhs)

    def cmp_kappa(self, other: "Kappa") -> int:
        a = self.ratio**other.root
        b = other.ratio**self.root
        return (a > b) - (a < b)

    def floor_mul(self, c) -> int:
        """floor(c·kappa) for rational c > 0."""
        c = as_fraction(c)
        if c <= 0:
            raise ValueError("c must be positive")
        lo, hi = 0, 1
        while self.cmp(hi / c) >= 0:
            hi *= 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.cmp(mid / c) >= 0:
                lo = mid
            else:
                hi = mid
        return lo

    def as_bound(self) -> BoundExpr:
        return BoundExpr.log2_of(self.ratio, Fraction(1, self.root))

    def to_mpf(self, prec: int = 256) -> mpmath.mpf:
        with mpmath.workprec(prec + _GUARD):
            v = mpmath.root(mpmath.mpf(self.ratio.numerator) / self.ratio.denominator, self.root)
        with mpmath.workprec(prec):
            return +v

    def __str__(self) -> str:
        base = _frac_str(self.ratio)
        return base if self.root == 1 else f"({base})^(1/{self.root})"


def kappa(deltas: Sequence[int]) -> Kappa:
    """min over i ≥ 1 with Delta_i > 0 of (Delta_0/Delta_i)^(1/i)."""
    d0 = as_fraction(deltas[0])
    if d0 <= 0:
        raise ValueError("condition (i) violated: Delta_0 must be positive")
    best = None
    for i, di in enumerate(deltas[1:], start=1):
        di = as_fraction(di)
        if di < 0:
            raise ValueError("Delta_i must be nonnegative")
        if di == 0:
            continue
        k = Kappa(d0 / di, i)
        if best is None or k.cmp_kappa(best) < 0:
            best = k
    if best is None:
        raise ValueError("condition (ii) violated: some Delta_i with i >= 1 must be positive")
    return best


# ---------------------------------------------------------------- mu and theorems


def mu(r: int, s: int, n: int) -> Fraction:
    """The exponent of deg X in the generic bound; a half-integer in general."""
    if r < 0 or s < 0 or n < 1:
        raise ValueError("need r, s >= 0 and n >= 1")
    if r == 0 or s == 0:
        return Fraction(0)
    chi = 1 + Fraction(n - r, 2) * (r + 1 + (r + 3) * (s * n + 1) * (2 * r) ** (s * n))
    return (r * r + r + 1) * chi + r


def mu_bound(n: int) -> int:
    return n**6 * (2 * n) ** (n * n)


def _chi(r: int, s: int, n: int) -> Fraction:
    return (mu(r, s, n) - r) / (r * r + r + 1)


def _cn(n: int) -> int:
    return n**7 * (2 * n) ** (n * n)


def effbhc_bounds(n: int, r: int, s: int, degX, hX) -> dict:
    """Constants of the explicit bounded height theorem."""
    if n < 1 or not 0 <= r <= n or s < 0:
        raise ValueError("need n >= 1, 0 <= r <= n, s >= 0")
    degX = _numeric(degX, "degX", positive=True)
    hX = _numeric(hX, "hX", nonneg=True)
    c_int = (600 * _cn(n)) ** r
    c_log = BoundExpr.log2_of(600 * _cn(n), r)
    base = BoundExpr.log2_of(2 * degX if not isinstance(degX, (str, sympy.Basic)) else 2 * _atom(degX), c_int)
    height = base + BoundExpr.log2_of(_one_plus(hX))
    return {
        "C": c_int,
        "log2_C": c_log,
        "component_degree": base,
        "component_height": height,
        "component_count": base,
        "point_height": height,
    }


def genhb_bound(n: int, r: int, s: int, degX, hX) -> BoundExpr:
    """C·degX^mu·(1 + hX) with log2 C = 200 n^7 (2n)^(n^2)."""
    if n < 1 or not 0 <= r <= n or s < 0:
        raise ValueError("need n >= 1, 0 <= r <= n, s >= 0")
    degX = _numeric(degX, "degX", positive=True)
    hX = _numeric(hX, "hX", nonneg=True)
    return BoundExpr.pow2(200 * _cn(n)) + BoundExpr.log2_of(degX, mu(r, s, n)) + BoundExpr.log2_of(_one_plus(hX))


def genheightbound(n: int, r: int, s: int, degX, hX) -> dict:
    """Degree sum, height, point and Q bounds of the generic height proposition."""
    if not 1 <= r <= s <= n:
        raise ValueError("need 1 <= r <= s <= n")
    degX = _numeric(degX, "degX", positive=True)
    hX = _numeric(hX, "hX", nonneg=True)
    chi = _chi(r, s, n)
    one_h = BoundExpr.log2_of(_one_plus(hX))
    return {
        "chi": chi,
        "Q": BoundExpr.pow2(100 * n**5 * (2 * n) ** (n * n)) + BoundExpr.log2_of(degX, chi),
        "degree_sum": BoundExpr.pow2(200 * _cn(n)) + BoundExpr.log2_of(degX, (r + 1) * (1 + r * chi)),
        "component_height": BoundExpr.pow2(300 * _cn(n))
        + BoundExpr.log2_of(degX, 2 * r + 1 + (2 * r * r + 2 * r + 1) * chi)
        + one_h,
        "point_height": BoundExpr.pow2(200 * _cn(n)) + BoundExpr.log2_of(degX, mu(r, s, n)) + one_h,
    }


def sigma_count_bound(n: int, r: int, degX) -> BoundExpr:
    """#Sigma(X) <= 2^(5n^3) degX^((r+1)(n-r))."""
    return BoundExpr.pow2(5 * n**3) + BoundExpr.log2_of(degX, (r + 1) * (n - r))


def psi_sup_bound(n: int, degX) -> BoundExpr:
    """|psi|_inf <= 2n degX for a kernel description of L."""
    return BoundExpr.log2_of(2 * n) + BoundExpr.log2_of(degX)


def findlv_instance_count(n: int, r: int, degX: int) -> int:
    """Number of candidate (I, coefficient) choices for the span search."""
    return math.comb(math.comb(n, r + 1), n - r) * (1 + 4 * n * degX) ** ((r + 1) * (n - r))


def defbl_product_bound(n: int, r: int, degX) -> BoundExpr:
    """|v_1|...|v_r| <= 2^n r! n^(2n) degX^(n-r)."""
    return (
        BoundExpr.pow2(n)
        + BoundExpr.log2_of(math.factorial(r))
        + BoundExpr.log2_of(n, 2 * n)
        + BoundExpr.log2_of(degX, n - r)
    )


def dx_supnorm_bound(n: int, r: int, degX) -> BoundExpr:
    """|D_X|_inf <= 2^(20 n^3) degX^((r+3)(n-r))."""
    return BoundExpr.pow2(20 * n**3) + BoundExpr.log2_of(degX, (r + 3) * (n - r))


# ---------------------------------------------------------------- correspondences


def _floor_e_term(n: int, d: int, d0: int) -> int:
    """floor(17 n d! e^d Delta_0^(d-1)), decided with interval arithmetic."""
    base = 17 * n * math.factorial(d) * d0 ** (d - 1)
    prec = 128
    while True:
        with _ivprec(prec):
            lo, hi = (int(mpmath.floor(e)) for e in _ends(mpmath.iv.mpf(base) * mpmath.iv.exp(d)))
        if lo == hi:
            return lo
        prec *= 2


def correspondence_constants(deltas: Sequence[int], degZ, hZ, n: int, r: int, d: int) -> dict:
    """kappa, both k0 variants and the height-inequality coefficients."""
    if len(deltas) != d + 1:
        raise ValueError(f"expected {d + 1} values Delta_0..Delta_d, got {len(deltas)}")
    if d < 1:
        raise ValueError("d must be at least 1")
    k = kappa(deltas)
    d0 = int(deltas[0])
    degZ = int(degZ)
    hZ = _numeric(hZ, "hZ", nonneg=True)
    head = max(17 * 3**d * math.factorial(d) * n * d0 ** (d - 1), degZ)
    large = k.cmp(17 * d * n) >= 0
    k0 = BoundExpr.log2_of(head)
    if not large:
        k0 = k0 + BoundExpr.log2_of(100 * d * n) - k.as_bound()
    k_siegel = max(_floor_e_term(n, d, d0), degZ)
    m = max(n, r)
    # max{1, kappa}^(d+1) and max{1, kappa^(d+1)/Delta_0}
    kap_pow = k.as_bound() * (d + 1) if k.cmp(1) > 0 else BoundExpr.one()
    if (k.ratio ** (d + 1)) > Fraction(d0) ** k.root:
        ratio2 = k.as_bound() * (d + 1) - BoundExpr.log2_of(d0)
    else:
        ratio2 = BoundExpr.one()
    z_sum = hZ + degZ if not isinstance(hZ, (str, sympy.Basic)) else _atom(hZ) + degZ
    lb_z = BoundExpr.pow2(14) + BoundExpr.log2_of(n * n * r * m * m) + kap_pow - BoundExpr.log2_of(d0)
    lb2_z = BoundExpr.pow2(15) + BoundExpr.log2_of(max(n**4 * r, n * n * r**3)) + ratio2
    return {
        "kappa": k,
        "kappa_large": large,
        "k0": k0,
        "k0_heightlb2": head if large else None,
        "k0_siegel": k_siegel,
        "height_ineq_coeffs": {
            "heightlb": {
                "h_q": BoundExpr.pow2(5) + BoundExpr.log2_of(d * n),
                "hZ_plus_degZ": lb_z,
                "additive": lb_z + BoundExpr.log2_of(z_sum),
                "degZ_term": BoundExpr.pow2(8) + BoundExpr.log2_of(n * r * r * degZ),
            },
            "heightlb2": {
                "h_q": BoundExpr.pow2(5) + BoundExpr.log2_of(d * n),
                "hZ_plus_degZ": lb2_z,
                "additive": lb2_z + BoundExpr.log2_of(z_sum),
            },
        },
    }


def compactification_bounds(n: int, r: int, degX, hX, phi_sup, deg_phi=None) -> dict:
    """Degree, bidegree, height and kappa bounds for the graph closure of phi."""
    if not 1 <= r <= n - 1:
        raise ValueError("need 1 <= r <= n-1")
    phi_sup = _numeric(phi_sup, "phi_sup", positive=True)
    if not isinstance(phi_sup, (str, sympy.Basic)) and phi_sup < 1:
        raise ValueError("phi_sup must be at least 1")
    degX = _numeric(degX, "degX", positive=True)
    hX = _numeric(hX, "hX", nonneg=True)
    fourn = BoundExpr.log2_of(4 * n)
    phi = BoundExpr.log2_of(phi_sup)
    dX = BoundExpr.log2_of(degX)
    out = {
        "degZ_ub": fourn * r + phi * r + dX,
        "delta_ub": [fourn * r + phi * (r - i) + dX for i in range(r + 1)],
    }
    if any(isinstance(v, (str, sympy.Basic)) for v in (degX, hX, phi_sup)):
        inner = _atom(hX) + _atom(degX) / _atom(phi_sup)
    else:
        inner = hX + degX / phi_sup
    out["hZ_ub"] = fourn * (n + 2) + phi * (r + 1) + BoundExpr.log2_of(inner) if inner != 0 else None
    if deg_phi is not None:
        deg_phi = _numeric(deg_phi, "deg_phi", positive=True)
        out["kappa_ub"] = BoundExpr.log2_of(deg_phi)
        out["kappa_lb"] = phi + BoundExpr.log2_of(deg_phi) - fourn * r - dX - phi * r
    else:
        out["kappa_ub"] = out["kappa_lb"] = None
    return out


# ---------------------------------------------------------------- Hilbert functions


def hilbert_poly(deltas: Sequence[int], t1, t2) -> Fraction:
    """sum binom(d, i) Delta_i T1^i T2^(d-i)."""
    d = len(deltas) - 1
    t1, t2 = as_fraction(t1), as_fraction(t2)
    return sum((math.comb(d, i) * as_fraction(di) * t1**i * t2 ** (d - i) for i, di in enumerate(deltas)), Fraction(0))


@dataclass(frozen=True)
class ArithHilbertBound:
    """hilb·k·hX/degX + (hilb/2)·log hilb."""

    rational: Fraction
    log_part: Exact

    def to_mpf(self, prec: int = 256) -> mpmath.mpf:
        with mpmath.workprec(prec + _GUARD):
            v = mpmath.mpf(self.rational.numerator) / self.rational.denominator + self.log_part.to_mpf(prec + _GUARD)
        with mpmath.workprec(prec):
            return +v

    def __str__(self) -> str:
        return f"{_frac_str(self.rational)} + {self.log_part}"


def arith_hilbert_bound(k: int, hilb: int, hX, degX) -> ArithHilbertBound:
    if k < 1 or hilb < 1:
        raise ValueError("need k >= 1 and a positive Hilbert function value")
    hX, degX = as_fraction(hX), as_fraction(degX)
    if degX <= 0 or hX < 0:
        raise ValueError("need degX > 0 and hX >= 0")
    return ArithHilbertBound(hilb * k * hX / degX, Exact(Fraction(hilb, 2), Fraction(hilb)))


def hilbert_bounds(d: int, degZ: int, deltas: Sequence[int], a: int, b: int, k: int,
                   hilb_value: int | None = None, hX=None, degX=None) -> dict:
    """Upper/lower Hilbert function bounds and optionally the arithmetic bound."""
    if len(deltas) != d + 1 or d < 1:
        raise ValueError(f"need d >= 1 and {d + 1} values Delta_0..Delta_d")
    if any(x < 0 for x in deltas):
        raise ValueError("Delta_i must be nonnegative")
    if hilbert_poly(deltas, 1, 1) != degZ:
        raise ValueError(f"degZ = {degZ} disagrees with sum binom(d,i) Delta_i = {hilbert_poly(deltas, 1, 1)}")
    if a < 1 or b < 1 or k < 0:
        raise ValueError("need a, b >= 1 and k >= 0")
    delta = int(deltas[0])
    if a < delta or b < delta:
        raise ValueError(f"lower bound needs a, b >= Delta_0 = {delta}")
    hp = hilbert_poly(deltas, a, b)
    out = {
        "hpoly": hp,
        "hilb_ub": hp * math.comb(d + k, d),
        "hilb_lb": delta * math.comb(d + b - delta, d),
        "arith_ub": None,
    }
    if hilb_value is not None:
        out["arith_ub"] = arith_hilbert_bound(max(k, 1), hilb_value, hX, degX)
    return out


# ---------------------------------------------------------------- (D, E) selection


def de_selection(kap: Kappa, d: int, n: int) -> tuple[int, int]:
    """Integers D, E with D >= 3, E <= 4 max{1, 16dn/kappa} and
    kappa/(16dn) <= (D+1)/E <= kappa/(4dn)."""
    if kap.ratio <= 0:
        raise ValueError("kappa must be positive")
    dn = d * n
    if kap.cmp(17 * dn) >= 0:
        D, E = kap.floor_mul(Fraction(1, 4 * dn)) - 1, 1
    else:
        # Box principle: 1 <= y <= Q with |y·kappa/(8dn) − x| <= 1/Q
        big_q = kap.cmp(16 * dn) < 0  # Q = 16dn/kappa > 1
        found = None
        y = 1
        while found is None:
            if big_q and kap.cmp(Fraction(16 * dn, y)) > 0:
                raise ArithmeticError("box principle search exhausted")
            fl = kap.floor_mul(Fraction(y, 8 * dn))
            for x in (fl, fl + 1):
                if big_q:
                    # 1/Q = kappa/(16dn): need (2y-1)kappa <= 16dn x <= (2y+1)kappa
                    ok = (2 * y - 1 <= 0 or kap.cmp(Fraction(16 * dn * x, 2 * y - 1)) <= 0) and kap.cmp(
                        Fraction(16 * dn * x, 2 * y + 1)
                    ) >= 0
                else:
                    ok = kap.cmp(Fraction(8 * dn * (x - 1), y)) >= 0 and kap.cmp(Fraction(8 * dn * (x + 1), y)) <= 0
                if ok and x >= 1:
                    found = (x, y)
                    break
            y += 1
        x, y = found
        D, E = 4 * x - 1, 4 * y
    _check_de(kap, d, n, D, E)
    return D, E


def _check_de(kap: Kappa, d: int, n: int, D: int, E: int) -> None:
    dn = d * n
    ok = (
        D >= 3
        and (E <= 4 or kap.cmp(Fraction(64 * dn, E)) <= 0)
        and kap.cmp(Fraction(16 * dn * (D + 1), E)) <= 0
        and kap.cmp(Fraction(4 * dn * (D + 1), E)) >= 0
    )
    if not ok:
        raise ArithmeticError(f"(D, E) = ({D}, {E}) violates the selection inequalities")
