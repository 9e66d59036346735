"""Two worked examples as reproducible experiments.

The line experiment collects the heights of points of a line in G_m^3 lying
in some algebraic subgroup of codimension one, for exponent vectors of
bounded size.  The four-planes experiment checks an explicit configuration of
planes in Q^4 that no surface can realise as its set of tropical spans.
"""

from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import sympy

from .bounds import effbhc_bounds
from .heights import AlgNumber, Approx, Exact, algebraic_height_report
from .lattice import IntMatrix, as_fraction

__all__ = [
    "QuadInt",
    "ExperimentReport",
    "line_polynomial",
    "experiment_line",
    "FOUR_PLANES",
    "V0",
    "plucker",
    "plucker_pairing",
    "experiment_fourplanes",
]


@dataclass(frozen=True)
class QuadInt:
    """a + b·sqrt(2) with integer a, b."""

    a: int
    b: int = 0

    @staticmethod
    def of(x) -> "QuadInt":
        return x if isinstance(x, QuadInt) else QuadInt(int(x), 0)

    def __add__(self, o):
        o = QuadInt.of(o)
        return QuadInt(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QuadInt(-self.a, -self.b)

    def __sub__(self, o):
        return self + (-QuadInt.of(o))

    def __rsub__(self, o):
        return QuadInt.of(o) - self

    def __mul__(self, o):
        o = QuadInt.of(o)
        return QuadInt(self.a * o.a + 2 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __str__(self) -> str:
        return f"{self.a}{'+' if self.b >= 0 else '-'}{abs(self.b)}*sqrt2"


def _det(rows: Sequence[Sequence]):
    """Leibniz expansion; works over any commutative ring."""
    k = len(rows)
    total = QuadInt(0) if any(isinstance(x, QuadInt) for r in rows for x in r) else 0
    for perm in itertools.permutations(range(k)):
        sign = 1
        for i in range(k):
            for j in range(i + 1, k):
                if perm[i] > perm[j]:
                    sign = -sign
        term = sign
        for i in range(k):
            term = term * rows[i][perm[i]]
        total = total + term
    return total


@dataclass
class ExperimentReport:
    name: str
    inputs: dict
    cases: list = field(default_factory=list)
    max_height: str | None = None
    violations: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        return {
            "name": self.name,
            "inputs": self.inputs,
            "cases": self.cases,
            "max_height": self.max_height,
            "violations": self.violations,
            "notes": self.notes,
            "summary": self.summary,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------- line in G_m^3

_x = sympy.Symbol("t")
_HEIGHT_DIGITS = 30
_factor_cache: dict[tuple[int, ...], tuple[str, mpmath.mpf, str]] = {}
_triple_cache: dict[tuple, list] = {}


def _linear_forms(line: Sequence) -> list[sympy.Expr]:
    al, be, ga, al1, be1, ga1 = (sympy.Rational(str(as_fraction(v))) for v in line)
    return [al * _x + al1, be * _x + be1, ga * _x + ga1]


def _nondegenerate(line: Sequence) -> bool:
    al, be, ga, al1, be1, ga1 = (as_fraction(v) for v in line)
    if al * be * ga == 0:
        return False
    ratios = [al1 / al, be1 / be, ga1 / ga]
    return len(set(ratios)) == 3


def line_polynomial(line: Sequence, abc: Sequence[int]) -> sympy.Poly:
    """Integer numerator of (αt+α')^a (βt+β')^b (γt+γ')^c − 1 with the
    vanishing loci of the coordinates removed."""
    forms = _linear_forms(line)
    pos, neg = sympy.Integer(1), sympy.Integer(1)
    for f, e in zip(forms, abc):
        if e > 0:
            pos *= f**e
        elif e < 0:
            neg *= f ** (-e)
    poly = sympy.Poly(sympy.expand(pos - neg), _x, domain="QQ")
    if poly.is_zero:
        return poly
    _, poly = poly.clear_denoms()
    poly = poly.set_domain("ZZ").primitive()[1]
    for f in forms:
        if sympy.Poly(f, _x).degree() < 1:
            continue
        lin = sympy.Poly(f, _x, domain="QQ").clear_denoms()[1].set_domain("ZZ").primitive()[1]
        while not poly.is_zero and poly.degree() > 0 and sympy.rem(poly, lin).is_zero:
            poly = sympy.Poly(sympy.quo(poly, lin), _x, domain="ZZ")
    return poly


def _factor_height(cs: tuple[int, ...]) -> tuple[str, mpmath.mpf, str, mpmath.mpf]:
    """(rendered upper end, upper end, certificate, enclosure width)."""
    if cs not in _factor_cache:
        rep = algebraic_height_report(AlgNumber(cs, 0, True))
        h = rep.height
        if isinstance(h, Exact):
            upper, width = h.to_mpf(128), mpmath.mpf(0)
        else:
            upper, width = h.value + h.abs_err, 2 * h.abs_err
        _factor_cache[cs] = (mpmath.nstr(upper, _HEIGHT_DIGITS), upper, "complete factorisation over Z", width)
    return _factor_cache[cs]


def _triple_record(line: tuple, abc: tuple[int, ...]) -> list:
    key = (line, abc)
    if key not in _triple_cache:
        poly = line_polynomial(line, abc)
        if poly.is_zero:
            rec = {"status": "identity", "factors": []}
        elif poly.degree() < 1:
            rec = {"status": "empty", "factors": []}
        else:
            facs = []
            for f, _ in poly.factor_list()[1]:
                if f.degree() < 1:
                    continue
                cs = tuple(int(c) for c in f.all_coeffs())
                text, upper, cert, _ = _factor_height(cs)
                facs.append({"poly": list(cs), "height": text, "certificate": cert})
            facs.sort(key=lambda r: (len(r["poly"]), r["poly"]))
            rec = {"status": "ok", "factors": facs}
        _triple_cache[key] = rec
    return _triple_cache[key]


def _primitive_triples(bmax: int):
    for abc in itertools.product(range(-bmax, bmax + 1), repeat=3):
        if any(abc) and math.gcd(*abc) == 1:
            yield abc


def _canonical_sign(abc: tuple[int, ...]) -> tuple[int, ...]:
    first = next(v for v in abc if v)
    return abc if first > 0 else tuple(-v for v in abc)


def experiment_line(
    line: Sequence,
    bmax: int,
    keep_cases: bool = True,
    tolerance=Fraction(1, 10**20),
    allow_degenerate: bool = False,
) -> ExperimentReport:
    """Heights of all t on the line satisfying a multiplicative relation
    with exponent vector of sup-norm at most bmax.

    ``line`` is (α, β, γ, α', β', γ') for t ↦ (αt+α', βt+β', γt+γ').
    (a,b,c) and its negative give the same equation and share one record.
    Height enclosures wider than ``tolerance`` are counted in the summary.
    Lines inside a proper coset are refused unless ``allow_degenerate``.
    """
    line = tuple(as_fraction(v) for v in line)
    if len(line) != 6:
        raise ValueError("line needs six coefficients")
    if bmax < 1:
        raise ValueError("bmax must be positive")
    tolerance = as_fraction(tolerance)
    if tolerance < 0:
        raise ValueError("tolerance must be nonnegative")
    nondeg = _nondegenerate(line)
    if not nondeg and not allow_degenerate:
        raise ValueError("degenerate line (contained in a proper coset); pass allow_degenerate for a contrast run")
    report = ExperimentReport(
        "line",
        {"line": [str(v) for v in line], "bmax": bmax, "nondegenerate": nondeg, "tolerance": str(tolerance)},
    )
    if not nondeg:
        report.notes.append("degenerate line: contained in a proper coset")
    best_val, best_case = None, None
    empty = identity = loose = 0
    tol = mpmath.mpf(tolerance.numerator) / tolerance.denominator
    for abc in _primitive_triples(bmax):
        rec = _triple_record(line, _canonical_sign(abc))
        if rec["status"] == "empty":
            empty += 1
        elif rec["status"] == "identity":
            identity += 1
        case_max = None
        for f in rec["factors"]:
            _, upper, _, width = _factor_cache[tuple(f["poly"])]
            loose += width > tol
            if case_max is None or upper > case_max:
                case_max = upper
            if best_val is None or upper > best_val:
                best_val, best_case = upper, (list(abc), f["poly"])
        if keep_cases:
            report.cases.append(
                {
                    "abc": list(abc),
                    "status": rec["status"],
                    "max_height": None if case_max is None else mpmath.nstr(case_max, _HEIGHT_DIGITS),
                    "factors": rec["factors"],
                }
            )
    if loose:
        report.notes.append(f"{loose} height enclosures wider than tolerance {tolerance}")
    if identity:
        report.violations.append(f"{identity} exponent vectors vanish identically on the line")
    report.max_height = None if best_val is None else mpmath.nstr(best_val, _HEIGHT_DIGITS)
    report.summary = {
        "triples": sum(1 for _ in _primitive_triples(bmax)),
        "empty": empty,
        "wider_than_tolerance": loose,
        "argmax": best_case,
        # the theorem's bound for a degree-one curve in G_m^3, kept symbolic in h(X)
        "bound_point_height_log2": str(effbhc_bounds(3, 1, 1, 1, "hX")["point_height"]),
    }
    return report


# ---------------------------------------------------------------- four planes

FOUR_PLANES = (
    ((1, 0, 1, 0), (0, -2, 0, 1)),
    ((1, -1, 0, 0), (0, 0, 1, 1)),
    ((0, 1, 0, 0), (0, 0, 1, 0)),
    ((1, 0, 0, 0), (0, 0, 0, 1)),
)
V0 = ((QuadInt(0), QuadInt(0, 1), QuadInt(1), QuadInt(0)), (QuadInt(0, -1), QuadInt(0), QuadInt(0), QuadInt(1)))

_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def plucker(v: Sequence[int], w: Sequence[int]) -> tuple[int, ...]:
    return tuple(v[i] * w[j] - v[j] * w[i] for i, j in _PAIRS)


def plucker_pairing(p: Sequence[int], q: Sequence[int]) -> int:
    """det[v1; v2; w1; w2] from the Plücker vectors of the two planes."""
    p12, p13, p14, p23, p24, p34 = p
    q12, q13, q14, q23, q24, q34 = q
    return p12 * q34 - p13 * q24 + p14 * q23 + p23 * q14 - p24 * q13 + p34 * q12


def experiment_fourplanes(trials: int, seed: int = 0, bound: int = 10) -> ExperimentReport:
    report = ExperimentReport("fourplanes", {"trials": trials, "seed": seed, "bound": bound})
    meets = []
    for i, plane in enumerate(FOUR_PLANES):
        det = _det([*V0, *[[QuadInt(x) for x in v] for v in plane]])
        meets.append(det.is_zero())
        report.cases.append({"check": "meets_V0", "plane": i + 1, "det": str(det), "pass": det.is_zero()})
    pairwise = []
    for i, j in itertools.combinations(range(4), 2):
        det = _det([*FOUR_PLANES[i], *FOUR_PLANES[j]])
        pairwise.append(det != 0)
        report.cases.append({"check": "pairwise_trivial", "planes": [i + 1, j + 1], "det": det, "pass": det != 0})
    if not all(meets):
        report.violations.append("some plane misses V0")
    if not all(pairwise):
        report.violations.append("two planes intersect non-trivially")
    pl = [plucker(*plane) for plane in FOUR_PLANES]
    rng = random.Random(seed)
    falsified = 0
    sampled = 0
    while sampled < trials:
        v = [rng.randint(-bound, bound) for _ in range(4)]
        w = [rng.randint(-bound, bound) for _ in range(4)]
        p = plucker(v, w)
        if not any(p):
            continue
        sampled += 1
        if all(plucker_pairing(p, q) == 0 for q in pl):
            falsified += 1
            if falsified <= 10:
                report.violations.append(f"FALSIFIED by plane spanned by {v}, {w}")
    report.summary = {
        "meets_V0": all(meets),
        "pairwise_trivial": all(pairwise),
        "random_planes": sampled,
        "falsifications": falsified,
        "status": "PASS" if all(meets) and all(pairwise) and not falsified else "FALSIFIED",
    }
    return report
