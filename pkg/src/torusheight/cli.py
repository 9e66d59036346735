"""Command-line interface and the tropfan v1 file format.

    tropfan v1
    ambient N
    dim R
    cone
    ray i1 ... iN      (any number)
    lin i1 ... iN      (any number)
    mult M             (exactly one per cone)

Integers only; ``#`` starts a comment.  Exit status is 0 on success and 2 on
domain errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import re
import sys
from fractions import Fraction
from typing import Sequence

import mpmath

from . import approx as approx_mod
from . import bounds as bounds_mod
from . import experiments
from . import heights as heights_mod
from . import regularity
from .degree import GenericityError, st_degree
from .fan import Cone, Fan, balancing_check, sigma, trop_hypersurface, trop_monomial_curve
from .lattice import IntMatrix, RatMatrix, as_fraction

__all__ = ["FanParseError", "parse_fan", "emit_fan", "main"]


class FanParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def _tokens(text: str):
    """(line number, [(column, token)]) for every non-empty line."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        toks = [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", body)]
        if toks:
            yield lineno, toks


def _int_token(tok: tuple[int, str], lineno: int) -> int:
    col, s = tok
    if not re.fullmatch(r"[+-]?\d+", s):
        raise FanParseError(f"expected an integer, got {s!r}", lineno, col)
    return int(s)


def parse_fan(text: str) -> Fan:
    lines = list(_tokens(text))
    if not lines:
        raise FanParseError("empty input", 1, 1)

    def header(idx: int, word: str, nargs: int):
        if idx >= len(lines):
            last = lines[-1][0] if lines else 1
            raise FanParseError(f"missing '{word}' line", last + 1, 1)
        lineno, toks = lines[idx]
        if toks[0][1] != word:
            raise FanParseError(f"expected '{word}', got {toks[0][1]!r}", lineno, toks[0][0])
        if len(toks) != nargs + 1:
            raise FanParseError(f"'{word}' takes {nargs} argument(s)", lineno, toks[0][0])
        return lineno, toks

    lineno, toks = header(0, "tropfan", 1)
    if toks[1][1] != "v1":
        raise FanParseError(f"unsupported version {toks[1][1]!r}", lineno, toks[1][0])
    lineno, toks = header(1, "ambient", 1)
    n = _int_token(toks[1], lineno)
    if n < 1:
        raise FanParseError("ambient dimension must be positive", lineno, toks[1][0])
    lineno, toks = header(2, "dim", 1)
    r = _int_token(toks[1], lineno)
    if not 0 <= r <= n:
        raise FanParseError(f"dim must lie in [0, {n}]", lineno, toks[1][0])

    cones = []
    cur = None  # (lineno, rays, lin, mult, mult_pos)

    def close(block):
        if block is None:
            return
        cl, rays, lin, mult, _ = block
        if mult is None:
            raise FanParseError("cone has no 'mult' line", cl, 1)
        if not rays and not lin:
            raise FanParseError("cone has no generators", cl, 1)
        cone = Cone(tuple(rays), tuple(lin))
        if cone.dim != r:
            raise FanParseError(f"cone has dimension {cone.dim}, expected {r}", cl, 1)
        cones.append((cone, mult))

    for lineno, toks in lines[3:]:
        word = toks[0][1]
        if word == "cone":
            if len(toks) != 1:
                raise FanParseError("'cone' takes no arguments", lineno, toks[1][0])
            close(cur)
            cur = [lineno, [], [], None, None]
        elif word in ("ray", "lin"):
            if cur is None:
                raise FanParseError(f"'{word}' outside a cone block", lineno, toks[0][0])
            if len(toks) != n + 1:
                raise FanParseError(f"'{word}' needs {n} integers, got {len(toks) - 1}", lineno, toks[0][0])
            vec = tuple(_int_token(t, lineno) for t in toks[1:])
            if not any(vec):
                raise FanParseError("zero generator", lineno, toks[1][0])
            (cur[1] if word == "ray" else cur[2]).append(vec)
        elif word == "mult":
            if cur is None:
                raise FanParseError("'mult' outside a cone block", lineno, toks[0][0])
            if len(toks) != 2:
                raise FanParseError("'mult' takes one integer", lineno, toks[0][0])
            if cur[3] is not None:
                raise FanParseError("duplicate 'mult'", lineno, toks[0][0])
            m = _int_token(toks[1], lineno)
            if m < 1:
                raise FanParseError(f"multiplicity must be positive, got {m}", lineno, toks[1][0])
            cur[3] = m
        else:
            raise FanParseError(f"unknown keyword {word!r}", lineno, toks[0][0])
    close(cur)
    return Fan(n, r, tuple(cones)).canonical()


def emit_fan(f: Fan) -> str:
    f = f.canonical()
    out = ["tropfan v1", f"ambient {f.n}", f"dim {f.r}"]
    for cone, m in f.cones:
        out.append("")
        out.append("cone")
        out += ["ray " + " ".join(map(str, v)) for v in cone.rays]
        out += ["lin " + " ".join(map(str, v)) for v in cone.lineality]
        out.append(f"mult {m}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- argument parsing


class DomainError(Exception):
    pass


def _rat(s: str) -> Fraction:
    try:
        return Fraction(s.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise DomainError(f"not a rational number: {s!r}") from e


def _param(s: str):
    """A rational, or a symbol name for symbolic bounds."""
    s = s.strip()
    if re.fullmatch(r"[A-Za-z_]\w*", s):
        return s
    return _rat(s)


def _vector(s: str) -> list[Fraction]:
    return [_rat(x) for x in s.split(",") if x.strip()]


def _int_vector(s: str) -> list[int]:
    v = _vector(s)
    if any(x.denominator != 1 for x in v):
        raise DomainError(f"expected integers: {s!r}")
    return [int(x) for x in v]


def _matrix(s: str) -> RatMatrix:
    rows = [_vector(r) for r in s.split(";") if r.strip()]
    if not rows or len({len(r) for r in rows}) != 1:
        raise DomainError(f"malformed matrix {s!r}; use rows separated by ';' and entries by ','")
    return RatMatrix.from_rows(rows)


def _int_matrix(s: str) -> IntMatrix:
    m = _matrix(s)
    if not m.is_integral():
        raise DomainError("expected an integer matrix")
    return m.to_int()


def _read_fan(path: str) -> Fan:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_fan(fh.read())
    except OSError as e:
        raise DomainError(str(e)) from e


# ---------------------------------------------------------------- rendering


def _digits(prec: int) -> int:
    return max(15, int(prec * 0.30103))


def _jsonable(x, prec: int):
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, mpmath.mpf):
        return mpmath.nstr(x, _digits(prec))
    if isinstance(x, bounds_mod.BoundExpr):
        return x.to_record(prec)
    if isinstance(x, heights_mod.Exact):
        return {"exact": str(x), "value": mpmath.nstr(x.to_mpf(prec), _digits(prec))}
    if isinstance(x, heights_mod.Approx):
        return {
            "value": mpmath.nstr(x.value, _digits(prec)),
            "abs_err": mpmath.nstr(x.abs_err, 5),
            "note": x.note,
        }
    if isinstance(x, (bounds_mod.Kappa, bounds_mod.ArithHilbertBound)):
        return str(x)
    if isinstance(x, (IntMatrix, RatMatrix)):
        return [[_jsonable(v, prec) for v in row] for row in x.rows]
    if isinstance(x, experiments.ExperimentReport):
        return _jsonable(x.to_record(), prec)
    if dataclasses.is_dataclass(x):
        d = {"type": type(x).__name__}
        d.update({f.name: _jsonable(getattr(x, f.name), prec) for f in dataclasses.fields(x)})
        return d
    if isinstance(x, dict):
        return {str(k): _jsonable(v, prec) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v, prec) for v in x]
    return str(x)


def _text_lines(obj, prefix: str = "") -> list[str]:
    out = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            key = f"{prefix}.{k}" if prefix else str(k)
            if isinstance(v, dict) or (isinstance(v, list) and v and isinstance(v[0], dict)):
                out += _text_lines(v, key)
            else:
                out.append(f"{key}: {_scalar_text(v)}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            out += _text_lines(v, f"{prefix}[{i}]")
    else:
        out.append(f"{prefix}: {_scalar_text(obj)}")
    return out


def _scalar_text(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_scalar_text(x) for x in v) + "]"
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def _emit(args, result) -> None:
    data = _jsonable(result, args.precision)
    if args.format == "machine":
        print(json.dumps(data, sort_keys=True, separators=(",", ":")))
    elif isinstance(result, str):
        sys.stdout.write(result)
    else:
        print("\n".join(_text_lines(data)))


# ---------------------------------------------------------------- commands


def cmd_fan(args):
    if args.action == "emit":
        if args.hypersurface:
            f = trop_hypersurface([_int_vector(p) for p in args.hypersurface.split(";") if p.strip()])
        elif args.curve:
            f = trop_monomial_curve(_int_vector(args.curve))
        elif args.file:
            f = _read_fan(args.file)
        else:
            raise DomainError("fan emit needs FILE, --hypersurface or --curve")
        return emit_fan(f) if args.format == "text" else {"fan": emit_fan(f)}
    if not args.file:
        raise DomainError("fan check needs FILE")
    f = _read_fan(args.file)
    bal = balancing_check(f)
    return {
        "ambient": f.n,
        "dim": f.r,
        "cones": len(f.cones),
        "spans": len(sigma(f)),
        "balanced": bal.balanced,
        "violations": list(bal.violations),
        "warnings": list(bal.warnings),
    }


def cmd_degree(args):
    f = _read_fan(args.file)
    res = st_degree(f, _matrix(args.phi), seed=args.seed)
    return {
        "degree": res.degree,
        "dominant": res.dominant,
        "w": list(res.w),
        "scale": res.scale,
        "terms": [
            {"cone": t.cone, "fiber_point": list(t.fiber_point), "multiplicity": t.multiplicity, "index": t.index}
            for t in res.terms
        ],
    }


def cmd_dx(args):
    f = _read_fan(args.file)
    degx = int(args.degX) if args.degX is not None else None
    d = regularity.build_dx(sigma(f), f.r, args.s, f.n, degX=degx)
    if args.action == "build":
        return {"n": d.n, "r": d.r, "s": d.s, "spans": d.nspans, "terms": len(d.terms), "degenerate": d.degenerate,
                "polynomial": d.render()}
    if args.action == "eval":
        if not args.phi:
            raise DomainError("dx eval needs --phi")
        return {"value": regularity.eval_dx(d, _matrix(args.phi))}
    rep = regularity.supnorm_dx(d)
    return {"supnorm": rep.value, "bound": rep.bound, "holds": rep.holds}


def cmd_regular(args):
    phi = _matrix(args.phi)
    eps = _rat(args.eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    if args.action == "certify":
        v = regularity.certify_regular(phi, eps)
        if isinstance(v, regularity.Certified):
            return {"verdict": "certified", "minor": list(v.minor), "margin": v.margin, "criterion": v.criterion}
        fals = regularity.falsify_regular(phi, eps, args.trials, args.seed)
        if fals is not None:
            return {"verdict": "falsified", "witness": fals.witness, "distance": fals.distance}
        return {"verdict": "unknown"}
    fals = regularity.falsify_regular(phi, eps, args.trials, args.seed)
    if fals is None:
        return {"verdict": "no witness", "trials": args.trials}
    return {"verdict": "falsified", "witness": fals.witness, "distance": fals.distance}


def cmd_approx(args):
    q = _rat(args.Q)
    if args.action == "round":
        psi0 = _int_matrix(args.psi0)
        psi = approx_mod.dirichlet_round(psi0, q)
        rep = approx_mod.verify_approx(psi0, psi, q)
        return {"psi": psi, "regular": rep.regular is not None, "ok": rep.ok}
    psi0 = _int_matrix(args.psi0)
    if not args.psi:
        raise DomainError("approx verify needs --psi")
    p = _vector(args.point) if args.point else None
    rep = approx_mod.verify_approx(psi0, _int_matrix(args.psi), q, p)
    return {
        "rows_at_least_Q": rep.rows_at_least_q,
        "sup_below_Q_plus_1": rep.sup_below_q_plus_1,
        "rounding_error_below_1": rep.rounding_error_below_1,
        "regular": rep.regular,
        "height_ok": rep.height_ok,
        "note": rep.note,
        "ok": rep.ok,
    }


def _need(args, *names):
    missing = [n for n in names if getattr(args, n.replace("-", "_")) is None]
    if missing:
        raise DomainError("missing " + ", ".join("--" + m for m in missing))


def cmd_bounds(args):
    k = args.kind
    if k == "mu":
        _need(args, "r", "s", "n")
        return {"mu": bounds_mod.mu(args.r, args.s, args.n)}
    if k in ("effbhc", "genhb"):
        _need(args, "n", "r", "s", "degX", "hX")
        fn = bounds_mod.effbhc_bounds if k == "effbhc" else bounds_mod.genhb_bound
        out = fn(args.n, args.r, args.s, _param(args.degX), _param(args.hX))
        return out if isinstance(out, dict) else {"bound": out}
    if k in ("degreelb", "lojasiewicz"):
        _need(args, "n", "r", "s", "degX", "eps", "phi_sup")
        fn = regularity.degreelb_bound if k == "degreelb" else regularity.lojasiewicz_bound
        return {"bound": fn(args.n, args.r, args.s, _param(args.degX), _param(args.eps), _param(args.phi_sup))}
    if k == "correspondence":
        _need(args, "deltas", "degZ", "hZ", "n", "r")
        deltas = _int_vector(args.deltas)
        return bounds_mod.correspondence_constants(deltas, int(_rat(args.degZ)), _param(args.hZ), args.n, args.r,
                                                   len(deltas) - 1)
    if k == "compactification":
        _need(args, "n", "r", "degX", "hX", "phi_sup")
        dp = _param(args.deg_phi) if args.deg_phi is not None else None
        return bounds_mod.compactification_bounds(args.n, args.r, _param(args.degX), _param(args.hX),
                                                  _param(args.phi_sup), dp)
    if k == "hilbert":
        _need(args, "deltas", "degZ", "a", "b", "k")
        deltas = _int_vector(args.deltas)
        return bounds_mod.hilbert_bounds(
            len(deltas) - 1, int(_rat(args.degZ)), deltas, args.a, args.b, args.k,
            hilb_value=args.hilb, hX=_rat(args.hX) if args.hX else None, degX=_rat(args.degX) if args.degX else None,
        )
    if k == "de":
        _need(args, "deltas", "n")
        deltas = _int_vector(args.deltas)
        kap = bounds_mod.kappa(deltas)
        d = args.d if args.d is not None else len(deltas) - 1
        D, E = bounds_mod.de_selection(kap, d, args.n)
        return {"kappa": kap, "D": D, "E": E}
    raise DomainError(f"unknown bound {k!r}")


def cmd_heights(args):
    k = args.kind
    if k == "point":
        v = _vector(args.data)
        fn = {"l2": heights_mod.height_l2, "affine": heights_mod.height_affine, "sup": heights_mod.height_sup}[
            args.norm
        ]
        return {"height": fn(v)}
    if k == "matrix":
        _need(args, "t")
        return {"height": heights_mod.matrix_height(_matrix(args.data), args.t)}
    if k == "subspace":
        # one spanning vector per ';' group
        return {"height": heights_mod.subspace_height(_matrix(args.data).transpose())}
    if k == "poly":
        poly = {}
        for part in args.data.split(";"):
            if not part.strip():
                continue
            exps, _, coef = part.partition(":")
            poly[tuple(_int_vector(exps))] = _rat(coef)
        return {"height": heights_mod.poly_height(poly)}
    if k == "algebraic":
        coeffs = _int_vector(args.data)
        rep = heights_mod.algebraic_height_report(
            heights_mod.AlgNumber(tuple(coeffs), args.root), split=not args.no_split
        )
        return {"height": rep.height, "minimal_poly": list(rep.minimal_poly), "certificate": rep.certificate,
                "minimal": rep.minimal}
    raise DomainError(f"unknown height kind {k!r}")


def cmd_exp(args):
    if args.kind == "line":
        line = _vector(args.line)
        if len(line) != 6:
            raise DomainError("--line needs six rationals (alpha,beta,gamma,alpha',beta',gamma')")
        rep = experiments.experiment_line(line, args.bmax, keep_cases=args.cases, tolerance=_rat(args.tolerance),
                                          allow_degenerate=args.allow_degenerate)
    else:
        rep = experiments.experiment_fourplanes(args.trials, args.seed)
    if args.format == "machine":
        return rep
    out = {"name": rep.name, "inputs": rep.inputs, "max_height": rep.max_height, "summary": rep.summary,
           "violations": rep.violations, "notes": rep.notes}
    if rep.name == "fourplanes":
        out["checks"] = [
            f"{c['check']} {c.get('plane', c.get('planes'))}: {'PASS' if c['pass'] else 'FAIL'}" for c in rep.cases
        ]
    return out


# ---------------------------------------------------------------- main


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--precision", type=int, default=256, metavar="BITS")
    p.add_argument("--seed", type=int, default=0, metavar="U64")
    p.add_argument("--format", choices=("text", "machine"), default="text")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="torusheight", description="Heights, tropical fans and degrees on tori.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fan", parents=[common], help="check or emit tropfan files")
    p.add_argument("action", choices=("check", "emit"))
    p.add_argument("file", nargs="?")
    p.add_argument("--hypersurface", help="support points 'a,b;c,d;...'")
    p.add_argument("--curve", help="exponent vector u of t -> t^u")
    p.set_defaults(func=cmd_fan)

    p = sub.add_parser("degree", parents=[common], help="degree of a monomial map on a tropical variety")
    p.add_argument("file")
    p.add_argument("--phi", required=True, help="r x n rational matrix 'a,b;c,d'")
    p.set_defaults(func=cmd_degree)

    p = sub.add_parser("dx", parents=[common], help="the D_X polynomial")
    p.add_argument("action", choices=("build", "eval", "supnorm"))
    p.add_argument("file")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--degX")
    p.add_argument("--phi")
    p.set_defaults(func=cmd_dx)

    p = sub.add_parser("regular", parents=[common], help="epsilon-regularity")
    p.add_argument("action", choices=("certify", "falsify"))
    p.add_argument("--phi", required=True)
    p.add_argument("--eps", required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.set_defaults(func=cmd_regular)

    p = sub.add_parser("approx", parents=[common], help="integer approximation with identity minor")
    p.add_argument("action", choices=("round", "verify"))
    p.add_argument("--psi0", required=True)
    p.add_argument("--Q", required=True)
    p.add_argument("--psi")
    p.add_argument("--point")
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("bounds", parents=[common], help="explicit constants")
    p.add_argument(
        "kind",
        choices=("mu", "effbhc", "genhb", "degreelb", "lojasiewicz", "correspondence", "compactification",
                 "hilbert", "de"),
    )
    for name in ("n", "r", "s", "d", "a", "b", "k", "hilb"):
        p.add_argument(f"--{name}", type=int)
    for name in ("degX", "hX", "eps", "phi-sup", "deg-phi", "deltas", "degZ", "hZ"):
        p.add_argument(f"--{name}")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("heights", parents=[common], help="heights of points, matrices, subspaces, polynomials")
    p.add_argument("kind", choices=("point", "matrix", "subspace", "poly", "algebraic"))
    p.add_argument("data", help="coordinates, matrix, 'exps:coef;...' or coefficients")
    p.add_argument("--norm", choices=("l2", "affine", "sup"), default="l2")
    p.add_argument("--t", type=int)
    p.add_argument("--root", type=int, default=0)
    p.add_argument("--no-split", action="store_true")
    p.set_defaults(func=cmd_heights)

    p = sub.add_parser("exp", parents=[common], help="experiments")
    p.add_argument("kind", choices=("line", "fourplanes"))
    p.add_argument("--line", default="1,1,1,0,1,2", help="alpha,beta,gamma,alpha',beta',gamma'")
    p.add_argument("--bmax", type=int, default=6)
    p.add_argument("--cases", action="store_true", help="include per-vector records")
    p.add_argument("--tolerance", default="1/100000000000000000000", help="widest accepted height enclosure")
    p.add_argument("--allow-degenerate", action="store_true", help="run on a line inside a proper coset")
    p.add_argument("--trials", type=int, default=10000)
    p.set_defaults(func=cmd_exp)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = args.func(args)
    except (DomainError, ValueError, ArithmeticError, GenericityError) as e:
        if getattr(args, "format", "text") == "machine":
            print(json.dumps({"error": str(e)}, sort_keys=True))
        else:
            print(f"error: {e}", file=sys.stderr)
        return 2
    _emit(args, result)
    return 0


if __name__ == "__main__":
    sys.exit(main())
