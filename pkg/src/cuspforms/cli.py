"""Command-line front end. Every command prints JSON on stdout.

Exit codes: 0 success, 1 precondition or input error, 2 certificate
verification mismatch, 3 bounded search exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .arith import INF, as_rational, format_place, parse_place, prime_support, square_class
from .bieberbach import (
    DEFAULT_GHW_BOUND,
    CrystalPresentation,
    check_report,
    ghw_search,
    im_kim,
    product_with_circle,
    torus,
)
from .equivalence import commensurable, projectively_equivalent, rationally_equivalent
from .errors import CuspFormsError, InfeasibleTargetError, PreconditionError, SearchExhaustedError
from .forms import Signature, parse_form
from .local import InvariantProfile, hilbert, profile
from .pipeline import cusp_witness, verify_certificate
from .realization import definite_complement, realize, serre_feasible

EXIT_OK, EXIT_PRECONDITION, EXIT_MISMATCH, EXIT_EXHAUSTED = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise PreconditionError(f"usage: {message}")


def dumps(obj, pretty: bool = False) -> str:
    if pretty:
        return _pretty(obj)
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=True)


def _pretty(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        width = max((len(str(k)) for k in obj), default=0)
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v and not _flat_list(v):
                lines.append(f"{pad}{k}:")
                lines.append(_pretty(v, indent + 1))
            else:
                lines.append(f"{pad}{str(k).ljust(width)}  {_scalar(v)}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(_pretty(v, indent) if isinstance(v, (dict, list)) else f"{pad}- {_scalar(v)}" for v in obj)
    return pad + _scalar(obj)


def _flat_list(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def _scalar(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_scalar(x) for x in v) + "]"
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


def _int_pair(text: str) -> Signature:
    try:
        r, s = (int(x) for x in text.split(","))
    except ValueError:
        raise PreconditionError(f"signature must look like 'r,s', got {text!r}") from None
    return Signature(r, s)


def _places(text: str) -> frozenset:
    if not text.strip():
        return frozenset()
    return frozenset(parse_place(p) for p in text.split(","))


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise PreconditionError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise PreconditionError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from None


def cmd_invariants(args):
    return profile(parse_form(args.form)).to_json(), EXIT_OK


def cmd_hilbert(args):
    a, b = as_rational(args.a), as_rational(args.b)
    if a == 0 or b == 0:
        raise PreconditionError("Hilbert symbol arguments must be nonzero")
    if args.place is not None:
        places = [parse_place(args.place)]
    else:
        places = sorted({2, INF} | prime_support(a) | prime_support(b))
    symbols = {format_place(v): hilbert(a, b, v) for v in places}
    return {"a": args.a, "b": args.b, "symbols": symbols}, EXIT_OK


def cmd_equiv(args):
    q1, q2 = parse_form(args.q1), parse_form(args.q2)
    return {"equivalent": rationally_equivalent(q1, q2)}, EXIT_OK


def cmd_proj_equiv(args):
    q1, q2 = parse_form(args.q1), parse_form(args.q2)
    return projectively_equivalent(q1, q2).to_json(), EXIT_OK


def cmd_commensurable(args):
    q1, q2 = parse_form(args.q1), parse_form(args.q2)
    result = commensurable(q1, q2)
    verdict = projectively_equivalent(q1, q2)
    return {"commensurable": result, **verdict.to_json()}, EXIT_OK


def cmd_realize(args):
    target = InvariantProfile(
        rank=args.rank,
        signature=_int_pair(args.sig),
        discriminant=square_class(as_rational(args.disc)) if as_rational(args.disc) != 0 else 0,
        negative_places=_places(args.neg_places),
    )
    feasible, violated = serre_feasible(target)
    if not feasible:
        return {"feasible": False, "violated": violated}, EXIT_PRECONDITION
    form = realize(target)
    return {"feasible": True, "violated": [], "form": str(form), "profile": profile(form).to_json()}, EXIT_OK


def cmd_complement(args):
    _, cert = definite_complement(parse_form(args.form))
    return cert, EXIT_OK


def cmd_flat_build(args):
    if args.family == "im-kim":
        if args.n is None:
            raise PreconditionError("--n is required for im-kim")
        p = im_kim(args.n)
    else:
        if args.n is None:
            raise PreconditionError("--n is required for torus")
        p = torus(args.n)
    if args.circle:
        p = product_with_circle(p)
    return p.to_json(), EXIT_OK


def cmd_flat_check(args):
    p = CrystalPresentation.from_json(_load_json(args.file))
    return check_report(p), EXIT_OK


def cmd_flat_ghw(args):
    result = ghw_search(args.dim, args.bound)
    out = {
        "dimension": args.dim,
        "found": result.presentation is not None,
        "candidates_tried": result.candidates_tried,
        "bound": result.bound,
        "presentation": None if result.presentation is None else result.presentation.to_json(),
    }
    if result.presentation is None:
        return out, EXIT_EXHAUSTED
    out["checks"] = check_report(result.presentation)
    return out, EXIT_OK


def cmd_cusp_witness(args):
    q = parse_form(args.form)
    complement = parse_form(args.complement) if args.complement else None
    cert = cusp_witness(args.m, q, args.property, complement=complement, bound=args.bound)
    report = verify_certificate(cert)
    if args.out:
        Path(args.out).write_text(dumps(cert) + "\n")
        payload = {"written": args.out, **report.to_json()}
    else:
        payload = cert
    return payload, EXIT_OK if report else EXIT_MISMATCH


def cmd_verify(args):
    report = verify_certificate(_load_json(args.file))
    return report.to_json(), EXIT_OK if report else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cuspforms", description=__doc__.splitlines()[0])
    parser.add_argument("--pretty", action="store_true", help="human-readable output instead of JSON")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("invariants", help="rank, signature, discriminant, places with eps = -1")
    p.add_argument("form")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("hilbert", help="Hilbert symbol (a,b)_v")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--place", help="prime or 'inf'; default: every place where it can be -1")
    p.set_defaults(func=cmd_hilbert)

    for name, func, helptext in (
        ("equiv", cmd_equiv, "rational equivalence"),
        ("proj-equiv", cmd_proj_equiv, "projective equivalence with scalar witness"),
        ("commensurable", cmd_commensurable, "commensurability of forms of signature (m,1)"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("q1")
        p.add_argument("q2")
        p.set_defaults(func=func)

    p = sub.add_parser("realize", help="diagonal form with prescribed invariants")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--sig", required=True, help="r,s")
    p.add_argument("--disc", required=True)
    p.add_argument("--neg-places", default="", help="comma separated primes and/or inf")
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("complement", help="positive definite complement of a form of signature (m,1)")
    p.add_argument("form")
    p.set_defaults(func=cmd_complement)

    flat = sub.add_parser("flat", help="flat manifold presentations")
    fsub = flat.add_subparsers(dest="flat_command", required=True, parser_class=_Parser)
    p = fsub.add_parser("build")
    p.add_argument("family", choices=["im-kim", "torus"])
    p.add_argument("--n", type=int)
    p.add_argument("--circle", action="store_true", help="take the product with a circle")
    p.set_defaults(func=cmd_flat_build)
    p = fsub.add_parser("check")
    p.add_argument("file")
    p.set_defaults(func=cmd_flat_check)
    p = fsub.add_parser("ghw-search")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--bound", type=int, default=DEFAULT_GHW_BOUND)
    p.set_defaults(func=cmd_flat_ghw)

    p = sub.add_parser("cusp-witness", help="build a commensurability witness certificate")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--form", required=True)
    p.add_argument("--property", choices=["sw", "spinc"], default="sw")
    p.add_argument("--complement", help="use this positive definite form instead of the realized one")
    p.add_argument("--bound", type=int, default=DEFAULT_GHW_BOUND, help="GHW search bound")
    p.add_argument("--out")
    p.set_defaults(func=cmd_cusp_witness)

    p = sub.add_parser("verify", help="re-verify a certificate")
    p.add_argument("file")
    p.set_defaults(func=cmd_verify)
    return parser


def run(argv=None) -> tuple[int, str]:
    """Execute one command; returns (exit code, text for stdout)."""
    argv = list(sys.argv[1:] if argv is None else argv)
    pretty = "--pretty" in argv
    try:
        args = build_parser().parse_args(argv)
        payload, code = args.func(args)
    except InfeasibleTargetError as exc:
        payload, code = {"error": str(exc), "kind": "infeasible", "violated": exc.violated}, EXIT_PRECONDITION
    except SearchExhaustedError as exc:
        payload, code = {"error": str(exc), "kind": "search_exhausted"}, EXIT_EXHAUSTED
    except PreconditionError as exc:
        payload = {"error": str(exc), "kind": type(exc).__name__}
        if getattr(exc, "position", None) is not None:
            payload["position"] = exc.position
        code = EXIT_PRECONDITION
    except (CuspFormsError, ValueError) as exc:
        payload, code = {"error": str(exc), "kind": type(exc).__name__}, EXIT_PRECONDITION
    return code, dumps(payload, pretty)


def main(argv=None) -> int:
    code, text = run(argv)
    print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
