"""Witness certificates tying a commensurability class to a flat cusp cross-section.

Given q of signature (m, 1), ``cusp_witness`` picks a closed flat (m-1)-manifold
with diagonal holonomy (an Im-Kim manifold for the Stiefel-Whitney property, a
generalized Hantzsche-Wendt manifold for the spin^C property, times a circle
when m is odd), and a positive definite diagonal f with f + <1,-1> in the
projective class of q. The hyperbolic construction and separability arguments
that turn this data into a manifold are cited, not performed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .arith import format_place
from .bieberbach import (
    DEFAULT_GHW_BOUND,
    CrystalPresentation,
    check_report,
    im_kim,
    preserves_form,
    product_with_circle,
    require_ghw,
)
from .equivalence import projectively_equivalent, rationally_equivalent
from .errors import PreconditionError, SignatureError
from .forms import HYPERBOLIC_PLANE, DiagonalForm, direct_sum, parse_form, signature
from .local import InvariantProfile, profile, profile_mismatches
from .realization import complement_target, definite_complement

SCHEMA = 1
PROPERTIES = ("sw", "spinc")

CONSTRUCTION_CITATIONS = [
    "every closed flat (m-1)-manifold is a cusp cross-section of a cusped arithmetic "
    "hyperbolic m-manifold built from a form preserved by its holonomy (cusp-embedding "
    "construction and its manifold upgrade via subgroup separability)",
    "the cusp-embedding construction may rescale f + <1,-1>; rescaling stays in the same "
    "projective class",
    "cusped arithmetic hyperbolic manifolds of simplest type are commensurable iff their "
    "forms are projectively equivalent",
]
EQUIVALENCE_NOTE = (
    "profiles of q and f + <1,-1> are equal, so the forms are rationally equivalent; "
    "projective equivalence (witness 1) is what commensurability requires"
)
PROJECTIVE_NOTE = (
    "q is rationally equivalent to a rescaling of f + <1,-1> (see witness); "
    "projective equivalence is what commensurability requires"
)


def flat_family(m: int, prop: str) -> dict:
    """Which flat manifold the certificate uses for the given m and property."""
    if prop not in PROPERTIES:
        raise PreconditionError(f"unknown property {prop!r}; expected one of {PROPERTIES}")
    if m < 6:
        raise PreconditionError(f"m = {m} is not supported; the construction needs m >= 6")
    circle = m % 2 == 1
    if prop == "sw":
        n = (m - 3) // 2 if circle else (m - 2) // 2
        return {"family": "im_kim", "n": n, "base_dimension": 2 * n + 1, "circle": circle}
    base = m - 2 if circle else m - 1
    return {"family": "ghw", "n": None, "base_dimension": base, "circle": circle}


def build_presentation(family: dict, bound: int = DEFAULT_GHW_BOUND) -> CrystalPresentation:
    if family["family"] == "im_kim":
        p = im_kim(family["n"])
    else:
        p = require_ghw(family["base_dimension"], bound)
    return product_with_circle(p) if family["circle"] else p


def _check_input(m: int, q: DiagonalForm):
    sig = signature(q)
    if sig.s != 1 or sig.r != m:
        raise SignatureError(f"form {q} has signature {tuple(sig)}, expected ({m},1)")


def cusp_witness(
    m: int,
    q: DiagonalForm,
    prop: str = "sw",
    complement: Optional[DiagonalForm] = None,
    bound: int = DEFAULT_GHW_BOUND,
) -> dict:
    """Assemble the certificate as a JSON-ready dict (keys sorted on dump)."""
    prop = prop.lower()
    family = flat_family(m, prop)
    _check_input(m, q)

    if complement is None:
        f, _ = definite_complement(q)
    else:
        sig_f = signature(complement)
        if complement.rank != m - 1 or sig_f.s != 0:
            raise SignatureError(f"complement {complement} must be positive definite of rank {m - 1}")
        f = complement
    presentation = build_presentation(family, bound)
    checks = check_report(presentation)
    checks["preserves_form"] = preserves_form(presentation, f)

    fpp = direct_sum(f, HYPERBOLIC_PLANE)
    verdict = projectively_equivalent(q, fpp)
    rational = rationally_equivalent(q, fpp)
    return {
        "schema": SCHEMA,
        "input": {"form": str(q), "m": m, "property": prop},
        "flat": {
            "family": family["family"],
            "n": family["n"],
            "base_dimension": family["base_dimension"],
            "circle": family["circle"],
            "presentation": presentation.to_json(),
            "checks": checks,
        },
        "complement": {
            "form": str(f),
            "target": complement_target(q).to_json(),
            "chosen": "user" if complement is not None else "realized",
        },
        "invariants": {
            "q": profile(q).to_json(),
            "f": profile(f).to_json(),
            "f_plus_hyperbolic_plane": profile(fpp).to_json(),
        },
        "equivalence": {
            "rationally_equivalent": rational,
            "projective": verdict.to_json(),
            "note": EQUIVALENCE_NOTE if rational else PROJECTIVE_NOTE,
        },
        "citations": CONSTRUCTION_CITATIONS,
    }


@dataclass
class VerificationReport:
    ok: bool
    mismatches: list = field(default_factory=list)
    torsion_witness: Optional[dict] = None

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {"verified": self.ok, "mismatches": self.mismatches, "torsion_witness": self.torsion_witness}


def _diff(out: list, name: str, stored, recomputed):
    if stored != recomputed:
        out.append(f"{name}: stored {stored!r}, recomputed {recomputed!r}")


def _profile_diff(out: list, name: str, stored: dict, recomputed: InvariantProfile):
    try:
        stored_profile = InvariantProfile.from_json(stored)
    except (KeyError, TypeError, ValueError, PreconditionError):
        out.append(f"{name}: unreadable profile {stored!r}")
        return
    for field_name in profile_mismatches(recomputed, stored_profile):
        out.append(f"{name}.{field_name}: stored {stored!r}, recomputed {recomputed.to_json()!r}")


def verify_certificate(cert: dict) -> VerificationReport:
    """Recompute every derivable field of a certificate from its raw inputs."""
    out: list[str] = []
    witness = None
    try:
        if cert.get("schema") != SCHEMA:
            out.append(f"schema: expected {SCHEMA}, got {cert.get('schema')!r}")
        inp = cert["input"]
        m, prop = int(inp["m"]), str(inp["property"])
        q = parse_form(inp["form"])
        _check_input(m, q)
        family = flat_family(m, prop)
        flat = cert["flat"]
        for key in ("family", "n", "base_dimension", "circle"):
            _diff(out, f"flat.{key}", flat.get(key), family[key])

        presentation = CrystalPresentation.from_json(flat["presentation"])
        f = parse_form(cert["complement"]["form"])
        fpp = direct_sum(f, HYPERBOLIC_PLANE)

        if presentation.dimension != m - 1:
            out.append(f"flat.presentation.dimension: {presentation.dimension} != m - 1 = {m - 1}")
        checks = check_report(presentation)
        checks["preserves_form"] = (
            preserves_form(presentation, f) if f.rank == presentation.dimension else False
        )
        stored_checks = flat.get("checks", {})
        for key, value in checks.items():
            _diff(out, f"flat.checks.{key}", stored_checks.get(key), value)
        if not checks["torsion_free"]:
            witness = checks["torsion_witness"]
            out.append("flat: presentation has torsion, so it is not a flat manifold group")
        for key in ("orientable", "diagonal_holonomy", "preserves_form"):
            if not checks[key]:
                out.append(f"flat: required property {key} fails")
        flags = checks["flags"]
        if prop == "sw" and flags["sw_nonvanishing_range"] != family["n"]:
            out.append("flat: presentation is not the expected Im-Kim family member")
        if prop == "spinc" and not flags["spinc_obstructed"]:
            out.append("flat: presentation is not a generalized Hantzsche-Wendt manifold (or its circle product)")

        sig_f = signature(f)
        if f.rank != m - 1 or sig_f.s != 0:
            out.append(f"complement: {f} is not positive definite of rank {m - 1}")
        _diff(out, "complement.target", cert["complement"].get("target"), complement_target(q).to_json())

        inv = cert["invariants"]
        _profile_diff(out, "invariants.q", inv["q"], profile(q))
        _profile_diff(out, "invariants.f", inv["f"], profile(f))
        _profile_diff(out, "invariants.f_plus_hyperbolic_plane", inv["f_plus_hyperbolic_plane"], profile(fpp))

        verdict = projectively_equivalent(q, fpp)
        eq = cert["equivalence"]
        _diff(out, "equivalence.rationally_equivalent", eq.get("rationally_equivalent"), rationally_equivalent(q, fpp))
        _diff(out, "equivalence.projective", eq.get("projective"), verdict.to_json())
        if not verdict.equivalent:
            ob = verdict.obstruction
            where = format_place(ob.place) if ob and ob.place is not None else "-"
            out.append(f"equivalence: q and f + <1,-1> are not projectively equivalent ({ob.invariant} at {where})")
    except (KeyError, TypeError, ValueError) as exc:
        out.append(f"malformed certificate: {exc!r}")
    return VerificationReport(not out, out, witness)
