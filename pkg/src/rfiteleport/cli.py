"""Command-line front end.

Exit codes: 0 success, 2 validation error, 3 certification failure,
4 no definite answer under --require-answer.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import formats
from .groups import GSet, GroupTooLarge, NotAHomomorphism, PermGroup, cycle_notation
from .linalg import DEFAULT_TOL, dagger
from .reps import (
    BasisSearchFailed,
    NoEquivariantBasis,
    NotARepresentation,
    Representation,
    basic_permutation_characters,
    decompose_into_basics,
    end_character,
    find_equivariant_onb,
    permutation_representation,
)
from .sim import ProtocolSpec, sweep
from .ueb import (
    AmbiguousMatch,
    ConstructionError,
    GEquivariantUEB,
    NotAUnitaryErrorBasis,
    builtin_z2_example,
    certify,
    construct_gueb_dim_le4,
    verify_equivariance,
    verify_ueb,
)

EXIT_OK, EXIT_INVALID, EXIT_UNCERTIFIED, EXIT_UNKNOWN = 0, 2, 3, 4

IMPOSSIBLE, CONSTRUCTED, UNKNOWN = "IMPOSSIBLE", "CONSTRUCTED", "UNKNOWN"

VALIDATION_ERRORS = (
    formats.FormatError,
    NotARepresentation,
    NotAHomomorphism,
    NotAUnitaryErrorBasis,
    GroupTooLarge,
    ValueError,
)


class CertificationFailure(RuntimeError):
    pass


@dataclass
class AnalysisVerdict:
    verdict: str
    evidence: dict[str, Any] = field(default_factory=dict)
    gueb: GEquivariantUEB | None = None


def _values(cf) -> list:
    return [float(v.real) if abs(v.imag) < 1e-12 else [float(v.real), float(v.imag)] for v in cf.values]


def subgroup_table(G: PermGroup) -> list[dict]:
    rows = []
    for H, chi in basic_permutation_characters(G):
        rows.append({
            "subgroup": list(H.members),
            "order": H.order,
            "cosets": G.order // H.order,
            "character": list(chi.as_integers()),
        })
    return rows


def class_labels(G: PermGroup) -> list[str]:
    return [cycle_notation(G.elements[cls[0]]) for cls in G.conjugacy_classes()]


def analyze(rep: Representation, tol: float = DEFAULT_TOL, seed: int = 7) -> AnalysisVerdict:
    """Decide whether rep admits an equivariant UEB, building one when the pipeline can."""
    G = rep.group
    basics = basic_permutation_characters(G)
    end_chi = end_character(rep, tol)
    cert = decompose_into_basics(end_chi, basics, tol)
    evidence: dict[str, Any] = {
        "classes": class_labels(G),
        "end_character": list(end_chi.as_integers(tol) or _values(end_chi)),
        "basic_characters": [list(chi.as_integers()) for _, chi in basics],
        "certificate": {
            "feasible": cert.feasible,
            "coefficients": None if cert.coefficients is None else list(cert.coefficients),
            "bounds": list(cert.bounds),
            "nodes": cert.nodes,
        },
    }
    if not cert.feasible:
        evidence["explanation"] = (
            "the End(H) character is not a non-negative integer sum of basic "
            "permutation characters, so no equivariant orthonormal basis of End(H) exists"
        )
        return AnalysisVerdict(IMPOSSIBLE, evidence)
    try:
        B, X = find_equivariant_onb(rep, tol, seed=seed)
    except NoEquivariantBasis as exc:
        evidence["explanation"] = f"H itself has no equivariant orthonormal basis ({exc})"
        return AnalysisVerdict(UNKNOWN, evidence)
    except BasisSearchFailed as exc:
        evidence["explanation"] = str(exc)
        return AnalysisVerdict(UNKNOWN, evidence)
    if rep.dimension > 4:
        evidence["explanation"] = "dimension exceeds 4; no commuting Hadamard is known"
        return AnalysisVerdict(UNKNOWN, evidence)
    inner = construct_gueb_dim_le4(permutation_representation(X), tol)
    elements = B[None] @ inner.elements @ dagger(B)[None]
    provenance = dict(inner.provenance)
    provenance["change_of_basis"] = B
    gueb = certify(elements, rep, provenance, tol)
    return AnalysisVerdict(CONSTRUCTED, evidence, gueb)


def construct(obj: Representation | GSet, tol: float = DEFAULT_TOL, hadamard=None) -> GEquivariantUEB:
    rep = permutation_representation(obj) if isinstance(obj, GSet) else obj
    return construct_gueb_dim_le4(rep, tol, hadamard=hadamard)


def verify(rep: Representation, elements: np.ndarray, tol: float = DEFAULT_TOL) -> dict:
    report = verify_ueb(elements, tol)
    out: dict[str, Any] = {
        "valid_ueb": report.valid,
        "unitarity_defect": report.unitarity_defect,
        "orthogonality_defect": report.orthogonality_defect,
        "worst_unitary_index": report.worst_unitary,
        "worst_orthogonality_pair": list(report.worst_pair),
        "equivariant": False,
        "sigma": None,
    }
    if report.valid:
        try:
            sigma = verify_equivariance(elements, rep, tol)
        except AmbiguousMatch as exc:
            out["ambiguous"] = str(exc)
            sigma = None
        if sigma is not None:
            out["equivariant"] = True
            out["sigma"] = {str(g): sigma[g].tolist() for g in range(len(sigma))}
    return out


def _write_bundle(out: Path, name: str, gueb: GEquivariantUEB, rep: Representation, tol: float) -> Path:
    path = formats.write_json(out / name, formats.bundle_to_json(gueb))
    elements, _ = formats.load_bundle(path)
    check = verify(rep, elements, tol)
    if not (check["valid_ueb"] and check["equivariant"]):
        raise CertificationFailure(f"{path} failed re-verification after writing")
    return path


def cmd_analyze(args) -> int:
    group = formats.load_group(args.group) if args.group else None
    rep = formats.load_rep(args.rep, group, args.tol)
    result = analyze(rep, args.tol, args.seed)
    out = Path(args.out)
    report: dict[str, Any] = {"verdict": result.verdict, **result.evidence}
    if result.gueb is not None:
        bundle = _write_bundle(out, "analysis_bundle.json", result.gueb, rep, args.tol)
        report["bundle"] = bundle.name
    report["tool"] = formats.tool_info(args.tol, args.seed)
    formats.write_json(out / "analysis.json", report)
    print(f"verdict: {result.verdict}")
    print(f"End(H) character: {report['end_character']} over classes {report['classes']}")
    if "explanation" in report:
        print(f"reason: {report['explanation']}")
    if result.verdict == UNKNOWN and args.require_answer:
        return EXIT_UNKNOWN
    return EXIT_OK


def cmd_construct(args) -> int:
    group = formats.load_group(args.group) if args.group else None
    obj = formats.load_rep_or_gset(args.input, group, args.tol)
    rep = permutation_representation(obj) if isinstance(obj, GSet) else obj
    hadamard = None
    if args.hadamard:
        hadamard = formats.matrix_from_json(formats.read_json(args.hadamard))
    gueb = construct(rep, args.tol, hadamard)
    out = Path(args.out)
    formats.write_json(out / "rep.json", formats.rep_to_json(rep))
    path = _write_bundle(out, "bundle.json", gueb, rep, args.tol)
    print(f"certified {len(gueb.elements)}-element equivariant UEB written to {path}")
    return EXIT_OK


def cmd_verify(args) -> int:
    group = formats.load_group(args.group) if args.group else None
    rep = formats.load_rep(args.rep, group, args.tol)
    elements, _ = formats.load_bundle(args.bundle)
    if elements.shape[1] != rep.dimension:
        raise ValueError("bundle and representation dimensions differ")
    result = verify(rep, elements, args.tol)
    result["tool"] = formats.tool_info(args.tol)
    formats.write_json(Path(args.out) / "verify.json", result)
    print(f"unitary error basis: {'valid' if result['valid_ueb'] else 'INVALID'} "
           f"(unitarity defect {result['unitarity_defect']:.3g}, "
           f"orthogonality defect {result['orthogonality_defect']:.3g})")
    if not result["valid_ueb"]:
        print(f"worst offenders: element {result['worst_unitary_index']}, "
               f"pair {result['worst_orthogonality_pair']}")
    print(f"G-equivariant: {'yes' if result['equivariant'] else 'no'}")
    return EXIT_OK if result["valid_ueb"] and result["equivariant"] else EXIT_UNCERTIFIED


def cmd_simulate(args) -> int:
    group = formats.load_group(args.group) if args.group else None
    rep = formats.load_rep(args.rep, group, args.tol)
    elements, _ = formats.load_bundle(args.bundle)
    spec = ProtocolSpec(rep, elements, args.procedure)
    if not rep.is_real(args.tol):
        print("warning: representation is not real; frames act as π⊗π, which is only "
              "exact for real matrices", file=sys.stderr)
    report = sweep(spec, args.trials, args.seed, args.tol)
    formats.write_json(Path(args.out) / f"simulate_{args.procedure}.json", formats.report_to_json(report))
    print(f"{args.procedure}: global_min={report.global_min:.12f} global_max={report.global_max:.12f}")
    if args.expect_perfect and report.global_min < 1 - 10 * args.tol:
        return EXIT_UNCERTIFIED
    return EXIT_OK


def cmd_subgroups(args) -> int:
    G = formats.load_group(args.group)
    rows = subgroup_table(G)
    labels = class_labels(G)
    data = {"group": formats.group_to_json(G), "classes": labels, "rows": rows,
            "tool": formats.tool_info(args.tol)}
    if args.out:
        formats.write_json(Path(args.out) / "subgroups.json", data)
    if args.json:
        print(json.dumps(data, indent=2))
        return EXIT_OK
    print("cosets | order | " + " | ".join(labels))
    for row in rows:
        print(f"{row['cosets']:6d} | {row['order']:5d} | " + " | ".join(map(str, row["character"])))
    return EXIT_OK


def cmd_demo(args) -> int:
    if args.name != "z2":
        raise ValueError(f"unknown demo {args.name!r}; available: z2")
    out = Path(args.out)
    rep, gueb = builtin_z2_example(args.tol)
    formats.write_json(out / "group.json", formats.group_to_json(rep.group))
    formats.write_json(out / "rep.json", formats.rep_to_json(rep, "group.json"))
    _write_bundle(out, "bundle.json", gueb, rep, args.tol)
    print("π(a) U_i π(a)† = U_σ(i) with σ(a) = " + cycle_notation(tuple(gueb.sigma[1])))
    for i, j in enumerate(gueb.sigma[1]):
        print(f"  π(a)† U_{j} π(a) = U_{i}")
    ns = argparse.Namespace(**vars(args))
    ns.group, ns.rep, ns.require_answer = None, str(out / "rep.json"), False
    cmd_analyze(ns)
    ns.bundle = str(out / "bundle.json")
    status = EXIT_OK
    for procedure in ("unspeakable", "speakable"):
        ns.procedure, ns.expect_perfect = procedure, procedure == "unspeakable"
        status = max(status, cmd_simulate(ns))
    return status


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--seed", type=int, default=7)
    common.add_argument("--out", default=".")

    parser = argparse.ArgumentParser(
        prog="rfiteleport",
        description="Equivariant unitary error bases for frame-independent teleportation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="decide and construct for a representation")
    p.add_argument("rep")
    p.add_argument("--group")
    p.add_argument("--require-answer", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("construct", parents=[common], help="build a certified bundle from a G-set")
    p.add_argument("input", help="G-set or permutation-basis representation file")
    p.add_argument("--group")
    p.add_argument("--hadamard", help="matrix file with a commuting Hadamard (dimension > 4)")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", parents=[common], help="re-check a bundle against a representation")
    p.add_argument("rep")
    p.add_argument("bundle")
    p.add_argument("--group")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", parents=[common], help="sweep all frame pairs")
    p.add_argument("rep")
    p.add_argument("bundle")
    p.add_argument("--group")
    p.add_argument("--procedure", choices=["speakable", "unspeakable"], default="unspeakable")
    p.add_argument("--trials", type=int, default=8)
    p.add_argument("--expect-perfect", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("subgroups", parents=[common], help="basic permutation character table")
    p.add_argument("group")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_subgroups, out=None)

    p = sub.add_parser("demo", parents=[common], help="write and run a built-in example")
    p.add_argument("name")
    p.add_argument("--trials", type=int, default=8)
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CertificationFailure, ConstructionError) as exc:
        print(json.dumps({"error": "certification-failure", "message": str(exc)}), file=sys.stderr)
        return EXIT_UNCERTIFIED
    except VALIDATION_ERRORS as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
