"""Command-line front end: ``hypersplit <command> ...``.

Exit codes: 0 success or passing sweep, 1 counterexample found, 2 bad
input, 3 enumeration budget exceeded, 4 a hypothesis of the requested
operation does not hold.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import __version__
from .core import Group, HomMatrix, format_ints, parse_ints, parse_qz
from .duality import analyze_iso
from .errors import HypersplitError
from .hyperplanes import (
    AffineHyperplane,
    classify_order2,
    classify_zi_hyperplane,
    is_contained_in_zero_locus,
    is_maximal_in_zero_locus,
    zero_locus,
)
from .signatures import (
    LensSpace,
    RhoTable,
    SignatureFamily,
    cancellation_analyze,
    check_cancellable,
    certify_signature_simple,
    rho,
    rho_parity,
    signature_zero_locus,
)
from .splittings import find_splittings_with_union, recover
from .verify import THEOREMS, SweepConfig, default_parallelism, run_sweep


def _emit(args: argparse.Namespace, payload: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


def _group(text: str) -> Group:
    return Group(parse_ints(text))


def _render_set(elements) -> str:
    return "{" + ", ".join("(" + format_ints(a) + ")" for a in sorted(elements)) + "}"


def cmd_zero_locus(args: argparse.Namespace) -> int:
    g = _group(args.moduli)
    zl = sorted(zero_locus(g))
    payload = {"moduli": list(g.moduli), "size": len(zl), "elements": [list(a) for a in zl]}
    _emit(args, payload, f"|Z({g})| = {len(zl)}\n{_render_set(zl)}")
    return 0


def cmd_hyperplane(args: argparse.Namespace) -> int:
    g = _group(args.moduli)
    h = AffineHyperplane.of(g, parse_ints(args.char), parse_qz(args.target))
    inside = is_contained_in_zero_locus(h)
    payload = {
        **h.to_dict(),
        "order": h.order,
        "size": h.size,
        "members": [list(a) for a in sorted(h.members)],
        "in_zero_locus": inside,
    }
    lines = [
        f"hyperplane char=({format_ints(h.character.coords)}) target={h.target} in {g}",
        f"quotient order {h.order}, {h.size} members",
        _render_set(h.members),
        f"contained in zero locus: {inside}",
    ]
    if inside:
        payload["maximal_in_zero_locus"] = is_maximal_in_zero_locus(h)
        lines.append(f"maximal in zero locus: {payload['maximal_in_zero_locus']}")
        data = None
        for i in range(g.rank):
            if g.z(i) in h:
                data = classify_zi_hyperplane(h, i)
                break
        if data is None and h.order == 2:
            data = classify_order2(h)
        if data is not None:
            payload["nearly_coordinate"] = data.to_dict()
            lines.append(f"nearly-coordinate data: {json.dumps(data.to_dict())}")
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_splittings(args: argparse.Namespace) -> int:
    g = _group(args.moduli)
    found = find_splittings_with_union(g, g.zero_locus_mask)
    reports = [recover(s) for s in found]
    payload = {
        "moduli": list(g.moduli),
        "count": len(found),
        "splittings": [
            {**s.to_dict(), "recovery": r.to_dict()} for s, r in zip(found, reports)
        ],
    }
    lines = [f"{len(found)} splitting(s) of {g} with union the zero locus"]
    for s, r in zip(found, reports):
        parts = [f"({format_ints(h.character.coords)})={h.target}" for h in s.hyperplanes]
        lines.append("  " + "  ".join(parts) + f"  -> coordinates {r.permutation}")
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = SweepConfig(
        max_group_order=args.max_order,
        moduli_alphabet=parse_ints(args.alphabet),
        max_factors=args.max_factors,
        parallelism=args.parallelism,
        output_format=args.format,
        max_n=args.max_n,
    )
    report = run_sweep(args.theorem, cfg)
    _emit(args, report.to_dict(), report.render_text())
    return 0 if report.passed else 1


def cmd_rho(args: argparse.Namespace) -> int:
    lens = LensSpace(args.n, args.q)
    if args.k is not None and not args.table:
        value = rho(lens, args.k)
        payload = {"n": lens.n, "q": lens.q, "k": args.k, "rho": str(value)}
        if args.k:
            payload["parity"] = str(rho_parity(lens, args.k))
        _emit(args, payload, str(value))
        return 0
    table = RhoTable.compute(lens)
    payload = table.to_dict()
    payload["signature_simple"] = certify_signature_simple(lens)
    text = "\n".join(f"{k}\t{v}" for k, v in enumerate(table.values))
    _emit(args, payload, text)
    return 0


def cmd_analyze_iso(args: argparse.Namespace) -> int:
    src = _group(args.moduli)
    tgt = _group(args.target_moduli) if args.target_moduli else src
    f = HomMatrix.parse(src, tgt, args.matrix)
    offset = parse_ints(args.offset) if args.offset else None
    rep = analyze_iso(f, offset)
    _emit(args, rep.to_dict(), json.dumps(rep.to_dict()))
    return 0


def _family(text: str) -> SignatureFamily:
    return SignatureFamily.model(parse_ints(text))


def cmd_signature_zero_locus(args: argparse.Namespace) -> int:
    fam = _family(args.family)
    zl = sorted(signature_zero_locus(fam))
    payload = {
        "family": list(fam.moduli),
        "size": len(zl),
        "elements": [list(a) for a in zl],
        "equals_zero_locus": set(zl) == zero_locus(fam.group),
    }
    _emit(args, payload, f"{len(zl)} characters with vanishing signature\n{_render_set(zl)}")
    return 0


def cmd_cancel(args: argparse.Namespace) -> int:
    fa, fb = _family(args.family_a), _family(args.family_b)
    check_cancellable(fa, fb)
    f = HomMatrix.parse(fb.group, fa.group, args.matrix)
    rep = cancellation_analyze(fa, fb, f)
    _emit(args, rep.to_dict(), json.dumps(rep.to_dict()))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")

    parser = argparse.ArgumentParser(
        prog="hypersplit",
        description="Hyperplanes in finite abelian groups and twisted-signature arithmetic.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("zloc", parents=[common], help="zero locus of a product of cyclic groups")
    p.add_argument("--moduli", required=True, help="e.g. 2,3,4")
    p.set_defaults(func=cmd_zero_locus)

    p = sub.add_parser("hyperplane", parents=[common], help="inspect one affine hyperplane")
    p.add_argument("--moduli", required=True)
    p.add_argument("--char", required=True, help="character coordinates, e.g. 1,1")
    p.add_argument("--target", default="0", help="value in Q/Z, e.g. 1/2")
    p.set_defaults(func=cmd_hyperplane)

    p = sub.add_parser("splittings", parents=[common], help="all splittings with union the zero locus")
    p.add_argument("--moduli", required=True)
    p.set_defaults(func=cmd_splittings)

    p = sub.add_parser("verify", parents=[common], help="run an exhaustive verification sweep")
    p.add_argument("theorem", choices=THEOREMS)
    p.add_argument("--alphabet", default="2,3,4,5", help="allowed moduli")
    p.add_argument("--max-factors", type=int, default=3)
    p.add_argument("--max-order", type=int, default=64)
    p.add_argument("--max-n", type=int, default=99, help="largest lens modulus for rho-values")
    p.add_argument("--parallelism", type=int, default=default_parallelism())
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("rho", parents=[common], help="rho invariants of a lens space")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--table", action="store_true")
    p.set_defaults(func=cmd_rho)

    p = sub.add_parser("analyze-iso", parents=[common], help="block form of a zero-locus preserving isomorphism")
    p.add_argument("--moduli", required=True)
    p.add_argument("--target-moduli")
    p.add_argument("--matrix", required=True, help="rows separated by ';', e.g. 0,1;1,0")
    p.add_argument("--offset", help="translation for an affine map")
    p.set_defaults(func=cmd_analyze_iso)

    p = sub.add_parser("signatures", help="model twisted-signature families")
    sig = p.add_subparsers(dest="signatures_command", required=True)
    q = sig.add_parser("zero-locus", parents=[common], help="characters with vanishing signature")
    q.add_argument("--family", required=True, help="moduli of the product family, e.g. 3,5,7")
    q.set_defaults(func=cmd_signature_zero_locus)

    p = sub.add_parser("cancel", parents=[common], help="analyze a character isomorphism between families")
    p.add_argument("--family-a", required=True)
    p.add_argument("--family-b", required=True)
    p.add_argument("--matrix", required=True, help="map from family B's characters to family A's")
    p.set_defaults(func=cmd_cancel)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except HypersplitError as exc:
        if getattr(args, "format", "text") == "json":
            print(json.dumps({"error": type(exc).__name__, "message": str(exc)}))
        else:
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
