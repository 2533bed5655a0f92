"""Command-line entry point: ``leibdegen <command> ...``.

Exit codes: 0 success, 1 verification failure, 2 inconclusive (budget).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .algebra import is_lie, is_nilpotent, is_solvable, leibniz_defect
from .catalog import CatalogParseError, builtin_catalog, parse_algebra
from .exactmath import Budget

OK, FAILED, INCONCLUSIVE = 0, 1, 2


def _budget(args) -> Budget:
    n = getattr(args, "budget", None)
    return Budget(max_reductions=n) if n else Budget()


def _invariant_lines(A) -> list[str]:
    from .separation import family_invariants

    inv = family_invariants(A)
    out = []
    for key in ("ann_left", "ann_right", "ann", "square", "plus_square"):
        sd = inv[key]
        line = f"  dim {key}: {sd.generic}"
        jumps = [f"{s.value} at {s.constraint}" for s in sd.strata]
        if jumps:
            line += " (" + "; ".join(jumps) + ")"
        out.append(line)
    der = inv["der"]
    line = f"  dim Der: {der.generic_dim}"
    if der.exceptional_locus:
        line += " (" + "; ".join(f"{s.value} at {s.constraint}" for s in der.exceptional_locus) + ")"
    out.append(line)
    out.append(f"  lie: {is_lie(A)}  nilpotent: {is_nilpotent(A)}  solvable: {is_solvable(A)}")
    return out


def cmd_check(args) -> int:
    try:
        entry = parse_algebra(Path(args.file).read_text(), args.file)
    except CatalogParseError as exc:
        print(f"parse error: {exc}")
        return FAILED
    A = entry.structure
    defects = leibniz_defect(A)
    print(f"{entry.label or args.file}: dim {A.dim}, params {', '.join(A.params) or '-'}")
    if defects:
        print("Leibniz identity FAILS")
        for idx, v in sorted(defects.items())[:8]:
            print(f"  defect {idx}: {v}")
        return FAILED
    print("Leibniz identity holds")
    for line in _invariant_lines(A):
        print(line)
    return OK


def cmd_invariants(args) -> int:
    try:
        entry = builtin_catalog().get(args.label)
    except KeyError as exc:
        print(exc.args[0])
        return FAILED
    A = entry.structure
    print(f"{entry.label}: params {', '.join(A.params) or '-'}")
    for r in entry.restrictions:
        print(f"  restrict {r.text}")
    for line in _invariant_lines(A):
        print(line)
    return OK


def cmd_degenerate(args) -> int:
    from .degeneration import parse_certificate, verify_degeneration

    try:
        cert = parse_certificate(Path(args.file).read_text(), args.file)
    except (CatalogParseError, ValueError) as exc:
        print(f"parse error: {exc}")
        return FAILED
    rep = verify_degeneration(cert, builtin_catalog())
    if args.json:
        print(json.dumps(rep.to_dict(), indent=2, sort_keys=True))
    else:
        print(f"{cert.source} -> {cert.target}: {rep.verdict}")
        for d in rep.diagnostics:
            print(f"  {d}")
        for c in rep.exceptional_checks:
            at = ", ".join(f"{k} = {v}" for k, v in c.bindings)
            print(f"  at {at}: {c.verdict} {c.detail}".rstrip())
    return OK if rep.verified else FAILED


def cmd_separate(args) -> int:
    from .separation import parse_separation, verify_separation

    try:
        cert = parse_separation(Path(args.file).read_text(), args.file)
    except (CatalogParseError, ValueError) as exc:
        print(f"parse error: {exc}")
        return FAILED
    rep = verify_separation(cert, builtin_catalog(), _budget(args))
    if args.json:
        print(json.dumps(rep.to_dict(), indent=2, sort_keys=True))
    else:
        print(f"{cert.rule}: {', '.join(cert.sources)} -/-> {', '.join(cert.targets)}: {rep.verdict}")
        for d in rep.diagnostics:
            print(f"  {d}")
    return {"verified": OK, "failed": FAILED}.get(rep.verdict, INCONCLUSIVE)


def cmd_six_tuple(args) -> int:
    from .separation import NotStandardError, six_tuple, vanishing_forms

    try:
        entry = builtin_catalog().get(args.label)
    except KeyError as exc:
        print(exc.args[0])
        return FAILED
    try:
        st = six_tuple(entry.structure)
    except NotStandardError as exc:
        print(f"{entry.label}: not a standard structure ({exc})")
        return FAILED
    print(f"{entry.label}: {st}")
    for f in vanishing_forms([st]):
        print(f"  {f} = 0")
    return OK


def cmd_verify_theorem(args) -> int:
    from .orchestrator import verify_theorem

    rep = verify_theorem(args.bundle, _budget(args))
    print(rep.summary())
    if args.report:
        Path(args.report).write_text(rep.to_json())
    if rep.success:
        return OK
    if rep.inconclusive and not rep.contradicted:
        return INCONCLUSIVE
    return FAILED


def cmd_conjectures(args) -> int:
    from .orchestrator import check_conjectures

    rep = check_conjectures(args.bundle, _budget(args))
    print(rep.summary())
    if args.json:
        print(json.dumps(rep.to_dict(), indent=2, sort_keys=True))
    statuses = (rep.goh, rep.vgoh, rep.vergne)
    return INCONCLUSIVE if "undecided" in statuses else OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="leibdegen", description="Exact checks for degenerations of 4-dim Leibniz algebras")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check", help="Leibniz identity and invariants of an algebra file")
    s.add_argument("file")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("invariants", help="invariants of a catalog algebra")
    s.add_argument("label")
    s.set_defaults(func=cmd_invariants)

    s = sub.add_parser("degenerate", help="verify a degeneration certificate")
    s.add_argument("file")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_degenerate)

    s = sub.add_parser("separate", help="verify a separation certificate")
    s.add_argument("file")
    s.add_argument("--budget", type=int)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_separate)

    s = sub.add_parser("six-tuple", help="six-tuple and vanishing forms of a standard structure")
    s.add_argument("label")
    s.set_defaults(func=cmd_six_tuple)

    s = sub.add_parser("verify-theorem", help="re-verify the certificate bundle")
    s.add_argument("--bundle")
    s.add_argument("--budget", type=int)
    s.add_argument("--report")
    s.set_defaults(func=cmd_verify_theorem)

    s = sub.add_parser("conjectures", help="status of the degeneration conjectures for n = 4")
    s.add_argument("--bundle")
    s.add_argument("--budget", type=int)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_conjectures)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
