"""``schubert`` command line: analyze, witness, verify, decompose, selfcheck.

Inputs are 0/1 matrices, read from a file or given with ``--matrix`` using
"/" between rows.  Exit codes: 0 success, 2 bad input, 3 internal invariant
failure, 4 precondition mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from typing import Optional, Sequence

from . import __version__
from .errors import (
    InputError,
    InternalDisagreement,
    InvariantFailure,
    PreconditionError,
    SchubertError,
    VexillaryInput,
    ZeroParameter,
)
from .exact_linalg import format_rational, parse_rational
from .perm_core import (
    MINIMAL,
    NON_MINIMAL,
    Decomposition,
    PartialPermutation,
    RotheDiagram,
    all_partial_permutations,
    all_permutations,
    classify,
    decompose,
    enumerate_gr2,
    gr2_tilde_shape,
    gr2_twin,
    is_vexillary_pattern,
    is_vexillary_restriction,
    parse_partial_permutation,
    rothe_diagram,
)
from .variety import is_stationary_at, sample_regular
from .witness import DEFAULT_Y, certify_nonminimal, table_mismatches

EXIT_OK, EXIT_INPUT, EXIT_INVARIANT, EXIT_PRECONDITION = 0, 2, 3, 4


def _load(args) -> PartialPermutation:
    if args.matrix is not None:
        text = args.matrix
    elif args.path is not None:
        try:
            with open(args.path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {args.path}: {exc.strerror}") from exc
    else:
        raise InputError("give a matrix file or --matrix")
    return parse_partial_permutation(text)


def _parse_y(text: str) -> tuple:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise ZeroParameter("--y takes exactly three comma-separated rationals")
    y = tuple(parse_rational(p) for p in parts)
    if any(v == 0 for v in y):
        raise ZeroParameter("--y entries must be nonzero")
    return y


def _cells(cells) -> list:
    return [list(c) for c in sorted(cells)]


def _diagram_dict(D: RotheDiagram) -> dict:
    return {"cells": _cells(D.cells), "components": [_cells(c) for c in D.components]}


def _tree(w: PartialPermutation, dec: Decomposition) -> dict:
    factors = []
    for f in dec.factors:
        shape = gr2_tilde_shape(rothe_diagram(f.w))
        factors.append({
            "factor": f.w.to_text(" / "),
            "rows": list(f.rows),
            "cols": list(f.cols),
            "in_gr2_tilde": shape is not None,
            "shape": shape.kind if shape else None,
        })
    return {"zero_cells": _cells(dec.zero_cells), "factors": factors,
            "free": _cells(dec.free), "free_count": dec.free_count}


def _base_report(w: PartialPermutation, args) -> tuple[dict, RotheDiagram, object]:
    D = rothe_diagram(w)
    pattern = is_vexillary_pattern(w)
    restriction = is_vexillary_restriction(w, D)
    if pattern != restriction:
        raise InternalDisagreement(
            f"vexillary tests disagree on {w}: pattern={pattern}, restriction={restriction}")
    cls = classify(w, D)
    report = {
        "input": w.to_text(" / "),
        "shape": [w.m, w.n],
        "classification": cls.as_dict(),
        "diagram": _diagram_dict(D),
        "verdict": cls.verdict,
        "evidence": {},
        "seed": getattr(args, "seed", None),
        "tool_version": __version__,
    }
    return report, D, cls


def _proof_path(cls) -> Optional[str]:
    if cls.verdict != MINIMAL:
        return None
    if cls.shape is not None and cls.shape.kind == "empty":
        return "empty diagram: the variety is the whole matrix space"
    if cls.in_gr2:
        return "Gr2 form: reflection symmetries force zero mean curvature"
    if cls.in_gr2_tilde:
        return "same diagram as a Gr2 matrix: Euclidean factor times the Gr2 twin"
    return "product decomposition with every factor in the Gr2-diagram class"


def cmd_analyze(w: PartialPermutation, args) -> dict:
    report, D, cls = _base_report(w, args)
    report["evidence"]["proof_path"] = _proof_path(cls)
    if cls.decomposable:
        report["evidence"]["decomposition"] = _tree(w, decompose(w, D))
    return report


def cmd_witness(w: PartialPermutation, args) -> dict:
    y = _parse_y(args.y)
    report, D, cls = _base_report(w, args)
    if cls.vexillary:
        raise VexillaryInput(f"{w} is vexillary: no non-minimality witness exists")
    cert = certify_nonminimal(w, y, D)
    report["evidence"]["certificate"] = cert.as_dict()
    return report


def cmd_decompose(w: PartialPermutation, args) -> dict:
    report, D, cls = _base_report(w, args)
    report["evidence"]["decomposition"] = _tree(w, decompose(w, D))
    return report


def _sampling(w: PartialPermutation, D: RotheDiagram, samples: int, seed: int) -> dict:
    hits = 0
    for k in range(samples):
        q = sample_regular(w, (seed, k), 3, D)
        hits += is_stationary_at(w, q.point, D)
    return {"samples": samples, "stationary": hits, "summary": f"stationary at {hits}/{samples} sampled points"}


def cmd_verify(w: PartialPermutation, args) -> dict:
    from .gr2_symmetry import verify_normal_action

    report, D, cls = _base_report(w, args)
    ev = report["evidence"]
    ev["sampling"] = _sampling(w, D, args.samples, args.seed)
    ev["proof_path"] = _proof_path(cls)
    if cls.verdict == NON_MINIMAL:
        ev["certificate"] = certify_nonminimal(w, _parse_y(args.y), D).as_dict()
        return report
    if cls.shape is not None:
        if cls.in_gr2:
            target, note = w, None
        else:
            _, target = gr2_twin(cls.shape)
            note = (f"verified on the Gr2 twin {target.to_text(' / ')}; "
                    "the input variety is congruent to that twin times a Euclidean factor")
        suite = verify_normal_action(target, samples=args.samples, seed=args.seed)
        ev["gr2_suite"] = suite.as_dict()
        if note:
            ev["reduction"] = note
        if not suite.ok:
            raise InvariantFailure(f"Gr2 symmetry checks failed: {suite.as_dict()['checks']}")
    if cls.decomposable:
        ev["decomposition"] = _tree(w, decompose(w, D))
    return report


def cmd_selfcheck(args) -> dict:
    from .gr2_symmetry import verify_normal_action

    K = args.max_size
    out: dict = {"max_size": K, "sweeps": {}, "tool_version": __version__}
    t0 = time.perf_counter()

    bad = [str(w) for m in range(1, K + 1) for n in range(1, K + 1)
           for w in all_partial_permutations(m, n)
           if is_vexillary_pattern(w) != is_vexillary_restriction(w)]
    out["sweeps"]["vexillary_equivalence"] = bad

    ys = [DEFAULT_Y, (Fraction(-3), Fraction(2, 5), Fraction(-1, 7))]
    bad = []
    for k in range(2, K + 1):
        for s in all_permutations(k):
            if s.is_identity():
                continue
            for y in ys:
                if table_mismatches(s, y):
                    bad.append(f"sigma={s.image} y={[format_rational(v) for v in y]}")
    out["sweeps"]["sigma_hat_tables"] = bad

    bad = []
    for m in range(1, K + 1):
        for n in range(1, K + 1):
            for w in all_partial_permutations(m, n):
                if is_vexillary_pattern(w):
                    continue
                try:
                    cert = certify_nonminimal(w, DEFAULT_Y)
                    if not all(v for k, v in cert.checks.items() if isinstance(v, bool)):
                        bad.append(str(w))
                except SchubertError as exc:
                    bad.append(f"{w}: {exc}")
    out["sweeps"]["witness"] = bad

    bad = []
    for params, w in enumerate_gr2(K, K):
        rep = verify_normal_action(w, samples=3, seed=0)
        if not rep.ok:
            bad.append(f"{w} seed=0 checks={rep.checks}")
    out["sweeps"]["gr2_suites"] = bad

    out["passed"] = all(not v for v in out["sweeps"].values())
    out["seconds"] = round(time.perf_counter() - t0, 2)
    return out


# ---------------------------------------------------------------------------
# output

def _human(report: dict) -> str:
    if "sweeps" in report:
        lines = [f"selfcheck up to size {report['max_size']}: {'PASS' if report['passed'] else 'FAIL'}"
                 f" ({report['seconds']}s)"]
        for name, failures in report["sweeps"].items():
            lines.append(f"  {name}: {'ok' if not failures else f'{len(failures)} failure(s)'}")
            lines.extend(f"    {f}" for f in failures[:10])
        return "\n".join(lines)
    cls = report["classification"]
    lines = [
        f"input: {report['input']}  ({report['shape'][0]}x{report['shape'][1]})",
        f"diagram: {len(report['diagram']['cells'])} cells, {len(report['diagram']['components'])} component(s)",
        f"vexillary: {cls['vexillary']}   Gr2: {cls['in_gr2']}   Gr2-diagram class: {cls['in_gr2_tilde']}",
        f"verdict: {report['verdict']}",
    ]
    ev = report["evidence"]
    if ev.get("proof_path"):
        lines.append(f"proof path: {ev['proof_path']}")
    if "sampling" in ev:
        lines.append(ev["sampling"]["summary"])
    if "reduction" in ev:
        lines.append(ev["reduction"])
    if "gr2_suite" in ev:
        checks = ev["gr2_suite"]["checks"]
        lines.append("symmetry checks: " + ", ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in checks.items()))
    if "decomposition" in ev:
        tree = ev["decomposition"]
        lines.append(f"decomposition: {len(tree['factors'])} factor(s), {tree['free_count']} free coordinate(s)")
        for f in tree["factors"]:
            lines.append(f"  [{f['factor']}] rows {f['rows']} cols {f['cols']}"
                         f"  Gr2-diagram class: {f['in_gr2_tilde']}")
    if "certificate" in ev:
        c = ev["certificate"]
        lines.append(f"witness cell {tuple(c['cell'])}, partner {tuple(c['partner'])}, "
                     f"restricted permutation {c['restricted_perm']}, y = {', '.join(c['y'])}")
        lines.append(f"trace = {c['numeric_trace']}   Gram block det = {c['gram_block_det']}")
        lines.append("checks: " + ", ".join(f"{k}={v}" for k, v in c["checks"].items()))
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="schubert", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_input(p):
        p.add_argument("path", nargs="?", help="file holding a 0/1 matrix, one row per line")
        p.add_argument("--matrix", help='inline matrix, rows separated by "/", e.g. "0 1 / 1 0"')
        p.add_argument("--json", action="store_true", help="emit a JSON report")

    for name, helptext in (("analyze", "diagram, vexillarity and verdict"),
                           ("decompose", "product decomposition tree"),
                           ("witness", "non-minimality certificate"),
                           ("verify", "sample regular points and run the symmetry checks")):
        p = sub.add_parser(name, help=helptext)
        add_input(p)
        if name in ("witness", "verify"):
            p.add_argument("--y", default="1/2,1/3,2", help="witness parameters y1,y2,y3 (nonzero rationals)")
        if name == "verify":
            p.add_argument("--samples", type=int, default=20)
            p.add_argument("--seed", type=int, default=0)
    p = sub.add_parser("selfcheck", help="exhaustive sweeps up to a size bound")
    p.add_argument("--max-size", type=int, default=3)
    p.add_argument("--json", action="store_true")
    return parser


COMMANDS = {"analyze": cmd_analyze, "witness": cmd_witness, "verify": cmd_verify, "decompose": cmd_decompose}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "selfcheck":
            report = cmd_selfcheck(args)
        else:
            report = COMMANDS[args.command](_load(args), args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PreconditionError as exc:
        print(f"precondition not met: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except InvariantFailure as exc:
        print(f"internal check failed: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    print(json.dumps(report, indent=2) if args.json else _human(report))
    if args.command == "selfcheck" and not report["passed"]:
        return EXIT_INVARIANT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
