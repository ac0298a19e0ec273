"""Command-line driver.

Every command builds one report dictionary; ``--format machine`` prints it
as JSON and the default format renders the same dictionary as text.

Exit codes: 0 success, 1 parse or validation failure, 2 verification failure.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import List, Optional, Tuple

from .flowcore import (
    CapError,
    FlowMorphism,
    FlowPresentation,
    InvalidMorphism,
    InvalidPresentation,
    default_cap,
    identity_morphism,
)
from .germs import (
    BRANCHING,
    MERGING,
    brute_force_branching,
    brute_force_merging,
    check_t_homotopy,
    germ_complex,
    homology_of_side,
    les_report,
    sorted_states,
)
from .ingest import BUILTINS, ParseError, builtin, parse_cells, parse_flow, parse_morphism, pv_grid, serialize_flow
from .intlinalg import homology

OK, INPUT_ERROR, VERIFY_ERROR = 0, 1, 2


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# loading

def load_flow(ref: str) -> FlowPresentation:
    """A file path or ``builtin:NAME``."""
    if ref.startswith("builtin:"):
        obj = _builtin(ref[len("builtin:"):])
        if isinstance(obj, FlowMorphism):
            raise UsageError(f"{ref} is a morphism, not a flow")
        return obj
    path = Path(ref)
    return parse_flow(path.read_text(), str(path))


def _builtin(name: str):
    try:
        return builtin(name)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def load_morphism(ref: str, x: FlowPresentation, y: FlowPresentation) -> FlowMorphism:
    """A file path, ``identity``, or ``builtin:NAME``."""
    if ref == "identity":
        if x != y:
            raise UsageError("--map identity needs the same flow on both sides")
        return identity_morphism(x)
    if ref.startswith("builtin:"):
        f = _builtin(ref[len("builtin:"):])
        if not isinstance(f, FlowMorphism):
            raise UsageError(f"{ref} is a flow, not a morphism")
        if f.source != x or f.target != y:
            raise UsageError(f"{ref} maps {f.source.name} -> {f.target.name}")
        return f
    path = Path(ref)
    return parse_morphism(path.read_text(), x, y, str(path))


def _flow_arg(args) -> FlowPresentation:
    if args.builtin:
        return load_flow("builtin:" + args.builtin)
    if not args.flow:
        raise UsageError("give a flow file or --builtin NAME")
    return load_flow(args.flow)


def _morphism_args(args) -> FlowMorphism:
    if args.builtin:
        f = _builtin(args.builtin)
        if isinstance(f, FlowMorphism):
            return f
        if args.map not in (None, "identity"):
            raise UsageError("--builtin with a flow only combines with --map identity")
        return identity_morphism(f)
    if not args.source:
        raise UsageError("give source and target flows, or --builtin NAME")
    x = load_flow(args.source)
    y = load_flow(args.target) if args.target else x
    return load_morphism(args.map or "identity", x, y)


def _cap(p: FlowPresentation, requested: Optional[int]) -> int:
    cap = default_cap(p)
    if requested is None:
        return cap
    if requested < 0:
        raise UsageError("--max-dim must be non-negative")
    return min(requested, cap)


# ---------------------------------------------------------------------------
# commands

def _group_table(groups) -> List[dict]:
    return [{"degree": n, "group": str(g), **g.to_dict()} for n, g in enumerate(groups)]


def _homology_block(p: FlowPresentation, side: str, top: int, per_state: bool) -> dict:
    h = homology_of_side(p, side, top)
    block = {
        "side": side,
        "groups": _group_table(h.groups),
        "distinguished_states": list(h.distinguished),
    }
    if per_state:
        block["per_state"] = [
            {"state": s, "components": h.components[s],
             "reduced": [str(g) for g in h.per_state[s]]}
            for s in sorted_states(p.states)
        ]
    return block


def cmd_homology(args) -> Tuple[dict, int]:
    p = _flow_arg(args)
    side = MERGING if args.merging else BRANCHING
    top = max(p.max_generator_dim + 1, 0)
    if args.max_dim is not None:
        if args.max_dim < 0:
            raise UsageError("--max-dim must be non-negative")
        top = min(top, args.max_dim)
    report = {"command": "homology", "flow": p.name, "counts": p.counts()}
    report.update(_homology_block(p, side, top, args.per_state))
    return report, OK


def cmd_les(args) -> Tuple[dict, int]:
    f = _morphism_args(args)
    side = MERGING if args.merging else BRANCHING
    r = les_report(f, top=args.max_dim, side=side)
    nodes = []
    for v in r.exactness.nodes:
        nodes.append({"index": v.index, "label": v.label, "group": str(r.sequence.groups[v.index].group()),
                      "exact": v.exact, "reason": v.reason})
    report = {
        "command": "les",
        "map": f.name,
        "source": f.source.name,
        "target": f.target.name,
        "side": side,
        "degrees": list(r.degrees),
        "groups": {k: [str(v[n]) for n in r.degrees] for k, v in r.groups.items()},
        "nodes": nodes,
        "exact": r.exact,
    }
    return report, OK if r.exact else VERIFY_ERROR


def cmd_check_t(args) -> Tuple[dict, int]:
    f = _morphism_args(args)
    t = check_t_homotopy(f)
    report = {
        "command": "check-t",
        "map": f.name,
        "source": f.source.name,
        "target": f.target.name,
        "conditions": [{"number": c.number, "name": c.name, "passed": c.passed,
                        "witnesses": list(c.witnesses)} for c in t.conditions],
        "passed": t.passed,
    }
    if t.passed:
        tables = {}
        for label, p in (("source", f.source), ("target", f.target)):
            top = default_cap(p) + 1
            tables[label] = {side: [str(g) for g in homology_of_side(p, side, top).groups]
                             for side in (BRANCHING, MERGING)}
        report["tables"] = tables
    return report, OK if t.passed else VERIFY_ERROR


def cmd_pv(args) -> Tuple[dict, int]:
    try:
        w, h = (int(x) for x in args.grid.lower().split("x"))
    except ValueError:
        raise UsageError(f"--grid expects WxH, got {args.grid!r}") from None
    try:
        p = pv_grid(w, h, parse_cells(args.forbidden), name=args.name)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = {"command": "pv", "flow": p.name, "grid": [w, h],
              "forbidden": sorted(list(c) for c in parse_cells(args.forbidden)),
              "counts": p.counts()}
    text = serialize_flow(p)
    if args.out:
        Path(args.out).write_text(text)
        report["written"] = args.out
    else:
        report["text"] = text
    return report, OK


def cmd_oracle(args) -> Tuple[dict, int]:
    p = _flow_arg(args)
    cap = _cap(p, args.max_dim)
    # no words exist above the default cap; a lowered cap truncates the
    # word complex, which then only agrees below the cap
    degrees = range(4) if cap == default_cap(p) else range(cap)
    rows = []
    for side, brute in ((BRANCHING, brute_force_branching), (MERGING, brute_force_merging)):
        for s in sorted_states(p.states):
            germ = germ_complex(p, s, side).complex
            lit = brute(p, s, cap)
            for n in degrees:
                a, b = homology(germ, n), homology(lit, n)
                if a != b:
                    rows.append({"side": side, "state": s, "degree": n, "germ": str(a), "brute_force": str(b)})
    report = {"command": "oracle", "flow": p.name, "max_dim": cap, "degrees": list(degrees),
              "states": len(p.states), "mismatches": rows, "agree": not rows}
    return report, OK if not rows else VERIFY_ERROR


# ---------------------------------------------------------------------------
# rendering

def _counts(counts: dict) -> str:
    def key(k):
        order = {"states": 0, "edges": 1, "squares": 2}
        return (order.get(k, 3), int(k[3:]) if k.startswith("dim") else 0)
    return ", ".join(f"{counts[k]} {k}" for k in sorted(counts, key=key))


def _sym(side: str) -> str:
    return "-" if side == BRANCHING else "+"


def render(report: dict) -> str:
    cmd = report["command"]
    out: List[str] = []
    if cmd == "homology":
        out.append(f"flow {report['flow']}: " + _counts(report["counts"]))
        s = _sym(report["side"])
        for row in report["groups"]:
            out.append(f"H{s}_{row['degree']} = {row['group']}")
        if "per_state" in report:
            out.append(f"{'state':<12} {'pi0':>4}  reduced germ homology")
            for row in report["per_state"]:
                red = "  ".join(f"H~{n}={g}" for n, g in enumerate(row["reduced"]))
                out.append(f"{row['state']:<12} {row['components']:>4}  {red}")
    elif cmd == "les":
        out.append(f"long exact sequence of {report['map']}: {report['source']} -> {report['target']} "
                   f"({report['side']})")
        for k in ("X", "Y", "cone"):
            out.append(f"  {k:<5}" + "  ".join(f"H{n}={g}" for n, g in zip(report["degrees"], report["groups"][k])))
        for node in report["nodes"]:
            mark = "exact" if node["exact"] else "NOT EXACT: " + node["reason"]
            out.append(f"  {node['label']:<10} {node['group']:<10} {mark}")
        out.append("exact" if report["exact"] else "NOT EXACT")
    elif cmd == "check-t":
        out.append(f"T-homotopy check of {report['map']}: {report['source']} -> {report['target']}")
        for c in report["conditions"]:
            out.append(f"  ({c['number']}) {c['name']}: {'pass' if c['passed'] else 'FAIL'}")
            out.extend(f"      {w}" for w in c["witnesses"])
        if "tables" in report:
            for side in (BRANCHING, MERGING):
                src, tgt = report["tables"]["source"][side], report["tables"]["target"][side]
                n = max(len(src), len(tgt))
                src = src + ["0"] * (n - len(src))
                tgt = tgt + ["0"] * (n - len(tgt))
                for d in range(n):
                    out.append(f"  H{_sym(side)}_{d}: {src[d]:<10} {tgt[d]}")
        out.append("pass" if report["passed"] else "FAIL")
    elif cmd == "pv":
        out.append(f"flow {report['flow']}: " + _counts(report["counts"]))
        if "written" in report:
            out.append(f"written to {report['written']}")
        else:
            out.append(report["text"].rstrip("\n"))
    elif cmd == "oracle":
        out.append(f"oracle on {report['flow']} ({report['states']} states, words up to dimension "
                   f"{report['max_dim']})")
        for m in report["mismatches"]:
            out.append(f"  MISMATCH {m['side']} at {m['state']} degree {m['degree']}: "
                       f"germ {m['germ']} vs brute force {m['brute_force']}")
        out.append("agree" if report["agree"] else "DISAGREE")
    elif cmd == "error":
        out.append(f"error: {report['message']}")
    out.append(f"({report['seconds']:.3f}s)" if "seconds" in report else "")
    return "\n".join(line for line in out if line) + "\n"


# ---------------------------------------------------------------------------
# argument parsing

def _add_format(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("human", "machine"), default="human",
                   help="machine prints the report as JSON")
    p.add_argument("--no-timing", action="store_true", help="omit elapsed time (for golden files)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="flowhom", description="Branching and merging homology of flows.")
    sub = ap.add_subparsers(dest="command", required=True)
    names = ", ".join(BUILTINS)

    p = sub.add_parser("homology", help="H- (or H+ with --merging) of a flow")
    p.add_argument("flow", nargs="?", help=f"flow file or builtin:NAME ({names})")
    p.add_argument("--builtin", metavar="NAME")
    p.add_argument("--merging", action="store_true")
    p.add_argument("--max-dim", type=int, metavar="N", help="highest degree shown")
    p.add_argument("--per-state", action="store_true")
    _add_format(p)
    p.set_defaults(run=cmd_homology)

    for name, fn, help_ in (("les", cmd_les, "long exact sequence of a morphism"),
                            ("check-t", cmd_check_t, "check the T-homotopy conditions")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("source", nargs="?")
        p.add_argument("target", nargs="?")
        p.add_argument("--map", metavar="FILE", help="morphism file, identity, or builtin:NAME")
        p.add_argument("--builtin", metavar="NAME", help="builtin morphism, or a flow with its identity")
        if name == "les":
            p.add_argument("--max-dim", type=int, metavar="N")
            p.add_argument("--merging", action="store_true")
        _add_format(p)
        p.set_defaults(run=fn)

    p = sub.add_parser("pv", help="build the flow of a PV grid")
    p.add_argument("--grid", required=True, metavar="WxH")
    p.add_argument("--forbidden", default="none", help="plus, none, or (i,j),(k,l),...")
    p.add_argument("--name")
    p.add_argument("--out", metavar="FILE")
    _add_format(p)
    p.set_defaults(run=cmd_pv)

    p = sub.add_parser("oracle", help="compare germ homology with the brute-force quotient")
    p.add_argument("flow", nargs="?")
    p.add_argument("--builtin", metavar="NAME")
    p.add_argument("--max-dim", type=int, metavar="N", help="word dimension cap")
    _add_format(p)
    p.set_defaults(run=cmd_oracle)
    return ap


def run(argv: Optional[List[str]] = None) -> Tuple[dict, int, str]:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        report, code = args.run(args)
    except (ParseError, InvalidPresentation, InvalidMorphism, CapError, UsageError, OSError) as exc:
        report, code = {"command": "error", "kind": type(exc).__name__, "message": str(exc)}, INPUT_ERROR
    if not args.no_timing:
        report["seconds"] = round(time.perf_counter() - start, 4)
    return report, code, args.format


def main(argv: Optional[List[str]] = None) -> int:
    report, code, fmt = run(argv)
    text = json.dumps(report, indent=2, sort_keys=True) + "\n" if fmt == "machine" else render(report)
    (sys.stderr if report["command"] == "error" else sys.stdout).write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
