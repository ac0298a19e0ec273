"""Text formats for flows and morphisms, the PV grid builder, builtins.

Flow files hold one declaration per line; ``#`` starts a comment::

    flow <name>
    state <id>
    edge <id> : <state> -> <state>
    square <id> : <word> => <word>
    cube <id> dim <d> : <i> 0 => <word> ; <i> 1 => <word> ; ...

Words are generator ids joined by dots.  States are declared on first use.
Morphism files::

    map <name>
    state <x> -> <y>
    gen <g> -> <word>
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

from .flowcore import (
    FlowMorphism,
    FlowPresentation,
    Generator,
    InvalidMorphism,
    InvalidPresentation,
    Word,
    format_word,
    validate_morphism,
    validate_presentation,
)

_ID = r"[^\s.:;=#>-][^\s.:;=#]*?"


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1, source: str = "<flow>"):
        super().__init__(f"{source}:{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.message = message


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if line.strip():
            yield no, line


def _parse_word(s: str, no: int, col: int, source: str) -> Word:
    parts = s.strip().split(".")
    if not s.strip() or any(not x or re.search(r"\s", x) for x in parts):
        raise ParseError(f"malformed word {s.strip()!r}", no, col, source)
    return tuple(parts)


_EDGE = re.compile(r"^\s*edge\s+(\S+)\s*:\s*(\S+?)\s*->\s*(\S+)\s*$")
_SQUARE = re.compile(r"^\s*square\s+(\S+)\s*:\s*(\S+)\s*=>\s*(\S+)\s*$")
_CUBE = re.compile(r"^\s*cube\s+(\S+)\s+dim\s+(\d+)\s*:(.*)$")
_FACE = re.compile(r"^\s*(\d+)\s+([01])\s*=>\s*(\S+)\s*$")


def parse_flow(text: str, source: str = "<flow>") -> FlowPresentation:
    """Parse and validate a flow; errors carry line and column."""
    name = "flow"
    states: List[str] = []
    known: Set[str] = set()
    gens: List[Generator] = []
    where: Dict[str, Tuple[int, int]] = {}
    pending: List[Tuple[str, int, str, Tuple, int]] = []

    def note_state(s: str):
        if s not in known:
            known.add(s)
            states.append(s)

    for no, line in _lines(text):
        head = line.split()[0]
        if head == "flow":
            parts = line.split()
            if len(parts) != 2:
                raise ParseError("expected 'flow <name>'", no, 1, source)
            name = parts[1]
        elif head == "state":
            parts = line.split()
            if len(parts) != 2:
                raise ParseError("expected 'state <id>'", no, 1, source)
            note_state(parts[1])
        elif head == "edge":
            m = _EDGE.match(line)
            if not m:
                raise ParseError("expected 'edge <id> : <state> -> <state>'", no, 1, source)
            gid, s, t = m.groups()
            note_state(s)
            note_state(t)
            where[gid] = (no, m.start(1) + 1)
            gens.append(Generator(gid, 0, s, t))
        elif head == "square":
            m = _SQUARE.match(line)
            if not m:
                raise ParseError("expected 'square <id> : <word> => <word>'", no, 1, source)
            gid = m.group(1)
            w0 = _parse_word(m.group(2), no, m.start(2) + 1, source)
            w1 = _parse_word(m.group(3), no, m.start(3) + 1, source)
            where[gid] = (no, m.start(1) + 1)
            pending.append((gid, 1, "", ((w0, w1),), no))
            gens.append(None)  # placeholder keeps declaration order
        elif head == "cube":
            m = _CUBE.match(line)
            if not m:
                raise ParseError("expected 'cube <id> dim <d> : <i> 0 => <word> ; ...'", no, 1, source)
            gid, d = m.group(1), int(m.group(2))
            if d < 2:
                raise ParseError("cube dimension must be at least 2 (use edge or square)", no, m.start(2) + 1, source)
            faces: Dict[Tuple[int, int], Word] = {}
            offset = m.start(3)
            for chunk in m.group(3).split(";"):
                fm = _FACE.match(chunk)
                col = offset + 1
                if not fm:
                    raise ParseError(f"malformed face {chunk.strip()!r}", no, col, source)
                axis, sign = int(fm.group(1)), int(fm.group(2))
                if not 1 <= axis <= d:
                    raise ParseError(f"axis {axis} outside 1..{d}", no, col, source)
                if (axis, sign) in faces:
                    raise ParseError(f"face {axis} {sign} given twice", no, col, source)
                faces[(axis, sign)] = _parse_word(fm.group(3), no, col, source)
                offset += len(chunk) + 1
            missing = [(i, e) for i in range(1, d + 1) for e in (0, 1) if (i, e) not in faces]
            if missing:
                raise ParseError(f"missing face {missing[0][0]} {missing[0][1]}", no, 1, source)
            where[gid] = (no, m.start(1) + 1)
            pending.append((gid, d, "", tuple((faces[(i, 0)], faces[(i, 1)]) for i in range(1, d + 1)), no))
            gens.append(None)
        else:
            raise ParseError(f"unknown declaration {head!r}", no, 1, source)

    # squares and cubes take their endpoints from their first face word
    partial = FlowPresentation(name, tuple(states), tuple(g for g in gens if g is not None))
    by_id = {g.id: g for g in partial.generators}
    resolved: Dict[str, Generator] = {}
    for gid, d, _, faces, no in pending:
        w = faces[0][0]
        first, last = w[0], w[-1]
        lookup = {**by_id, **resolved}
        for letter in w:
            if letter not in lookup and letter not in {p[0] for p in pending}:
                col = where[gid][1]
                raise ParseError(f"undeclared generator {letter!r} in face word", no, col, source)
        if first not in lookup or last not in lookup:
            raise ParseError(f"face word of {gid!r} uses a cell declared later", no, where[gid][1], source)
        resolved[gid] = Generator(gid, d, lookup[first].source, lookup[last].target, faces)
    out = []
    it = iter(pending)
    for g in gens:
        out.append(g if g is not None else resolved[next(it)[0]])
    p = FlowPresentation(name, tuple(states), tuple(out))
    report = validate_presentation(p)
    if not report.ok:
        first = report.errors[0]
        m = re.search(r"generator '([^']+)'", first)
        line, col = where.get(m.group(1), (1, 1)) if m else (1, 1)
        raise ParseError("; ".join(report.errors), line, col, source)
    return p


def serialize_flow(p: FlowPresentation) -> str:
    lines = [f"flow {p.name}"]
    lines += [f"state {s}" for s in p.states]
    for g in p.generators:
        if g.dim == 0:
            lines.append(f"edge {g.id} : {g.source} -> {g.target}")
        elif g.dim == 1:
            lines.append(f"square {g.id} : {format_word(g.face(1, 0))} => {format_word(g.face(1, 1))}")
        else:
            faces = " ; ".join(f"{i} {e} => {format_word(g.face(i, e))}"
                               for i in range(1, g.dim + 1) for e in (0, 1))
            lines.append(f"cube {g.id} dim {g.dim} : {faces}")
    return "\n".join(lines) + "\n"


_MSTATE = re.compile(r"^\s*state\s+(\S+?)\s*->\s*(\S+)\s*$")
_MGEN = re.compile(r"^\s*gen\s+(\S+?)\s*->\s*(\S+)\s*$")


def parse_morphism(text: str, X: FlowPresentation, Y: FlowPresentation,
                   source: str = "<map>") -> FlowMorphism:
    name = "f"
    smap: Dict[str, str] = {}
    gmap: Dict[str, Word] = {}
    where: Dict[str, Tuple[int, int]] = {}
    ystates = set(Y.states)
    for no, line in _lines(text):
        head = line.split()[0]
        if head == "map":
            parts = line.split()
            if len(parts) != 2:
                raise ParseError("expected 'map <name>'", no, 1, source)
            name = parts[1]
        elif head == "state":
            m = _MSTATE.match(line)
            if not m:
                raise ParseError("expected 'state <x> -> <y>'", no, 1, source)
            x, y = m.groups()
            if x not in X.states:
                raise ParseError(f"unknown source state {x!r}", no, m.start(1) + 1, source)
            if y not in ystates:
                raise ParseError(f"unknown target state {y!r}", no, m.start(2) + 1, source)
            smap[x] = y
            where[x] = (no, m.start(1) + 1)
        elif head == "gen":
            m = _MGEN.match(line)
            if not m:
                raise ParseError("expected 'gen <g> -> <word>'", no, 1, source)
            g = m.group(1)
            if g not in X:
                raise ParseError(f"unknown source generator {g!r}", no, m.start(1) + 1, source)
            w = _parse_word(m.group(2), no, m.start(2) + 1, source)
            for letter in w:
                if letter not in Y:
                    raise ParseError(f"unknown target generator {letter!r}", no, m.start(2) + 1, source)
            gmap[g] = w
            where[g] = (no, m.start(1) + 1)
        else:
            raise ParseError(f"unknown declaration {head!r}", no, 1, source)
    f = FlowMorphism(X, Y, smap, gmap, name)
    report = validate_morphism(f)
    if not report.ok:
        first = report.errors[0]
        m = re.search(r"(?:generator|state) '([^']+)'", first)
        line, col = where.get(m.group(1), (1, 1)) if m else (1, 1)
        raise ParseError("; ".join(report.errors), line, col, source)
    return f


def serialize_morphism(f: FlowMorphism) -> str:
    lines = [f"map {f.name}"]
    lines += [f"state {s} -> {f.state_map[s]}" for s in f.source.states]
    lines += [f"gen {g.id} -> {format_word(f.generator_map[g.id])}" for g in f.source.generators]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# PV diagrams

PLUS = frozenset({(2, 1), (1, 2), (2, 2), (3, 2), (2, 3)})


def grid_state(i: int, j: int) -> str:
    return f"({i},{j})"


def pv_grid(width: int, height: int, forbidden: Iterable[Tuple[int, int]] = (),
            name: Optional[str] = None) -> FlowPresentation:
    """Grid flow of a two-process PV diagram.

    Every grid point is a state.  An interior edge is dropped when both
    unit cells beside it are forbidden; boundary edges always stay.  A unit
    cell (i, j) becomes a square unless it is forbidden, with faces
    bottom.right => left.top.
    """
    if width < 1 or height < 1:
        raise ValueError("grid must be at least 1x1")
    forbidden = frozenset(tuple(c) for c in forbidden)
    for i, j in forbidden:
        if not (0 <= i < width and 0 <= j < height):
            raise ValueError(f"forbidden cell ({i},{j}) outside the {width}x{height} grid")

    def cell_ok(i, j):
        return 0 <= i < width and 0 <= j < height and (i, j) not in forbidden

    def kept(cells):
        cells = [c for c in cells if 0 <= c[0] < width and 0 <= c[1] < height]
        return len(cells) < 2 or any(c not in forbidden for c in cells)

    states = tuple(grid_state(i, j) for j in range(height + 1) for i in range(width + 1))
    gens: List[Generator] = []
    horiz = set()
    vert = set()
    for j in range(height + 1):
        for i in range(width):
            if kept([(i, j - 1), (i, j)]):
                horiz.add((i, j))
                gens.append(Generator(f"h{i}_{j}", 0, grid_state(i, j), grid_state(i + 1, j)))
    for j in range(height):
        for i in range(width + 1):
            if kept([(i - 1, j), (i, j)]):
                vert.add((i, j))
                gens.append(Generator(f"v{i}_{j}", 0, grid_state(i, j), grid_state(i, j + 1)))
    for j in range(height):
        for i in range(width):
            if cell_ok(i, j):
                w0 = (f"h{i}_{j}", f"v{i + 1}_{j}")
                w1 = (f"v{i}_{j}", f"h{i}_{j + 1}")
                gens.append(Generator(f"s{i}_{j}", 1, grid_state(i, j), grid_state(i + 1, j + 1), ((w0, w1),)))
    return FlowPresentation(name or f"pv{width}x{height}", states, tuple(gens))


def parse_cells(spec: str) -> frozenset:
    """``plus``, ``none``, or a list like ``(0,0),(1,0)``."""
    spec = spec.strip()
    if spec in ("", "none"):
        return frozenset()
    if spec == "plus":
        return PLUS
    pairs = re.findall(r"\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)", spec)
    if not pairs or re.sub(r"\(\s*-?\d+\s*,\s*-?\d+\s*\)|[\s,]", "", spec):
        raise ValueError(f"cannot read cell list {spec!r}")
    return frozenset((int(a), int(b)) for a, b in pairs)


# ---------------------------------------------------------------------------
# builtin examples

_DIRSEG = """\
flow dirseg
edge u : 0 -> 1
"""

_SEG2 = """\
flow seg2
edge v : 0 -> A
edge w : A -> 1
"""

_PHI = """\
map phi
state 0 -> 0
state 1 -> 1
gen u -> v.w
"""

_BRANCH1 = """\
flow branch1
edge [0,1] : 0 -> 1
edge [1,2] : 1 -> 2
edge [0,3] : 0 -> 3
"""


def _branch2() -> FlowPresentation:
    """Three 2x2 sheets of squares on the faces z=0, x=0, y=0 of a cube.

    The sheets share the axes; A, F, I are the squares at the origin and
    C, G, L the far squares whose corners are the three final states.
    """
    def st(x, y, z):
        return f"({x},{y},{z})"

    sheets = [
        # (free axes, letters by cell (a,b))
        ((0, 1), {(0, 0): "A", (1, 0): "B", (1, 1): "C", (0, 1): "D"}),
        ((1, 2), {(0, 0): "F", (1, 0): "E", (1, 1): "G", (0, 1): "H"}),
        ((0, 2), {(0, 0): "I", (1, 0): "J", (1, 1): "L", (0, 1): "K"}),
    ]
    points = set()
    for axes, _ in sheets:
        for a in range(3):
            for b in range(3):
                pt = [0, 0, 0]
                pt[axes[0]], pt[axes[1]] = a, b
                points.add(tuple(pt))
    order = sorted(points, key=lambda p: (sum(p), p))
    gens: List[Generator] = []
    edges: Dict[Tuple[Tuple[int, ...], int], str] = {}
    for pt in order:
        for ax in range(3):
            q = list(pt)
            q[ax] += 1
            q = tuple(q)
            if q in points:
                eid = "e" + "xyz"[ax] + "".join(map(str, pt))
                edges[(pt, ax)] = eid
                gens.append(Generator(eid, 0, st(*pt), st(*q)))
    for axes, names in sheets:
        u, v = axes
        for (a, b), letter in sorted(names.items(), key=lambda kv: kv[1]):
            pt = [0, 0, 0]
            pt[u], pt[v] = a, b
            pt = tuple(pt)
            pu = list(pt); pu[u] += 1; pu = tuple(pu)
            pv = list(pt); pv[v] += 1; pv = tuple(pv)
            far = list(pu); far[v] += 1; far = tuple(far)
            w0 = (edges[(pt, u)], edges[(pu, v)])
            w1 = (edges[(pt, v)], edges[(pv, u)])
            gens.append(Generator(letter, 1, st(*pt), st(*far), ((w0, w1),)))
    gens.sort(key=lambda g: (g.dim, g.id))
    return FlowPresentation("branch2", tuple(st(*p) for p in order), tuple(gens))


BUILTIN_FLOWS = ("dirseg", "seg2", "branch1", "branch2", "swiss")
BUILTIN_MORPHISMS = ("phi",)
BUILTINS = ("dirseg", "seg2", "phi", "branch1", "branch2", "swiss")


def builtin(name: str) -> Union[FlowPresentation, FlowMorphism]:
    if name == "dirseg":
        return parse_flow(_DIRSEG, "dirseg")
    if name == "seg2":
        return parse_flow(_SEG2, "seg2")
    if name == "phi":
        return parse_morphism(_PHI, builtin("dirseg"), builtin("seg2"), "phi")
    if name == "branch1":
        return parse_flow(_BRANCH1, "branch1")
    if name == "branch2":
        return _branch2()
    if name == "swiss":
        return pv_grid(5, 5, PLUS, name="swiss")
    raise KeyError(f"unknown builtin {name!r}; choose from {', '.join(BUILTINS)}")
