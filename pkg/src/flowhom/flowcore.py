"""Flow presentations: states plus globular generator cells.

A generator of dimension d runs from a source state to a target state and,
for d >= 1, has for every axis i and sign e a face *word* of total dimension
d - 1.  Words are tuples of generator ids composable end to end; their
dimension is the sum of the letter dimensions.  In a word the axes are handed
to letters left to right, a letter of dimension d owning d consecutive axes,
and a face of a word replaces the letter owning the axis by that letter's
face word (the splice rule).  Edges are generators of dimension 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .cubcomplex import Cube, PrecubicalComplex, ValidationReport

Word = Tuple[str, ...]


@dataclass(frozen=True)
class Generator:
    id: str
    dim: int
    source: str
    target: str
    faces: Tuple[Tuple[Word, Word], ...] = ()

    def face(self, axis: int, sign: int) -> Word:
        return self.faces[axis - 1][sign]


class InvalidPresentation(ValueError):
    def __init__(self, report: ValidationReport):
        super().__init__(str(report))
        self.report = report


class CapError(ValueError):
    pass


@dataclass(frozen=True)
class FlowPresentation:
    name: str
    states: Tuple[str, ...]
    generators: Tuple[Generator, ...]
    _by_id: Dict[str, Generator] = field(init=False, repr=False, compare=False)
    _out: Dict[str, Tuple[Generator, ...]] = field(init=False, repr=False, compare=False)
    _in: Dict[str, Tuple[Generator, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "generators", tuple(self.generators))
        by_id = {}
        out: Dict[str, list] = {s: [] for s in self.states}
        inc: Dict[str, list] = {s: [] for s in self.states}
        for g in self.generators:
            by_id.setdefault(g.id, g)
            out.setdefault(g.source, []).append(g)
            inc.setdefault(g.target, []).append(g)
        object.__setattr__(self, "_by_id", by_id)
        object.__setattr__(self, "_out", {k: tuple(v) for k, v in out.items()})
        object.__setattr__(self, "_in", {k: tuple(v) for k, v in inc.items()})

    def __getitem__(self, gid: str) -> Generator:
        return self._by_id[gid]

    def __contains__(self, gid: str) -> bool:
        return gid in self._by_id

    def outgoing(self, state: str) -> Tuple[Generator, ...]:
        return self._out.get(state, ())

    def incoming(self, state: str) -> Tuple[Generator, ...]:
        return self._in.get(state, ())

    @property
    def max_generator_dim(self) -> int:
        return max((g.dim for g in self.generators), default=-1)

    def counts(self) -> Dict[str, int]:
        """Number of states and of generators per dimension."""
        out = {"states": len(self.states)}
        for g in self.generators:
            key = {0: "edges", 1: "squares"}.get(g.dim, f"dim{g.dim}")
            out[key] = out.get(key, 0) + 1
        return out

    # words -----------------------------------------------------------------
    def word_dim(self, w: Sequence[str]) -> int:
        return sum(self[c].dim for c in w)

    def word_source(self, w: Sequence[str]) -> str:
        return self[w[0]].source

    def word_target(self, w: Sequence[str]) -> str:
        return self[w[-1]].target

    def face(self, w: Sequence[str], axis: int, sign: int) -> Word:
        """d_axis^sign of a word by the splice rule (axes from 1)."""
        offset = 0
        for k, c in enumerate(w):
            d = self[c].dim
            if axis <= offset + d:
                return tuple(w[:k]) + self[c].face(axis - offset, sign) + tuple(w[k + 1:])
            offset += d
        raise IndexError(f"axis {axis} out of range for word of dimension {offset}")


def word_error(p: FlowPresentation, w: Sequence[str]) -> Optional[str]:
    """Why ``w`` is not a word of ``p``, or None."""
    if not w:
        return "empty word"
    for c in w:
        if c not in p:
            return f"unknown generator {c!r}"
    for a, b in zip(w, w[1:]):
        if p[a].target != p[b].source:
            return f"{a!r} ends at {p[a].target!r} but {b!r} starts at {p[b].source!r}"
    return None


def format_word(w: Sequence[str]) -> str:
    return ".".join(w)


def _find_cycle(p: FlowPresentation) -> Optional[List[str]]:
    color: Dict[str, int] = {}
    for root in p.states:
        if root in color:
            continue
        stack = [(root, iter(p.outgoing(root)))]
        path = [root]
        color[root] = 1
        while stack:
            node, it = stack[-1]
            g = next(it, None)
            if g is None:
                color[node] = 2
                stack.pop()
                path.pop()
                continue
            t = g.target
            if color.get(t) == 1:
                return path[path.index(t):] + [t]
            if t not in color:
                color[t] = 1
                path.append(t)
                stack.append((t, iter(p.outgoing(t))))
    return None


def validate_presentation(p: FlowPresentation) -> ValidationReport:
    errors: List[str] = []
    states = set(p.states)
    if len(states) != len(p.states):
        errors.append("duplicate state declarations")
    seen = set()
    for g in p.generators:
        if g.id in seen:
            errors.append(f"duplicate generator id {g.id!r}")
        seen.add(g.id)
        for end in (g.source, g.target):
            if end not in states:
                errors.append(f"generator {g.id!r}: unknown state {end!r}")
        if g.dim < 0:
            errors.append(f"generator {g.id!r}: negative dimension")
    structurally_ok = set()
    for g in p.generators:
        bad = False
        if len(g.faces) != max(g.dim, 0):
            errors.append(f"generator {g.id!r}: {len(g.faces)} face pairs for dimension {g.dim}")
            continue
        for i, pair in enumerate(g.faces, 1):
            for e, w in enumerate(pair):
                tag = f"generator {g.id!r} face d_{i}^{e}"
                err = word_error(p, w)
                if err:
                    errors.append(f"{tag}: {err}")
                    bad = True
                    continue
                if p.word_source(w) != g.source or p.word_target(w) != g.target:
                    errors.append(f"{tag}: endpoint mismatch, word runs {p.word_source(w)!r} -> "
                                  f"{p.word_target(w)!r} but generator runs {g.source!r} -> {g.target!r}")
                    bad = True
                dim = p.word_dim(w)
                if dim != g.dim - 1:
                    errors.append(f"{tag}: dimension mismatch, word has dimension {dim}, expected {g.dim - 1}")
                    bad = True
        if not bad:
            structurally_ok.add(g.id)
    cycle = _find_cycle(p)
    if cycle:
        errors.append("cyclicity: state graph has the cycle " + " -> ".join(cycle))
    if errors:
        return ValidationReport(tuple(errors))
    for g in p.generators:
        if g.dim < 2:
            continue
        for i in range(1, g.dim + 1):
            for j in range(i + 1, g.dim + 1):
                for a in (0, 1):
                    for b in (0, 1):
                        lhs = p.face(g.face(j, b), i, a)
                        rhs = p.face(g.face(i, a), j - 1, b)
                        if lhs != rhs:
                            errors.append(f"generator {g.id!r}: face identity fails, d_{i}^{a} d_{j}^{b} = "
                                          f"{format_word(lhs)} but d_{j - 1}^{b} d_{i}^{a} = {format_word(rhs)}")
    return ValidationReport(tuple(errors))


def require_valid(p: FlowPresentation) -> FlowPresentation:
    report = validate_presentation(p)
    if not report.ok:
        raise InvalidPresentation(report)
    return p


def final_states(p: FlowPresentation) -> Tuple[str, ...]:
    return tuple(s for s in p.states if not p.outgoing(s))


def initial_states(p: FlowPresentation) -> Tuple[str, ...]:
    return tuple(s for s in p.states if not p.incoming(s))


def topological_order(p: FlowPresentation) -> List[str]:
    indeg = {s: len(p.incoming(s)) for s in p.states}
    ready = [s for s in p.states if indeg[s] == 0]
    order = []
    while ready:
        s = ready.pop()
        order.append(s)
        for g in p.outgoing(s):
            indeg[g.target] -= 1
            if indeg[g.target] == 0:
                ready.append(g.target)
    return order


def max_word_dim(p: FlowPresentation) -> int:
    """Largest total dimension of any word (finite because p is acyclic)."""
    best: Dict[str, int] = {}
    for s in reversed(topological_order(p)):
        best[s] = max((g.dim + best[g.target] for g in p.outgoing(s)), default=0)
    return max(best.values(), default=0)


def reachable(p: FlowPresentation, start: str, reverse: bool = False) -> set:
    """States reached from ``start`` by a nonempty word (or reaching it)."""
    seen = set()
    todo = [start]
    while todo:
        s = todo.pop()
        for g in (p.incoming(s) if reverse else p.outgoing(s)):
            nxt = g.source if reverse else g.target
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return seen


# ---------------------------------------------------------------------------
# execution-path complex

def enumerate_words(p: FlowPresentation, start: str, max_dim: int) -> List[Word]:
    """All words leaving ``start`` of total dimension at most ``max_dim``."""
    out = []
    stack: List[Tuple[Word, str, int]] = [((), start, 0)]
    while stack:
        w, end, dim = stack.pop()
        for g in reversed(p.outgoing(end)):
            nd = dim + g.dim
            if nd <= max_dim:
                nw = w + (g.id,)
                out.append(nw)
                stack.append((nw, g.target, nd))
    return out


@dataclass(frozen=True)
class PathComplex:
    """Words of a presentation as a precubical complex graded by endpoints."""

    complex: PrecubicalComplex
    grading: Mapping[Word, Tuple[str, str]]
    max_dim: int

    def words(self, dim: Optional[int] = None) -> List[Word]:
        return [c.id for c in self.complex if dim is None or c.dim == dim]

    def piece(self, source: str, target: str) -> List[Word]:
        return [w for w, st in self.grading.items() if st == (source, target)]


def word_cube(p: FlowPresentation, w: Word) -> Cube:
    d = p.word_dim(w)
    return Cube(w, d, tuple((p.face(w, i, 0), p.face(w, i, 1)) for i in range(1, d + 1)))


def compile_paths(p: FlowPresentation, max_dim: Optional[int] = None,
                  sources: Optional[Iterable[str]] = None) -> PathComplex:
    """Every word up to total dimension ``max_dim`` with its splice faces."""
    require_valid(p)
    if max_dim is None:
        max_dim = default_cap(p)
    if max_dim < p.max_generator_dim:
        raise CapError(f"cap {max_dim} is below the generator dimension {p.max_generator_dim}")
    words = []
    for s in (p.states if sources is None else sources):
        words.extend(enumerate_words(p, s, max_dim))
    words.sort(key=lambda w: (p.word_dim(w), len(w)))
    cubes = [word_cube(p, w) for w in words]
    grading = {w: (p.word_source(w), p.word_target(w)) for w in words}
    return PathComplex(PrecubicalComplex(cubes), grading, max_dim)


def default_cap(p: FlowPresentation) -> int:
    return max(max_word_dim(p), p.max_generator_dim, 0)


# ---------------------------------------------------------------------------
# opposite flow

def _toggle_op(name: str) -> str:
    return name[:-3] if name.endswith("^op") else name + "^op"


def opposite(p: FlowPresentation) -> FlowPresentation:
    """Reverse every generator; face words are reversed and axes renumbered
    right to left, which keeps the splice rule consistent on reversed words."""
    gens = []
    for g in p.generators:
        d = g.dim
        faces = tuple((tuple(reversed(g.face(d + 1 - i, 0))), tuple(reversed(g.face(d + 1 - i, 1))))
                      for i in range(1, d + 1))
        gens.append(Generator(g.id, d, g.target, g.source, faces))
    return FlowPresentation(_toggle_op(p.name), p.states, tuple(gens))


# ---------------------------------------------------------------------------
# morphisms

@dataclass(frozen=True)
class FlowMorphism:
    source: FlowPresentation
    target: FlowPresentation
    state_map: Mapping[str, str]
    generator_map: Mapping[str, Word]
    name: str = "f"

    def image(self, w: Sequence[str]) -> Word:
        out: Tuple[str, ...] = ()
        for c in w:
            out += tuple(self.generator_map[c])
        return out


class InvalidMorphism(ValueError):
    def __init__(self, report: ValidationReport):
        super().__init__(str(report))
        self.report = report


def identity_morphism(p: FlowPresentation) -> FlowMorphism:
    return FlowMorphism(p, p, {s: s for s in p.states}, {g.id: (g.id,) for g in p.generators}, "id")


def validate_morphism(f: FlowMorphism) -> ValidationReport:
    X, Y = f.source, f.target
    errors = []
    for s in X.states:
        if s not in f.state_map:
            errors.append(f"state {s!r} has no image")
        elif f.state_map[s] not in Y.states:
            errors.append(f"state {s!r} maps to unknown state {f.state_map[s]!r}")
    for s in f.state_map:
        if s not in X.states:
            errors.append(f"state map mentions unknown state {s!r}")
    for gid in f.generator_map:
        if gid not in X:
            errors.append(f"generator map mentions unknown generator {gid!r}")
    if errors:
        return ValidationReport(tuple(errors))
    for g in X.generators:
        if g.id not in f.generator_map:
            errors.append(f"generator {g.id!r} has no image")
            continue
        w = tuple(f.generator_map[g.id])
        err = word_error(Y, w)
        if err:
            errors.append(f"generator {g.id!r}: image {format_word(w)} is not a word ({err})")
            continue
        if Y.word_dim(w) != g.dim:
            errors.append(f"generator {g.id!r}: dimension mismatch, image has dimension "
                          f"{Y.word_dim(w)}, expected {g.dim}")
            continue
        src, tgt = f.state_map[g.source], f.state_map[g.target]
        if Y.word_source(w) != src or Y.word_target(w) != tgt:
            errors.append(f"generator {g.id!r}: endpoint mismatch, image runs {Y.word_source(w)!r} -> "
                          f"{Y.word_target(w)!r}, expected {src!r} -> {tgt!r}")
    if errors:
        return ValidationReport(tuple(errors))
    for g in X.generators:
        w = tuple(f.generator_map[g.id])
        for i in range(1, g.dim + 1):
            for e in (0, 1):
                lhs = f.image(g.face(i, e))
                rhs = Y.face(w, i, e)
                if lhs != rhs:
                    errors.append(f"generator {g.id!r}: face d_{i}^{e} maps to {format_word(lhs)} "
                                  f"but the image word has face {format_word(rhs)}")
    return ValidationReport(tuple(errors))


def require_valid_morphism(f: FlowMorphism) -> FlowMorphism:
    require_valid(f.source)
    require_valid(f.target)
    report = validate_morphism(f)
    if not report.ok:
        raise InvalidMorphism(report)
    return f
