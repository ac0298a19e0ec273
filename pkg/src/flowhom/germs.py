"""Branching and merging homology of flow presentations.

The branching space at a state alpha is the quotient of the paths leaving
alpha by x ~ x*y.  For a presentation by generator cells this quotient has a
finite chain model, the *germ complex*: its degree-n basis is the set of
dimension-n generators leaving alpha, and a face word reduces to its first
letter when every later letter is an edge, and to zero otherwise (a later
cell of positive dimension makes the collapsed cube degenerate).

``brute_force_branching`` recomputes the same quotient literally, from the
full word complex and every two-letter factorisation, and serves as an
independent check of the germ model.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .cubcomplex import Cube, PrecubicalComplex, chain_complex, relation_cokernel
from .flowcore import (
    CapError,
    FlowMorphism,
    FlowPresentation,
    Word,
    enumerate_words,
    format_word,
    initial_states,
    final_states,
    max_word_dim,
    opposite,
    reachable,
    require_valid,
    require_valid_morphism,
    word_cube,
    word_error,
)
from .intlinalg import (
    ZERO_GROUP,
    AbelianGroup,
    ChainComplex,
    ChainMap,
    ChainMapError,
    ExactnessReport,
    GroupElementSequence,
    Matrix,
    Subquotient,
    boundaries_list,
    cycles_basis,
    homology,
    mapping_cone,
    verify_exactness,
    zeros,
)

BRANCHING = "branching"
MERGING = "merging"


def state_key(s: str):
    """Natural sort key: digit runs compare numerically."""
    return [(0, int(t), "") if t.isdigit() else (1, 0, t) for t in re.findall(r"\d+|\D+", str(s))]


def sorted_states(states) -> List[str]:
    return sorted(states, key=state_key)


def _oriented(p: FlowPresentation, side: str) -> FlowPresentation:
    if side == BRANCHING:
        return p
    if side == MERGING:
        return opposite(p)
    raise ValueError(f"unknown side {side!r}")


def germ_reduce(p: FlowPresentation, w: Sequence[str], side: str = BRANCHING) -> Optional[str]:
    """Germ class of a word: a generator id, or None for zero."""
    err = word_error(p, w)
    if err:
        raise ValueError(f"not a word: {err}")
    if side == MERGING:
        w = tuple(reversed(w))
    elif side != BRANCHING:
        raise ValueError(f"unknown side {side!r}")
    if all(p[c].dim == 0 for c in w[1:]):
        return w[0]
    return None


@dataclass(frozen=True)
class GermComplex:
    state: str
    side: str
    complex: ChainComplex

    @property
    def empty(self) -> bool:
        return self.complex.rank(0) == 0

    def augmented(self) -> ChainComplex:
        """Augmented by one Z in degree -1; the empty complex stays empty."""
        c = self.complex
        if self.empty:
            return c
        ranks = dict(c.ranks)
        ranks[-1] = 1
        boundaries = dict(c.boundaries)
        boundaries[0] = tuple({0: 1} for _ in range(c.rank(0)))
        labels = dict(c.labels)
        labels[-1] = (self.state,)
        return ChainComplex(ranks, boundaries, labels)

    def reduced_homology(self, n: int) -> AbelianGroup:
        if self.empty:
            return ZERO_GROUP
        return homology(self.augmented(), n)

    def homology(self, n: int) -> AbelianGroup:
        return homology(self.complex, n)


def _germ_complex_oriented(p: FlowPresentation, state: str, side: str) -> GermComplex:
    gens = p.outgoing(state)
    top = max((g.dim for g in gens), default=-1)
    basis: Dict[int, List[str]] = {n: [] for n in range(top + 1)}
    for g in gens:
        basis[g.dim].append(g.id)
    index = {gid: k for n in basis for k, gid in enumerate(basis[n])}
    boundaries = {}
    for n in range(1, top + 1):
        cols = []
        for gid in basis[n]:
            g = p[gid]
            col: Dict[int, int] = {}
            for i in range(1, n + 1):
                s = -1 if i % 2 else 1
                for e, sign in ((0, s), (1, -s)):
                    r = germ_reduce(p, g.face(i, e))
                    if r is not None:
                        col[index[r]] = col.get(index[r], 0) + sign
            cols.append({k: v for k, v in col.items() if v})
        boundaries[n] = tuple(cols)
    ranks = {n: len(basis[n]) for n in basis}
    labels = {n: tuple(basis[n]) for n in basis}
    return GermComplex(state, side, ChainComplex(ranks, boundaries, labels))


def germ_complex(p: FlowPresentation, state: str, side: str = BRANCHING) -> GermComplex:
    if state not in p.states:
        raise KeyError(f"unknown state {state!r}")
    return _germ_complex_oriented(_oriented(p, side), state, side)


def branching_complex(p: FlowPresentation, state: str) -> GermComplex:
    return germ_complex(p, state, BRANCHING)


def merging_complex(p: FlowPresentation, state: str) -> GermComplex:
    return germ_complex(p, state, MERGING)


def germ_pi0(p: FlowPresentation, state: str, side: str = BRANCHING) -> int:
    """Number of connected components of the germ complex at ``state``."""
    return germ_complex(p, state, side).homology(0).betti


# ---------------------------------------------------------------------------
# total complexes and homology tables

@dataclass(frozen=True)
class TotalComplex:
    """Germ complexes of all states summed in natural state order."""

    complex: ChainComplex
    index: Mapping[Tuple[str, str], int]  # (state, generator) -> position in its degree
    states: Tuple[str, ...]


def total_complex(p: FlowPresentation, side: str = BRANCHING, augmented: bool = False) -> TotalComplex:
    q = _oriented(p, side)
    states = tuple(sorted_states(p.states))
    germs = [_germ_complex_oriented(q, s, side) for s in states]
    top = max((g.complex.top for g in germs), default=-1)
    ranks = {n: 0 for n in range(top + 1)}
    offsets: Dict[Tuple[str, int], int] = {}
    labels: Dict[int, list] = {n: [] for n in ranks}
    index = {}
    for g in germs:
        for n in ranks:
            offsets[(g.state, n)] = ranks[n]
            for k, gid in enumerate(g.complex.label(n)):
                index[(g.state, gid)] = ranks[n] + k
                labels[n].append((g.state, gid))
            ranks[n] += g.complex.rank(n)
    boundaries = {}
    for n in range(1, top + 1):
        cols = []
        for g in germs:
            off = offsets[(g.state, n - 1)]
            for col in g.complex.boundary_columns(n):
                cols.append({off + i: x for i, x in col.items()})
        boundaries[n] = tuple(cols)
    if augmented:
        ranks[-1] = len(states)
        pos = {s: k for k, s in enumerate(states)}
        boundaries[0] = tuple({pos[s]: 1} for s, _ in labels.get(0, []))
        labels[-1] = list(states)
    return TotalComplex(ChainComplex(ranks, boundaries, {n: tuple(v) for n, v in labels.items()}),
                        index, states)


@dataclass(frozen=True)
class BranchingHomology:
    """``groups[n]`` is H_n^- (or H_n^+); ``per_state[s][n]`` is the reduced
    homology in degree n of the germ complex at s, which feeds H_{n+1}."""

    side: str
    groups: Tuple[AbelianGroup, ...]
    per_state: Mapping[str, Tuple[AbelianGroup, ...]]
    components: Mapping[str, int]
    distinguished: Tuple[str, ...]  # final states (branching) or initial states (merging)

    def __getitem__(self, n: int) -> AbelianGroup:
        return self.groups[n] if 0 <= n < len(self.groups) else ZERO_GROUP

    def table(self) -> List[str]:
        return [str(g) for g in self.groups]


def homology_of_side(p: FlowPresentation, side: str, top: Optional[int] = None) -> BranchingHomology:
    require_valid(p)
    if top is None:
        top = max(p.max_generator_dim + 1, 0)
    tot = total_complex(p, side, augmented=True).complex
    groups = tuple(homology(tot, n - 1) for n in range(top + 1))
    q = _oriented(p, side)
    per_state = {}
    comps = {}
    for s in sorted_states(p.states):
        g = _germ_complex_oriented(q, s, side)
        per_state[s] = tuple(g.reduced_homology(n) for n in range(top))
        comps[s] = g.homology(0).betti
    dist = final_states(p) if side == BRANCHING else initial_states(p)
    return BranchingHomology(side, groups, per_state, comps, tuple(sorted_states(dist)))


def branching_homology(p: FlowPresentation, top: Optional[int] = None) -> BranchingHomology:
    return homology_of_side(p, BRANCHING, top)


def merging_homology(p: FlowPresentation, top: Optional[int] = None) -> BranchingHomology:
    return homology_of_side(p, MERGING, top)


# ---------------------------------------------------------------------------
# brute-force coequalizer

def brute_force_branching(p: FlowPresentation, state: str, max_dim: int) -> ChainComplex:
    """Chains of all words leaving ``state`` modulo the coequalizer relations.

    For every factorisation w = a.b the relation is [w] - [a] when b has
    dimension 0 and [w] alone otherwise.  Homology agrees with the germ
    complex in degrees below ``max_dim``.
    """
    require_valid(p)
    need = max((g.dim for g in p.outgoing(state)), default=0)
    if max_dim < need:
        raise CapError(f"cap {max_dim} is below the dimension {need} of a generator at {state!r}")
    words = enumerate_words(p, state, max_dim)
    words.sort(key=lambda w: (p.word_dim(w), len(w), w))
    cubes = PrecubicalComplex(word_cube(p, w) for w in words)
    chains = chain_complex(cubes, check=False)
    pos = {w: k for n in chains.ranks for k, w in enumerate(chains.label(n))}
    relations: Dict[int, List[Dict[int, int]]] = {n: [] for n in chains.ranks}
    for w in words:
        dw = p.word_dim(w)
        for k in range(1, len(w)):
            a, b = w[:k], w[k:]
            if p.word_dim(b) == 0:
                relations[dw].append({pos[w]: 1, pos[a]: -1})
            else:
                relations[dw].append({pos[w]: 1})
    return relation_cokernel(chains, relations)


def brute_force_merging(p: FlowPresentation, state: str, max_dim: int) -> ChainComplex:
    return brute_force_branching(opposite(p), state, max_dim)


# ---------------------------------------------------------------------------
# morphisms: induced chain maps, T-homotopy, long exact sequence

def opposite_morphism(f: FlowMorphism) -> FlowMorphism:
    return FlowMorphism(opposite(f.source), opposite(f.target), dict(f.state_map),
                        {g: tuple(reversed(w)) for g, w in f.generator_map.items()}, f.name + "^op")


def induced_chain_map(f: FlowMorphism, side: str = BRANCHING) -> ChainMap:
    """Map of total germ complexes: g at s goes to the germ of f(g) at f(s)."""
    require_valid_morphism(f)
    if side == MERGING:
        return _induced(opposite_morphism(f), MERGING)
    return _induced(f, BRANCHING)


def _induced(f: FlowMorphism, side: str) -> ChainMap:
    X, Y = f.source, f.target
    tx = total_complex(X)
    ty = total_complex(Y)
    cx, cy = tx.complex, ty.complex
    maps: Dict[int, Matrix] = {}
    for n in sorted(set(cx.ranks) | set(cy.ranks)):
        m = zeros(cy.rank(n), cx.rank(n))
        for state, gid in cx.label(n):
            r = germ_reduce(Y, f.generator_map[gid])
            if r is not None:
                m[ty.index[(f.state_map[state], r)]][tx.index[(state, gid)]] += 1
        maps[n] = m
    cm = ChainMap(cx, cy, maps)
    bad = cm.first_failure()
    if bad is not None:
        raise ChainMapError(bad)
    return cm


@dataclass(frozen=True)
class ConditionVerdict:
    number: int
    name: str
    passed: bool
    witnesses: Tuple[str, ...] = ()


@dataclass(frozen=True)
class TReport:
    conditions: Tuple[ConditionVerdict, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)


def _words_between(p: FlowPresentation, sources, targets) -> Dict[Word, Tuple[str, str]]:
    cap = max_word_dim(p)
    targets = set(targets)
    out = {}
    for s in sources:
        for w in enumerate_words(p, s, cap):
            t = p.word_target(w)
            if t in targets:
                out[w] = (s, t)
    return out


def check_t_homotopy(f: FlowMorphism) -> TReport:
    require_valid_morphism(f)
    X, Y = f.source, f.target
    image = [f.state_map[s] for s in X.states]
    image_set = set(image)
    new_states = [s for s in Y.states if s not in image_set]

    # (1) f is an isomorphism onto the restriction of Y to f(X^0)
    w1 = []
    if len(image_set) != len(image):
        seen: Dict[str, str] = {}
        for s in X.states:
            t = f.state_map[s]
            if t in seen:
                w1.append(f"states {seen[t]!r} and {s!r} both map to {t!r}")
            seen[t] = s
    else:
        xw = _words_between(X, X.states, X.states)
        yw = _words_between(Y, image_set, image_set)
        hit: Dict[Word, Word] = {}
        for w in xw:
            img = f.image(w)
            if img in hit:
                w1.append(f"words {format_word(hit[img])} and {format_word(w)} have the same image")
            hit[img] = w
        for w in yw:
            if w not in hit:
                w1.append(f"path {format_word(w)} of Y between image states is not an image")
    c1 = ConditionVerdict(1, "isomorphism onto the restriction", not w1, tuple(w1))

    # (2) branching and merging germs at new states are single points
    w2 = []
    for s in new_states:
        for side, gens in ((BRANCHING, Y.outgoing(s)), (MERGING, Y.incoming(s))):
            dims = [g.dim for g in gens]
            if dims != [0]:
                w2.append(f"{side} germ at {s!r} is not a singleton "
                          f"({dims.count(0)} edge(s), {len(dims) - dims.count(0)} higher cell(s))")
    c2 = ConditionVerdict(2, "singleton germs at new states", not w2, tuple(w2))

    # (3) every new state sits on a path from and back to image states
    w3 = []
    for s in new_states:
        if not (reachable(Y, s, reverse=True) & image_set):
            w3.append(f"state {s!r} is not reached from an image state")
        if not (reachable(Y, s) & image_set):
            w3.append(f"state {s!r} has no path returning to an image state")
    c3 = ConditionVerdict(3, "new states surrounded by image states", not w3, tuple(w3))
    return TReport((c1, c2, c3))


@dataclass(frozen=True)
class LesReport:
    """Long exact sequence of H_n of the total germ complexes of X, Y and of
    the mapping cone of the induced map, top degree first."""

    degrees: Tuple[int, ...]
    groups: Mapping[str, Mapping[int, AbelianGroup]]
    sequence: GroupElementSequence
    exactness: ExactnessReport
    translated: Mapping[str, Mapping[int, AbelianGroup]]
    chain_map: ChainMap
    cone: ChainComplex

    @property
    def exact(self) -> bool:
        return self.exactness.exact


def _subquotient(c: ChainComplex, n: int, label: str) -> Subquotient:
    if c.rank(n) == 0:
        return Subquotient.zero(label)
    return Subquotient.make(c.rank(n), cycles_basis(c, n), boundaries_list(c, n), label)


def les_report(f: FlowMorphism, top: Optional[int] = None, side: str = BRANCHING) -> LesReport:
    chain = induced_chain_map(f, side)
    cx, cy = chain.source, chain.target
    cone = mapping_cone(chain)
    full_top = max(cone.top, cx.top, cy.top, 0)
    shown = full_top if top is None else min(top, full_top)
    groups_seq = [Subquotient.zero("0")]
    maps: List[Matrix] = []
    for n in range(full_top, -1, -1):
        gx = _subquotient(cx, n, f"H{n}(X)")
        gy = _subquotient(cy, n, f"H{n}(Y)")
        gc = _subquotient(cone, n, f"H{n}(C)")
        prev = groups_seq[-1]
        # incoming map into H_n(X): 0 at the top, else the connecting map
        if n == full_top:
            maps.append(zeros(gx.dim, prev.dim))
        else:
            maps.append(_projection(cx.rank(n), cone.rank(n + 1)))
        maps.append(chain.matrix(n) if gx.dim and gy.dim else zeros(gy.dim, gx.dim))
        maps.append(_inclusion(cx.rank(n - 1), cy.rank(n)))
        groups_seq.extend([gx, gy, gc])
    maps.append(zeros(0, groups_seq[-1].dim))
    groups_seq.append(Subquotient.zero("0"))
    seq = GroupElementSequence(tuple(groups_seq), tuple(maps))
    report = verify_exactness(seq)
    degrees = tuple(range(shown + 1))
    groups = {
        "X": {n: homology(cx, n) for n in degrees},
        "Y": {n: homology(cy, n) for n in degrees},
        "cone": {n: homology(cone, n) for n in degrees},
    }
    translated = {k: {n + 1: v[n] for n in degrees if n >= 1} for k, v in groups.items()}
    return LesReport(degrees, groups, seq, report, translated, chain, cone)


def _projection(rank_x: int, rank_cone: int) -> Matrix:
    """(x, y) -> x from Cone_{n+1} = X_n + Y_{n+1} onto X_n."""
    m = zeros(rank_x, rank_cone)
    for i in range(rank_x):
        m[i][i] = 1
    return m


def _inclusion(rank_x_prev: int, rank_y: int) -> Matrix:
    """y -> (0, y) from Y_n into Cone_n = X_{n-1} + Y_n."""
    m = zeros(rank_x_prev + rank_y, rank_y)
    for i in range(rank_y):
        m[rank_x_prev + i][i] = 1
    return m
