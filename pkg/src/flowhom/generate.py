"""Random presentations and morphisms for property tests and regressions."""
from __future__ import annotations

import random
from typing import Dict, List, Optional, Sequence, Tuple

from .flowcore import (FlowMorphism, FlowPresentation, Generator, Word, require_valid, require_valid_morphism,
                       topological_order)


def _edge_paths(gens: Sequence[Generator], states: Sequence[str], max_len: int = 2) -> Dict[Tuple[str, str], List[Word]]:
    out_edges: Dict[str, List[Generator]] = {s: [] for s in states}
    for g in gens:
        if g.dim == 0:
            out_edges[g.source].append(g)
    paths: Dict[Tuple[str, str], List[Word]] = {}
    frontier = [((e.id,), e.source, e.target) for s in states for e in out_edges[s]]
    for _ in range(max_len):
        nxt = []
        for w, s, t in frontier:
            paths.setdefault((s, t), []).append(w)
            nxt.extend((w + (e.id,), s, e.target) for e in out_edges[t])
        frontier = nxt
    return paths


def random_presentation(rng: random.Random, max_states: int = 6, max_generators: int = 10,
                        square_rate: float = 0.5, cube_rate: float = 0.3,
                        name: str = "rand") -> FlowPresentation:
    """Acyclic presentation: edges go up a random linear order of the states;
    squares join pairs of edge paths of length <= 2; occasionally a 2-cube
    is glued along four squares."""
    n = rng.randint(1, max_states)
    states = [f"s{i}" for i in range(n)]
    gens: List[Generator] = []
    budget = rng.randint(0, max_generators)
    n_edges = min(budget, rng.randint(0, max(0, 2 * n)))
    for k in range(n_edges if n > 1 else 0):
        i = rng.randrange(n - 1)
        j = rng.randrange(i + 1, n)
        gens.append(Generator(f"e{k}", 0, states[i], states[j]))
    paths = _edge_paths(gens, states)
    pairs = [key for key, ws in paths.items() if len(ws) >= 2]
    sq = 0
    squares: List[Generator] = []
    while len(gens) < budget and pairs and rng.random() < square_rate:
        s, t = rng.choice(pairs)
        w0, w1 = rng.sample(paths[(s, t)], 2)
        g = Generator(f"q{sq}", 1, s, t, ((w0, w1),))
        gens.append(g)
        squares.append(g)
        sq += 1
    if len(gens) + 5 <= budget and pairs and rng.random() < cube_rate:
        s, t = rng.choice(pairs)
        x0, x1, y, z = (rng.choice(paths[(s, t)]) for _ in range(4))
        r = Generator(f"q{sq}", 1, s, t, ((x0, x1),))
        pp = Generator(f"q{sq + 1}", 1, s, t, ((x0, y),))
        ss = Generator(f"q{sq + 2}", 1, s, t, ((y, z),))
        qq = Generator(f"q{sq + 3}", 1, s, t, ((x1, z),))
        cube = Generator("k0", 2, s, t, (((r.id,), (ss.id,)), ((pp.id,), (qq.id,))))
        gens.extend([r, pp, ss, qq, cube])
    return require_valid(FlowPresentation(name, tuple(states), tuple(gens)))


def _rewrite(p: FlowPresentation, edge_map: Dict[str, Word], name: str,
             extra_states: Sequence[str] = (), new_edges: Sequence[Generator] = (),
             drop: Sequence[str] = ()) -> FlowPresentation:
    """Replace edges by words in every face word, keeping cell ids."""
    def sub(w: Word) -> Word:
        out: Tuple[str, ...] = ()
        for letter in w:
            out += edge_map.get(letter, (letter,))
        return out

    gens: List[Generator] = []
    for g in p.generators:
        if g.id in drop:
            continue
        if g.dim == 0:
            if g.id in edge_map and edge_map[g.id] != (g.id,):
                continue
            gens.append(g)
        elif g.dim == 1:
            gens.append(Generator(g.id, 1, g.source, g.target, tuple((sub(a), sub(b)) for a, b in g.faces)))
        else:
            gens.append(g)
    gens = list(new_edges) + gens
    gens.sort(key=lambda g: g.dim)
    return FlowPresentation(name, tuple(p.states) + tuple(extra_states), tuple(gens))


def subdivide_edge(p: FlowPresentation, edge: str, name: Optional[str] = None) -> FlowMorphism:
    """Insert a state in the middle of ``edge``; a T-homotopy equivalence."""
    g = p[edge]
    if g.dim != 0:
        raise ValueError(f"{edge!r} is not an edge")
    mid = f"{edge}_mid"
    k = 0
    while mid in p.states:
        k += 1
        mid = f"{edge}_mid{k}"
    a = Generator(f"{edge}_a", 0, g.source, mid)
    b = Generator(f"{edge}_b", 0, mid, g.target)
    y = _rewrite(p, {edge: (a.id, b.id)}, name or f"{p.name}/{edge}", (mid,), (a, b))
    gmap = {h.id: (h.id,) for h in p.generators}
    gmap[edge] = (a.id, b.id)
    return require_valid_morphism(FlowMorphism(p, y, {s: s for s in p.states}, gmap, "subdiv"))


def fold_edges(p: FlowPresentation, keep: str, drop: str) -> FlowMorphism:
    """Identify two parallel edges."""
    e, d = p[keep], p[drop]
    if (e.dim, d.dim) != (0, 0) or (e.source, e.target) != (d.source, d.target) or keep == drop:
        raise ValueError("fold needs two distinct parallel edges")
    y = _rewrite(p, {drop: (keep,)}, f"{p.name}/{drop}={keep}", drop=(drop,))
    gmap = {h.id: (h.id,) for h in p.generators}
    gmap[drop] = (keep,)
    return require_valid_morphism(FlowMorphism(p, y, {s: s for s in p.states}, gmap, "fold"))


def extend(p: FlowPresentation, rng: random.Random, extra: int = 3) -> FlowMorphism:
    """Inclusion of ``p`` into ``p`` plus a few random edges and squares."""
    new_states = [f"n{k}" for k in range(rng.randint(0, 2)) if f"n{k}" not in p.states]
    order = list(p.states) + new_states
    gens = list(p.generators)
    allst = topological_order(p)
    for s in new_states:
        allst.insert(rng.randint(0, len(allst)), s)
    k = 0
    for _ in range(extra):
        if len(allst) < 2:
            break
        i = rng.randrange(len(allst) - 1)
        j = rng.randrange(i + 1, len(allst))
        eid = f"x{k}"
        while eid in p:
            k += 1
            eid = f"x{k}"
        gens.append(Generator(eid, 0, allst[i], allst[j]))
        k += 1
    paths = _edge_paths(gens, order)
    pairs = [key for key, ws in paths.items() if len(ws) >= 2]
    if pairs and rng.random() < 0.5:
        s, t = rng.choice(pairs)
        w0, w1 = rng.sample(paths[(s, t)], 2)
        qid = f"xq{k}"
        while qid in p:
            k += 1
            qid = f"xq{k}"
        gens.append(Generator(qid, 1, s, t, ((w0, w1),)))
    gens.sort(key=lambda g: g.dim)
    y = FlowPresentation(p.name + "+", tuple(order), tuple(gens))
    return require_valid_morphism(
        FlowMorphism(p, y, {s: s for s in p.states}, {g.id: (g.id,) for g in p.generators}, "incl"))


def compose(f: FlowMorphism, g: FlowMorphism) -> FlowMorphism:
    """g after f."""
    return require_valid_morphism(FlowMorphism(
        f.source, g.target, {s: g.state_map[f.state_map[s]] for s in f.source.states},
        {h: g.image(w) for h, w in f.generator_map.items()}, f"{g.name}.{f.name}"))


def random_morphism(rng: random.Random, max_states: int = 8, max_generators: int = 12,
                    attempts: int = 200) -> FlowMorphism:
    """A composite of subdivisions, folds and inclusions between small
    random presentations, both ends within the size bounds."""
    for _ in range(attempts):
        x = random_presentation(rng, max_states=max(1, max_states - 3), max_generators=max_generators - 2,
                                square_rate=0.8, cube_rate=0.5)
        if not x.generators:
            continue
        f = FlowMorphism(x, x, {s: s for s in x.states}, {g.id: (g.id,) for g in x.generators}, "id")
        for _ in range(rng.randint(1, 3)):
            y = f.target
            op = rng.random()
            edges = [g for g in y.generators if g.dim == 0]
            if op < 0.35 and edges:
                step = subdivide_edge(y, rng.choice(edges).id)
            elif op < 0.6:
                parallel = [(a.id, b.id) for a in edges for b in edges
                            if a.id < b.id and (a.source, a.target) == (b.source, b.target)]
                if not parallel:
                    continue
                step = fold_edges(y, *rng.choice(parallel))
            else:
                step = extend(y, rng, extra=rng.randint(1, 3))
            f = compose(f, step)
        y = f.target
        if len(y.states) <= max_states and len(y.generators) <= max_generators:
            return f
    raise RuntimeError("could not draw a morphism within the size bounds")
