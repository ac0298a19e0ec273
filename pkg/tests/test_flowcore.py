import random

import pytest

from flowhom.cubcomplex import validate_cubical
from flowhom.cubcomplex import chain_complex
from flowhom.flowcore import (
    CapError,
    FlowMorphism,
    FlowPresentation,
    Generator,
    InvalidPresentation,
    compile_paths,
    default_cap,
    enumerate_words,
    final_states,
    identity_morphism,
    initial_states,
    opposite,
    require_valid,
    validate_morphism,
    validate_presentation,
)
from flowhom.generate import random_presentation
from flowhom.ingest import builtin, parse_flow, serialize_flow

DIRSEG = builtin("dirseg")
SEG2 = builtin("seg2")
BRANCH1 = builtin("branch1")
SWISS = builtin("swiss")


def square_flow():
    return parse_flow("""
        flow sq
        edge a : 0 -> 1
        edge b : 1 -> 3
        edge c : 0 -> 2
        edge d : 2 -> 3
        square q : a.b => c.d
        edge e : 3 -> 4
    """)


def disk_flow(filled=True):
    """Four parallel edges joined by four squares into a circle of paths,
    optionally filled by a 2-cell."""
    text = """
        flow disk
        edge a : 0 -> 1
        edge b : 0 -> 1
        edge c : 0 -> 1
        edge d : 0 -> 1
        square r : a => b
        square p : a => c
        square s : c => d
        square q : b => d
    """
    if filled:
        text += "cube k dim 2 : 1 0 => r ; 1 1 => s ; 2 0 => p ; 2 1 => q\n"
    return parse_flow(text)


def test_builtins_validate():
    for p in (DIRSEG, SEG2, BRANCH1, SWISS, builtin("branch2"), square_flow(), disk_flow()):
        assert validate_presentation(p).ok, validate_presentation(p)


def test_loop_is_a_cycle():
    p = FlowPresentation("loop", ("0",), (Generator("u", 0, "0", "0"),))
    report = validate_presentation(p)
    assert any("cyclicity" in e for e in report.errors)
    longer = FlowPresentation("c", ("a", "b"), (Generator("u", 0, "a", "b"), Generator("v", 0, "b", "a")))
    assert any("cyclicity" in e for e in validate_presentation(longer).errors)


def test_square_with_mismatched_endpoints():
    p = FlowPresentation("bad", ("0", "1", "2"), (
        Generator("a", 0, "0", "1"), Generator("b", 0, "0", "2"),
        Generator("q", 1, "0", "1", ((("a",), ("b",)),)),
    ))
    errors = validate_presentation(p).errors
    assert any("endpoint mismatch" in e for e in errors)
    with pytest.raises(InvalidPresentation):
        require_valid(p)


def test_other_violations():
    p = FlowPresentation("bad", ("0", "1"), (
        Generator("a", 0, "0", "1"),
        Generator("a", 0, "0", "1"),
        Generator("q", 1, "0", "1", ((("a",), ("zz",)),)),
        Generator("r", 1, "0", "1", ()),
        Generator("s", 0, "0", "9"),
    ))
    text = str(validate_presentation(p))
    assert "duplicate generator" in text
    assert "unknown generator 'zz'" in text
    assert "face pairs" in text
    assert "unknown state '9'" in text
    dim = FlowPresentation("d", ("0", "1"), (
        Generator("a", 0, "0", "1"),
        Generator("q", 1, "0", "1", ((("a",), ("a",)),)),
        Generator("k", 2, "0", "1", ((("a",), ("a",)), (("q",), ("q",)))),
    ))
    assert "dimension mismatch" in str(validate_presentation(dim))


def test_face_identities_checked():
    good = disk_flow()
    gens = [g if g.id != "k" else Generator("k", 2, g.source, g.target,
                                            (g.faces[0], (("q",), ("p",))))
            for g in good.generators]
    broken = FlowPresentation("broken", good.states, tuple(gens))
    assert any("face identity" in e for e in validate_presentation(broken).errors)


def test_splice_faces():
    p = square_flow()
    assert p.face(("q", "e"), 1, 0) == ("a", "b", "e")
    assert p.face(("q", "e"), 1, 1) == ("c", "d", "e")
    with pytest.raises(IndexError):
        p.face(("q", "e"), 2, 0)
    c = disk_flow()
    assert c.face(("k",), 2, 1) == ("q",)
    assert c.face(c.face(("k",), 2, 1), 1, 0) == ("b",)


def test_compile_paths_examples():
    assert compile_paths(DIRSEG).words() == [("u",)]
    assert sorted(compile_paths(SEG2).words()) == [("v",), ("v", "w"), ("w",)]
    words = compile_paths(BRANCH1).words(0)
    assert len(words) == 4 and ("[0,1]", "[1,2]") in words


def test_compiled_complexes_are_precubical_with_dd_zero():
    rng = random.Random(3)
    flows = [DIRSEG, SEG2, BRANCH1, SWISS, builtin("branch2"), square_flow(), disk_flow()]
    flows += [random_presentation(rng, max_states=7, max_generators=14, cube_rate=0.5) for _ in range(60)]
    for p in flows:
        pc = compile_paths(p)
        assert validate_cubical(pc.complex).ok
        assert chain_complex(pc.complex).check_dd() == []
        for c in pc.complex:
            for pair in c.faces:
                for f in pair:
                    assert pc.grading[f] == pc.grading[c.id]


def _count_edge_paths(p):
    """Directed paths of edges, counted by dynamic programming."""
    from functools import lru_cache

    @lru_cache(None)
    def from_state(s):
        return sum(1 + from_state(g.target) for g in p.outgoing(s) if g.dim == 0)

    return sum(from_state(s) for s in p.states)


def test_degree_zero_word_count_matches_path_count():
    rng = random.Random(4)
    for p in [SWISS, BRANCH1] + [random_presentation(rng) for _ in range(50)]:
        assert len(compile_paths(p).words(0)) == _count_edge_paths(p)


def test_cap_errors_and_default():
    c = disk_flow()
    assert default_cap(c) == 2
    with pytest.raises(CapError):
        compile_paths(c, max_dim=1)
    assert compile_paths(c, max_dim=5).complex.counts() == [4, 4, 1]


def test_opposite():
    op = opposite(DIRSEG)
    assert op["u"].source == "1" and op["u"].target == "0"
    assert opposite(opposite(SWISS)) == SWISS
    assert set(initial_states(opposite(BRANCH1))) == {"2", "3"}
    assert opposite(square_flow())["q"].faces == ((("b", "a"), ("d", "c")),)
    assert validate_presentation(opposite(disk_flow())).ok
    rng = random.Random(5)
    for _ in range(100):
        p = random_presentation(rng, cube_rate=0.5)
        q = opposite(p)
        assert validate_presentation(q).ok
        assert opposite(q) == p
        assert set(final_states(q)) == set(initial_states(p))


def test_final_and_initial_states():
    assert final_states(DIRSEG) == ("1",) and initial_states(DIRSEG) == ("0",)
    assert set(final_states(BRANCH1)) == {"2", "3"}
    # removing the four central edges turns (2,2) into a deadlock and (3,3)
    # into an unreachable state
    assert set(final_states(SWISS)) == {"(2,2)", "(5,5)"}
    assert set(initial_states(SWISS)) == {"(0,0)", "(3,3)"}


def test_morphism_validation():
    phi = builtin("phi")
    assert validate_morphism(phi).ok
    assert validate_morphism(identity_morphism(SWISS)).ok
    wrong_target = FlowMorphism(DIRSEG, SEG2, {"0": "0", "1": "1"}, {"u": ("v",)})
    assert "endpoint mismatch" in str(validate_morphism(wrong_target))
    missing = FlowMorphism(DIRSEG, SEG2, {"0": "0"}, {"u": ("v", "w")})
    assert "no image" in str(validate_morphism(missing))
    broken = FlowMorphism(DIRSEG, SEG2, {"0": "0", "1": "1"}, {"u": ("w", "v")})
    assert "not a word" in str(validate_morphism(broken))


def test_morphism_face_compatibility():
    sq = parse_flow(serialize_flow(square_flow()) + "square back : c.d => a.b\n")
    ids = {g.id: (g.id,) for g in sq.generators}
    flipped = FlowMorphism(sq, sq, {s: s for s in sq.states}, {**ids, "q": ("back",)})
    assert "face d_1^0 maps to a.b but the image word has face c.d" in str(validate_morphism(flipped))
    wrong_dim = FlowMorphism(sq, sq, {s: s for s in sq.states},
                             {"a": ("a",), "b": ("b",), "c": ("c",), "d": ("d",), "q": ("a", "b"), "e": ("e",)})
    assert "dimension mismatch" in str(validate_morphism(wrong_dim))
    for w in enumerate_words(sq, "0", 1):
        assert sq.word_source(w) == "0"
