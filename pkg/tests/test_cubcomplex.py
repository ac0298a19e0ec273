import itertools

import pytest

from flowhom.cubcomplex import (
    Cube,
    InvalidComplex,
    PrecubicalComplex,
    RelationError,
    chain_complex,
    relation_cokernel,
    validate_cubical,
)
from flowhom.intlinalg import AbelianGroup, DimensionMismatch, homology


def standard_cube(n):
    """All faces of [0,1]^n; a face is a string over {0, 1, *}."""
    cubes = []
    for word in itertools.product("01*", repeat=n):
        stars = [k for k, ch in enumerate(word) if ch == "*"]
        faces = []
        for k in stars:
            lo = list(word); lo[k] = "0"
            hi = list(word); hi[k] = "1"
            faces.append(("".join(lo), "".join(hi)))
        cubes.append(Cube("".join(word), len(stars), tuple(faces)))
    cubes.sort(key=lambda c: c.dim)
    return PrecubicalComplex(cubes)


def boundary_of_square():
    c = standard_cube(2)
    return PrecubicalComplex([x for x in c if x.dim < 2])


def test_standard_cubes_are_valid_and_contractible():
    for n in range(4):
        k = standard_cube(n)
        assert validate_cubical(k).ok
        cc = chain_complex(k)
        assert cc.check_dd() == []
        assert homology(cc, 0) == AbelianGroup(1)
        assert all(homology(cc, d).is_zero for d in range(1, n + 1))
        assert k.counts() == [2 ** (n - i) * _binom(n, i) for i in range(n + 1)]


def _binom(n, k):
    from math import comb
    return comb(n, k)


def test_hollow_square_is_a_circle():
    cc = chain_complex(boundary_of_square())
    assert homology(cc, 0) == AbelianGroup(1)
    assert homology(cc, 1) == AbelianGroup(1)


def test_boundary_sign_convention():
    cc = chain_complex(standard_cube(1))
    # the edge "*" has d_1^0 = "0", d_1^1 = "1": boundary 1 - 0
    (col,) = cc.boundary_columns(1)
    labels = cc.label(0)
    assert {labels[i]: x for i, x in col.items()} == {"0": -1, "1": 1}


def test_validation_reports_problems():
    bad_identity = PrecubicalComplex([
        Cube("a", 0), Cube("b", 0),
        Cube("e", 1, (("a", "b"),)), Cube("f", 1, (("a", "b"),)),
        # d_1^0 d_2^0 must equal d_1^0 d_1^0: e.d0 = a, f.d0 = a fine; break it with e/f swapped ends
        Cube("g", 1, (("b", "a"),)),
        Cube("s", 2, (("e", "f"), ("g", "f"))),
    ])
    report = validate_cubical(bad_identity)
    assert not report.ok
    assert any("d_1^" in e for e in report.errors)
    missing = PrecubicalComplex([Cube("e", 1, (("a", "b"),))])
    assert "missing" in str(validate_cubical(missing))
    wrong_count = PrecubicalComplex([Cube("a", 0), Cube("e", 1, ())])
    assert "face pairs" in str(validate_cubical(wrong_count))
    with pytest.raises(InvalidComplex):
        chain_complex(missing)
    with pytest.raises(ValueError):
        PrecubicalComplex([Cube("a", 0), Cube("a", 0)])


def test_disjoint_union_adds_homology():
    u = boundary_of_square().disjoint_union(standard_cube(2))
    cc = chain_complex(u)
    assert homology(cc, 0) == AbelianGroup(2)
    assert homology(cc, 1) == AbelianGroup(1)


def test_cokernel_by_unit_relations():
    # collapse the top edge of the hollow square to the bottom edge: still a circle
    k = boundary_of_square()
    cc = chain_complex(k)
    e = {lab: i for i, lab in enumerate(cc.label(1))}
    v = {lab: i for i, lab in enumerate(cc.label(0))}
    rels = {
        1: [{e["*0"]: 1, e["*1"]: -1}],
        0: [{v["00"]: 1, v["01"]: -1}, {v["10"]: 1, v["11"]: -1}],
    }
    q = relation_cokernel(cc, rels)
    assert not q.is_presented
    assert q.rank(1) == 3 and q.rank(0) == 2
    assert homology(q, 0) == AbelianGroup(1)
    assert homology(q, 1) == AbelianGroup(2)  # two vertical edges plus the merged edge


def test_cokernel_keeps_non_unit_relations():
    cc = chain_complex(standard_cube(0))
    q = relation_cokernel(cc, {0: [{0: 3}]})
    assert q.is_presented
    assert homology(q, 0) == AbelianGroup(0, (3,))


def test_cokernel_rejects_relations_not_closed_under_boundary():
    cc = chain_complex(standard_cube(1))
    with pytest.raises(RelationError) as info:
        relation_cokernel(cc, {1: [{0: 1}]})
    assert info.value.degree == 1
    with pytest.raises(DimensionMismatch):
        relation_cokernel(cc, {0: [[1, 0, 0]]})
    with pytest.raises(DimensionMismatch):
        relation_cokernel(cc, {0: [{5: 1}]})


def test_cokernel_killing_everything():
    cc = chain_complex(standard_cube(2))
    rels = {n: [{i: 1} for i in range(cc.rank(n))] for n in cc.degrees}
    q = relation_cokernel(cc, rels)
    assert all(q.rank(n) == 0 for n in q.degrees)
    assert all(homology(q, n).is_zero for n in q.degrees)
