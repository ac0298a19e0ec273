import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Matrix as SMatrix
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from flowhom.intlinalg import (
    AbelianGroup,
    ChainComplex,
    ChainMap,
    ChainMapError,
    DimensionMismatch,
    GroupElementSequence,
    Span,
    StructureError,
    Subquotient,
    determinant,
    homology,
    homology_table,
    identity_map,
    kernel_basis,
    mapping_cone,
    matmul,
    matvec,
    rank,
    smith_diagonal,
    smith_normal_form,
    solve,
    subquotient_group,
    verify_exactness,
    zeros,
)


def random_matrix(rng, rows, cols, lo=-6, hi=6, density=0.7):
    return [[rng.randint(lo, hi) if rng.random() < density else 0 for _ in range(cols)] for _ in range(rows)]


def check_snf_contract(m, rows, cols):
    u, d, v = smith_normal_form(m, cols)
    assert matmul(matmul(u, m, rows, cols), v, cols, cols) == d
    assert abs(determinant(u)) == 1
    assert abs(determinant(v)) == 1
    diag = [d[i][i] for i in range(min(rows, cols))]
    for i in range(rows):
        for j in range(cols):
            if i != j:
                assert d[i][j] == 0
    nonzero = [x for x in diag if x]
    assert all(x > 0 for x in nonzero)
    assert diag[:len(nonzero)] == nonzero  # zeros trail
    for a, b in zip(nonzero, nonzero[1:]):
        assert b % a == 0
    return diag


matrices = st.integers(1, 6).flatmap(
    lambda r: st.integers(1, 6).flatmap(
        lambda c: st.lists(st.lists(st.integers(-20, 20), min_size=c, max_size=c), min_size=r, max_size=r)))


@settings(max_examples=200, deadline=None)
@given(matrices)
def test_snf_contract_and_sympy_agree(m):
    rows, cols = len(m), len(m[0])
    diag = check_snf_contract(m, rows, cols)
    ref = sympy_snf(SMatrix(m))
    assert [abs(ref[i, i]) for i in range(min(rows, cols))] == [abs(x) for x in diag]


def test_snf_known_diagonal():
    m = [[2, 4, 4], [-6, 6, 12], [10, -4, -16]]
    assert smith_diagonal(m) == [2, 6, 12]


def test_snf_handles_big_entries():
    m = [[10 ** 30, 3], [7, 10 ** 25]]
    check_snf_contract(m, 2, 2)


def test_snf_empty_shapes():
    u, d, v = smith_normal_form([], 3)
    assert u == [] and d == [] and len(v) == 3
    assert rank([[0, 0]]) == 0


def test_kernel_basis_is_saturated():
    m = [[2, 4, 6]]
    ker = kernel_basis(m, 3)
    assert len(ker) == 2
    for k in ker:
        assert matvec(m, k) == [0]
    # (1, 1, -1) is in the kernel and must be an integer combination
    assert Span(ker, 3).__contains__([1, 1, -1])


def test_solve():
    m = [[2, 0], [0, 3]]
    assert solve(m, [4, 9], 2) == [2, 3]
    assert solve(m, [1, 0], 2) is None
    with pytest.raises(DimensionMismatch):
        solve(m, [1], 2)


def test_abelian_group_rendering_and_normalization():
    assert str(AbelianGroup()) == "0"
    assert str(AbelianGroup(1)) == "Z"
    assert str(AbelianGroup.from_diagonal(2, [2, 3])) == "Z^2 + Z/6"
    assert AbelianGroup.from_diagonal(0, [4, 6]) == AbelianGroup(0, (2, 12))
    assert AbelianGroup(1, (2,)) + AbelianGroup(0, (3,)) == AbelianGroup(1, (6,))
    assert AbelianGroup(0, (2, 6)).order == 12
    assert AbelianGroup(1).order is None
    with pytest.raises(ValueError):
        AbelianGroup(0, (2, 3))
    with pytest.raises(ValueError):
        AbelianGroup(0, (1,))


def test_subquotient_group():
    assert subquotient_group([[1, 0], [0, 1]], [[2, 0]], 2) == AbelianGroup(1, (2,))
    assert subquotient_group([[2, 0]], [[4, 0]], 2) == AbelianGroup(0, (2,))
    with pytest.raises(StructureError):
        subquotient_group([[2, 0]], [[1, 0]], 2)


def circle():
    # two vertices, two edges both from v0 to v1
    return ChainComplex({0: 2, 1: 2}, {1: ({0: -1, 1: 1}, {0: -1, 1: 1})})


def projective_plane():
    # one vertex, one loop a, one disk glued along a*a
    return ChainComplex({0: 1, 1: 1, 2: 1}, {1: ({},), 2: ({0: 2},)})


def test_homology_of_small_complexes():
    assert [homology(circle(), n) for n in range(2)] == [AbelianGroup(1), AbelianGroup(1)]
    assert homology_table(projective_plane()) == {0: AbelianGroup(1), 1: AbelianGroup(0, (2,)), 2: AbelianGroup()}
    assert homology(circle(), 7) == AbelianGroup()


def test_presented_complex_homology():
    # Z^2 / <(2, 0)> with zero boundaries: Z + Z/2 in degree 0
    c = ChainComplex({0: 2}, {}, {}, {0: ({0: 2},)})
    assert homology(c, 0) == AbelianGroup(1, (2,))


def test_dd_checked():
    assert ChainComplex({0: 1, 1: 1, 2: 1}, {1: ({0: 1},), 2: ({0: 1},)}).check_dd() == [2]
    assert circle().check_dd() == []


def test_mapping_cone_of_identity_is_acyclic():
    for c in (circle(), projective_plane()):
        cone = mapping_cone(identity_map(c))
        assert cone.check_dd() == []
        assert all(homology(cone, n).is_zero for n in cone.degrees)


def test_mapping_cone_rejects_non_chain_maps():
    c = circle()
    swap = ChainMap(c, c, {0: [[1, 0], [0, 1]], 1: [[0, 1], [1, 0]]})
    assert swap.first_failure() is None
    assert ChainMap(c, c, {0: [[1, 0], [0, 1]], 1: [[1, 0], [0, 0]]}).first_failure() == 1
    worse = ChainMap(c, c, {0: [[0, 0], [0, 1]], 1: [[1, 0], [0, 1]]})
    assert worse.first_failure() == 1
    with pytest.raises(ChainMapError):
        mapping_cone(worse)


def test_exactness_short_exact_sequence():
    # 0 -> Z --2--> Z -> Z/2 -> 0
    z2 = Subquotient.make(1, [[1]], [[2]], "Z/2")
    seq = GroupElementSequence(
        (Subquotient.zero(), Subquotient.make(1, [[1]]), Subquotient.make(1, [[1]]), z2, Subquotient.zero()),
        ([[]], [[2]], [[1]], []))
    report = verify_exactness(seq)
    assert report.exact, report.failures


def test_exactness_detects_failures():
    # 0 -> Z --2--> Z -> 0 fails at the middle Z (cokernel Z/2)
    seq = GroupElementSequence(
        (Subquotient.zero(), Subquotient.make(1, [[1]]), Subquotient.make(1, [[1]]), Subquotient.zero()),
        ([[]], [[2]], []))
    report = verify_exactness(seq)
    assert not report.exact
    assert report.failures[0].index == 2
    assert report.failures[0].reason == "kernel not contained in image"
    # Z --1--> Z --1--> Z: image not in kernel
    seq = GroupElementSequence((Subquotient.make(1, [[1]]),) * 3, ([[1]], [[1]]))
    assert verify_exactness(seq).failures[0].reason == "image not contained in kernel"


def test_exactness_rejects_ill_formed_maps():
    z2 = Subquotient.make(1, [[1]], [[2]])
    z = Subquotient.make(1, [[1]])
    # Z/2 -> Z by 1 is not well defined
    with pytest.raises(StructureError):
        verify_exactness(GroupElementSequence((z2, z, Subquotient.zero()), ([[1]], [])))


def _les_of(f):
    """0 -> H_top(S) -> H_top(T) -> H_top(C) -> ... -> H_0(C) -> 0 for a chain map f."""
    from flowhom.germs import _inclusion, _projection, _subquotient
    src, tgt, cone = f.source, f.target, mapping_cone(f)
    top = max(cone.top, 0)
    groups, maps = [Subquotient.zero()], []
    for n in range(top, -1, -1):
        gs, gt, gc = (_subquotient(c, n, f"{k}{n}") for k, c in (("S", src), ("T", tgt), ("C", cone)))
        maps.append(zeros(gs.dim, groups[-1].dim) if n == top else _projection(src.rank(n), cone.rank(n + 1)))
        maps.append(f.matrix(n))
        maps.append(_inclusion(src.rank(n - 1), tgt.rank(n)))
        groups += [gs, gt, gc]
    maps.append([])
    groups.append(Subquotient.zero())
    return GroupElementSequence(tuple(groups), tuple(maps))


def _random_complex(rng, ranks):
    """d_1 random, d_2 chosen inside ker d_1 so that dd = 0."""
    r0, r1, r2 = ranks
    d1 = random_matrix(rng, r0, r1, -2, 2)
    ker = kernel_basis(d1, r1) if r1 else []
    d2 = [[0] * r2 for _ in range(r1)]
    for j in range(r2):
        for k in ker:
            c = rng.randint(-2, 2)
            for i in range(r1):
                d2[i][j] += c * k[i]
    cols = lambda m, rows, n: tuple({i: m[i][j] for i in range(rows) if m[i][j]} for j in range(n))
    return ChainComplex({0: r0, 1: r1, 2: r2}, {1: cols(d1, r0, r1), 2: cols(d2, r1, r2)})


def test_random_cone_sequences_are_exact():
    rng = random.Random(11)
    done = 0
    while done < 40:
        src = _random_complex(rng, [rng.randint(0, 3) for _ in range(3)])
        # the identity and a projection onto a direct sum are chain maps
        other = _random_complex(rng, [rng.randint(0, 2) for _ in range(3)])
        tgt = ChainComplex({n: src.rank(n) + other.rank(n) for n in range(3)},
                           {n: src.boundary_columns(n) + tuple({src.rank(n - 1) + i: x for i, x in c.items()}
                                                              for c in other.boundary_columns(n))
                            for n in (1, 2)})
        k = rng.choice([1, 2, -1, 3])
        f = ChainMap(src, tgt, {n: [[k * int(i == j) for j in range(src.rank(n))] for i in range(tgt.rank(n))]
                                for n in range(3)})
        assert f.first_failure() is None
        assert mapping_cone(f).check_dd() == []
        report = verify_exactness(_les_of(f))
        assert report.exact, report.failures
        done += 1
