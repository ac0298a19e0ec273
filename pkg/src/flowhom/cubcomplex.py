"""Finite precubical complexes and their integer chains.

A cube of dimension n carries, for every axis i in 1..n and sign e in {0, 1},
the id of its face d_i^e.  Chains use the boundary

    d x = sum_{i=1..n} (-1)^i (d_i^0 x - d_i^1 x).

Quotients by relations are taken at chain level by ``relation_cokernel``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, List, Mapping, Sequence, Tuple

from .intlinalg import ChainComplex, DimensionMismatch, SparseVec, solve, sparse_to_dense

CubeId = Hashable


@dataclass(frozen=True)
class Cube:
    id: CubeId
    dim: int
    faces: Tuple[Tuple[CubeId, CubeId], ...] = ()

    def face(self, axis: int, sign: int) -> CubeId:
        """Face d_axis^sign, axes counted from 1."""
        return self.faces[axis - 1][sign]


@dataclass(frozen=True)
class ValidationReport:
    errors: Tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.errors

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        return "valid" if self.ok else "\n".join(self.errors)


class InvalidComplex(ValueError):
    def __init__(self, report: ValidationReport):
        super().__init__(str(report))
        self.report = report


class RelationError(ValueError):
    """Relation family not closed under the boundary."""

    def __init__(self, degree: int, message: str = ""):
        super().__init__(message or f"relations in degree {degree} have boundaries outside the relation span")
        self.degree = degree


class PrecubicalComplex:
    """An ordered collection of cubes, closed under faces."""

    def __init__(self, cubes: Iterable[Cube] = ()):
        self._cubes: Dict[CubeId, Cube] = {}
        for c in cubes:
            if c.id in self._cubes:
                raise ValueError(f"duplicate cube id {c.id!r}")
            self._cubes[c.id] = c

    def __contains__(self, cid) -> bool:
        return cid in self._cubes

    def __getitem__(self, cid) -> Cube:
        return self._cubes[cid]

    def __iter__(self):
        return iter(self._cubes.values())

    def __len__(self) -> int:
        return len(self._cubes)

    @property
    def dim(self) -> int:
        return max((c.dim for c in self), default=-1)

    def cubes_of_dim(self, n: int) -> List[Cube]:
        return [c for c in self if c.dim == n]

    def counts(self) -> List[int]:
        out = [0] * (self.dim + 1)
        for c in self:
            out[c.dim] += 1
        return out

    def disjoint_union(self, other: "PrecubicalComplex") -> "PrecubicalComplex":
        def tag(t, c):
            return Cube((t, c.id), c.dim, tuple(((t, a), (t, b)) for a, b in c.faces))
        return PrecubicalComplex([tag(0, c) for c in self] + [tag(1, c) for c in other])


def validate_cubical(complex: PrecubicalComplex) -> ValidationReport:
    errors = []
    for c in complex:
        if len(c.faces) != c.dim:
            errors.append(f"cube {c.id!r}: {len(c.faces)} face pairs for dimension {c.dim}")
            continue
        for i, pair in enumerate(c.faces, 1):
            for e, f in enumerate(pair):
                if f not in complex:
                    errors.append(f"cube {c.id!r}: face d_{i}^{e} = {f!r} is missing")
                elif complex[f].dim != c.dim - 1:
                    errors.append(f"cube {c.id!r}: face d_{i}^{e} = {f!r} has dimension "
                                  f"{complex[f].dim}, expected {c.dim - 1}")
    if errors:
        return ValidationReport(tuple(errors))
    for c in complex:
        for i in range(1, c.dim + 1):
            for j in range(i + 1, c.dim + 1):
                for a in (0, 1):
                    for b in (0, 1):
                        lhs = complex[c.face(j, b)].face(i, a)
                        rhs = complex[c.face(i, a)].face(j - 1, b)
                        if lhs != rhs:
                            errors.append(f"cube {c.id!r}: d_{i}^{a} d_{j}^{b} = {lhs!r} but "
                                          f"d_{j - 1}^{b} d_{i}^{a} = {rhs!r}")
    return ValidationReport(tuple(errors))


def chain_complex(complex: PrecubicalComplex, check: bool = True) -> ChainComplex:
    """Cellular chains of a valid precubical complex, basis in cube order."""
    if check:
        report = validate_cubical(complex)
        if not report.ok:
            raise InvalidComplex(report)
    top = complex.dim
    index: Dict[CubeId, int] = {}
    labels: Dict[int, List] = {n: [] for n in range(top + 1)}
    for c in complex:
        index[c.id] = len(labels[c.dim])
        labels[c.dim].append(c.id)
    boundaries = {}
    for n in range(1, top + 1):
        cols = []
        for cid in labels[n]:
            c = complex[cid]
            col: SparseVec = {}
            for i, (lo, hi) in enumerate(c.faces, 1):
                s = -1 if i % 2 else 1
                col[index[lo]] = col.get(index[lo], 0) + s
                col[index[hi]] = col.get(index[hi], 0) - s
            cols.append({k: v for k, v in col.items() if v})
        boundaries[n] = tuple(cols)
    return ChainComplex({n: len(labels[n]) for n in range(top + 1)}, boundaries,
                        {n: tuple(v) for n, v in labels.items()})


# ---------------------------------------------------------------------------
# chain-level quotient

class _Eliminator:
    """Sparse elimination of relations with a unit coefficient.

    Each pivot coordinate p is rewritten as an integer combination of the
    surviving coordinates; the rewrite table is kept fully reduced.
    Relations without a unit coefficient are kept aside as residual.
    """

    def __init__(self):
        self.pivots: Dict[int, SparseVec] = {}
        self.uses: Dict[int, set] = {}
        self.residual: List[SparseVec] = []

    def reduce(self, vec: Mapping[int, int]) -> SparseVec:
        out: SparseVec = {}
        for i, x in vec.items():
            if not x:
                continue
            expr = self.pivots.get(i)
            if expr is None:
                out[i] = out.get(i, 0) + x
            else:
                for k, y in expr.items():
                    out[k] = out.get(k, 0) + x * y
        return {k: v for k, v in out.items() if v}

    def add(self, vec: Mapping[int, int]) -> None:
        r = self.reduce(vec)
        if not r:
            return
        units = [k for k, v in r.items() if v in (1, -1)]
        if not units:
            self.residual.append(r)
            return
        p = max(units)
        c = r.pop(p)
        # c * e_p + rest = 0  =>  e_p = -c * rest  (c = +-1)
        expr = {k: -c * v for k, v in r.items()}
        for q in list(self.uses.get(p, ())):
            old = self.pivots[q]
            coef = old.pop(p)
            for k, v in expr.items():
                nv = old.get(k, 0) + coef * v
                if nv:
                    old[k] = nv
                else:
                    old.pop(k, None)
                    self.uses.get(k, set()).discard(q)
            for k in expr:
                if k in old:
                    self.uses.setdefault(k, set()).add(q)
        self.uses.pop(p, None)
        self.pivots[p] = expr
        for k in expr:
            self.uses.setdefault(k, set()).add(p)

    def finish(self) -> List[SparseVec]:
        res = [self.reduce(r) for r in self.residual]
        return [r for r in res if r]


def _as_sparse(vec, size: int, degree: int) -> SparseVec:
    if isinstance(vec, Mapping):
        for i in vec:
            if not 0 <= i < size:
                raise DimensionMismatch(f"degree {degree}: relation index {i} outside rank {size}")
        return {i: x for i, x in vec.items() if x}
    if len(vec) != size:
        raise DimensionMismatch(f"degree {degree}: relation of length {len(vec)}, chain group has rank {size}")
    return {i: x for i, x in enumerate(vec) if x}


def relation_cokernel(c: ChainComplex, relations: Mapping[int, Sequence]) -> ChainComplex:
    """Quotient complex C / R with R given per degree.

    Relations with a unit coefficient are eliminated outright, so the result
    has one basis element per surviving coordinate; anything left over is
    carried as ``relations`` of the returned (presented) complex.
    """
    if c.is_presented:
        raise ValueError("relation_cokernel expects a free complex")
    elims: Dict[int, _Eliminator] = {}
    sparse_rels: Dict[int, List[SparseVec]] = {}
    for n in c.ranks:
        el = _Eliminator()
        rels = [_as_sparse(v, c.rank(n), n) for v in relations.get(n, ())]
        for r in rels:
            el.add(r)
        elims[n] = el
        sparse_rels[n] = rels
    for n in relations:
        if n not in c.ranks and relations[n]:
            raise DimensionMismatch(f"relations given in degree {n} outside the complex")
    residual = {n: elims[n].finish() for n in c.ranks}
    free = {n: [i for i in range(c.rank(n)) if i not in elims[n].pivots] for n in c.ranks}
    pos = {n: {i: k for k, i in enumerate(free[n])} for n in c.ranks}

    def project(n: int, vec: Mapping[int, int]) -> SparseVec:
        if n not in elims:
            return {}
        return {pos[n][i]: x for i, x in elims[n].reduce(vec).items()}

    def in_residual(n: int, vec: SparseVec) -> bool:
        if not vec:
            return True
        res = [project_free(n, r) for r in residual[n]]
        if not res:
            return False
        size = len(free[n])
        m = sparse_to_dense(res, size)
        b = [vec.get(i, 0) for i in range(size)]
        return solve(m, b, len(res)) is not None

    def project_free(n: int, vec: SparseVec) -> SparseVec:
        return {pos[n][i]: x for i, x in vec.items()}

    for n in c.ranks:
        cols = c.boundary_columns(n)
        for r in sparse_rels[n]:
            image: SparseVec = {}
            for i, x in r.items():
                for k, y in cols[i].items():
                    image[k] = image.get(k, 0) + x * y
            if not in_residual(n - 1, project(n - 1, image)):
                raise RelationError(n)

    boundaries = {}
    for n in c.ranks:
        cols = c.boundary_columns(n)
        boundaries[n] = tuple(project(n - 1, cols[i]) for i in free[n])
    labels = {n: tuple(c.label(n)[i] for i in free[n]) for n in c.ranks}
    rels_out = {n: tuple(project_free(n, r) for r in residual[n]) for n in c.ranks if residual[n]}
    return ChainComplex({n: len(free[n]) for n in c.ranks}, boundaries, labels, rels_out)
