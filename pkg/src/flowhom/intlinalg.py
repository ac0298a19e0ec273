"""Exact integer linear algebra.

Smith normal form over arbitrary-precision Python ints, finitely generated
abelian groups, chain complexes with their homology, chain maps, mapping
cones, and exactness checks for sequences of presented groups.

Matrices are plain lists of rows.  Chain complexes store their boundaries
sparsely (one ``{row: coeff}`` dict per column) because word complexes can
have thousands of cells while staying very sparse.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

Matrix = List[List[int]]
Vector = List[int]
SparseVec = Dict[int, int]


class DimensionMismatch(ValueError):
    pass


class StructureError(ValueError):
    """A presented sequence whose maps do not respect the presentations."""


# ---------------------------------------------------------------------------
# dense helpers

def zeros(rows: int, cols: int) -> Matrix:
    return [[0] * cols for _ in range(rows)]


def identity(n: int) -> Matrix:
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = 1
    return m


def shape(m: Matrix, cols: Optional[int] = None) -> Tuple[int, int]:
    if not m:
        return 0, cols or 0
    return len(m), len(m[0])


def matmul(a: Matrix, b: Matrix, inner: Optional[int] = None, cols: Optional[int] = None) -> Matrix:
    """Product of dense matrices; ``inner``/``cols`` disambiguate empty shapes."""
    rows = len(a)
    if inner is None:
        inner = len(b) if b else (len(a[0]) if a else 0)
    if cols is None:
        cols = len(b[0]) if b else 0
    out = zeros(rows, cols)
    for i in range(rows):
        ai = a[i]
        oi = out[i]
        for k in range(inner):
            x = ai[k]
            if x:
                bk = b[k]
                for j in range(cols):
                    if bk[j]:
                        oi[j] += x * bk[j]
    return out


def matvec(a: Matrix, v: Sequence[int]) -> Vector:
    return [sum(x * y for x, y in zip(row, v) if x and y) for row in a]


def transpose(a: Matrix, rows: int, cols: int) -> Matrix:
    return [[a[i][j] for i in range(rows)] for j in range(cols)]


def columns_to_matrix(columns: Sequence[Sequence[int]], rows: int) -> Matrix:
    """Dense matrix whose j-th column is ``columns[j]``."""
    m = zeros(rows, len(columns))
    for j, col in enumerate(columns):
        if len(col) != rows:
            raise DimensionMismatch(f"column {j} has length {len(col)}, expected {rows}")
        for i, x in enumerate(col):
            m[i][j] = x
    return m


def sparse_to_dense(columns: Sequence[SparseVec], rows: int) -> Matrix:
    m = zeros(rows, len(columns))
    for j, col in enumerate(columns):
        for i, x in col.items():
            m[i][j] = x
    return m


def determinant(a: Matrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = [row[:] for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Smith normal form

class _Smith:
    """Row/column reduction of an integer matrix to Smith form.

    Tracks U, U^-1 and V on request so that ``U * M * V = D``.
    """

    def __init__(self, m: Matrix, rows: int, cols: int, track: bool):
        self.a = [row[:] for row in m]
        self.rows, self.cols = rows, cols
        self.track = track
        if track:
            self.u = identity(rows)
            self.uinv = identity(rows)
            self.v = identity(cols)
        self.rank = 0
        self._run()

    # elementary operations, mirrored on the transforms
    def _swap_rows(self, i: int, j: int) -> None:
        a = self.a
        a[i], a[j] = a[j], a[i]
        if self.track:
            self.u[i], self.u[j] = self.u[j], self.u[i]
            for row in self.uinv:
                row[i], row[j] = row[j], row[i]

    def _swap_cols(self, i: int, j: int) -> None:
        for row in self.a:
            row[i], row[j] = row[j], row[i]
        if self.track:
            for row in self.v:
                row[i], row[j] = row[j], row[i]

    def _add_row(self, dst: int, src: int, q: int) -> None:
        a = self.a
        rs, rd = a[src], a[dst]
        for k in range(self.cols):
            if rs[k]:
                rd[k] += q * rs[k]
        if self.track:
            us, ud = self.u[src], self.u[dst]
            for k in range(self.rows):
                if us[k]:
                    ud[k] += q * us[k]
            for row in self.uinv:
                if row[dst]:
                    row[src] -= q * row[dst]

    def _add_col(self, dst: int, src: int, q: int) -> None:
        for row in self.a:
            if row[src]:
                row[dst] += q * row[src]
        if self.track:
            for row in self.v:
                if row[src]:
                    row[dst] += q * row[src]

    def _negate_row(self, i: int) -> None:
        self.a[i] = [-x for x in self.a[i]]
        if self.track:
            self.u[i] = [-x for x in self.u[i]]
            for row in self.uinv:
                row[i] = -row[i]

    def _pivot_search(self, t: int) -> Optional[Tuple[int, int]]:
        best = None
        bestv = 0
        for i in range(t, self.rows):
            row = self.a[i]
            for j in range(t, self.cols):
                x = row[j]
                if x and (best is None or abs(x) < bestv):
                    best, bestv = (i, j), abs(x)
                    if bestv == 1:
                        return best
        return best

    def _run(self) -> None:
        a = self.a
        t = 0
        while t < min(self.rows, self.cols):
            pos = self._pivot_search(t)
            if pos is None:
                break
            self._swap_rows(t, pos[0])
            self._swap_cols(t, pos[1])
            while True:
                p = a[t][t]
                dirty = False
                for i in range(t + 1, self.rows):
                    if a[i][t]:
                        self._add_row(i, t, -(a[i][t] // p))
                        dirty = dirty or a[i][t] != 0
                for j in range(t + 1, self.cols):
                    if a[t][j]:
                        self._add_col(j, t, -(a[t][j] // p))
                        dirty = dirty or a[t][j] != 0
                if dirty:
                    # a remainder smaller than the pivot survived; promote it
                    best, bestv = None, abs(p)
                    for i in range(t + 1, self.rows):
                        if a[i][t] and abs(a[i][t]) < bestv:
                            best, bestv = ("r", i), abs(a[i][t])
                    for j in range(t + 1, self.cols):
                        if a[t][j] and abs(a[t][j]) < bestv:
                            best, bestv = ("c", j), abs(a[t][j])
                    if best is not None:
                        if best[0] == "r":
                            self._swap_rows(t, best[1])
                        else:
                            self._swap_cols(t, best[1])
                    continue
                bad = None
                for i in range(t + 1, self.rows):
                    row = a[i]
                    for j in range(t + 1, self.cols):
                        if row[j] % p:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                self._add_row(t, bad, 1)
            if a[t][t] < 0:
                self._negate_row(t)
            t += 1
        self.rank = t

    @property
    def diagonal(self) -> List[int]:
        return [self.a[i][i] for i in range(self.rank)]


def smith_normal_form(m: Matrix, cols: Optional[int] = None) -> Tuple[Matrix, Matrix, Matrix]:
    """Return ``(U, D, V)`` with ``U @ M @ V == D`` and U, V unimodular.

    D is diagonal with non-negative entries d1 | d2 | ... followed by zeros.
    ``cols`` gives the column count when ``m`` has no rows.
    """
    rows, ncols = shape(m, cols)
    s = _Smith(m, rows, ncols, track=True)
    return s.u, s.a, s.v


def smith_diagonal(m: Matrix, cols: Optional[int] = None) -> List[int]:
    """Nonzero invariant factors of ``m`` in divisibility order."""
    rows, ncols = shape(m, cols)
    return _Smith(m, rows, ncols, track=False).diagonal


def rank(m: Matrix, cols: Optional[int] = None) -> int:
    return len(smith_diagonal(m, cols))


def kernel_basis(m: Matrix, cols: int) -> List[Vector]:
    """A Z-basis of the integer kernel of ``m`` (a saturated lattice)."""
    rows = len(m)
    if rows == 0:
        return [[int(i == j) for i in range(cols)] for j in range(cols)]
    s = _Smith(m, rows, cols, track=True)
    return [[s.v[i][j] for i in range(cols)] for j in range(s.rank, cols)]


def solve(m: Matrix, b: Sequence[int], cols: int) -> Optional[Vector]:
    """An integer solution x of ``m x = b``, or None when none exists."""
    rows = len(m)
    if len(b) != rows:
        raise DimensionMismatch(f"right-hand side has length {len(b)}, expected {rows}")
    if cols == 0 or rows == 0:
        return [0] * cols if not any(b) else None
    s = _Smith(m, rows, cols, track=True)
    ub = matvec(s.u, b)
    y = [0] * cols
    for i in range(rows):
        if i < s.rank:
            d = s.a[i][i]
            if ub[i] % d:
                return None
            y[i] = ub[i] // d
        elif ub[i]:
            return None
    return matvec(s.v, y)


class Span:
    """The lattice spanned by ``vectors`` in Z^dim, factored once so that
    many membership queries share one decomposition."""

    def __init__(self, vectors: Sequence[Sequence[int]], dim: int):
        self.dim = dim
        self._smith = None
        if vectors and dim:
            self._smith = _Smith(columns_to_matrix(vectors, dim), dim, len(vectors), track=True)

    def __contains__(self, v: Sequence[int]) -> bool:
        if len(v) != self.dim:
            raise DimensionMismatch(f"vector of length {len(v)} tested against Z^{self.dim}")
        s = self._smith
        if s is None:
            return not any(v)
        ub = matvec(s.u, v)
        for i, x in enumerate(ub):
            if i < s.rank:
                if x % s.a[i][i]:
                    return False
            elif x:
                return False
        return True


def in_span(vectors: Sequence[Sequence[int]], v: Sequence[int]) -> bool:
    return v in Span(vectors, len(v))


# ---------------------------------------------------------------------------
# abelian groups

@dataclass(frozen=True, order=True)
class AbelianGroup:
    """Z^betti + Z/d1 + ... + Z/dk with d1 | d2 | ... | dk and every di >= 2."""

    betti: int = 0
    torsion: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(self.torsion))
        if self.betti < 0:
            raise ValueError("negative free rank")
        for d in self.torsion:
            if d < 2:
                raise ValueError(f"invalid invariant factor {d}")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"invariant factors {self.torsion} violate divisibility")

    @classmethod
    def from_diagonal(cls, betti: int, diagonal: Sequence[int]) -> "AbelianGroup":
        """Normalize Z^betti + sum of Z/|d| for arbitrary cyclic orders."""
        ds = [abs(d) for d in diagonal if abs(d) != 1]
        betti += sum(1 for d in ds if d == 0)
        ds = [d for d in ds if d]
        if len(ds) > 1:
            m = zeros(len(ds), len(ds))
            for i, d in enumerate(ds):
                m[i][i] = d
            ds = smith_diagonal(m)
        return cls(betti, tuple(d for d in ds if d > 1))

    @classmethod
    def free(cls, rank: int) -> "AbelianGroup":
        return cls(rank, ())

    def __add__(self, other: "AbelianGroup") -> "AbelianGroup":
        if not isinstance(other, AbelianGroup):
            return NotImplemented
        return AbelianGroup.from_diagonal(self.betti + other.betti,
                                          list(self.torsion) + list(other.torsion))

    @property
    def is_zero(self) -> bool:
        return self.betti == 0 and not self.torsion

    @property
    def order(self) -> Optional[int]:
        """Group order, or None when infinite."""
        if self.betti:
            return None
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        if self.betti == 1:
            parts.append("Z")
        elif self.betti:
            parts.append(f"Z^{self.betti}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts)

    def to_dict(self) -> dict:
        return {"betti": self.betti, "torsion": list(self.torsion)}


ZERO_GROUP = AbelianGroup()


def lattice_basis(vectors: Sequence[Sequence[int]], dim: int) -> Tuple[List[Vector], _Smith]:
    m = columns_to_matrix(vectors, dim)
    s = _Smith(m, dim, len(vectors), track=True)
    basis = []
    for j in range(s.rank):
        d = s.a[j][j]
        basis.append([s.uinv[i][j] * d for i in range(dim)])
    return basis, s


def subquotient_group(gens: Sequence[Sequence[int]], rels: Sequence[Sequence[int]],
                      dim: int) -> AbelianGroup:
    """The group span(gens) / span(rels) inside Z^dim.

    Raises StructureError when a relation is not in the span of the generators.
    """
    gens = [g for g in gens if any(g)]
    rels = [r for r in rels if any(r)]
    if not gens:
        if rels:
            raise StructureError("relations given for an empty generating set")
        return ZERO_GROUP
    _, s = lattice_basis(gens, dim)
    r = s.rank
    coords = zeros(r, len(rels))
    for k, rel in enumerate(rels):
        y = matvec(s.u, rel)
        for i in range(dim):
            if i < r:
                d = s.a[i][i]
                if y[i] % d:
                    raise StructureError("relation outside the generated lattice")
                coords[i][k] = y[i] // d
            elif y[i]:
                raise StructureError("relation outside the generated lattice")
    diag = smith_diagonal(coords, len(rels))
    return AbelianGroup.from_diagonal(r - len(diag), diag)


# ---------------------------------------------------------------------------
# chain complexes

@dataclass(frozen=True)
class ChainComplex:
    """A bounded complex of free abelian groups, optionally presented.

    ``ranks`` maps degree -> rank (degrees form a contiguous range, possibly
    starting at -1 for an augmented complex).  ``boundaries[n]`` holds one
    sparse column per basis element of degree n giving its image in degree
    n-1.  ``relations[n]``, when present, lists sparse vectors spanning a
    subgroup R_n; the chain group is then Z^rank / R_n.
    """

    ranks: Mapping[int, int]
    boundaries: Mapping[int, Tuple[SparseVec, ...]] = field(default_factory=dict)
    labels: Mapping[int, Tuple] = field(default_factory=dict)
    relations: Mapping[int, Tuple[SparseVec, ...]] = field(default_factory=dict)

    def __post_init__(self):
        for n, cols in self.boundaries.items():
            if len(cols) != self.rank(n):
                raise DimensionMismatch(f"degree {n}: {len(cols)} boundary columns for rank {self.rank(n)}")
            below = self.rank(n - 1)
            for col in cols:
                for i in col:
                    if not 0 <= i < below:
                        raise DimensionMismatch(f"degree {n}: boundary row {i} out of range {below}")

    @property
    def degrees(self) -> List[int]:
        return sorted(self.ranks)

    @property
    def top(self) -> int:
        return max(self.ranks) if self.ranks else -1

    @property
    def is_presented(self) -> bool:
        return any(self.relations.get(n) for n in self.ranks)

    def rank(self, n: int) -> int:
        return self.ranks.get(n, 0)

    def boundary_columns(self, n: int) -> Tuple[SparseVec, ...]:
        cols = self.boundaries.get(n)
        if cols is None:
            return tuple({} for _ in range(self.rank(n)))
        return cols

    def boundary(self, n: int) -> Matrix:
        """Dense matrix of d_n : C_n -> C_{n-1}."""
        return sparse_to_dense(self.boundary_columns(n), self.rank(n - 1))

    def label(self, n: int) -> Tuple:
        return tuple(self.labels.get(n, range(self.rank(n))))

    def check_dd(self) -> List[int]:
        """Degrees n where d_{n-1} o d_n is not zero."""
        bad = []
        for n in self.degrees:
            lower = self.boundary_columns(n - 1)
            for col in self.boundary_columns(n):
                acc: SparseVec = {}
                for i, x in col.items():
                    for k, y in lower[i].items() if i < len(lower) else ():
                        acc[k] = acc.get(k, 0) + x * y
                if any(acc.values()):
                    bad.append(n)
                    break
        return bad


def _rels(c: ChainComplex, n: int) -> List[Vector]:
    size = c.rank(n)
    out = []
    for r in c.relations.get(n, ()):
        v = [0] * size
        for i, x in r.items():
            v[i] = x
        out.append(v)
    return out


def homology(c: ChainComplex, n: int) -> AbelianGroup:
    """H_n = ker d_n / im d_{n+1}; degrees outside the complex give 0."""
    k = c.rank(n)
    if k == 0:
        return ZERO_GROUP
    if not (c.relations.get(n) or c.relations.get(n - 1)):
        dn = smith_diagonal(c.boundary(n), k)
        up = smith_diagonal(c.boundary(n + 1), c.rank(n + 1))
        return AbelianGroup.from_diagonal(k - len(dn) - len(up), up)
    # presented complex: cycles are x with d x in R_{n-1}
    below = c.rank(n - 1)
    rel_below = _rels(c, n - 1)
    d = c.boundary(n)
    if below:
        stacked = [d[i] + [-r[i] for r in rel_below] for i in range(below)]
        kern = kernel_basis(stacked, k + len(rel_below))
        cycles = [v[:k] for v in kern]
    else:
        cycles = [[int(i == j) for i in range(k)] for j in range(k)]
    up_cols = [[col.get(i, 0) for i in range(k)] for col in c.boundary_columns(n + 1)]
    return subquotient_group(cycles, _rels(c, n) + up_cols, k)


def homology_table(c: ChainComplex, top: Optional[int] = None) -> Dict[int, AbelianGroup]:
    hi = c.top if top is None else top
    lo = min(c.ranks) if c.ranks else 0
    return {n: homology(c, n) for n in range(lo, hi + 1)}


def cycles_basis(c: ChainComplex, n: int) -> List[Vector]:
    """Z-basis of ker d_n (free complexes only)."""
    k = c.rank(n)
    if c.rank(n - 1) == 0:
        return [[int(i == j) for i in range(k)] for j in range(k)]
    return kernel_basis(c.boundary(n), k)


def boundaries_list(c: ChainComplex, n: int) -> List[Vector]:
    k = c.rank(n)
    return [[col.get(i, 0) for i in range(k)] for col in c.boundary_columns(n + 1)]


# ---------------------------------------------------------------------------
# chain maps and cones

@dataclass(frozen=True)
class ChainMap:
    """Per-degree matrices ``maps[n]`` (target rank x source rank)."""

    source: ChainComplex
    target: ChainComplex
    maps: Mapping[int, Matrix]

    def matrix(self, n: int) -> Matrix:
        m = self.maps.get(n)
        if m is None:
            return zeros(self.target.rank(n), self.source.rank(n))
        return m

    def first_failure(self) -> Optional[int]:
        """Lowest degree where d o f != f o d, or None for a chain map."""
        for n in sorted(set(self.source.ranks) | set(self.target.ranks)):
            fn = self.matrix(n)
            if len(fn) != self.target.rank(n) or any(len(r) != self.source.rank(n) for r in fn):
                return n
            lhs = matmul(self.target.boundary(n), fn, self.target.rank(n), self.source.rank(n))
            rhs = matmul(self.matrix(n - 1), self.source.boundary(n), self.source.rank(n - 1),
                         self.source.rank(n))
            if lhs != rhs:
                return n
        return None


class ChainMapError(ValueError):
    def __init__(self, degree: int):
        super().__init__(f"chain-map identity fails in degree {degree}")
        self.degree = degree


def identity_map(c: ChainComplex) -> ChainMap:
    return ChainMap(c, c, {n: identity(c.rank(n)) for n in c.ranks})


def mapping_cone(f: ChainMap) -> ChainComplex:
    """Cone_n = S_{n-1} + T_n with d(x, y) = (-d x, d y - f x)."""
    src, tgt = f.source, f.target
    if src.is_presented or tgt.is_presented:
        raise ValueError("mapping cone requires free complexes")
    bad = f.first_failure()
    if bad is not None:
        raise ChainMapError(bad)
    degs = sorted({n + 1 for n in src.ranks} | set(tgt.ranks))
    ranks = {n: src.rank(n - 1) + tgt.rank(n) for n in degs}
    boundaries = {}
    labels = {}
    for n in degs:
        s_prev = src.rank(n - 1)
        s_prev2 = src.rank(n - 2)
        cols = []
        ds = src.boundary_columns(n - 1)
        fm = f.matrix(n - 1)
        for j in range(s_prev):
            col = {i: -x for i, x in ds[j].items()}
            for i in range(tgt.rank(n - 1)):
                if fm[i][j]:
                    col[s_prev2 + i] = col.get(s_prev2 + i, 0) - fm[i][j]
            cols.append({i: x for i, x in col.items() if x})
        for col in tgt.boundary_columns(n):
            cols.append({s_prev2 + i: x for i, x in col.items()})
        boundaries[n] = tuple(cols)
        labels[n] = tuple(("src", l) for l in src.label(n - 1)) + tuple(("tgt", l) for l in tgt.label(n))
    return ChainComplex(ranks, boundaries, labels)


# ---------------------------------------------------------------------------
# exactness of presented sequences

@dataclass(frozen=True)
class Subquotient:
    """span(gens) / span(rels) inside Z^dim, gens and rels as dense vectors."""

    dim: int
    gens: Tuple[Tuple[int, ...], ...]
    rels: Tuple[Tuple[int, ...], ...] = ()
    label: str = ""

    @classmethod
    def make(cls, dim: int, gens, rels=(), label: str = "") -> "Subquotient":
        return cls(dim, tuple(tuple(g) for g in gens), tuple(tuple(r) for r in rels), label)

    @classmethod
    def zero(cls, label: str = "0") -> "Subquotient":
        return cls(0, (), (), label)

    def group(self) -> AbelianGroup:
        return subquotient_group(self.gens, self.rels, self.dim)


@dataclass(frozen=True)
class GroupElementSequence:
    """groups[0] -> groups[1] -> ... with ``maps[i]`` : groups[i] -> groups[i+1]."""

    groups: Tuple[Subquotient, ...]
    maps: Tuple[Matrix, ...]


@dataclass(frozen=True)
class NodeVerdict:
    index: int
    label: str
    exact: bool
    reason: str = ""
    witness: Optional[Tuple[int, ...]] = None


@dataclass(frozen=True)
class ExactnessReport:
    nodes: Tuple[NodeVerdict, ...]

    @property
    def exact(self) -> bool:
        return all(n.exact for n in self.nodes)

    @property
    def failures(self) -> List[NodeVerdict]:
        return [n for n in self.nodes if not n.exact]


def _apply(m: Matrix, v: Sequence[int], out_dim: int) -> Vector:
    if out_dim == 0:
        return []
    return matvec(m, v)


def _check_structure(seq: GroupElementSequence) -> None:
    if len(seq.maps) != len(seq.groups) - 1:
        raise StructureError("need exactly one map between consecutive groups")
    for g in seq.groups:
        for v in g.gens + g.rels:
            if len(v) != g.dim:
                raise StructureError(f"group {g.label!r}: vector of length {len(v)} in Z^{g.dim}")
        gens = Span(g.gens, g.dim)
        for r in g.rels:
            if r not in gens:
                raise StructureError(f"group {g.label!r}: relation outside the generators")
    for i, m in enumerate(seq.maps):
        a, b = seq.groups[i], seq.groups[i + 1]
        if b.dim and (len(m) != b.dim or any(len(row) != a.dim for row in m)):
            raise StructureError(f"map {i} has the wrong shape for Z^{a.dim} -> Z^{b.dim}")
        gens, rels = Span(b.gens, b.dim), Span(b.rels, b.dim)
        for g in a.gens:
            if _apply(m, g, b.dim) not in gens:
                raise StructureError(f"map {i} sends a generator of {a.label!r} outside {b.label!r}")
        for r in a.rels:
            if _apply(m, r, b.dim) not in rels:
                raise StructureError(f"map {i} is not well defined on the relations of {a.label!r}")


def verify_exactness(seq: GroupElementSequence) -> ExactnessReport:
    """Decide im(incoming) == ker(outgoing) at every interior node."""
    _check_structure(seq)
    verdicts = []
    for i in range(1, len(seq.groups) - 1):
        prev, here, nxt = seq.groups[i - 1], seq.groups[i], seq.groups[i + 1]
        a, b = seq.maps[i - 1], seq.maps[i]
        verdict = None
        images = [_apply(a, g, here.dim) for g in prev.gens]
        next_rels = Span(nxt.rels, nxt.dim)
        for g, img in zip(prev.gens, images):
            if _apply(b, img, nxt.dim) not in next_rels:
                verdict = NodeVerdict(i, here.label, False, "image not contained in kernel", tuple(g))
                break
        if verdict is None and here.gens:
            k = len(here.gens)
            bg = [_apply(b, g, nxt.dim) for g in here.gens]
            if nxt.dim:
                stacked = [[bg[j][r] for j in range(k)] + [-rel[r] for rel in nxt.rels]
                           for r in range(nxt.dim)]
                mus = [v[:k] for v in kernel_basis(stacked, k + len(nxt.rels))]
            else:
                mus = [[int(x == j) for x in range(k)] for j in range(k)]
            target = Span(images + [list(r) for r in here.rels], here.dim)
            for mu in mus:
                elt = [sum(mu[j] * here.gens[j][r] for j in range(k)) for r in range(here.dim)]
                if elt not in target:
                    verdict = NodeVerdict(i, here.label, False, "kernel not contained in image",
                                          tuple(elt))
                    break
        verdicts.append(verdict or NodeVerdict(i, here.label, True))
    return ExactnessReport(tuple(verdicts))
