"""Boundary matrices, Betti numbers, cycle bases and homology-class comparison."""

from __future__ import annotations

from dataclasses import dataclass, field

from .chains import Chain, ChainComplexBase, ChainError, get_chain_complex
from .linalg import Echelon, check_cap, column_echelon
from .scalars import format_scalar


def resolve_complex(space, theory=None, equivariant=None) -> ChainComplexBase:
    if isinstance(space, ChainComplexBase):
        return space
    if theory is None:
        raise ChainError("a theory is required when passing a bare space")
    return get_chain_complex(space, theory, equivariant)


@dataclass
class BoundaryMatrix:
    """Sparse matrix of ∂_k: coordinates in degree k (cols) to degree k-1 (rows)."""

    rows: list
    cols: list
    columns: list[dict]
    degree: int

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.cols)

    @property
    def nnz(self) -> int:
        return sum(len(c) for c in self.columns)

    def to_dense(self) -> list[list]:
        out = [[0] * len(self.cols) for _ in self.rows]
        for j, col in enumerate(self.columns):
            for i, v in col.items():
                out[i][j] = v
        return out

    def compose(self, other: BoundaryMatrix) -> list[dict]:
        """Columns of self @ other (other maps into self's column space)."""
        if len(other.rows) != len(self.cols):
            raise ValueError("shape mismatch in composition")
        out = []
        for col in other.columns:
            acc: dict = {}
            for j, c in col.items():
                for i, v in self.columns[j].items():
                    s = acc.get(i, 0) + c * v
                    if s:
                        acc[i] = s
                    else:
                        acc.pop(i, None)
            out.append(acc)
        return out


def assemble_boundary(space, degree: int, theory=None, equivariant=None) -> BoundaryMatrix:
    cx = resolve_complex(space, theory, equivariant)
    cx.require_degree(degree)
    cache = cx.__dict__.setdefault("_boundary_cache", {})
    if degree in cache:
        return cache[degree]
    cols = cx.coordinate_basis(degree)
    rows = cx.coordinate_basis(degree - 1)
    index = cx.coordinate_index(degree - 1)
    columns = []
    for orbit in cx.orbits(degree):
        acc: dict = {}
        for key, s in orbit.members.items():
            for face, c in cx.boundary_key(key).items():
                if face in index:
                    i = index[face]
                    v = acc.get(i, 0) + s * c
                    if v:
                        acc[i] = v
                    else:
                        acc.pop(i, None)
        columns.append(acc)
    m = BoundaryMatrix(rows, cols, columns, degree)
    cache[degree] = m
    return m


@dataclass
class HomologyResult:
    theory: str
    degree: int
    betti: int
    cycle_basis: list[Chain]
    complex: ChainComplexBase = field(repr=False)
    _echelon: Echelon = field(repr=False)
    _image_rank: int = field(repr=False)

    def coordinates(self, z: Chain) -> list:
        """Coefficients of z's class on ``cycle_basis``."""
        _require_cycle(z, self.complex, self.degree)
        sol = self._echelon.solve(z.coordinates())
        if sol is None:
            raise ChainError("chain is not a cycle of this complex")
        return [sol.get(("cycle", i), 0) for i in range(self.betti)]

    def is_boundary(self, z: Chain) -> bool:
        return not any(self.coordinates(z))

    def to_json(self) -> dict:
        from .chains import chain_to_json
        return {"theory": self.complex.describe(), "degree": self.degree, "betti": self.betti,
                "cycles": [chain_to_json(z) for z in self.cycle_basis]}


def _require_cycle(z: Chain, cx: ChainComplexBase, degree: int) -> None:
    if z.space is not cx or z.degree != degree:
        raise ChainError("chain belongs to a different complex or degree")
    if cx.equivariant and cx.group is not None and not z.is_invariant():
        raise ChainError("chain is not Γ-invariant")
    if z.boundary():
        raise ChainError("chain is not a cycle")


def homology(space, degree: int, theory=None, equivariant=None) -> HomologyResult:
    """H_k = Ker ∂_k / Im ∂_{k+1} with an explicit cycle basis."""
    cx = resolve_complex(space, theory, equivariant)
    cx.require_degree(degree + 1)
    dk = assemble_boundary(cx, degree)
    above = assemble_boundary(cx, degree + 1)
    _, kernel = column_echelon(dk.columns)
    check_cap(above.columns)
    ech = Echelon()
    for j, col in enumerate(above.columns):
        ech.add(col, ("image", j))
    image_rank = ech.rank
    cycles = []
    for vec in kernel:
        independent, _ = ech.add(vec, ("cycle", len(cycles)))
        if independent:
            cycles.append(cx.from_coordinates(degree, vec))
    return HomologyResult(cx.describe(), degree, len(cycles), cycles, cx, ech, image_rank)


def betti_numbers(space, max_degree: int, theory=None, equivariant=None) -> list[int]:
    cx = resolve_complex(space, theory, equivariant)
    return [homology(cx, k).betti for k in range(max_degree + 1)]


def class_equal(z1: Chain, z2: Chain, boundary_above: BoundaryMatrix | None = None) -> bool:
    """True iff z1 - z2 is a boundary."""
    cx = z1.space
    if z2.space is not cx or z1.degree != z2.degree:
        raise ChainError("class_equal needs cycles of the same complex and degree")
    for z in (z1, z2):
        _require_cycle(z, cx, z.degree)
    if boundary_above is None:
        boundary_above = assemble_boundary(cx, z1.degree + 1)
    diff = (z1 - z2).coordinates()
    if not diff:
        return True
    ech, _ = column_echelon(boundary_above.columns)
    return ech.contains(diff)


def composes_to_zero(cx: ChainComplexBase, degree: int) -> bool:
    """∂_{k-1} ∘ ∂_k == 0 at the matrix level."""
    lower = assemble_boundary(cx, degree - 1)
    upper = assemble_boundary(cx, degree)
    return not any(lower.compose(upper))


def format_matrix(m: BoundaryMatrix) -> list[list[str]]:
    return [[format_scalar(x) for x in row] for row in m.to_dense()]
