"""Exact sparse Gaussian elimination over Q or Q(i).

Vectors are ``dict[int, scalar]``; a matrix is a list of column vectors.
Entries may be ``int``, ``Fraction`` or :class:`~chernlab.scalars.QI`.
"""

from __future__ import annotations

import heapq
import os
from fractions import Fraction
from typing import Hashable, Mapping, Sequence

DEFAULT_MATRIX_CAP = 20_000
_ONE = Fraction(1)


class MatrixCapExceeded(RuntimeError):
    pass


def matrix_cap() -> int:
    raw = os.environ.get("CHERNLAB_MATRIX_CAP")
    if raw is None:
        return DEFAULT_MATRIX_CAP
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"CHERNLAB_MATRIX_CAP must be an integer, got {raw!r}") from None


def check_cap(columns: Sequence[Mapping]) -> None:
    nnz = sum(len(c) for c in columns)
    cap = matrix_cap()
    if nnz > cap:
        raise MatrixCapExceeded(
            f"matrix has {nnz} nonzeros, above the elimination cap {cap} "
            "(raise CHERNLAB_MATRIX_CAP to proceed)")


def _axpy(acc: dict, x: Mapping, f, heap=None) -> None:
    """acc -= f * x, dropping zeros."""
    for k, v in x.items():
        if k in acc:
            c = acc[k] - f * v
            if c:
                acc[k] = c
            else:
                del acc[k]
        else:
            acc[k] = -f * v
            if heap is not None:
                heapq.heappush(heap, k)


class Echelon:
    """Row-echelon basis of a growing span; every row remembers its input combination."""

    def __init__(self):
        self.rows: dict[int, tuple[dict, dict]] = {}

    def __len__(self):
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vec: Mapping, combo: Mapping | None = None) -> tuple[dict, dict]:
        """Return (residual, combo) with residual = vec - span part, tracked in combo."""
        v = {k: c for k, c in vec.items() if c}
        cmb = dict(combo or {})
        heap = list(v)
        heapq.heapify(heap)
        while heap:
            p = heapq.heappop(heap)
            if p not in v:
                continue
            row = self.rows.get(p)
            if row is None:
                heapq.heappush(heap, p)
                break
            f = v[p]
            rvec, rcmb = row
            _axpy(v, rvec, f, heap)
            _axpy(cmb, rcmb, f)
        return v, cmb

    def add(self, vec: Mapping, tag: Hashable | None = None) -> tuple[bool, dict]:
        """Insert ``vec``; returns (independent, combo). A dependent combo is a relation."""
        combo = {} if tag is None else {tag: _ONE}
        v, cmb = self.reduce(vec, combo)
        if not v:
            return False, cmb
        p = min(v)
        inv = _ONE / v[p]
        self.rows[p] = ({k: c * inv for k, c in v.items()}, {k: c * inv for k, c in cmb.items()})
        return True, cmb

    def contains(self, vec: Mapping) -> bool:
        return not self.reduce(vec)[0]

    def solve(self, vec: Mapping) -> dict | None:
        """Coefficients on input tags expressing ``vec``, or None if outside the span."""
        v, cmb = self.reduce(vec)
        if v:
            return None
        return {k: -c for k, c in cmb.items() if c}


def column_echelon(columns: Sequence[Mapping], cap: bool = True) -> tuple[Echelon, list[dict]]:
    """Eliminate the columns; return the echelon and a basis of the kernel."""
    if cap:
        check_cap(columns)
    ech = Echelon()
    kernel = []
    for j, col in enumerate(columns):
        independent, combo = ech.add(col, j)
        if not independent:
            kernel.append({k: c for k, c in combo.items() if c})
    return ech, kernel


def rank(columns: Sequence[Mapping]) -> int:
    return column_echelon(columns)[0].rank


def kernel_basis(columns: Sequence[Mapping]) -> list[dict]:
    return column_echelon(columns)[1]


def in_image(columns: Sequence[Mapping], vec: Mapping) -> bool:
    return column_echelon(columns)[0].contains(vec)


def solve(columns: Sequence[Mapping], vec: Mapping) -> dict | None:
    """Some x with M x = vec, as a sparse dict over column indices, or None."""
    return column_echelon(columns)[0].solve(vec)


def mat_vec(columns: Sequence[Mapping], x: Mapping) -> dict:
    out: dict = {}
    for j, c in x.items():
        if c:
            _axpy(out, columns[j], -c)
    return out
