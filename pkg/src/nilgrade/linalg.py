"""Exact rational vectors, matrices, echelon forms and affine solving.

Everything here works over `fractions.Fraction` and is deterministic:
pivots are always the first nonzero entry in column order, so reduced
forms, particular solutions and nullspace bases are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Vec = list[Fraction]
Matrix = list[list[Fraction]]

ZERO = Fraction(0)
ONE = Fraction(1)


def q(x) -> Fraction:
    """Coerce ints, strings like '-3/4' or Fractions to Fraction."""
    return x if isinstance(x, Fraction) else Fraction(x)


def vec(entries: Iterable) -> Vec:
    return [q(x) for x in entries]


def zero_vec(n: int) -> Vec:
    return [ZERO] * n


def unit_vec(n: int, i: int) -> Vec:
    v = [ZERO] * n
    v[i] = ONE
    return v


def vec_add(a: Sequence[Fraction], b: Sequence[Fraction]) -> Vec:
    return [x + y for x, y in zip(a, b)]


def vec_sub(a: Sequence[Fraction], b: Sequence[Fraction]) -> Vec:
    return [x - y for x, y in zip(a, b)]


def vec_scale(c: Fraction, a: Sequence[Fraction]) -> Vec:
    return [c * x for x in a]


def is_zero_vec(a: Sequence[Fraction]) -> bool:
    return all(x == 0 for x in a)


def matrix(rows: Iterable[Iterable]) -> Matrix:
    m = [[q(x) for x in row] for row in rows]
    if m and any(len(row) != len(m[0]) for row in m):
        raise ValueError("ragged rows")
    return m


def identity(n: int) -> Matrix:
    return [unit_vec(n, i) for i in range(n)]


def mat_vec(m: Matrix, v: Sequence[Fraction]) -> Vec:
    if m and len(m[0]) != len(v):
        raise ValueError("dimension mismatch")
    return [sum((r[j] * v[j] for j in range(len(v))), ZERO) for r in m]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if a and b and len(a[0]) != len(b):
        raise ValueError("dimension mismatch")
    cols = len(b[0]) if b else 0
    return [
        [sum((a[i][k] * b[k][j] for k in range(len(b))), ZERO) for j in range(cols)]
        for i in range(len(a))
    ]


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return [vec_add(x, y) for x, y in zip(a, b)]


def columns_matrix(vectors: Sequence[Sequence[Fraction]]) -> Matrix:
    """Matrix whose columns are the given vectors."""
    if not vectors:
        return []
    n = len(vectors[0])
    return [[q(v[i]) for v in vectors] for i in range(n)]


def rref(m: Matrix) -> tuple[Matrix, list[int], int]:
    """Reduced row echelon form.

    Returns (reduced, pivot_columns, rank).  The pivot in each column is
    taken from the first row with a nonzero entry, making the output the
    unique RREF of the row space of `m`.
    """
    a = [list(row) for row in m]
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        inv = ONE / a[r][c]
        if inv != 1:
            a[r] = [x * inv for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return a, pivots, len(pivots)


@dataclass(frozen=True)
class AffineSolution:
    """Full solution set {particular + span(nullspace_basis)} of a·x = b."""

    particular: Vec
    nullspace_basis: list[Vec]


def solve_affine(a: Matrix, b: Sequence[Fraction]) -> AffineSolution | None:
    """Solve a·x = b exactly; None when the system is infeasible.

    The particular solution sets every free variable to zero, so it is
    deterministic and reproducible.
    """
    if len(a) != len(b):
        raise ValueError("dimension mismatch between matrix and rhs")
    ncols = len(a[0]) if a else 0
    aug = [list(row) + [q(bb)] for row, bb in zip(a, b)]
    red, pivots, _ = rref(aug)
    if ncols in pivots:
        return None
    particular = zero_vec(ncols)
    for row, c in enumerate(pivots):
        particular[c] = red[row][ncols]
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis: list[Vec] = []
    for f in free:
        v = zero_vec(ncols)
        v[f] = ONE
        for row, c in enumerate(pivots):
            v[c] = -red[row][f]
        basis.append(v)
    return AffineSolution(particular, basis)


def nullspace(a: Matrix) -> list[Vec]:
    """Basis of {x : a·x = 0}, free variables set one at a time."""
    if not a:
        return []
    sol = solve_affine(a, zero_vec(len(a)))
    assert sol is not None
    return sol.nullspace_basis


def mat_inv(m: Matrix) -> Matrix:
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("not square")
    aug = [list(row) + unit_vec(n, i) for i, row in enumerate(m)]
    red, pivots, rank = rref(aug)
    if rank != n or pivots != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in red]


class Echelon:
    """Incrementally maintained reduced echelon basis of a subspace.

    `add` returns True when the vector enlarged the span.  Rows are kept
    fully reduced with unit pivots, so `basis` is the canonical RREF
    basis of the span regardless of insertion order.
    """

    def __init__(self, dim: int):
        self.dim = dim
        self.rows: list[Vec] = []
        self.pivots: list[int] = []

    def reduce(self, v: Sequence[Fraction]) -> Vec:
        w = list(v)
        for row, p in zip(self.rows, self.pivots):
            f = w[p]
            if f != 0:
                w = [x - f * y for x, y in zip(w, row)]
        return w

    def add(self, v: Sequence[Fraction]) -> bool:
        w = self.reduce(v)
        p = next((i for i, x in enumerate(w) if x != 0), None)
        if p is None:
            return False
        inv = ONE / w[p]
        if inv != 1:
            w = [x * inv for x in w]
        for i, row in enumerate(self.rows):
            f = row[p]
            if f != 0:
                self.rows[i] = [x - f * y for x, y in zip(row, w)]
        k = next((i for i, pp in enumerate(self.pivots) if pp > p), len(self.pivots))
        self.rows.insert(k, w)
        self.pivots.insert(k, p)
        return True

    def contains(self, v: Sequence[Fraction]) -> bool:
        return is_zero_vec(self.reduce(v))

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def basis(self) -> list[Vec]:
        return [list(r) for r in self.rows]


def echelon_basis(vectors: Sequence[Sequence[Fraction]], dim: int) -> list[Vec]:
    """Canonical (RREF) basis of the span of `vectors`."""
    ech = Echelon(dim)
    for v in vectors:
        ech.add(v)
    return ech.basis


def subspace_contains(basis: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> bool:
    """True iff v lies in the span of `basis` (the empty span is {0})."""
    for b in basis:
        if len(b) != len(v):
            raise ValueError("dimension mismatch")
    ech = Echelon(len(v))
    for b in basis:
        ech.add(b)
    return ech.contains(v)


def filtration_depth(
    filtration_bases: Sequence[Sequence[Sequence[Fraction]]], v: Sequence[Fraction]
) -> int | float:
    """Largest k (1-indexed) with v in span(filtration_bases[k-1]).

    The chain must be decreasing and end with the zero space; the zero
    vector has depth +infinity.
    """
    if is_zero_vec(v):
        return math.inf
    depth = 0
    for k, basis in enumerate(filtration_bases, start=1):
        if subspace_contains(basis, v):
            depth = k
        else:
            break
    return depth
