"""Linear gradings from grading operators and the associated graded algebra.

The layers of the grading are exact nullspaces of D - i, cross-checked
against the lower central series; the graded bracket keeps, for inputs of
degrees i and j, only the degree-(i+j) component of the original bracket.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import lie
from .derivability import GradingOperator, OperatorNotInDError, is_grading_operator
from .lie import LieAlgebra
from .linalg import (
    Echelon,
    Vec,
    ZERO,
    columns_matrix,
    echelon_basis,
    mat_inv,
    mat_vec,
    nullspace,
    q,
)


@dataclass(frozen=True)
class LinearGrading:
    """Layers v_1, ..., v_c in original coordinates; their direct sum is
    the whole space and the tails of the sum recover the filtration."""

    layers: tuple[tuple[tuple[Fraction, ...], ...], ...]

    def layer(self, i: int) -> list[Vec]:
        return [list(v) for v in self.layers[i - 1]]

    @property
    def degrees(self) -> tuple[int, ...]:
        """Layer degree of each eigenbasis vector, layer-major order."""
        out: list[int] = []
        for i, layer in enumerate(self.layers, start=1):
            out.extend([i] * len(layer))
        return tuple(out)

    @property
    def eigenbasis(self) -> list[Vec]:
        """Concatenated layer bases (the coordinates used downstream)."""
        return [list(v) for layer in self.layers for v in layer]


@dataclass(frozen=True)
class CarnotAlgebra:
    """The associated Carnot-graded algebra, in the grading eigenbasis."""

    algebra: LieAlgebra
    degrees: tuple[int, ...]


def grading_from_operator(g: LieAlgebra, d: GradingOperator) -> LinearGrading:
    """Layers ker(D - i) for i = 1..c, verified against the filtration."""
    f = lie.lower_central_series(g)
    if not is_grading_operator(g, f, d):
        raise OperatorNotInDError(
            "matrix is not a grading operator (filtration invariants fail)"
        )
    c = f.nilpotency_class
    rows = d.rows
    layers: list[list[Vec]] = []
    for i in range(1, c + 1):
        shifted = [[rows[a][b] - (q(i) if a == b else ZERO) for b in range(g.dim)] for a in range(g.dim)]
        layers.append(nullspace(shifted))
    if sum(len(layer) for layer in layers) != g.dim:
        raise OperatorNotInDError("eigenspaces of 1..c do not fill the space")
    for i in range(1, c + 1):
        tail = [v for layer in layers[i - 1 :] for v in layer]
        if echelon_basis(tail, g.dim) != f.basis(i):
            raise OperatorNotInDError("layer tails do not match the filtration")
    return LinearGrading(tuple(tuple(tuple(v) for v in layer) for layer in layers))


def carnot_algebra(g: LieAlgebra, d: GradingOperator) -> CarnotAlgebra:
    """Structure constants of the graded bracket in the eigenbasis.

    Basis labels are "v{i}_{k}" for the k-th vector of layer i; the
    output is checked to be a Lie algebra, to respect the grading and to
    be generated by the degree-1 layer.
    """
    grading = grading_from_operator(g, d)
    basis = grading.eigenbasis
    degrees = grading.degrees
    labels = []
    for i, layer in enumerate(grading.layers, start=1):
        labels.extend(f"v{i}_{k}" for k in range(1, len(layer) + 1))
    p = columns_matrix(basis)
    p_inv = mat_inv(p)
    n = g.dim
    brackets: dict[tuple[int, int], Vec] = {}
    for a in range(n):
        for b in range(a + 1, n):
            target = degrees[a] + degrees[b]
            w = lie.bracket(g, basis[a], basis[b])
            coords = mat_vec(p_inv, w)
            graded = [c if degrees[k] == target else ZERO for k, c in enumerate(coords)]
            brackets[(a, b)] = graded
    algebra = LieAlgebra(n, brackets, labels)
    if lie.check_jacobi(algebra):
        raise AssertionError("graded bracket failed the Jacobi identity")
    _assert_graded(algebra, degrees)
    _assert_layer_one_generates(algebra, degrees)
    return CarnotAlgebra(algebra, tuple(degrees))


def _assert_graded(algebra: LieAlgebra, degrees: Sequence[int]) -> None:
    for (a, b), v in algebra.brackets.items():
        target = degrees[a] + degrees[b]
        for k, c in enumerate(v):
            if c != 0 and degrees[k] != target:
                raise AssertionError("graded bracket has an off-degree component")


def _assert_layer_one_generates(algebra: LieAlgebra, degrees: Sequence[int]) -> None:
    n = algebra.dim
    ech = Echelon(n)
    generated = []
    for i in range(n):
        if degrees[i] == 1:
            v = [ZERO] * n
            v[i] = Fraction(1)
            ech.add(v)
            generated.append(v)
    frontier = list(generated)
    while frontier:
        new_frontier = []
        for v in frontier:
            for i in range(n):
                base = [ZERO] * n
                base[i] = Fraction(1)
                w = lie.bracket(algebra, base, v)
                if ech.add(w):
                    new_frontier.append(w)
        frontier = new_frontier
    if ech.rank != n:
        raise AssertionError("degree-1 layer does not generate the graded algebra")


def carnot_pair(g: LieAlgebra, d: GradingOperator) -> tuple[LieAlgebra, CarnotAlgebra]:
    """(g expressed in the grading eigenbasis, associated Carnot algebra).

    Both algebras share the same coordinates, so their group laws can be
    compared pointwise.
    """
    grading = grading_from_operator(g, d)
    ca = carnot_algebra(g, d)
    g_eig = lie.change_of_basis(g, grading.eigenbasis, ca.algebra.labels)
    return g_eig, ca


def verify_grading(
    g: LieAlgebra, degrees: Sequence[int]
) -> tuple[bool, list[tuple[int, int]]]:
    """Check that assigning degrees[i] to e_i defines a Lie algebra grading.

    Every nonzero bracket [e_i, e_j] must lie in the span of basis
    vectors of degree exactly degrees[i] + degrees[j]; returns the truth
    value and the offending pairs.
    """
    if len(degrees) != g.dim:
        raise ValueError("need one degree per basis vector")
    if any(d < 1 for d in degrees):
        raise ValueError("degrees must be positive")
    violations = []
    for (i, j), v in sorted(g.brackets.items()):
        target = degrees[i] + degrees[j]
        if any(c != 0 and degrees[k] != target for k, c in enumerate(v)):
            violations.append((i, j))
    return not violations, violations


def serialize_carnot(ca: CarnotAlgebra) -> str:
    """Definition text of the graded algebra plus a degrees comment."""
    return lie.serialize_algebra(ca.algebra, degrees=ca.degrees)
