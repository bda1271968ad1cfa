"""Lie algebras from rational structure constants.

An algebra is given by the brackets of basis pairs [e_i, e_j] for i < j;
antisymmetry fills in the rest and unlisted pairs are zero.  The Jacobi
identity is checked explicitly (`check_jacobi`), never assumed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .linalg import (
    Echelon,
    Matrix,
    Vec,
    columns_matrix,
    is_zero_vec,
    mat_inv,
    mat_vec,
    q,
    unit_vec,
    vec_add,
    vec_scale,
    zero_vec,
)


class AlgebraFormatError(ValueError):
    """Raised on malformed or inconsistent algebra definition text."""


class NotNilpotentError(ValueError):
    """Raised when the lower central series does not reach zero."""


class LieAlgebra:
    """Finite-dimensional Lie algebra with rational structure constants.

    Brackets are stored only for i < j; values are immutable after
    construction and instances are safe to share between threads.
    """

    def __init__(
        self,
        dim: int,
        brackets: dict[tuple[int, int], Sequence[Fraction]],
        labels: Sequence[str] | None = None,
    ):
        if labels is None:
            labels = tuple(f"e{k}" for k in range(1, dim + 1))
        if len(labels) != dim:
            raise ValueError("label count must equal dim")
        clean: dict[tuple[int, int], tuple[Fraction, ...]] = {}
        for (i, j), value in brackets.items():
            if not (0 <= i < j < dim):
                raise ValueError(f"bracket pair ({i},{j}) must satisfy 0 <= i < j < dim")
            v = tuple(q(x) for x in value)
            if len(v) != dim:
                raise ValueError("bracket value has wrong length")
            if any(x != 0 for x in v):
                clean[(i, j)] = v
        self.dim = dim
        self.labels = tuple(labels)
        self.brackets = clean
        self._lcs_cache: Filtration | None = None
        self._sparse = {
            (i, j): {k: x for k, x in enumerate(v) if x != 0} for (i, j), v in clean.items()
        }

    def bracket_basis(self, i: int, j: int) -> Vec:
        """[e_i, e_j] as a dense vector, any index order."""
        if i == j:
            return zero_vec(self.dim)
        if i < j:
            v = self.brackets.get((i, j))
            return list(v) if v else zero_vec(self.dim)
        v = self.brackets.get((j, i))
        return [-x for x in v] if v else zero_vec(self.dim)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LieAlgebra)
            and self.dim == other.dim
            and self.brackets == other.brackets
        )

    def __repr__(self) -> str:
        return f"LieAlgebra(dim={self.dim}, nonzero_brackets={len(self.brackets)})"


@dataclass(frozen=True)
class Filtration:
    """Lower central series F_1 ⊇ F_2 ⊇ ... ⊇ F_{c+1} = 0 as echelon bases."""

    subspaces: tuple[tuple[tuple[Fraction, ...], ...], ...]
    nilpotency_class: int

    def basis(self, k: int) -> list[Vec]:
        """Echelon basis of F_k (1-indexed); empty list for k > c."""
        if k > len(self.subspaces):
            return []
        return [list(v) for v in self.subspaces[k - 1]]

    @property
    def quotient_dims(self) -> tuple[int, ...]:
        dims = [len(s) for s in self.subspaces]
        return tuple(dims[k] - dims[k + 1] for k in range(self.nilpotency_class))


@dataclass(frozen=True)
class AdaptedBasis:
    """Basis adapted to a filtration: degree-≥i vectors span F_i."""

    vectors: tuple[tuple[Fraction, ...], ...]
    degrees: tuple[int, ...]

    @property
    def change_of_basis(self) -> Matrix:
        """New basis vectors as the columns, in original coordinates."""
        return columns_matrix([list(v) for v in self.vectors])


def bracket(g: LieAlgebra, x: Sequence[Fraction], y: Sequence[Fraction]) -> Vec:
    """Bilinear antisymmetric extension of the basis brackets."""
    if len(x) != g.dim or len(y) != g.dim:
        raise ValueError("dimension mismatch")
    out = zero_vec(g.dim)
    for (i, j), v in g.brackets.items():
        c = x[i] * y[j] - x[j] * y[i]
        if c:
            out = [o + c * s for o, s in zip(out, v)]
    return out


def iterated_bracket(g: LieAlgebra, xs: Sequence[Sequence[Fraction]]) -> Vec:
    """Left-nested bracket [x_1, [x_2, ..., [x_{n-1}, x_n]...]]."""
    if not xs:
        raise ValueError("need at least one vector")
    acc = list(xs[-1])
    for x in reversed(xs[:-1]):
        acc = bracket(g, x, acc)
    return acc


def check_jacobi(g: LieAlgebra) -> list[tuple[int, int, int, Vec]]:
    """All basis triples i<j<k violating the Jacobi identity, with values."""
    violations = []
    for i in range(g.dim):
        ei = unit_vec(g.dim, i)
        for j in range(i + 1, g.dim):
            ej = unit_vec(g.dim, j)
            bij = g.bracket_basis(i, j)
            for k in range(j + 1, g.dim):
                ek = unit_vec(g.dim, k)
                total = bracket(g, ei, g.bracket_basis(j, k))
                total = vec_add(total, bracket(g, ej, g.bracket_basis(k, i)))
                total = vec_add(total, bracket(g, ek, bij))
                if not is_zero_vec(total):
                    violations.append((i, j, k, total))
    return violations


def lower_central_series(g: LieAlgebra) -> Filtration:
    """F_1 = g, F_{k+1} = span[g, F_k]; raises NotNilpotentError if it stalls."""
    if g._lcs_cache is not None:
        return g._lcs_cache
    chain: list[list[Vec]] = [[unit_vec(g.dim, i) for i in range(g.dim)]]
    while chain[-1]:
        prev = chain[-1]
        ech = Echelon(g.dim)
        for i in range(g.dim):
            ei = unit_vec(g.dim, i)
            for v in prev:
                ech.add(bracket(g, ei, v))
        nxt = ech.basis
        if len(nxt) == len(prev):
            raise NotNilpotentError("lower central series does not reach zero")
        chain.append(nxt)
        if len(chain) > g.dim + 1:
            raise NotNilpotentError("lower central series does not reach zero")
    filtration = Filtration(
        subspaces=tuple(tuple(tuple(v) for v in basis) for basis in chain),
        nilpotency_class=len(chain) - 1,
    )
    g._lcs_cache = filtration
    return filtration


def adapted_basis(g: LieAlgebra, f: Filtration) -> AdaptedBasis:
    """Deterministic adapted basis, preferring original basis vectors.

    Extends an echelon basis of F_c upward to F_1; at each level the
    original basis vectors lying in F_i are tried first, in index order,
    before falling back to the echelon basis of F_i.
    """
    c = f.nilpotency_class
    ech = Echelon(g.dim)
    chosen: list[tuple[int, Vec]] = []
    for level in range(c, 0, -1):
        level_basis = f.basis(level)
        target = len(level_basis)
        level_ech = Echelon(g.dim)
        for v in level_basis:
            level_ech.add(v)
        candidates = [
            unit_vec(g.dim, i) for i in range(g.dim) if level_ech.contains(unit_vec(g.dim, i))
        ]
        candidates += level_basis
        for v in candidates:
            if ech.rank == target:
                break
            if ech.add(v):
                chosen.append((level, v))
        if ech.rank != target:
            raise RuntimeError("failed to complete adapted basis (internal error)")
    chosen.sort(key=lambda t: t[0])
    return AdaptedBasis(
        vectors=tuple(tuple(v) for _, v in chosen),
        degrees=tuple(d for d, _ in chosen),
    )


def change_of_basis(
    g: LieAlgebra, new_vectors: Sequence[Sequence[Fraction]], labels: Sequence[str] | None = None
) -> LieAlgebra:
    """Structure constants of g in the basis given by `new_vectors`."""
    if len(new_vectors) != g.dim:
        raise ValueError("need dim basis vectors")
    p = columns_matrix(new_vectors)
    p_inv = mat_inv(p)
    brackets: dict[tuple[int, int], Vec] = {}
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            w = bracket(g, list(new_vectors[i]), list(new_vectors[j]))
            brackets[(i, j)] = mat_vec(p_inv, w)
    return LieAlgebra(g.dim, brackets, labels)


_TERM_RE = re.compile(
    r"\s*(?P<sign>[+-])?\s*(?:(?P<coeff>\d+(?:/\d+)?)\s*\*?\s*)?(?P<label>[A-Za-z_]\w*)\s*"
)


def _parse_terms(rhs: str, label_index: dict[str, int], dim: int, where: str) -> Vec:
    rhs = rhs.strip()
    out = zero_vec(dim)
    if rhs == "0":
        return out
    pos = 0
    first = True
    while pos < len(rhs):
        m = _TERM_RE.match(rhs, pos)
        if not m or m.end() == pos:
            raise AlgebraFormatError(f"malformed term in {where}: {rhs[pos:]!r}")
        sign, coeff, label = m.group("sign"), m.group("coeff"), m.group("label")
        if not first and sign is None:
            raise AlgebraFormatError(f"missing +/- between terms in {where}")
        try:
            c = Fraction(coeff) if coeff else Fraction(1)
        except (ValueError, ZeroDivisionError) as exc:
            raise AlgebraFormatError(f"malformed rational {coeff!r} in {where}") from exc
        if sign == "-":
            c = -c
        if label not in label_index:
            raise AlgebraFormatError(f"unknown basis label {label!r} in {where}")
        out[label_index[label]] += c
        pos = m.end()
        first = False
    return out


def parse_algebra(text: str) -> LieAlgebra:
    """Parse the line-oriented algebra definition format.

    Grammar (one declaration per line, '#' starts a comment)::

        dim N
        basis e1 e2 ... eN          # optional, defaults to e1..eN
        bracket ei ej = c1 ek [+ c2 el ...]

    Coefficients are rational literals (1, -1, 1/2, -3/4); a coefficient
    of 1 may be omitted.  Unlisted brackets are zero and exactly one
    declaration per unordered pair is allowed.
    """
    dim: int | None = None
    labels: list[str] | None = None
    label_index: dict[str, int] = {}
    pending: list[tuple[str, str, str, str]] = []
    declared: set[tuple[int, int]] = set()
    brackets: dict[tuple[int, int], Vec] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"line {lineno}"
        parts = line.split(None, 1)
        keyword = parts[0]
        rest = parts[1] if len(parts) > 1 else ""
        if keyword == "dim":
            if dim is not None:
                raise AlgebraFormatError(f"duplicate dim declaration ({where})")
            try:
                dim = int(rest.strip())
            except ValueError as exc:
                raise AlgebraFormatError(f"malformed dim ({where})") from exc
            if dim <= 0:
                raise AlgebraFormatError(f"dim must be positive ({where})")
        elif keyword == "basis":
            if dim is None:
                raise AlgebraFormatError(f"basis before dim ({where})")
            if labels is not None:
                raise AlgebraFormatError(f"duplicate basis declaration ({where})")
            labels = rest.split()
            if len(labels) != dim:
                raise AlgebraFormatError(f"basis must list exactly {dim} labels ({where})")
            if len(set(labels)) != dim:
                raise AlgebraFormatError(f"duplicate basis label ({where})")
        elif keyword == "bracket":
            if dim is None:
                raise AlgebraFormatError(f"bracket before dim ({where})")
            m = re.match(r"(\S+)\s+(\S+)\s*=\s*(.+)$", rest)
            if not m:
                raise AlgebraFormatError(f"malformed bracket declaration ({where})")
            pending.append((m.group(1), m.group(2), m.group(3), where))
        else:
            raise AlgebraFormatError(f"unknown keyword {keyword!r} ({where})")

    if dim is None:
        raise AlgebraFormatError("missing dim declaration")
    if labels is None:
        labels = [f"e{k}" for k in range(1, dim + 1)]
    label_index = {lab: i for i, lab in enumerate(labels)}

    for lab_i, lab_j, rhs, where in pending:
        if lab_i not in label_index or lab_j not in label_index:
            unknown = lab_i if lab_i not in label_index else lab_j
            raise AlgebraFormatError(f"unknown basis label {unknown!r} ({where})")
        i, j = label_index[lab_i], label_index[lab_j]
        if i == j:
            raise AlgebraFormatError(f"bracket of {lab_i!r} with itself ({where})")
        key = (min(i, j), max(i, j))
        if key in declared:
            raise AlgebraFormatError(
                f"duplicate declaration for pair ({lab_i}, {lab_j}) ({where}); "
                "each unordered pair may be declared once"
            )
        declared.add(key)
        value = _parse_terms(rhs, label_index, dim, where)
        if i > j:
            value = vec_scale(Fraction(-1), value)
        brackets[key] = value

    return LieAlgebra(dim, brackets, labels)


def serialize_algebra(g: LieAlgebra, degrees: Sequence[int] | None = None) -> str:
    """Algebra definition text that parse_algebra maps back to g."""
    lines = []
    if degrees is not None:
        lines.append("# degrees: " + " ".join(str(d) for d in degrees))
    lines.append(f"dim {g.dim}")
    lines.append("basis " + " ".join(g.labels))
    for (i, j), v in sorted(g.brackets.items()):
        terms = []
        for k, c in enumerate(v):
            if c == 0:
                continue
            mag = f"{abs(c)} " if abs(c) != 1 else ""
            if not terms:
                sign = "-" if c < 0 else ""
            else:
                sign = "- " if c < 0 else "+ "
            terms.append(f"{sign}{mag}{g.labels[k]}")
        lines.append(f"bracket {g.labels[i]} {g.labels[j]} = " + " ".join(terms))
    return "\n".join(lines) + "\n"
