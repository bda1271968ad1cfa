"""Higher-derivation conditions, derivability decisions and the e-invariant.

A grading operator D is parametrized as D = D0 + N in the coordinates of
an adapted basis, where D0 multiplies degree-i vectors by i and N sends
each filtration term into the next one.  Every derivability condition
then becomes an affine linear system over the free entries of N, decided
exactly over the rationals.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import lie
from .lie import AdaptedBasis, Filtration, LieAlgebra
from .linalg import (
    Echelon,
    Matrix,
    Vec,
    ZERO,
    ONE,
    mat_inv,
    mat_mul,
    mat_vec,
    q,
    subspace_contains,
    zero_vec,
)

SparseVec = dict[int, Fraction]


class OperatorNotInDError(ValueError):
    """Raised when a matrix is not a grading operator of the algebra."""


@dataclass(frozen=True, order=True)
class DerivCondition:
    """A containment constraint: Delta_n D(F_p1, ..., F_pn) inside F_{level+1}."""

    wp: tuple[int, ...]
    level: int

    def __post_init__(self):
        if len(self.wp) < 2:
            raise ValueError("tuple must have length at least 2")
        if any(p < 1 for p in self.wp):
            raise ValueError("tuple entries must be positive")
        if self.wp[-2] > self.wp[-1]:
            raise ValueError("last two tuple entries must be nondecreasing")
        if sum(self.wp) >= self.level:
            raise ValueError("level must exceed the tuple sum")

    def __str__(self) -> str:
        return "(" + ",".join(str(p) for p in self.wp) + f"|{self.level})"


ConditionSet = frozenset  # of DerivCondition


@dataclass(frozen=True)
class GradingOperator:
    """A grading operator as a dim x dim rational matrix, original coordinates."""

    matrix: tuple[tuple[Fraction, ...], ...]

    @staticmethod
    def from_rows(rows: Matrix) -> "GradingOperator":
        return GradingOperator(tuple(tuple(q(x) for x in row) for row in rows))

    @property
    def rows(self) -> Matrix:
        return [list(r) for r in self.matrix]

    def apply(self, v: Sequence[Fraction]) -> Vec:
        return mat_vec(self.rows, v)


_COND_RE = re.compile(r"\(\s*(\d+(?:\s*,\s*\d+)+)\s*\|\s*(\d+)\s*\)")


def parse_condition_set(text: str) -> ConditionSet:
    """Parse condition-set syntax like "(1,1|3),(1,2|4)" (whitespace-free-form).

    A tuple whose last two entries are decreasing is normalized by
    swapping them (the constraint is alternating in those slots).
    """
    stripped = re.sub(r"\s+", "", text)
    if not stripped:
        return frozenset()
    matched = _COND_RE.findall(stripped)
    rebuilt = ",".join(f"({tup}|{lev})" for tup, lev in matched)
    if re.sub(r"\s+", "", rebuilt) != stripped:
        raise ValueError(f"malformed condition set: {text!r}")
    conditions = set()
    for tup_text, level_text in matched:
        wp = tuple(int(p) for p in tup_text.split(","))
        if len(wp) >= 2 and wp[-2] > wp[-1]:
            wp = wp[:-2] + (wp[-1], wp[-2])
        conditions.add(DerivCondition(wp, int(level_text)))
    return frozenset(conditions)


def format_condition_set(conditions: Iterable[DerivCondition]) -> str:
    return ",".join(str(c) for c in sorted(conditions))


def normalized_tuples(max_sum: int) -> list[tuple[int, ...]]:
    """All tuples with n >= 2, entries >= 1, sum <= max_sum and the last
    two entries nondecreasing, ordered by (sum, length, lexicographic)."""
    out: list[tuple[int, ...]] = []

    def compositions(total: int, parts: int) -> Iterable[tuple[int, ...]]:
        if parts == 1:
            yield (total,)
            return
        for first in range(1, total - parts + 2):
            for rest in compositions(total - first, parts - 1):
                yield (first,) + rest

    for total in range(2, max_sum + 1):
        for n in range(2, total + 1):
            for wp in compositions(total, n):
                if wp[-2] <= wp[-1]:
                    out.append(wp)
    return out


def enumerate_T(j: int, c: int) -> list[tuple[int, ...]]:
    """The normalized tuples with sum < j, for 3 <= j <= c."""
    if not 3 <= j <= c:
        raise ValueError("need 3 <= j <= c")
    return normalized_tuples(j - 1)


def enumerate_S(c: int) -> ConditionSet:
    """All conditions (wp | j) with 3 <= j <= c and wp in T_j; empty for c = 2."""
    if c < 2:
        raise ValueError("need c >= 2")
    conditions = set()
    for j in range(3, c + 1):
        for wp in enumerate_T(j, c):
            conditions.add(DerivCondition(wp, j))
    return frozenset(conditions)


def candidate_values(c: int) -> list[Fraction]:
    """{0} with all ratios i/j for 2 <= i < j <= c, sorted increasing."""
    if c < 2:
        raise ValueError("need c >= 2")
    values = {Fraction(0)}
    for j in range(3, c + 1):
        for i in range(2, j):
            values.add(Fraction(i, j))
    return sorted(values)


def r_condition_set(c: int, r: Fraction) -> ConditionSet:
    """Effective finite projection of {(wp|j) : |wp|/j > r} onto level <= c.

    For each normalized tuple only the strongest admissible level is
    kept: the largest j with j < |wp|/r, clamped at c; tuples for which
    no level exceeds |wp| are omitted.  r = 0 yields every tuple at
    level c.
    """
    if c < 2:
        raise ValueError("need c >= 2")
    r = q(r)
    if not 0 <= r < 1:
        raise ValueError("need 0 <= r < 1")
    conditions = set()
    for wp in normalized_tuples(c - 1):
        total = sum(wp)
        if r == 0:
            j_eff = c
        else:
            bound = Fraction(total, 1) / r
            j_max = int(bound) - 1 if bound.denominator == 1 else int(bound)
            j_eff = min(c, j_max)
        if j_eff > total:
            conditions.add(DerivCondition(wp, j_eff))
    return frozenset(conditions)


def delta_n(g: LieAlgebra, d: GradingOperator, xs: Sequence[Sequence[Fraction]]) -> Vec:
    """D[x1,...,xn] - sum_k [x1,...,D xk,...,xn] with left-nested brackets."""
    if len(xs) < 2:
        raise ValueError("need at least two vectors")
    if any(len(x) != g.dim for x in xs):
        raise ValueError("dimension mismatch")
    value = d.apply(lie.iterated_bracket(g, xs))
    for k in range(len(xs)):
        subst = [list(x) for x in xs]
        subst[k] = d.apply(xs[k])
        term = lie.iterated_bracket(g, subst)
        value = [a - b for a, b in zip(value, term)]
    return value


def is_grading_operator(g: LieAlgebra, f: Filtration, d: GradingOperator) -> bool:
    """D stabilizes every F_i and induces multiplication by i on F_i/F_{i+1}."""
    rows = d.rows
    if len(rows) != g.dim or any(len(r) != g.dim for r in rows):
        return False
    for i in range(1, f.nilpotency_class + 1):
        basis = f.basis(i)
        next_basis = f.basis(i + 1)
        for v in basis:
            dv = mat_vec(rows, v)
            if not subspace_contains(basis, dv):
                return False
            shifted = [x - i * y for x, y in zip(dv, v)]
            if not subspace_contains(next_basis, shifted):
                return False
    return True


def _require_grading_operator(g: LieAlgebra, f: Filtration, d: GradingOperator) -> None:
    if not is_grading_operator(g, f, d):
        raise OperatorNotInDError(
            "matrix does not stabilize the lower central series with the "
            "required action on its quotients"
        )


def grading_operator_space(
    g: LieAlgebra, f: Filtration, ab: AdaptedBasis
) -> tuple[GradingOperator, list[Matrix]]:
    """Affine parametrization of all grading operators of g.

    Returns the diagonal base point (multiplication by the adapted
    degree) and the elementary free directions at positions (a, b) with
    degree(a) >= degree(b) + 1, all in original coordinates.
    """
    p = ab.change_of_basis
    p_inv = mat_inv(p)
    degrees = ab.degrees
    n = g.dim
    diag = [[Fraction(degrees[i]) if i == j else ZERO for j in range(n)] for i in range(n)]
    base = GradingOperator.from_rows(mat_mul(mat_mul(p, diag), p_inv))
    directions: list[Matrix] = []
    for b in range(n):
        for a in range(n):
            if degrees[a] >= degrees[b] + 1:
                outer = [[p[i][a] * p_inv[b][j] for j in range(n)] for i in range(n)]
                directions.append(outer)
    return base, directions


class _Setup:
    """Cached adapted-coordinate data shared by the feasibility solver."""

    def __init__(self, g: LieAlgebra):
        self.g = g
        self.f = lie.lower_central_series(g)
        self.c = self.f.nilpotency_class
        self.ab = lie.adapted_basis(g, self.f)
        self.degrees = self.ab.degrees
        self.p = self.ab.change_of_basis
        self.p_inv = mat_inv(self.p)
        self.g_ad = lie.change_of_basis(g, [list(v) for v in self.ab.vectors])
        n = g.dim
        # row_table[i][j] = sparse [e_i, e_j] in adapted coordinates
        self.row_table: list[dict[int, SparseVec]] = [dict() for _ in range(n)]
        for (i, j), v in self.g_ad._sparse.items():
            self.row_table[i][j] = dict(v)
            self.row_table[j][i] = {k: -x for k, x in v.items()}
        # free positions (a, b): N e_b = e_a, enumerated column-major
        self.positions: list[tuple[int, int]] = []
        self.col_vars: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for b in range(n):
            for a in range(n):
                if self.degrees[a] >= self.degrees[b] + 1:
                    self.col_vars[b].append((len(self.positions), a))
                    self.positions.append((a, b))
        # first adapted index of each degree (degrees are nondecreasing)
        self.first_at_least = [
            next((i for i in range(n) if self.degrees[i] >= d), n) for d in range(self.c + 2)
        ]

    def sbr(self, i: int, v: SparseVec) -> SparseVec:
        """Sparse bracket [e_i, v] in adapted coordinates."""
        out: SparseVec = {}
        table = self.row_table[i]
        for j, coeff in v.items():
            bv = table.get(j)
            if bv is None:
                continue
            for k, s in bv.items():
                t = out.get(k, ZERO) + coeff * s
                if t:
                    out[k] = t
                else:
                    out.pop(k, None)
        return out

    def sbr_vec(self, x: SparseVec, v: SparseVec) -> SparseVec:
        """Sparse bracket [x, v] for a general sparse x."""
        out: SparseVec = {}
        for i, ci in x.items():
            for k, s in self.sbr(i, v).items():
                t = out.get(k, ZERO) + ci * s
                if t:
                    out[k] = t
                else:
                    out.pop(k, None)
        return out

    def to_original(self, d_ad: Matrix) -> GradingOperator:
        return GradingOperator.from_rows(mat_mul(mat_mul(self.p, d_ad), self.p_inv))

    def to_adapted_operator(self, d: GradingOperator) -> Matrix:
        return mat_mul(mat_mul(self.p_inv, d.rows), self.p)


class _AugmentedEchelon:
    """Incremental RREF of an affine system with early infeasibility."""

    def __init__(self, nvars: int):
        self.nvars = nvars
        self.ech = Echelon(nvars + 1)
        self.infeasible = False

    def add(self, row: Vec, rhs: Fraction) -> None:
        if self.ech.add(row + [rhs]) and self.ech.pivots[-1] == self.nvars:
            self.infeasible = True

    def particular(self) -> Vec | None:
        if self.infeasible:
            return None
        x = zero_vec(self.nvars)
        for row, pivot in zip(self.ech.rows, self.ech.pivots):
            x[pivot] = row[self.nvars]
        return x


def _clamp_conditions(conditions: Iterable[DerivCondition], c: int) -> list[DerivCondition]:
    """Project conditions to nilpotency class c and drop trivial ones."""
    clamped = set()
    for cond in conditions:
        level = min(cond.level, c)
        if level > sum(cond.wp):
            clamped.add(DerivCondition(cond.wp, level))
    return sorted(clamped)


def _condition_rows(setup: _Setup, cond: DerivCondition, system: _AugmentedEchelon) -> None:
    """Stream the affine rows of one condition into the system.

    Works entirely in adapted coordinates where D0 is diagonal and each
    free direction is an elementary matrix, recursing over tuple slots
    from the right so that suffix brackets and replacement values are
    shared between tuples.
    """
    n = len(cond.wp)
    dim = setup.g.dim
    degrees = setup.degrees
    col_vars = setup.col_vars
    sbr = setup.sbr
    max_coord = setup.first_at_least[min(cond.level + 1, setup.c + 1)]
    nvars = len(setup.positions)
    starts = [setup.first_at_least[p] for p in cond.wp]

    def recurse(slot: int, suffix: SparseVec, repl: dict[int, SparseVec], degsum: int, last_b: int):
        if slot == 0:
            _emit_rows(suffix, repl, degsum)
            return
        lo = starts[slot - 1]
        for b in range(lo, dim):
            if slot == n - 1 and b >= last_b:
                continue
            new_suffix = sbr(b, suffix) if suffix else {}
            new_repl: dict[int, SparseVec] = {}
            for var, w in repl.items():
                bw = sbr(b, w)
                if bw:
                    new_repl[var] = bw
            for var, a in col_vars[b]:
                w = sbr(a, suffix) if suffix else {}
                if w:
                    prev = new_repl.get(var)
                    if prev is None:
                        new_repl[var] = w
                    else:
                        merged = dict(prev)
                        for k, x in w.items():
                            t = merged.get(k, ZERO) + x
                            if t:
                                merged[k] = t
                            else:
                                merged.pop(k, None)
                        if merged:
                            new_repl[var] = merged
                        else:
                            new_repl.pop(var, None)
            if not new_suffix and not new_repl:
                continue
            recurse(slot - 1, new_suffix, new_repl, degsum + degrees[b], b)

    def _emit_rows(value: SparseVec, repl: dict[int, SparseVec], degsum: int):
        # affine value: (D0 - degsum) v + sum_m x_m (v_{col(m)} e_{row(m)}) - repl
        rows: dict[int, SparseVec] = {}
        rhs: SparseVec = {}
        for coord, val in value.items():
            if coord < max_coord:
                diff = (degrees[coord] - degsum) * val
                if diff:
                    rhs[coord] = -diff
            for var, a in col_vars[coord]:
                if a < max_coord:
                    entry = rows.setdefault(a, {})
                    entry[var] = entry.get(var, ZERO) + val
        for var, w in repl.items():
            for coord, val in w.items():
                if coord < max_coord and val:
                    entry = rows.setdefault(coord, {})
                    t = entry.get(var, ZERO) - val
                    if t:
                        entry[var] = t
                    else:
                        entry.pop(var, None)
        for coord in set(rows) | set(rhs):
            coeffs = rows.get(coord, {})
            b = rhs.get(coord, ZERO)
            if not coeffs and b == 0:
                continue
            dense = zero_vec(nvars)
            for var, val in coeffs.items():
                dense[var] = val
            system.add(dense, b)
            if system.infeasible:
                return

    # outermost slot is the last one so suffixes can be built right-to-left;
    # substituting into that slot replaces it by a single basis vector
    for b_last in range(starts[n - 1], dim):
        if system.infeasible:
            return
        seed_repl: dict[int, SparseVec] = {var: {a: ONE} for var, a in col_vars[b_last]}
        recurse(n - 1, {b_last: ONE}, seed_repl, degrees[b_last], b_last)


def _feasibility(setup: _Setup, conditions: Iterable[DerivCondition]) -> GradingOperator | None:
    clamped = _clamp_conditions(conditions, setup.c)

    def cost(cond: DerivCondition) -> tuple:
        est = 1
        for p in cond.wp:
            est *= setup.g.dim - setup.first_at_least[p]
        return (len(cond.wp), est, cond)

    system = _AugmentedEchelon(len(setup.positions))
    for cond in sorted(clamped, key=cost):
        _condition_rows(setup, cond, system)
        if system.infeasible:
            return None
    x = system.particular()
    assert x is not None
    n = setup.g.dim
    d_ad = [[Fraction(setup.degrees[i]) if i == j else ZERO for j in range(n)] for i in range(n)]
    for var, (a, b) in enumerate(setup.positions):
        d_ad[a][b] += x[var]
    return setup.to_original(d_ad)


def is_A_derivable(g: LieAlgebra, conditions: Iterable[DerivCondition]) -> GradingOperator | None:
    """Witness grading operator satisfying every condition, or None.

    Conditions are clamped to the nilpotency class first; the witness is
    the deterministic particular solution with all free coefficients
    zero.
    """
    return _feasibility(_Setup(g), conditions)


def e_of_operator(g: LieAlgebra, d: GradingOperator) -> Fraction:
    """Least r for which d satisfies every condition of ratio above r.

    Equals the maximum of |wp| / depth(wp) over normalized tuples, where
    depth(wp) is the filtration depth of the span of all Delta values on
    adapted tuples of degrees >= wp; tuples with zero span are skipped.
    """
    setup = _Setup(g)
    _require_grading_operator(g, setup.f, d)
    d_ad = setup.to_adapted_operator(d)
    dim = g.dim
    d_cols: list[SparseVec] = [
        {i: d_ad[i][b] for i in range(dim) if d_ad[i][b]} for b in range(dim)
    ]
    best = Fraction(0)
    for wp in normalized_tuples(setup.c - 1):
        n = len(wp)
        starts = [setup.first_at_least[p] for p in wp]
        total = sum(wp)
        min_depth: int | None = None

        def recurse(slot: int, suffix: SparseVec, dsub: SparseVec, last_b: int):
            nonlocal min_depth
            if min_depth == total + 1:
                return
            lo = starts[slot - 1]
            for b in range(lo, dim):
                if slot == n - 1 and b >= last_b:
                    continue
                new_suffix = setup.sbr(b, suffix) if suffix else {}
                new_dsub = setup.sbr(b, dsub) if dsub else {}
                w = setup.sbr_vec(d_cols[b], suffix) if suffix else {}
                for k, x in w.items():
                    t = new_dsub.get(k, ZERO) + x
                    if t:
                        new_dsub[k] = t
                    else:
                        new_dsub.pop(k, None)
                if not new_suffix and not new_dsub:
                    continue
                if slot == 1:
                    delta: SparseVec = {}
                    for coord, val in new_suffix.items():
                        dv = d_cols[coord]
                        for k, x in dv.items():
                            t = delta.get(k, ZERO) + val * x
                            if t:
                                delta[k] = t
                            else:
                                delta.pop(k, None)
                    for k, x in new_dsub.items():
                        t = delta.get(k, ZERO) - x
                        if t:
                            delta[k] = t
                        else:
                            delta.pop(k, None)
                    if delta:
                        depth = min(setup.degrees[k] for k in delta)
                        if min_depth is None or depth < min_depth:
                            min_depth = depth
                            if min_depth == total + 1:
                                return
                else:
                    recurse(slot - 1, new_suffix, new_dsub, b)

        for b_last in range(starts[n - 1], dim):
            recurse(n - 1, {b_last: ONE}, dict(d_cols[b_last]), b_last)
            if min_depth == total + 1:
                break
        if min_depth is not None:
            best = max(best, Fraction(total, min_depth))
    return best


@dataclass(frozen=True)
class EInvariantResult:
    e: Fraction
    witness: GradingOperator


def e_invariant(g: LieAlgebra) -> EInvariantResult:
    """Smallest r in the candidate set whose condition set is feasible.

    Feasibility is monotone in r, so the scan stops at the first
    success; the witness is the deterministic particular solution.
    """
    setup = _Setup(g)
    if setup.c < 2:
        witness = _feasibility(setup, ())
        assert witness is not None
        return EInvariantResult(Fraction(0), witness)
    for r in candidate_values(setup.c):
        witness = _feasibility(setup, r_condition_set(setup.c, r))
        if witness is not None:
            return EInvariantResult(r, witness)
    raise AssertionError("empty condition set at the top candidate must be feasible")
