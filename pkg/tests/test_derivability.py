"""Derivability conditions, the affine solver and the e-invariant."""

from __future__ import annotations

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilgrade import catalog
from nilgrade.derivability import (
    DerivCondition,
    GradingOperator,
    OperatorNotInDError,
    candidate_values,
    delta_n,
    e_invariant,
    e_of_operator,
    enumerate_S,
    enumerate_T,
    grading_operator_space,
    is_A_derivable,
    is_grading_operator,
    parse_condition_set,
    r_condition_set,
)
from nilgrade.lie import adapted_basis, iterated_bracket, lower_central_series
from nilgrade.linalg import mat_add, mat_vec, unit_vec

coords = st.fractions(min_value=-3, max_value=3, max_denominator=4)


def diag_operator(degrees) -> GradingOperator:
    n = len(degrees)
    return GradingOperator.from_rows(
        [[F(degrees[i]) if i == j else F(0) for j in range(n)] for i in range(n)]
    )


# --- enumerations


def test_enumerate_T_quoted_values():
    assert enumerate_T(3, 5) == [(1, 1)]
    assert enumerate_T(4, 5) == [(1, 1), (1, 2), (1, 1, 1)]
    assert enumerate_T(5, 5) == [
        (1, 1),
        (1, 2),
        (1, 1, 1),
        (1, 3),
        (2, 2),
        (1, 1, 2),
        (2, 1, 1),
        (1, 1, 1, 1),
    ]


def test_enumerate_T_requires_range():
    with pytest.raises(ValueError):
        enumerate_T(2, 5)
    with pytest.raises(ValueError):
        enumerate_T(6, 5)


def test_enumerate_S():
    assert enumerate_S(2) == frozenset()
    assert enumerate_S(3) == parse_condition_set("(1,1|3)")
    assert enumerate_S(4) == parse_condition_set("(1,1|3),(1,1|4),(1,2|4),(1,1,1|4)")


def test_candidate_values():
    assert candidate_values(2) == [F(0)]
    assert candidate_values(4) == [F(0), F(1, 2), F(2, 3), F(3, 4)]
    assert candidate_values(5) == [
        F(0),
        F(2, 5),
        F(1, 2),
        F(3, 5),
        F(2, 3),
        F(3, 4),
        F(4, 5),
    ]


def test_r_condition_set_examples():
    assert r_condition_set(4, F(0)) == parse_condition_set("(1,1|4),(1,2|4),(1,1,1|4)")
    assert r_condition_set(4, F(1, 2)) == parse_condition_set("(1,1|3),(1,2|4),(1,1,1|4)")
    assert r_condition_set(4, F(3, 4)) == frozenset()


def test_condition_parsing():
    cs = parse_condition_set(" (1, 1 | 3) , (1,2|4) ")
    assert cs == frozenset({DerivCondition((1, 1), 3), DerivCondition((1, 2), 4)})
    # last two entries normalized by alternation
    assert parse_condition_set("(2,1|4)") == parse_condition_set("(1,2|4)")
    with pytest.raises(ValueError):
        parse_condition_set("(1|3)")
    with pytest.raises(ValueError):
        parse_condition_set("(1,2|4) junk")


def test_condition_validation():
    with pytest.raises(ValueError):
        DerivCondition((1, 2), 3)  # sum not below level
    with pytest.raises(ValueError):
        DerivCondition((2, 1), 4)  # not normalized
    with pytest.raises(ValueError):
        DerivCondition((1,), 3)


# --- delta_n


def test_delta_n_vanishes_for_derivation():
    h = catalog.get("heisenberg").algebra
    d = diag_operator([1, 1, 2])
    for i in range(3):
        for j in range(3):
            value = delta_n(h, d, [unit_vec(3, i), unit_vec(3, j)])
            assert value == [F(0)] * 3


def test_delta_n_g6_11_example():
    g = catalog.get("g6_11").algebra
    d = diag_operator([1, 1, 1, 2, 3, 4])
    value = delta_n(g, d, [unit_vec(6, 1), unit_vec(6, 2)])
    assert value == [c * 2 for c in unit_vec(6, 5)]


def test_delta_n_degenerate_zero_bracket():
    g = catalog.get("g6_11").algebra
    d = diag_operator([1, 1, 1, 2, 3, 4])
    # [e4, e5] = 0 and both are scaled by the same factor under lambda*id
    lam = GradingOperator.from_rows([[F(3) if i == j else F(0) for j in range(6)] for i in range(6)])
    assert delta_n(g, lam, [unit_vec(6, 3), unit_vec(6, 3)]) == [F(0)] * 6
    assert iterated_bracket(g, [unit_vec(6, 4), unit_vec(6, 5)]) == [F(0)] * 6


@settings(max_examples=25, deadline=None)
@given(st.lists(coords, min_size=6, max_size=6), st.lists(coords, min_size=6, max_size=6))
def test_delta_n_linear_in_operator(x, y):
    g = catalog.get("g6_13").algebra
    f = lower_central_series(g)
    ab = adapted_basis(g, f)
    base, dirs = grading_operator_space(g, f, ab)
    d1 = base
    d2 = GradingOperator.from_rows(mat_add(base.rows, dirs[0]))
    summed = GradingOperator.from_rows(mat_add(d1.rows, d2.rows))
    lhs = delta_n(g, summed, [x, y])
    rhs = [a + b for a, b in zip(delta_n(g, d1, [x, y]), delta_n(g, d2, [x, y]))]
    assert lhs == rhs


@settings(max_examples=25, deadline=None)
@given(
    st.lists(coords, min_size=6, max_size=6),
    st.lists(coords, min_size=6, max_size=6),
    st.lists(coords, min_size=6, max_size=6),
)
def test_delta_n_alternating_last_two(x, y, z):
    g = catalog.get("g6_19").algebra
    d = diag_operator([1, 1, 2, 3, 4, 5])
    lhs = delta_n(g, d, [x, y, z])
    rhs = delta_n(g, d, [x, z, y])
    assert lhs == [-c for c in rhs]
    assert delta_n(g, d, [x, y, y]) == [F(0)] * 6


# --- grading operator space


def test_grading_operator_space_abelian():
    g = catalog.get("abelian(2)").algebra
    f = lower_central_series(g)
    base, dirs = grading_operator_space(g, f, adapted_basis(g, f))
    assert base.rows == [[F(1), F(0)], [F(0), F(1)]]
    assert dirs == []


def test_grading_operator_space_heisenberg():
    g = catalog.get("heisenberg").algebra
    f = lower_central_series(g)
    base, dirs = grading_operator_space(g, f, adapted_basis(g, f))
    assert base.rows == diag_operator([1, 1, 2]).rows
    assert len(dirs) == 2
    images = set()
    for m in dirs:
        assert mat_vec(m, unit_vec(3, 2)) == [F(0)] * 3
        for b in range(2):
            img = mat_vec(m, unit_vec(3, b))
            if any(c != 0 for c in img):
                assert img == unit_vec(3, 2)
                images.add(b)
    assert images == {0, 1}


def test_grading_operator_space_count_g6_11():
    g = catalog.get("g6_11").algebra
    f = lower_central_series(g)
    ab = adapted_basis(g, f)
    base, dirs = grading_operator_space(g, f, ab)
    degs = ab.degrees
    expected = sum(
        1 for a in range(6) for b in range(6) if degs[a] >= degs[b] + 1
    )
    assert len(dirs) == expected == 12
    for m in dirs:
        assert is_grading_operator(g, f, GradingOperator.from_rows(mat_add(base.rows, m)))


# --- derivability decisions


def test_carnot_algebra_is_S_derivable():
    for name in ("heisenberg", "filiform(6)", "abelian(3)"):
        g = catalog.get(name).algebra
        c = lower_central_series(g).nilpotency_class
        conditions = enumerate_S(max(c, 2))
        witness = is_A_derivable(g, conditions)
        assert witness is not None
        # the witness is a derivation: all delta_2 values vanish
        for i in range(g.dim):
            for j in range(g.dim):
                assert delta_n(g, witness, [unit_vec(g.dim, i), unit_vec(g.dim, j)]) == [
                    F(0)
                ] * g.dim


def test_witness_is_grading_operator():
    for name in ("g6_11", "g5_5", "g6_17"):
        g = catalog.get(name).algebra
        f = lower_central_series(g)
        res = e_invariant(g)
        assert is_grading_operator(g, f, res.witness)


def test_counterexample11_decisions():
    g = catalog.get("counterexample11").algebra
    assert is_A_derivable(g, parse_condition_set("(1,1|3)")) is not None
    assert is_A_derivable(g, parse_condition_set("(1,2|4)")) is not None
    assert is_A_derivable(g, parse_condition_set("(1,1|3),(1,2|4)")) is None
    assert is_A_derivable(g, parse_condition_set("(1,1,1|4)")) is None


def test_g7_1_2i1_decisions():
    g = catalog.get("g7_1_2i1").algebra
    assert is_A_derivable(g, parse_condition_set("(1,2|4)")) is not None
    assert is_A_derivable(g, parse_condition_set("(1,1,1|4)")) is None
    assert e_invariant(g).e == F(3, 4)


def test_level_clamping():
    # a level above the class is projected down; dropped when trivial
    g = catalog.get("g6_11").algebra  # class 4
    assert is_A_derivable(g, parse_condition_set("(1,1|9)")) is None  # clamps to (1,1|4)
    assert is_A_derivable(g, parse_condition_set("(1,3|9)")) is not None  # clamps away


def test_witness_verification_against_delta():
    # solver witnesses satisfy their conditions through the public dense path
    g = catalog.get("counterexample11").algebra
    f = lower_central_series(g)
    witness = is_A_derivable(g, parse_condition_set("(1,2|4)"))
    f3_basis = f.basis(3)
    f5_basis = f.basis(5)
    for i in range(g.dim):
        for z in f.basis(2):
            value = delta_n(g, witness, [unit_vec(g.dim, i), z])
            from nilgrade.linalg import subspace_contains

            assert subspace_contains(f5_basis, value)


# --- e-invariant and e_of_operator


def test_e_invariant_table_values():
    expected = {
        "g5_5": F(3, 4),
        "g6_11": F(1, 2),
        "g6_12": F(3, 4),
        "g6_13": F(3, 4),
        "g6_17": F(3, 5),
        "g6_19": F(4, 5),
        "g6_20": F(4, 5),
        "g6_2": F(2, 3),
        "heisenberg": F(0),
        "filiform(5)": F(0),
    }
    for name, value in expected.items():
        assert e_invariant(catalog.get(name).algebra).e == value, name


def test_e_of_operator_examples():
    g = catalog.get("g6_11").algebra
    d = diag_operator([1, 1, 1, 2, 3, 4])
    assert e_of_operator(g, d) == F(1, 2)

    h = catalog.get("heisenberg").algebra
    assert e_of_operator(h, e_invariant(h).witness) == F(0)


def test_e_of_operator_g7_0_8_published_operator():
    # the diagonal operator with degrees (1,1,1,2,3,4,5); its defect
    # Delta_3(e2,e2,e4) = e7 lands at ratio 4/5, not the published 3/4
    g = catalog.get("g7_0_8").algebra
    d = diag_operator([1, 1, 1, 2, 3, 4, 5])
    assert is_grading_operator(g, lower_central_series(g), d)
    value = delta_n(g, d, [unit_vec(7, 1), unit_vec(7, 1), unit_vec(7, 3)])
    assert value == unit_vec(7, 6)
    assert e_of_operator(g, d) == F(4, 5)


def test_e_of_operator_rejects_non_operator():
    g = catalog.get("g6_11").algebra
    bad = diag_operator([7, 7, 7, 7, 7, 7])
    with pytest.raises(OperatorNotInDError):
        e_of_operator(g, bad)


def test_witness_achieves_e():
    for name in ("g5_5", "g6_11", "g6_17", "g6_19", "g6_2"):
        g = catalog.get(name).algebra
        res = e_invariant(g)
        assert e_of_operator(g, res.witness) == res.e


def test_e_of_operator_bounded_below_by_e_invariant():
    g = catalog.get("g6_11").algebra
    f = lower_central_series(g)
    ab = adapted_basis(g, f)
    base, dirs = grading_operator_space(g, f, ab)
    e_g = e_invariant(g).e
    for m in dirs[:4]:
        d = GradingOperator.from_rows(mat_add(base.rows, m))
        assert e_of_operator(g, d) >= e_g


def test_feasibility_monotone_in_r():
    for name in ("g6_17", "g5_5", "counterexample11"):
        g = catalog.get(name).algebra
        c = lower_central_series(g).nilpotency_class
        feasible = [
            is_A_derivable(g, r_condition_set(c, r)) is not None
            for r in candidate_values(c)
        ]
        # once feasible, stays feasible
        assert feasible == sorted(feasible)


def test_witness_is_rational_by_construction():
    res = e_invariant(catalog.get("g6_13").algebra)
    for row in res.witness.rows:
        for entry in row:
            assert isinstance(entry, F)


def test_abelian_direct_factor_preserves_e():
    # tacking on an abelian factor changes tau but not the invariant
    g = catalog.get("g5_5").algebra
    padded_brackets = {}
    for (i, j), v in g.brackets.items():
        padded_brackets[(i, j)] = list(v) + [F(0)]
    from nilgrade.lie import LieAlgebra, lower_central_series as lcs

    padded = LieAlgebra(6, padded_brackets)
    assert lcs(padded).quotient_dims == (3, 1, 1, 1)
    assert e_invariant(padded).e == F(3, 4) == e_invariant(g).e


def test_carnot_characterizations_agree():
    # e = 0, S_c-derivability and {(1,1|c)}-derivability coincide
    from nilgrade.lie import lower_central_series as lcs

    for entry_name in ("heisenberg", "g5_5", "g6_2", "g6_11", "g6_17", "filiform(6)", "counterexample11"):
        g = catalog.get(entry_name).algebra
        c = lcs(g).nilpotency_class
        via_e = e_invariant(g).e == 0
        via_s = is_A_derivable(g, enumerate_S(max(c, 2))) is not None
        via_top = is_A_derivable(g, frozenset({DerivCondition((1, 1), max(c, 3))})) is not None
        assert via_e == via_s == via_top, entry_name


def test_delta_lands_one_step_deeper():
    # for a grading operator, Delta_n on arguments of filtration depths
    # >= wp always lands in the next filtration term after |wp|
    from itertools import product

    from nilgrade.linalg import subspace_contains

    for name in ("g6_11", "g6_20", "g7_0_8"):
        g = catalog.get(name).algebra
        f = lower_central_series(g)
        ab = adapted_basis(g, f)
        base, dirs = grading_operator_space(g, f, ab)
        d = GradingOperator.from_rows(mat_add(base.rows, dirs[0]))
        vectors = [list(v) for v in ab.vectors]
        degrees = ab.degrees
        for wp in ((1, 1), (1, 2), (2, 2), (1, 1, 1), (1, 1, 2)):
            target = f.basis(sum(wp) + 1)
            slots = [
                [v for v, deg in zip(vectors, degrees) if deg >= p] for p in wp
            ]
            for combo in product(*slots):
                value = delta_n(g, d, list(combo))
                assert subspace_contains(target, value)
