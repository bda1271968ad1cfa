"""Independent oracles used by the tests.

Nothing here shares code paths with the package internals: matrix
exponentials are summed term by term, group laws come from honest matrix
products, and the associative-series checker re-derives log(exp x exp y)
from scratch.
"""

from __future__ import annotations

from fractions import Fraction

from nilgrade.linalg import Matrix, Vec, identity, mat_mul

F = Fraction


def mat_exp_nilpotent(m: Matrix) -> Matrix:
    """exp of a nilpotent matrix as the finite sum of powers over k!."""
    n = len(m)
    out = identity(n)
    term = identity(n)
    k = 1
    while any(any(c != 0 for c in row) for row in term):
        term = [[sum(term[i][l] * m[l][j] for l in range(n)) / k for j in range(n)] for i in range(n)]
        out = [[out[i][j] + term[i][j] for j in range(n)] for i in range(n)]
        k += 1
    return out


def mat_log_unitriangular(u: Matrix) -> Matrix:
    """log of a unipotent matrix as the finite alternating sum of powers."""
    n = len(u)
    nil = [[u[i][j] - (1 if i == j else 0) for j in range(n)] for i in range(n)]
    out = [[F(0)] * n for _ in range(n)]
    power = [row[:] for row in nil]
    k = 1
    while any(any(c != 0 for c in row) for row in power):
        coeff = F((-1) ** (k + 1), k)
        out = [[out[i][j] + coeff * power[i][j] for j in range(n)] for i in range(n)]
        power = mat_mul(power, nil)
        k += 1
    return out


def heisenberg_matrix(v: Vec) -> Matrix:
    return [
        [F(0), F(v[0]), F(v[2])],
        [F(0), F(0), F(v[1])],
        [F(0), F(0), F(0)],
    ]


def heisenberg_coords(m: Matrix) -> Vec:
    return [m[0][1], m[1][2], m[0][2]]


def filiform5_matrix(v: Vec) -> Matrix:
    m = [[F(0)] * 5 for _ in range(5)]
    for i in range(4):
        m[i][i + 1] += F(v[0])
    m[3][4] += F(v[1])
    m[2][4] += F(v[2])
    m[1][4] += F(v[3])
    m[0][4] += F(v[4])
    return m


def filiform5_coords(m: Matrix) -> Vec:
    x1 = m[0][1]
    assert m[1][2] == x1 and m[2][3] == x1
    assert m[0][2] == 0 and m[1][3] == 0 and m[0][3] == 0
    return [x1, m[3][4] - x1, m[2][4], m[1][4], m[0][4]]


def matrix_group_product(to_matrix, from_matrix, x: Vec, y: Vec) -> Vec:
    z = mat_log_unitriangular(
        mat_mul(mat_exp_nilpotent(to_matrix(x)), mat_exp_nilpotent(to_matrix(y)))
    )
    return from_matrix(z)


# --- free associative algebra on two letters, for checking the BCH table


def assoc_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for wa, ca in a.items():
        for wb, cb in b.items():
            w = wa + wb
            v = out.get(w, F(0)) + ca * cb
            if v:
                out[w] = v
            else:
                out.pop(w, None)
    return out


def assoc_truncate(a: dict, cap: int) -> dict:
    return {w: c for w, c in a.items() if len(w) <= cap}


def assoc_log_exp_exp(cap: int) -> dict:
    """log(exp x . exp y) truncated at total degree cap; words over {0,1}."""
    fact = [1]
    for k in range(1, cap + 1):
        fact.append(fact[-1] * k)
    u: dict = {}
    for i in range(cap + 1):
        for j in range(cap - i + 1):
            if i == j == 0:
                continue
            u[(0,) * i + (1,) * j] = F(1, fact[i] * fact[j])
    out: dict = {}
    power = {(): F(1)}
    for k in range(1, cap + 1):
        power = assoc_truncate(assoc_mul(power, u), cap)
        sign = F((-1) ** (k + 1), k)
        for w, c in power.items():
            v = out.get(w, F(0)) + sign * c
            if v:
                out[w] = v
            else:
                out.pop(w, None)
    return out


def assoc_nested_bracket(word: tuple) -> dict:
    """Left-nested bracket of a word expanded as an associative polynomial."""
    if len(word) == 1:
        return {word: F(1)}
    inner = assoc_nested_bracket(word[1:])
    head = (word[0],)
    out: dict = {}
    for w, c in inner.items():
        for ww, cc in ((head + w, c), (w + head, -c)):
            v = out.get(ww, F(0)) + cc
            if v:
                out[ww] = v
            else:
                out.pop(ww, None)
    return out


def grid_vectors(seed: int, dim: int, count: int) -> list[Vec]:
    """Reference re-implementation of the sampling grid draws."""
    a, c, mask = 6364136223846793005, 1442695040888963407, (1 << 64) - 1
    state = seed & mask
    out = []
    for _ in range(count):
        v = []
        for _ in range(dim):
            state = (a * state + c) & mask
            v.append(F(((state >> 32) % 33) - 16, 16))
        out.append(v)
    return out
