"""Truncated Baker-Campbell-Hausdorff group laws and their difference.

Coefficients are not hard-coded: log(exp x . exp y) is computed in the
free associative algebra on two generators, truncated at the nilpotency
class, and the homogeneous components are re-expressed exactly over
left-nested bracket words by solving the corresponding linear system.
A fixed preference order on words puts the textbook low-degree terms
(1/2 [x,y], 1/12 of the degree-3 pair, -1/24 at degree 4) in their
classical slots; any other choice would evaluate identically.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Sequence

from . import lie
from .carnot import CarnotAlgebra
from .lie import Filtration, LieAlgebra
from .linalg import Vec, ZERO, q, solve_affine

LEFT, RIGHT = 0, 1
Word = tuple[int, ...]

MAX_SUPPORTED_CLASS = 8

# Preferred slots for the nonzero coefficients, lowest degrees first the
# classical ones; longer lists follow the right-nested presentations in
# common use.  Correctness never depends on these: they only select which
# spanning words carry the weight.
_PREFERRED: dict[int, tuple[Word, ...]] = {
    2: ((LEFT, RIGHT),),
    3: ((LEFT, LEFT, RIGHT), (RIGHT, RIGHT, LEFT)),
    4: ((RIGHT, LEFT, LEFT, RIGHT),),
    5: (
        (RIGHT, RIGHT, RIGHT, RIGHT, LEFT),
        (LEFT, LEFT, LEFT, LEFT, RIGHT),
        (LEFT, RIGHT, RIGHT, RIGHT, LEFT),
        (RIGHT, LEFT, LEFT, LEFT, RIGHT),
        (RIGHT, LEFT, RIGHT, LEFT, RIGHT),
        (LEFT, RIGHT, LEFT, RIGHT, LEFT),
    ),
    6: (
        (RIGHT, LEFT, LEFT, LEFT, RIGHT, LEFT),
        (RIGHT, RIGHT, LEFT, LEFT, RIGHT, LEFT),
        (RIGHT, LEFT, RIGHT, LEFT, RIGHT, LEFT),
        (RIGHT, RIGHT, RIGHT, LEFT, RIGHT, LEFT),
        (RIGHT, LEFT, RIGHT, RIGHT, RIGHT, LEFT),
    ),
}


@dataclass(frozen=True)
class BCHTermTable:
    """Coefficient of the left-nested bracket of every word of length 2..c."""

    max_degree: int
    coeffs: dict[Word, Fraction]

    @property
    def nonzero(self) -> list[tuple[Word, Fraction]]:
        return [(w, c) for w, c in sorted(self.coeffs.items()) if c != 0]


def _series_mul(a: list[dict[Word, Fraction]], b: list[dict[Word, Fraction]], cap: int):
    out: list[dict[Word, Fraction]] = [dict() for _ in range(cap + 1)]
    for da, ta in enumerate(a):
        if not ta:
            continue
        for db in range(0, cap - da + 1):
            tb = b[db]
            if not tb:
                continue
            dest = out[da + db]
            for wa, ca in ta.items():
                for wb, cb in tb.items():
                    w = wa + wb
                    v = dest.get(w, ZERO) + ca * cb
                    if v:
                        dest[w] = v
                    else:
                        dest.pop(w, None)
    return out


@lru_cache(maxsize=None)
def _log_components(cap: int) -> tuple[dict[Word, Fraction], ...]:
    """Homogeneous components of log(exp x . exp y) up to degree cap."""
    fact = [1]
    for k in range(1, cap + 1):
        fact.append(fact[-1] * k)
    u: list[dict[Word, Fraction]] = [dict() for _ in range(cap + 1)]
    for i in range(cap + 1):
        for j in range(cap - i + 1):
            if i == j == 0:
                continue
            word = (LEFT,) * i + (RIGHT,) * j
            u[i + j][word] = Fraction(1, fact[i] * fact[j])
    log: list[dict[Word, Fraction]] = [dict() for _ in range(cap + 1)]
    power = [dict() for _ in range(cap + 1)]
    power[0][()] = Fraction(1)
    for k in range(1, cap + 1):
        power = _series_mul(power, u, cap)
        sign = Fraction((-1) ** (k + 1), k)
        for deg in range(cap + 1):
            for w, cval in power[deg].items():
                v = log[deg].get(w, ZERO) + sign * cval
                if v:
                    log[deg][w] = v
                else:
                    log[deg].pop(w, None)
    return tuple(log)


def _beta_assoc(word: Word) -> dict[Word, Fraction]:
    """Left-nested bracket of a word expanded in the associative algebra."""
    if len(word) == 1:
        return {word: Fraction(1)}
    inner = _beta_assoc(word[1:])
    head = (word[0],)
    out: dict[Word, Fraction] = {}
    for w, c in inner.items():
        for ww, cc in ((head + w, c), (w + head, -c)):
            v = out.get(ww, ZERO) + cc
            if v:
                out[ww] = v
            else:
                out.pop(ww, None)
    return out


def _word_order(n: int) -> list[Word]:
    preferred = list(_PREFERRED.get(n, ()))
    all_words = [tuple((w >> k) & 1 for k in range(n - 1, -1, -1)) for w in range(2**n)]

    def run_length(w: Word) -> int:
        r = 1
        while r < len(w) and w[r] == w[0]:
            r += 1
        return r

    rest = [w for w in all_words if w not in preferred]
    rest.sort(key=lambda w: (-run_length(w), w))
    return preferred + rest


@lru_cache(maxsize=None)
def _degree_coeffs(n: int) -> tuple[tuple[Word, Fraction], ...]:
    """Word coefficients b_{n,q} with sum_q b_{n,q} [q_1,...,q_n] = BCH_n."""
    target = _log_components(n)[n]
    order = _word_order(n)
    rows = sorted({w for cand in order for w in _beta_assoc(cand)} | set(target))
    row_index = {w: i for i, w in enumerate(rows)}
    a = [[ZERO] * len(order) for _ in rows]
    for col, cand in enumerate(order):
        for w, c in _beta_assoc(cand).items():
            a[row_index[w]][col] = c
    rhs = [target.get(w, ZERO) for w in rows]
    sol = solve_affine(a, rhs)
    if sol is None:
        raise AssertionError("BCH component is not a combination of nested brackets")
    return tuple((w, sol.particular[i]) for i, w in enumerate(order))


def bch_table(c: int) -> BCHTermTable:
    """Coefficients of the BCH series truncated at degree c (2 <= c <= 8)."""
    if not 2 <= c <= MAX_SUPPORTED_CLASS:
        raise ValueError(f"supported classes are 2..{MAX_SUPPORTED_CLASS}")
    coeffs: dict[Word, Fraction] = {}
    for n in range(2, c + 1):
        coeffs.update(dict(_degree_coeffs(n)))
    return BCHTermTable(c, coeffs)


def _int_structure(g: LieAlgebra):
    """Integer-scaled bracket table: sigma * [e_i, e_j] has integer entries."""
    cached = getattr(g, "_int_struct_cache", None)
    if cached is not None:
        return cached
    sigma = 1
    for v in g.brackets.values():
        for x in v:
            sigma = sigma * x.denominator // gcd(sigma, x.denominator)
    table = [
        (i, j, [(k, int(x * sigma)) for k, x in enumerate(v) if x != 0])
        for (i, j), v in sorted(g.brackets.items())
    ]
    result = (sigma, table)
    g._int_struct_cache = result
    return result


def _int_bracket(table, dim: int, u: list[int], v: list[int]) -> list[int]:
    out = [0] * dim
    for i, j, entries in table:
        c = u[i] * v[j] - u[j] * v[i]
        if c:
            for k, s in entries:
                out[k] += c * s
    return out


def bch_product(g: LieAlgebra, f: Filtration, x: Sequence[Fraction], y: Sequence[Fraction]) -> Vec:
    """x * y = log(exp x . exp y), exact, truncated by the nilpotency class.

    Evaluation clears denominators first so the bracket words run over
    plain integers; rationals reappear only in the final combination.
    """
    if len(x) != g.dim or len(y) != g.dim:
        raise ValueError("dimension mismatch")
    c = f.nilpotency_class
    result = [q(a) + q(b) for a, b in zip(x, y)]
    if c < 2:
        return result
    table = bch_table(c)
    sigma, int_table = _int_structure(g)
    den = 1
    for val in list(x) + list(y):
        d = q(val).denominator
        den = den * d // gcd(den, d)
    ix = [int(q(v) * den) for v in x]
    iy = [int(q(v) * den) for v in y]
    gens = (ix, iy)
    suffix_cache: dict[Word, list[int]] = {(LEFT,): ix, (RIGHT,): iy}

    def eval_word(word: Word) -> list[int]:
        vec = suffix_cache.get(word)
        if vec is None:
            vec = _int_bracket(int_table, g.dim, gens[word[0]], eval_word(word[1:]))
            suffix_cache[word] = vec
        return vec

    for word, coeff in table.nonzero:
        n = len(word)
        vec = eval_word(word)
        scale = coeff / (den**n * sigma ** (n - 1))
        for k, entry in enumerate(vec):
            if entry:
                result[k] += scale * entry
    return result


def carnot_product(ca: CarnotAlgebra, x: Sequence[Fraction], y: Sequence[Fraction]) -> Vec:
    """The group law of the Carnot-graded algebra, eigenbasis coordinates."""
    f = lie.lower_central_series(ca.algebra)
    return bch_product(ca.algebra, f, x, y)


def group_inverse(x: Sequence[Fraction]) -> Vec:
    """Inverse for any BCH law: -x."""
    return [-q(v) for v in x]


def law_difference(
    g: LieAlgebra,
    other: CarnotAlgebra | LieAlgebra,
    x: Sequence[Fraction],
    y: Sequence[Fraction],
) -> Vec:
    """bch_product under g minus the product under `other`, exact.

    Both laws must be expressed in one common coordinate system (for a
    CarnotAlgebra companion this is the grading eigenbasis).
    """
    other_alg = other.algebra if isinstance(other, CarnotAlgebra) else other
    a = bch_product(g, lie.lower_central_series(g), x, y)
    b = bch_product(other_alg, lie.lower_central_series(other_alg), x, y)
    return [s - t for s, t in zip(a, b)]
