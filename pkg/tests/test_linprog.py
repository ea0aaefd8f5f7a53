"""LP engine tests: hand-checked problems plus agreement with a
brute-force vertex-enumeration oracle on a seeded corpus."""

import random
from fractions import Fraction
from itertools import combinations

import pytest

from quotasig.linprog import EQ, GE, LE, LinearProgram, solve_lex, solve_lp

F = Fraction


# ---------------------------------------------------------------------------
# Brute-force oracle: enumerate candidate vertices (maximal tight sets),
# keep feasible ones, take the best objective. Valid whenever every
# variable is box-bounded, which guarantees the feasible set is a polytope.
# ---------------------------------------------------------------------------


def _solve_square(A, b):
    n = len(A)
    M = [row[:] + [bi] for row, bi in zip(A, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        inv = M[col][col]
        M[col] = [v / inv for v in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [v - f * p for v, p in zip(M[r], M[col])]
    return [M[r][n] for r in range(n)]


def brute_force_lp(lp: LinearProgram):
    nv = lp.num_vars
    eqs, ineqs = [], []
    for coeffs, rel, rhs in lp.rows:
        if rel == EQ:
            eqs.append((list(coeffs), rhs))
        elif rel == LE:
            ineqs.append((list(coeffs), rhs))
        else:
            ineqs.append(([-c for c in coeffs], -rhs))
    for i, (lo, hi) in enumerate(lp.bounds):
        unit = [F(0)] * nv
        unit[i] = F(1)
        assert lo is not None and hi is not None, "oracle needs box bounds"
        ineqs.append(([-v for v in unit], -lo))
        ineqs.append((unit, hi))

    def feasible(x):
        for coeffs, rhs in eqs:
            if sum(c * v for c, v in zip(coeffs, x)) != rhs:
                return False
        for coeffs, rhs in ineqs:
            if sum(c * v for c, v in zip(coeffs, x)) > rhs:
                return False
        return True

    need = nv - len(eqs)
    if need < 0:
        return "infeasible", None
    best = None
    for chosen in combinations(range(len(ineqs)), need):
        A = [coeffs for coeffs, _ in eqs] + [ineqs[i][0] for i in chosen]
        b = [rhs for _, rhs in eqs] + [ineqs[i][1] for i in chosen]
        x = _solve_square(A, b)
        if x is None or not feasible(x):
            continue
        val = sum(c * v for c, v in zip(lp.objective, x))
        if best is None or val > best:
            best = val
    if best is None:
        return "infeasible", None
    return "optimal", best


def _random_lp(rng, nv, nrows):
    rows = []
    for _ in range(nrows):
        coeffs = tuple(F(rng.randint(-4, 4)) for _ in range(nv))
        rel = rng.choice((LE, GE, EQ))
        rows.append((coeffs, rel, F(rng.randint(-6, 6))))
    bounds = tuple((F(0), F(rng.randint(1, 3))) for _ in range(nv))
    objective = tuple(F(rng.randint(-5, 5)) for _ in range(nv))
    return LinearProgram(objective=objective, rows=tuple(rows), bounds=bounds)


def _corpus():
    rng = random.Random(902214)
    shapes = [(2, 2)] * 18 + [(3, 2)] * 16 + [(3, 3)] * 8 + [(4, 2)] * 6 + [(6, 1)] * 2
    assert len(shapes) == 50
    return [_random_lp(rng, nv, nr) for nv, nr in shapes]


def test_agrees_with_vertex_enumeration_on_corpus():
    corpus = _corpus()
    optimal = 0
    for i, lp in enumerate(corpus):
        want_status, want_value = brute_force_lp(lp)
        got = solve_lp(lp)
        assert got.status == want_status, f"lp #{i}: {got.status} != {want_status}"
        if want_status == "optimal":
            optimal += 1
            assert got.value == want_value, f"lp #{i}: {got.value} != {want_value}"
            # The returned point must itself be feasible and achieve the value.
            for coeffs, rel, rhs in lp.rows:
                lhs = sum(c * v for c, v in zip(coeffs, got.point))
                assert (rel, lhs == rhs, lhs <= rhs, lhs >= rhs)[
                    {LE: 2, EQ: 1, GE: 3}[rel]
                ]
            for (lo, hi), v in zip(lp.bounds, got.point):
                assert lo <= v <= hi
    # The corpus should exercise both statuses.
    assert 10 <= optimal < 50


def test_simple_max():
    lp = LinearProgram(
        objective=(F(3), F(2)),
        rows=(((F(1), F(1)), LE, F(4)), ((F(1), F(3)), LE, F(6))),
        bounds=((F(0), F(10)), (F(0), F(10))),
    )
    res = solve_lp(lp)
    assert res.status == "optimal"
    assert res.value == 12
    assert res.point == (F(4), F(0))


def test_equality_and_negative_rhs():
    lp = LinearProgram(
        objective=(F(1), F(1)),
        rows=(((F(1), F(-1)), EQ, F(-2)),),
        bounds=((F(0), F(5)), (F(0), F(5))),
    )
    res = solve_lp(lp)
    assert res.status == "optimal"
    assert res.value == 8  # x=3, y=5
    assert res.point == (F(3), F(5))


def test_infeasible():
    lp = LinearProgram(
        objective=(F(1),),
        rows=(((F(1),), GE, F(2)),),
        bounds=((F(0), F(1)),),
    )
    assert solve_lp(lp).status == "infeasible"


def test_unbounded():
    lp = LinearProgram(objective=(F(1),), rows=(), bounds=((F(0), None),))
    assert solve_lp(lp).status == "unbounded"


def test_free_variable_substitution():
    lp = LinearProgram(
        objective=(F(-1),),
        rows=(((F(1),), GE, F(-7)),),
        bounds=((None, None),),
    )
    res = solve_lp(lp)
    assert res.status == "optimal"
    assert res.value == 7
    assert res.point == (F(-7),)


def test_mirror_bound():
    lp = LinearProgram(
        objective=(F(1),),
        rows=(),
        bounds=((None, F(3, 2)),),
    )
    res = solve_lp(lp)
    assert res.status == "optimal"
    assert res.value == F(3, 2)


def test_lexicographic_tie_break():
    # Primary objective is flat on a face; secondary picks the corner.
    lp = LinearProgram(
        objective=(F(1), F(1)),
        rows=(((F(1), F(1)), LE, F(1)),),
        bounds=((F(0), F(1)), (F(0), F(1))),
    )
    res = solve_lex(lp, (F(0), F(1)))
    assert res.status == "optimal"
    assert res.primary_value == 1
    assert res.value == 1
    assert res.point == (F(0), F(1))


def test_lex_propagates_infeasibility():
    lp = LinearProgram(
        objective=(F(1),),
        rows=(((F(1),), GE, F(2)),),
        bounds=((F(0), F(1)),),
    )
    assert solve_lex(lp, (F(1),)).status == "infeasible"


def test_fractional_data_stays_exact():
    lp = LinearProgram(
        objective=(F(1, 3), F(1, 7)),
        rows=(((F(2, 5), F(1)), LE, F(9, 10)),),
        bounds=((F(0), F(1)), (F(0), F(1))),
    )
    res = solve_lp(lp)
    assert res.status == "optimal"
    assert res.value == F(1, 3) + F(1, 7) * F(1, 2)
    assert res.point == (F(1), F(1, 2))


def test_row_width_validation():
    with pytest.raises(Exception):
        LinearProgram(objective=(F(1),), rows=(((F(1), F(2)), LE, F(1)),))
