from fractions import Fraction as F
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from schubert.errors import DimensionMismatch, IndexOutOfRange, NotSquare, ParseError, SingularGram
from schubert.exact_linalg import (
    IndexedMinor,
    RationalMatrix,
    adjugate_solve_int,
    det,
    det_int,
    format_rational,
    gram,
    inner,
    integer_grid,
    laplace_det,
    minor_eval,
    minor_grad,
    minor_hessian_bilinear,
    minor_second_partial,
    nullspace,
    parse_rational,
    parse_rational_matrix,
    rank,
    solve,
    solve_spd,
)

small = st.integers(-5, 5)
rat = st.builds(F, st.integers(-9, 9), st.integers(1, 6))


def matrices(m, n, elems=rat):
    return st.lists(st.lists(elems, min_size=n, max_size=n), min_size=m, max_size=m).map(RationalMatrix)


def square(max_n=4, elems=rat):
    return st.integers(1, max_n).flatmap(lambda n: matrices(n, n, elems))


@st.composite
def point_and_minor(draw, max_dim=4):
    m = draw(st.integers(1, max_dim))
    n = draw(st.integers(1, max_dim))
    A = draw(matrices(m, n))
    s = draw(st.integers(1, min(m, n)))
    rows = draw(st.lists(st.integers(1, m), min_size=s, max_size=s, unique=True))
    cols = draw(st.lists(st.integers(1, n), min_size=s, max_size=s, unique=True))
    return A, IndexedMinor(tuple(sorted(rows)), tuple(sorted(cols)))


# --- parsing and formatting


def test_rational_text_round_trip():
    for text in ["3", "-3", "1/2", "-7/3", "0"]:
        assert format_rational(parse_rational(text)) == text
    assert parse_rational("4/2") == 2 and isinstance(parse_rational("4/2"), int)


def test_matrix_text_parsing():
    A = parse_rational_matrix("1 1/2\n-3 0")
    assert A.rows == ((1, F(1, 2)), (-3, 0))
    with pytest.raises(ParseError):
        parse_rational_matrix("1 2\n3")
    with pytest.raises(ParseError):
        parse_rational_matrix("1 x")


def test_matrix_string_round_trip():
    A = RationalMatrix([[F(1, 3), -2], [0, F(7, 5)]])
    assert RationalMatrix.from_strings(A.to_strings()) == A


# --- determinants


@settings(max_examples=150, deadline=None)
@given(square(4))
def test_det_matches_laplace_expansion(A):
    assert det(A) == laplace_det(A)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(matrices(n, n), matrices(n, n))))
def test_det_multiplicative(pair):
    A, B = pair
    assert det(A @ B) == det(A) * det(B)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_integer_det_matches_rational(grid):
    assert det_int(grid) == det(RationalMatrix(grid))


def test_det_rejects_rectangular():
    with pytest.raises(NotSquare):
        det(RationalMatrix([[1, 2, 3]]))


def test_integer_grid_scales_rows_exactly():
    A = RationalMatrix([[F(1, 2), F(1, 3)], [2, F(3, 4)]])
    grid, c = integer_grid(A)
    assert all(F(grid[i][j], c) == A[i, j] for i in range(2) for j in range(2))


# --- linear systems


def test_solve_spd_small_system():
    G = RationalMatrix([[2, 1], [1, 3]])
    assert solve_spd(G, [2, 0]) == [F(6, 5), F(-2, 5)]
    assert solve_spd(RationalMatrix([[1, 1], [1, 6]]), [1, 0]) == [F(6, 5), F(-1, 5)]


def test_solve_singular_raises():
    with pytest.raises(SingularGram):
        solve_spd(RationalMatrix([[1, 1], [1, 1]]), [1, 0])


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(
    st.lists(st.lists(small, min_size=n + 1, max_size=n + 1), min_size=n, max_size=n),
    st.lists(st.lists(small, min_size=2, max_size=2), min_size=n, max_size=n))))
def test_adjugate_solve_matches_rational_solve(data):
    N, B = data
    Nm = RationalMatrix(N)
    G = Nm @ Nm.T
    if det(G) == 0:
        with pytest.raises(SingularGram):
            adjugate_solve_int([list(r) for r in G.rows], B)
        return
    D, Z = adjugate_solve_int([list(r) for r in G.rows], B)
    X = solve(G, RationalMatrix(B))
    assert D == det(G)
    assert RationalMatrix(Z) == X.scale(D)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).flatmap(lambda m: st.integers(1, 4).flatmap(lambda n: matrices(m, n, small))))
def test_nullspace_rank_nullity(A):
    ker = nullspace(A)
    assert rank(A) + len(ker) == A.ncols
    for v in ker:
        assert all(sum(A[i, j] * v[j] for j in range(A.ncols)) == 0 for i in range(A.nrows))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3).flatmap(lambda k: st.lists(matrices(2, 3), min_size=k, max_size=k)))
def test_gram_is_symmetric(vs):
    G = gram(vs)
    assert G == G.T
    assert all(G[i, i] == inner(vs[i], vs[i]) for i in range(len(vs)))


def test_inner_shape_check():
    with pytest.raises(DimensionMismatch):
        inner(RationalMatrix([[1]]), RationalMatrix([[1, 2]]))


# --- minors


def test_indexed_minor_validation():
    with pytest.raises(IndexOutOfRange):
        minor_eval(RationalMatrix([[1, 2], [3, 4]]), IndexedMinor((1, 3), (1, 2)))
    with pytest.raises(ValueError):
        IndexedMinor((1, 1), (1, 2))


@settings(max_examples=120, deadline=None)
@given(point_and_minor())
def test_gradient_matches_exact_difference(data):
    # f is affine in each single entry, so the forward difference is exact
    A, f = data
    G = minor_grad(A, f)
    base = minor_eval(A, f)
    for i, j in product(range(A.nrows), range(A.ncols)):
        bumped = A.with_entry(i, j, A[i, j] + 1)
        assert minor_eval(bumped, f) - base == G[i, j]


@settings(max_examples=60, deadline=None)
@given(point_and_minor(max_dim=3))
def test_second_partial_matches_mixed_difference(data):
    A, f = data
    m, n = A.shape
    for (a1, b1), (a2, b2) in product(product(range(m), range(n)), repeat=2):
        if (a1, b1) == (a2, b2):
            continue
        def at(s, t):
            B = A.with_entry(a1, b1, A[a1, b1] + s)
            return minor_eval(B.with_entry(a2, b2, B[a2, b2] + t), f)
        mixed = at(1, 1) - at(1, 0) - at(0, 1) + at(0, 0)
        assert minor_second_partial(A, f, (a1 + 1, b1 + 1), (a2 + 1, b2 + 1)) == mixed


@settings(max_examples=60, deadline=None)
@given(point_and_minor(max_dim=3), st.data())
def test_bilinear_hessian_matches_entrywise_sum(data, draw):
    A, f = data
    m, n = A.shape
    V = draw.draw(matrices(m, n, small))
    W = draw.draw(matrices(m, n, small))
    cells = [(i, j) for i in range(1, m + 1) for j in range(1, n + 1)]
    total = sum(V[x[0] - 1, x[1] - 1] * minor_second_partial(A, f, x, y) * W[y[0] - 1, y[1] - 1]
                for x in cells for y in cells)
    assert minor_hessian_bilinear(A, f, V, W) == total
    assert minor_hessian_bilinear(A, f, V, W) == minor_hessian_bilinear(A, f, W, V)


@settings(max_examples=80, deadline=None)
@given(point_and_minor())
def test_minor_laplacian_vanishes(data):
    A, f = data
    m, n = A.shape
    lap = sum(minor_hessian_bilinear(A, f, RationalMatrix.unit(m, n, i, j), RationalMatrix.unit(m, n, i, j))
              for i in range(1, m + 1) for j in range(1, n + 1))
    assert lap == 0


def test_gradient_of_vanishing_minor_has_rank_one():
    # rank s-1 block: the cofactor matrix is an outer product
    A = RationalMatrix([[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    f = IndexedMinor((1, 2, 3), (1, 2, 3))
    assert minor_eval(A, f) == 0
    G = minor_grad(A, f)
    assert not G.is_zero() and rank(G) == 1


def test_gradient_vanishes_below_corank_two():
    A = RationalMatrix([[1, 2, 3], [2, 4, 6], [3, 6, 9]])
    assert minor_grad(A, IndexedMinor((1, 2, 3), (1, 2, 3))).is_zero()


def test_one_by_one_minor():
    A = RationalMatrix([[F(5, 2), 1], [0, 0]])
    f = IndexedMinor((1,), (1,))
    assert minor_grad(A, f) == RationalMatrix.unit(2, 2, 1, 1)
    assert minor_hessian_bilinear(A, f, A, A) == 0
