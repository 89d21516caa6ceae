from itertools import combinations, permutations

import pytest
from hypothesis import given, settings, strategies as st

from schubert.errors import (
    DuplicateOneInColumn,
    DuplicateOneInRow,
    NonBinaryEntry,
    NotVexillary,
    RaggedRows,
    TopLeftNotInDiagram,
)
from schubert.perm_core import (
    MINIMAL,
    NON_MINIMAL,
    Gr2Params,
    PartialPermutation,
    Permutation,
    all_partial_permutations,
    classify,
    decompose,
    enumerate_gr2,
    extend,
    gr2_matrix,
    gr2_tilde_shape,
    gr2_twin,
    is_vexillary_pattern,
    is_vexillary_restriction,
    match_gr2,
    parse_partial_permutation,
    restricted_permutation,
    rothe_diagram,
)

TWO_COMPONENTS = parse_partial_permutation("0 1 0 / 0 0 0 / 1 0 0")
NONVEX = parse_partial_permutation("0 1 0 / 1 0 0 / 0 0 0")
GR2_OMEGA = parse_partial_permutation("1 0 0 0 / 0 0 1 0 / 0 0 0 0")
GR2_MU = parse_partial_permutation("1 0 0 0 0 / 0 0 1 0 0 / 0 0 0 0 1 / 0 1 0 0 0")
COMPOSITE = parse_partial_permutation("""
0 0 0 0 0 0 1 0
0 0 0 0 0 0 0 0
0 0 0 0 1 0 0 0
0 0 0 0 0 0 0 1
1 0 0 0 0 0 0 0
0 0 1 0 0 0 0 0
0 0 0 0 0 1 0 0
""")


@st.composite
def partial_perms(draw, max_m=5, max_n=5):
    m = draw(st.integers(1, max_m))
    n = draw(st.integers(1, max_n))
    k = draw(st.integers(0, min(m, n)))
    rows = draw(st.lists(st.integers(1, m), min_size=k, max_size=k, unique=True))
    cols = draw(st.lists(st.integers(1, n), min_size=k, max_size=k, unique=True))
    return PartialPermutation(m, n, frozenset(zip(rows, cols)))


def brute_diagram(w):
    """Cells left after deleting each 1 together with everything right of and below it."""
    killed = set()
    for (r, c) in w.ones:
        killed |= {(r, j) for j in range(c, w.n + 1)}
        killed |= {(i, c) for i in range(r, w.m + 1)}
    return {(i, j) for i in range(1, w.m + 1) for j in range(1, w.n + 1)} - killed


# --- parsing


def test_parse_example_matrix():
    assert TWO_COMPONENTS.ones == frozenset({(1, 2), (3, 1)})
    assert parse_partial_permutation("0").ones == frozenset()
    assert parse_partial_permutation("0 1\n1 0") == parse_partial_permutation("0 1 / 1 0")


@pytest.mark.parametrize("text,exc", [
    ("1 1", DuplicateOneInRow),
    ("1 0 / 1 0", DuplicateOneInColumn),
    ("1 2", NonBinaryEntry),
    ("1 0 / 0", RaggedRows),
])
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        parse_partial_permutation(text)


@settings(max_examples=100, deadline=None)
@given(partial_perms())
def test_text_round_trip(w):
    assert parse_partial_permutation(w.to_text()) == w
    assert w.transpose().transpose() == w


# --- extension and diagram


def test_extension_examples():
    assert extend(TWO_COMPONENTS).image == (2, 4, 1, 3, 5, 6)
    assert extend(NONVEX).image == (2, 1, 4, 3, 5, 6)
    assert extend(PartialPermutation.from_rows([[1, 0], [0, 1]])).is_identity()


@settings(max_examples=200, deadline=None)
@given(partial_perms())
def test_extension_recovers_block_and_ranks(w):
    wt = extend(w)
    assert sorted(wt.image) == list(range(1, w.m + w.n + 1))
    for i in range(1, w.m + 1):
        for j in range(1, w.n + 1):
            assert (wt(i) == j) == (w.entry(i, j) == 1)
    # the extension adds no rank inside any upper-left block of w
    for p in range(1, w.m + 1):
        for q in range(1, w.n + 1):
            assert sum(1 for i in range(1, p + 1) if wt(i) <= q) == w.rank_upper_left(p, q)


def test_example_diagram():
    D = rothe_diagram(TWO_COMPONENTS)
    assert set(D.cells) == {(1, 1), (2, 1), (2, 3)}
    assert {frozenset(c) for c in D.components} == {frozenset({(1, 1), (2, 1)}), frozenset({(2, 3)})}
    assert D.minor_index((2, 3)) == ((1, 2), (2, 3))


def test_composite_diagram():
    D = rothe_diagram(COMPOSITE)
    first = {(i, j) for i in (1, 2) for j in range(1, 7)} | {(i, j) for i in (3, 4) for j in range(1, 5)}
    assert set(D.cells) == first | {(2, 8), (4, 6), (6, 2), (7, 2), (7, 4)}
    assert len(D.cells) == 25 and len(D.components) == 5


def test_identity_has_empty_diagram():
    assert rothe_diagram(PartialPermutation.from_rows([[1, 0, 0], [0, 1, 0], [0, 0, 1]])).cells == ()


@settings(max_examples=200, deadline=None)
@given(partial_perms())
def test_diagram_matches_deletion_rule(w):
    D = rothe_diagram(w)
    assert set(D.cells) == brute_diagram(w)
    assert sorted(c for comp in D.components for c in comp) == sorted(D.cells)
    for cell in D.cells:
        R, C = D.rc_sets[cell]
        assert len(R) == len(C) == D.rank(cell)


# --- vexillarity


def test_vexillary_examples():
    assert not is_vexillary_pattern(NONVEX) and not is_vexillary_restriction(NONVEX)
    D = rothe_diagram(NONVEX)
    R, C = D.rc_sets[(3, 3)]
    assert restricted_permutation(NONVEX, R, C) == Permutation((2, 1))
    assert is_vexillary_pattern(GR2_OMEGA) and is_vexillary_restriction(GR2_OMEGA)


def test_determinantal_inputs_are_vexillary():
    for m in range(1, 5):
        for n in range(1, 5):
            for r in range(0, min(m, n) + 1):
                w = PartialPermutation(m, n, frozenset((i, i) for i in range(1, r + 1)))
                assert is_vexillary_pattern(w) and is_vexillary_restriction(w)


def test_vexillary_tests_agree_on_all_small_inputs():
    for m in range(1, 5):
        for n in range(1, 5):
            for w in all_partial_permutations(m, n):
                assert is_vexillary_pattern(w) == is_vexillary_restriction(w), w


def test_pattern_test_on_permutations_matches_brute_force():
    def has_2143(p):
        return any(p[b] < p[a] < p[d] < p[c] for a, b, c, d in combinations(range(len(p)), 4))
    for k in range(1, 7):
        for img in permutations(range(1, k + 1)):
            assert is_vexillary_pattern(Permutation(img).as_partial()) == (not has_2143(img))


# --- Gr2 classes


def test_gr2_examples():
    assert match_gr2(GR2_OMEGA) == Gr2Params(r1=1, n1=1, r2=1, n2=1, m1=1)
    assert gr2_matrix(match_gr2(GR2_OMEGA)) == GR2_OMEGA
    c = classify(GR2_MU)
    assert c.in_gr2_tilde and not c.in_gr2 and c.verdict == MINIMAL
    assert set(rothe_diagram(GR2_MU).cells) == set(rothe_diagram(GR2_OMEGA).cells)


def test_nonvexillary_verdict():
    assert classify(NONVEX).verdict == NON_MINIMAL


def test_enumerated_gr2_matrices_pass_shape_test():
    seen = set()
    for params, w in enumerate_gr2(5, 5):
        assert w not in seen
        seen.add(w)
        assert is_vexillary_pattern(w)
        assert match_gr2(w) is not None
        c = classify(w)
        assert c.in_gr2 and c.in_gr2_tilde


def test_shape_criterion_equals_diagram_match():
    gr2_diagrams = set()
    for _, w in enumerate_gr2(8, 8):
        gr2_diagrams.add(frozenset(rothe_diagram(w).cells))
    for m in range(1, 6):
        for n in range(1, 6):
            for w in all_partial_permutations(m, n):
                if not is_vexillary_pattern(w):
                    continue
                D = rothe_diagram(w)
                shape = gr2_tilde_shape(D)
                assert (shape is not None) == (frozenset(D.cells) in gr2_diagrams), w
                if shape is not None:
                    _, twin = gr2_twin(shape)
                    assert set(rothe_diagram(twin).cells) == set(D.cells)


# --- decomposition


def test_composite_decomposition():
    dec = decompose(COMPOSITE)
    got = sorted(f.w.to_rows() for f in dec.factors)
    expected = sorted([[[1, 0], [0, 0]], [[1, 0], [0, 0]], [[1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 0]]])
    assert got == expected
    assert dec.free_count == 16
    assert len(dec.zero_cells) == 20
    w3 = next(f.w for f in dec.factors if f.w.m == 3)
    assert classify(w3).in_gr2
    assert classify(COMPOSITE).verdict == MINIMAL


def test_single_zero_decomposition():
    dec = decompose(PartialPermutation(1, 1, frozenset()))
    assert dec.zero_cells == frozenset({(1, 1)}) and dec.factors == () and dec.free_count == 0


def test_two_component_example_decomposes():
    dec = decompose(TWO_COMPONENTS)
    assert [f.w.to_rows() for f in dec.factors] == [[[1, 0], [0, 0]]]
    assert dec.factors[0].rows == (1, 2) and dec.factors[0].cols == (2, 3)
    assert dec.free_count == 3
    assert classify(TWO_COMPONENTS).verdict == MINIMAL


def test_decompose_preconditions():
    with pytest.raises(NotVexillary):
        decompose(NONVEX)
    with pytest.raises(TopLeftNotInDiagram):
        decompose(GR2_OMEGA)


def test_decomposition_accounts_for_every_coordinate():
    for m in range(1, 5):
        for n in range(1, 5):
            for w in all_partial_permutations(m, n):
                if not is_vexillary_pattern(w) or (1, 1) not in rothe_diagram(w).cells:
                    continue
                dec = decompose(w)
                used = set(dec.zero_cells) | set(dec.free)
                for f in dec.factors:
                    block = {(r, c) for r in f.rows for c in f.cols}
                    assert not (block & used)
                    used |= block
                assert used == {(i, j) for i in range(1, m + 1) for j in range(1, n + 1)}, w
                # diagram of the product is the disjoint union of factor diagrams plus the zero block
                mapped = set(dec.zero_cells)
                for f in dec.factors:
                    mapped |= {f.to_global(*c) for c in rothe_diagram(f.w).cells}
                assert mapped == set(rothe_diagram(w).cells)
