from fractions import Fraction as F

import numpy as np
import pytest

from schubert.errors import DimensionMismatch, ShapeViolation
from schubert.exact_linalg import RationalMatrix, inner
from schubert.perm_core import Gr2Params, enumerate_gr2, gr2_matrix, parse_partial_permutation
from schubert.gr2_symmetry import (
    CHECK_NAMES,
    LINE_PARAMETERS,
    make_instance,
    phi,
    psi,
    reflection_through,
    shaped_normals,
    t_c,
    t_r,
    verify_normal_action,
)
from schubert.variety import contains_closure, normal_frame, sample_regular

GR2_OMEGA = parse_partial_permutation("1 0 0 0 / 0 0 1 0 / 0 0 0 0")
DETERMINANTAL = parse_partial_permutation("1 0 0 / 0 1 0 / 0 0 0 / 0 0 0")


def instance(w, seed=0):
    return make_instance(w, sample_regular(w, seed))


def test_reflection_fixes_span_and_negates_complement():
    R = reflection_through([(1, 1, 0), (2, 2, 0)], 3)
    U = R.reflection
    assert U @ RationalMatrix([[1], [1], [0]]) == RationalMatrix([[1], [1], [0]])
    assert U @ RationalMatrix([[1], [-1], [0]]) == RationalMatrix([[-1], [1], [0]])
    assert U @ RationalMatrix([[0], [0], [1]]) == RationalMatrix([[0], [0], [-1]])
    assert R.projector @ R.projector == R.projector


def test_empty_span_reflects_everything():
    assert reflection_through([], 2).reflection == -RationalMatrix.identity(2)


def test_maps_fix_q_and_are_involutions():
    inst = instance(GR2_OMEGA, 3)
    Q = inst.q.point
    X = RationalMatrix([[1, F(1, 2), 0, 3], [2, 0, -1, 1], [0, 5, 1, 1]])
    for f in (phi, psi):
        assert f(inst, Q) == Q
        assert f(inst, f(inst, X)) == X
        assert inner(f(inst, X), f(inst, X)) == inner(X, X)


def test_maps_preserve_the_closure():
    inst = instance(GR2_OMEGA, 1)
    for k in range(10):
        A = sample_regular(GR2_OMEGA, (9, k)).point
        assert contains_closure(GR2_OMEGA, phi(inst, A))
        assert contains_closure(GR2_OMEGA, psi(inst, A))


def test_tangent_lines_stay_in_the_closure():
    inst = instance(GR2_OMEGA, 2)
    Q = inst.q.point
    rng = np.random.default_rng(0)
    A = RationalMatrix(rng.integers(-3, 4, size=(3, 4)).tolist())
    B = RationalMatrix([[int(v) for v in r[:2]] + [0, 0] for r in rng.integers(-3, 4, size=(3, 4))])
    for s in LINE_PARAMETERS:
        assert contains_closure(GR2_OMEGA, Q + t_c(inst, A).scale(s))
        assert contains_closure(GR2_OMEGA, Q + t_r(inst, B).scale(s))


def test_t_c_zeroes_leading_columns():
    inst = instance(GR2_OMEGA, 4)
    A = RationalMatrix([[1, 2, 3, 4], [5, 6, 7, 8], [9, 1, 2, 3]])
    T = t_c(inst, A)
    assert all(T[i, j] == 0 for i in range(3) for j in range(2))


def test_t_r_requires_leading_support():
    inst = instance(GR2_OMEGA, 4)
    with pytest.raises(ShapeViolation):
        t_r(inst, RationalMatrix([[0, 0, 1, 0], [0, 0, 0, 0], [0, 0, 0, 0]]))
    with pytest.raises(DimensionMismatch):
        phi(inst, RationalMatrix.zeros(2, 2))


def test_make_instance_rejects_non_gr2():
    w = parse_partial_permutation("1 0 0 0 0 / 0 0 1 0 0 / 0 0 0 0 1 / 0 1 0 0 0")
    with pytest.raises(ShapeViolation):
        make_instance(w, sample_regular(w, 0))


def test_normals_negated_by_the_reflections():
    inst = instance(GR2_OMEGA, 5)
    frame = normal_frame(GR2_OMEGA, inst.q.point)
    for N in frame.gradients:
        image = phi(inst, N)
        for j in range(2, 4):
            assert [image[i, j] for i in range(3)] == [-N[i, j] for i in range(3)]
        assert inner(N, t_c(inst, N)) == 0
    shaped = shaped_normals(inst, frame.gradients)
    assert shaped
    for N in shaped:
        assert psi(inst, N) == -N
        assert inner(N, t_r(inst, N)) == 0


@pytest.mark.parametrize("w", [GR2_OMEGA, DETERMINANTAL, GR2_OMEGA.transpose()], ids=["second", "determinantal", "third"])
def test_full_suite_on_examples(w):
    rep = verify_normal_action(w, samples=10, seed=0)
    assert set(rep.checks) == set(CHECK_NAMES)
    assert rep.ok, rep.as_dict()
    assert rep.samples == 10


def test_third_form_is_recognised():
    p = Gr2Params(r1=1, n1=1, r2=1, n2=1, m1=1, transposed=True)
    inst = make_instance(gr2_matrix(p), sample_regular(gr2_matrix(p), 0))
    assert inst.params.transposed and inst.lead == 2


def test_suite_on_all_small_shapes():
    for params, w in enumerate_gr2(4, 4):
        rep = verify_normal_action(w, samples=2, seed=1)
        assert rep.ok, (params, rep.as_dict())


def test_report_records_counterexamples():
    rep = verify_normal_action(GR2_OMEGA, samples=1)
    rep.fail("closure_phi", "payload")
    assert not rep.ok and rep.as_dict()["counterexamples"]["closure_phi"] == ["payload"]
