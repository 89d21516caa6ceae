"""Reflection symmetries of Gr2-form varieties and their action on normals.

For a regular point Q of a second-form Gr2 variety, ``phi`` reflects every
column through the column space of Q and ``psi`` reflects the leading
``r1+n1`` coordinates of every row through the row space of that block.
Both maps fix Q and preserve the variety.  Tangent vectors ``t_c`` and
``t_r`` force the trailing columns of every normal vector into C(Q)^perp,
and normals supported on the leading columns into the reflected row space.
Together these kill the mean curvature at Q; the checks below verify each
step exactly at sampled points.

Third-form instances are handled by transposing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateRowSpace, DimensionMismatch, ShapeViolation
from .exact_linalg import (
    RationalMatrix,
    as_rational,
    format_rational,
    inner,
    nullspace,
    rank,
    solve,
)
from .perm_core import Gr2Params, PartialPermutation, RotheDiagram, gr2_matrix, rothe_diagram
from .variety import (
    RegularPoint,
    contains_closure,
    normal_frame,
    obstruction,
    sample_regular,
)

LINE_PARAMETERS = (-7, -1, Fraction(1, 3), 2, 11)


@dataclass(frozen=True)
class ReflectionData:
    """``reflection`` is the identity on the span of ``subspace_basis`` and minus it on the complement."""

    subspace_basis: tuple[tuple, ...]
    projector: RationalMatrix
    reflection: RationalMatrix


def _independent_columns(M: RationalMatrix) -> list[int]:
    chosen: list[int] = []
    for j in range(M.ncols):
        trial = chosen + [j]
        if rank(M.submatrix(range(M.nrows), trial)) == len(trial):
            chosen = trial
    return chosen


def reflection_through(vectors: Sequence[Sequence], dim: int) -> ReflectionData:
    """2P - I for the orthogonal projector P onto span(vectors) in Q^dim."""
    if not vectors:
        P = RationalMatrix.zeros(dim, dim)
        return ReflectionData((), P, -RationalMatrix.identity(dim))
    B = RationalMatrix(list(zip(*vectors)))  # dim x k, vectors as columns
    keep = _independent_columns(B)
    B = B.submatrix(range(dim), keep)
    BtB = B.T @ B
    P = B @ solve(BtB, B.T)
    U = P.scale(2) - RationalMatrix.identity(dim)
    return ReflectionData(tuple(B.column(j) for j in range(B.ncols)), P, U)


@dataclass(frozen=True)
class Gr2Instance:
    params: Gr2Params
    w: PartialPermutation
    q: RegularPoint

    @property
    def lead(self) -> int:
        """Number of leading columns r1 + n1 (in the second-form orientation)."""
        return self.params.r1 + self.params.n1

    def oriented(self, A: RationalMatrix) -> RationalMatrix:
        return A.T if self.params.transposed else A

    @property
    def q_oriented(self) -> RationalMatrix:
        return self.oriented(self.q.point)

    @property
    def column_reflection(self) -> ReflectionData:
        return _column_reflection(self.q_oriented)

    @property
    def row_reflection(self) -> ReflectionData:
        return _row_reflection(self.q_oriented, self.lead)


@lru_cache(maxsize=256)
def _column_reflection(Q: RationalMatrix) -> ReflectionData:
    return reflection_through([Q.column(j) for j in range(Q.ncols)], Q.nrows)


@lru_cache(maxsize=256)
def _row_reflection(Q: RationalMatrix, lead: int) -> ReflectionData:
    return reflection_through([r[:lead] for r in Q.rows], lead)


def make_instance(w: PartialPermutation, q: RegularPoint, params: Optional[Gr2Params] = None) -> Gr2Instance:
    from .perm_core import match_gr2

    params = params or match_gr2(w)
    if params is None or gr2_matrix(params) != w:
        raise ShapeViolation("partial permutation is not in a Gr2 block form")
    if q.point.shape != w.shape:
        raise DimensionMismatch("point and partial permutation differ in shape")
    return Gr2Instance(params, w, q)


def _check_shape(inst: Gr2Instance, A: RationalMatrix) -> None:
    if A.shape != inst.w.shape:
        raise DimensionMismatch(f"expected a {inst.w.m}x{inst.w.n} matrix, got {A.shape}")


def phi(inst: Gr2Instance, A: RationalMatrix) -> RationalMatrix:
    """Reflect every column through C(Q)."""
    _check_shape(inst, A)
    U = inst.column_reflection.reflection
    return inst.oriented(U @ inst.oriented(A))


def psi(inst: Gr2Instance, B: RationalMatrix) -> RationalMatrix:
    """Reflect the leading r1+n1 entries of every row through the row space of Q's leading block."""
    _check_shape(inst, B)
    Bo = inst.oriented(B)
    V = inst.row_reflection.reflection
    lead = inst.lead
    rows = []
    for r in Bo.rows:
        head = [sum(V[a, b] * r[b] for b in range(lead)) for a in range(lead)]
        rows.append(head + list(r[lead:]))
    return inst.oriented(RationalMatrix(rows))


def t_c(inst: Gr2Instance, A: RationalMatrix) -> RationalMatrix:
    """Zero the leading columns; project the trailing ones onto C(Q)."""
    _check_shape(inst, A)
    Ao = inst.oriented(A)
    P = inst.column_reflection.projector
    PA = P @ Ao
    lead = inst.lead
    rows = [[0] * lead + list(r[lead:]) for r in PA.rows]
    return inst.oriented(RationalMatrix(rows))


def _row_completion(Q: RationalMatrix, r1: int, lead: int):
    """Solve v = c^T Q[:r1, :lead] and return c^T Q[:r1, lead:]."""
    top = Q.submatrix(range(r1), range(lead))
    if rank(top) != r1:
        raise DegenerateRowSpace("leading r1 rows of Q are not independent")
    tail = Q.submatrix(range(r1), range(lead, Q.ncols)) if lead < Q.ncols else None
    gram_top = top @ top.T

    def complete(v: Sequence) -> list:
        rhs = RationalMatrix([[x] for x in v])
        c = solve(gram_top, top @ rhs)  # r1 x 1
        back = (c.T @ top).rows[0]
        if list(back) != [as_rational(x) for x in v]:
            raise DegenerateRowSpace("projected row is not in the row space of the leading block")
        if tail is None:
            return []
        return list((c.T @ tail).rows[0])

    return complete


def t_r(inst: Gr2Instance, B: RationalMatrix) -> RationalMatrix:
    """Project rows onto the leading row space and complete them inside the row space of Q's top rows."""
    _check_shape(inst, B)
    Bo = inst.oriented(B)
    lead = inst.lead
    if any(x != 0 for r in Bo.rows for x in r[lead:]):
        raise ShapeViolation("t_r needs a matrix supported on the leading r1+n1 columns")
    P = inst.row_reflection.projector
    complete = _row_completion(inst.q_oriented, inst.params.r1, lead)
    rows = []
    for r in Bo.rows:
        v = [sum(P[a, b] * r[b] for b in range(lead)) for a in range(lead)]
        rows.append(v + complete(v))
    return inst.oriented(RationalMatrix(rows))


# ---------------------------------------------------------------------------
# verification suite

CHECK_NAMES = (
    "involution", "isometry", "fixes_q", "closure_phi", "closure_psi",
    "tangency_tc", "tangency_tr", "normal_action_phi", "normal_action_psi", "obstruction_zero",
)


@dataclass
class SymmetryReport:
    params: Gr2Params
    samples: int = 0
    checks: dict = field(default_factory=lambda: {k: True for k in CHECK_NAMES})
    counterexamples: dict = field(default_factory=dict)
    shaped_normals: int = 0

    def fail(self, name: str, payload) -> None:
        self.checks[name] = False
        self.counterexamples.setdefault(name, []).append(payload)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def merge(self, other: "SymmetryReport") -> None:
        self.samples += other.samples
        self.shaped_normals += other.shaped_normals
        for k, v in other.checks.items():
            if not v:
                self.checks[k] = False
        for k, v in other.counterexamples.items():
            self.counterexamples.setdefault(k, []).extend(v)

    def as_dict(self) -> dict:
        return {
            "params": self.params.as_dict(),
            "samples": self.samples,
            "checks": dict(self.checks),
            "counterexamples": {k: [str(x) for x in v[:3]] for k, v in self.counterexamples.items()},
        }


def _random_matrix(rng: np.random.Generator, m: int, n: int, bound: int = 4) -> RationalMatrix:
    vals = rng.integers(-bound, bound + 1, size=(m, n))
    return RationalMatrix([[int(x) for x in row] for row in vals])


def shaped_normals(inst: Gr2Instance, gradients: Sequence[RationalMatrix]) -> list[RationalMatrix]:
    """Basis of the normal vectors supported on the leading r1+n1 columns (oriented frame)."""
    lead = inst.lead
    grads = [inst.oriented(g) for g in gradients]
    if not grads:
        return []
    m, n = grads[0].shape
    trailing = [(i, j) for i in range(m) for j in range(lead, n)]
    if not trailing:
        return list(grads)
    # columns of the linear map c -> trailing entries of sum c_k N_k
    M = RationalMatrix([[g[i, j] for g in grads] for i, j in trailing])
    out = []
    for c in nullspace(M):
        acc = RationalMatrix.zeros(m, n)
        for ck, g in zip(c, grads):
            if ck:
                acc = acc + g.scale(ck)
        out.append(acc)
    return out


def verify_at_point(inst: Gr2Instance, rng: np.random.Generator, diagram: Optional[RotheDiagram] = None,
                    closure_samples: int = 3, line_samples: int = 1) -> SymmetryReport:
    w = inst.w
    D = diagram or rothe_diagram(w)
    Q = inst.q.point
    rep = SymmetryReport(inst.params, samples=1)
    m, n = w.shape
    lead = inst.lead

    # reflections themselves
    for name, R in (("column", inst.column_reflection), ("row", inst.row_reflection)):
        U = R.reflection
        k = U.nrows
        if U @ U != RationalMatrix.identity(k) or U != U.T:
            rep.fail("involution", (name, "reflection not a symmetric involution"))
        for v in R.subspace_basis:
            col = RationalMatrix([[x] for x in v])
            if U @ col != col:
                rep.fail("involution", (name, "basis vector not fixed"))

    X = _random_matrix(rng, m, n)
    Y = _random_matrix(rng, m, n)
    for fname, f in (("phi", phi), ("psi", psi)):
        if f(inst, f(inst, X)) != X:
            rep.fail("involution", (fname, X))
        if inner(f(inst, X), f(inst, Y)) != inner(X, Y):
            rep.fail("isometry", (fname, X, Y))
        if f(inst, Q) != Q:
            rep.fail("fixes_q", (fname, Q))

    for k in range(closure_samples):
        A = sample_regular(w, rng.integers(0, 2**32, size=2).tolist(), 3, D).point
        if not contains_closure(w, phi(inst, A), D):
            rep.fail("closure_phi", A)
        if not contains_closure(w, psi(inst, A), D):
            rep.fail("closure_psi", A)

    for _ in range(line_samples):
        A = _random_matrix(rng, m, n)
        tc = t_c(inst, A)
        Bo = [list(r[:lead]) + [0] * (len(r) - lead) for r in inst.oriented(_random_matrix(rng, m, n)).rows]
        B = inst.oriented(RationalMatrix(Bo))
        tr = t_r(inst, B)
        for s in LINE_PARAMETERS:
            if not contains_closure(w, Q + tc.scale(s), D):
                rep.fail("tangency_tc", (s, A))
            if not contains_closure(w, Q + tr.scale(s), D):
                rep.fail("tangency_tr", (s, B))

    frame = normal_frame(w, Q, D, with_gram=False)
    P_C = inst.column_reflection.projector
    for cell, N in zip(frame.cells, frame.gradients):
        if inner(N, t_c(inst, N)) != 0:
            rep.fail("tangency_tc", ("normal", cell))
        No = inst.oriented(N)
        lhs = inst.oriented(phi(inst, N))
        for j in range(lead, No.ncols):
            colj = [No[i, j] for i in range(No.nrows)]
            if any(x != 0 for x in (P_C @ RationalMatrix([[x] for x in colj])).column(0)):
                rep.fail("normal_action_phi", (cell, j + 1, "column not orthogonal to C(Q)"))
            if [lhs[i, j] for i in range(No.nrows)] != [-x for x in colj]:
                rep.fail("normal_action_phi", (cell, j + 1))
    shaped = shaped_normals(inst, frame.gradients)
    rep.shaped_normals = len(shaped)
    for No in shaped:
        N = inst.oriented(No)
        if inner(N, t_r(inst, N)) != 0:
            rep.fail("tangency_tr", ("normal", N))
        if psi(inst, N) != -N:
            rep.fail("normal_action_psi", N)

    obs = obstruction(w, Q, D, check_regular=False)
    if any(v != 0 for v in obs.values()):
        rep.fail("obstruction_zero", {c: format_rational(v) for c, v in obs.items() if v})
    return rep


def verify_normal_action(w: PartialPermutation, samples: int = 20, seed: int = 0,
                         params: Optional[Gr2Params] = None, closure_samples: int = 3) -> SymmetryReport:
    """Run the full symmetry suite at ``samples`` seeded regular points."""
    D = rothe_diagram(w)
    total: Optional[SymmetryReport] = None
    for k in range(samples):
        q = sample_regular(w, (seed, k), 3, D)
        inst = make_instance(w, q, params)
        rng = np.random.default_rng((seed, k, 1))
        rep = verify_at_point(inst, rng, D, closure_samples=closure_samples)
        if total is None:
            total = rep
        else:
            total.merge(rep)
    if total is None:
        total = SymmetryReport(params or make_instance(w, sample_regular(w, seed, 3, D)).params)
    return total
