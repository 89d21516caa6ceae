"""Matrix Schubert varieties as computational objects.

Membership is decided from upper-left ranks.  Regular points are sampled
from the orbit of the partial permutation under lower x upper triangular
matrices.  At a regular point the gradients of the per-cell minors span the
normal space; the mean curvature vector vanishes exactly when every minor's
Hessian has zero trace over that normal space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .errors import (
    DimensionMismatch,
    FrameDegenerate,
    NotRegularPoint,
    SamplingFailure,
)
from .exact_linalg import (
    IndexedMinor,
    Rational,
    RationalMatrix,
    adjugate_solve_int,
    as_rational,
    cofactors_int,
    complementary_minors_int,
    det,
    gram,
    integer_grid,
    minor_grad,
    minor_hessian_bilinear,
    solve_spd,
)
from .perm_core import Cell, PartialPermutation, RotheDiagram, rothe_diagram

MAX_RETRIES = 1000


def omega_matrix(w: PartialPermutation) -> RationalMatrix:
    return RationalMatrix(w.to_rows())


# ---------------------------------------------------------------------------
# ranks and membership

def _reduce_into(basis: list, v: list[int]) -> bool:
    """Reduce integer vector ``v`` against an echelon basis; append if independent."""
    for piv, b in basis:
        a = v[piv]
        if a:
            bp = b[piv]
            v = [bp * x - a * y for x, y in zip(v, b)]
    nz = next((k for k, x in enumerate(v) if x), None)
    if nz is None:
        return False
    g = math.gcd(*v)
    if g > 1:
        v = [x // g for x in v]
    basis.append((nz, v))
    return True


def rank_profile(A: RationalMatrix) -> dict[Cell, int]:
    """Ranks of every upper-left submatrix A_[p,q], built column by column."""
    grid, _ = integer_grid(A)
    m, n = A.shape
    out = {}
    for p in range(1, m + 1):
        basis: list = []
        r = 0
        for q in range(1, n + 1):
            col = [grid[i][q - 1] for i in range(p)]
            if any(col) and _reduce_into(basis, col):
                r += 1
            out[(p, q)] = r
    return out


def _check_dims(w: PartialPermutation, A: RationalMatrix) -> None:
    if A.shape != w.shape:
        raise DimensionMismatch(f"point has shape {A.shape}, partial permutation {w.shape}")


def contains_closure(w: PartialPermutation, A: RationalMatrix, diagram: Optional[RotheDiagram] = None) -> bool:
    _check_dims(w, A)
    D = diagram or rothe_diagram(w)
    prof = rank_profile(A)
    return all(prof[k] <= D.rank_table[k] for k in prof)


def contains_regular(w: PartialPermutation, A: RationalMatrix, diagram: Optional[RotheDiagram] = None) -> bool:
    _check_dims(w, A)
    D = diagram or rothe_diagram(w)
    return rank_profile(A) == D.rank_table


# ---------------------------------------------------------------------------
# sampling

@dataclass(frozen=True)
class RegularPoint:
    point: RationalMatrix
    lower_factor: RationalMatrix
    upper_factor: RationalMatrix
    seed: Union[int, tuple, str] = "manual"


def regular_point_from_factors(w: PartialPermutation, lower: RationalMatrix, upper: RationalMatrix,
                               seed="manual") -> RegularPoint:
    m, n = w.shape
    if lower.shape != (m, m) or upper.shape != (n, n):
        raise DimensionMismatch("triangular factors have the wrong size")
    for i in range(m):
        if lower[i, i] == 0 or any(lower[i, j] != 0 for j in range(i + 1, m)):
            raise NotRegularPoint("lower factor is not invertible lower triangular")
    for i in range(n):
        if upper[i, i] == 0 or any(upper[i, j] != 0 for j in range(i)):
            raise NotRegularPoint("upper factor is not invertible upper triangular")
    A = lower @ omega_matrix(w) @ upper
    return RegularPoint(A, lower, upper, seed)


def _draw_triangular(rng: np.random.Generator, size: int, bound: int, lower: bool) -> list[list[int]]:
    for _ in range(MAX_RETRIES):
        vals = rng.integers(-bound, bound + 1, size=(size, size))
        if all(vals[i, i] != 0 for i in range(size)):
            break
    else:
        raise SamplingFailure(f"no nonzero diagonal after {MAX_RETRIES} draws")
    out = [[0] * size for _ in range(size)]
    for i in range(size):
        for j in range(size):
            if (lower and j <= i) or (not lower and j >= i):
                out[i][j] = int(vals[i, j])
    return out


def sample_regular(w: PartialPermutation, seed=0, entry_bound: int = 3,
                   diagram: Optional[RotheDiagram] = None) -> RegularPoint:
    """A = lambda * w * mu with random integer triangular factors."""
    if entry_bound < 1:
        raise ValueError("entry_bound must be at least 1")
    rng = np.random.default_rng(seed)
    lam = RationalMatrix(_draw_triangular(rng, w.m, entry_bound, lower=True))
    mu = RationalMatrix(_draw_triangular(rng, w.n, entry_bound, lower=False))
    rp = RegularPoint(lam @ omega_matrix(w) @ mu, lam, mu, seed if isinstance(seed, (int, str)) else tuple(seed))
    if not contains_regular(w, rp.point, diagram):
        raise SamplingFailure("sampled orbit point is not regular")
    return rp


def sample_points(w: PartialPermutation, count: int, seed: int = 0, entry_bound: int = 3,
                  diagram: Optional[RotheDiagram] = None) -> list[RegularPoint]:
    """``count`` points; sample k uses the generator seeded with ``[seed, k]``."""
    D = diagram or rothe_diagram(w)
    return [sample_regular(w, (seed, k), entry_bound, D) for k in range(count)]


def orbit_tangents(rp: RegularPoint) -> list[RationalMatrix]:
    """Derivatives of (I + tE) A and A (I + tE) for elementary triangular E."""
    A = rp.point
    m, n = A.shape
    out = []
    for i in range(m):
        for j in range(i + 1):
            # E_ij A : row j of A moved to row i
            rows = [[0] * n for _ in range(m)]
            rows[i] = list(A.rows[j])
            out.append(RationalMatrix(rows))
    for i in range(n):
        for j in range(i, n):
            # A E_ij : column i of A moved to column j
            rows = [[0] * n for _ in range(m)]
            for r in range(m):
                rows[r][j] = A.rows[r][i]
            out.append(RationalMatrix(rows))
    return out


# ---------------------------------------------------------------------------
# normal frame

def cell_minor(D: RotheDiagram, cell: Cell) -> IndexedMinor:
    rows, cols = D.minor_index(cell)
    return IndexedMinor(rows, cols)


@dataclass(frozen=True)
class NormalFrame:
    cells: tuple[Cell, ...]
    minors: tuple[IndexedMinor, ...]
    gradients: tuple[RationalMatrix, ...]
    gram: Optional[RationalMatrix]
    triangular_check: tuple[tuple[Rational, ...], ...]

    def p_matrix_ok(self) -> bool:
        P = self.triangular_check
        d = len(P)
        return all(P[a][a] != 0 for a in range(d)) and all(
            P[a][b] == 0 for a in range(d) for b in range(a + 1, d)
        )


def normal_frame(w: PartialPermutation, A: RationalMatrix, diagram: Optional[RotheDiagram] = None,
                 order: Optional[Sequence[Cell]] = None, check_regular: bool = True,
                 with_gram: bool = True) -> NormalFrame:
    """Gradients of the per-cell minors at ``A``, lex-ordered unless ``order`` is given."""
    D = diagram or rothe_diagram(w)
    if check_regular and not contains_regular(w, A, D):
        raise NotRegularPoint("point is not in the regular part")
    cells = tuple(order) if order is not None else tuple(sorted(D.cells))
    minors = tuple(cell_minor(D, c) for c in cells)
    grads = []
    for cell, f in zip(cells, minors):
        R, C = D.rc_sets[cell]
        if R and det(A.submatrix([r - 1 for r in R], [c - 1 for c in C])) == 0:
            raise FrameDegenerate(f"restriction to R x C vanishes at cell {cell}")
        grads.append(minor_grad(A, f))
    lex = sorted(cells)
    pos = {c: k for k, c in enumerate(cells)}
    P = tuple(
        tuple(grads[pos[nu]][mu[0] - 1, mu[1] - 1] for mu in lex)
        for nu in lex
    )
    G = gram(grads) if (with_gram and grads) else None
    frame = NormalFrame(cells, minors, tuple(grads), G, P)
    if not frame.p_matrix_ok():
        raise FrameDegenerate("derivative matrix is not lower triangular with nonzero diagonal")
    if G is not None and det(G) == 0:
        raise FrameDegenerate("Gram matrix of the normal frame is singular")
    return frame


# ---------------------------------------------------------------------------
# mean curvature obstruction

def _obstruction_int(D: RotheDiagram, grid: list[list[int]], scale: int,
                     cells: Sequence[Cell]) -> dict[Cell, Rational]:
    """Per-cell normal traces of the minors' Hessians on the scaled integer point.

    The projector onto the normal space does not depend on how each gradient
    is scaled, so the cofactors of ``scale * A`` serve as the frame.  Second
    partials of an s x s minor are homogeneous of degree s-2, which fixes the
    final power of ``scale``.
    """
    m, n = D.m, D.n
    K = m * n
    blocks = []
    frame = []
    for cell in cells:
        rows, cols = D.minor_index(cell)
        M = [[grid[r - 1][c - 1] for c in cols] for r in rows]
        blocks.append((rows, cols, M))
        cof = cofactors_int(M)
        vec = [0] * K
        for a, r in enumerate(rows):
            base = (r - 1) * n
            for b, c in enumerate(cols):
                vec[base + c - 1] = cof[a][b]
        frame.append(vec)
    d = len(frame)
    support = [[x for x in range(K) if v[x]] for v in frame]
    G = [[0] * d for _ in range(d)]
    for a in range(d):
        va = frame[a]
        for b in range(a, d):
            vb = frame[b]
            s = sum(va[x] * vb[x] for x in support[a])
            G[a][b] = G[b][a] = s
    # Z = D * G^{-1} N, column blocks of the normal frame
    Dg, Z = adjugate_solve_int(G, [list(v) for v in frame])
    cache: dict[tuple[int, int], int] = {}

    def proj(x: int, y: int) -> int:
        key = (x, y) if x <= y else (y, x)
        val = cache.get(key)
        if val is None:
            val = sum(frame[mu][x] * Z[mu][y] for mu in range(d) if frame[mu][x])
            cache[key] = val
        return val

    out = {}
    for cell, (rows, cols, M) in zip(cells, blocks):
        s = len(rows)
        if s < 2:
            out[cell] = 0
            continue
        total = 0
        for i, k, j, l, h in complementary_minors_int(M):
            if not h:
                continue
            xij = (rows[i] - 1) * n + cols[j] - 1
            xkl = (rows[k] - 1) * n + cols[l] - 1
            xil = (rows[i] - 1) * n + cols[l] - 1
            xkj = (rows[k] - 1) * n + cols[j] - 1
            total += h * (proj(xij, xkl) - proj(xil, xkj))
        out[cell] = as_rational(Fraction(2 * total, Dg * scale ** (s - 2)))
    return out


def obstruction(w: PartialPermutation, A: RationalMatrix, diagram: Optional[RotheDiagram] = None,
                check_regular: bool = True) -> dict[Cell, Rational]:
    """Normal-space trace of Hess f at A for every diagram cell, lex-ordered."""
    D = diagram or rothe_diagram(w)
    if check_regular and not contains_regular(w, A, D):
        raise NotRegularPoint("point is not in the regular part")
    if not D.cells:
        return {}
    cells = tuple(sorted(D.cells))
    grid, c = integer_grid(A)
    return _obstruction_int(D, grid, c, cells)


def obstruction_reference(w: PartialPermutation, A: RationalMatrix, diagram: Optional[RotheDiagram] = None,
                          order: Optional[Sequence[Cell]] = None) -> dict[Cell, Rational]:
    """Literal double sum over the frame with G^{-1} taken column by column.

    Slow; kept as an independent route for cross-checking :func:`obstruction`.
    """
    D = diagram or rothe_diagram(w)
    frame = normal_frame(w, A, D, order=order)
    d = len(frame.cells)
    if d == 0:
        return {}
    G = frame.gram
    inv_cols = [solve_spd(G, [int(a == b) for a in range(d)]) for b in range(d)]
    out = {}
    for nu, f in zip(frame.cells, frame.minors):
        total = 0
        for a in range(d):
            for b in range(d):
                g = inv_cols[b][a]
                if g:
                    total += g * minor_hessian_bilinear(A, f, frame.gradients[a], frame.gradients[b])
        out[nu] = as_rational(total)
    return out


def is_stationary_at(w: PartialPermutation, A: RationalMatrix, diagram: Optional[RotheDiagram] = None) -> bool:
    return all(v == 0 for v in obstruction(w, A, diagram).values())


# ---------------------------------------------------------------------------
# product points for decompositions

def embed_product_point(m: int, n: int, factors, factor_points: Sequence[RationalMatrix],
                        free: Sequence[Cell], free_values: Sequence) -> RationalMatrix:
    """Assemble a point from factor blocks and free coordinates; zeros elsewhere."""
    grid = [[0] * n for _ in range(m)]
    for f, P in zip(factors, factor_points):
        for a, r in enumerate(f.rows):
            for b, c in enumerate(f.cols):
                grid[r - 1][c - 1] = P[a, b]
    for (i, j), v in zip(free, free_values):
        grid[i - 1][j - 1] = v
    return RationalMatrix(grid)


def sample_product_point(w: PartialPermutation, decomposition, seed=0, entry_bound: int = 3,
                         diagram: Optional[RotheDiagram] = None):
    """Regular point of ``w`` assembled from sampled factor points and free values.

    Returns ``(A, factor_points, free_values)``.  Free values are nonzero
    integers; a draw is rejected if the assembled point misses the regular
    part, which happens only on a thin set.
    """
    D = diagram or rothe_diagram(w)
    rng = np.random.default_rng(seed)
    for attempt in range(MAX_RETRIES):
        pts = [sample_regular(f.w, rng.integers(0, 2**32, size=2).tolist(), entry_bound).point
               for f in decomposition.factors]
        signs = rng.choice([-1, 1], size=decomposition.free_count)
        free = [int(s * v) for s, v in zip(signs, rng.integers(1, entry_bound + 1, size=decomposition.free_count))]
        A = embed_product_point(w.m, w.n, decomposition.factors, pts, decomposition.free, free)
        if contains_regular(w, A, D):
            return A, pts, free
    raise SamplingFailure(f"no regular product point after {MAX_RETRIES} draws")
