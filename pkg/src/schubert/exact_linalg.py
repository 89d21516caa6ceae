"""Dense exact rational linear algebra and determinant calculus.

Entries are Python ``int`` or :class:`fractions.Fraction`; integral
fractions are normalised to ``int`` so that the common case (points sampled
from integer triangular factors) stays in fast integer arithmetic.

Matrices are indexed 0-based like any Python grid.  :class:`IndexedMinor`
and the ``unit`` constructor use the 1-based positions of the underlying
mathematics, since they name entries ``x_ij`` of a variable matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from numbers import Integral
from typing import Iterable, Sequence, Union

from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    NotSquare,
    ParseError,
    SingularGram,
)

Rational = Union[int, Fraction]

__all__ = [
    "Rational",
    "RationalMatrix",
    "IndexedMinor",
    "parse_rational",
    "format_rational",
    "parse_rational_matrix",
    "det",
    "rank",
    "inner",
    "gram",
    "solve_spd",
    "solve",
    "nullspace",
    "minor_eval",
    "minor_grad",
    "minor_hessian_bilinear",
    "minor_second_partial",
    "laplace_det",
]


def as_rational(x) -> Rational:
    if type(x) is int:
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, Integral):
        return int(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"not an exact rational: {x!r}")


def parse_rational(text: str) -> Rational:
    """Parse ``"p/q"`` or ``"p"``."""
    try:
        return as_rational(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"not a rational number: {text!r}") from exc


def format_rational(x: Rational) -> str:
    return str(as_rational(x))


class RationalMatrix:
    """Immutable dense matrix of exact rationals."""

    __slots__ = ("rows", "nrows", "ncols", "_hash")

    def __init__(self, rows: Iterable[Iterable]):
        grid = tuple(tuple(as_rational(x) for x in row) for row in rows)
        if not grid or not grid[0]:
            raise DimensionMismatch("matrix must have at least one row and one column")
        width = len(grid[0])
        if any(len(row) != width for row in grid):
            raise DimensionMismatch("ragged rows")
        self.rows = grid
        self.nrows = len(grid)
        self.ncols = width
        self._hash = None

    @classmethod
    def _trusted(cls, grid: tuple) -> "RationalMatrix":
        # grid already normalised and rectangular
        obj = cls.__new__(cls)
        obj.rows = grid
        obj.nrows = len(grid)
        obj.ncols = len(grid[0])
        obj._hash = None
        return obj

    @classmethod
    def zeros(cls, m: int, n: int) -> "RationalMatrix":
        return cls._trusted(tuple((0,) * n for _ in range(m)))

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls._trusted(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def unit(cls, m: int, n: int, i: int, j: int) -> "RationalMatrix":
        """The matrix unit E_{i,j} (1-based) of shape m x n."""
        if not (1 <= i <= m and 1 <= j <= n):
            raise IndexOutOfRange(f"E_{{{i},{j}}} outside {m}x{n}")
        return cls._trusted(
            tuple(tuple(int(a == i - 1 and b == j - 1) for b in range(n)) for a in range(m))
        )

    @classmethod
    def from_function(cls, m: int, n: int, fn) -> "RationalMatrix":
        return cls(tuple(fn(i, j) for j in range(n)) for i in range(m))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, idx):
        if isinstance(idx, tuple):
            i, j = idx
            return self.rows[i][j]
        return self.rows[idx]

    def __iter__(self):
        return iter(self.rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.rows)
        return self._hash

    def __repr__(self) -> str:
        body = "; ".join(" ".join(format_rational(x) for x in row) for row in self.rows)
        return f"RationalMatrix([{body}])"

    def _check_same_shape(self, other: "RationalMatrix") -> None:
        if self.shape != other.shape:
            raise DimensionMismatch(f"shapes {self.shape} and {other.shape} differ")

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        self._check_same_shape(other)
        return RationalMatrix._trusted(
            tuple(
                tuple(as_rational(a + b) for a, b in zip(r, s))
                for r, s in zip(self.rows, other.rows)
            )
        )

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        self._check_same_shape(other)
        return RationalMatrix._trusted(
            tuple(
                tuple(as_rational(a - b) for a, b in zip(r, s))
                for r, s in zip(self.rows, other.rows)
            )
        )

    def __neg__(self) -> "RationalMatrix":
        return RationalMatrix._trusted(tuple(tuple(-a for a in r) for r in self.rows))

    def scale(self, c) -> "RationalMatrix":
        c = as_rational(c)
        return RationalMatrix._trusted(
            tuple(tuple(as_rational(c * a) for a in r) for r in self.rows)
        )

    def __mul__(self, c) -> "RationalMatrix":
        if isinstance(c, RationalMatrix):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        cols = tuple(zip(*other.rows))
        return RationalMatrix._trusted(
            tuple(
                tuple(as_rational(sum(a * b for a, b in zip(r, c))) for c in cols)
                for r in self.rows
            )
        )

    @property
    def T(self) -> "RationalMatrix":
        return RationalMatrix._trusted(tuple(zip(*self.rows)))

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "RationalMatrix":
        """Restriction to the given 0-based rows and columns, in the given order."""
        return RationalMatrix._trusted(tuple(tuple(self.rows[i][j] for j in cols) for i in rows))

    def upper_left(self, p: int, q: int) -> "RationalMatrix":
        return RationalMatrix._trusted(tuple(r[:q] for r in self.rows[:p]))

    def with_entry(self, i: int, j: int, value) -> "RationalMatrix":
        grid = [list(r) for r in self.rows]
        grid[i][j] = as_rational(value)
        return RationalMatrix._trusted(tuple(tuple(r) for r in grid))

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    def is_integral(self) -> bool:
        return all(type(x) is int for r in self.rows for x in r)

    def flat(self) -> tuple:
        return tuple(x for r in self.rows for x in r)

    def to_strings(self) -> list[list[str]]:
        return [[format_rational(x) for x in r] for r in self.rows]

    @classmethod
    def from_strings(cls, rows: Sequence[Sequence[str]]) -> "RationalMatrix":
        return cls(tuple(parse_rational(x) for x in r) for r in rows)


def parse_rational_matrix(text: str) -> RationalMatrix:
    """Rows separated by newlines or ``/``; entries ``p/q`` separated by spaces."""
    lines = [ln for ln in text.replace(";", "\n").splitlines() if ln.strip()]
    if len(lines) == 1 and " / " in lines[0]:
        lines = [part for part in lines[0].split(" / ") if part.strip()]
    if not lines:
        raise ParseError("empty matrix")
    rows = [[parse_rational(tok) for tok in ln.split()] for ln in lines]
    if len({len(r) for r in rows}) != 1:
        raise ParseError("ragged rows")
    return RationalMatrix(rows)


# ---------------------------------------------------------------------------
# integer kernels

def _row_scaled_grid(rows) -> tuple[list[list[int]], int]:
    """Scale each row to integers; return the grid and the product of scales."""
    grid = []
    total = 1
    for row in rows:
        if all(type(x) is int for x in row):
            grid.append(list(row))
            continue
        c = 1
        for x in row:
            if type(x) is not int:
                c = c * x.denominator // math.gcd(c, x.denominator)
        grid.append([int(x * c) for x in row])
        total *= c
    return grid, total


def integer_grid(A: RationalMatrix) -> tuple[list[list[int]], int]:
    """Scale ``A`` by the lcm of its denominators: returns (c*A as ints, c)."""
    c = 1
    for row in A.rows:
        for x in row:
            if type(x) is not int:
                c = c * x.denominator // math.gcd(c, x.denominator)
    if c == 1:
        return [list(r) for r in A.rows], 1
    return [[int(x * c) for x in r] for r in A.rows], c


def det_int(M: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant of an integer matrix."""
    n = len(M)
    if n == 0:
        return 1
    if n == 1:
        return M[0][0]
    if n == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    if n == 3:
        a, b, c = M[0]
        d, e, f = M[1]
        g, h, i = M[2]
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    M = [list(r) for r in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for r in range(k + 1, n):
                if M[r][k] != 0:
                    M[k], M[r] = M[r], M[k]
                    sign = -sign
                    break
            else:
                return 0
        rowk = M[k]
        pk = rowk[k]
        for i in range(k + 1, n):
            rowi = M[i]
            aik = rowi[k]
            if aik == 0:
                if pk != prev:
                    for j in range(k + 1, n):
                        rowi[j] = pk * rowi[j] // prev
            else:
                for j in range(k + 1, n):
                    rowi[j] = (pk * rowi[j] - aik * rowk[j]) // prev
        prev = pk
    return sign * M[n - 1][n - 1]


def cofactors_int(M: Sequence[Sequence[int]]) -> list[list[int]]:
    """Signed cofactors C_ij = (-1)^(i+j) det(M without row i, column j)."""
    s = len(M)
    if s == 1:
        return [[1]]
    out = []
    for i in range(s):
        rows = [M[r] for r in range(s) if r != i]
        out_row = []
        for j in range(s):
            sub = [[row[c] for c in range(s) if c != j] for row in rows]
            d = det_int(sub)
            out_row.append(-d if (i + j) & 1 else d)
        out.append(out_row)
    return out


def complementary_minors_int(M: Sequence[Sequence[int]]) -> list[tuple[int, int, int, int, int]]:
    """Second partials of det over an s x s block, one record per i<k, j<l.

    Each record ``(i, k, j, l, h)`` carries ``h = d^2 det / dM_ij dM_kl``;
    the mixed partial ``d^2 det / dM_il dM_kj`` equals ``-h``.  All other
    second partials vanish.
    """
    s = len(M)
    out = []
    for i, k in combinations(range(s), 2):
        rows = [M[r] for r in range(s) if r != i and r != k]
        for j, l in combinations(range(s), 2):
            sub = [[row[c] for c in range(s) if c != j and c != l] for row in rows]
            h = det_int(sub)
            if (i + j + k + l) & 1:
                h = -h
            out.append((i, k, j, l, h))
    return out


def rank_int(M: Sequence[Sequence[int]]) -> int:
    """Rank of an integer matrix by fraction-free row reduction."""
    rows = [list(r) for r in M if any(r)]
    if not rows:
        return 0
    ncols = len(rows[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r]
        for i in range(r + 1, len(rows)):
            a = rows[i][c]
            if a:
                ri = rows[i]
                pc = p[c]
                rows[i] = [pc * x - a * y for x, y in zip(ri, p)]
                g = math.gcd(*rows[i])
                if g > 1:
                    rows[i] = [x // g for x in rows[i]]
        r += 1
        if r == len(rows):
            break
    return r


def adjugate_solve_int(G: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> tuple[int, list[list[int]]]:
    """Fraction-free Gauss-Jordan on ``[G | B]``.

    Returns ``(D, Z)`` with ``D = det(G)`` and ``Z = D * G^{-1} B`` as exact
    integers.  Raises :class:`SingularGram` when ``G`` is singular.
    """
    n = len(G)
    if n == 0:
        return 1, []
    k_extra = len(B[0]) if B else 0
    M = [list(G[i]) + list(B[i]) for i in range(n)]
    width = n + k_extra
    sign = 1
    prev = 1
    for k in range(n):
        if M[k][k] == 0:
            for r in range(k + 1, n):
                if M[r][k] != 0:
                    M[k], M[r] = M[r], M[k]
                    sign = -sign
                    break
            else:
                raise SingularGram("Gram matrix is singular")
        rowk = M[k]
        pk = rowk[k]
        for i in range(n):
            if i == k:
                continue
            rowi = M[i]
            aik = rowi[k]
            for j in range(width):
                if j != k:
                    rowi[j] = (pk * rowi[j] - aik * rowk[j]) // prev
            rowi[k] = 0
        prev = pk
    # every pivot row now carries D = prev on the diagonal (up to the swap sign)
    D = prev
    Z = [row[n:] for row in M]
    if sign < 0:
        D = -D
        Z = [[-x for x in row] for row in Z]
    return D, Z


# ---------------------------------------------------------------------------
# determinants and ranks of rational matrices

def det(A: RationalMatrix) -> Rational:
    """Exact determinant (fraction-free elimination after row scaling)."""
    if A.nrows != A.ncols:
        raise NotSquare(f"determinant of a {A.nrows}x{A.ncols} matrix")
    grid, scale = _row_scaled_grid(A.rows)
    d = det_int(grid)
    return as_rational(Fraction(d, scale)) if scale != 1 else d


def laplace_det(A: RationalMatrix) -> Rational:
    """Cofactor expansion along the first row.  Testing oracle only."""
    if A.nrows != A.ncols:
        raise NotSquare(f"determinant of a {A.nrows}x{A.ncols} matrix")

    def rec(rows: tuple) -> Rational:
        n = len(rows)
        if n == 1:
            return rows[0][0]
        total = 0
        for j, a in enumerate(rows[0]):
            if a == 0:
                continue
            sub = tuple(r[:j] + r[j + 1:] for r in rows[1:])
            term = a * rec(sub)
            total += -term if j & 1 else term
        return total

    return as_rational(rec(A.rows))


def rank(A: RationalMatrix) -> int:
    grid, _ = _row_scaled_grid(A.rows)
    return rank_int(grid)


def inner(A: RationalMatrix, B: RationalMatrix) -> Rational:
    """Trace inner product tr(A^T B)."""
    A._check_same_shape(B)
    return as_rational(sum(a * b for r, s in zip(A.rows, B.rows) for a, b in zip(r, s)))


def gram(vectors: Sequence[RationalMatrix]) -> RationalMatrix:
    if not vectors:
        raise DimensionMismatch("Gram matrix of an empty family")
    shape = vectors[0].shape
    if any(v.shape != shape for v in vectors):
        raise DimensionMismatch("Gram matrix of differently shaped vectors")
    flats = [v.flat() for v in vectors]
    k = len(flats)
    entries = [[0] * k for _ in range(k)]
    for a in range(k):
        for b in range(a, k):
            val = as_rational(sum(x * y for x, y in zip(flats[a], flats[b])))
            entries[a][b] = entries[b][a] = val
    return RationalMatrix._trusted(tuple(tuple(r) for r in entries))


def _eliminate(G: RationalMatrix, rhs: list[list[Fraction]]) -> list[list[Rational]]:
    """Solve G X = RHS (rhs given column-major) by elimination with row swaps."""
    n = G.nrows
    if G.ncols != n:
        raise NotSquare("coefficient matrix must be square")
    cols = len(rhs)
    M = [[Fraction(x) for x in G.rows[i]] + [Fraction(rhs[c][i]) for c in range(cols)] for i in range(n)]
    for k in range(n):
        piv = next((r for r in range(k, n) if M[r][k] != 0), None)
        if piv is None:
            raise SingularGram("coefficient matrix is singular")
        M[k], M[piv] = M[piv], M[k]
        pk = M[k][k]
        rowk = [x / pk for x in M[k]]
        M[k] = rowk
        for i in range(n):
            if i != k and M[i][k] != 0:
                a = M[i][k]
                M[i] = [x - a * y for x, y in zip(M[i], rowk)]
    return [[as_rational(M[i][n + c]) for i in range(n)] for c in range(cols)]


def solve_spd(G: RationalMatrix, b: Sequence) -> list[Rational]:
    """Exact solution of ``G x = b`` for a nonsingular symmetric ``G``."""
    if len(b) != G.nrows:
        raise DimensionMismatch(f"right-hand side has length {len(b)}, expected {G.nrows}")
    return _eliminate(G, [[as_rational(x) for x in b]])[0]


def solve(G: RationalMatrix, B: RationalMatrix) -> RationalMatrix:
    """Exact solution ``X`` of ``G X = B``, solved column by column."""
    if B.nrows != G.nrows:
        raise DimensionMismatch("right-hand side row count mismatch")
    cols = _eliminate(G, [list(B.column(j)) for j in range(B.ncols)])
    return RationalMatrix._trusted(tuple(zip(*cols)))


def nullspace(A: RationalMatrix) -> list[tuple[Rational, ...]]:
    """Basis of ``{x : A x = 0}`` from the reduced row echelon form."""
    m, n = A.shape
    M = [[Fraction(x) for x in r] for r in A.rows]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        pc = M[r][c]
        M[r] = [x / pc for x in M[r]]
        for i in range(m):
            if i != r and M[i][c] != 0:
                a = M[i][c]
                M[i] = [x - a * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, pc in zip(M, pivots):
            v[pc] = -row[f]
        basis.append(tuple(as_rational(x) for x in v))
    return basis


# ---------------------------------------------------------------------------
# minors of a variable matrix, evaluated at a point

@dataclass(frozen=True)
class IndexedMinor:
    """The minor of the m x n variable matrix on the given 1-based rows/columns."""

    row_set: tuple[int, ...]
    col_set: tuple[int, ...]

    def __post_init__(self):
        rows, cols = tuple(self.row_set), tuple(self.col_set)
        object.__setattr__(self, "row_set", rows)
        object.__setattr__(self, "col_set", cols)
        if len(rows) != len(cols):
            raise DimensionMismatch("row and column index sets differ in size")
        if not rows:
            raise DimensionMismatch("empty minor")
        if any(a >= b for a, b in zip(rows, rows[1:])) or any(a >= b for a, b in zip(cols, cols[1:])):
            raise DimensionMismatch("index sets must be strictly ascending")

    @property
    def size(self) -> int:
        return len(self.row_set)

    def check_bounds(self, m: int, n: int) -> None:
        if self.row_set[0] < 1 or self.row_set[-1] > m or self.col_set[0] < 1 or self.col_set[-1] > n:
            raise IndexOutOfRange(f"minor {self.row_set}x{self.col_set} outside a {m}x{n} matrix")

    def contains(self, a: int, b: int) -> bool:
        return a in self.row_set and b in self.col_set


def _block(A: RationalMatrix, f: IndexedMinor) -> RationalMatrix:
    f.check_bounds(A.nrows, A.ncols)
    return A.submatrix([r - 1 for r in f.row_set], [c - 1 for c in f.col_set])


def minor_eval(A: RationalMatrix, f: IndexedMinor) -> Rational:
    return det(_block(A, f))


def minor_grad(A: RationalMatrix, f: IndexedMinor) -> RationalMatrix:
    """Matrix of first partials of ``f`` at ``A`` (signed cofactors on the block)."""
    block = _block(A, f)
    grid, c = integer_grid(block)
    cof = cofactors_int(grid)
    # cofactors are homogeneous of degree s-1 in the entries
    denom = c ** (f.size - 1)
    out = [[0] * A.ncols for _ in range(A.nrows)]
    for a, r in enumerate(f.row_set):
        for b, col in enumerate(f.col_set):
            val = cof[a][b]
            out[r - 1][col - 1] = as_rational(Fraction(val, denom)) if denom != 1 else val
    return RationalMatrix._trusted(tuple(tuple(r) for r in out))


def minor_hessian_bilinear(
    A: RationalMatrix, f: IndexedMinor, V: RationalMatrix, W: RationalMatrix
) -> Rational:
    """``sum V_x d^2f/dx dx' W_x'`` at ``A``, by multilinearity in the rows.

    For rows ``i != j`` of the block, row ``i`` is replaced by ``V``'s
    restriction and row ``j`` by ``W``'s; the determinants are summed over
    ordered pairs.
    """
    if V.shape != A.shape or W.shape != A.shape:
        raise DimensionMismatch("direction matrices must match the point's shape")
    block = _block(A, f).rows
    vb = _block(V, f).rows
    wb = _block(W, f).rows
    s = f.size
    if s < 2:
        return 0
    total = 0
    for i in range(s):
        if not any(vb[i]):
            continue
        for j in range(s):
            if j == i or not any(wb[j]):
                continue
            rows = list(block)
            rows[i] = vb[i]
            rows[j] = wb[j]
            total += det(RationalMatrix._trusted(tuple(rows)))
    return as_rational(total)


def minor_second_partial(
    A: RationalMatrix, f: IndexedMinor, x1: tuple[int, int], x2: tuple[int, int]
) -> Rational:
    """Entrywise second partial ``d^2 f / dx_{a1 b1} dx_{a2 b2}`` at ``A`` (1-based)."""
    f.check_bounds(A.nrows, A.ncols)
    (a1, b1), (a2, b2) = x1, x2
    if not (f.contains(a1, b1) and f.contains(a2, b2)) or a1 == a2 or b1 == b2:
        return 0
    i, k = f.row_set.index(a1), f.row_set.index(a2)
    j, l = f.col_set.index(b1), f.col_set.index(b2)
    rows = [r - 1 for t, r in enumerate(f.row_set) if t not in (i, k)]
    cols = [c - 1 for t, c in enumerate(f.col_set) if t not in (j, l)]
    value = det(A.submatrix(rows, cols)) if rows else 1
    sign = (-1) ** (i + j + k + l) * (1 if (i < k) == (j < l) else -1)
    return as_rational(sign * value)
