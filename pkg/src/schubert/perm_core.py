"""Partial permutations, Rothe diagrams, vexillarity and the Gr2 classes.

All positions are 1-based ``(row, column)`` pairs, matching the usual matrix
notation.  A partial permutation is stored as its set of ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations, product
from typing import Iterator, Optional, Sequence

from .errors import (
    DuplicateOneInColumn,
    DuplicateOneInRow,
    IndexOutOfRange,
    NonBinaryEntry,
    NotVexillary,
    ParseError,
    RaggedRows,
    StructureViolation,
    TopLeftNotInDiagram,
)

Cell = tuple[int, int]


@dataclass(frozen=True)
class PartialPermutation:
    m: int
    n: int
    ones: frozenset = frozenset()

    def __post_init__(self):
        ones = frozenset((int(i), int(j)) for i, j in self.ones)
        object.__setattr__(self, "ones", ones)
        if self.m < 1 or self.n < 1:
            raise IndexOutOfRange("dimensions must be positive")
        rows, cols = set(), set()
        for i, j in ones:
            if not (1 <= i <= self.m and 1 <= j <= self.n):
                raise IndexOutOfRange(f"one at ({i},{j}) outside {self.m}x{self.n}")
            if i in rows:
                raise DuplicateOneInRow(f"row {i} has more than one 1")
            if j in cols:
                raise DuplicateOneInColumn(f"column {j} has more than one 1")
            rows.add(i)
            cols.add(j)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "PartialPermutation":
        if not rows or not rows[0]:
            raise ParseError("empty matrix")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise RaggedRows("rows have different lengths")
        ones = set()
        for i, row in enumerate(rows, 1):
            for j, x in enumerate(row, 1):
                if x not in (0, 1):
                    raise NonBinaryEntry(f"entry {x!r} at ({i},{j}) is not 0 or 1")
                if x == 1:
                    ones.add((i, j))
        return cls(len(rows), width, frozenset(ones))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.m, self.n)

    def row_map(self) -> dict[int, int]:
        return dict(self.ones)

    def col_map(self) -> dict[int, int]:
        return {j: i for i, j in self.ones}

    def entry(self, i: int, j: int) -> int:
        return int((i, j) in self.ones)

    def to_rows(self) -> list[list[int]]:
        return [[self.entry(i, j) for j in range(1, self.n + 1)] for i in range(1, self.m + 1)]

    def to_text(self, sep: str = "\n") -> str:
        return sep.join(" ".join(map(str, r)) for r in self.to_rows())

    def transpose(self) -> "PartialPermutation":
        return PartialPermutation(self.n, self.m, frozenset((j, i) for i, j in self.ones))

    def rank_upper_left(self, p: int, q: int) -> int:
        return sum(1 for i, j in self.ones if i <= p and j <= q)

    def restrict(self, rows: Sequence[int], cols: Sequence[int]) -> "PartialPermutation":
        """Submatrix on the given ascending rows and columns, reindexed from 1."""
        rpos = {r: a for a, r in enumerate(rows, 1)}
        cpos = {c: b for b, c in enumerate(cols, 1)}
        return PartialPermutation(
            len(rows), len(cols),
            frozenset((rpos[i], cpos[j]) for i, j in self.ones if i in rpos and j in cpos),
        )

    def __str__(self) -> str:
        return self.to_text(" / ")


def parse_partial_permutation(text: str) -> PartialPermutation:
    """Read a 0/1 matrix; rows separated by newlines or ``/``."""
    chunks = [c for c in text.replace("/", "\n").splitlines() if c.strip()]
    if not chunks:
        raise ParseError("empty matrix")
    rows = []
    for i, line in enumerate(chunks, 1):
        row = []
        for j, tok in enumerate(line.split(), 1):
            if tok not in ("0", "1"):
                raise NonBinaryEntry(f"entry {tok!r} at ({i},{j}) is not 0 or 1")
            row.append(int(tok))
        rows.append(row)
    return PartialPermutation.from_rows(rows)


@dataclass(frozen=True)
class Permutation:
    """A bijection of [1, size], stored as its list of images."""

    image: tuple[int, ...]

    def __post_init__(self):
        image = tuple(int(x) for x in self.image)
        object.__setattr__(self, "image", image)
        if not image or sorted(image) != list(range(1, len(image) + 1)):
            raise ValueError(f"not a permutation: {image}")

    @property
    def size(self) -> int:
        return len(self.image)

    def __call__(self, i: int) -> int:
        return self.image[i - 1]

    def inverse(self) -> "Permutation":
        inv = [0] * self.size
        for i, v in enumerate(self.image, 1):
            inv[v - 1] = i
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(v == i for i, v in enumerate(self.image, 1))

    def sign(self) -> int:
        """Determinant of the permutation matrix."""
        seen = [False] * self.size
        s = 1
        for start in range(self.size):
            if seen[start]:
                continue
            length = 0
            k = start
            while not seen[k]:
                seen[k] = True
                k = self.image[k] - 1
                length += 1
            if length % 2 == 0:
                s = -s
        return s

    def first_descent(self) -> Optional[int]:
        for i in range(1, self.size):
            if self.image[i - 1] > self.image[i]:
                return i
        return None

    def as_partial(self) -> PartialPermutation:
        """The permutation matrix: row i carries its 1 in column image(i)."""
        return PartialPermutation(self.size, self.size, frozenset(enumerate(self.image, 1)))


def extend(w: PartialPermutation) -> Permutation:
    """Complete ``w`` to a permutation of [1, m+n] by the inductive rule."""
    m, n = w.m, w.n
    rmap = w.row_map()
    used: set[int] = set()
    image = []
    for i in range(1, m + n + 1):
        if i <= m and i in rmap:
            v = rmap[i]
        elif i <= m:
            v = next(x for x in range(n + 1, m + n + 1) if x not in used)
        else:
            v = next(x for x in range(1, m + n + 1) if x not in used)
        used.add(v)
        image.append(v)
    return Permutation(tuple(image))


# ---------------------------------------------------------------------------
# Rothe diagram

@dataclass(frozen=True)
class RotheDiagram:
    m: int
    n: int
    cells: tuple[Cell, ...]
    components: tuple[tuple[Cell, ...], ...]
    rank_table: dict = field(hash=False, compare=False)
    rc_sets: dict = field(hash=False, compare=False)

    def component_of(self, cell: Cell) -> tuple[Cell, ...]:
        for comp in self.components:
            if cell in comp:
                return comp
        raise KeyError(cell)

    def rank(self, cell: Cell) -> int:
        return self.rank_table[cell]

    def minor_index(self, cell: Cell) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Rows R+{alpha} and columns C+{beta} of the defining minor at ``cell``."""
        R, C = self.rc_sets[cell]
        return tuple(sorted(R + (cell[0],))), tuple(sorted(C + (cell[1],)))


def _components(cells: Sequence[Cell]) -> tuple[tuple[Cell, ...], ...]:
    remaining = set(cells)
    comps = []
    for start in sorted(cells):
        if start not in remaining:
            continue
        remaining.discard(start)
        stack = [start]
        comp = []
        while stack:
            i, j = stack.pop()
            comp.append((i, j))
            for nb in ((i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)):
                if nb in remaining:
                    remaining.discard(nb)
                    stack.append(nb)
        comps.append(tuple(sorted(comp)))
    return tuple(comps)


def rothe_diagram(w: PartialPermutation) -> RotheDiagram:
    wt = extend(w)
    inv = wt.inverse()
    N = w.m + w.n
    cells = tuple(
        (i, j) for i in range(1, N + 1) for j in range(1, N + 1)
        if wt(i) > j and inv(j) > i
    )
    if any(i > w.m or j > w.n for i, j in cells):
        raise StructureViolation("Rothe diagram escaped the m x n block")
    rank_table = {}
    for p in range(1, w.m + 1):
        for q in range(1, w.n + 1):
            rank_table[(p, q)] = w.rank_upper_left(p, q)
    rc = {}
    for i, j in cells:
        pairs = sorted((r, c) for r, c in w.ones if r < i and c < j)
        rc[(i, j)] = (tuple(r for r, _ in pairs), tuple(sorted(c for _, c in pairs)))
    return RotheDiagram(w.m, w.n, cells, _components(cells), rank_table, rc)


def restricted_permutation(w: PartialPermutation, rows: Sequence[int], cols: Sequence[int]) -> Permutation:
    """``w`` on R x C as a permutation: the k-th listed row's 1 sits in column image(k)."""
    rmap = w.row_map()
    cpos = {c: b for b, c in enumerate(cols, 1)}
    return Permutation(tuple(cpos[rmap[r]] for r in rows))


def is_vexillary_pattern(w: PartialPermutation) -> bool:
    """2143-avoidance of the extension."""
    img = extend(w).image
    for a, b, c, d in combinations(range(len(img)), 4):
        if img[b] < img[a] < img[d] < img[c]:
            return False
    return True


def is_vexillary_restriction(w: PartialPermutation, diagram: Optional[RotheDiagram] = None) -> bool:
    """Every diagram cell restricts ``w`` to an identity on R x C."""
    D = diagram or rothe_diagram(w)
    for comp in D.components:
        R, C = D.rc_sets[comp[0]]
        if R and not restricted_permutation(w, R, C).is_identity():
            return False
    # cells of one component share R and C; check that too rather than assume it
    for comp in D.components:
        if len({D.rc_sets[c] for c in comp}) != 1:
            raise StructureViolation(f"component {comp} has differing R/C sets")
    return True


def vexillary(w: PartialPermutation) -> bool:
    return is_vexillary_pattern(w)


# ---------------------------------------------------------------------------
# Gr2 forms

@dataclass(frozen=True)
class Gr2Params:
    """Block sizes of the Gr2 forms.

    Rows split as ``r1, r2, m1`` and columns as ``r1, n1, r2, n2``; the ones
    are the two identity blocks.  ``r2 == 0`` is the determinantal form.
    ``transposed`` selects the transpose of that layout.
    """

    r1: int
    n1: int
    r2: int
    n2: int
    m1: int
    transposed: bool = False

    def __post_init__(self):
        if self.r1 < 1 or min(self.n1, self.r2, self.n2, self.m1) < 0:
            raise ValueError(f"invalid Gr2 block sizes {self}")

    @property
    def m(self) -> int:
        base = self.r1 + self.r2 + self.m1
        return self.r1 + self.n1 + self.r2 + self.n2 if self.transposed else base

    @property
    def n(self) -> int:
        base = self.r1 + self.n1 + self.r2 + self.n2
        return self.r1 + self.r2 + self.m1 if self.transposed else base

    @property
    def determinantal(self) -> bool:
        return self.r2 == 0

    def as_dict(self) -> dict:
        return {"r1": self.r1, "n1": self.n1, "r2": self.r2, "n2": self.n2,
                "m1": self.m1, "transposed": self.transposed}


def gr2_matrix(p: Gr2Params) -> PartialPermutation:
    m = p.r1 + p.r2 + p.m1
    n = p.r1 + p.n1 + p.r2 + p.n2
    ones = {(i, i) for i in range(1, p.r1 + 1)}
    ones |= {(p.r1 + k, p.r1 + p.n1 + k) for k in range(1, p.r2 + 1)}
    w = PartialPermutation(m, n, frozenset(ones))
    return w.transpose() if p.transposed else w


def _match_second_form(w: PartialPermutation) -> Optional[Gr2Params]:
    if not w.ones:
        return None
    rows = sorted(w.ones)
    k = len(rows)
    if [i for i, _ in rows] != list(range(1, k + 1)):
        return None
    shifts = [j - i for i, j in rows]
    r1 = 0
    while r1 < k and shifts[r1] == 0:
        r1 += 1
    if r1 == 0:
        return None
    rest = shifts[r1:]
    if rest and (rest[0] <= 0 or any(s != rest[0] for s in rest)):
        return None
    n1 = rest[0] if rest else w.n - r1
    r2 = len(rest)
    if r2 == 0:
        return Gr2Params(r1=r1, n1=w.n - r1, r2=0, n2=0, m1=w.m - r1)
    n2 = w.n - r1 - n1 - r2
    return Gr2Params(r1=r1, n1=n1, r2=r2, n2=n2, m1=w.m - r1 - r2)


def match_gr2(w: PartialPermutation) -> Optional[Gr2Params]:
    """Block parameters if ``w`` is literally one of the Gr2 forms."""
    p = _match_second_form(w)
    if p is not None:
        return p
    p = _match_second_form(w.transpose())
    if p is not None and p.r2 > 0:
        return Gr2Params(p.r1, p.n1, p.r2, p.n2, p.m1, transposed=True)
    return None


def enumerate_gr2(max_m: int, max_n: int) -> Iterator[tuple[Gr2Params, PartialPermutation]]:
    """Every Gr2 matrix with at most ``max_m`` rows and ``max_n`` columns, once each."""
    seen = set()
    big = max(max_m, max_n)
    for r1, r2, n1, n2, m1 in product(range(1, big + 1), range(0, big + 1), range(0, big + 1),
                                      range(0, big + 1), range(0, big + 1)):
        if r2 == 0 and n2 > 0:
            continue  # determinantal form has a single zero column block
        for transposed in (False, True):
            if transposed and r2 == 0:
                continue
            p = Gr2Params(r1, n1, r2, n2, m1, transposed)
            if p.m > max_m or p.n > max_n:
                continue
            w = gr2_matrix(p)
            if w in seen:
                continue
            seen.add(w)
            yield p, w


# ---------------------------------------------------------------------------
# Gr2-tilde shape criterion

@dataclass(frozen=True)
class Rect:
    top: int
    bottom: int
    left: int
    right: int

    @classmethod
    def of(cls, cells: Sequence[Cell]) -> Optional["Rect"]:
        rows = [i for i, _ in cells]
        cols = [j for _, j in cells]
        r = cls(min(rows), max(rows), min(cols), max(cols))
        if len(cells) != (r.bottom - r.top + 1) * (r.right - r.left + 1):
            return None
        return r


@dataclass(frozen=True)
class Gr2Shape:
    """Diagram shape recognised as that of a Gr2 matrix.

    ``kind`` is ``"empty"``, ``"rect"``, ``"pair"`` (second form) or
    ``"pair_t"`` (third form).
    """

    kind: str
    rects: tuple[Rect, ...] = ()


def gr2_tilde_shape(D: RotheDiagram) -> Optional[Gr2Shape]:
    if not D.cells:
        return Gr2Shape("empty")
    if len(D.components) > 2:
        return None
    rects = []
    for comp in D.components:
        r = Rect.of(comp)
        if r is None:
            return None
        rects.append(r)
    rects.sort(key=lambda r: (r.top, r.left))
    c1 = rects[0]
    # the first identity block is nonempty, so C1 starts at (r1+1, r1+1) with r1 >= 1
    if c1.top != c1.left or c1.top < 2:
        return None
    if len(rects) == 1:
        return Gr2Shape("rect", (c1,))
    c2 = rects[1]
    if c1.bottom == c2.bottom and c2.top - c1.top == c2.left - c1.right - 1 >= 1:
        return Gr2Shape("pair", (c1, c2))
    if c1.right == c2.right and c2.left - c1.left == c2.top - c1.bottom - 1 >= 1:
        return Gr2Shape("pair_t", (c1, c2))
    return None


def gr2_twin(shape: Gr2Shape) -> tuple[Gr2Params, PartialPermutation]:
    """A Gr2 matrix whose Rothe diagram is the given shape."""
    if shape.kind == "empty":
        p = Gr2Params(r1=1, n1=0, r2=0, n2=0, m1=0)
    elif shape.kind == "rect":
        (c,) = shape.rects
        r = c.top - 1
        p = Gr2Params(r1=r, n1=c.right - r, r2=0, n2=0, m1=c.bottom - r)
    elif shape.kind == "pair":
        c1, c2 = shape.rects
        r1 = c1.top - 1
        r2 = c2.top - c1.top
        p = Gr2Params(r1=r1, n1=c1.right - r1, r2=r2, n2=c2.right - c2.left + 1,
                      m1=c1.bottom - r1 - r2)
    elif shape.kind == "pair_t":
        c1, c2 = shape.rects
        r1 = c1.left - 1
        r2 = c2.left - c1.left
        p = Gr2Params(r1=r1, n1=c1.bottom - r1, r2=r2, n2=c2.bottom - c2.top + 1,
                      m1=c1.right - r1 - r2, transposed=True)
    else:
        raise ValueError(shape.kind)
    return p, gr2_matrix(p)


# ---------------------------------------------------------------------------
# decomposition when (1,1) lies in the diagram

@dataclass(frozen=True)
class Factor:
    w: PartialPermutation
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    components: tuple[tuple[Cell, ...], ...]

    def to_global(self, i: int, j: int) -> Cell:
        return (self.rows[i - 1], self.cols[j - 1])


@dataclass(frozen=True)
class Decomposition:
    zero_cells: frozenset
    factors: tuple[Factor, ...]
    free: tuple[Cell, ...]

    @property
    def free_count(self) -> int:
        return len(self.free)

    @property
    def coordinate_map(self) -> dict:
        out = {}
        for k, f in enumerate(self.factors):
            for a in range(1, f.w.m + 1):
                for b in range(1, f.w.n + 1):
                    out[("factor", k, (a, b))] = f.to_global(a, b)
        for t, cell in enumerate(self.free, 1):
            out[("free", t)] = cell
        return out


def decompose(w: PartialPermutation, diagram: Optional[RotheDiagram] = None) -> Decomposition:
    D = diagram or rothe_diagram(w)
    if not is_vexillary_pattern(w):
        raise NotVexillary("decomposition needs a vexillary partial permutation")
    if (1, 1) not in D.cells:
        raise TopLeftNotInDiagram("(1,1) is not a diagram cell")
    zero_comp = D.component_of((1, 1))
    if any(D.rank_table[c] != 0 for c in zero_comp):
        raise StructureViolation("top-left component has a cell of positive rank")
    zero = frozenset(zero_comp)

    # one block per remaining component; blocks sharing a coordinate merge
    blocks = []
    for comp in D.components:
        if comp is zero_comp:
            continue
        rows, cols = set(), set()
        for cell in comp:
            R, C = D.minor_index(cell)
            rows.update(R)
            cols.update(C)
        blocks.append([rows, cols, [comp]])
    merged = True
    while merged:
        merged = False
        for a, b in combinations(range(len(blocks)), 2):
            ra, ca, _ = blocks[a]
            rb, cb, _ = blocks[b]
            if ra & rb and ca & cb:
                blocks[a] = [ra | rb, ca | cb, blocks[a][2] + blocks[b][2]]
                del blocks[b]
                merged = True
                break

    factors = []
    for rows, cols, comps in sorted(blocks, key=lambda blk: (min(blk[0]), min(blk[1]))):
        rows_t, cols_t = tuple(sorted(rows)), tuple(sorted(cols))
        fw = w.restrict(rows_t, cols_t)
        f = Factor(fw, rows_t, cols_t, tuple(sorted(comps)))
        local = rothe_diagram(fw)
        mapped = sorted(f.to_global(i, j) for i, j in local.cells)
        expected = sorted(c for comp in comps for c in comp)
        if mapped != expected:
            raise StructureViolation(
                f"factor on rows {rows_t} cols {cols_t} has diagram {mapped}, expected {expected}"
            )
        factors.append(f)

    taken = set(zero)
    for f in factors:
        for r in f.rows:
            for c in f.cols:
                if (r, c) in taken:
                    raise StructureViolation(f"coordinate {(r, c)} claimed twice")
                taken.add((r, c))
    free = []
    for i in range(1, w.m + 1):
        for j in range(1, w.n + 1):
            if (i, j) in taken:
                continue
            if any(i <= p and j <= q for p, q in D.cells):
                raise StructureViolation(f"coordinate {(i, j)} is constrained but unassigned")
            free.append((i, j))
    return Decomposition(zero, tuple(factors), tuple(free))


# ---------------------------------------------------------------------------
# classification

@dataclass(frozen=True)
class Classification:
    vexillary: bool
    in_gr2: bool
    in_gr2_tilde: bool
    decomposable: bool
    verdict: str
    gr2_params: Optional[Gr2Params] = None
    shape: Optional[Gr2Shape] = None
    factors_in_gr2_tilde: Optional[tuple[bool, ...]] = None

    def as_dict(self) -> dict:
        return {
            "vexillary": self.vexillary,
            "in_gr2": self.in_gr2,
            "in_gr2_tilde": self.in_gr2_tilde,
            "decomposable": self.decomposable,
            "verdict": self.verdict,
            "gr2_params": self.gr2_params.as_dict() if self.gr2_params else None,
            "factors_in_gr2_tilde": list(self.factors_in_gr2_tilde) if self.factors_in_gr2_tilde is not None else None,
        }


NON_MINIMAL = "non-minimal"
MINIMAL = "minimal"
CONJECTURED = "conjectured-minimal"


def classify(w: PartialPermutation, diagram: Optional[RotheDiagram] = None) -> Classification:
    D = diagram or rothe_diagram(w)
    vex = is_vexillary_pattern(w)
    params = match_gr2(w) if vex else None
    shape = gr2_tilde_shape(D) if vex else None
    decomposable = vex and (1, 1) in D.cells
    factor_flags = None
    if not vex:
        verdict = NON_MINIMAL
    elif shape is not None:
        verdict = MINIMAL
    elif decomposable:
        dec = decompose(w, D)
        factor_flags = tuple(gr2_tilde_shape(rothe_diagram(f.w)) is not None for f in dec.factors)
        verdict = MINIMAL if all(factor_flags) else CONJECTURED
    else:
        verdict = CONJECTURED
    if params is not None and shape is None:
        raise StructureViolation(f"{w} matches a Gr2 form but fails the shape criterion")
    return Classification(vex, params is not None, shape is not None, decomposable,
                          verdict, params, shape, factor_flags)


def all_partial_permutations(m: int, n: int) -> Iterator[PartialPermutation]:
    """Every m x n partial permutation."""
    for k in range(0, min(m, n) + 1):
        for rows in combinations(range(1, m + 1), k):
            for cols in permutations(range(1, n + 1), k):
                yield PartialPermutation(m, n, frozenset(zip(rows, cols)))


def all_permutations(k: int) -> Iterator[Permutation]:
    for img in permutations(range(1, k + 1)):
        yield Permutation(img)
