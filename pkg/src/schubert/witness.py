"""Non-minimality witnesses for non-vexillary partial permutations.

A non-vexillary ``w`` has a diagram cell whose R x C restriction is a
non-identity permutation.  Perturbing ``w`` by three parameters near that
cell gives a regular point at which the cell's minor has a nonzero Hessian
trace over the normal space.  The small matrix ``sigma_hat`` captures the
local picture; its cofactors and second minors are tabulated in closed form
and checked against direct evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import (
    IdentityPermutation,
    IndexOutOfRange,
    StructureViolation,
    VexillaryInput,
    ZeroParameter,
)
from .exact_linalg import (
    Rational,
    RationalMatrix,
    as_rational,
    det,
    format_rational,
    gram,
    inner,
    minor_grad,
    minor_hessian_bilinear,
)
from .perm_core import (
    Cell,
    PartialPermutation,
    Permutation,
    RotheDiagram,
    restricted_permutation,
    rothe_diagram,
)
from .variety import cell_minor, contains_regular, normal_frame, obstruction

DEFAULT_Y = (Fraction(1, 2), Fraction(1, 3), Fraction(2))


def _check_y(y: Sequence) -> tuple[Rational, Rational, Rational]:
    if len(y) != 3:
        raise ZeroParameter("exactly three parameters are needed")
    y1, y2, y3 = (as_rational(v) for v in y)
    if 0 in (y1, y2, y3):
        raise ZeroParameter("y1, y2, y3 must all be nonzero")
    return y1, y2, y3


# ---------------------------------------------------------------------------
# the local model sigma_hat

@dataclass(frozen=True)
class SigmaHat:
    base: Permutation
    descent: int
    y: tuple
    matrix: RationalMatrix

    @property
    def n(self) -> int:
        return self.base.size


def build_sigma_hat(sigma: Permutation, y: Sequence) -> SigmaHat:
    if sigma.is_identity():
        raise IdentityPermutation("sigma must not be the identity")
    y1, y2, y3 = _check_y(y)
    n = sigma.size
    l = sigma.first_descent()
    grid = [[0] * (n + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        grid[i - 1][sigma(i) - 1] = 1
    grid[l - 1][n] += y1
    grid[n][sigma(l) - 1] += y2
    grid[n][n] += y1 * y2
    grid[l][sigma(l) - 1] += y3
    return SigmaHat(sigma, l, (y1, y2, y3), RationalMatrix(grid))


def cofactor_table(sh: SigmaHat) -> dict[Cell, Rational]:
    """Closed-form first derivatives of det(sigma_hat) in each entry (1-based)."""
    y1, y2, y3 = sh.y
    n, l, s = sh.n, sh.descent, sh.base
    d = s.sign()
    table = {(i, j): 0 for i in range(1, n + 2) for j in range(1, n + 2)}
    table[(n + 1, n + 1)] = d
    table[(n + 1, s(l))] = -y1 * d
    table[(n + 1, s(l + 1))] = y1 * y3 * d
    table[(l, n + 1)] = -y2 * d
    table[(l, s(l))] = y1 * y2 * d
    table[(l, s(l + 1))] = -y1 * y2 * y3 * d
    return {k: as_rational(v) for k, v in table.items()}


def cofactor_by_replacement(sh: SigmaHat, i: int, j: int) -> Rational:
    """det of sigma_hat with row i replaced by e_j; the oracle for the table."""
    size = sh.n + 1
    rows = [list(r) for r in sh.matrix.rows]
    rows[i - 1] = [int(c == j - 1) for c in range(size)]
    return det(RationalMatrix(rows))


def minor_class(sh: SigmaHat, removed_rows: tuple[int, int], removed_cols: tuple[int, int]) -> Rational:
    """The minor of sigma_hat with two rows and two columns deleted."""
    size = sh.n + 1
    for idx in (*removed_rows, *removed_cols):
        if not 1 <= idx <= size:
            raise IndexOutOfRange(f"index {idx} outside [1, {size}]")
    if len(set(removed_rows)) != 2 or len(set(removed_cols)) != 2:
        raise IndexOutOfRange("removed indices must be two distinct rows and two distinct columns")
    rows = [r for r in range(size) if r + 1 not in removed_rows]
    cols = [c for c in range(size) if c + 1 not in removed_cols]
    if not rows:
        return 1
    return det(sh.matrix.submatrix(rows, cols))


def minor_case(sh: SigmaHat, removed_rows, removed_cols) -> Optional[tuple[int, Rational]]:
    """``(case number, |minor|)`` predicted by the case analysis, or None if it vanishes."""
    y1, y2, y3 = (abs(v) for v in sh.y)
    n, l, s = sh.n, sh.descent, sh.base
    I, J = frozenset(removed_rows), frozenset(removed_cols)
    a, b, top = s(l), s(l + 1), n + 1
    if I == {l, top}:
        table = {frozenset({a, top}): 1, frozenset({b, top}): y3}
        case = 1
    elif I == {l, l + 1}:
        table = {frozenset({a, b}): y1 * y2, frozenset({b, top}): y2}
        case = 2
    elif I == {top, l + 1}:
        table = {frozenset({a, b}): y1, frozenset({b, top}): 1}
        case = 4
    elif l in I and len(I - {l}) == 1 and next(iter(I - {l})) <= n:
        i = next(iter(I - {l}))
        table = {frozenset({a, s(i)}): y1 * y2, frozenset({b, s(i)}): y1 * y2 * y3,
                 frozenset({top, s(i)}): y2}
        case = 3
    elif top in I and len(I - {top}) == 1:
        i = next(iter(I - {top}))
        table = {frozenset({a, s(i)}): y1, frozenset({b, s(i)}): y1 * y3, frozenset({top, s(i)}): 1}
        case = 5
    else:
        return None
    mag = table.get(J)
    return None if mag is None else (case, as_rational(mag))


# ---------------------------------------------------------------------------
# witness cell and point

@dataclass(frozen=True)
class WitnessCell:
    cell: Cell
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    perm: Permutation
    L: int

    @property
    def delta(self) -> int:
        return self.perm.sign()

    @property
    def partner(self) -> Cell:
        """The cell (r_L, c_{perm(L+1)}) whose gradient pairs with the witness cell."""
        return (self.rows[self.L - 1], self.cols[self.perm(self.L + 1) - 1])


def select_witness_cell(w: PartialPermutation, diagram: Optional[RotheDiagram] = None) -> WitnessCell:
    """Qualifying cell with smallest row+column, ties broken lexicographically."""
    D = diagram or rothe_diagram(w)
    best = None
    for cell in sorted(D.cells, key=lambda c: (c[0] + c[1], c)):
        R, C = D.rc_sets[cell]
        if len(R) < 2:
            continue
        perm = restricted_permutation(w, R, C)
        if not perm.is_identity():
            best = WitnessCell(cell, R, C, perm, perm.first_descent())
            break
    if best is None:
        raise VexillaryInput("every diagram cell restricts to an identity: the input is vexillary")
    return best


def build_witness_point(w: PartialPermutation, wc: WitnessCell, y: Sequence) -> RationalMatrix:
    y1, y2, y3 = _check_y(y)
    alpha, beta = wc.cell
    rL, rL1 = wc.rows[wc.L - 1], wc.rows[wc.L]
    cL = wc.cols[wc.perm(wc.L) - 1]
    grid = [list(r) for r in w.to_rows()]
    grid[rL - 1][beta - 1] += y1
    grid[alpha - 1][cL - 1] += y2
    grid[alpha - 1][beta - 1] += y1 * y2
    grid[rL1 - 1][cL - 1] += y3
    return RationalMatrix(grid)


# ---------------------------------------------------------------------------
# structure checks at the witness point

@dataclass
class StructureReport:
    hess_off_block_zero: bool = True
    hess_cross_pattern: bool = True
    hess_cross_value: Rational = 0
    hess_diagonal_zero: bool = True
    gram_split: bool = True
    partner_unit_gradient: bool = True
    gradient_pattern: bool = True
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (self.hess_off_block_zero and self.hess_cross_pattern and self.hess_diagonal_zero
                and self.gram_split and self.partner_unit_gradient and self.gradient_pattern)

    def as_dict(self) -> dict:
        return {
            "hess_off_block_zero": self.hess_off_block_zero,
            "hess_cross_pattern": self.hess_cross_pattern,
            "hess_cross_value": format_rational(self.hess_cross_value),
            "hess_diagonal_zero": self.hess_diagonal_zero,
            "gram_split": self.gram_split,
            "partner_unit_gradient": self.partner_unit_gradient,
            "gradient_pattern": self.gradient_pattern,
            "violations": [str(v) for v in self.violations],
        }


def verify_hessian_structure(w: PartialPermutation, point: RationalMatrix, wc: Optional[WitnessCell] = None,
                             diagram: Optional[RotheDiagram] = None, y: Optional[Sequence] = None,
                             raise_on_failure: bool = True) -> StructureReport:
    """Check the vanishing pattern of Hess f at the witness point.

    (a) Hess f(N1, N2) = 0 for gradients of any two other cells;
    (b) Hess f(grad f, N) is nonzero only for the partner cell, with |value| = |y3|;
    (c) Hess f(grad f, grad f) = 0.
    Also checks the first-derivative patterns behind them and the Gram split.
    """
    D = diagram or rothe_diagram(w)
    wc = wc or select_witness_cell(w, D)
    frame = normal_frame(w, point, D)
    grads = dict(zip(frame.cells, frame.gradients))
    fidx = dict(zip(frame.cells, frame.minors))
    cell = wc.cell
    f = fidx[cell]
    partner = wc.partner
    rep = StructureReport()
    others = [c for c in frame.cells if c != cell]

    for k, c1 in enumerate(others):
        for c2 in others[k:]:
            v = minor_hessian_bilinear(point, f, grads[c1], grads[c2])
            if v != 0:
                rep.hess_off_block_zero = False
                rep.violations.append(("hess_off_block", c1, c2, v))

    if partner not in grads:
        rep.hess_cross_pattern = False
        rep.violations.append(("partner_not_in_diagram", partner))
    for c in others:
        v = minor_hessian_bilinear(point, f, grads[cell], grads[c])
        if c == partner:
            rep.hess_cross_value = v
            if y is not None and abs(v) != abs(as_rational(y[2])):
                rep.hess_cross_pattern = False
                rep.violations.append(("hess_cross_magnitude", c, v))
            if v == 0:
                rep.hess_cross_pattern = False
                rep.violations.append(("hess_cross_zero", c))
        elif v != 0:
            rep.hess_cross_pattern = False
            rep.violations.append(("hess_cross_extra", c, v))

    v = minor_hessian_bilinear(point, f, grads[cell], grads[cell])
    if v != 0:
        rep.hess_diagonal_zero = False
        rep.violations.append(("hess_diagonal", v))

    # Gram split: {partner, cell} orthogonal to every other gradient
    if partner in grads:
        m, n = point.shape
        if grads[partner] != RationalMatrix.unit(m, n, *partner):
            rep.partner_unit_gradient = False
            rep.violations.append(("partner_gradient", partner))
        for c in frame.cells:
            if c in (cell, partner):
                continue
            for b in (cell, partner):
                ip = inner(grads[b], grads[c])
                if ip != 0:
                    rep.gram_split = False
                    rep.violations.append(("gram_split", b, c, ip))

    # first derivatives: the six-entry pattern for the witness minor, and for the
    # other minors only (i,j) itself plus the one allowed extra entry, inside [1,alpha]x[1,beta]
    if y is not None:
        expected = witness_gradient_pattern(wc, y)
        G = grads[cell]
        for a in range(1, point.nrows + 1):
            for b in range(1, point.ncols + 1):
                if G[a - 1, b - 1] != expected.get((a, b), 0):
                    rep.gradient_pattern = False
                    rep.violations.append(("witness_gradient", (a, b), G[a - 1, b - 1]))
    alpha, beta = cell
    rL, rL1 = wc.rows[wc.L - 1], wc.rows[wc.L]
    cL = wc.cols[wc.perm(wc.L) - 1]
    for c in others:
        G = grads[c]
        i, j = c
        allowed = {(i, j)}
        if j == beta and rL < i < rL1:
            allowed.add((i, cL))
        for a in range(1, alpha + 1):
            for b in range(1, beta + 1):
                val = G[a - 1, b - 1]
                if (a, b) == (i, j) and val == 0:
                    rep.gradient_pattern = False
                    rep.violations.append(("other_gradient_diagonal", c))
                if (a, b) not in allowed and val != 0:
                    rep.gradient_pattern = False
                    rep.violations.append(("other_gradient", c, (a, b), val))

    if raise_on_failure and not rep.ok:
        raise StructureViolation(f"witness structure check failed: {rep.violations[:5]}")
    return rep


def witness_gradient_pattern(wc: WitnessCell, y: Sequence) -> dict[Cell, Rational]:
    """Closed-form gradient of the witness minor: the cofactor table moved into place."""
    y1, y2, y3 = _check_y(y)
    d = wc.delta
    alpha, beta = wc.cell
    rL = wc.rows[wc.L - 1]
    cL = wc.cols[wc.perm(wc.L) - 1]
    cL1 = wc.cols[wc.perm(wc.L + 1) - 1]
    out = {
        (alpha, beta): d,
        (alpha, cL): -y1 * d,
        (alpha, cL1): y1 * y3 * d,
        (rL, beta): -y2 * d,
        (rL, cL): y1 * y2 * d,
        (rL, cL1): -y1 * y2 * y3 * d,
    }
    return {k: as_rational(v) for k, v in out.items()}


# ---------------------------------------------------------------------------
# certificate

@dataclass(frozen=True)
class WitnessCertificate:
    cell: Cell
    partner: Cell
    restricted_perm: tuple[int, ...]
    L: int
    delta: int
    y: tuple
    point: RationalMatrix
    numeric_trace: Rational
    gram_block_det: Rational
    checks: dict

    def as_dict(self) -> dict:
        return {
            "cell": list(self.cell),
            "partner": list(self.partner),
            "restricted_perm": list(self.restricted_perm),
            "L": self.L,
            "delta": self.delta,
            "y": [format_rational(v) for v in self.y],
            "point": self.point.to_strings(),
            "numeric_trace": format_rational(self.numeric_trace),
            "gram_block_det": format_rational(self.gram_block_det),
            "checks": dict(self.checks),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "WitnessCertificate":
        return cls(
            cell=tuple(d["cell"]),
            partner=tuple(d["partner"]),
            restricted_perm=tuple(d["restricted_perm"]),
            L=d["L"],
            delta=d["delta"],
            y=tuple(as_rational(v) for v in d["y"]),
            point=RationalMatrix.from_strings(d["point"]),
            numeric_trace=as_rational(d["numeric_trace"]),
            gram_block_det=as_rational(d["gram_block_det"]),
            checks=dict(d["checks"]),
        )


def certify_nonminimal(w: PartialPermutation, y: Sequence = DEFAULT_Y,
                       diagram: Optional[RotheDiagram] = None,
                       raise_on_failure: bool = True) -> WitnessCertificate:
    y1, y2, y3 = _check_y(y)
    D = diagram or rothe_diagram(w)
    wc = select_witness_cell(w, D)
    point = build_witness_point(w, wc, (y1, y2, y3))
    member = contains_regular(w, point, D)
    if not member:
        raise StructureViolation("witness point is not a regular point")
    report = verify_hessian_structure(w, point, wc, D, y=(y1, y2, y3), raise_on_failure=raise_on_failure)
    trace = obstruction(w, point, D, check_regular=False)[wc.cell]
    if wc.partner in D.cells:
        block = [minor_grad(point, cell_minor(D, c)) for c in (wc.partner, wc.cell)]
        g_det = det(gram(block))
    else:
        g_det = 0
    magnitude_ok = trace != 0 and abs(trace) * g_det == abs(2 * y1 * y2 * y3 * y3)
    # the cross second partial always comes out as -y3, which pins the sign
    signed_ok = report.hess_cross_value == -y3 and trace * g_det == -2 * wc.delta * y1 * y2 * y3 * y3
    checks = {
        "membership": member,
        "hessian_structure": report.ok,
        "magnitude_identity": magnitude_ok,
        "signed_identity": signed_ok,
        "hessian_cross_value": format_rational(report.hess_cross_value),
    }
    if raise_on_failure and not magnitude_ok:
        raise StructureViolation(f"trace {trace} fails the magnitude identity (Gram block det {g_det})")
    if raise_on_failure and not signed_ok:
        raise StructureViolation(f"trace {trace} has the wrong sign for delta={wc.delta}")
    return WitnessCertificate(
        cell=wc.cell,
        partner=wc.partner,
        restricted_perm=wc.perm.image,
        L=wc.L,
        delta=wc.delta,
        y=(y1, y2, y3),
        point=point,
        numeric_trace=trace,
        gram_block_det=g_det,
        checks=checks,
    )


# ---------------------------------------------------------------------------
# table sweeps

def table_mismatches(sigma: Permutation, y: Sequence) -> list[tuple]:
    """Entries where the closed-form tables disagree with direct evaluation."""
    sh = build_sigma_hat(sigma, y)
    size = sh.n + 1
    bad = []
    table = cofactor_table(sh)
    for (i, j), v in table.items():
        if cofactor_by_replacement(sh, i, j) != v:
            bad.append(("cofactor", (i, j), v))
    pairs = [(a, b) for a in range(1, size + 1) for b in range(a + 1, size + 1)]
    for I in pairs:
        for J in pairs:
            val = minor_class(sh, I, J)
            pred = minor_case(sh, I, J)
            if (pred is None) != (val == 0) or (pred is not None and abs(val) != pred[1]):
                bad.append(("minor", I, J, val, pred))
    return bad
