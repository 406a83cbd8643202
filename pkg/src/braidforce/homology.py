"""Relative cubical homology over Z and the Conley index of a braid class.

The pair (N, N^-) -- class closure and exit set -- is turned into the
quotient chain complex (exit cells deleted), reduced by elementary
unit-coefficient pair cancellations (which preserve homology), and finished
off with an integer Smith normal form on whatever remains.  Betti numbers
become the characteristic polynomial CP_t; invariant factors > 1 are
reported as torsion.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction

from .braid import BraidError, DiscreteBraid, dualize
from .complexes import (
    BraidClassComplex,
    Cell,
    cell_boundary,
    enumerate_class,
    joint_extend,
)


class NotSubcomplex(BraidError):
    pass


class MixedTopologicalType(BraidError):
    pass


@dataclass(frozen=True)
class ConleyIndex:
    """Betti numbers, torsion and derived invariants of CH_*(N, N^-).

    The characteristic polynomial CP_t has the Betti numbers as coefficients;
    the Euler characteristic is CP_{-1}.
    """

    betti: tuple[int, ...]
    torsion: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if any(b < 0 for b in self.betti):
            raise ValueError("negative Betti number")

    @property
    def cp(self) -> tuple[int, ...]:
        return self.betti

    @property
    def euler(self) -> int:
        return sum((-1) ** k * b for k, b in enumerate(self.betti))

    @property
    def has_torsion(self) -> bool:
        return any(self.torsion)

    def trimmed(self) -> "ConleyIndex":
        last = -1
        for k, b in enumerate(self.betti):
            if b:
                last = max(last, k)
        for k, t in enumerate(self.torsion):
            if t:
                last = max(last, k)
        return ConleyIndex(self.betti[: last + 1], self.torsion[: last + 1])

    def poly_str(self) -> str:
        terms = []
        for k, b in enumerate(self.betti):
            if b == 0:
                continue
            if k == 0:
                terms.append(str(b))
            else:
                coeff = "" if b == 1 else f"{b}*"
                terms.append(f"{coeff}t^{k}")
        return " + ".join(terms) if terms else "0"

    def __add__(self, other: "ConleyIndex") -> "ConleyIndex":
        n = max(len(self.betti), len(other.betti))
        betti = tuple(
            (self.betti[k] if k < len(self.betti) else 0)
            + (other.betti[k] if k < len(other.betti) else 0)
            for k in range(n)
        )
        tors = tuple(
            (self.torsion[k] if k < len(self.torsion) else ())
            + (other.torsion[k] if k < len(other.torsion) else ())
            for k in range(max(len(self.torsion), len(other.torsion)))
        )
        return ConleyIndex(betti, tors)


def cp_poly(*coeffs: int) -> tuple[int, ...]:
    """Convenience: cp_poly(0, 1, 1) is CP_t = t + t^2."""
    out = list(coeffs)
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


class ChainComplex:
    """A finite free chain complex over Z with cell-indexed boundaries."""

    # full dd=0 verification is quadratic in the boundary degree; skip it
    # automatically on very large complexes (the cubical construction is
    # structural) but keep it on everywhere tests exercise it.
    CHECK_LIMIT = 20_000

    def __init__(self, graded_cells: dict[int, list[Cell]],
                 boundary: dict[Cell, dict[Cell, int]], check: bool | None = None):
        self.graded_cells = {k: list(v) for k, v in graded_cells.items() if v}
        self.boundary = boundary
        if check is None:
            check = self.size() <= self.CHECK_LIMIT
        if check:
            self._check_dd_zero()

    @property
    def top_dim(self) -> int:
        return max(self.graded_cells, default=-1)

    def size(self) -> int:
        return sum(len(v) for v in self.graded_cells.values())

    def _check_dd_zero(self):
        for k, cells in self.graded_cells.items():
            if k < 2:
                continue
            for cell in cells:
                acc: dict[Cell, int] = {}
                for face, c in self.boundary.get(cell, {}).items():
                    for sub, c2 in self.boundary.get(face, {}).items():
                        acc[sub] = acc.get(sub, 0) + c * c2
                if any(v != 0 for v in acc.values()):
                    raise AssertionError(f"dd != 0 at cell {cell}")

    @staticmethod
    def relative(cells: dict[int, list[Cell]], deleted: frozenset[Cell],
                 counts: tuple[int, ...], check: bool | None = None) -> "ChainComplex":
        """Quotient complex: all cells minus a closed subcomplex."""
        alive = {c for group in cells.values() for c in group} - set(deleted)
        graded: dict[int, list[Cell]] = {}
        boundary: dict[Cell, dict[Cell, int]] = {}
        for k in sorted(cells):
            kept = [c for c in cells[k] if c in alive]
            if kept:
                graded[k] = kept
            for c in kept:
                boundary[c] = {
                    face: coeff
                    for face, coeff in cell_boundary(c, counts)
                    if face in alive
                }
        return ChainComplex(graded, boundary, check=check)

    def homology(self) -> tuple[dict[int, int], dict[int, tuple[int, ...]]]:
        """Betti numbers and torsion invariant factors per dimension."""
        return _reduced_homology_engine(self)


# --- reduction engine -------------------------------------------------------


def _reduced_homology_engine(cx: ChainComplex):
    cells = []
    index = {}
    dims = []
    for k in sorted(cx.graded_cells):
        for c in cx.graded_cells[k]:
            index[c] = len(cells)
            cells.append(c)
            dims.append(k)
    nc = len(cells)
    bnd: list[dict[int, int]] = [dict() for _ in range(nc)]
    cobnd: list[set[int]] = [set() for _ in range(nc)]
    for c, faces in cx.boundary.items():
        ic = index[c]
        for f, coeff in faces.items():
            if coeff:
                jf = index[f]
                bnd[ic][jf] = coeff
                cobnd[jf].add(ic)

    alive = [True] * nc
    heap: list[tuple[int, int, int]] = []

    def push_candidates(t: int):
        for s, coeff in bnd[t].items():
            if coeff in (1, -1):
                cost = (len(cobnd[s]) - 1) * (len(bnd[t]) - 1)
                heapq.heappush(heap, (cost, t, s))

    for t in range(nc):
        push_candidates(t)

    while heap:
        cost, t, s = heapq.heappop(heap)
        if not (alive[t] and alive[s]):
            continue
        u = bnd[t].get(s, 0)
        if u not in (1, -1):
            continue
        fresh = (len(cobnd[s]) - 1) * (len(bnd[t]) - 1)
        if fresh > cost:
            heapq.heappush(heap, (fresh, t, s))
            continue
        # cancel (s, t): dx' = dx - (<dx, s>/u) dt for the other cofaces x of s
        alive[t] = alive[s] = False
        bt = bnd[t]
        cobnd[s].discard(t)
        for y in bt:
            if y != s:
                cobnd[y].discard(t)
        for x in list(cobnd[s]):
            if not alive[x]:
                continue
            f = bnd[x].pop(s) * u  # u is a unit, u^{-1} == u
            for y, cy in bt.items():
                if y == s:
                    continue
                new = bnd[x].get(y, 0) - f * cy
                if new:
                    bnd[x][y] = new
                    cobnd[y].add(x)
                else:
                    bnd[x].pop(y, None)
                    cobnd[y].discard(x)
            push_candidates(x)
        for w in list(cobnd[t]):
            if alive[w]:
                bnd[w].pop(t, None)
        bnd[t] = {}
        cobnd[t] = set()
        bnd[s] = {}
        cobnd[s] = set()

    # leftovers carry no unit incidences; finish with Smith normal form
    top = cx.top_dim
    remaining: dict[int, list[int]] = {k: [] for k in range(top + 1)}
    for i in range(nc):
        if alive[i]:
            remaining.setdefault(dims[i], []).append(i)

    snf_cache: dict[int, list[int]] = {}

    def snf_diagonal(k: int) -> list[int]:
        if k in snf_cache:
            return snf_cache[k]
        rows = remaining.get(k - 1, [])
        cols = remaining.get(k, [])
        row_pos = {r: i for i, r in enumerate(rows)}
        mat = [[0] * len(cols) for _ in rows]
        for j, c in enumerate(cols):
            for f, coeff in bnd[c].items():
                if alive[f]:
                    mat[row_pos[f]][j] = coeff
        snf_cache[k] = smith_normal_form_diagonal(mat)
        return snf_cache[k]

    betti: dict[int, int] = {}
    torsion: dict[int, tuple[int, ...]] = {}
    for k in range(top + 1):
        nk = len(remaining.get(k, []))
        dk = snf_diagonal(k) if k > 0 else []
        dk1 = snf_diagonal(k + 1)
        betti[k] = nk - len(dk) - len(dk1)
        torsion[k] = tuple(x for x in dk1 if abs(x) > 1)
    return betti, torsion


def smith_normal_form_diagonal(mat: list[list[int]]) -> list[int]:
    """Nonzero diagonal of the Smith normal form of an integer matrix.

    Deterministic pivoting: smallest absolute value, then row-major order.
    """
    a = [row[:] for row in mat]
    m = len(a)
    n = len(a[0]) if m else 0
    diag = []
    r = 0
    while r < min(m, n):
        piv = None
        best = None
        for i in range(r, m):
            for j in range(r, n):
                v = abs(a[i][j])
                if v and (best is None or v < best):
                    best, piv = v, (i, j)
        if piv is None:
            break
        i0, j0 = piv
        a[r], a[i0] = a[i0], a[r]
        for row in a:
            row[r], row[j0] = row[j0], row[r]
        while True:
            done = True
            for i in range(m):
                if i != r and a[i][r]:
                    q = a[i][r] // a[r][r]
                    for j in range(n):
                        a[i][j] -= q * a[r][j]
                    if a[i][r]:
                        a[r], a[i] = a[i], a[r]
                        done = False
            for j in range(n):
                if j != r and a[r][j]:
                    q = a[r][j] // a[r][r]
                    for i in range(m):
                        a[i][j] -= q * a[i][r]
                    if a[r][j]:
                        for i in range(m):
                            a[i][r], a[i][j] = a[i][j], a[i][r]
                        done = False
            if done:
                break
        # divisibility: fold a non-multiple into the pivot row and redo
        fixed = False
        for i in range(r + 1, m):
            for j in range(r + 1, n):
                if a[i][j] % a[r][r]:
                    for jj in range(n):
                        a[r][jj] += a[i][jj]
                    fixed = True
                    break
            if fixed:
                break
        if fixed:
            continue
        diag.append(abs(a[r][r]))
        r += 1
    return diag


# --- Conley index operations ------------------------------------------------


def relative_homology(cpx: BraidClassComplex,
                      exit_cells: frozenset[Cell] | None = None) -> ConleyIndex:
    """Conley homology index CH_*(N) = H_*(N, N^-) of a braid class."""
    cells = cpx.cells()
    if exit_cells is None:
        exit_cells = cpx.exit_set().cells
    all_cells = {c for group in cells.values() for c in group}
    if not exit_cells <= all_cells:
        raise NotSubcomplex("exit cells are not all cells of N")
    counts = cpx.partition.counts()
    for c in exit_cells:
        for f, _ in cell_boundary(c, counts):
            if f not in exit_cells:
                raise NotSubcomplex("exit set is not closed under faces")
    chain = ChainComplex.relative(cells, exit_cells, counts)
    betti, torsion = chain.homology()
    top = max(betti, default=0)
    return ConleyIndex(
        tuple(betti.get(k, 0) for k in range(top + 1)),
        tuple(torsion.get(k, ()) for k in range(top + 1)),
    ).trimmed()


def conley_index_of(free, skeleton: DiscreteBraid) -> tuple[BraidClassComplex, ConleyIndex]:
    cpx = enumerate_class(free, skeleton)
    return cpx, relative_homology(cpx)


def wedge_index(classes: list[BraidClassComplex]) -> ConleyIndex:
    """Direct sum of the indices of pairwise-disjoint equivalent classes."""
    if not classes:
        return ConleyIndex(())
    seen: set = set()
    sig = classes[0].crossing_signature
    for cpx in classes:
        if not (cpx.bounded and cpx.proper):
            raise BraidError("wedge constituents must be bounded and proper")
        if cpx.crossing_signature != sig:
            raise MixedTopologicalType(
                f"crossing signatures differ: {cpx.crossing_signature} vs {sig}")
        if seen & cpx.boxes:
            raise BraidError("wedge constituents must be disjoint")
        seen |= cpx.boxes
    total = ConleyIndex(())
    for cpx in classes:
        total = total + relative_homology(cpx)
    return total.trimmed()


@dataclass
class DualityReport:
    original: ConleyIndex
    dual: ConleyIndex
    degree: int  # 2np with one free strand: the period
    ok: bool


def dual_pair(free, skeleton: DiscreteBraid):
    dual_free = tuple(x if i % 2 == 0 else -x for i, x in enumerate(free))
    return dual_free, dualize(skeleton)


def verify_duality(free, skeleton: DiscreteBraid) -> DualityReport:
    """Check beta_k(dual class) == beta_{d-k}(class) for an even period d."""
    free = tuple(Fraction(x) for x in free)[: skeleton.d]
    d = skeleton.d
    _, idx = conley_index_of(free, skeleton)
    dual_free, dual_skel = dual_pair(free, skeleton)
    _, dual_idx = conley_index_of(dual_free, dual_skel)
    expect = [0] * (d + 1)
    for k, b in enumerate(idx.betti):
        expect[d - k] = b
    got = list(dual_idx.betti) + [0] * (d + 1 - len(dual_idx.betti))
    return DualityReport(idx, dual_idx, d, ok=(got == expect))


@dataclass
class StabilizationReport:
    indices: list[ConleyIndex]
    periods: list[int]
    ok: bool


def verify_stabilization(free, skeleton: DiscreteBraid, steps: int = 2) -> StabilizationReport:
    """Betti numbers are unchanged under the extension operator.

    Compares the index of the extended seed's class at each step.  Extension
    maps a class into a single class, and components of the extended
    topological type that miss the extension image carry a trivial index, so
    the seed's class alone determines the stabilized Betti data.
    """
    free = tuple(Fraction(x) for x in free)[: skeleton.d]
    indices = []
    periods = []
    frees, skel = [free], skeleton
    for _ in range(steps + 1):
        _, idx = conley_index_of(frees[0], skel)
        indices.append(idx)
        periods.append(skel.d)
        frees, skel = joint_extend(frees, skel)
    ok = all(idx.betti == indices[0].betti for idx in indices)
    return StabilizationReport(indices, periods, ok)


@dataclass
class ShiftReport:
    base: ConleyIndex
    shifted: ConleyIndex
    ok: bool


def shift_check(free, skeleton: DiscreteBraid) -> ShiftReport:
    """Dualizing the double extension shifts homology up by two dimensions.

    Computes CH(D(u rel v)) and CH(D(E^2(u rel v))) for an augmented class
    and checks beta_shifted[k+2] == beta_base[k].
    """
    free = tuple(Fraction(x) for x in free)[: skeleton.d]
    _, base = conley_index_of(*dual_pair(free, skeleton))
    frees, skel = joint_extend([free], skeleton)
    frees, skel = joint_extend(frees, skel)
    _, shifted = conley_index_of(*dual_pair(frees[0], skel))
    expect = (0, 0) + tuple(base.betti)
    got = tuple(shifted.betti) + (0,) * max(0, len(expect) - len(shifted.betti))
    return ShiftReport(base, shifted, ok=(got == expect))


def morse_bounds(idx: ConleyIndex, regime: str) -> int:
    """Lower bounds for the number of zeros of a parabolic recurrence.

    ExactNondegenerate: sum of Betti numbers.  Exact: number of nonzero
    monomials of CP_t.  NonExact: 1 when the Euler characteristic is nonzero.
    NonExactNondegenerate: CP_t reduced mod (1+t) within the nonnegative
    polynomials, evaluated at t = 1.
    """
    if regime == "ExactNondegenerate":
        return sum(idx.betti)
    if regime == "Exact":
        return sum(1 for b in idx.betti if b)
    if regime == "NonExact":
        return 1 if idx.euler != 0 else 0
    if regime == "NonExactNondegenerate":
        return sum(_cp_mod_one_plus_t(idx.betti))
    raise ValueError(f"unknown regime {regime!r}")


def _cp_mod_one_plus_t(coeffs: tuple[int, ...]) -> tuple[int, ...]:
    """Minimal-mass p1 >= 0 with coeffs = p1 + (1+t) p2 and p2 >= 0.

    Small dynamic program over the carry (greedy can overshoot).
    """
    n = len(coeffs)
    if n == 0:
        return ()
    best: dict[int, tuple[int, tuple[int, ...]]] = {0: (0, ())}
    for k in range(n):
        nxt: dict[int, tuple[int, tuple[int, ...]]] = {}
        for carry, (cost, p1) in best.items():
            avail = coeffs[k] - carry
            if avail < 0:
                continue
            for q in range(avail + 1):
                p1k = avail - q
                cand = (cost + p1k, p1 + (p1k,))
                if q not in nxt or cand < nxt[q]:
                    nxt[q] = cand
        best = nxt
    if 0 not in best:
        raise AssertionError("mod (1+t) reduction left a carry")
    return best[0][1]
