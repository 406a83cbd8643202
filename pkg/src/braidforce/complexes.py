"""Relative braid classes with one free strand as cube complexes.

The skeleton's anchor values cut each free coordinate axis into intervals, so
configuration space R^d is partitioned into open boxes.  Inside a box the
relative diagram is nonsingular and all crossing data is constant; two boxes
sharing a face belong to the same discretized class exactly when the face is
not a singular one.  A class is therefore a set of box labels closed under
breadth-first search across nonsingular faces.

Cells of the closed complex are encoded per column: an even code 2*j is the
vertex at the j-th skeleton value of that column, an odd code 2*k+1 is the
k-th open interval.  The dimension of a cell is the number of odd entries.
"""

from __future__ import annotations

import itertools
from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction

from .braid import (
    BraidError,
    DiscreteBraid,
    Permutation,
    extend,
    nudge_seam,
    validate,
    word_metric,
)

BoxLabel = tuple[int, ...]
Cell = tuple[int, ...]


class OnHyperplane(BraidError):
    """A free anchor coincides with a skeleton value."""


class NotBounded(BraidError):
    pass


class NotProper(BraidError):
    pass


class UnionNotRegular(BraidError):
    """Seed strand union skeleton is a singular diagram."""


@dataclass(frozen=True)
class IntervalPartition:
    """Per-column sorted skeleton values; intervals labeled 0..m_i.

    Interval k lies between value k-1 and value k; labels 0 and m_i are the
    unbounded end intervals.
    """

    values: tuple[tuple[Fraction, ...], ...]

    @staticmethod
    def from_skeleton(skeleton: DiscreteBraid) -> "IntervalPartition":
        cols = []
        for i in range(skeleton.d):
            cols.append(tuple(sorted({skeleton.anchors[a][i] for a in range(skeleton.n)})))
        return IntervalPartition(tuple(cols))

    @property
    def d(self) -> int:
        return len(self.values)

    def counts(self) -> tuple[int, ...]:
        return tuple(len(v) for v in self.values)

    def interval_of(self, i: int, x: Fraction) -> int:
        col = self.values[i]
        k = bisect_left(col, x)
        if k < len(col) and col[k] == x:
            raise OnHyperplane(f"value {x} sits on a skeleton value at position {i}")
        return k

    def midpoint(self, i: int, k: int) -> Fraction:
        col = self.values[i]
        if k == 0:
            return col[0] - 1
        if k == len(col):
            return col[-1] + 1
        return (col[k - 1] + col[k]) / 2

    def is_bounded_label(self, i: int, k: int) -> bool:
        return 1 <= k <= len(self.values[i]) - 1


def box_of(free, skeleton: DiscreteBraid,
           partition: IntervalPartition | None = None) -> BoxLabel:
    """Locate a free strand (d values) among the skeleton hyperplanes."""
    part = partition or IntervalPartition.from_skeleton(skeleton)
    free = tuple(Fraction(x) for x in free)
    if len(free) == skeleton.d + 1:
        free = free[: skeleton.d]
    if len(free) != skeleton.d:
        raise ValueError("free strand and skeleton period mismatch")
    return tuple(part.interval_of(i, free[i]) for i in range(skeleton.d))


class _SkeletonGeometry:
    """Precomputed integer data for fast box predicates.

    value_index[b][i] for i in 0..d is the position of strand b's anchor in
    the sorted values of column i (column d indexes into column 0's values
    through the closing permutation).  All box predicates reduce to integer
    comparisons of interval labels against these indices.
    """

    def __init__(self, skeleton: DiscreteBraid):
        self.skeleton = skeleton
        self.partition = IntervalPartition.from_skeleton(skeleton)
        self.tau_inv = skeleton.tau.inverse()
        d = skeleton.d
        index = []
        for a in range(skeleton.n):
            row = [self.partition.values[i % d].index(skeleton.anchor(a, i))
                   for i in range(d + 1)]
            index.append(tuple(row))
        self.value_index = tuple(index)
        comps = skeleton.components()
        self.component_of = {}
        for k, cyc in enumerate(comps):
            for a in cyc:
                self.component_of[a] = k
        self.n_components = len(comps)
        self.strands_at: dict[tuple[int, int], tuple[int, ...]] = {}
        for a in range(skeleton.n):
            for i in range(d):
                key = (i, self.value_index[a][i])
                self.strands_at[key] = self.strands_at.get(key, ()) + (a,)

    def sign_at(self, box: BoxLabel, pos: int, strand: int) -> int:
        """Sign of (free value at pos) - (skeleton anchor at pos), pos in -1..d."""
        d = self.partition.d
        if pos == -1:
            strand = self.tau_inv(strand)
            pos = d - 1
        j = self.value_index[strand][pos]
        return 1 if box[pos % d] > j else -1

    def crossings_with_strand(self, box: BoxLabel, strand: int) -> int:
        d = self.partition.d
        signs = [self.sign_at(box, i, strand) for i in range(d + 1)]
        return sum(1 for i in range(d) if signs[i] != signs[i + 1])

    def free_word(self, box: BoxLabel) -> int:
        """Total crossings of the free strand with the skeleton."""
        return sum(self.crossings_with_strand(box, a) for a in range(self.skeleton.n))

    def component_signature(self, box: BoxLabel) -> tuple[int, ...]:
        totals = [0] * self.n_components
        for a in range(self.skeleton.n):
            totals[self.component_of[a]] += self.crossings_with_strand(box, a)
        return tuple(totals)

    def face_is_singular(self, box: BoxLabel, i: int, direction: int) -> bool:
        """Is the face crossed by moving coordinate i up (+1) or down (-1) singular?

        The face exists when the endpoint is finite.  It is singular when
        some skeleton strand through the crossed value has both neighbouring
        anchors on one side of the (box-constant) free values: the sign
        product is then positive and the adjacent boxes lie in different
        discretized classes.
        """
        k = box[i]
        j = k if direction > 0 else k - 1
        if j < 0 or j >= len(self.partition.values[i]):
            raise ValueError("face at an unbounded end does not exist")
        for strand in self.strands_at[(i, j)]:
            if self.sign_at(box, i - 1, strand) * self.sign_at(box, i + 1, strand) > 0:
                return True
        return False


def face_is_singular(box: BoxLabel, i: int, direction: int,
                     skeleton: DiscreteBraid) -> bool:
    return _SkeletonGeometry(skeleton).face_is_singular(box, i, direction)


@dataclass
class ExitSet:
    """Closure of the word-metric-maximal boundary faces of a class."""

    cells: frozenset[Cell]
    equal_word_faces: tuple[Cell, ...] = ()


@dataclass
class BraidClassComplex:
    """One discretized relative braid class as a set of boxes in R^d."""

    skeleton: DiscreteBraid
    boxes: frozenset[BoxLabel]
    bounded: bool
    proper: bool
    crossing_signature: tuple[int, ...]
    seed_box: BoxLabel
    geometry: _SkeletonGeometry = field(repr=False)
    _cells: dict[int, list[Cell]] | None = field(default=None, repr=False)
    _exit: ExitSet | None = field(default=None, repr=False)

    @property
    def d(self) -> int:
        return self.skeleton.d

    @property
    def partition(self) -> IntervalPartition:
        return self.geometry.partition

    def __contains__(self, box: BoxLabel) -> bool:
        return box in self.boxes

    def midpoint_strand(self, box: BoxLabel) -> tuple[Fraction, ...]:
        part = self.partition
        return tuple(part.midpoint(i, box[i]) for i in range(part.d))

    def free_word(self, box: BoxLabel) -> int:
        return self.geometry.free_word(box)

    def cells(self) -> dict[int, list[Cell]]:
        """All cells of the closed complex, graded by dimension, sorted."""
        if self._cells is None:
            counts = self.partition.counts()
            seen: set[Cell] = set()
            for box in self.boxes:
                options = []
                for i, k in enumerate(box):
                    opts = [2 * k + 1]
                    if k >= 1:
                        opts.append(2 * (k - 1))
                    if k <= counts[i] - 1:
                        opts.append(2 * k)
                    options.append(opts)
                seen.update(itertools.product(*options))
            graded: dict[int, list[Cell]] = {}
            for cell in seen:
                graded.setdefault(_cell_dim(cell), []).append(cell)
            for k in graded:
                graded[k].sort()
            self._cells = graded
        return self._cells

    def boundary_faces(self):
        """Codimension-1 boundary faces as (box, i, direction, neighbor)."""
        counts = self.partition.counts()
        out = []
        for box in sorted(self.boxes):
            for i in range(self.d):
                for direction in (-1, 1):
                    j = box[i] if direction > 0 else box[i] - 1
                    if j < 0 or j >= counts[i]:
                        continue
                    neighbor = box[:i] + (box[i] + direction,) + box[i + 1:]
                    if neighbor in self.boxes:
                        continue
                    out.append((box, i, direction, neighbor))
        return out

    def exit_set(self) -> ExitSet:
        if self._exit is None:
            self._exit = exit_set(self)
        return self._exit

    def to_json_dict(self) -> dict:
        cells = self.cells()
        exit_cells = self.exit_set().cells if self.bounded and self.proper else frozenset()
        return {
            "d": self.d,
            "boxes": [list(b) for b in sorted(self.boxes)],
            "bounded": self.bounded,
            "proper": self.proper,
            "signature": list(self.crossing_signature),
            "cells": {str(k): [list(c) for c in cells[k]] for k in sorted(cells)},
            "exit_cells": [list(c) for c in sorted(exit_cells)],
        }


def _cell_dim(cell: Cell) -> int:
    return sum(1 for c in cell if c % 2 == 1)


def cell_closure(cell: Cell, counts: tuple[int, ...]) -> set[Cell]:
    """All faces of a cell (including itself)."""
    options = []
    for i, code in enumerate(cell):
        if code % 2 == 0:
            options.append([code])
        else:
            k = code // 2
            opts = [code]
            if k >= 1:
                opts.append(2 * (k - 1))
            if k <= counts[i] - 1:
                opts.append(2 * k)
            options.append(opts)
    return set(itertools.product(*options))


def cell_boundary(cell: Cell, counts: tuple[int, ...]) -> list[tuple[Cell, int]]:
    """Cubical boundary with signs: per odd column, (upper face) - (lower face)."""
    out = []
    sign = 1
    for i, code in enumerate(cell):
        if code % 2 == 0:
            continue
        k = code // 2
        if k <= counts[i] - 1:
            out.append((cell[:i] + (2 * k,) + cell[i + 1:], sign))
        if k >= 1:
            out.append((cell[:i] + (2 * (k - 1),) + cell[i + 1:], -sign))
        sign = -sign
    return out


def _free_to_braid(free, d: int) -> DiscreteBraid:
    row = tuple(Fraction(x) for x in free)
    if len(row) == d:
        row = row + (row[0],)
    return DiscreteBraid.from_rows([row], Permutation.identity(1))


def enumerate_class(seed_free, skeleton: DiscreteBraid,
                    geometry: _SkeletonGeometry | None = None,
                    max_boxes: int = 2_000_000) -> BraidClassComplex:
    """Closure of the seed's box under adjacency across nonsingular faces."""
    geo = geometry or _SkeletonGeometry(skeleton)
    seed_free = tuple(Fraction(x) for x in seed_free)
    reg = validate(_free_to_braid(seed_free, skeleton.d).union(skeleton))
    if not reg.is_regular:
        raise UnionNotRegular(f"seed union skeleton is {reg.kind}")
    seed = box_of(seed_free, skeleton, geo.partition)
    return _class_from_box(seed, geo, max_boxes=max_boxes)


def _class_from_box(seed: BoxLabel, geo: _SkeletonGeometry,
                    max_boxes: int = 2_000_000) -> BraidClassComplex:
    part = geo.partition
    d = part.d
    counts = part.counts()
    boxes = {seed}
    frontier = [seed]
    while frontier:
        box = frontier.pop()
        for i in range(d):
            for direction in (-1, 1):
                j = box[i] if direction > 0 else box[i] - 1
                if j < 0 or j >= counts[i]:
                    continue
                neighbor = box[:i] + (box[i] + direction,) + box[i + 1:]
                if neighbor in boxes:
                    continue
                if geo.face_is_singular(box, i, direction):
                    continue
                boxes.add(neighbor)
                if len(boxes) > max_boxes:
                    raise MemoryError("class exceeds the box budget")
                frontier.append(neighbor)
    bounded = all(part.is_bounded_label(i, b[i]) for b in boxes for i in range(d))
    signature = geo.component_signature(seed)
    for box in boxes:
        if geo.component_signature(box) != signature:
            raise AssertionError("componentwise crossing totals differ inside one class")
    cpx = BraidClassComplex(
        skeleton=geo.skeleton,
        boxes=frozenset(boxes),
        bounded=bounded,
        proper=True,
        crossing_signature=signature,
        seed_box=seed,
        geometry=geo,
    )
    cpx.proper = check_proper(cpx)
    return cpx


def check_proper(cpx: BraidClassComplex) -> bool:
    """False iff a closure vertex of the class is a whole skeleton strand.

    Only strands fixed by the closing permutation can be collapse targets of
    a period-d free strand: coincidence at every integer position with a
    strand in a longer cycle would force two skeleton strands to coincide,
    contradicting regularity of the skeleton.
    """
    geo = cpx.geometry
    skel = cpx.skeleton
    for a in range(skel.n):
        if skel.tau(a) != a:
            continue
        target = geo.value_index[a][: skel.d]
        for box in cpx.boxes:
            if all(box[i] in (target[i], target[i] + 1) for i in range(skel.d)):
                return False
    return True


def exit_set(cpx: BraidClassComplex) -> ExitSet:
    """N^- : closure of boundary faces where the word metric does not drop inward.

    A face is an exit face when the free strand's crossing total inside is
    greater than or equal to the total just outside; ties are included and
    flagged (strict decrease is the generic situation).
    """
    if not cpx.bounded:
        raise NotBounded("exit set needs a bounded class")
    if not cpx.proper:
        raise NotProper("exit set needs a proper class")
    geo = cpx.geometry
    counts = cpx.partition.counts()
    cells: set[Cell] = set()
    ties = []
    for box, i, direction, neighbor in cpx.boundary_faces():
        if not geo.face_is_singular(box, i, direction):
            raise AssertionError("nonsingular boundary face escaped the class BFS")
        w_in = geo.free_word(box)
        w_out = geo.free_word(neighbor)
        if w_in < w_out:
            continue
        j = box[i] if direction > 0 else box[i] - 1
        face = tuple(2 * k + 1 for k in box[:i]) + (2 * j,) + tuple(
            2 * k + 1 for k in box[i + 1:]
        )
        if w_in == w_out:
            ties.append(face)
        cells.update(cell_closure(face, counts))
    return ExitSet(cells=frozenset(cells), equal_word_faces=tuple(ties))


def enumerate_all_classes(skeleton: DiscreteBraid, window=None,
                          max_boxes: int = 500_000) -> list[BraidClassComplex]:
    """Partition every box label vector into classes.

    Intended for small periods; the box count is the product over columns of
    (number of values + 1).  The window, when given, must contain all
    skeleton values.
    """
    geo = _SkeletonGeometry(skeleton)
    part = geo.partition
    if window is not None:
        lo, hi = Fraction(window[0]), Fraction(window[1])
        for col in part.values:
            if col[0] < lo or col[-1] > hi:
                raise ValueError("window does not contain all skeleton values")
    total = 1
    for col in part.values:
        total *= len(col) + 1
    if total > max_boxes:
        raise MemoryError(f"{total} boxes exceed the enumeration budget")

    ranges = [range(len(col) + 1) for col in part.values]
    assigned: set[BoxLabel] = set()
    classes = []
    for box in itertools.product(*ranges):
        if box in assigned:
            continue
        cpx = _class_from_box(box, geo)
        assigned.update(cpx.boxes)
        classes.append(cpx)
    return classes


# -- topological comparison through stabilization ---------------------------


def joint_extend(frees, skeleton: DiscreteBraid):
    """Extend several free strands over one skeleton by one period.

    The skeleton seam is nudged once (independently of the free strands) so
    every configuration extends over the *same* new skeleton; each free
    strand is then shifted off the skeleton seam values if needed.
    """
    d = skeleton.d
    skel = nudge_seam(skeleton)
    skel_seam = {skel.anchors[a][0] for a in range(skel.n)}
    all_vals = sorted(
        {v for a in range(skel.n) for v in skel.anchors[a]}
        | {Fraction(f[0]) for f in frees}
    )
    gaps = [y - x for x, y in zip(all_vals, all_vals[1:]) if y > x]
    eps = (min(gaps) if gaps else Fraction(1)) / 4

    new_frees = []
    for f in frees:
        row = [Fraction(x) for x in f][:d]
        if row[0] in skel_seam:
            row[0] += eps
        braid = _free_to_braid(tuple(row), d)
        new_frees.append(extend(braid).anchors[0][:-1])
    return new_frees, extend(skel)


def are_topologically_equal(u1, u2, skeleton: DiscreteBraid,
                            max_boxes: int = 2_000_000) -> bool:
    """Same topological relative braid class, decided by stabilization.

    Extends both configurations over the same skeleton until the period
    exceeds the word metric of the union (where discretized classes coincide
    with topological ones), then checks membership in one path component.
    """
    u1 = tuple(Fraction(x) for x in u1)[: skeleton.d]
    u2 = tuple(Fraction(x) for x in u2)[: skeleton.d]
    geo = _SkeletonGeometry(skeleton)
    b1 = box_of(u1, skeleton, geo.partition)
    b2 = box_of(u2, skeleton, geo.partition)
    if geo.component_signature(b1) != geo.component_signature(b2):
        return False

    w1 = word_metric(_free_to_braid(u1, skeleton.d).union(skeleton))
    w2 = word_metric(_free_to_braid(u2, skeleton.d).union(skeleton))
    target = max(w1, w2) + 1

    frees, skel = [u1, u2], skeleton
    while True:
        geo = _SkeletonGeometry(skel)
        cls = _class_from_box(box_of(frees[0], skel, geo.partition), geo,
                              max_boxes=max_boxes)
        if box_of(frees[1], skel, geo.partition) in cls.boxes:
            return True
        if skel.d > target:
            return False
        frees, skel = joint_extend(frees, skel)
