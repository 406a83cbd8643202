"""Exact-arithmetic discretized closed braid diagrams.

A closed braid on n strands with period d is stored as n rows of d+1 anchor
heights together with a permutation tau closing the diagram up: the last
anchor of strand a equals the first anchor of strand tau(a).  All heights are
rationals (fractions.Fraction), so equality of anchors -- and hence
singularity of a diagram -- is decidable.  Anything floating-point lives in
the flow modules, never here.

Index convention: subscripts are spatial positions 0..d, superscripts label
strands.  Positions outside 0..d wrap "mod the permutation at d":
u[a][d + j] == u[tau(a)][j].
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction


class BraidError(Exception):
    """Base class for braid-domain errors."""


class ClosureViolation(BraidError):
    """Anchor row does not close up through tau."""


class SingularPair(BraidError):
    """Two strands have a non-transversal tangency."""


class OddPeriod(BraidError):
    """Operation requires an even period."""


class NonGenericAtSeam(BraidError):
    """Two strands coincide at the last anchor column."""


def _to_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


@dataclass(frozen=True)
class Permutation:
    """A permutation of 0..n-1 given by its image tuple."""

    images: tuple[int, ...]

    def __post_init__(self):
        n = len(self.images)
        if sorted(self.images) != list(range(n)):
            raise ValueError(f"not a permutation of 0..{n - 1}: {self.images}")

    @staticmethod
    def identity(n: int) -> "Permutation":
        return Permutation(tuple(range(n)))

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def compose(self, other: "Permutation") -> "Permutation":
        """self after other: (self.compose(other))(i) == self(other(i))."""
        if other.n != self.n:
            raise ValueError("size mismatch")
        return Permutation(tuple(self.images[other.images[i]] for i in range(self.n)))

    def power(self, k: int) -> "Permutation":
        result = Permutation.identity(self.n)
        base = self if k >= 0 else self.inverse()
        for _ in range(abs(k)):
            result = base.compose(result)
        return result

    def cycles(self) -> list[list[int]]:
        """Cycle decomposition; each cycle starts at its minimal element."""
        seen = [False] * self.n
        out = []
        for i in range(self.n):
            if seen[i]:
                continue
            cyc = []
            j = i
            while not seen[j]:
                seen[j] = True
                cyc.append(j)
                j = self.images[j]
            out.append(cyc)
        return out


@dataclass(frozen=True)
class BraidRegularity:
    """Outcome of validate(): Regular, Singular or Collapsed.

    For singular diagrams, ``witnesses`` lists the failing triples
    (i, a, b): anchors of strands a and b coincide at position i without a
    transversal crossing.  The codimension is the number of such witnesses.
    Collapsed diagrams additionally carry the strand pairs that coincide for
    every position.
    """

    kind: str  # "Regular" | "Singular" | "Collapsed"
    codimension: int = 0
    witnesses: tuple[tuple[int, int, int], ...] = ()
    collapsed_pairs: tuple[tuple[int, int], ...] = ()

    @property
    def is_regular(self) -> bool:
        return self.kind == "Regular"


@dataclass(frozen=True)
class DiscreteBraid:
    """A discretized period-d closed braid on n strands with exact anchors."""

    anchors: tuple[tuple[Fraction, ...], ...]  # n rows of d+1 heights
    tau: Permutation

    def __post_init__(self):
        n = len(self.anchors)
        if n == 0:
            raise ValueError("braid needs at least one strand")
        if self.tau.n != n:
            raise ValueError("permutation size does not match strand count")
        d = len(self.anchors[0]) - 1
        if d < 1:
            raise ValueError("period must be positive")
        for row in self.anchors:
            if len(row) != d + 1:
                raise ValueError("ragged anchor rows")
        for a in range(n):
            if self.anchors[a][d] != self.anchors[self.tau(a)][0]:
                raise ClosureViolation(
                    f"strand {a}: u[{a}][{d}] != u[{self.tau(a)}][0]"
                )

    @staticmethod
    def from_rows(rows: Sequence[Sequence], tau: Permutation | Sequence[int] | None = None) -> "DiscreteBraid":
        if tau is None:
            tau = Permutation.identity(len(rows))
        elif not isinstance(tau, Permutation):
            tau = Permutation(tuple(tau))
        anchors = tuple(tuple(_to_rational(x) for x in row) for row in rows)
        return DiscreteBraid(anchors, tau)

    @property
    def n(self) -> int:
        return len(self.anchors)

    @property
    def d(self) -> int:
        return len(self.anchors[0]) - 1

    def anchor(self, a: int, i: int) -> Fraction:
        """Anchor of strand a at any integer position, wrapping through tau."""
        d = self.d
        q, r = divmod(i, d)
        if q:
            a = self.tau.power(q)(a)
        return self.anchors[a][r]

    def strand(self, a: int) -> tuple[Fraction, ...]:
        return self.anchors[a]

    def components(self) -> list[list[int]]:
        """Connected components of the closed diagram = cycles of tau."""
        return self.tau.cycles()

    def union(self, other: "DiscreteBraid") -> "DiscreteBraid":
        """Disjoint union of strand sets (used for relative diagrams)."""
        if other.d != self.d:
            raise ValueError("period mismatch")
        n = self.n
        images = tuple(self.tau.images) + tuple(n + j for j in other.tau.images)
        return DiscreteBraid(self.anchors + other.anchors, Permutation(images))

    def with_strand_values(self, a: int, row: Sequence[Fraction]) -> "DiscreteBraid":
        rows = list(self.anchors)
        rows[a] = tuple(row)
        return DiscreteBraid(tuple(rows), self.tau)

    # -- serialization ----------------------------------------------------

    def to_json_dict(self) -> dict:
        def enc(x: Fraction):
            return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

        return {
            "n": self.n,
            "d": self.d,
            "tau": list(self.tau.images),
            "strands": [[enc(x) for x in row] for row in self.anchors],
        }

    @staticmethod
    def from_json_dict(data: dict) -> "DiscreteBraid":
        strands = data["strands"]
        if len(strands) != data["n"]:
            raise ValueError("strand count mismatch in JSON")
        if any(len(row) != data["d"] + 1 for row in strands):
            raise ValueError("period mismatch in JSON")
        return DiscreteBraid.from_rows(strands, Permutation(tuple(data["tau"])))

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), separators=(",", ":"))

    @staticmethod
    def from_json(text: str) -> "DiscreteBraid":
        return DiscreteBraid.from_json_dict(json.loads(text))


def validate(b: DiscreteBraid) -> BraidRegularity:
    """Classify a diagram as Regular, Singular(m) or Collapsed.

    A pair of anchors coinciding at position i is a singularity witness when
    the neighbouring differences do not have opposite signs, i.e. when
    (u[a][i-1]-u[b][i-1]) * (u[a][i+1]-u[b][i+1]) >= 0 with wrap-around.
    """
    witnesses = []
    for i in range(b.d):
        for a in range(b.n):
            for c in range(a + 1, b.n):
                if b.anchor(a, i) != b.anchor(c, i):
                    continue
                left = b.anchor(a, i - 1) - b.anchor(c, i - 1)
                right = b.anchor(a, i + 1) - b.anchor(c, i + 1)
                if left * right >= 0:
                    witnesses.append((i, a, c))
    collapsed = []
    for a in range(b.n):
        for c in range(a + 1, b.n):
            if _strands_coincide(b, a, c):
                collapsed.append((a, c))
    if collapsed:
        return BraidRegularity(
            "Collapsed",
            codimension=len(witnesses),
            witnesses=tuple(witnesses),
            collapsed_pairs=tuple(collapsed),
        )
    if witnesses:
        return BraidRegularity("Singular", codimension=len(witnesses), witnesses=tuple(witnesses))
    return BraidRegularity("Regular")


def _strands_coincide(b: DiscreteBraid, a: int, c: int) -> bool:
    """True iff u[a][i] == u[c][i] for every integer i (following tau)."""
    pa, pc = a, c
    while True:
        if b.anchors[pa] != b.anchors[pc]:
            return False
        pa, pc = b.tau(pa), b.tau(pc)
        if (pa, pc) == (a, c):
            return True


def crossing_count(b: DiscreteBraid, a: int, c: int) -> int:
    """Number of crossings between strands a and c in the closed diagram.

    Counts sign changes of the difference over the segments i..i+1 for
    i = 0..d-1, plus transversal anchor crossings; an anchor tangency raises
    SingularPair.  Anchor crossings at the seam column are attributed to the
    strand pair whose own position-0 anchors coincide.
    """
    if a == c:
        raise ValueError("crossing_count needs two distinct strands")
    count = 0
    for i in range(b.d):
        di = b.anchor(a, i) - b.anchor(c, i)
        dnext = b.anchor(a, i + 1) - b.anchor(c, i + 1)
        if di == 0:
            dprev = b.anchor(a, i - 1) - b.anchor(c, i - 1)
            if dprev * dnext >= 0:
                raise SingularPair(f"tangency of strands {a},{c} at position {i}")
            count += 1
        elif dnext != 0 and di * dnext < 0:
            count += 1
        # di != 0, dnext == 0: the crossing is the anchor case at i+1
        # (possibly of the successor pair when i+1 == d).
    return count


def intersection_matrix(b: DiscreteBraid) -> dict[tuple[int, int], int]:
    """crossing_count for every unordered strand pair."""
    return {
        (a, c): crossing_count(b, a, c)
        for a in range(b.n)
        for c in range(a + 1, b.n)
    }


def component_crossing_totals(b: DiscreteBraid) -> dict[tuple[int, int], int]:
    """Total crossings between (unordered, possibly equal) components.

    Per-strand counts are not isotopy invariants when a component has several
    strands (crossings migrate across the seam), but componentwise totals
    are.
    """
    comps = b.components()
    comp_of = {}
    for k, cyc in enumerate(comps):
        for a in cyc:
            comp_of[a] = k
    totals: dict[tuple[int, int], int] = {}
    for a in range(b.n):
        for c in range(a + 1, b.n):
            key = tuple(sorted((comp_of[a], comp_of[c])))
            totals[key] = totals.get(key, 0) + crossing_count(b, a, c)
    return totals


def word_metric(b: DiscreteBraid) -> int:
    """Length of the diagram in positive braid generators = total crossings."""
    return sum(intersection_matrix(b).values())


def dualize(b: DiscreteBraid) -> DiscreteBraid:
    """Multiply anchors by (-1)^i; inserts a half twist per segment.

    Requires an even period so the signs close up.  An involution that takes
    Regular diagrams to Regular diagrams.
    """
    if b.d % 2:
        raise OddPeriod("dualize needs an even period")
    anchors = tuple(
        tuple(x if i % 2 == 0 else -x for i, x in enumerate(row)) for row in b.anchors
    )
    return DiscreteBraid(anchors, b.tau)


def extend(b: DiscreteBraid) -> DiscreteBraid:
    """Concatenate with the trivial period-one braid (period d -> d+1)."""
    d = b.d
    seam = [row[d] for row in b.anchors]
    if len(set(seam)) != len(seam):
        raise NonGenericAtSeam("two strands coincide at position d; nudge_seam first")
    anchors = tuple(row + (row[d],) for row in b.anchors)
    return DiscreteBraid(anchors, b.tau)


def lift(b: DiscreteBraid, cover: int) -> DiscreteBraid:
    """Period N*d cover: strands unwound along their tau cycles."""
    if cover < 1:
        raise ValueError("cover must be positive")
    if cover == 1:
        return b
    d = b.d
    rows = []
    for a in range(b.n):
        row = []
        s = a
        for _ in range(cover):
            row.extend(b.anchors[s][:d])
            s = b.tau(s)
        row.append(b.anchors[s][0])
        rows.append(tuple(row))
    return DiscreteBraid(tuple(rows), b.tau.power(cover))


def augment(b: DiscreteBraid, mode: str = "Constant") -> DiscreteBraid:
    """Append bounding strands below and above the diagram.

    Constant mode adds flat strands at min-1 and max+1.  UpDown mode (even
    period only) adds the oscillating strands min-1+(-1)^(i+1) and
    max+1+(-1)^(i+1), which stay clear of any up-down diagram.
    """
    lo = min(min(row) for row in b.anchors)
    hi = max(max(row) for row in b.anchors)
    d = b.d
    if mode == "Constant":
        low = tuple(lo - 1 for _ in range(d + 1))
        high = tuple(hi + 1 for _ in range(d + 1))
    elif mode == "UpDown":
        if d % 2:
            raise OddPeriod("UpDown augmentation needs an even period")
        wiggle = [Fraction(-1) if i % 2 == 0 else Fraction(1) for i in range(d + 1)]
        low = tuple(lo - 1 + w for w in wiggle)
        high = tuple(hi + 1 + w for w in wiggle)
    else:
        raise ValueError(f"unknown augmentation mode {mode!r}")
    extra = DiscreteBraid((low, high), Permutation.identity(2))
    result = b.union(extra)
    reg = validate(result)
    if not reg.is_regular:
        raise SingularPair(f"augmented diagram is {reg.kind}; witnesses {reg.witnesses}")
    return result


def is_updown(b: DiscreteBraid) -> bool:
    """True iff (-1)^i (u[i+1] - u[i]) > 0 for every strand and position."""
    if b.d % 2:
        raise OddPeriod("up-down structure needs an even period")
    for row in b.anchors:
        for i in range(b.d):
            step = row[i + 1] - row[i]
            if (step if i % 2 == 0 else -step) <= 0:
                return False
    return True


def nudge_seam(b: DiscreteBraid) -> DiscreteBraid:
    """Separate coinciding anchors at the seam column by a minimal rational.

    Perturbs position 0 (and the matching position d of the tau-predecessors)
    of every tied strand by distinct multiples of a rational eps small enough
    that no other anchor coincidence is created or resolved elsewhere; the
    result stays in the same discretized braid class.  Deterministic.
    """
    seam = [b.anchors[a][0] for a in range(b.n)]
    groups: dict[Fraction, list[int]] = {}
    for a, v in enumerate(seam):
        groups.setdefault(v, []).append(a)
    if all(len(g) == 1 for g in groups.values()):
        return b

    gaps = []
    for i in range(b.d):
        col = sorted({b.anchors[a][i] for a in range(b.n)})
        gaps.extend(y - x for x, y in zip(col, col[1:]))
    min_gap = min(gaps) if gaps else Fraction(1)
    eps = min_gap / (2 * (b.n + 1))

    offset = [Fraction(0)] * b.n
    for v in sorted(groups):
        tied = groups[v]
        if len(tied) == 1:
            continue
        for k, a in enumerate(sorted(tied)):
            offset[a] = eps * k
    tau_inv = b.tau.inverse()
    rows = [list(row) for row in b.anchors]
    for a in range(b.n):
        rows[a][0] = rows[a][0] + offset[a]
        rows[tau_inv(a)][b.d] = rows[a][0]
    nudged = DiscreteBraid(tuple(tuple(r) for r in rows), b.tau)
    if not validate(nudged).is_regular:
        raise SingularPair("seam nudge produced a singular diagram")
    return nudged


def relabeled(b: DiscreteBraid, sigma: Permutation) -> DiscreteBraid:
    """Reorder strands by sigma; the closing permutation conjugates."""
    inv = sigma.inverse()
    anchors = tuple(b.anchors[inv(a)] for a in range(b.n))
    tau = sigma.compose(b.tau).compose(inv)
    return DiscreteBraid(anchors, tau)
