"""Parabolic recurrence systems and the flows they induce on braid space.

A parabolic recurrence relation is a d-periodic family R_i(r, s, t) strictly
increasing in r and non-decreasing in t; the induced flow du_i/dt = R_i moves
braid anchors so that strand crossings can annihilate but never appear.  The
module builds such systems (notably one fixing a prescribed skeleton, built
from monotone interpolation slices), integrates them with event detection at
anchor collisions, checks the crossing-number monotonicity along
trajectories, and locates fixed points with Morse data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.integrate import solve_ivp

from .braid import BraidError, DiscreteBraid, Permutation
from .interpolation import (
    MonotoneCubic,
    PiecewiseLinear,
    increasing_pair,
    smoothstep,
    smoothstep_derivative,
)

__all__ = [
    "RecurrenceSystem", "Trajectory", "Event", "FixedPoint", "FixedPointSearch",
    "MonotonicityViolation", "BlowUp", "GapCollapse", "MonotonicityBreach",
    "increasing_pair", "skeletal_system", "from_generating", "integrate",
    "verify_comparison", "find_fixed_points", "blend",
]


class MonotonicityViolation(BraidError):
    pass


class BlowUp(BraidError):
    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class GapCollapse(BraidError):
    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class MonotonicityBreach(BraidError):
    pass


_FD_STEP = 1e-6


@dataclass
class RecurrenceSystem:
    """d-periodic recurrence functions with optional partials and potential.

    ``funcs[i]
    `` evaluates R_i(r, s, t); ``partials[i]``, when present, returns the
    triple of partial derivatives.  Exact systems carry generating functions
    S_i with R_i = d2 S_{i-1} + d1 S_i and the action W(u) = sum S_i(u_i,
    u_{i+1}).  ``domain`` is "Full" or ("UpDown", eps).
    """

    d: int
    funcs: list
    partials: list | None = None
    generating: list | None = None
    gen_partials: list | None = None
    domain: tuple = ("Full",)
    label: str = ""

    @property
    def exact(self) -> bool:
        return self.generating is not None

    def R(self, i, r, s, t):
        return self.funcs[i % self.d](r, s, t)

    def partials_at(self, i, r, s, t):
        if self.partials is not None:
            return self.partials[i % self.d](r, s, t)
        f = self.funcs[i % self.d]
        h = _FD_STEP
        return (
            (f(r + h, s, t) - f(r - h, s, t)) / (2 * h),
            (f(r, s + h, t) - f(r, s - h, t)) / (2 * h),
            (f(r, s, t + h) - f(r, s, t - h)) / (2 * h),
        )

    def action(self, values) -> float:
        """W(u) for one closed strand given as its d (or k*d) free values."""
        if not self.exact:
            raise ValueError("action needs an exact system")
        vals = list(values)
        D = len(vals)
        total = 0.0
        for i in range(D):
            total += self.generating[i % self.d](vals[i], vals[(i + 1) % D])
        return total

    def residuals(self, braid: DiscreteBraid):
        """R at every anchor of a braid whose period is a multiple of d."""
        out = []
        for a in range(braid.n):
            row = []
            for i in range(braid.d):
                row.append(self.R(i, braid.anchor(a, i - 1), braid.anchor(a, i),
                                  braid.anchor(a, i + 1)))
            out.append(row)
        return out

    def check_monotonicity(self, window, samples: int = 10):
        """Sample (A1) on a cube grid; returns (ok, worst_d1, worst_d3)."""
        lo, hi = float(window[0]), float(window[1])
        grid = np.linspace(lo, hi, samples)
        worst1, worst3 = math.inf, math.inf
        for i in range(self.d):
            for r in grid:
                for s in grid:
                    for t in grid:
                        d1, _, d3 = self.partials_at(i, r, s, t)
                        worst1 = min(worst1, d1)
                        worst3 = min(worst3, d3)
        return (worst1 > 0 and worst3 >= 0), worst1, worst3


# --- construction fixing a skeleton ------------------------------------------


class _Slice:
    """One s-node slice of a_i(r, s): either the identity or a built cubic."""

    __slots__ = ("fn",)

    def __init__(self, fn=None):
        self.fn = fn

    def __call__(self, r):
        return r if self.fn is None else self.fn(r)

    def derivative(self, r):
        return 1 if self.fn is None else self.fn.derivative(r)


class _BlendedColumn:
    """a_i(r, s) (or b_i(s, t)): s-blend of per-node monotone slices.

    At a node the blend weight is exactly 0 or 1, so evaluation there
    reduces to the slice itself and is exact over the rationals.
    """

    def __init__(self, nodes, slices):
        self.nodes = nodes
        self.slices = slices

    def _locate(self, s):
        nodes = self.nodes
        if s <= nodes[0]:
            return 0, 0, 0
        if s >= nodes[-1]:
            return len(nodes) - 1, len(nodes) - 1, 1
        k = 0
        while nodes[k + 1] < s:
            k += 1
        xi = smoothstep(s, nodes[k], nodes[k + 1])
        return k, k + 1, xi

    def __call__(self, r, s):
        k0, k1, xi = self._locate(s)
        if xi == 0:
            return self.slices[k0](r)
        if xi == 1:
            return self.slices[k1](r)
        return (1 - xi) * self.slices[k0](r) + xi * self.slices[k1](r)

    def d_r(self, r, s):
        k0, k1, xi = self._locate(s)
        if xi == 0:
            return self.slices[k0].derivative(r)
        if xi == 1:
            return self.slices[k1].derivative(r)
        return (1 - xi) * self.slices[k0].derivative(r) + xi * self.slices[k1].derivative(r)

    def d_s(self, r, s):
        k0, k1, xi = self._locate(s)
        if k0 == k1 or xi in (0, 1):
            return 0.0
        dxi = smoothstep_derivative(float(s), float(self.nodes[k0]), float(self.nodes[k1]))
        return dxi * (float(self.slices[k1](r)) - float(self.slices[k0](r)))


def skeletal_system(skeleton: DiscreteBraid, label: str = "skeletal") -> RecurrenceSystem:
    """A parabolic recurrence relation under which the skeleton is stationary.

    Per position: where the skeleton values are distinct the relation is
    r + t + c_i(s) with c_i interpolating -(v_{i-1} + v_{i+1}); where several
    strands share a value, increasing slice pairs f, g with matched
    increments (built on the transversal neighbour data) replace r and t on
    that slice, blended across s by a C1 ramp with flat ends.  The residual
    vanishes identically at every skeleton anchor.
    """
    d = skeleton.d
    funcs = []
    partial_fns = []
    for i in range(d):
        groups: dict[Fraction, list[int]] = {}
        for a in range(skeleton.n):
            groups.setdefault(skeleton.anchors[a][i], []).append(a)
        nodes = sorted(groups)
        a_slices, b_slices, c_vals = [], [], []
        for w in nodes:
            members = groups[w]
            if len(members) == 1:
                a = members[0]
                a_slices.append(_Slice())
                b_slices.append(_Slice())
                c_vals.append(-(skeleton.anchor(a, i - 1) + skeleton.anchor(a, i + 1)))
            else:
                members = sorted(members, key=lambda a: skeleton.anchor(a, i - 1))
                xs = [skeleton.anchor(a, i - 1) for a in members]
                zs = [skeleton.anchor(a, i + 1) for a in members]
                marks = [Fraction(j + 1) for j in range(len(members))]
                f = MonotoneCubic.fit(xs, marks)
                g = MonotoneCubic.fit(sorted(zs), marks)
                a_slices.append(_Slice(f))
                b_slices.append(_Slice(g))
                c_vals.append(Fraction(-(len(members) + 1)))
        acol = _BlendedColumn(nodes, a_slices)
        bcol = _BlendedColumn(nodes, b_slices)
        cfn = MonotoneCubic.fit(nodes, c_vals) if len(nodes) > 1 else (
            lambda s, c0=c_vals[0]: c0)
        c_deriv = cfn.derivative if isinstance(cfn, MonotoneCubic) else (lambda s: 0.0)

        def R(r, s, t, acol=acol, bcol=bcol, cfn=cfn):
            return acol(r, s) + bcol(t, s) + cfn(s)

        def P(r, s, t, acol=acol, bcol=bcol, c_deriv=c_deriv):
            return (
                acol.d_r(r, s),
                acol.d_s(r, s) + bcol.d_s(t, s) + float(c_deriv(s)),
                bcol.d_r(t, s),
            )

        funcs.append(R)
        partial_fns.append(P)
    return RecurrenceSystem(d=d, funcs=funcs, partials=partial_fns, label=label)


def from_generating(S, d: int | None = None, partials=None, window=(-3.0, 3.0),
                    samples: int = 8, check: bool = True,
                    label: str = "exact") -> RecurrenceSystem:
    """Exact system R_i = d2 S_{i-1} + d1 S_i from generating functions.

    ``S`` is a list of d functions S_i(x, y) (a single callable is treated
    as d = 1); ``partials``, when given, lists (d1 S_i, d2 S_i) pairs.
    Raises MonotonicityViolation when the sampled twist d1 d2 S is not
    strictly positive on the window grid.
    """
    if callable(S):
        S = [S]
    S = list(S)
    if d is None:
        d = len(S)
    if len(S) != d:
        raise ValueError("need one generating function per position")

    if partials is None:
        h = _FD_STEP

        def make(i):
            Si = S[i]
            return (
                lambda x, y: (Si(x + h, y) - Si(x - h, y)) / (2 * h),
                lambda x, y: (Si(x, y + h) - Si(x, y - h)) / (2 * h),
            )

        partials = [make(i) for i in range(d)]
    d1 = [p[0] for p in partials]
    d2 = [p[1] for p in partials]

    funcs = []
    pfns = []
    for i in range(d):
        def R(r, s, t, i=i):
            return d2[(i - 1) % d](r, s) + d1[i](s, t)

        def P(r, s, t, i=i):
            h = _FD_STEP
            dr = (d2[(i - 1) % d](r + h, s) - d2[(i - 1) % d](r - h, s)) / (2 * h)
            dt = (d1[i](s, t + h) - d1[i](s, t - h)) / (2 * h)
            ds = ((d2[(i - 1) % d](r, s + h) - d2[(i - 1) % d](r, s - h)) / (2 * h)
                  + (d1[i](s + h, t) - d1[i](s - h, t)) / (2 * h))
            return dr, ds, dt

        funcs.append(R)
        pfns.append(P)

    sys = RecurrenceSystem(d=d, funcs=funcs, partials=pfns, generating=S,
                           gen_partials=partials, label=label)
    if check:
        lo, hi = window
        grid = np.linspace(lo, hi, samples)
        worst = math.inf
        for i in range(d):
            for x in grid:
                for y in grid:
                    h = 1e-5
                    twist = (d2[i](x + h, y) - d2[i](x - h, y)) / (2 * h)
                    worst = min(worst, twist)
        if worst <= 0:
            raise MonotonicityViolation(
                f"sampled d1 d2 S is not strictly positive (min {worst:.3g})")
    return sys


def discrete_allen_cahn(lam: float = 4.0, d: int = 1) -> RecurrenceSystem:
    """The exact nearest-neighbour system u'' - lam (u^3 - u) on the lattice.

    Generating function S(x, y) = -(x - y)^2/2 - lam (x^4/4 - x^2/2).
    """
    def S(x, y):
        return -0.5 * (x - y) ** 2 - lam * (0.25 * x ** 4 - 0.5 * x ** 2)

    def d1S(x, y):
        return -(x - y) - lam * (x ** 3 - x)

    def d2S(x, y):
        return (x - y)

    return from_generating([S] * d, d=d, partials=[(d1S, d2S)] * d,
                           check=False, label=f"allen-cahn(lam={lam})")


# --- integration --------------------------------------------------------------


@dataclass(frozen=True)
class Event:
    time: float
    column: int
    pair: tuple[int, int]
    kind: str  # "tangency" | "transversal" | "degenerate"


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (nt, n, d)
    tau: Permutation
    pair_counts: list[dict]
    component_counts: list[dict]
    events: list[Event]
    wvalues: np.ndarray | None = None
    gaps: np.ndarray | None = None
    gap_eps: float | None = None

    @property
    def n(self):
        return self.states.shape[1]

    @property
    def d(self):
        return self.states.shape[2]

    def final_braid_values(self):
        return self.states[-1]


def _float_pair_counts(state: np.ndarray, tau: Permutation) -> dict:
    """Crossing counts of all strand pairs for a float anchor matrix."""
    n, d = state.shape
    counts = {}
    for a in range(n):
        for b in range(a + 1, n):
            diffs = [state[a, i] - state[b, i] for i in range(d)]
            diffs.append(state[tau(a), 0] - state[tau(b), 0])
            c = 0
            for i in range(d):
                if diffs[i] * diffs[i + 1] < 0:
                    c += 1
            counts[(a, b)] = c
    return counts


def _component_counts(pair_counts: dict, tau: Permutation) -> dict:
    comp_of = {}
    for k, cyc in enumerate(tau.cycles()):
        for a in cyc:
            comp_of[a] = k
    out: dict[tuple[int, int], int] = {}
    for (a, b), c in pair_counts.items():
        key = tuple(sorted((comp_of[a], comp_of[b])))
        out[key] = out.get(key, 0) + c
    return out


def _updown_gap(state: np.ndarray, tau: Permutation) -> float:
    n, d = state.shape
    g = math.inf
    for a in range(n):
        for i in range(d):
            nxt = state[a, i + 1] if i + 1 < d else state[tau(a), 0]
            step = nxt - state[a, i]
            g = min(g, step if i % 2 == 0 else -step)
    return g


def integrate(b0, sys: RecurrenceSystem, T: float, tol: float = 1e-9,
              scan_refine: int = 8) -> Trajectory:
    """Integrate the parabolic flow on all strands of b0 up to time T.

    Adaptive Runge-Kutta via solve_ivp with dense output; anchor-difference
    sign changes are located by bisection on the dense solution and
    classified as transversal passages or tangencies (the latter drop the
    word metric by two).  In an up-down domain the alternation gap is
    monitored: once below eps it must not decrease (GapCollapse otherwise).
    """
    if isinstance(b0, DiscreteBraid):
        state0 = np.array([[float(x) for x in row[:-1]] for row in b0.anchors])
        tau = b0.tau
    else:
        state0, tau = b0
        state0 = np.asarray(state0, dtype=float)
    n, d = state0.shape
    if d % sys.d:
        raise ValueError("braid period must be a multiple of the system period")
    tau_inv = tau.inverse()
    if sys.domain[0] == "UpDown":
        eps = float(sys.domain[1])
        if _updown_gap(state0, tau) < eps:
            raise GapCollapse("initial state is not eps-interior to the up-down domain")

    left_idx = np.empty((n, d, 2), dtype=int)
    right_idx = np.empty((n, d, 2), dtype=int)
    for a in range(n):
        for i in range(d):
            left_idx[a, i] = (tau_inv(a), d - 1) if i == 0 else (a, i - 1)
            right_idx[a, i] = (tau(a), 0) if i == d - 1 else (a, i + 1)

    def rhs(t, y):
        u = y.reshape(n, d)
        out = np.empty_like(u)
        for a in range(n):
            for i in range(d):
                la, li = left_idx[a, i]
                ra, ri = right_idx[a, i]
                out[a, i] = sys.R(i, u[la, li], u[a, i], u[ra, ri])
        return out.ravel()

    sol = solve_ivp(rhs, (0.0, float(T)), state0.ravel(), method="RK45",
                    rtol=tol, atol=tol * 1e-2, dense_output=True)
    if not sol.success:
        raise BlowUp(f"integrator failed: {sol.message}")

    times = sol.t
    states = np.array([sol.y[:, k].reshape(n, d) for k in range(len(times))])
    pair_counts = [_float_pair_counts(s, tau) for s in states]
    component_counts = [_component_counts(pc, tau) for pc in pair_counts]

    # event scan on a refined grid
    events = []
    scan_t = []
    for k in range(len(times) - 1):
        scan_t.extend(np.linspace(times[k], times[k + 1], scan_refine, endpoint=False))
    scan_t.append(times[-1])
    scan_t = np.array(scan_t)
    ys = sol.sol(scan_t)

    def diff_at(tq, a, b, i):
        y = sol.sol(tq).reshape(n, d)
        return y[a, i] - y[b, i]

    for a in range(n):
        for b in range(a + 1, n):
            for i in range(d):
                ia = a * d + i
                ib = b * d + i
                series = ys[ia] - ys[ib]
                for k in range(len(scan_t) - 1):
                    f0, f1 = series[k], series[k + 1]
                    if f0 == 0.0 or f0 * f1 >= 0:
                        continue
                    lo, hi = scan_t[k], scan_t[k + 1]
                    for _ in range(60):
                        mid = 0.5 * (lo + hi)
                        fm = diff_at(mid, a, b, i)
                        if f0 * fm <= 0:
                            hi = mid
                        else:
                            lo, f0 = mid, fm
                    tstar = 0.5 * (lo + hi)
                    y = sol.sol(tstar).reshape(n, d)
                    la = y[tau_inv(a), d - 1] if i == 0 else y[a, i - 1]
                    lb = y[tau_inv(b), d - 1] if i == 0 else y[b, i - 1]
                    ra = y[tau(a), 0] if i == d - 1 else y[a, i + 1]
                    rb = y[tau(b), 0] if i == d - 1 else y[b, i + 1]
                    prod = (la - lb) * (ra - rb)
                    scale = max(abs(la - lb), abs(ra - rb), 1e-30) ** 2
                    if prod > 1e-9 * scale:
                        kind = "tangency"
                    elif prod < -1e-9 * scale:
                        kind = "transversal"
                    else:
                        kind = "degenerate"
                    events.append(Event(tstar, i, (a, b), kind))
    events.sort(key=lambda e: e.time)

    wvalues = None
    if sys.exact:
        wvalues = np.array([
            sum(sys.action(states[k][a]) for a in range(n))
            if tau.images == tuple(range(n)) else math.nan
            for k in range(len(times))
        ])

    gaps = None
    if sys.domain[0] == "UpDown":
        eps = float(sys.domain[1])
        gaps = np.array([_updown_gap(s, tau) for s in states])
        for k in range(len(gaps) - 1):
            if gaps[k] < eps and gaps[k + 1] < gaps[k] - tol:
                raise GapCollapse(
                    f"alternation gap decreased below eps at t={times[k+1]:.4g}")
        traj = Trajectory(times, states, tau, pair_counts, component_counts,
                          events, wvalues, gaps, eps)
        return traj

    return Trajectory(times, states, tau, pair_counts, component_counts,
                      events, wvalues)


@dataclass
class ComparisonReport:
    ok: bool
    breaches: list
    tangencies: int
    total_drop: int


def verify_comparison(traj: Trajectory, strict_events: bool = True) -> ComparisonReport:
    """Crossing numbers never increase; each simple tangency removes two.

    Componentwise totals are the invariant quantity (individual strand pairs
    inside a multi-strand component trade crossings across the seam), so the
    monotonicity check runs on component pairs and on the total.
    """
    breaches = []
    comp = traj.component_counts
    for k in range(len(comp) - 1):
        for key, c in comp[k + 1].items():
            if c > comp[k].get(key, 0):
                breaches.append(("component-increase", traj.times[k + 1], key,
                                 comp[k].get(key, 0), c))
    total0 = sum(comp[0].values())
    total1 = sum(comp[-1].values())
    tangencies = sum(1 for e in traj.events if e.kind == "tangency")
    degenerate = sum(1 for e in traj.events if e.kind == "degenerate")
    drop = total0 - total1
    if strict_events and degenerate == 0 and drop != 2 * tangencies:
        breaches.append(("drop-mismatch", drop, tangencies))
    if breaches:
        return ComparisonReport(False, breaches, tangencies, drop)
    return ComparisonReport(True, [], tangencies, drop)


# --- fixed points -------------------------------------------------------------


@dataclass
class FixedPoint:
    values: tuple[float, ...]
    residual: float
    co_index: int
    eigenvalues: tuple[complex, ...]
    nondegenerate: bool

    def as_fractions(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(v) for v in self.values)


@dataclass
class FixedPointSearch:
    points: list[FixedPoint]
    complete: bool
    attempts: int


def _newton_free_strand(sys: RecurrenceSystem, u0: np.ndarray, tol: float,
                        max_iter: int = 60, guard=None) -> np.ndarray | None:
    """Damped Newton for R(u) = 0 on one closed free strand."""
    d = len(u0)
    u = u0.astype(float).copy()

    def F(u):
        return np.array([
            sys.R(i, u[(i - 1) % d], u[i], u[(i + 1) % d]) for i in range(d)
        ])

    def J(u):
        m = np.zeros((d, d))
        for i in range(d):
            dr, ds, dt = sys.partials_at(i, u[(i - 1) % d], u[i], u[(i + 1) % d])
            m[i, (i - 1) % d] += dr
            m[i, i] += ds
            m[i, (i + 1) % d] += dt
        return m

    f = F(u)
    for _ in range(max_iter):
        norm = np.max(np.abs(f))
        if norm < tol:
            return u
        try:
            step = np.linalg.solve(J(u), -f)
        except np.linalg.LinAlgError:
            return None
        lam = 1.0
        while lam > 1e-8:
            cand = u + lam * step
            if guard is not None and not guard(cand):
                lam *= 0.5
                continue
            fc = F(cand)
            if np.max(np.abs(fc)) < norm or lam <= 1e-6:
                u, f = cand, fc
                break
            lam *= 0.5
        else:
            return None
    return u if np.max(np.abs(F(u))) < tol else None


def find_fixed_points(sys: RecurrenceSystem, cls, budget: int = 200,
                      tol: float = 1e-10, dedup: float = 1e-6,
                      settle_time: float = 0.0) -> FixedPointSearch:
    """Multistart damped Newton seeded at box midpoints of a braid class.

    Solutions are deduplicated in the max norm, filtered to the class by
    exact-rational box membership, and returned with Jacobian spectra and
    the co-index (number of eigenvalues with positive real part).
    """
    from .complexes import box_of

    d = cls.d
    if d % sys.d:
        raise ValueError("class period must be a multiple of the system period")
    guard = None
    if sys.domain[0] == "UpDown":
        eps = float(sys.domain[1])

        def guard(u, eps=eps):
            steps = np.diff(np.append(u, u[0]))
            signs = np.array([1 if i % 2 == 0 else -1 for i in range(len(u))])
            return np.all(signs * steps >= 0.5 * eps)

    seeds = [cls.midpoint_strand(b) for b in sorted(cls.boxes)]
    complete = len(seeds) <= budget
    seeds = seeds[:budget]

    found: list[np.ndarray] = []
    attempts = 0
    for seed in seeds:
        attempts += 1
        u0 = np.array([float(x) for x in seed])
        if settle_time > 0:
            braid0 = (u0.reshape(1, d), Permutation.identity(1))
            try:
                traj = integrate(braid0, sys, settle_time, tol=1e-6)
                u0 = traj.states[-1][0]
            except BraidError:
                pass
        u = _newton_free_strand(sys, u0, tol, guard=guard)
        if u is None:
            continue
        if any(np.max(np.abs(u - v)) < dedup for v in found):
            continue
        try:
            box = box_of(tuple(Fraction(x) for x in u), cls.skeleton,
                         cls.partition)
        except Exception:
            continue
        if box not in cls.boxes:
            continue
        found.append(u)

    points = []
    for u in found:
        m = np.zeros((d, d))
        for i in range(d):
            dr, ds, dt = sys.partials_at(i, u[(i - 1) % d], u[i], u[(i + 1) % d])
            m[i, (i - 1) % d] += dr
            m[i, i] += ds
            m[i, (i + 1) % d] += dt
        eig = np.linalg.eigvals(m)
        res = max(abs(sys.R(i, u[(i - 1) % d], u[i], u[(i + 1) % d]))
                  for i in range(d))
        points.append(FixedPoint(
            values=tuple(float(x) for x in u),
            residual=float(res),
            co_index=int(np.sum(eig.real > 0)),
            eigenvalues=tuple(complex(z) for z in eig),
            nondegenerate=bool(np.min(np.abs(eig)) > 1e-8),
        ))
    points.sort(key=lambda p: p.values)
    return FixedPointSearch(points, complete, attempts)


def blend(sysA: RecurrenceSystem, sysB: RecurrenceSystem, lam) -> RecurrenceSystem:
    """Convex combination (1-lam) A + lam B; parabolic, fixes common braids."""
    if sysA.d != sysB.d:
        raise ValueError("period mismatch")
    lam = float(lam)
    funcs = [
        (lambda r, s, t, fa=fa, fb=fb: (1 - lam) * fa(r, s, t) + lam * fb(r, s, t))
        for fa, fb in zip(sysA.funcs, sysB.funcs)
    ]
    partials = None
    if sysA.partials is not None and sysB.partials is not None:
        def mk(pa, pb):
            def P(r, s, t):
                a = pa(r, s, t)
                b = pb(r, s, t)
                return tuple((1 - lam) * x + lam * y for x, y in zip(a, b))
            return P
        partials = [mk(pa, pb) for pa, pb in zip(sysA.partials, sysB.partials)]
    generating = None
    if sysA.exact and sysB.exact:
        generating = [
            (lambda x, y, sa=sa, sb=sb: (1 - lam) * sa(x, y) + lam * sb(x, y))
            for sa, sb in zip(sysA.generating, sysB.generating)
        ]
    domain = sysA.domain if sysA.domain == sysB.domain else ("Full",)
    return RecurrenceSystem(d=sysA.d, funcs=funcs, partials=partials,
                            generating=generating, domain=domain,
                            label=f"blend({sysA.label},{sysB.label},{lam})")
