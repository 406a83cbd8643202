"""Conley-index machinery for discretized braid classes and parabolic flows.

Exact combinatorics of closed positive braid diagrams, cube-complex models
of relative braid classes with one free strand, their relative homology
(the Conley index), parabolic recurrence dynamics respecting a braid
skeleton, and forcing of closed characteristics in Lagrangian twist systems.
"""

from .braid import (
    BraidError,
    BraidRegularity,
    ClosureViolation,
    DiscreteBraid,
    NonGenericAtSeam,
    OddPeriod,
    Permutation,
    SingularPair,
    augment,
    component_crossing_totals,
    crossing_count,
    dualize,
    extend,
    intersection_matrix,
    is_updown,
    lift,
    nudge_seam,
    validate,
    word_metric,
)
from .complexes import (
    BoxLabel,
    BraidClassComplex,
    IntervalPartition,
    NotBounded,
    NotProper,
    OnHyperplane,
    are_topologically_equal,
    box_of,
    enumerate_all_classes,
    enumerate_class,
    exit_set,
    face_is_singular,
)
from .homology import (
    ChainComplex,
    ConleyIndex,
    MixedTopologicalType,
    NotSubcomplex,
    conley_index_of,
    cp_poly,
    morse_bounds,
    relative_homology,
    shift_check,
    verify_duality,
    verify_stabilization,
    wedge_index,
)

__version__ = "0.1.0"
