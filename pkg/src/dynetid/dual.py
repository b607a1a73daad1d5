"""Measurement selection for fully excited, noise-free networks.

This is the mirror image of excitation allocation. With every vertex excited
and no noise model, the question becomes which vertices to measure, and the
role of pseudotrees is taken over by anti-pseudotrees: connected simple
digraphs with all out-degrees at most one, whose roots every other vertex
reaches by exactly one path. Reversing every edge turns one problem into the
other, so the implementation simply runs the primal pipeline on the reversed
graph with zero noise channels and maps the results back.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from dynetid.graph import DiGraph, Edge, reverse, sources_and_sinks
from dynetid.model import EntryStatus, ExtendedGraph
from dynetid.allocation import noise_rooted_filter, prune, select_roots
from dynetid.pseudotree import Covering, algorithm1_merge


class InvalidDualModelError(ValueError):
    """Raised when a model does not fit the measurement-selection setting."""


@dataclass(frozen=True)
class DualModelSet:
    """Parameterization pattern with all vertices excited and no noise.

    Every nonzero module must be an unknown parameter; known transfers have
    no place here because the covering and the per-vertex condition both
    read the full out-neighborhood.
    """

    L: int
    g_pattern: tuple[tuple[EntryStatus, ...], ...]

    def __post_init__(self) -> None:
        if self.L < 1:
            raise ValueError("a model needs at least one vertex")
        if len(self.g_pattern) != self.L or any(len(r) != self.L for r in self.g_pattern):
            raise ValueError(f"g_pattern must be {self.L}x{self.L}")

    @classmethod
    def from_edges(cls, L: int, edges: Iterable[Edge] = ()) -> DualModelSet:
        g = [[EntryStatus.ZERO] * L for _ in range(L)]
        for tail, head in edges:
            if not (1 <= tail <= L and 1 <= head <= L):
                raise ValueError(f"edge ({tail}, {head}) outside 1..{L}")
            g[head - 1][tail - 1] = EntryStatus.PARAMETERIZED
        return cls(L=L, g_pattern=tuple(tuple(r) for r in g))

    def edges(self) -> frozenset[Edge]:
        return frozenset(
            (l + 1, j + 1)
            for j in range(self.L)
            for l in range(self.L)
            if self.g_pattern[j][l] is not EntryStatus.ZERO
        )

    def graph(self) -> DiGraph:
        return DiGraph(frozenset(range(1, self.L + 1)), self.edges())


def validate_dual(m: DualModelSet) -> tuple[str, ...]:
    violations = []
    for j in range(m.L):
        if m.g_pattern[j][j] is not EntryStatus.ZERO:
            violations.append(f"self-loop module at vertex {j + 1}")
    for j in range(m.L):
        for l in range(m.L):
            if m.g_pattern[j][l] is EntryStatus.KNOWN:
                violations.append(
                    f"module ({l + 1}, {j + 1}) is known; measurement selection"
                    " expects every nonzero module to be parameterized"
                )
    return tuple(violations)


@dataclass(frozen=True)
class AntiPseudotree:
    """Edges in the original orientation; roots are the measured endpoints."""

    vertices: frozenset[int]
    edges: frozenset[Edge]
    roots: frozenset[int]


@dataclass(frozen=True)
class DualSelection:
    measured: tuple[int, ...]
    anti_trees: tuple[AntiPseudotree, ...]
    reversed_covering: Covering
    pruned: tuple[int, ...]
    verified: bool


def _reversed_extended(m: DualModelSet) -> ExtendedGraph:
    rev = reverse(m.graph())
    return ExtendedGraph(
        graph=rev,
        L=m.L,
        noise_vertices=frozenset(),
        noise_driven=frozenset(),
        stimulated=frozenset(),
        parameterized_edges=rev.edges,
        p0=0,
    )


def select_measurements(m: DualModelSet) -> DualSelection:
    """Pick a measured vertex set supporting disjoint paths from every
    out-neighborhood.

    Runs covering, root selection and pruning on the reversed graph; a
    reversed pseudotree is an anti-pseudotree of the original graph and its
    roots are the vertices to measure.
    """
    violations = validate_dual(m)
    if violations:
        raise InvalidDualModelError("; ".join(violations))
    eg = _reversed_extended(m)
    if not eg.parameterized_edges:
        empty = Covering(trees=(), host=eg.graph, target_edges=frozenset())
        return DualSelection(
            measured=(), anti_trees=(), reversed_covering=empty,
            pruned=(), verified=True,
        )
    covering, _ = algorithm1_merge(eg)
    pi_s, _ = noise_rooted_filter(covering, eg)
    r0 = select_roots(pi_s)
    result = prune(eg, pi_s, r0, covering_used=covering)
    anti = tuple(
        AntiPseudotree(
            vertices=t.vertices,
            edges=frozenset((h, t_) for t_, h in t.edges),
            roots=t.roots,
        )
        for t in covering.trees
    )
    return DualSelection(
        measured=result.excited,
        anti_trees=anti,
        reversed_covering=covering,
        pruned=result.pruned,
        verified=result.verified,
    )


def measurement_bounds(
    m: DualModelSet, covering: Covering | None = None
) -> tuple[int, int]:
    """Bounds on the measurement count.

    lower = max(sink count, largest out-neighborhood); upper = size of the
    anti-pseudotree covering, defaulting to the heuristic's output on the
    reversed graph.
    """
    g = m.graph()
    _, sinks = sources_and_sinks(g)
    max_outdeg = max((len(g.out_neighbors(v)) for v in g.vertices), default=0)
    lower = max(len(sinks), max_outdeg)
    if covering is None:
        eg = _reversed_extended(m)
        if eg.parameterized_edges:
            covering, _ = algorithm1_merge(eg)
            size = len(covering)
        else:
            size = 0
    else:
        size = len(covering)
    return lower, size
