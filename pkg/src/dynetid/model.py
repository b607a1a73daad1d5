"""Structural network models and their extended graphs.

A model records only the parameterization pattern of the module matrix G, the
noise model H and the excitation selection R: which entries are zero, which
are unknown parameters, and which are fixed known transfers. That pattern is
all the identifiability test needs.

Conventions match the usual signal-flow reading: g_pattern[j][l] describes the
module from vertex l+1 to vertex j+1, i.e. a nonzero entry at row j, column l
is the edge (l+1, j+1). h_pattern[j][c] describes how noise channel c+1 enters
vertex j+1.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

from dynetid.graph import DiGraph, Edge


class EntryStatus(enum.Enum):
    ZERO = "zero"
    PARAMETERIZED = "param"
    KNOWN = "known"


class InvalidModelError(ValueError):
    """Raised when an operation requires a model that passes validation."""


Z = EntryStatus.ZERO
P = EntryStatus.PARAMETERIZED
K = EntryStatus.KNOWN


@dataclass(frozen=True)
class ModelSet:
    """Parameterization pattern of a network model set.

    Attributes:
        L: number of internal vertices, labeled 1..L.
        g_pattern: L x L status matrix of the module transfers.
        h_pattern: L x p status matrix of the noise model (p may be 0).
        excited: vertices carrying one designed excitation signal each.
        strictly_proper_modules: if False, feedthrough_edges drives an
            algebraic-loop check at validation.
        feedthrough_edges: modules with direct feedthrough; None means all
            nonzero modules are treated as feedthrough when the strictly
            proper flag is off.
    """

    L: int
    g_pattern: tuple[tuple[EntryStatus, ...], ...]
    h_pattern: tuple[tuple[EntryStatus, ...], ...]
    excited: frozenset[int]
    strictly_proper_modules: bool = True
    feedthrough_edges: frozenset[Edge] | None = None

    def __post_init__(self) -> None:
        if self.L < 1:
            raise ValueError("a model needs at least one vertex")
        if len(self.g_pattern) != self.L or any(len(r) != self.L for r in self.g_pattern):
            raise ValueError(f"g_pattern must be {self.L}x{self.L}")
        if len(self.h_pattern) != self.L:
            raise ValueError(f"h_pattern must have {self.L} rows")
        widths = {len(r) for r in self.h_pattern}
        if len(widths) > 1:
            raise ValueError("h_pattern rows have unequal lengths")
        for v in self.excited:
            if not 1 <= v <= self.L:
                raise ValueError(f"excited vertex {v} outside 1..{self.L}")
        if self.feedthrough_edges is not None:
            for t, h in self.feedthrough_edges:
                if not (1 <= t <= self.L and 1 <= h <= self.L):
                    raise ValueError(f"feedthrough edge ({t}, {h}) outside 1..{self.L}")

    @property
    def p(self) -> int:
        return len(self.h_pattern[0]) if self.h_pattern else 0

    def g_status(self, tail: int, head: int) -> EntryStatus:
        """Status of the module on edge (tail, head)."""
        return self.g_pattern[head - 1][tail - 1]

    def internal_edges(self) -> frozenset[Edge]:
        return frozenset(
            (l + 1, j + 1)
            for j in range(self.L)
            for l in range(self.L)
            if self.g_pattern[j][l] is not Z
        )

    @classmethod
    def from_edges(
        cls,
        L: int,
        edges: Iterable[tuple[int, int, EntryStatus]] | Iterable[Edge] = (),
        noise_columns: Sequence[Sequence[tuple[int, EntryStatus]]] = (),
        excited: Iterable[int] = (),
        strictly_proper_modules: bool = True,
        feedthrough_edges: Iterable[Edge] | None = None,
    ) -> ModelSet:
        """Build a model from edge and column listings.

        edges may be (tail, head) pairs, taken as parameterized, or
        (tail, head, status) triples. noise_columns lists each H column as
        (row, status) pairs.
        """
        g = [[Z] * L for _ in range(L)]
        for e in edges:
            if len(e) == 2:
                tail, head = e  # type: ignore[misc]
                status = P
            else:
                tail, head, status = e  # type: ignore[misc]
            if not (1 <= tail <= L and 1 <= head <= L):
                raise ValueError(f"edge ({tail}, {head}) outside 1..{L}")
            g[head - 1][tail - 1] = status
        h = [[Z] * len(noise_columns) for _ in range(L)]
        for c, column in enumerate(noise_columns):
            for row, status in column:
                if not 1 <= row <= L:
                    raise ValueError(f"noise row {row} outside 1..{L}")
                h[row - 1][c] = status
        return cls(
            L=L,
            g_pattern=tuple(tuple(r) for r in g),
            h_pattern=tuple(tuple(r) for r in h),
            excited=frozenset(excited),
            strictly_proper_modules=strictly_proper_modules,
            feedthrough_edges=None if feedthrough_edges is None else frozenset(feedthrough_edges),
        )


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...]


def _column(m: ModelSet, c: int) -> list[EntryStatus]:
    return [m.h_pattern[j][c] for j in range(m.L)]


def _parameterized_columns(m: ModelSet) -> list[int]:
    """0-based indices of noise columns whose nonzeros are all parameterized."""
    out = []
    for c in range(m.p):
        nonzero = [s for s in _column(m, c) if s is not Z]
        if nonzero and all(s is P for s in nonzero):
            out.append(c)
    return out


def _single_known_columns(m: ModelSet) -> list[tuple[int, int]]:
    """(0-based column, driven vertex) for columns with one Known nonzero."""
    out = []
    for c in range(m.p):
        col = _column(m, c)
        nonzero = [(j + 1, s) for j, s in enumerate(col) if s is not Z]
        if len(nonzero) == 1 and nonzero[0][1] is K:
            out.append((c, nonzero[0][0]))
    return out


def validate(m: ModelSet) -> ValidationReport:
    """Check the structural rules a model must satisfy.

    Rules: no self-loop modules; noise rows and columns with two or more
    nonzeros must be entirely parameterized; every noise column must drive at
    least one vertex; a column is either all-parameterized or carries a single
    known entry; a vertex driven by a single-known noise column cannot also be
    excited (it already carries an independent stimulation); and when modules
    are not strictly proper, the feedthrough subgraph must be acyclic.
    """
    violations: list[str] = []

    for j in range(m.L):
        if m.g_pattern[j][j] is not Z:
            violations.append(f"self-loop module at vertex {j + 1}")

    for j in range(m.L):
        nonzero = [s for s in m.h_pattern[j] if s is not Z]
        if len(nonzero) >= 2 and any(s is not P for s in nonzero):
            violations.append(
                f"noise row {j + 1} mixes a known entry with other nonzeros"
            )

    for c in range(m.p):
        col = _column(m, c)
        nonzero = [s for s in col if s is not Z]
        if not nonzero:
            violations.append(f"noise column {c + 1} drives no vertex")
        elif len(nonzero) == 1:
            pass  # single entry, parameterized or known, both fine
        elif any(s is not P for s in nonzero):
            violations.append(
                f"noise column {c + 1} has multiple nonzeros that are not all parameterized"
            )

    driven = {v for _, v in _single_known_columns(m)}
    overlap = sorted(driven & m.excited)
    for v in overlap:
        violations.append(
            f"vertex {v} is excited and also driven by a known noise column"
        )

    if not m.strictly_proper_modules:
        internal = m.internal_edges()
        if m.feedthrough_edges is None:
            feed = internal
        else:
            feed = m.feedthrough_edges
            for e in sorted(feed - internal):
                violations.append(f"feedthrough edge {e} is not a nonzero module")
            feed = feed & internal
        if _has_cycle(m.L, feed):
            violations.append("feedthrough subgraph contains a cycle (algebraic loop)")

    return ValidationReport(ok=not violations, violations=tuple(violations))


def _has_cycle(L: int, edges: frozenset[Edge]) -> bool:
    succ: dict[int, list[int]] = {v: [] for v in range(1, L + 1)}
    for t, h in edges:
        succ[t].append(h)
    state: dict[int, int] = {}  # 0 visiting, 1 done

    def visit(v: int) -> bool:
        state[v] = 0
        for w in succ[v]:
            s = state.get(w)
            if s == 0:
                return True
            if s is None and visit(w):
                return True
        state[v] = 1
        return False

    return any(state.get(v) is None and visit(v) for v in range(1, L + 1))


@dataclass(frozen=True)
class ExtendedGraph:
    """The internal graph augmented with one vertex per parameterized noise column.

    Attributes:
        graph: digraph over internal vertices 1..L plus noise vertices.
        L: internal vertex count.
        noise_vertices: the added vertices L+1..L+p-p0.
        noise_driven: internal vertices driven by single-known noise columns.
        stimulated: everything carrying an independent external signal, i.e.
            excited + noise_vertices + noise_driven.
        parameterized_edges: edges whose transfer is an unknown parameter;
            known edges stay in the graph but not in this set.
        p0: number of single-known noise columns.
    """

    graph: DiGraph
    L: int
    noise_vertices: frozenset[int]
    noise_driven: frozenset[int]
    stimulated: frozenset[int]
    parameterized_edges: frozenset[Edge]
    p0: int

    @property
    def internal(self) -> frozenset[int]:
        return frozenset(range(1, self.L + 1))

    @property
    def p(self) -> int:
        return len(self.noise_vertices) + self.p0


def build_extended_graph(m: ModelSet) -> ExtendedGraph:
    """Construct the extended graph of a validated model."""
    report = validate(m)
    if not report.ok:
        raise InvalidModelError("; ".join(report.violations))

    internal_edges = m.internal_edges()
    param_edges = {
        (l + 1, j + 1)
        for j in range(m.L)
        for l in range(m.L)
        if m.g_pattern[j][l] is P
    }

    # Parameterized columns are compacted in their original order before
    # vertex ids are assigned, so gaps left by single-known columns vanish.
    param_cols = _parameterized_columns(m)
    noise_vertices = frozenset(m.L + k + 1 for k in range(len(param_cols)))
    noise_edges = set()
    for k, c in enumerate(param_cols):
        nv = m.L + k + 1
        for j in range(m.L):
            if m.h_pattern[j][c] is P:
                noise_edges.add((nv, j + 1))

    noise_driven = frozenset(v for _, v in _single_known_columns(m))
    vertices = frozenset(range(1, m.L + 1)) | noise_vertices
    graph = DiGraph(vertices, frozenset(internal_edges) | frozenset(noise_edges))

    return ExtendedGraph(
        graph=graph,
        L=m.L,
        noise_vertices=noise_vertices,
        noise_driven=noise_driven,
        stimulated=m.excited | noise_vertices | noise_driven,
        parameterized_edges=frozenset(param_edges) | frozenset(noise_edges),
        p0=m.p - len(param_cols),
    )


def extended_in_neighbors(eg: ExtendedGraph, j: int) -> frozenset[int]:
    """In-neighbors of an internal vertex through parameterized edges only."""
    if j not in eg.internal:
        raise ValueError(f"vertex {j} is not internal")
    return frozenset(
        i for i in eg.graph.in_neighbors(j) if (i, j) in eg.parameterized_edges
    )
