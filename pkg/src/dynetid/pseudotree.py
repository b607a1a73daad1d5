"""Pseudotree coverings and the three-valued merge algebra.

A pseudotree is a connected simple digraph on at least two vertices in which
every vertex has in-degree at most one; it is a rooted tree plus at most one
extra edge closing a single cycle. A disjoint family of pseudotrees covering
a target edge set is the combinatorial object behind both the excitation and
the measurement selection problems, and the merge heuristic below shrinks an
initial star covering by repeatedly folding one tree into another.

Mergeability bookkeeping lives in a square matrix over {One, Zero, Empty}:
One means tree i can fold into tree j, Empty means the two trees do not even
share a vertex, Zero anything else. After a merge the matrix can be updated
by pure row/column arithmetic (reduce), but that arithmetic is conservative:
a merge can create mergeability between the grown tree and a neighbor that
neither constituent had on its own, and the entrywise rules cannot raise a
Zero back to One. The covering-backed merge loop therefore re-derives the
exact matrix from the covering after every merge; reduce is kept for the
matrix-only entry point and as the cheap lower bound it is.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Iterable

from dynetid.graph import DiGraph, Edge
from dynetid.model import ExtendedGraph


class CharEntry(enum.Enum):
    ZERO = "0"
    ONE = "1"
    EMPTY = "E"

    def __str__(self) -> str:
        return self.value


def odot(a: CharEntry, b: CharEntry) -> CharEntry:
    """Combine two mergeability entries: Zero absorbs, One beats Empty."""
    if a is CharEntry.ZERO or b is CharEntry.ZERO:
        return CharEntry.ZERO
    if a is CharEntry.ONE or b is CharEntry.ONE:
        return CharEntry.ONE
    return CharEntry.EMPTY


# ---- pseudotrees ----


def _reachable(succ: dict[int, list[int]], start: int) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        for w in succ[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def is_pseudotree(
    vertices: Iterable[int],
    edges: Iterable[Edge],
    host: DiGraph | None = None,
) -> tuple[bool, frozenset[int]]:
    """Test the pseudotree conditions; on success also return the root set.

    Roots are the vertices with exactly one directed path to every other
    vertex. Under the in-degree bound any existing path is unique (walking
    in-edges backward from the endpoint is deterministic), so the root set
    is simply the set of vertices that reach all others.
    """
    vs = frozenset(vertices)
    es = frozenset(edges)
    if host is not None:
        if not vs <= host.vertices or not es <= host.edges:
            raise ValueError("subgraph is not contained in the host graph")
    if len(vs) < 2:
        return False, frozenset()
    indeg = {v: 0 for v in vs}
    succ: dict[int, list[int]] = {v: [] for v in vs}
    und: dict[int, list[int]] = {v: [] for v in vs}
    for t, h in es:
        if t == h or t not in vs or h not in vs:
            return False, frozenset()
        indeg[h] += 1
        if indeg[h] > 1:
            return False, frozenset()
        succ[t].append(h)
        und[t].append(h)
        und[h].append(t)
    if _reachable(und, min(vs)) != vs:
        return False, frozenset()
    roots = frozenset(v for v in vs if len(_reachable(succ, v)) == len(vs))
    return True, roots


@dataclass(frozen=True)
class Pseudotree:
    vertices: frozenset[int]
    edges: frozenset[Edge]
    roots: frozenset[int]

    @classmethod
    def from_edges(cls, edges: Iterable[Edge]) -> Pseudotree:
        es = frozenset(edges)
        vs = frozenset(v for e in es for v in e)
        ok, roots = is_pseudotree(vs, es)
        if not ok:
            raise ValueError("edge set does not form a pseudotree")
        return cls(vs, es, roots)


def are_disjoint(t1: Pseudotree, t2: Pseudotree) -> bool:
    """No shared edges, and no vertex has out-edges in both trees."""
    if t1.edges & t2.edges:
        return False
    tails1 = {t for t, _ in t1.edges}
    tails2 = {t for t, _ in t2.edges}
    return not (tails1 & tails2)


def is_mergeable(t1: Pseudotree, t2: Pseudotree) -> bool:
    """True when t1 can fold into t2.

    The union of the two trees must itself be a pseudotree and every root of
    t2 must reach every vertex of t1 inside the union. Callers supply trees
    that are disjoint in the covering sense; vertex-disjoint pairs fail the
    connectivity test and come out False.
    """
    union_v = t1.vertices | t2.vertices
    union_e = t1.edges | t2.edges
    ok, _ = is_pseudotree(union_v, union_e)
    if not ok:
        return False
    succ: dict[int, list[int]] = {v: [] for v in union_v}
    for t, h in union_e:
        succ[t].append(h)
    return all(t1.vertices <= _reachable(succ, r) for r in t2.roots)


# ---- coverings ----


@dataclass(frozen=True)
class Covering:
    """An ordered family of disjoint pseudotrees covering target_edges."""

    trees: tuple[Pseudotree, ...]
    host: DiGraph
    target_edges: frozenset[Edge]

    def __len__(self) -> int:
        return len(self.trees)


def covering_violations(c: Covering) -> tuple[str, ...]:
    """Diagnostics for the covering invariants; empty means valid."""
    problems: list[str] = []
    for k, t in enumerate(c.trees, start=1):
        ok, roots = is_pseudotree(t.vertices, t.edges, host=c.host)
        if not ok:
            problems.append(f"tree {k} is not a pseudotree")
        elif roots != t.roots:
            problems.append(f"tree {k} carries a stale root set")
        if not t.edges <= c.target_edges:
            problems.append(f"tree {k} uses edges outside the target set")
    for a in range(len(c.trees)):
        for b in range(a + 1, len(c.trees)):
            if not are_disjoint(c.trees[a], c.trees[b]):
                problems.append(f"trees {a + 1} and {b + 1} are not disjoint")
    covered = frozenset(e for t in c.trees for e in t.edges)
    for e in sorted(c.target_edges - covered):
        problems.append(f"target edge {e} is uncovered")
    return tuple(problems)


def initial_covering(eg: ExtendedGraph) -> Covering:
    """One star per vertex with outgoing target edges, in ascending id order."""
    targets = eg.parameterized_edges
    if not targets:
        raise ValueError("no parameterized edges to cover")
    tails = sorted({t for t, _ in targets})
    trees = tuple(
        Pseudotree.from_edges(e for e in targets if e[0] == v) for v in tails
    )
    return Covering(trees=trees, host=eg.graph, target_edges=targets)


def merge_trees(c: Covering, i: int, j: int) -> Covering:
    """Fold tree i into tree j (1-based positions); roots are recomputed.

    Recomputing guards against the union closing a new root cycle, in which
    case the merged tree gains roots the absorbing tree never had.
    """
    n = len(c.trees)
    if not (1 <= i <= n and 1 <= j <= n) or i == j:
        raise ValueError(f"invalid tree positions ({i}, {j}) for {n} trees")
    ti, tj = c.trees[i - 1], c.trees[j - 1]
    if not is_mergeable(ti, tj):
        raise ValueError(f"tree {i} is not mergeable into tree {j}")
    union = Pseudotree.from_edges(ti.edges | tj.edges)
    trees = list(c.trees)
    trees[j - 1] = union
    del trees[i - 1]
    return Covering(trees=tuple(trees), host=c.host, target_edges=c.target_edges)


# ---- characteristic matrices ----


@dataclass(frozen=True)
class CharMatrix:
    entries: tuple[tuple[CharEntry, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.entries)
        for r, row in enumerate(self.entries):
            if len(row) != n:
                raise ValueError("characteristic matrix must be square")
            if row[r] is not CharEntry.ZERO:
                raise ValueError(f"diagonal entry ({r + 1}, {r + 1}) must be 0")

    @property
    def n(self) -> int:
        return len(self.entries)

    def entry(self, i: int, j: int) -> CharEntry:
        """Entry at 1-based position (i, j)."""
        return self.entries[i - 1][j - 1]

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[CharEntry]]) -> CharMatrix:
        return cls(tuple(tuple(r) for r in rows))

    @classmethod
    def parse(cls, text: str) -> CharMatrix:
        """Parse rows of whitespace-separated tokens 0, 1, E."""
        rows = []
        for line in text.strip().splitlines():
            tokens = line.split()
            if not tokens:
                continue
            rows.append(tuple(CharEntry(tok) for tok in tokens))
        return cls(tuple(rows))

    def render(self) -> str:
        return "\n".join(" ".join(str(e) for e in row) for row in self.entries)


def char_matrix(c: Covering) -> CharMatrix:
    """Mergeability matrix of a covering by the direct pairwise checks."""
    n = len(c.trees)
    rows = []
    for i in range(n):
        ti = c.trees[i]
        row = []
        for j in range(n):
            if i == j:
                row.append(CharEntry.ZERO)
            elif not (ti.vertices & c.trees[j].vertices):
                row.append(CharEntry.EMPTY)
            elif is_mergeable(ti, c.trees[j]):
                row.append(CharEntry.ONE)
            else:
                row.append(CharEntry.ZERO)
        rows.append(tuple(row))
    return CharMatrix(tuple(rows))


def char_matrix_from_adjacency(
    g: DiGraph, target_edges: frozenset[Edge] | None = None
) -> CharMatrix:
    """Mergeability matrix of the star covering, by complex column products.

    Indexing follows the star covering: one row/column per vertex with
    outgoing target edges, ascending. For distinct stars the product
    a_ij = (col_i + i*e_i)^T (col_j + i*e_j) packs everything needed: the
    real part counts shared out-neighbors (an in-degree conflict in the
    union), the imaginary part flags adjacency between the two centers, and
    a_ij = 0 is exactly vertex-disjointness. Tree i folds into tree j when
    the real part vanishes, the centers are adjacent, and specifically the
    edge from center j to center i exists so j's star reaches all of i's.
    """
    targets = g.edges if target_edges is None else target_edges
    for e in targets:
        if e not in g.edges:
            raise ValueError(f"target edge {e} is not in the graph")
    order = g.sorted_vertices()
    pos = {v: k for k, v in enumerate(order)}
    centers = sorted({t for t, _ in targets})

    cols: dict[int, list[complex]] = {}
    for v in centers:
        col = [0j] * len(order)
        for t, h in targets:
            if t == v:
                col[pos[h]] += 1
        col[pos[v]] += 1j
        cols[v] = col

    n = len(centers)
    rows = []
    for i in range(n):
        vi = centers[i]
        row = []
        for j in range(n):
            vj = centers[j]
            if i == j:
                row.append(CharEntry.ZERO)
                continue
            a = sum(x * y for x, y in zip(cols[vi], cols[vj]))
            if a == 0:
                row.append(CharEntry.EMPTY)
            elif a.real == 0 and a.imag != 0 and (vj, vi) in targets:
                row.append(CharEntry.ONE)
            else:
                row.append(CharEntry.ZERO)
        rows.append(tuple(row))
    return CharMatrix(tuple(rows))


def reduce(m: CharMatrix, i: int, j: int) -> CharMatrix:
    """Fold row/column i into row/column j and drop index i (1-based).

    Row j and column j are recombined entrywise against row and column i of
    the original matrix; the (j, j) cell lands on Zero either way because
    the old diagonal absorbs.
    """
    n = m.n
    if not (1 <= i <= n and 1 <= j <= n) or i == j:
        raise ValueError(f"invalid positions ({i}, {j}) for a {n}x{n} matrix")
    if m.entry(i, j) is not CharEntry.ONE:
        raise ValueError(f"entry ({i}, {j}) is not 1; the pair cannot be merged")
    old = m.entries
    i0, j0 = i - 1, j - 1
    rows = []
    for r in range(n):
        if r == i0:
            continue
        row = []
        for c in range(n):
            if c == i0:
                continue
            if r == j0:
                row.append(odot(old[i0][c], old[j0][c]))
            elif c == j0:
                row.append(odot(old[r][i0], old[r][j0]))
            else:
                row.append(old[r][c])
        rows.append(tuple(row))
    return CharMatrix(tuple(rows))


# ---- the merge heuristic ----


def _ones_in_row(m: CharMatrix, r: int) -> list[int]:
    return [c for c in range(1, m.n + 1) if m.entry(r, c) is CharEntry.ONE]


def _empties_in_row(m: CharMatrix, r: int) -> int:
    return sum(m.entry(r, c) is CharEntry.EMPTY for c in range(1, m.n + 1))


def _run_merge_policy(
    m: CharMatrix, advance: Callable[[CharMatrix, int, int], CharMatrix]
) -> tuple[CharMatrix, list[tuple[int, int]]]:
    """Two-phase merge selection; advance() yields the post-merge matrix.

    Phase one handles forced rows (exactly one One) most-Empty-first, phase
    two spends the remaining Ones the same way; both break ties toward the
    lowest row index, and phase two folds into the lowest One column.
    """
    trace: list[tuple[int, int]] = []

    def step(r: int, c: int) -> CharMatrix:
        trace.append((r, c))
        return advance(m, r, c)

    while True:
        best: tuple[int, int, int] | None = None
        for r in range(1, m.n + 1):
            ones = _ones_in_row(m, r)
            if len(ones) != 1:
                continue
            empties = _empties_in_row(m, r)
            if best is None or empties > best[0]:
                best = (empties, r, ones[0])
        if best is None:
            break
        m = step(best[1], best[2])

    while True:
        best = None
        for r in range(1, m.n + 1):
            ones = _ones_in_row(m, r)
            if not ones:
                continue
            empties = _empties_in_row(m, r)
            if best is None or empties > best[0]:
                best = (empties, r, ones[0])
        if best is None:
            break
        m = step(best[1], best[2])

    return m, trace


def matrix_only_merge(m: CharMatrix) -> tuple[CharMatrix, list[tuple[int, int]]]:
    """Run the merge selection policy on a bare matrix via reduce alone."""
    return _run_merge_policy(m, reduce)


def algorithm1_merge(eg: ExtendedGraph) -> tuple[Covering, list[tuple[int, int]]]:
    """Shrink the star covering of the parameterized edges by greedy merging.

    Each two-phase pass keeps its matrix current with reduce, which never
    overstates mergeability, so every selected pair is safe to merge on the
    covering. It can understate it though: folding tree i into tree j may
    make the grown tree mergeable with a third tree that i alone was not,
    and the entrywise arithmetic maps that Zero-One pair to Zero. A pass can
    therefore end with genuine merges left, so the matrix is re-derived from
    the covering between passes and the loop only stops once it is One-free.
    """
    state = {"c": initial_covering(eg)}

    def advance(m: CharMatrix, i: int, j: int) -> CharMatrix:
        state["c"] = merge_trees(state["c"], i, j)
        return reduce(m, i, j)

    trace: list[tuple[int, int]] = []
    while True:
        _, pass_trace = _run_merge_policy(char_matrix(state["c"]), advance)
        trace.extend(pass_trace)
        if not pass_trace:
            return state["c"], trace
