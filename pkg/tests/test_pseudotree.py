"""Pseudotree recognition, disjointness, mergeability, characteristic-matrix
algebra, and the two-phase merge heuristic.

The 9x9 matrix fixture and its printed reductions exercise the exact
published behavior of the merge bookkeeping; the property tests then check
the same laws on random instances against the brute-force oracle.
"""

import random

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from dynetid.graph import DiGraph
from dynetid.model import EntryStatus, ModelSet, build_extended_graph
from dynetid.oracle import OracleBudget, brute_min_covering
from dynetid.pseudotree import (
    CharEntry,
    CharMatrix,
    Covering,
    Pseudotree,
    algorithm1_merge,
    are_disjoint,
    char_matrix,
    char_matrix_from_adjacency,
    covering_violations,
    initial_covering,
    is_mergeable,
    is_pseudotree,
    matrix_only_merge,
    merge_trees,
    odot,
    reduce,
)

from .randgen import random_digraph, random_model
from .test_model import correlated_noise_model

O, I, E = CharEntry.ZERO, CharEntry.ONE, CharEntry.EMPTY

# Nine initial stars of an eleven-vertex host; the merge policy must shrink
# this to five trees through the exact trace pinned below.
FIXTURE_9 = CharMatrix.parse(
    """
    0 1 E E 0 E 0 E E
    0 0 1 E 0 0 0 E E
    E 1 0 0 E 0 E 0 0
    E E 0 0 E 0 E 0 0
    0 1 E E 0 1 0 0 E
    E 0 1 0 0 0 0 0 0
    0 0 E E 0 0 0 1 E
    E E 0 0 1 0 0 0 0
    E E 0 0 E 0 E 0 0
    """
)

FIXTURE_9_AFTER_12 = CharMatrix.parse(
    """
    0 1 E 0 0 0 E E
    1 0 0 E 0 E 0 0
    E 0 0 E 0 E 0 0
    0 E E 0 1 0 0 E
    0 1 0 0 0 0 0 0
    0 E E 0 0 0 1 E
    E 0 0 1 0 0 0 0
    E 0 0 E 0 E 0 0
    """
)


def diamond_eg():
    m = ModelSet.from_edges(4, [(1, 2), (1, 3), (2, 4), (3, 4)], excited=[1])
    return build_extended_graph(m)


def star_covering(g: DiGraph, targets) -> Covering:
    targets = frozenset(targets)
    tails = sorted({t for t, _ in targets})
    trees = tuple(
        Pseudotree.from_edges(e for e in targets if e[0] == v) for v in tails
    )
    return Covering(trees=trees, host=g, target_edges=targets)


class TestOdot:
    def test_published_table(self):
        assert odot(I, I) is I
        assert odot(I, O) is O
        assert odot(I, E) is I
        assert odot(O, O) is O
        assert odot(E, O) is O
        assert odot(E, E) is E

    def test_commutative(self):
        for a in CharEntry:
            for b in CharEntry:
                assert odot(a, b) is odot(b, a)

    def test_zero_absorbs(self):
        for a in CharEntry:
            assert odot(a, O) is O


class TestIsPseudotree:
    def test_star(self):
        ok, roots = is_pseudotree([1, 2, 3], [(1, 2), (1, 3)])
        assert ok and roots == {1}

    def test_cycle_has_all_roots(self):
        ok, roots = is_pseudotree([1, 2, 3], [(1, 2), (2, 3), (3, 1)])
        assert ok and roots == {1, 2, 3}

    def test_in_degree_two_fails(self):
        ok, roots = is_pseudotree(
            [1, 2, 3, 4], [(1, 2), (1, 3), (2, 4), (3, 4)]
        )
        assert not ok and roots == frozenset()

    def test_single_vertex_too_small(self):
        assert is_pseudotree([1], [])[0] is False

    def test_disconnected_fails(self):
        assert is_pseudotree([1, 2, 3, 4], [(1, 2), (3, 4)])[0] is False

    def test_cycle_with_branch(self):
        # only the cycle vertices reach everything
        ok, roots = is_pseudotree([1, 2, 3], [(1, 2), (2, 1), (2, 3)])
        assert ok and roots == {1, 2}

    def test_chain_rooted_at_head(self):
        ok, roots = is_pseudotree([1, 2, 3], [(1, 2), (2, 3)])
        assert ok and roots == {1}

    def test_host_containment_enforced(self):
        host = DiGraph.of([1, 2], [(1, 2)])
        with pytest.raises(ValueError, match="not contained"):
            is_pseudotree([1, 2, 3], [(1, 2)], host=host)

    def test_from_edges_rejects_non_pseudotree(self):
        with pytest.raises(ValueError, match="does not form a pseudotree"):
            Pseudotree.from_edges([(1, 2), (3, 2)])


class TestAreDisjoint:
    def test_separate_stars(self):
        t1 = Pseudotree.from_edges([(1, 2), (1, 3)])
        t2 = Pseudotree.from_edges([(2, 4)])
        assert are_disjoint(t1, t2)

    def test_split_out_edges(self):
        t1 = Pseudotree.from_edges([(1, 2)])
        t2 = Pseudotree.from_edges([(1, 3)])
        assert not are_disjoint(t1, t2)

    def test_shared_edge(self):
        t1 = Pseudotree.from_edges([(1, 2), (1, 3)])
        t2 = Pseudotree.from_edges([(1, 2)])
        assert not are_disjoint(t1, t2)


class TestIsMergeable:
    def setup_method(self):
        self.t1 = Pseudotree.from_edges([(1, 2), (1, 3)])
        self.t2 = Pseudotree.from_edges([(2, 4)])
        self.t3 = Pseudotree.from_edges([(3, 4)])

    def test_star_folds_under_its_parent(self):
        assert is_mergeable(self.t2, self.t1)

    def test_in_degree_conflict(self):
        assert not is_mergeable(self.t2, self.t3)

    def test_direction_matters(self):
        # the absorbing tree's root must reach the absorbed tree
        assert not is_mergeable(self.t1, self.t2)

    def test_vertex_disjoint_pair(self):
        far = Pseudotree.from_edges([(8, 9)])
        assert not is_mergeable(far, self.t1)


class TestInitialCovering:
    def test_diamond_stars(self):
        c = initial_covering(diamond_eg())
        assert len(c) == 3
        assert [t.roots for t in c.trees] == [{1}, {2}, {3}]
        assert covering_violations(c) == ()

    def test_single_edge(self):
        eg = build_extended_graph(ModelSet.from_edges(2, [(1, 2)]))
        c = initial_covering(eg)
        assert len(c) == 1
        assert c.trees[0].edges == {(1, 2)}

    def test_no_targets(self):
        eg = build_extended_graph(
            ModelSet.from_edges(2, [(1, 2, EntryStatus.KNOWN)])
        )
        with pytest.raises(ValueError, match="no parameterized edges"):
            initial_covering(eg)

    def test_known_edges_never_covered(self):
        m = ModelSet.from_edges(3, [(1, 2, EntryStatus.KNOWN), (2, 3)])
        c = initial_covering(build_extended_graph(m))
        assert c.target_edges == {(2, 3)}
        assert all((1, 2) not in t.edges for t in c.trees)

    def test_star_count_formula(self):
        # one star per non-sink vertex of the target-induced subgraph
        c = initial_covering(diamond_eg())
        touched = {v for e in c.target_edges for v in e}
        sinks = {v for v in touched if all(t != v for t, _ in c.target_edges)}
        assert len(c) == len(touched) - len(sinks)


class TestCharMatrix:
    def test_must_be_square(self):
        with pytest.raises(ValueError, match="square"):
            CharMatrix.from_rows([(O, O)])

    def test_diagonal_must_be_zero(self):
        with pytest.raises(ValueError, match="diagonal"):
            CharMatrix.from_rows([(O, O), (O, I)])

    def test_parse_render_round_trip(self):
        assert CharMatrix.parse(FIXTURE_9.render()) == FIXTURE_9

    def test_entry_indexing(self):
        assert FIXTURE_9.entry(1, 2) is I
        assert FIXTURE_9.entry(5, 6) is I
        assert FIXTURE_9.entry(9, 1) is E

    def test_diamond(self):
        c = initial_covering(diamond_eg())
        expected = CharMatrix.parse("0 0 0\n1 0 0\n1 0 0")
        assert char_matrix(c) == expected

    def test_disjoint_edges_are_empty(self):
        g = DiGraph.of([1, 2, 3, 4], [(1, 2), (3, 4)])
        c = star_covering(g, g.edges)
        assert char_matrix(c) == CharMatrix.parse("0 E\nE 0")


class TestCharMatrixFromAdjacency:
    def test_diamond_agrees_with_direct(self):
        eg = diamond_eg()
        c = initial_covering(eg)
        assert char_matrix_from_adjacency(eg.graph) == char_matrix(c)

    def test_two_cycle_corner_case(self):
        # both stars fold into each other around the cycle
        g = DiGraph.of([1, 2], [(1, 2), (2, 1)])
        m = char_matrix_from_adjacency(g)
        assert m == CharMatrix.parse("0 1\n1 0")

    def test_partial_targets(self):
        g = DiGraph.of([1, 2, 3, 4], [(1, 2), (1, 3), (2, 4), (3, 4)])
        m = char_matrix_from_adjacency(g, frozenset({(1, 2), (2, 4)}))
        assert m == CharMatrix.parse("0 0\n1 0")

    def test_target_must_be_an_edge(self):
        g = DiGraph.of([1, 2], [(1, 2)])
        with pytest.raises(ValueError, match="not in the graph"):
            char_matrix_from_adjacency(g, frozenset({(2, 1)}))


class TestReduce:
    def test_two_by_two_base_case(self):
        m = CharMatrix.parse("0 1\n0 0")
        assert reduce(m, 1, 2) == CharMatrix.parse("0")

    def test_requires_a_one_entry(self):
        m = CharMatrix.parse("0 0\n0 0")
        with pytest.raises(ValueError, match="is not 1"):
            reduce(m, 1, 2)

    def test_positions_validated(self):
        m = CharMatrix.parse("0 1\n0 0")
        with pytest.raises(ValueError, match="invalid positions"):
            reduce(m, 1, 1)
        with pytest.raises(ValueError, match="invalid positions"):
            reduce(m, 1, 3)

    def test_fixture_first_reduction(self):
        assert reduce(FIXTURE_9, 1, 2) == FIXTURE_9_AFTER_12


class TestMergeTrees:
    def test_diamond_merge(self):
        c = initial_covering(diamond_eg())
        merged = merge_trees(c, 2, 1)
        assert len(merged) == 2
        assert merged.trees[0].edges == {(1, 2), (1, 3), (2, 4)}
        assert merged.trees[0].roots == {1}
        assert merged.trees[1].edges == {(3, 4)}
        assert covering_violations(merged) == ()

    def test_non_mergeable_rejected(self):
        c = initial_covering(diamond_eg())
        with pytest.raises(ValueError, match="not mergeable"):
            merge_trees(c, 1, 2)

    def test_positions_validated(self):
        c = initial_covering(diamond_eg())
        with pytest.raises(ValueError, match="invalid tree positions"):
            merge_trees(c, 0, 1)

    def test_cycle_keeps_its_root_set(self):
        host = DiGraph.of([1, 2, 3, 4], [(1, 2), (2, 1), (2, 3), (3, 4)])
        cycle = Pseudotree.from_edges([(1, 2), (2, 1), (2, 3)])
        star = Pseudotree.from_edges([(3, 4)])
        c = Covering(trees=(cycle, star), host=host, target_edges=host.edges)
        assert covering_violations(c) == ()
        merged = merge_trees(c, 2, 1)
        assert len(merged) == 1
        assert merged.trees[0].roots == {1, 2}


class TestMergePolicy:
    def test_fixture_trace_and_final(self):
        final, trace = matrix_only_merge(FIXTURE_9)
        assert trace == [(1, 2), (1, 2), (3, 4), (4, 5)]
        assert final.n == 5
        assert all(e is O for row in final.entries for e in row)

    def test_all_zero_is_stable(self):
        m = CharMatrix.parse("0 0\n0 0")
        final, trace = matrix_only_merge(m)
        assert trace == []
        assert final == m

    def test_two_by_two(self):
        final, trace = matrix_only_merge(CharMatrix.parse("0 1\n0 0"))
        assert trace == [(1, 2)]
        assert final == CharMatrix.parse("0")


class TestAlgorithmOne:
    def test_diamond(self):
        covering, trace = algorithm1_merge(diamond_eg())
        assert trace == [(2, 1)]
        assert len(covering) == 2
        assert covering_violations(covering) == ()

    def test_single_star_graph(self):
        eg = build_extended_graph(ModelSet.from_edges(3, [(1, 2), (1, 3)]))
        covering, trace = algorithm1_merge(eg)
        assert trace == []
        assert len(covering) == 1

    def test_correlated_noise_fixture(self):
        eg = build_extended_graph(correlated_noise_model())
        covering, trace = algorithm1_merge(eg)
        assert trace == [(4, 3), (2, 3), (2, 6), (1, 2)]
        assert len(covering) == 4
        assert covering_violations(covering) == ()
        assert {min(t.roots) for t in covering.trees} == {5, 6, 7, 8}


SEEDS = st.integers(min_value=0, max_value=10**9)

WIDE_BUDGET = OracleBudget(max_vertices=8, max_edges=20, max_nodes_explored=500_000)


def _ones(m: CharMatrix):
    return [
        (i, j)
        for i in range(1, m.n + 1)
        for j in range(1, m.n + 1)
        if m.entry(i, j) is CharEntry.ONE
    ]


class TestMatrixCoveringConsistency:
    @given(SEEDS)
    @settings(max_examples=100, deadline=None)
    def test_reduce_is_a_conservative_update(self, seed):
        # reduce applied to an exact matrix never invents a One, and the
        # Ones it misses all involve the merged tree: growing tree j can
        # open merges for it that neither constituent had, and 0 odot 1
        # stays 0. Checked for every legal merge along a random walk.
        rng = random.Random(seed)
        eg = build_extended_graph(random_model(rng))
        assume(eg.parameterized_edges)
        c = initial_covering(eg)
        while True:
            m = char_matrix(c)
            ones = _ones(m)
            if not ones:
                break
            for i, j in ones:
                folded = reduce(m, i, j)
                exact = char_matrix(merge_trees(c, i, j))
                merged = j - 1 if j > i else j
                for r in range(1, folded.n + 1):
                    for s in range(1, folded.n + 1):
                        got, true = folded.entry(r, s), exact.entry(r, s)
                        if got is true:
                            continue
                        assert merged in (r, s)
                        assert (got, true) == (CharEntry.ZERO, CharEntry.ONE)
            c = merge_trees(c, *rng.choice(ones))
            assert covering_violations(c) == ()

    @given(SEEDS)
    @settings(max_examples=150, deadline=None)
    def test_formula_matches_direct_checks(self, seed):
        rng = random.Random(seed)
        g = random_digraph(rng)
        assume(g.edges)
        edges = sorted(g.edges)
        targets = frozenset(rng.sample(edges, rng.randint(1, len(edges))))
        direct = char_matrix(star_covering(g, targets))
        assert char_matrix_from_adjacency(g, targets) == direct


class TestAlgorithmOneProperties:
    @given(SEEDS)
    @settings(max_examples=100, deadline=None)
    def test_output_is_valid_and_saturated(self, seed):
        rng = random.Random(seed)
        eg = build_extended_graph(random_model(rng))
        assume(eg.parameterized_edges)
        covering, trace = algorithm1_merge(eg)
        assert covering_violations(covering) == ()
        assert _ones(char_matrix(covering)) == []
        assert len(covering) == len(initial_covering(eg)) - len(trace)

    @given(SEEDS)
    @settings(max_examples=60, deadline=None)
    def test_never_beats_the_oracle(self, seed):
        rng = random.Random(seed)
        eg = build_extended_graph(random_model(rng))
        assume(eg.parameterized_edges)
        covering, _ = algorithm1_merge(eg)
        kappa, _ = brute_min_covering(
            eg.graph, eg.parameterized_edges, WIDE_BUDGET
        )
        assert len(covering) >= kappa
