"""Measurement selection on fully excited noise-free networks."""

import random

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from dynetid.dual import (
    DualModelSet,
    InvalidDualModelError,
    measurement_bounds,
    select_measurements,
    validate_dual,
)
from dynetid.graph import max_vertex_disjoint_paths
from dynetid.model import EntryStatus
from dynetid.pseudotree import covering_violations

from .randgen import random_all_param_edges

SEEDS = st.integers(0, 10**9)

P, K, Z = EntryStatus.PARAMETERIZED, EntryStatus.KNOWN, EntryStatus.ZERO


def diamond() -> DualModelSet:
    return DualModelSet.from_edges(4, [(1, 2), (1, 3), (2, 4), (3, 4)])


class TestConstruction:
    def test_needs_one_vertex(self):
        with pytest.raises(ValueError, match="at least one vertex"):
            DualModelSet(0, ())

    def test_pattern_must_be_square(self):
        with pytest.raises(ValueError, match="g_pattern"):
            DualModelSet(2, ((Z,),))

    def test_edge_in_range(self):
        with pytest.raises(ValueError, match="outside"):
            DualModelSet.from_edges(2, [(1, 3)])

    def test_edges_round_trip(self):
        m = diamond()
        assert m.edges() == {(1, 2), (1, 3), (2, 4), (3, 4)}
        assert m.graph().vertices == {1, 2, 3, 4}


class TestValidateDual:
    def test_clean_model(self):
        assert validate_dual(diamond()) == ()

    def test_self_loop(self):
        m = DualModelSet.from_edges(2, [(1, 1), (1, 2)])
        assert any("self-loop" in v for v in validate_dual(m))

    def test_known_module_rejected(self):
        g = ((Z, Z), (K, Z))
        m = DualModelSet(2, g)
        violations = validate_dual(m)
        assert any("parameterized" in v for v in violations)
        with pytest.raises(InvalidDualModelError, match="parameterized"):
            select_measurements(m)


class TestSelectMeasurements:
    def test_single_edge(self):
        sel = select_measurements(DualModelSet.from_edges(2, [(1, 2)]))
        assert sel.measured == (2,)
        assert sel.verified

    def test_chain(self):
        sel = select_measurements(DualModelSet.from_edges(3, [(1, 2), (2, 3)]))
        assert sel.measured == (3,)
        assert len(sel.anti_trees) == 1

    def test_diamond(self):
        sel = select_measurements(diamond())
        assert sel.measured == (3, 4)
        assert len(sel.measured) == 2  # vertex 1's out-degree forces two
        assert sel.verified

    def test_no_edges(self):
        sel = select_measurements(DualModelSet.from_edges(2, []))
        assert sel.measured == ()
        assert sel.verified
        assert sel.anti_trees == ()

    def test_anti_trees_mirror_the_reversed_covering(self):
        sel = select_measurements(diamond())
        assert len(sel.anti_trees) == len(sel.reversed_covering.trees)
        for anti, rev in zip(sel.anti_trees, sel.reversed_covering.trees):
            assert anti.edges == {(h, t) for t, h in rev.edges}
            assert anti.vertices == rev.vertices
            assert anti.roots == rev.roots
            # out-degrees within an anti-pseudotree stay at most one
            tails = [t for t, _ in anti.edges]
            assert len(tails) == len(set(tails))

    def test_out_neighborhood_condition(self):
        m = diamond()
        g = m.graph()
        measured = set(select_measurements(m).measured)
        for j in sorted(g.vertices):
            outs = g.out_neighbors(j)
            if outs:
                assert max_vertex_disjoint_paths(g, outs, measured) == len(outs)

    @given(SEEDS)
    @settings(max_examples=100, deadline=None)
    def test_condition_holds_on_random_patterns(self, seed):
        rng = random.Random(seed)
        n, edges = random_all_param_edges(rng)
        m = DualModelSet.from_edges(n, edges)
        assume(not any(t == h for t, h in edges))
        sel = select_measurements(m)
        assert sel.verified
        g = m.graph()
        measured = set(sel.measured)
        for j in sorted(g.vertices):
            outs = g.out_neighbors(j)
            if outs:
                assert max_vertex_disjoint_paths(g, outs, measured) == len(outs)

    @given(SEEDS)
    @settings(max_examples=100, deadline=None)
    def test_reversed_covering_is_valid(self, seed):
        rng = random.Random(seed)
        n, edges = random_all_param_edges(rng)
        assume(not any(t == h for t, h in edges))
        sel = select_measurements(DualModelSet.from_edges(n, edges))
        assert covering_violations(sel.reversed_covering) == ()
        rev_edges = {e for t in sel.reversed_covering.trees for e in t.edges}
        assert rev_edges == {(h, t) for t, h in edges}


class TestMeasurementBounds:
    def test_diamond(self):
        assert measurement_bounds(diamond()) == (2, 2)

    def test_chain(self):
        assert measurement_bounds(DualModelSet.from_edges(3, [(1, 2), (2, 3)])) == (1, 1)

    def test_star_needs_one_per_sink(self):
        m = DualModelSet.from_edges(4, [(1, 2), (1, 3), (1, 4)])
        assert measurement_bounds(m) == (3, 3)

    @given(SEEDS)
    @settings(max_examples=100, deadline=None)
    def test_bounds_sandwich_the_selection(self, seed):
        rng = random.Random(seed)
        n, edges = random_all_param_edges(rng)
        assume(not any(t == h for t, h in edges))
        m = DualModelSet.from_edges(n, edges)
        touched = {v for e in edges for v in e}
        assume(touched == set(range(1, n + 1)))  # isolated vertices inflate the sink count
        sel = select_measurements(m)
        lower, upper = measurement_bounds(m)
        assert lower <= len(sel.measured) <= upper
