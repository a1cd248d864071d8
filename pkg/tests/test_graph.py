"""Communication graphs, sender sets, and the reciprocal-connectivity check."""

import itertools

import pytest

from epidialogue.commgraph import (
    CommGraph,
    export_dot,
    reciprocally_connected,
    senders,
    symmetric_core,
)
from epidialogue.errors import LabelMismatchError, ValidationError

STAR = CommGraph(3, ((0, 1), (1, 0), (1, 2), (2, 1)))  # A<->B<->C
CYCLE3 = CommGraph(3, ((0, 1), (1, 2), (2, 0)))


def complete_graph(n):
    return CommGraph(n, tuple((i, j) for i in range(n) for j in range(n) if i != j))


class TestBasics:
    def test_self_loop_rejected(self):
        with pytest.raises(ValidationError):
            CommGraph(2, ((0, 0),))

    def test_duplicate_edge_rejected(self):
        with pytest.raises(ValidationError):
            CommGraph(2, ((0, 1), (0, 1)))

    def test_out_of_range_rejected(self):
        with pytest.raises(ValidationError):
            CommGraph(2, ((0, 2),))

    def test_senders_of_the_hub(self):
        assert senders(STAR, 1) == {0, 2}

    def test_senders_empty_graph(self):
        g = CommGraph(3, ())
        assert all(senders(g, i) == frozenset() for i in range(3))

    def test_senders_complete(self):
        assert senders(complete_graph(3), 0) == {1, 2}

    def test_senders_bad_agent(self):
        with pytest.raises(IndexError):
            senders(STAR, 3)


class TestSymmetricCore:
    def test_drops_one_way_edges(self):
        g = CommGraph(4, ((1, 2), (2, 1), (1, 3)))
        assert symmetric_core(g).edges == ((1, 2), (2, 1))

    def test_fixed_point_on_symmetric(self):
        assert symmetric_core(STAR) == STAR

    def test_cycle_has_empty_core(self):
        assert symmetric_core(CYCLE3).edges == ()

    def test_idempotent(self):
        for edges in itertools.permutations([(0, 1), (1, 0), (2, 0), (1, 2)], 3):
            g = CommGraph(3, tuple(edges))
            assert symmetric_core(symmetric_core(g)) == symmetric_core(g)


def brute_force_reciprocal_spanning(g: CommGraph) -> bool:
    """Enumerate symmetric spanning subgraphs directly.

    A symmetric subgraph can only use reciprocated pairs, so subsets of the
    core's undirected pairs are the full search space.
    """
    core_pairs = sorted({tuple(sorted(e)) for e in symmetric_core(g).edges})
    for r in range(len(core_pairs) + 1):
        for chosen in itertools.combinations(core_pairs, r):
            adj = {i: set() for i in range(g.num_agents)}
            for a, b in chosen:
                adj[a].add(b)
                adj[b].add(a)
            reached = {0}
            stack = [0]
            while stack:
                v = stack.pop()
                for w in adj[v]:
                    if w not in reached:
                        reached.add(w)
                        stack.append(w)
            if len(reached) == g.num_agents:
                return True
    return False


def strongly_connected(g: CommGraph) -> bool:
    adj = {i: set() for i in range(g.num_agents)}
    for a, b in g.edges:
        adj[a].add(b)
    for start in range(g.num_agents):
        reached = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in reached:
                    reached.add(w)
                    stack.append(w)
        if len(reached) != g.num_agents:
            return False
    return True


class TestReciprocalConnectivity:
    def test_hub_graph_holds(self):
        assert reciprocally_connected(STAR).holds

    def test_cycle_fails(self):
        verdict = reciprocally_connected(CYCLE3)
        assert not verdict.holds
        assert "reciprocated" in verdict.reason

    def test_chain_with_dangling_agent_fails(self):
        g = CommGraph(4, ((1, 2), (2, 1), (2, 3)))
        verdict = reciprocally_connected(g)
        assert not verdict.holds
        assert "not reachable" in verdict.reason

    def test_witness_is_symmetric_spanning_strongly_connected(self):
        for g in (STAR, complete_graph(3), complete_graph(4)):
            verdict = reciprocally_connected(g)
            w = verdict.witness
            assert w.num_agents == g.num_agents
            edge_set = set(w.edges)
            assert all((j, i) in edge_set for i, j in edge_set)
            assert strongly_connected(w)

    def test_matches_brute_force_n3_exhaustively(self):
        possible = [(i, j) for i in range(3) for j in range(3) if i != j]
        for mask in range(2 ** len(possible)):
            edges = tuple(e for k, e in enumerate(possible) if mask >> k & 1)
            g = CommGraph(3, edges)
            assert reciprocally_connected(g).holds == brute_force_reciprocal_spanning(g)

    def test_matches_brute_force_n4_sampled(self):
        import random

        rng = random.Random(7)
        possible = [(i, j) for i in range(4) for j in range(4) if i != j]
        for _ in range(300):
            edges = tuple(e for e in possible if rng.random() < 0.4)
            g = CommGraph(4, edges)
            assert reciprocally_connected(g).holds == brute_force_reciprocal_spanning(g)

    def test_monotone_in_edges(self):
        import random

        rng = random.Random(11)
        possible = [(i, j) for i in range(4) for j in range(4) if i != j]
        for _ in range(200):
            edges = [e for e in possible if rng.random() < 0.35]
            g = CommGraph(4, tuple(edges))
            if reciprocally_connected(g).holds:
                extra = [e for e in possible if e not in edges]
                if extra:
                    g2 = CommGraph(4, tuple(edges + [rng.choice(extra)]))
                    assert reciprocally_connected(g2).holds


class TestDot:
    def test_hub_graph_dot(self):
        text = export_dot(STAR, ["A", "B", "C"])
        assert text == (
            'digraph dialogue {\n  "A";\n  "B";\n  "C";\n'
            '  "A" -> "B";\n  "B" -> "A";\n  "B" -> "C";\n  "C" -> "B";\n}\n'
        )

    def test_empty_graph_nodes_only(self):
        text = export_dot(CommGraph(2, ()), ["p", "q"])
        assert '"p";' in text and "->" not in text

    def test_complete_graph_edge_count(self):
        text = export_dot(complete_graph(3), ["a", "b", "c"])
        assert text.count("->") == 6

    def test_label_mismatch(self):
        with pytest.raises(LabelMismatchError):
            export_dot(STAR, ["A", "B"])

    def test_deterministic_bytes(self):
        assert export_dot(STAR, ["A", "B", "C"]) == export_dot(STAR, ["A", "B", "C"])
