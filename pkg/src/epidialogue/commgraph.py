"""Directed communication graphs: who sends a message to whom in every stage.

An edge (i, j) means "i sends to j", so the senders of i are its
in-neighbours.  Consensus is guaranteed (for well-behaved message
functions) when the graph contains a spanning subgraph that is both
symmetric and strongly connected; that holds exactly when the symmetric
core -- the reciprocated edges -- connects all agents, which is what
``reciprocally_connected`` decides.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import LabelMismatchError, ValidationError


@dataclass(frozen=True)
class CommGraph:
    num_agents: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        seen = set()
        for i, j in self.edges:
            if i == j:
                raise ValidationError(f"self-loop ({i},{i}) not permitted")
            if not (0 <= i < self.num_agents and 0 <= j < self.num_agents):
                raise ValidationError(f"edge ({i},{j}) outside agent range")
            if (i, j) in seen:
                raise ValidationError(f"duplicate edge ({i},{j})")
            seen.add((i, j))


def senders(g: CommGraph, i: int) -> frozenset:
    """S(i): the agents with an edge into i; may be empty."""
    if not 0 <= i < g.num_agents:
        raise IndexError(f"agent {i} outside [0, {g.num_agents})")
    return frozenset(a for a, b in g.edges if b == i)


def symmetric_core(g: CommGraph) -> CommGraph:
    """The reciprocated edges of g, in input order."""
    edge_set = set(g.edges)
    return CommGraph(
        g.num_agents, tuple(e for e in g.edges if (e[1], e[0]) in edge_set)
    )


@dataclass(frozen=True)
class ConnectivityVerdict:
    holds: bool
    witness: Optional[CommGraph] = None
    reason: Optional[str] = None


def reciprocally_connected(g: CommGraph) -> ConnectivityVerdict:
    """Decide whether g contains a symmetric, strongly connected spanning subgraph.

    Any symmetric subgraph can only use reciprocated edges, so such a
    spanning subgraph exists iff the symmetric core, viewed as an undirected
    graph, connects all agents; the core itself is then a witness.
    """
    core = symmetric_core(g)
    adjacency: dict[int, set] = {i: set() for i in range(g.num_agents)}
    for i, j in core.edges:
        adjacency[i].add(j)
    reached = {0}
    frontier = [0]
    while frontier:
        v = frontier.pop()
        for w in adjacency[v]:
            if w not in reached:
                reached.add(w)
                frontier.append(w)
    if len(reached) == g.num_agents:
        return ConnectivityVerdict(True, witness=core)
    left_out = sorted(set(range(g.num_agents)) - reached)
    return ConnectivityVerdict(
        False,
        reason=f"agents {left_out} not reachable through reciprocated edges",
    )


def export_dot(g: CommGraph, labels: Sequence[str]) -> str:
    """Deterministic DOT text: nodes in label order, edges in input order."""
    if len(labels) != g.num_agents:
        raise LabelMismatchError(
            f"{len(labels)} labels for {g.num_agents} agents"
        )
    lines = ["digraph dialogue {"]
    for lab in labels:
        lines.append(f'  "{lab}";')
    for i, j in g.edges:
        lines.append(f'  "{labels[i]}" -> "{labels[j]}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
