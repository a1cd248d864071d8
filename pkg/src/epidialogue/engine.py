"""The update map g and finite dialogues run to their fixed point.

One communication round maps a profile of partitions to a refined profile:
every agent joins her own partition with the working partitions of all her
senders, everything evaluated against the same incoming profile
(simultaneous rounds, no within-round sequencing).  The map is
inflationary, so iterating it from any initial profile produces a weakly
increasing sequence; on a finite ground set the total block count bounds
the strict steps by n*N and the dialogue must reach a fixed point, which
is where the run stops.  Consensus -- all agents sending identical message
vectors -- is then a verdict about the fixed point, not the termination
test: when the graph lacks a reciprocal spanning core the dialogue still
terminates but may end without consensus.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

from . import lattice, messages
from .commgraph import CommGraph, senders
from .errors import BudgetExceededError, SizeMismatchError, ValidationError
from .lattice import Partition
from .messages import MessageFunction
from .ordinals import Ordinal
from .trace import INITIAL, SUCCESSOR, DialogueTrace, StageRecord

Profile = tuple[Partition, ...]


@dataclass(frozen=True)
class Scenario:
    """A finite communication structure plus exogenous initial information."""

    num_states: int
    agents: tuple[str, ...]
    initial: Profile
    message_function: MessageFunction
    graph: CommGraph
    true_state: Optional[int] = None
    state_labels: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        n = len(self.agents)
        if n < 2:
            raise ValidationError("at least two agents required")
        if len(self.initial) != n or self.graph.num_agents != n:
            raise ValidationError("profile / graph / agent-list sizes disagree")
        for p in self.initial:
            if p.num_states != self.num_states:
                raise SizeMismatchError("partition ground set != num_states")
        if self.true_state is not None and not 0 <= self.true_state < self.num_states:
            raise ValidationError(f"true_state {self.true_state} out of range")
        if self.state_labels is not None and len(self.state_labels) != self.num_states:
            raise ValidationError("state_labels length != num_states")


@dataclass(frozen=True)
class StageBudget:
    """Cap on successor steps; the n*N bound makes exceeding it a bug signal."""

    max_successors: int

    def __post_init__(self):
        if self.max_successors < 1:
            raise ValidationError("budget must be positive")


def _check_profile(profile: Profile):
    if len(profile) < 2:
        raise SizeMismatchError("profiles have at least two components")
    n = profile[0].num_states
    for p in profile:
        if p.num_states != n:
            raise SizeMismatchError("profile components over different ground sets")


def apply_g(profile: Profile, graph: CommGraph, mf: MessageFunction) -> Profile:
    """One simultaneous communication round.

    Component i becomes the join of P_i with the working partitions of all
    senders j of i, every W_j computed from the incoming profile; agents
    without senders keep their partition unchanged.
    """
    _check_profile(profile)
    if graph.num_agents != len(profile):
        raise SizeMismatchError("graph size != profile size")
    working = [messages.working_partition(mf, p) for p in profile]
    out = []
    for i, p in enumerate(profile):
        s = senders(graph, i)
        if not s:
            out.append(p)
        else:
            out.append(lattice.join_all([p] + [working[j] for j in sorted(s)]))
    return tuple(out)


def consensus_holds(profile: Profile, mf: MessageFunction) -> bool:
    """True iff all agents' message vectors are identical."""
    _check_profile(profile)
    vecs = [messages.message_vector(mf, p) for p in profile]
    return all(v == vecs[0] for v in vecs[1:])


def partial_consensus_at(profile: Profile, mf: MessageFunction, x: int) -> bool:
    """True iff all agents send the same message at state x."""
    _check_profile(profile)
    sent = {messages.evaluate(mf, lattice.block_of(p, x)) for p in profile}
    return len(sent) == 1


def message_profile_event(profile: Profile, mf: MessageFunction, x: int) -> frozenset:
    """E(x): the states at which every agent sends the same message as at x."""
    vecs = [messages.message_vector(mf, p) for p in profile]
    n = profile[0].num_states
    return frozenset(
        y for y in range(n) if all(v[y] == v[x] for v in vecs)
    )


def messages_ck_at(profile: Profile, mf: MessageFunction, x: int) -> bool:
    """Is the profile of messages sent at x common knowledge at x?"""
    return lattice.is_common_knowledge(profile, message_profile_event(profile, mf, x), x)


@dataclass(frozen=True)
class ConsensusFlags:
    """The three consensus conditions, computed independently.

    messages_ck: at every state the sent message profile is common knowledge
    there; messages_equal: all message vectors coincide; working_equal: all
    working partitions coincide.  The three are equivalent exactly when the
    message function is union consistent; without it only
    messages_equal => working_equal => messages_ck survives.
    """

    messages_ck: bool
    messages_equal: bool
    working_equal: bool


def consensus_characterization(profile: Profile, mf: MessageFunction) -> ConsensusFlags:
    _check_profile(profile)
    n = profile[0].num_states
    ck = all(messages_ck_at(profile, mf, x) for x in range(n))
    eq = consensus_holds(profile, mf)
    ws = [messages.working_partition(mf, p) for p in profile]
    weq = all(w == ws[0] for w in ws[1:])
    return ConsensusFlags(messages_ck=ck, messages_equal=eq, working_equal=weq)


@dataclass(frozen=True)
class RefinementVerdict:
    """Whether two disagreeing agents can strictly learn from each other.

    applicable is False when the agents already send identical message
    vectors.  For union-consistent message functions at least one of the
    two strict refinements must hold whenever the verdict is applicable.
    """

    applicable: bool
    first_learns: bool = False
    second_learns: bool = False


def disagreement_refinement(
    profile: Profile, mf: MessageFunction, i: int, j: int
) -> RefinementVerdict:
    if i == j:
        raise ValidationError("two distinct agents required")
    _check_profile(profile)
    fi = messages.message_vector(mf, profile[i])
    fj = messages.message_vector(mf, profile[j])
    if fi == fj:
        return RefinementVerdict(applicable=False)
    wi = messages.working_partition(mf, profile[i])
    wj = messages.working_partition(mf, profile[j])
    return RefinementVerdict(
        applicable=True,
        first_learns=lattice.join(profile[i], wj) != profile[i],
        second_learns=lattice.join(profile[j], wi) != profile[j],
    )


def in_fix_g(profile: Profile, graph: CommGraph, mf: MessageFunction) -> bool:
    """True iff one round of communication leaves the profile unchanged."""
    return apply_g(profile, graph, mf) == profile


def default_budget(sc: Scenario) -> StageBudget:
    return StageBudget(len(sc.agents) * sc.num_states + 1)


def _record(sc: Scenario, profile: Profile, ordinal: Ordinal, kind: str) -> StageRecord:
    vecs = tuple(messages.message_vector(sc.message_function, p) for p in profile)
    x = sc.true_state
    return StageRecord(
        ordinal=ordinal,
        kind=kind,
        partitions=profile,
        message_vectors=vecs,
        true_state_messages=None if x is None else tuple(v[x] for v in vecs),
        consensus=consensus_holds(profile, sc.message_function),
        partial_consensus=None
        if x is None
        else partial_consensus_at(profile, sc.message_function, x),
        messages_ck=None if x is None else messages_ck_at(profile, sc.message_function, x),
        fixed_point=False,
    )


def run_dialogue(sc: Scenario, budget: Optional[StageBudget] = None) -> DialogueTrace:
    """Iterate the update map from the initial profile until it stops changing.

    Termination is detected by profile equality, not message equality, so
    the run is meaningful even for graphs under which consensus is not
    guaranteed.  The block-count argument bounds strict steps by n*N; a
    budget overrun therefore signals a bug rather than a modelling outcome.
    """
    budget = budget if budget is not None else default_budget(sc)
    records = []
    current = sc.initial
    ordinal = Ordinal(0, 0)
    records.append(_record(sc, current, ordinal, INITIAL))
    while True:
        nxt = apply_g(current, sc.graph, sc.message_function)
        if nxt == current:
            records[-1] = replace(records[-1], fixed_point=True)
            return DialogueTrace(tuple(records))
        if ordinal.steps + 1 > budget.max_successors:
            raise BudgetExceededError(
                f"no fixed point within {budget.max_successors} successor steps"
            )
        current = nxt
        ordinal = ordinal.successor()
        records.append(_record(sc, current, ordinal, SUCCESSOR))
