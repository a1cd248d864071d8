"""Rational dialogues over partition information structures.

Agents privately observe a partitional signal, exchange messages computed
by a common message function along a fixed communication graph, and refine
their partitions by joining in what each message reveals.  The package
provides the finite engine (dialogues stop within n*N rounds), a symbolic
engine for eventually-periodic partitions of the naturals (dialogues may
need ordinal stages below w^2), property suites for the structural
results, and a CLI over scenario files.
"""

from .commgraph import CommGraph, ConnectivityVerdict, export_dot, reciprocally_connected, senders, symmetric_core
from .engine import (
    ConsensusFlags,
    RefinementVerdict,
    Scenario,
    StageBudget,
    apply_g,
    consensus_characterization,
    consensus_holds,
    disagreement_refinement,
    in_fix_g,
    partial_consensus_at,
    run_dialogue,
)
from .lattice import (
    Partition,
    block_of,
    is_coarser,
    is_common_knowledge,
    join,
    join_all,
    meet,
    meet_all,
    partition_from_blocks,
    singletons,
    trivial,
)
from .messages import (
    ExpectedValue,
    Injective,
    KnownState,
    LookupTable,
    Maximin,
    Posterior,
    check_union_consistency,
    evaluate,
    message_vector,
    state_guessing_utility,
    working_partition,
)
from .ordinals import Ordinal, parse_ordinal
from .trace import DialogueTrace, StageRecord

__all__ = [name for name in dir() if not name.startswith("_")]
