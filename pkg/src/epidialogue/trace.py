"""Stage-by-stage record of a dialogue, shared by the finite and transfinite engines."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .ordinals import Ordinal

INITIAL = "initial"
SUCCESSOR = "successor"
LIMIT = "limit"


@dataclass(frozen=True)
class StageRecord:
    """One dialogue stage.

    ``partitions`` holds the per-agent profile (finite Partitions or
    periodic partitions, depending on the engine).  ``message_vectors`` is
    per-agent per-state and only available for finite ground sets;
    ``true_state_messages`` is the per-agent message at the scenario's true
    state, when one is set.  Flags referring to the true state are None
    when the scenario has none.
    """

    ordinal: Ordinal
    kind: str
    partitions: tuple
    message_vectors: Optional[tuple]
    true_state_messages: Optional[tuple]
    consensus: bool
    partial_consensus: Optional[bool]
    messages_ck: Optional[bool]
    fixed_point: bool


@dataclass(frozen=True)
class DialogueTrace:
    records: tuple[StageRecord, ...]

    @property
    def final(self) -> StageRecord:
        return self.records[-1]

    @property
    def successor_steps(self) -> int:
        """Number of successor stages recorded (limit jumps excluded)."""
        return sum(1 for r in self.records if r.kind == SUCCESSOR)
