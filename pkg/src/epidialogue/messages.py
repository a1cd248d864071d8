"""Message functions, per-agent message vectors, working partitions and the
sure-thing / union-consistency check.

A message function maps every non-empty subset of the ground set to a
message.  An agent with partition P sends, at state x, the message for the
block P(x); like-minded agents with equal partitions therefore send equal
messages everywhere.  Grouping states by the message an agent sends gives
her working partition W -- the information a receiver can extract -- and W
is always a coarsening of P.

Messages are exact values: int, Fraction or text token.  Floats are
rejected everywhere so that message equality (and hence every consensus
verdict) is exact.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Mapping, Optional, Sequence, Union

from . import lattice
from .errors import (
    EmptyBlockError,
    SizeLimitError,
    UndefinedUtilityError,
    UnknownFamilyError,
    ZeroMassBlockError,
)

Message = Union[int, Fraction, str]
Rational = Union[int, Fraction]

EXHAUSTIVE_LIMIT = 12          # 3^N disjoint-pair enumeration stays under a second
SAMPLED_PAIRS = 100_000

UNKNOWN = "unknown"


def _require_rational(value, what: str) -> Rational:
    if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
        raise ValueError(f"{what} must be an int or Fraction, got {value!r}")
    return value


def state_token(x: int) -> str:
    """Message announcing knowledge of state x (kept distinct from state ids)."""
    return f"state:{x}"


@dataclass(frozen=True)
class KnownState:
    """Announce the state when the block is a singleton, otherwise "unknown"."""

    family = "known_state"

    def evaluate(self, block: frozenset) -> Message:
        if len(block) == 1:
            return state_token(next(iter(block)))
        return UNKNOWN


@dataclass(frozen=True)
class Maximin:
    """Announce the maximin-optimal action for a utility table u(action, state).

    ``utility[a][k]`` is the payoff of the action with id ``actions[a]`` in
    state k; ``None`` marks an undefined entry.  Ties break to the smallest
    action id.  The message is the chosen action id, not its value.
    """

    family = "maximin"
    actions: tuple[int, ...]
    utility: tuple[tuple[Optional[Rational], ...], ...]

    def __post_init__(self):
        if len(self.actions) != len(self.utility):
            raise ValueError("one utility row per action required")
        if len(set(self.actions)) != len(self.actions):
            raise ValueError("action ids must be distinct")
        for row in self.utility:
            for v in row:
                if v is not None:
                    _require_rational(v, "utility entry")

    def evaluate(self, block: frozenset) -> Message:
        best_action = None
        best_value = None
        for action, row in sorted(zip(self.actions, self.utility)):
            values = []
            for k in block:
                if k >= len(row) or row[k] is None:
                    raise UndefinedUtilityError(f"u({action}, {k}) undefined")
                values.append(row[k])
            worst = min(values)
            if best_value is None or worst > best_value:
                best_action, best_value = action, worst
        return best_action


@dataclass(frozen=True)
class Posterior:
    """Announce the exact posterior probability of a fixed event given the block."""

    family = "posterior"
    prior: tuple[Fraction, ...]
    event: frozenset

    def __post_init__(self):
        for v in self.prior:
            _require_rational(v, "prior weight")

    def evaluate(self, block: frozenset) -> Message:
        mass = sum(self.prior[k] for k in block)
        if mass == 0:
            raise ZeroMassBlockError(f"block {sorted(block)} has prior mass zero")
        hit = sum(self.prior[k] for k in block & self.event)
        return Fraction(hit, 1) / mass


@dataclass(frozen=True)
class ExpectedValue:
    """Announce the exact mean payoff over the block."""

    family = "expected_value"
    payoffs: tuple[Fraction, ...]

    def __post_init__(self):
        for v in self.payoffs:
            _require_rational(v, "payoff")

    def evaluate(self, block: frozenset) -> Message:
        return Fraction(sum(self.payoffs[k] for k in block), len(block))


@dataclass(frozen=True)
class Injective:
    """Announce a canonical encoding of the block itself (maximal expressive power)."""

    family = "injective"

    def evaluate(self, block: frozenset) -> Message:
        return "set:" + ",".join(str(x) for x in sorted(block))


@dataclass(frozen=True)
class LookupTable:
    """Explicit message table over all non-empty blocks of a small ground set."""

    family = "lookup"
    num_states: int
    entries: tuple[tuple[frozenset, Message], ...]

    def __post_init__(self):
        if self.num_states > EXHAUSTIVE_LIMIT:
            raise SizeLimitError(f"lookup tables supported up to N={EXHAUSTIVE_LIMIT}")
        expected = 2 ** self.num_states - 1
        if len({blk for blk, _ in self.entries}) != expected:
            raise ValueError(f"table must define all {expected} non-empty blocks")
        for _, msg in self.entries:
            if isinstance(msg, float):
                raise ValueError("float messages are not permitted")

    @property
    def _table(self) -> Mapping[frozenset, Message]:
        table = self.__dict__.get("_table_cache")
        if table is None:
            table = dict(self.entries)
            self.__dict__["_table_cache"] = table
        return table

    def evaluate(self, block: frozenset) -> Message:
        return self._table[block]


MessageFunction = Union[KnownState, Maximin, Posterior, ExpectedValue, Injective, LookupTable]

FAMILIES = ("known_state", "maximin", "posterior", "expected_value", "injective", "lookup")


def lookup_from_dict(num_states: int, table: Mapping[frozenset, Message]) -> LookupTable:
    entries = tuple(sorted(table.items(), key=lambda kv: (len(kv[0]), sorted(kv[0]))))
    return LookupTable(num_states=num_states, entries=entries)


def state_guessing_utility(num_states: int) -> Maximin:
    """Utility of guessing the state by name: action x+1 pays 1 in state x and
    -1 elsewhere, action 0 always pays 0.

    With 1-based state names (states 0..N-1 displayed as 1..N) the maximin
    choice announces the state's name on singleton blocks and 0 otherwise,
    exactly mirroring the known-state message function block for block.
    """
    actions = tuple(range(num_states + 1))
    rows = [tuple(0 for _ in range(num_states))]
    for a in range(1, num_states + 1):
        rows.append(tuple(1 if k == a - 1 else -1 for k in range(num_states)))
    return Maximin(actions=actions, utility=tuple(rows))


def evaluate(mf: MessageFunction, block: frozenset) -> Message:
    """The message sent for an information block; blocks must be non-empty."""
    if not block:
        raise EmptyBlockError("message functions are defined on non-empty blocks only")
    return mf.evaluate(frozenset(block))


def message_vector(mf: MessageFunction, p: lattice.Partition) -> tuple[Message, ...]:
    """Per-state messages f_i for an agent with partition p; constant on blocks."""
    per_block = [evaluate(mf, frozenset(blk)) for blk in p.blocks()]
    return tuple(per_block[p.block_id[x]] for x in range(p.num_states))


def working_partition(mf: MessageFunction, p: lattice.Partition) -> lattice.Partition:
    """States grouped by the message sent: the information a receiver extracts."""
    vec = message_vector(mf, p)
    keys: dict[Message, int] = {}
    labels = []
    for m in vec:
        if m not in keys:
            keys[m] = len(keys)
        labels.append(keys[m])
    return lattice.Partition.from_block_ids(labels)


@dataclass(frozen=True)
class UnionConsistencyVerdict:
    """Outcome of the union-consistency check.

    status is "holds", "fails" or "sampled" (holds on a random sample because
    the ground set is too large to enumerate).  On failure the witness is a
    disjoint pair (S, S') with f(S) == f(S') != f(S | S').
    """

    status: str
    witness: Optional[tuple[frozenset, frozenset]] = None

    @property
    def holds(self) -> bool:
        return self.status in ("holds", "sampled")


def _disjoint_pairs_exhaustive(num_states: int):
    for assignment in product((0, 1, 2), repeat=num_states):
        s = frozenset(i for i, a in enumerate(assignment) if a == 1)
        t = frozenset(i for i, a in enumerate(assignment) if a == 2)
        if s and t:
            yield s, t


def check_union_consistency(
    mf: MessageFunction, num_states: int, rng: Optional[random.Random] = None
) -> UnionConsistencyVerdict:
    """Check f(S) == f(S') => f(S | S') == f(S) over disjoint non-empty pairs.

    Exhaustive for N <= 12 (3^N orientations); beyond that a fixed-size
    random sample of disjoint pairs is tested and the verdict is "sampled".
    On finite ground sets this property is equivalent to the sure-thing
    principle, by induction on the number of cells.
    """

    @lru_cache(maxsize=None)
    def value(block: frozenset) -> Message:
        return evaluate(mf, block)

    if num_states <= EXHAUSTIVE_LIMIT:
        for s, t in _disjoint_pairs_exhaustive(num_states):
            if value(s) == value(t) and value(s | t) != value(s):
                return UnionConsistencyVerdict("fails", (s, t))
        return UnionConsistencyVerdict("holds")

    rng = rng if rng is not None else random.Random(0)
    states = range(num_states)
    for _ in range(SAMPLED_PAIRS):
        assignment = [rng.randrange(3) for _ in states]
        s = frozenset(i for i in states if assignment[i] == 1)
        t = frozenset(i for i in states if assignment[i] == 2)
        if not s or not t:
            continue
        if value(s) == value(t) and value(s | t) != value(s):
            return UnionConsistencyVerdict("fails", (s, t))
    return UnionConsistencyVerdict("sampled")
