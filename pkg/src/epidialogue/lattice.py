"""Finite set partitions ordered by refinement, with join, meet and common knowledge.

A partition of ``{0, ..., N-1}`` is stored as a block-label vector in
canonical first-occurrence numbering: ``block_id[0] == 0`` and every new
label is one more than the largest label seen so far.  Two partitions are
therefore equal exactly when their vectors are equal.

Partitions of a fixed ground set form a complete lattice under the
"is coarser than" order: P <= Q iff every block of P is a union of blocks
of Q.  ``join`` is the coarsest common refinement (pairwise non-empty
block intersections) and ``meet`` the finest common coarsening (connected
components of the two block relations).  An agent with partition P who
observes state x knows exactly the block containing x; an event is common
knowledge at x when the block of the meet of all agents' partitions
containing x lies inside the event.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import CoverageError, EmptyFamilyError, OverlapError, SizeMismatchError

Event = frozenset  # subset of {0, ..., N-1}


def _canonical(labels: Sequence[int]) -> tuple[int, ...]:
    """Renumber arbitrary block labels into first-occurrence order."""
    mapping: dict[int, int] = {}
    out = []
    for lab in labels:
        if lab not in mapping:
            mapping[lab] = len(mapping)
        out.append(mapping[lab])
    return tuple(out)


@dataclass(frozen=True)
class Partition:
    """Canonical partition of the ground set {0, ..., num_states-1}."""

    num_states: int
    block_id: tuple[int, ...]

    def __post_init__(self):
        if self.num_states < 1 or len(self.block_id) != self.num_states:
            raise SizeMismatchError(
                f"block_id length {len(self.block_id)} != num_states {self.num_states}"
            )
        if self.block_id != _canonical(self.block_id):
            raise OverlapError(f"block labels not in canonical order: {self.block_id}")

    @staticmethod
    def from_block_ids(labels: Sequence[int]) -> "Partition":
        return Partition(len(labels), _canonical(labels))

    @property
    def num_blocks(self) -> int:
        return max(self.block_id) + 1

    def blocks(self) -> tuple[tuple[int, ...], ...]:
        """Blocks as sorted tuples, ordered by block label (= first occurrence)."""
        out: list[list[int]] = [[] for _ in range(self.num_blocks)]
        for x, b in enumerate(self.block_id):
            out[b].append(x)
        return tuple(tuple(blk) for blk in out)

    def same_block(self, x: int, y: int) -> bool:
        return self.block_id[x] == self.block_id[y]


def partition_from_blocks(blocks: Iterable[Iterable[int]], num_states: int) -> Partition:
    """Build the canonical partition with exactly the given disjoint blocks."""
    labels = [-1] * num_states
    for i, blk in enumerate(blocks):
        for x in blk:
            if not 0 <= x < num_states:
                raise IndexError(f"state {x} outside [0, {num_states})")
            if labels[x] != -1:
                raise OverlapError(f"state {x} appears in two blocks")
            labels[x] = i
    missing = [x for x, lab in enumerate(labels) if lab == -1]
    if missing:
        raise CoverageError(f"states {missing} not covered by any block")
    return Partition.from_block_ids(labels)


def singletons(num_states: int) -> Partition:
    return Partition.from_block_ids(range(num_states))


def trivial(num_states: int) -> Partition:
    return Partition.from_block_ids([0] * num_states)


def block_of(p: Partition, x: int) -> Event:
    """The block of p containing x, as a frozenset; always contains x."""
    if not 0 <= x < p.num_states:
        raise IndexError(f"state {x} outside [0, {p.num_states})")
    b = p.block_id[x]
    return frozenset(y for y in range(p.num_states) if p.block_id[y] == b)


def _check_sizes(p: Partition, q: Partition):
    if p.num_states != q.num_states:
        raise SizeMismatchError(f"{p.num_states} != {q.num_states}")


def is_coarser(p: Partition, q: Partition) -> bool:
    """True iff p <= q: every block of p is a union of blocks of q."""
    _check_sizes(p, q)
    seen: dict[int, int] = {}
    for x in range(p.num_states):
        qb = q.block_id[x]
        pb = p.block_id[x]
        if qb in seen:
            if seen[qb] != pb:
                return False
        else:
            seen[qb] = pb
    return True


def join(p: Partition, q: Partition) -> Partition:
    """Coarsest common refinement: blocks are non-empty pairwise intersections."""
    _check_sizes(p, q)
    keys: dict[tuple[int, int], int] = {}
    labels = []
    for x in range(p.num_states):
        k = (p.block_id[x], q.block_id[x])
        if k not in keys:
            keys[k] = len(keys)
        labels.append(keys[k])
    return Partition.from_block_ids(labels)


def meet(p: Partition, q: Partition) -> Partition:
    """Finest common coarsening: components of "same p-block or same q-block"."""
    _check_sizes(p, q)
    n = p.num_states
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[ry] = rx

    for part in (p, q):
        first: dict[int, int] = {}
        for x in range(n):
            b = part.block_id[x]
            if b in first:
                union(first[b], x)
            else:
                first[b] = x
    return Partition.from_block_ids([find(x) for x in range(n)])


def join_all(parts: Sequence[Partition]) -> Partition:
    """Iterated binary join; order-independent."""
    if not parts:
        raise EmptyFamilyError("join_all of empty family")
    acc = parts[0]
    for p in parts[1:]:
        acc = join(acc, p)
    return acc


def meet_all(parts: Sequence[Partition]) -> Partition:
    """Iterated binary meet; order-independent."""
    if not parts:
        raise EmptyFamilyError("meet_all of empty family")
    acc = parts[0]
    for p in parts[1:]:
        acc = meet(acc, p)
    return acc


def is_common_knowledge(profile: Sequence[Partition], event: Event, x: int) -> bool:
    """True iff the meet-block of the profile containing x is a subset of the event."""
    return block_of(meet_all(list(profile)), x) <= event


def profile_leq(a: Sequence[Partition], b: Sequence[Partition]) -> bool:
    """Product refinement order on profiles: every component of a is coarser."""
    if len(a) != len(b):
        raise SizeMismatchError(f"profile lengths {len(a)} != {len(b)}")
    return all(is_coarser(pa, pb) for pa, pb in zip(a, b))


def all_partitions(num_states: int) -> list[Partition]:
    """Every partition of the ground set, via restricted-growth label strings."""
    out: list[Partition] = []

    def grow(labels: list[int], top: int):
        if len(labels) == num_states:
            out.append(Partition.from_block_ids(labels))
            return
        for lab in range(top + 2):
            grow(labels + [lab], max(top, lab))

    grow([0], 0)
    return out
