"""Eventually-periodic partitions of the naturals {1, 2, 3, ...}.

A partition is described by a modulus m plus three kinds of components:

* exceptional blocks -- finitely many explicit finite blocks;
* template families -- an offset set O generating the finite blocks
  {O + m*k} for every k >= 0;
* infinite blocks -- a single block consisting of a finite head plus
  finitely many arithmetic progressions start + m*k.

Beyond the largest constant H appearing in the description, membership is
purely periodic: each residue class mod m is claimed exactly once per
period by a template offset or a progression start.  That residue
accounting, together with an explicit occupancy check of the window
[1, 2*(H+m)], certifies that the blocks are pairwise disjoint and cover
all naturals.

All equality and agreement questions are decided on sound finite windows:
two valid descriptions denote the same partition iff their restrictions to
[1, max(H1,H2) + span + 2*lcm(m1,m2)] coincide, where span is the largest
component diameter in either description.  Joins are computed by reading
the window join back into a periodic description and re-verifying it
against the window, so a reconstruction bug cannot escape silently.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Iterable, Optional, Sequence, Union

from .. import lattice
from ..errors import CoverageError, DialogueError, OverlapError, ResidueError


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@dataclass(frozen=True)
class InfiniteBlock:
    """One infinite block: a finite head plus progressions start + m*k."""

    head: frozenset
    starts: tuple[int, ...]

    def min_element(self) -> int:
        return min(self.head | set(self.starts))


@dataclass(frozen=True)
class PeriodicPartition:
    modulus: int
    exceptional: tuple[frozenset, ...]
    families: tuple[frozenset, ...]
    infinite: tuple[InfiniteBlock, ...]

    def __post_init__(self):
        if self.modulus < 1:
            raise ResidueError("modulus must be >= 1")
        for blk in self.exceptional:
            if not blk or any(x < 1 for x in blk):
                raise CoverageError("exceptional blocks are non-empty sets of naturals")
        for offs in self.families:
            if not offs or any(x < 1 for x in offs):
                raise CoverageError("template offsets are non-empty sets of naturals")
        for ib in self.infinite:
            if not ib.starts or any(x < 1 for x in ib.starts) or any(
                x < 1 for x in ib.head
            ):
                raise CoverageError("infinite blocks need naturals and >= 1 progression")


def _max_constant(pp: PeriodicPartition) -> int:
    values = [1]
    for blk in pp.exceptional:
        values.append(max(blk))
    for offs in pp.families:
        values.append(max(offs))
    for ib in pp.infinite:
        values.append(max(ib.head | set(ib.starts)))
    return max(values)


def _component_span(pp: PeriodicPartition) -> int:
    """Largest diameter of a component description (0 for singletons)."""
    span = _finite_component_span(pp)
    for ib in pp.infinite:
        pts = ib.head | set(ib.starts)
        span = max(span, max(pts) - min(pts))
    return span


def _finite_component_span(pp: PeriodicPartition) -> int:
    """Largest diameter over the finite components (exceptional and templates)."""
    span = 0
    for blk in pp.exceptional:
        span = max(span, max(blk) - min(blk))
    for offs in pp.families:
        span = max(span, max(offs) - min(offs))
    return span


def _in_infinite(ib: InfiniteBlock, modulus: int, x: int) -> bool:
    if x in ib.head:
        return True
    return any(x >= s and (x - s) % modulus == 0 for s in ib.starts)


def _ib_elements_upto(ib: InfiniteBlock, modulus: int, hi: int) -> list[int]:
    out = set(y for y in ib.head if y <= hi)
    for s in ib.starts:
        out.update(range(s, hi + 1, modulus))
    return sorted(out)


@lru_cache(maxsize=None)
def blocks_in_window(pp: PeriodicPartition, hi: int) -> tuple[tuple[int, ...], ...]:
    """All blocks intersected with [1, hi], as sorted non-empty tuples."""
    out: list[tuple[int, ...]] = []
    for blk in pp.exceptional:
        cut = tuple(sorted(y for y in blk if y <= hi))
        if cut:
            out.append(cut)
    m = pp.modulus
    for offs in pp.families:
        lo = min(offs)
        k = 0
        while lo + m * k <= hi:
            cut = tuple(sorted(o + m * k for o in offs if o + m * k <= hi))
            if cut:
                out.append(cut)
            k += 1
    for ib in pp.infinite:
        cut = tuple(_ib_elements_upto(ib, m, hi))
        if cut:
            out.append(cut)
    return tuple(out)


def pp_validate(pp: PeriodicPartition) -> int:
    """Certify disjointness and coverage; returns the checked window bound.

    The window [1, 2*(H+m)] is checked explicitly; beyond H the residue
    accounting guarantees each residue class mod m is claimed exactly once
    per period, so no overlap or gap can occur outside the window.
    """
    m = pp.modulus
    window = 2 * (_max_constant(pp) + m)
    count = [0] * (window + 1)
    for blk in blocks_in_window(pp, window):
        for x in blk:
            count[x] += 1
    for x in range(1, window + 1):
        if count[x] > 1:
            raise OverlapError(f"state {x} claimed by several blocks")
        if count[x] == 0:
            raise CoverageError(f"state {x} not covered")
    claims = {r: 0 for r in range(m)}
    for offs in pp.families:
        for o in offs:
            claims[o % m] += 1
    for ib in pp.infinite:
        for s in ib.starts:
            claims[s % m] += 1
    for r, c in claims.items():
        if c != 1:
            raise ResidueError(f"residue {r} mod {m} claimed {c} times per period")
    return window


BlockDescriptor = Union[frozenset, InfiniteBlock]


def pp_block_of(pp: PeriodicPartition, x: int) -> BlockDescriptor:
    """The block containing x: a frozenset, or the InfiniteBlock descriptor."""
    if x < 1:
        raise IndexError("states are naturals >= 1")
    for blk in pp.exceptional:
        if x in blk:
            return blk
    m = pp.modulus
    for offs in pp.families:
        for o in offs:
            if x >= o and (x - o) % m == 0:
                k = (x - o) // m
                return frozenset(o2 + m * k for o2 in offs)
    for ib in pp.infinite:
        if _in_infinite(ib, m, x):
            return ib
    raise CoverageError(f"state {x} not covered (invalid description)")


def pp_is_singleton_at(pp: PeriodicPartition, x: int) -> bool:
    blk = pp_block_of(pp, x)
    return isinstance(blk, frozenset) and len(blk) == 1


@lru_cache(maxsize=None)
def pp_restrict(pp: PeriodicPartition, num_states: int) -> lattice.Partition:
    """Truncate to [1, num_states] and re-index states to 0-based."""
    blocks = [
        tuple(x - 1 for x in blk) for blk in blocks_in_window(pp, num_states)
    ]
    return lattice.partition_from_blocks(blocks, num_states)


@lru_cache(maxsize=None)
def block_min_keys(pp: PeriodicPartition, hi: int) -> tuple[int, ...]:
    """keys[x-1] = least element of the (untruncated) block containing x, x <= hi.

    Every block meeting [1, hi] has its least element inside the window, so
    the key doubles as a canonical block identifier.
    """
    keys = [0] * hi
    for blk in blocks_in_window(pp, hi):
        lo = blk[0]
        for x in blk:
            keys[x - 1] = lo
    return tuple(keys)


def _equality_window(a: PeriodicPartition, b: PeriodicPartition) -> int:
    span = max(_component_span(a), _component_span(b))
    return max(_max_constant(a), _max_constant(b)) + span + 2 * _lcm(a.modulus, b.modulus)


def pp_equal(a: PeriodicPartition, b: PeriodicPartition) -> bool:
    """Extensional equality, decided on a sound finite window.

    Both partitions are exactly periodic beyond their largest constant plus
    span, so any difference shows up within two joint periods of that bound.
    """
    w = _equality_window(a, b)
    return pp_restrict(a, w) == pp_restrict(b, w)


# ---------------------------------------------------------------------------
# construction and canonical form
# ---------------------------------------------------------------------------


def _normalize_infinite(head: Iterable[int], starts: Iterable[int], m: int) -> InfiniteBlock:
    by_res: dict[int, int] = {}
    for s in sorted(starts):
        r = s % m
        if r not in by_res:
            by_res[r] = s
    starts_l = sorted(by_res.values())
    head_s = {
        x
        for x in head
        if not any(x >= s and (x - s) % m == 0 for s in starts_l)
    }
    changed = True
    while changed:
        changed = False
        for i, s in enumerate(starts_l):
            while s - m >= 1 and (s - m) in head_s:
                head_s.remove(s - m)
                s -= m
                changed = True
            starts_l[i] = s
    return InfiniteBlock(frozenset(head_s), tuple(sorted(starts_l)))


def _proper_divisors(m: int) -> list[int]:
    return [d for d in range(1, m) if m % d == 0]


def pp_build(
    modulus: int,
    exceptional: Iterable[Iterable[int]] = (),
    families: Iterable[Iterable[int]] = (),
    infinite: Iterable[tuple[Iterable[int], Iterable[int]]] = (),
    reduce_modulus: bool = True,
) -> PeriodicPartition:
    """Canonicalizing factory: components sorted by least element, exceptional
    blocks absorbed into families that continue them, progression starts
    pulled down through heads, and the modulus reduced to the smallest
    divisor that still describes the same partition."""
    m = modulus
    exc = {frozenset(b) for b in exceptional}
    fams = [frozenset(f) for f in families]
    infs = [_normalize_infinite(head, starts, m) for head, starts in infinite]

    changed = True
    while changed:
        changed = False
        for i, offs in enumerate(fams):
            shifted = frozenset(o - m for o in offs)
            if all(o >= 1 for o in shifted) and shifted in exc:
                exc.remove(shifted)
                fams[i] = shifted
                changed = True

    pp = PeriodicPartition(
        modulus=m,
        exceptional=tuple(sorted(exc, key=lambda b: (min(b), sorted(b)))),
        families=tuple(sorted(fams, key=lambda f: (min(f), sorted(f)))),
        infinite=tuple(sorted(infs, key=lambda ib: ib.min_element())),
    )
    if reduce_modulus:
        for d in _proper_divisors(m):
            cand = _reencode(pp, d)
            if cand is not None:
                return cand
    return pp


def _reencode(pp: PeriodicPartition, d: int) -> Optional[PeriodicPartition]:
    """Try to describe the same partition with the smaller modulus d | m."""
    m = pp.modulus
    h_star = _max_constant(pp) + _component_span(pp)
    new_infs = []
    for ib in pp.infinite:
        res_m = {s % m for s in ib.starts}
        if {(r + d) % m for r in res_m} != res_m:
            return None  # tail not d-periodic
        cutoff = max(ib.starts)
        head2 = set(y for y in ib.head) | {
            x for s in ib.starts for x in range(s, cutoff + 1, m)
        }
        starts2 = []
        for r in sorted({s % d for s in ib.starts}):
            x = cutoff + 1 + ((r - (cutoff + 1)) % d)
            starts2.append(x)
        new_infs.append((head2, starts2))

    window = h_star + _component_span(pp) + 2 * m + 2 * d + 4
    ib_traces = {
        frozenset(_ib_elements_upto(ib, m, window)) for ib in pp.infinite
    }
    exceptional2, families2 = [], []
    for wb in blocks_in_window(pp, window):
        fs = frozenset(wb)
        if fs in ib_traces:
            continue
        if min(wb) <= h_star:
            exceptional2.append(fs)
        elif min(wb) <= h_star + d:
            families2.append(fs)
    try:
        cand = pp_build(d, exceptional2, families2, new_infs, reduce_modulus=False)
        if pp_equal(cand, pp):
            return cand
    except DialogueError:
        pass  # unreadable or overlapping candidate: reduction does not apply
    return None


def pp_singletons() -> PeriodicPartition:
    """The finest partition of the naturals: every state its own block."""
    return pp_build(1, families=[[1]])


def pp_trivial() -> PeriodicPartition:
    """The coarsest partition: one block containing every natural."""
    return pp_build(1, infinite=[((), (1,))])


# ---------------------------------------------------------------------------
# join and working partition
# ---------------------------------------------------------------------------


def _tail_residues(ib: InfiniteBlock, modulus: int, target: int) -> frozenset:
    """Residues mod target covered by the block's progressions (modulus | target)."""
    step = target // modulus
    out = set()
    for s in ib.starts:
        for t in range(step):
            out.add((s + modulus * t) % target)
    return frozenset(out)


@lru_cache(maxsize=None)
def pp_join(a: PeriodicPartition, b: PeriodicPartition) -> PeriodicPartition:
    """Coarsest common refinement over the naturals.

    The blocks are the non-empty pairwise intersections.  Intersections of
    two infinite blocks are built symbolically from their common tail
    residues; every finite piece of the structure is read off the window
    join (restriction commutes with join) and the assembled description is
    validated and re-checked against the window before being returned.
    """
    big_l = _lcm(a.modulus, b.modulus)
    h_star = max(_max_constant(a), _max_constant(b)) + max(
        _component_span(a), _component_span(b)
    )
    span = max(_component_span(a), _component_span(b))
    window = h_star + span + 4 * big_l + 4

    window_join = lattice.join(pp_restrict(a, window), pp_restrict(b, window))
    wblocks = [
        tuple(x + 1 for x in blk) for blk in window_join.blocks()
    ]

    infinite_parts: list[tuple[set, list[int]]] = []
    infinite_traces: set[frozenset] = set()
    for ia in a.infinite:
        for ib in b.infinite:
            common = _tail_residues(ia, a.modulus, big_l) & _tail_residues(
                ib, b.modulus, big_l
            )
            if not common:
                continue
            head = {
                x
                for x in range(1, h_star + 1)
                if _in_infinite(ia, a.modulus, x) and _in_infinite(ib, b.modulus, x)
            }
            starts = [
                h_star + 1 + ((r - (h_star + 1)) % big_l) for r in sorted(common)
            ]
            infinite_parts.append((head, starts))
            trace = set(y for y in head if y <= window)
            for s in starts:
                trace.update(range(s, window + 1, big_l))
            infinite_traces.add(frozenset(trace))

    exceptional, families = [], []
    for wb in wblocks:
        fs = frozenset(wb)
        if fs in infinite_traces:
            continue
        if min(wb) <= h_star:
            exceptional.append(fs)
        elif min(wb) <= h_star + big_l:
            families.append(fs)

    result = pp_build(big_l, exceptional, families, infinite_parts)
    pp_validate(result)
    if pp_restrict(result, window) != window_join:
        raise DialogueError("join reconstruction failed its window re-check")
    return result


def pp_join_all(parts: Sequence[PeriodicPartition]) -> PeriodicPartition:
    acc = parts[0]
    for p in parts[1:]:
        acc = pp_join(acc, p)
    return acc


@lru_cache(maxsize=None)
def pp_working_known_state(pp: PeriodicPartition) -> PeriodicPartition:
    """Working partition under the known-state message function.

    Singleton blocks announce their state and stay singletons; all other
    blocks send the same "unknown" message and merge into a single block,
    which is representable because the non-singleton blocks form a finite
    union of progressions plus a finite set.
    """
    m = pp.modulus
    single_exc = [b for b in pp.exceptional if len(b) == 1]
    single_fams = [f for f in pp.families if len(f) == 1]
    unknown_head: set = set()
    unknown_starts: list[int] = []
    for b in pp.exceptional:
        if len(b) > 1:
            unknown_head.update(b)
    for f in pp.families:
        if len(f) > 1:
            unknown_starts.extend(f)
    for ib in pp.infinite:
        unknown_head.update(ib.head)
        unknown_starts.extend(ib.starts)

    if unknown_starts:
        return pp_build(
            m, single_exc, single_fams, [(unknown_head, unknown_starts)]
        )
    if unknown_head:
        return pp_build(m, single_exc + [frozenset(unknown_head)], single_fams, [])
    return pp_build(m, single_exc, single_fams, [])


# ---------------------------------------------------------------------------
# eventually periodic subsets (used for known-state sets and CK checks)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EPSet:
    """An eventually periodic subset of the naturals, in canonical form.

    The set is head | {x > bound : x mod modulus in residues} with head a
    subset of [1, bound].  ``EPSet.make`` minimizes the modulus and bound,
    so structural equality of canonical instances is set equality.
    """

    bound: int
    head: frozenset
    modulus: int
    residues: frozenset

    def __post_init__(self):
        if any(x < 1 or x > self.bound for x in self.head):
            raise ValueError("head must lie in [1, bound]")

    @staticmethod
    def make(bound: int, head: Iterable[int], modulus: int, residues: Iterable[int]) -> "EPSet":
        head_s = set(head)
        res = frozenset(r % modulus for r in residues)
        for d in range(1, modulus + 1):
            if modulus % d == 0 and frozenset((r + d) % modulus for r in res) == res:
                res = frozenset(r % d for r in res)
                modulus = d
                break
        while bound >= 1:
            tail_member = bound % modulus in res
            if (bound in head_s) == tail_member:
                head_s.discard(bound)
                bound -= 1
            else:
                break
        return EPSet(bound, frozenset(head_s), modulus, res)

    def contains(self, x: int) -> bool:
        if x <= self.bound:
            return x in self.head
        return x % self.modulus in self.residues

    def is_empty(self) -> bool:
        return not self.head and not self.residues

    def _rebase(self, modulus: int, bound: int) -> tuple[frozenset, frozenset]:
        """(head, residues) of the same set described at (modulus, bound)."""
        head = set(self.head)
        head.update(
            x
            for x in range(self.bound + 1, bound + 1)
            if x % self.modulus in self.residues
        )
        residues = frozenset(
            r for r in range(modulus) if r % self.modulus in self.residues
        )
        return frozenset(head), residues

    @staticmethod
    def _aligned(a: "EPSet", b: "EPSet"):
        m = _lcm(a.modulus, b.modulus)
        bound = max(a.bound, b.bound)
        return a._rebase(m, bound), b._rebase(m, bound)

    def intersects(self, other: "EPSet") -> bool:
        (ha, ra), (hb, rb) = EPSet._aligned(self, other)
        return bool(ha & hb) or bool(ra & rb)

    def union(self, other: "EPSet") -> "EPSet":
        m = _lcm(self.modulus, other.modulus)
        bound = max(self.bound, other.bound)
        (ha, ra), (hb, rb) = EPSet._aligned(self, other)
        return EPSet.make(bound, ha | hb, m, ra | rb)

    def issubset(self, other: "EPSet") -> bool:
        (ha, ra), (hb, rb) = EPSet._aligned(self, other)
        return ha <= hb and ra <= rb


def ib_epset(ib: InfiniteBlock, modulus: int) -> EPSet:
    bound = max(ib.head | set(ib.starts))
    head = set(y for y in ib.head)
    for s in ib.starts:
        head.update(range(s, bound + 1, modulus))
    return EPSet.make(bound, head, modulus, (s % modulus for s in ib.starts))


def known_state_set(pp: PeriodicPartition) -> EPSet:
    """The states whose block is a singleton (the agent announces them)."""
    bound = _max_constant(pp)
    head: set = set()
    residues: set = set()
    for b in pp.exceptional:
        if len(b) == 1:
            head.update(b)
    for f in pp.families:
        if len(f) == 1:
            o = min(f)
            head.update(range(o, bound + 1, pp.modulus))
            residues.add(o % pp.modulus)
    return EPSet.make(bound, head, pp.modulus, residues)
