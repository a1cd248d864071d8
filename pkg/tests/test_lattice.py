"""Lattice laws and canonical-form behaviour of finite partitions."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epidialogue import lattice
from epidialogue.errors import CoverageError, EmptyFamilyError, OverlapError, SizeMismatchError
from epidialogue.lattice import (
    Partition,
    all_partitions,
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


def partitions(max_states=6):
    return st.integers(2, max_states).flatmap(
        lambda n: st.lists(
            st.integers(0, n - 1), min_size=n, max_size=n
        ).map(Partition.from_block_ids)
    )


def partition_pairs(max_states=6):
    return st.integers(2, max_states).flatmap(
        lambda n: st.tuples(
            *[
                st.lists(st.integers(0, n - 1), min_size=n, max_size=n).map(
                    Partition.from_block_ids
                )
            ]
            * 2
        )
    )


def partition_triples(max_states=5):
    return st.integers(2, max_states).flatmap(
        lambda n: st.tuples(
            *[
                st.lists(st.integers(0, n - 1), min_size=n, max_size=n).map(
                    Partition.from_block_ids
                )
            ]
            * 3
        )
    )


class TestConstruction:
    def test_from_blocks_direct(self):
        p = partition_from_blocks([[0, 1], [2, 3]], 4)
        assert p.block_id == (0, 0, 1, 1)

    def test_canonical_is_order_independent(self):
        assert partition_from_blocks([[2, 3], [0, 1]], 4).block_id == (0, 0, 1, 1)

    def test_uncovered_state_rejected(self):
        with pytest.raises(CoverageError):
            partition_from_blocks([[0], [1]], 3)

    def test_overlap_rejected(self):
        with pytest.raises(OverlapError):
            partition_from_blocks([[0, 1], [1, 2]], 3)

    def test_non_canonical_labels_rejected(self):
        with pytest.raises(OverlapError):
            Partition(2, (1, 0))

    @given(partitions())
    def test_blocks_round_trip(self, p):
        assert partition_from_blocks(p.blocks(), p.num_states) == p


class TestBlockOf:
    def test_by_construction(self):
        p = partition_from_blocks([[0, 1], [2, 3]], 4)
        assert block_of(p, 1) == {0, 1}

    def test_singleton(self):
        assert block_of(singletons(4), 2) == {2}

    def test_trivial(self):
        assert block_of(trivial(5), 0) == set(range(5))

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            block_of(singletons(3), 3)

    @given(partitions())
    def test_blocks_partition_the_ground_set(self, p):
        seen = set()
        for x in range(p.num_states):
            blk = block_of(p, x)
            assert x in blk
            seen |= blk
        assert seen == set(range(p.num_states))
        for x in range(p.num_states):
            for y in range(p.num_states):
                overlap = block_of(p, x) & block_of(p, y)
                assert (block_of(p, x) == block_of(p, y)) == bool(overlap)


class TestOrder:
    def test_trivial_is_coarsest(self):
        for q in all_partitions(4):
            assert is_coarser(trivial(4), q)

    def test_singletons_are_finest(self):
        assert not is_coarser(singletons(3), trivial(3))

    def test_crossing_pairs_incomparable(self):
        p = partition_from_blocks([[0, 1], [2, 3]], 4)
        q = partition_from_blocks([[0, 2], [1, 3]], 4)
        # brute-force the block-equality implication both ways
        def leq(a, b):
            return all(
                a.same_block(x, y)
                for x in range(4)
                for y in range(4)
                if b.same_block(x, y)
            )

        assert not leq(p, q) and not is_coarser(p, q)
        assert not leq(q, p) and not is_coarser(q, p)

    def test_size_mismatch(self):
        with pytest.raises(SizeMismatchError):
            is_coarser(trivial(3), trivial(4))

    @given(partition_pairs())
    def test_order_matches_brute_force(self, pq):
        p, q = pq
        brute = all(
            p.same_block(x, y)
            for x in range(p.num_states)
            for y in range(p.num_states)
            if q.same_block(x, y)
        )
        assert is_coarser(p, q) == brute


class TestJoinMeet:
    def test_join_crossing(self):
        p = partition_from_blocks([[0, 1], [2, 3]], 4)
        q = partition_from_blocks([[0, 2], [1, 3]], 4)
        assert join(p, q) == singletons(4)

    def test_join_identity_and_idempotence(self):
        for p in all_partitions(4):
            assert join(p, trivial(4)) == p
            assert join(p, p) == p

    def test_meet_crossing(self):
        p = partition_from_blocks([[0, 1], [2, 3]], 4)
        q = partition_from_blocks([[0, 2], [1, 3]], 4)
        assert meet(p, q) == trivial(4)

    def test_meet_identity_and_idempotence(self):
        for p in all_partitions(4):
            assert meet(p, p) == p
            assert meet(p, singletons(4)) == p

    @given(partition_pairs())
    def test_meet_matches_transitive_closure(self, pq):
        p, q = pq
        n = p.num_states
        # brute force: close "same p-block or same q-block" transitively
        reach = [
            {y for y in range(n) if p.same_block(x, y) or q.same_block(x, y)}
            for x in range(n)
        ]
        changed = True
        while changed:
            changed = False
            for x in range(n):
                for y in list(reach[x]):
                    if not reach[y] <= reach[x]:
                        reach[x] |= reach[y]
                        changed = True
        got = meet(p, q)
        for x in range(n):
            assert block_of(got, x) == reach[x]

    @given(partition_pairs())
    def test_commutativity(self, pq):
        p, q = pq
        assert join(p, q) == join(q, p)
        assert meet(p, q) == meet(q, p)

    @given(partition_triples())
    def test_associativity_and_absorption(self, pqr):
        p, q, r = pqr
        assert join(join(p, q), r) == join(p, join(q, r))
        assert meet(meet(p, q), r) == meet(p, meet(q, r))
        assert join(p, meet(p, q)) == p
        assert meet(p, join(p, q)) == p

    @given(partition_pairs())
    def test_order_consistency(self, pq):
        p, q = pq
        assert is_coarser(p, q) == (join(p, q) == q) == (meet(p, q) == p)

    def test_join_all_singleton_family(self):
        p = partition_from_blocks([[0, 1], [2]], 3)
        assert join_all([p]) == p

    def test_meet_all_bottom_absorbs(self):
        p = partition_from_blocks([[0, 1], [2]], 3)
        assert meet_all([trivial(3), p]) == trivial(3)

    def test_empty_family_rejected(self):
        with pytest.raises(EmptyFamilyError):
            join_all([])
        with pytest.raises(EmptyFamilyError):
            meet_all([])

    @given(partition_triples())
    def test_join_all_order_independent(self, pqr):
        results = {join_all(list(perm)) for perm in itertools.permutations(pqr)}
        assert len(results) == 1


class TestCommonKnowledge:
    def test_full_event_always_ck(self):
        profile = (
            partition_from_blocks([[0, 1], [2, 3]], 4),
            partition_from_blocks([[0], [1], [2, 3]], 4),
        )
        for x in range(4):
            assert is_common_knowledge(profile, frozenset(range(4)), x)

    def test_three_state_instance(self):
        # finer agent vs {{x,y},{z}}: the pair event is ck at its members
        profile = (singletons(3), partition_from_blocks([[0, 1], [2]], 3))
        assert is_common_knowledge(profile, frozenset({0, 1}), 0)

    def test_meet_escapes_small_event(self):
        profile = (singletons(2), trivial(2))
        assert not is_common_knowledge(profile, frozenset({0}), 0)

    @given(partition_pairs(max_states=5))
    def test_monotone_in_the_event(self, pq):
        profile = list(pq)
        n = pq[0].num_states
        for x in range(n):
            for mask in range(2 ** n):
                e = frozenset(i for i in range(n) if mask >> i & 1)
                if is_common_knowledge(profile, e, x):
                    bigger = e | {min((x + 1) % n, n - 1)}
                    assert is_common_knowledge(profile, bigger, x)
                    break


def test_all_partitions_counts():
    # Bell numbers 1, 2, 5, 15
    assert len(all_partitions(1)) == 1
    assert len(all_partitions(2)) == 2
    assert len(all_partitions(3)) == 5
    assert len(all_partitions(4)) == 15
