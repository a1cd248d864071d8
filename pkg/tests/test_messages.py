"""Message functions, working partitions, and union consistency."""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from epidialogue.errors import (
    EmptyBlockError,
    SizeLimitError,
    ZeroMassBlockError,
)
from epidialogue.lattice import Partition, is_coarser, partition_from_blocks, singletons, trivial
from epidialogue.messages import (
    ExpectedValue,
    Injective,
    KnownState,
    LookupTable,
    Maximin,
    Posterior,
    check_union_consistency,
    evaluate,
    lookup_from_dict,
    message_vector,
    state_guessing_utility,
    working_partition,
)


def fs(*xs):
    return frozenset(xs)


def all_blocks(n):
    out = []
    for mask in range(1, 2 ** n):
        out.append(frozenset(i for i in range(n) if mask >> i & 1))
    return out


def remark_function():
    """f({x}) = f({x,y}) = a, everything else b, over states x,y,w,z = 0..3."""
    table = {blk: "b" for blk in all_blocks(4)}
    table[fs(0)] = "a"
    table[fs(0, 1)] = "a"
    return lookup_from_dict(4, table)


def two_state_break():
    """f({x}) = f({y}) = a but f({x,y}) = b: not union consistent."""
    return lookup_from_dict(2, {fs(0): "a", fs(1): "a", fs(0, 1): "b"})


def three_state_break():
    """f({x}) = f({y}) = a, f({z}) = f({x,y}) = b, rest b."""
    table = {blk: "b" for blk in all_blocks(3)}
    table[fs(0)] = "a"
    table[fs(1)] = "a"
    return lookup_from_dict(3, table)


class TestEvaluate:
    def test_known_state_singleton(self):
        assert evaluate(KnownState(), fs(4)) == "state:4"

    def test_known_state_unsure(self):
        assert evaluate(KnownState(), fs(3, 4)) == "unknown"

    def test_empty_block_rejected(self):
        with pytest.raises(EmptyBlockError):
            evaluate(KnownState(), frozenset())

    def test_state_guessing_matches_its_name(self):
        # states displayed 1..N: block {5} is index set {4}, chosen action 5
        mf = state_guessing_utility(12)
        assert evaluate(mf, fs(4)) == 5
        assert evaluate(mf, fs(2, 3)) == 0

    def test_state_guessing_mirrors_known_state_blockwise(self):
        mf = state_guessing_utility(6)
        ks = KnownState()
        for blk in all_blocks(6):
            action = evaluate(mf, blk)
            token = evaluate(ks, blk)
            assert (action == 0) == (token == "unknown")

    def test_posterior_exact(self):
        mf = Posterior(prior=tuple([Fraction(1, 4)] * 4), event=fs(0, 1))
        assert evaluate(mf, fs(0, 2)) == Fraction(1, 2)

    def test_posterior_zero_mass(self):
        mf = Posterior(prior=(Fraction(0), Fraction(1)), event=fs(0))
        with pytest.raises(ZeroMassBlockError):
            evaluate(mf, fs(0))

    def test_expected_value_mean(self):
        mf = ExpectedValue(payoffs=(Fraction(1), Fraction(2), Fraction(4)))
        assert evaluate(mf, fs(0, 2)) == Fraction(5, 2)

    def test_injective_tokens_distinct(self):
        mf = Injective()
        seen = {evaluate(mf, blk) for blk in all_blocks(5)}
        assert len(seen) == 2 ** 5 - 1

    def test_floats_rejected(self):
        with pytest.raises(ValueError):
            Posterior(prior=(0.5, 0.5), event=fs(0))
        with pytest.raises(ValueError):
            lookup_from_dict(1, {fs(0): 0.5})

    def test_lookup_requires_all_blocks(self):
        with pytest.raises(ValueError):
            LookupTable(num_states=2, entries=((fs(0), "a"),))

    def test_lookup_size_limit(self):
        with pytest.raises(SizeLimitError):
            LookupTable(num_states=13, entries=())


class TestMessageVector:
    def test_known_state_vector(self):
        p = partition_from_blocks([[0], [1, 2]], 3)
        assert message_vector(KnownState(), p) == ("state:0", "unknown", "unknown")

    def test_remark_vector_on_pair_partition(self):
        p = partition_from_blocks([[0, 1], [2, 3]], 4)
        assert message_vector(remark_function(), p) == ("a", "a", "b", "b")

    def test_constant_on_trivial_partition(self):
        vec = message_vector(Injective(), trivial(5))
        assert len(set(vec)) == 1

    @given(st.integers(2, 6), st.data())
    def test_like_mindedness(self, n, data):
        labels = data.draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
        p = Partition.from_block_ids(labels)
        mf = Posterior(prior=tuple([Fraction(1, n)] * n), event=fs(0))
        assert message_vector(mf, p) == message_vector(mf, Partition.from_block_ids(labels))


class TestWorkingPartition:
    def test_remark_pairs_stay(self):
        p = partition_from_blocks([[0, 1], [2, 3]], 4)
        assert working_partition(remark_function(), p) == p

    def test_remark_singletons_coarsen(self):
        w = working_partition(remark_function(), singletons(4))
        assert w == partition_from_blocks([[0], [1, 2, 3]], 4)

    def test_break_function_collapses_everything(self):
        assert working_partition(two_state_break(), singletons(2)) == trivial(2)

    def test_three_state_instance(self):
        assert working_partition(three_state_break(), singletons(3)) == partition_from_blocks(
            [[0, 1], [2]], 3
        )
        assert working_partition(
            three_state_break(), partition_from_blocks([[0, 1], [2]], 3)
        ) == trivial(3)

    @given(st.integers(2, 6), st.data())
    def test_always_coarser(self, n, data):
        labels = data.draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
        p = Partition.from_block_ids(labels)
        for mf in (KnownState(), Injective(), state_guessing_utility(n)):
            assert is_coarser(working_partition(mf, p), p)

    @given(st.integers(2, 6), st.data())
    def test_injective_is_identity(self, n, data):
        labels = data.draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
        p = Partition.from_block_ids(labels)
        assert working_partition(Injective(), p) == p


class TestUnionConsistency:
    def test_known_state_holds(self):
        assert check_union_consistency(KnownState(), 6).status == "holds"

    def test_two_state_break_witness(self):
        verdict = check_union_consistency(two_state_break(), 2)
        assert verdict.status == "fails"
        assert verdict.witness == (fs(0), fs(1))

    def test_posterior_uniform_holds(self):
        mf = Posterior(prior=tuple([Fraction(1, 4)] * 4), event=fs(0, 1))
        assert check_union_consistency(mf, 4).status == "holds"

    def test_builtin_families_hold_exhaustively(self):
        for n in range(2, 9):
            assert check_union_consistency(KnownState(), n).holds
            assert check_union_consistency(Injective(), n).holds
            assert check_union_consistency(state_guessing_utility(n), n).holds
        for n in (2, 4, 6, 8):
            prior = tuple(Fraction(k + 1, (n * (n + 1)) // 2) for k in range(n))
            assert check_union_consistency(Posterior(prior=prior, event=fs(0, n - 1)), n).holds
            payoffs = tuple(Fraction((-1) ** k * (k + 2), 3) for k in range(n))
            assert check_union_consistency(ExpectedValue(payoffs=payoffs), n).holds

    def test_sampled_mode_beyond_limit(self):
        verdict = check_union_consistency(KnownState(), 13)
        assert verdict.status == "sampled"
        assert verdict.holds
