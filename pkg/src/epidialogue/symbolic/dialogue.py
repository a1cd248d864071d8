"""Transfinite dialogues over eventually-periodic partitions of the naturals.

The update rule is the same as in the finite engine, computed symbolically
with the known-state message function (the only family whose working
partitions provably keep the class of eventually-periodic partitions
closed).  Successor stages iterate the update; when a whole window of
successors passes without reaching a fixed point, the runner looks for a
shift certificate: a stage period p and state shift s such that consecutive
certified stages agree on a growing settled prefix and the structure above
it repeats translated by s.  A verified certificate licenses constructive
computation of the limit stage -- the join of all previous stages -- after
which the ordinal clock advances to the next multiple of w and successor
stages resume.  Runs abort honestly (NoCertificateError) on scenarios whose
self-similarity the detector cannot establish.

Every limit construction is re-verified against the observed history, and
the truncation oracle independently replays the dialogue on a light-cone
padded finite ground set and compares the stages window by window.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .. import engine as finite_engine
from .. import lattice
from ..commgraph import CommGraph, senders
from ..errors import (
    CertificateError,
    DialogueError,
    MismatchError,
    NoCertificateError,
    OrdinalBudgetError,
    ValidationError,
)
from ..messages import UNKNOWN, KnownState, state_token
from ..ordinals import Ordinal
from ..trace import INITIAL, LIMIT, SUCCESSOR, DialogueTrace, StageRecord
from . import periodic
from .periodic import (
    EPSet,
    InfiniteBlock,
    PeriodicPartition,
    _component_span,
    _finite_component_span,
    _ib_elements_upto,
    _lcm,
    _max_constant,
    blocks_in_window,
    block_min_keys,
    ib_epset,
    known_state_set,
    pp_block_of,
    pp_build,
    pp_equal,
    pp_is_singleton_at,
    pp_join,
    pp_restrict,
    pp_validate,
    pp_working_known_state,
)

SUCCESSOR_WINDOW = 32     # successor stages per block before a limit attempt
PERIOD_MAX = 8            # largest stage period searched
SHIFT_MULT_MAX = 8        # state shifts s = m, 2m, ..., 8m
BASE_MAX = 12             # earliest stages tried as certificate base
LIMIT_JUMPS_MAX = 16      # ordinal support stays below w*16

SymbolicProfile = tuple[PeriodicPartition, ...]


@dataclass(frozen=True)
class SymbolicScenario:
    """Known-state dialogue over the naturals."""

    agents: tuple[str, ...]
    initial: SymbolicProfile
    graph: CommGraph
    true_state: Optional[int] = None

    def __post_init__(self):
        n = len(self.agents)
        if n < 2:
            raise ValidationError("at least two agents required")
        if len(self.initial) != n or self.graph.num_agents != n:
            raise ValidationError("profile / graph / agent-list sizes disagree")
        if self.true_state is not None and self.true_state < 1:
            raise ValidationError("true_state must be a natural >= 1")


@dataclass(frozen=True)
class ShiftCertificate:
    """Observed self-similarity of the successor dynamics.

    For every certified pair (base + k*p, base + (k+1)*p) and every agent,
    the two stage partitions agree on [1, settled_bound + k*state_shift]
    and x -> x + state_shift maps the blocks lying wholly above that bound
    onto the later stage's blocks lying wholly above it plus the shift.
    """

    base_stage: int
    stage_period: int
    state_shift: int
    settled_bound: int


def profiles_equal(a: SymbolicProfile, b: SymbolicProfile) -> bool:
    return len(a) == len(b) and all(pp_equal(x, y) for x, y in zip(a, b))


def symbolic_apply_g(profile: SymbolicProfile, graph: CommGraph) -> SymbolicProfile:
    """One simultaneous round: join with the working partitions of all senders."""
    ws = [pp_working_known_state(p) for p in profile]
    out = []
    for i, p in enumerate(profile):
        incoming = senders(graph, i)
        if not incoming:
            out.append(p)
            continue
        acc = p
        for j in sorted(incoming):
            acc = pp_join(acc, ws[j])
        out.append(acc)
    return tuple(out)


def symbolic_consensus(profile: SymbolicProfile) -> bool:
    """All agents announce the same message function.

    Under known-state messaging two agents send identical messages at every
    state iff they have the same set of singleton blocks, which is exactly
    equality of their working partitions.
    """
    ws = [pp_working_known_state(p) for p in profile]
    return all(pp_equal(ws[0], w) for w in ws[1:])


def symbolic_message_at(pp: PeriodicPartition, x: int):
    return state_token(x) if pp_is_singleton_at(pp, x) else UNKNOWN


def symbolic_partial_consensus(profile: SymbolicProfile, x: int) -> bool:
    sent = {symbolic_message_at(p, x) for p in profile}
    return len(sent) == 1


# ---------------------------------------------------------------------------
# common knowledge of the sent message profile at a state
# ---------------------------------------------------------------------------


def _lifted_components(pp: PeriodicPartition, big_l: int):
    """Components re-expressed at modulus big_l: (finite blocks, families, infinite sets)."""
    step = big_l // pp.modulus
    finite = list(pp.exceptional)
    families = []
    for offs in pp.families:
        for t in range(step):
            families.append(frozenset(o + pp.modulus * t for o in offs))
    infinite = [ib_epset(ib, pp.modulus) for ib in pp.infinite]
    return finite, families, infinite


def _family_tail(offs: frozenset, big_l: int, from_k: int) -> EPSet:
    """Union of the family's instances k >= from_k, as an EPSet."""
    bound = max(offs) + big_l * from_k
    head = set()
    for o in offs:
        head.update(range(o + big_l * from_k, bound + 1, big_l))
    return EPSet.make(bound, head, big_l, (o % big_l for o in offs))


def _block_epset(descriptor, modulus: int, big_l: int) -> EPSet:
    if isinstance(descriptor, InfiniteBlock):
        return ib_epset(descriptor, modulus)
    return EPSet.make(max(descriptor), descriptor, big_l, ())


def _tail_has_class(comp: EPSet, value: int) -> bool:
    """Does comp's tail contain the whole class value + big_l*k beyond its bound?

    comp is canonical, so its modulus divides the closure modulus and the
    class membership is decided by value mod comp.modulus.
    """
    return value % comp.modulus in comp.residues


def _closure_is_closed(comp: EPSet, all_components, big_l: int) -> bool:
    for finite, families, infinite in all_components:
        for blk in finite:
            inside = [comp.contains(e) for e in blk]
            if any(inside) and not all(inside):
                return False
        for eps in infinite:
            if eps.intersects(comp) and not eps.issubset(comp):
                return False
        for offs in families:
            matches = [_tail_has_class(comp, o) for o in offs]
            if any(matches) and not all(matches):
                return False
            k = 0
            while min(offs) + big_l * k <= comp.bound + 2 * big_l:
                inst = [o + big_l * k for o in offs]
                inside = [comp.contains(e) for e in inst]
                if any(inside) and not all(inside):
                    return False
                k += 1
    return True


def meet_block_of(profile: SymbolicProfile, x: int, max_passes: Optional[int] = None) -> EPSet:
    """The block containing x of the meet of all agents' partitions.

    Computed as the closure of {x} under "same block for some agent".
    Cascades that run off to infinity are resolved by detecting a
    periodically shifting frontier, extrapolating it, and verifying the
    extrapolated set is closed under every agent's block relation.
    """
    big_l = 1
    for p in profile:
        big_l = _lcm(big_l, p.modulus)
    comps = [_lifted_components(p, big_l) for p in profile]
    h_star = max(_max_constant(p) + _component_span(p) for p in profile) + big_l

    comp = EPSet.make(x, {x}, big_l, ())
    for p in profile:
        comp = comp.union(_block_epset(pp_block_of(p, x), p.modulus, big_l))

    if max_passes is None:
        max_passes = 64 + h_star // big_l
    snapshots: list[EPSet] = [comp]

    for _ in range(max_passes):
        changed = False
        for finite, families, infinite in comps:
            for blk in finite:
                if any(comp.contains(e) for e in blk) and not all(
                    comp.contains(e) for e in blk
                ):
                    comp = comp.union(EPSet.make(max(blk), blk, big_l, ()))
                    changed = True
            for eps in infinite:
                if eps.intersects(comp) and not eps.issubset(comp):
                    comp = comp.union(eps)
                    changed = True
            for offs in families:
                matching = [o for o in offs if _tail_has_class(comp, o)]
                if matching:
                    k_star = min(
                        max(0, -(-(comp.bound + 1 - o) // big_l)) for o in matching
                    )
                    tail = _family_tail(offs, big_l, k_star)
                    if not tail.issubset(comp):
                        comp = comp.union(tail)
                        changed = True
                else:
                    k_star = (
                        (comp.bound - min(offs)) // big_l + 1
                        if comp.bound >= min(offs)
                        else 0
                    )
                # instances below the tail threshold, checked explicitly
                for k in range(k_star):
                    inst = frozenset(o + big_l * k for o in offs)
                    if any(comp.contains(e) for e in inst) and not all(
                        comp.contains(e) for e in inst
                    ):
                        comp = comp.union(EPSet.make(max(inst), inst, big_l, ()))
                        changed = True
        if not changed:
            return comp
        snapshots.append(comp)
        ext = _try_frontier_extrapolation(snapshots, big_l, h_star, comps)
        if ext is not None:
            return ext
    raise DialogueError("meet-block closure did not stabilize within its pass budget")


def _try_frontier_extrapolation(snapshots, big_l, h_star, comps) -> Optional[EPSet]:
    if len(snapshots) < 4:
        return None
    s0, s1, s2, s3 = snapshots[-4:]
    if not (s0.residues == s1.residues == s2.residues == s3.residues):
        return None
    d1 = set(s1.head) - set(s0.head)
    d2 = set(s2.head) - set(s1.head)
    d3 = set(s3.head) - set(s2.head)
    if not d1 or d2 != {e + big_l for e in d1} or d3 != {e + big_l for e in d2}:
        return None
    if min(d1) <= h_star:
        return None
    new_residues = {
        r for r in range(big_l) if _tail_has_class(s3, r)
    } | {e % big_l for e in d3}
    ext = EPSet.make(s3.bound, s3.head, big_l, new_residues)
    if _closure_is_closed(ext, comps, big_l):
        return ext
    return None


def symbolic_messages_ck(profile: SymbolicProfile, x: int) -> bool:
    """Is the profile of messages sent at x common knowledge at x?

    With known-state messaging the sent-message event at x is {x} when
    everyone knows x, and the intersection of the "unknown" events
    otherwise; the meet-block of x must lie inside it.
    """
    knows = [pp_is_singleton_at(p, x) for p in profile]
    if all(knows):
        return True
    if any(knows):
        return False
    known_sets = [known_state_set(p) for p in profile]
    comp = meet_block_of(profile, x)
    return not any(comp.intersects(k) for k in known_sets)


# ---------------------------------------------------------------------------
# shift certificates
# ---------------------------------------------------------------------------


def _grouping_agreement_bound(pa: PeriodicPartition, pb: PeriodicPartition, hi: int) -> int:
    """Largest D <= hi with equal block structure of the two restrictions to [1, D]."""
    ka = block_min_keys(pa, hi)
    kb = block_min_keys(pb, hi)
    canon_a: dict[int, int] = {}
    canon_b: dict[int, int] = {}
    for x in range(hi):
        la = canon_a.setdefault(ka[x], len(canon_a))
        lb = canon_b.setdefault(kb[x], len(canon_b))
        if la != lb:
            return x
    return hi


def _above_blocks_shift_ok(
    pa: PeriodicPartition, pb: PeriodicPartition, d: int, s: int, hi: int
) -> bool:
    """Does x -> x+s map pa's blocks wholly above d onto pb's blocks wholly above d+s?

    Decided on [1, hi]; callers must leave at least two joint periods of
    room above d+s.
    """
    ka = block_min_keys(pa, hi)
    kb = block_min_keys(pb, hi)
    ua = [x for x in range(d + 1, hi - s + 1) if ka[x - 1] > d]
    ub = [y for y in range(d + s + 1, hi + 1) if kb[y - 1] > d + s]
    if [x + s for x in ua] != ub:
        return False
    canon_a: dict[int, int] = {}
    canon_b: dict[int, int] = {}
    for x in ua:
        la = canon_a.setdefault(ka[x - 1], len(canon_a))
        lb = canon_b.setdefault(kb[x + s - 1], len(canon_b))
        if la != lb:
            return False
    return True


def _pair_window(pa: PeriodicPartition, pb: PeriodicPartition, s: int) -> int:
    big_l = _lcm(pa.modulus, pb.modulus)
    span = max(_component_span(pa), _component_span(pb))
    base = max(_max_constant(pa) + _component_span(pa), _max_constant(pb) + _component_span(pb))
    return base + span + 2 * big_l + s + 8


def _pair_certifies(
    prof_a: SymbolicProfile, prof_b: SymbolicProfile, d: int, s: int
) -> bool:
    for pa, pb in zip(prof_a, prof_b):
        hi = max(_pair_window(pa, pb, s), d + s + 2 * _lcm(pa.modulus, pb.modulus) + 8)
        if _grouping_agreement_bound(pa, pb, min(d, hi)) < d:
            return False
        if not _above_blocks_shift_ok(pa, pb, d, s, hi):
            return False
    return True


def detect_shift_certificate(history: Sequence[SymbolicProfile]) -> Optional[ShiftCertificate]:
    """Search the observed successor history for a verified self-similarity.

    Periods, shifts and base stages are tried in ascending order; a
    candidate must certify every consecutive pair (base + k*p,
    base + (k+1)*p) available in the history, with the settled bound
    advancing by the state shift per period.  Returns None for histories
    already at a fixed point or without a certificate within the bounds.
    """
    if len(history) < 4:
        raise ValidationError("certificate detection needs >= 4 consecutive stages")
    top = len(history) - 1
    if profiles_equal(history[top], history[top - 1]):
        return None
    m = 1
    for p in history[top]:
        m = _lcm(m, p.modulus)

    for period in range(1, PERIOD_MAX + 1):
        for mult in range(1, SHIFT_MULT_MAX + 1):
            shift = m * mult
            for base in range(1, min(BASE_MAX, top - 2 * period) + 1):
                cert = _try_chain(history, base, period, shift)
                if cert is not None:
                    return cert
    return None


def _try_chain(
    history: Sequence[SymbolicProfile], base: int, period: int, shift: int
) -> Optional[ShiftCertificate]:
    top = len(history) - 1
    pairs = (top - base) // period
    if pairs < 2:
        return None
    first, second = history[base], history[base + period]
    d_hi = None
    for pa, pb in zip(first, second):
        hi = _pair_window(pa, pb, shift)
        bound = _grouping_agreement_bound(pa, pb, hi)
        d_hi = bound if d_hi is None else min(d_hi, bound)
    scan_floor = max(-1, d_hi - 4 * shift - 8)
    for d in range(d_hi, scan_floor, -1):
        ok = True
        for k in range(pairs):
            if not _pair_certifies(
                history[base + k * period],
                history[base + (k + 1) * period],
                d + k * shift,
                shift,
            ):
                ok = False
                break
        if ok:
            return ShiftCertificate(base, period, shift, d)
    return None


# ---------------------------------------------------------------------------
# limit stages
# ---------------------------------------------------------------------------


def _stationary_infinite(top: PeriodicPartition, prev: PeriodicPartition) -> list[InfiniteBlock]:
    prev_sets = [ib_epset(ib, prev.modulus) for ib in prev.infinite]
    kept = []
    for ib in top.infinite:
        eps = ib_epset(ib, top.modulus)
        if any(eps.issubset(q) and q.issubset(eps) for q in prev_sets):
            kept.append(ib)
    return kept


def limit_profile(
    history: Sequence[SymbolicProfile], cert: ShiftCertificate
) -> SymbolicProfile:
    """The join of all stages, constructed from the certificate's settled prefixes.

    Every state is settled once the refinement frontier (advancing
    state_shift states per stage_period stages) passes it, so the limit
    agrees with stage base + k*p on [1, settled_bound + k*shift]; the
    periodic pattern is read off the last certified stage and the infinite
    blocks that stayed constant over the last period are carried over.
    The construction is verified against every certified stage before it
    is returned.
    """
    top_idx = len(history) - 1
    k_count = (top_idx - cert.base_stage) // cert.stage_period
    t_top = cert.base_stage + k_count * cert.stage_period
    d_top = cert.settled_bound + k_count * cert.state_shift
    out = []
    for agent in range(len(history[0])):
        top = history[t_top][agent]
        prev = history[t_top - cert.stage_period][agent]
        m_lim = _lcm(cert.state_shift, top.modulus)
        # limit blocks inside finite stage blocks inherit their diameter;
        # the settled prefixes of infinite blocks never straddle the window
        span_top = _finite_component_span(top)
        readable = d_top - span_top - 1
        if cert.settled_bound + m_lim + span_top + 1 > readable:
            raise CertificateError("history too short to read the limit pattern")
        kept = _stationary_infinite(top, prev)
        kept_traces = {
            frozenset(_ib_elements_upto(ib, top.modulus, readable)) for ib in kept
        }
        exceptional, families = [], []
        for wb in blocks_in_window(top, readable):
            fs = frozenset(wb)
            if fs in kept_traces:
                continue
            if min(wb) <= cert.settled_bound:
                exceptional.append(fs)
            elif min(wb) <= cert.settled_bound + m_lim:
                families.append(fs)
        step = m_lim // top.modulus
        lifted = [
            (ib.head, [s + top.modulus * t for s in ib.starts for t in range(step)])
            for ib in kept
        ]
        cand = pp_build(m_lim, exceptional, families, lifted)
        pp_validate(cand)
        for k in range(k_count + 1):
            d_k = cert.settled_bound + k * cert.state_shift
            if d_k < 1:
                continue
            stage = history[cert.base_stage + k * cert.stage_period][agent]
            if pp_restrict(cand, d_k) != pp_restrict(stage, d_k):
                raise CertificateError(
                    f"limit candidate disagrees with certified stage on [1, {d_k}]"
                )
        if not pp_equal(pp_join(cand, top), cand):
            raise CertificateError("limit candidate does not refine the last stage")
        out.append(cand)
    return tuple(out)


# ---------------------------------------------------------------------------
# the transfinite runner
# ---------------------------------------------------------------------------


def _stage_record(
    sc: SymbolicScenario, profile: SymbolicProfile, ordinal: Ordinal, kind: str
) -> StageRecord:
    x = sc.true_state
    return StageRecord(
        ordinal=ordinal,
        kind=kind,
        partitions=profile,
        message_vectors=None,
        true_state_messages=None
        if x is None
        else tuple(symbolic_message_at(p, x) for p in profile),
        consensus=symbolic_consensus(profile),
        partial_consensus=None if x is None else symbolic_partial_consensus(profile, x),
        messages_ck=None if x is None else symbolic_messages_ck(profile, x),
        fixed_point=False,
    )


def run_transfinite(
    sc: SymbolicScenario, ordinal_budget: Optional[Ordinal] = None
) -> DialogueTrace:
    """Run the dialogue, taking verified limit jumps, until a fixed point.

    Raises OrdinalBudgetError when the next needed stage lies beyond the
    budget (or beyond w*16, the engine's ordinal support), and
    NoCertificateError when a successor window passes without a fixed
    point and no shift certificate can be verified.
    """
    if ordinal_budget is not None and ordinal_budget.limits >= LIMIT_JUMPS_MAX:
        raise ValidationError(f"ordinal budget must stay below w*{LIMIT_JUMPS_MAX}")

    def ensure(o: Ordinal):
        if o.limits >= LIMIT_JUMPS_MAX:
            raise OrdinalBudgetError(f"stage {o} beyond the engine's ordinal support")
        if ordinal_budget is not None and o > ordinal_budget:
            raise OrdinalBudgetError(f"stage {o} beyond budget {ordinal_budget}")

    records: list[StageRecord] = []
    profile = sc.initial
    ordinal = Ordinal(0, 0)
    records.append(_stage_record(sc, profile, ordinal, INITIAL))
    block_history: list[SymbolicProfile] = [profile]

    while True:
        nxt = symbolic_apply_g(profile, sc.graph)
        if profiles_equal(nxt, profile):
            records[-1] = replace(records[-1], fixed_point=True)
            return DialogueTrace(tuple(records))
        if len(block_history) > SUCCESSOR_WINDOW:
            cert = detect_shift_certificate(block_history)
            if cert is None:
                raise NoCertificateError(
                    "no fixed point in the successor window and no shift certificate"
                )
            try:
                limit = limit_profile(block_history, cert)
            except CertificateError as exc:
                raise NoCertificateError(str(exc)) from exc
            ordinal = ordinal.next_limit()
            ensure(ordinal)
            records.append(_stage_record(sc, limit, ordinal, LIMIT))
            profile = limit
            block_history = [limit]
            continue
        ordinal = ordinal.successor()
        ensure(ordinal)
        records.append(_stage_record(sc, nxt, ordinal, SUCCESSOR))
        profile = nxt
        block_history.append(nxt)


# ---------------------------------------------------------------------------
# truncation oracle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OracleReport:
    window: int
    stages: int
    ground_size: int
    agreements: tuple[bool, ...]

    @property
    def all_agree(self) -> bool:
        return all(self.agreements)


def _finite_window_partition(p, window: int):
    return lattice.Partition.from_block_ids(p.block_id[:window])


def compare_stage_lists(
    symbolic_stages: Sequence[SymbolicProfile],
    finite_stages,
    window: int,
    strict: bool = True,
) -> list[bool]:
    """Per-stage block agreement of symbolic and finite profiles on [1, window]."""
    results = []
    for t, (sym, fin) in enumerate(zip(symbolic_stages, finite_stages)):
        ok = True
        for agent, (sp, fp) in enumerate(zip(sym, fin)):
            if pp_restrict(sp, window) != _finite_window_partition(fp, window):
                ok = False
                if strict:
                    raise MismatchError(
                        f"stage {t}, agent {agent}: symbolic and truncated runs "
                        f"disagree on [1, {window}]"
                    )
        results.append(ok)
    return results


def truncation_oracle(
    sc: SymbolicScenario, window: int, stages: int
) -> OracleReport:
    """Replay the first `stages` successor stages on a truncated ground set.

    The finite run uses N = window + c*stages states with c = (largest
    initial component diameter + lcm of the moduli): boundary artifacts
    travel at most c states per stage, so they cannot reach the reporting
    window.  Disagreement raises MismatchError and indicates a bug in the
    symbolic engine.
    """
    moduli_lcm = 1
    for p in sc.initial:
        moduli_lcm = _lcm(moduli_lcm, p.modulus)
    c = max(_component_span(p) for p in sc.initial) + moduli_lcm
    ground = window + c * stages

    symbolic_stages = [sc.initial]
    for _ in range(stages):
        symbolic_stages.append(symbolic_apply_g(symbolic_stages[-1], sc.graph))

    finite_profile = tuple(pp_restrict(p, ground) for p in sc.initial)
    finite_stages = [finite_profile]
    mf = KnownState()
    for _ in range(stages):
        finite_stages.append(
            finite_engine.apply_g(finite_stages[-1], sc.graph, mf)
        )

    agreements = compare_stage_lists(symbolic_stages, finite_stages, window)
    return OracleReport(
        window=window, stages=stages, ground_size=ground, agreements=tuple(agreements)
    )
