"""Symbolic engine: eventually-periodic partitions of the naturals and
transfinite dialogues with ordinal stage labels below w^2."""

from .periodic import (
    EPSet,
    InfiniteBlock,
    PeriodicPartition,
    pp_block_of,
    pp_build,
    pp_equal,
    pp_join,
    pp_restrict,
    pp_singletons,
    pp_trivial,
    pp_validate,
    pp_working_known_state,
)
from .dialogue import (
    ShiftCertificate,
    SymbolicScenario,
    detect_shift_certificate,
    limit_profile,
    run_transfinite,
    symbolic_apply_g,
    symbolic_consensus,
    truncation_oracle,
)

__all__ = [name for name in dir() if not name.startswith("_")]
