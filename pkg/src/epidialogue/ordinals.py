"""Ordinal stage labels below omega^2, written w*a + b."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError

_FINITE = re.compile(r"^\d+$")
_GENERAL = re.compile(r"^w\*(\d+)\+(\d+)$")


@dataclass(frozen=True, order=True)
class Ordinal:
    """The ordinal w*limits + steps; ordered lexicographically."""

    limits: int
    steps: int

    def __post_init__(self):
        if self.limits < 0 or self.steps < 0:
            raise ValueError("ordinal parts must be non-negative")

    @property
    def is_limit(self) -> bool:
        return self.limits > 0 and self.steps == 0

    def successor(self) -> "Ordinal":
        return Ordinal(self.limits, self.steps + 1)

    def next_limit(self) -> "Ordinal":
        return Ordinal(self.limits + 1, 0)

    def __str__(self) -> str:
        if self.limits == 0:
            return str(self.steps)
        return f"w*{self.limits}+{self.steps}"


def parse_ordinal(text: str) -> Ordinal:
    """Parse "w*a+b", or plain "b" for finite ordinals."""
    text = text.strip()
    if _FINITE.match(text):
        return Ordinal(0, int(text))
    m = _GENERAL.match(text)
    if m:
        return Ordinal(int(m.group(1)), int(m.group(2)))
    raise ParseError(f"cannot parse ordinal {text!r} (expected \"b\" or \"w*a+b\")")
