"""PCG32 generator driving every mixing schedule.

The constructor copies ``initstate``/``initseq`` verbatim. Unlike the
canonical ``pcg32_srandom_r`` there is no seeding advance, so
``Pcg32(0, 0)()`` returns 0.
"""
from __future__ import annotations

from dataclasses import dataclass

MASK32 = 0xFFFF_FFFF
MASK64 = 0xFFFF_FFFF_FFFF_FFFF
MULTIPLIER = 6364136223846793005


@dataclass(frozen=True)
class Pcg32State:
    state: int
    inc: int


def pcg32_new(initstate: int, initseq: int) -> Pcg32State:
    return Pcg32State(initstate & MASK64, initseq & MASK64)


def pcg32_next(s: Pcg32State) -> tuple[int, Pcg32State]:
    """Return ``(output, next_state)`` without mutating ``s``."""
    old = s.state
    new = (old * MULTIPLIER + (s.inc | 1)) & MASK64
    xorshifted = (((old >> 18) ^ old) >> 27) & MASK32
    rot = old >> 59
    out = ((xorshifted >> rot) | (xorshifted << ((32 - rot) & 31))) & MASK32
    return out, Pcg32State(new, s.inc)


class Pcg32:
    """Mutable stream wrapper; calling the instance yields the next 32-bit word."""

    __slots__ = ("state", "inc")

    def __init__(self, initstate: int, initseq: int):
        self.state = initstate & MASK64
        self.inc = initseq & MASK64

    def __call__(self) -> int:
        old = self.state
        self.state = (old * MULTIPLIER + (self.inc | 1)) & MASK64
        xorshifted = (((old >> 18) ^ old) >> 27) & MASK32
        rot = old >> 59
        return ((xorshifted >> rot) | (xorshifted << ((32 - rot) & 31))) & MASK32

    def draws(self, n: int) -> list[int]:
        return [self() for _ in range(n)]

    def below(self, bound: int) -> int:
        # plain modulo; the bias is irrelevant for register/op selection
        return self() % bound

    def snapshot(self) -> Pcg32State:
        return Pcg32State(self.state, self.inc)
