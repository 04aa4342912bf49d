"""Named parameter sets: ``mainnet`` (4 GiB initial DAG) and the 1 MiB ``desk`` profile."""
from __future__ import annotations

from dataclasses import dataclass

from .epoch import DESK, MAINNET, SizeProfile
from .tokenomics import DEFAULT_PARAMS, ChainParams


@dataclass(frozen=True)
class Profile:
    name: str
    size: SizeProfile
    chain: ChainParams = DEFAULT_PARAMS


PROFILES = {
    "mainnet": Profile("mainnet", MAINNET),
    "desk": Profile("desk", DESK),
}


def get_profile(name: str) -> Profile:
    try:
        return PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown profile {name!r}; choose from {sorted(PROFILES)}") from None
