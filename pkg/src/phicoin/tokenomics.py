"""Emission schedule, inflation, fee split and chain capacity figures.

All supply accounting is done in integer base units (1 PHI = 10**8 units);
rates are returned as exact :class:`fractions.Fraction` values.
"""
from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Union

UNITS_PER_PHI = 10**8


@dataclass(frozen=True, order=True)
class AmountPhi:
    """A PHI amount held as an integer count of 1e-8 PHI units."""

    units: int

    @classmethod
    def from_phi(cls, value: Union[int, str, Decimal, Fraction]) -> "AmountPhi":
        if isinstance(value, float):
            raise TypeError("use str or Decimal for fractional PHI amounts")
        exact = Fraction(Decimal(value) if isinstance(value, str) else value) * UNITS_PER_PHI
        if exact.denominator != 1:
            raise ValueError(f"{value} has more than 8 decimal places")
        return cls(int(exact))

    def to_decimal(self) -> Decimal:
        return Decimal(self.units).scaleb(-8)

    def __add__(self, other: "AmountPhi") -> "AmountPhi":
        return AmountPhi(self.units + other.units)

    def __sub__(self, other: "AmountPhi") -> "AmountPhi":
        return AmountPhi(self.units - other.units)

    def __mul__(self, k: int) -> "AmountPhi":
        return AmountPhi(self.units * k)

    __rmul__ = __mul__

    def __str__(self) -> str:
        return f"{self.to_decimal():.8f}"


ZERO = AmountPhi(0)


@dataclass(frozen=True)
class ChainParams:
    block_time_s: int = 15
    blocks_per_day: int = 5_760
    days_per_year: int = 365
    block_size_bytes: int = 4 * 1024 * 1024
    avg_tx_bytes: int = 225
    premine: AmountPhi = AmountPhi(210_240_000 * UNITS_PER_PHI)
    reward_year1: AmountPhi = AmountPhi(5 * UNITS_PER_PHI)
    reward_after: AmountPhi = AmountPhi(250_000_000)
    fee_rate: Fraction = Fraction(5, 100)
    infra_share: Fraction = Fraction(3, 100)
    dev_share: Fraction = Fraction(2, 100)
    staking_cap: AmountPhi = AmountPhi(10_000_000 * UNITS_PER_PHI)
    vram_init_gb: int = 4
    vram_growth: Fraction = Fraction(5, 4)

    @property
    def blocks_per_year(self) -> int:
        return self.blocks_per_day * self.days_per_year


DEFAULT_PARAMS = ChainParams()


def block_reward(height: int, params: ChainParams = DEFAULT_PARAMS) -> AmountPhi:
    if height < 0:
        raise ValueError("height must be non-negative")
    return params.reward_year1 if height < params.blocks_per_year else params.reward_after


def block_reward_for_year(year: int, params: ChainParams = DEFAULT_PARAMS) -> AmountPhi:
    if year < 1:
        raise ValueError("year must be >= 1")
    return params.reward_year1 if year == 1 else params.reward_after


def emission_between(start: int, stop: int, params: ChainParams = DEFAULT_PARAMS) -> AmountPhi:
    """Sum of block rewards for heights in ``[start, stop)``."""
    if not 0 <= start <= stop:
        raise ValueError("need 0 <= start <= stop")
    halving = params.blocks_per_year
    early = max(0, min(stop, halving) - start)
    late = (stop - start) - early
    return params.reward_year1 * early + params.reward_after * late


def supply_at(height: int, params: ChainParams = DEFAULT_PARAMS) -> AmountPhi:
    """Premine plus the rewards of every block below ``height``."""
    return params.premine + emission_between(0, height, params)


def inflation_rate(year: int, params: ChainParams = DEFAULT_PARAMS) -> Fraction:
    """Annual emission divided by end-of-year supply."""
    if year < 1:
        raise ValueError("year must be >= 1")
    bpy = params.blocks_per_year
    end = supply_at(year * bpy, params)
    start = supply_at((year - 1) * bpy, params)
    return Fraction((end - start).units, end.units)


def staking_apr(year: int, total_staked: AmountPhi,
                params: ChainParams = DEFAULT_PARAMS) -> Fraction:
    if total_staked.units <= 0:
        raise ValueError("total_staked must be positive")
    yearly_fees = (Fraction(params.blocks_per_day * params.days_per_year)
                   * block_reward_for_year(year, params).units * params.fee_rate)
    return yearly_fees / total_staked.units


def fee_split(reward: AmountPhi, params: ChainParams = DEFAULT_PARAMS
              ) -> tuple[AmountPhi, AmountPhi, AmountPhi]:
    """Split a reward into (miner, infrastructure, developer) parts.

    Infrastructure and developer parts round down to the unit; the miner part
    takes whatever remains, so the three always sum to ``reward``.
    """
    if reward.units < 0:
        raise ValueError("reward must be non-negative")
    infra = AmountPhi(int(reward.units * params.infra_share))
    dev = AmountPhi(int(reward.units * params.dev_share))
    return reward - infra - dev, infra, dev


def tps(params: ChainParams = DEFAULT_PARAMS) -> float:
    return params.block_size_bytes / params.avg_tx_bytes / params.block_time_s


def vram_requirement(year: int, params: ChainParams = DEFAULT_PARAMS) -> float:
    """Minimum DAG memory in GB, ``year`` counted from 0 at launch."""
    if year < 0:
        raise ValueError("year must be non-negative")
    return float(params.vram_init_gb * params.vram_growth**year)


def emission_table(years: int, params: ChainParams = DEFAULT_PARAMS) -> list[dict]:
    """Yearly rows: reward, emission, end-of-year supply and inflation in percent."""
    if years < 1:
        raise ValueError("years must be >= 1")
    bpy = params.blocks_per_year
    rows = []
    for y in range(1, years + 1):
        rows.append({
            "year": y,
            "block_reward": block_reward_for_year(y, params),
            "annual_emission": emission_between((y - 1) * bpy, y * bpy, params),
            "end_supply": supply_at(y * bpy, params),
            "inflation_pct": inflation_rate(y, params) * 100,
        })
    return rows
