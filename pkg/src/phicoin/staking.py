"""Staking pool accounting: capped deposits, 90-day lock, weekly fee payouts.

The pool is funded from the 5% fee stream of each block reward. A settlement
period normally spans one week of blocks; positions earn only for periods they
were deposited for in full, and are paid pro rata to the stake eligible in that
period. Payouts round down to the unit and the remainder carries forward.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .tokenomics import DEFAULT_PARAMS, ZERO, AmountPhi, ChainParams, emission_between

LOCK_DAYS = 90
WEEK_DAYS = 7


class StakingError(Exception):
    pass


class PoolFullError(StakingError):
    pass


class StillLockedError(StakingError):
    pass


class PositionNotFoundError(StakingError, KeyError):
    pass


class SequencingError(StakingError):
    pass


@dataclass
class StakingPosition:
    position_id: int
    owner: str
    amount: AmountPhi
    deposit_height: int
    unlock_height: int
    accrued: AmountPhi = ZERO


@dataclass
class WeekSettlement:
    week_index: int
    start_height: int
    end_height: int
    pot: AmountPhi
    payouts: dict[int, AmountPhi]
    carry: AmountPhi

    @property
    def paid(self) -> AmountPhi:
        return AmountPhi(sum(a.units for a in self.payouts.values()))


@dataclass
class StakingPool:
    params: ChainParams = DEFAULT_PARAMS
    positions: dict[int, StakingPosition] = field(default_factory=dict)
    total_staked: AmountPhi = ZERO
    last_settled_week: int = -1
    last_settled_height: int = 0
    carry: AmountPhi = ZERO
    _ids: itertools.count = field(default_factory=itertools.count, repr=False)

    @property
    def cap(self) -> AmountPhi:
        return self.params.staking_cap

    @property
    def lock_blocks(self) -> int:
        return LOCK_DAYS * self.params.blocks_per_day

    @property
    def week_blocks(self) -> int:
        return WEEK_DAYS * self.params.blocks_per_day

    def deposit(self, owner: str, amount: AmountPhi, height: int) -> int:
        if amount.units <= 0:
            raise ValueError("deposit amount must be positive")
        if height < 0:
            raise ValueError("height must be non-negative")
        if self.total_staked + amount > self.cap:
            raise PoolFullError(
                f"deposit of {amount} PHI would exceed the {self.cap} PHI cap "
                f"({self.total_staked} PHI staked)")
        pid = next(self._ids)
        self.positions[pid] = StakingPosition(pid, owner, amount, height, height + self.lock_blocks)
        self.total_staked = self.total_staked + amount
        return pid

    def settle_week(self, week_index: int,
                    height_range: tuple[int, int] | None = None) -> WeekSettlement:
        """Distribute the fee pot of one settlement period.

        ``height_range`` defaults to the natural week ``[w*W, (w+1)*W)``; an
        explicit, shorter range settles a stub period (e.g. the final day of a
        365-day year).
        """
        if week_index != self.last_settled_week + 1:
            raise SequencingError(
                f"expected week {self.last_settled_week + 1}, got {week_index}")
        if height_range is None:
            height_range = (week_index * self.week_blocks, (week_index + 1) * self.week_blocks)
        start, stop = height_range
        if start < self.last_settled_height or stop < start:
            raise SequencingError(f"height range {height_range} overlaps a settled period")

        fees = emission_between(start, stop, self.params).units * self.params.fee_rate
        pot = AmountPhi(int(fees))
        available = pot + self.carry
        eligible = [p for p in self.positions.values() if p.deposit_height <= start]
        stake = sum(p.amount.units for p in eligible)
        payouts: dict[int, AmountPhi] = {}
        if stake:
            for p in eligible:
                share = AmountPhi(available.units * p.amount.units // stake)
                p.accrued = p.accrued + share
                payouts[p.position_id] = share
        paid = sum(a.units for a in payouts.values())
        self.carry = AmountPhi(available.units - paid)
        self.last_settled_week = week_index
        self.last_settled_height = stop
        return WeekSettlement(week_index, start, stop, pot, payouts, self.carry)

    def withdraw(self, position_id: int, height: int) -> AmountPhi:
        try:
            pos = self.positions[position_id]
        except KeyError:
            raise PositionNotFoundError(position_id) from None
        if height < pos.unlock_height:
            raise StillLockedError(
                f"position {position_id} unlocks at height {pos.unlock_height}, now {height}")
        del self.positions[position_id]
        self.total_staked = self.total_staked - pos.amount
        return pos.amount + pos.accrued


# ---------------------------------------------------------------------------
# scenario simulation
# ---------------------------------------------------------------------------
class ScenarioError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass
class ScenarioEvent:
    lineno: int
    kind: str
    height: int
    owner: str = ""
    amount: AmountPhi = ZERO


def parse_scenario(text: str) -> list[ScenarioEvent]:
    """Parse the line-oriented scenario format.

    ::

        # comment
        deposit <owner> <amount PHI> <height>
        withdraw <owner> <height>
        end <height>

    Heights must be non-decreasing; exactly one ``end`` line, last.
    """
    events: list[ScenarioEvent] = []
    last_height = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if events and events[-1].kind == "end":
            raise ScenarioError(lineno, "nothing may follow 'end'")
        parts = line.split()
        kind = parts[0].lower()
        try:
            if kind == "deposit" and len(parts) == 4:
                ev = ScenarioEvent(lineno, kind, int(parts[3]), parts[1],
                                   AmountPhi.from_phi(parts[2]))
            elif kind == "withdraw" and len(parts) == 3:
                ev = ScenarioEvent(lineno, kind, int(parts[2]), parts[1])
            elif kind == "end" and len(parts) == 2:
                ev = ScenarioEvent(lineno, kind, int(parts[1]))
            else:
                raise ScenarioError(lineno, f"cannot parse {line!r}")
        except (ValueError, ArithmeticError) as exc:
            if isinstance(exc, ScenarioError):
                raise
            raise ScenarioError(lineno, str(exc)) from None
        if ev.height < last_height:
            raise ScenarioError(lineno, "heights must be non-decreasing")
        last_height = ev.height
        events.append(ev)
    if not events or events[-1].kind != "end":
        raise ScenarioError(len(text.splitlines()) + 1, "scenario must finish with 'end <height>'")
    return events


@dataclass
class PositionSummary:
    position_id: int
    owner: str
    amount: AmountPhi
    accrued: AmountPhi
    earning_blocks: int

    def apr(self, blocks_per_year: int) -> Fraction:
        if not self.earning_blocks:
            return Fraction(0)
        return Fraction(self.accrued.units * blocks_per_year,
                        self.amount.units * self.earning_blocks)


@dataclass
class SimulationResult:
    settlements: list[WeekSettlement]
    positions: list[PositionSummary]
    owners: dict[int, str]
    blocks_per_year: int


def run_scenario(events: list[ScenarioEvent],
                 params: ChainParams = DEFAULT_PARAMS) -> SimulationResult:
    pool = StakingPool(params)
    owners: dict[int, str] = {}
    earning: dict[int, int] = {}
    closed: dict[int, StakingPosition] = {}
    settlements: list[WeekSettlement] = []

    def record(settlement: WeekSettlement) -> None:
        settlements.append(settlement)
        for pid in settlement.payouts:
            earning[pid] = earning.get(pid, 0) + settlement.end_height - settlement.start_height

    def settle_to(height: int, stub: bool) -> None:
        while pool.last_settled_height + pool.week_blocks <= height:
            start = pool.last_settled_height
            record(pool.settle_week(pool.last_settled_week + 1, (start, start + pool.week_blocks)))
        if stub and pool.last_settled_height < height:
            record(pool.settle_week(pool.last_settled_week + 1,
                                    (pool.last_settled_height, height)))

    for ev in events:
        settle_to(ev.height, stub=ev.kind == "end")
        try:
            if ev.kind == "deposit":
                pid = pool.deposit(ev.owner, ev.amount, ev.height)
                owners[pid] = ev.owner
            elif ev.kind == "withdraw":
                mine = [pid for pid, p in pool.positions.items() if p.owner == ev.owner]
                if not mine:
                    raise PositionNotFoundError(ev.owner)
                for pid in mine:
                    if ev.height < pool.positions[pid].unlock_height:
                        raise StillLockedError(
                            f"{ev.owner} position unlocks at {pool.positions[pid].unlock_height}")
                for pid in mine:
                    closed[pid] = pool.positions[pid]
                    pool.withdraw(pid, ev.height)
        except (StakingError, ValueError) as exc:
            raise ScenarioError(ev.lineno, str(exc)) from None

    everything = {**closed, **pool.positions}
    summaries = [PositionSummary(pid, p.owner, p.amount, p.accrued, earning.get(pid, 0))
                 for pid, p in sorted(everything.items())]
    return SimulationResult(settlements, summaries, owners, params.blocks_per_year)
