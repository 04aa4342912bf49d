from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from phicoin.tokenomics import (
    DEFAULT_PARAMS,
    AmountPhi,
    ChainParams,
    block_reward,
    emission_table,
    fee_split,
    inflation_rate,
    staking_apr,
    supply_at,
    tps,
    vram_requirement,
)

phi = AmountPhi.from_phi
YEAR = 2_102_400


def test_params_consistency():
    p = DEFAULT_PARAMS
    assert p.blocks_per_day * p.block_time_s == 86_400
    assert p.infra_share + p.dev_share == p.fee_rate
    assert p.blocks_per_year == YEAR


def test_amount_parsing():
    assert phi("0.00000001").units == 1
    assert str(phi("2.5")) == "2.50000000"
    assert phi(Decimal("1.1")) + phi(1) == phi("2.1")
    with pytest.raises(ValueError):
        phi("0.000000001")
    with pytest.raises(TypeError):
        phi(0.1)


@pytest.mark.parametrize("height,reward", [(0, "5"), (YEAR - 1, "5"), (YEAR, "2.5"),
                                           (100_000_000, "2.5")])
def test_block_reward(height, reward):
    assert block_reward(height) == phi(reward)


@pytest.mark.parametrize("height,supply", [(0, 210_240_000), (YEAR, 220_752_000),
                                           (2 * YEAR, 226_008_000)])
def test_supply(height, supply):
    assert supply_at(height) == phi(supply)


def test_single_halving():
    slopes = {(supply_at(h + 1) - supply_at(h)).units for h in range(0, 10 * YEAR, 9_973)}
    assert slopes == {phi(5).units, phi("2.5").units}
    assert supply_at(YEAR) - supply_at(YEAR - 1) == phi(5)
    assert supply_at(YEAR + 1) - supply_at(YEAR) == phi("2.5")


def test_inflation_values():
    assert abs(float(inflation_rate(1)) - 0.0476) <= 0.0001
    assert abs(float(inflation_rate(2)) - 0.0233) <= 0.0001
    assert inflation_rate(3) == Fraction(5_256_000, 231_264_000)
    assert round(float(inflation_rate(3)) * 100, 2) == 2.27


def test_inflation_strictly_decreasing():
    rates = [inflation_rate(y) for y in range(1, 16)]
    assert all(a > b for a, b in zip(rates, rates[1:]))


@pytest.mark.parametrize("year,staked,apr", [
    (1, 10_000_000, Fraction(5256, 100_000)),
    (2, 10_000_000, Fraction(2628, 100_000)),
    (1, 20_000_000, Fraction(2628, 100_000)),
])
def test_staking_apr(year, staked, apr):
    assert staking_apr(year, phi(staked)) == apr


@pytest.mark.parametrize("year", [1, 2, 7])
def test_staking_apr_identity(year):
    t = phi(12_345_678)
    p = DEFAULT_PARAMS
    reward = p.reward_year1 if year == 1 else p.reward_after
    assert staking_apr(year, t) * t.units == p.blocks_per_day * p.days_per_year * p.fee_rate * reward.units


def test_staking_apr_rejects_zero():
    with pytest.raises(ValueError):
        staking_apr(1, AmountPhi(0))
    with pytest.raises(ValueError):
        staking_apr(1, AmountPhi(-1))


@pytest.mark.parametrize("reward,parts", [
    ("5", ("4.75", "0.15", "0.10")),
    ("2.5", ("2.375", "0.075", "0.05")),
    ("0", ("0", "0", "0")),
    ("0.00000099", ("0.00000096", "0.00000002", "0.00000001")),
])
def test_fee_split_examples(reward, parts):
    assert fee_split(phi(reward)) == tuple(phi(p) for p in parts)


@given(st.integers(0, 10**18))
def test_fee_split_conserves(units):
    miner, infra, dev = fee_split(AmountPhi(units))
    assert miner.units + infra.units + dev.units == units
    assert min(miner.units, infra.units, dev.units) >= 0
    assert infra.units <= units * 3 // 100 and dev.units <= units * 2 // 100


def test_tps():
    assert round(tps()) == 1243
    assert tps() == 4 * 1024 * 1024 / 225 / 15
    assert tps(ChainParams(block_time_s=30)) == tps() / 2
    assert tps(ChainParams(avg_tx_bytes=4 * 1024 * 1024)) == 1 / 15


@pytest.mark.parametrize("year,gb", [(0, 4.0), (1, 5.0), (2, 6.25)])
def test_vram(year, gb):
    assert vram_requirement(year) == gb


def test_vram_year_10():
    assert abs(vram_requirement(10) - 37.2529) < 1e-3


def test_emission_table():
    rows = emission_table(3)
    assert [r["year"] for r in rows] == [1, 2, 3]
    assert rows[0]["annual_emission"] == phi(10_512_000)
    assert rows[1]["end_supply"] == phi(226_008_000)
    assert rows[0]["inflation_pct"] == inflation_rate(1) * 100
    with pytest.raises(ValueError):
        emission_table(0)
