# A year in the staking pool.
from phicoin.staking import StakingPool, StillLockedError, parse_scenario, run_scenario
from phicoin.tokenomics import AmountPhi, staking_apr

cap = AmountPhi.from_phi(10_000_000)
print("formula APR, full pool:", float(staking_apr(1, cap)), "then", float(staking_apr(2, cap)))

# one whale fills the pool for a year: 52 weekly payouts plus one day
res = run_scenario(parse_scenario("deposit whale 10000000 0\nend 2102400\n"))
whale = res.positions[0]
print("whale accrued:", whale.accrued, "PHI over", len(res.settlements), "settlements")
print(f"simulated APR: {float(whale.apr(res.blocks_per_year)) * 100:.3f}%")

# a smaller pool: late depositors wait for the next full week
scenario = """
deposit alice 6000000 0
deposit bob   4000000 100      # misses week 0
withdraw alice 600000
end 806400
"""
res = run_scenario(parse_scenario(scenario))
for p in res.positions:
    print(f"{p.owner:6s} staked {p.amount} earned {p.accrued} "
          f"APR {float(p.apr(res.blocks_per_year)) * 100:.3f}%")

# the 90-day lock is checked on every withdrawal
pool = StakingPool()
pid = pool.deposit("carol", AmountPhi.from_phi(1), 0)
try:
    pool.withdraw(pid, pool.lock_blocks - 1)
except StillLockedError as exc:
    print("\nearly withdrawal refused:", exc)
print("on time:", pool.withdraw(pid, pool.lock_blocks), "PHI back")
