# Supply, inflation and the fee split.
from phicoin.tokenomics import AmountPhi, emission_table, fee_split, supply_at, tps

YEAR = 2_102_400

print("supply at launch:", supply_at(0), "PHI  (test-phase allocation)")
print("supply after year 1:", supply_at(YEAR), "PHI")

print(f"\n{'year':>4}  {'reward':>10}  {'emitted':>17}  {'supply':>18}  inflation")
for row in emission_table(10):
    print(f"{row['year']:4d}  {row['block_reward']!s:>10}  {row['annual_emission']!s:>17}  "
          f"{row['end_supply']!s:>18}  {float(row['inflation_pct']):.3f}%")

# year 3 comes out at 2.27% (5,256,000 new over 231,264,000); 2.22% is year 4

# the coinbase split always adds back up; rounding dust goes to the miner
for reward in ("5", "2.5", "0.00000099"):
    miner, infra, dev = fee_split(AmountPhi.from_phi(reward))
    print(f"\n{reward} PHI -> miner {miner}, infrastructure {infra}, developers {dev}")

print(f"\nthroughput: {tps():.2f} tx/s with 4 MiB blocks of 225-byte transactions")
