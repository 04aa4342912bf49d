# The random source behind every hash: a bare PCG32 with no seeding step.
from collections import Counter

from phicoin.phihash import NUM_OPS, Op, build_round_schedule
from phicoin.rng import Pcg32

g = Pcg32(42, 54)
print("Pcg32(42, 54):", g.draws(5))

# there is no initial advance, so state 0 gives 0 first
print("Pcg32(0, 0) first output:", Pcg32(0, 0)())

# only inc | 1 matters: streams 2 and 3 are the same stream
print("inc 2 vs 3 equal:", Pcg32(7, 2).draws(100) == Pcg32(7, 3).draws(100))

# Every 64 blocks a new schedule is drawn. It depends on (epoch, period) only,
# never on the nonce, so all lanes of all miners run the same control flow.
s = build_round_schedule(0, 0)
print("\nbranch table, first 16 entries:", [Op(t).name for t in s.branch_table[:16]])
print("ops in the table:", dict(sorted(Counter(Op(t).name for t in s.branch_table).items())))
print(f"{NUM_OPS} ops, round 0 instructions:")
for ins in s.instructions[0]:
    print("  ", ins)

nxt = build_round_schedule(0, 1)
diff = sum(a != b for a, b in zip(s.branch_table, nxt.branch_table))
print("\ntable entries that change in the next period:", diff, "of 256")
