# How big is the DAG each year?
#
# Sizes grow by 5/4 per epoch (one epoch = one year of blocks) and are rounded
# down to a prime so the modulo in the mixing loop has no short cycles.
from phicoin import epoch as ep
from phicoin.tokenomics import vram_requirement

print("mainnet dataset per epoch")
prev = None
for e in range(11):
    n = ep.dataset_num_items(ep.MAINNET, e)
    gib = n * ep.ITEM_BYTES / 2**30
    growth = f"x{n / prev:.4f}" if prev else ""
    print(f"  epoch {e:2d}  {n:>13,d} items  {gib:8.3f} GiB  {growth}")
    prev = n

# the memory curve is the same law written in GB
print("\nvram requirement, year 10:", round(vram_requirement(10), 2), "GB")

# sizes stay below 2**64 items up to a fixed epoch, after that we refuse
print("last representable mainnet epoch:", ep.MAX_MAINNET_EPOCH)

# the desk profile keeps the same law at 1 MiB so everything fits in a test run
ctx = ep.build_light_cache(ep.DESK, 0)
print(f"\ndesk epoch 0: {ctx.num_cache_items} cache items, {ctx.num_dataset_items} dataset items")
print("seed of epoch 1:", ep.epoch_seed(1).hex())

# any dataset item can be rebuilt from the small cache alone
item = ep.calc_dataset_item(ctx, 1234)
full = ctx.materialize()
print("item 1234 from cache == item 1234 from full dataset:",
      item == full.dataset[1234].astype("<u4").tobytes())
