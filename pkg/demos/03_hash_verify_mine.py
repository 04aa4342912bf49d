# Hash, verify and mine on the desk profile.
import time

from phicoin import epoch as ep
from phicoin import phihash as ph

ctx = ep.build_light_cache(ep.DESK, 0)   # what a verifier keeps
full = ctx.materialize()                 # what a miner keeps

header = bytes(range(32))
res = ph.hash_full(full, header, nonce=0, height=0)
print("mix digest:", res.mix_digest.hex())
print("final hash:", res.final_hash.hex())

# a light client recomputes the items it needs and gets the same answer
print("light == full:", ph.hash_light(ctx, header, 0, 0) == res)

# acceptance needs the right mix digest and final_hash <= boundary (big-endian)
easy = b"\x0f" + b"\xff" * 31
print("meets 0x0f.. boundary:", ph.meets_boundary(res.final_hash, easy))
bad_mix = bytes([res.mix_digest[0] ^ 1]) + res.mix_digest[1:]
print("tampered mix accepted:", ph.verify_light(ctx, header, 0, 0, bad_mix, b"\xff" * 32))

# mine: the lowest nonce wins, however many threads search
hard = b"\x00\x3f" + b"\xff" * 30
t0 = time.perf_counter()
hit = ph.search(full, header, 0, hard, nonce_start=0, nonce_count=50_000, workers=4)
print(f"\nfirst nonce under 0x003f..: {hit[0] if hit else None} "
      f"({time.perf_counter() - t0:.1f}s)")
if hit:
    nonce, found = hit
    print("verifies:", ph.verify_light(ctx, header, nonce, 0, found.mix_digest, hard))

# flip one nonce bit and about half the output bits change
a, b = ph.hash_batch(full, header, [1000, 1001], 0)
flipped = bin(int.from_bytes(a.final_hash, "big") ^ int.from_bytes(b.final_hash, "big")).count("1")
print("bits changed by nonce 1000 -> 1001:", flipped, "of 256")
