"""Reference implementation of the PhiHash proof-of-work and the Phicoin token model."""
from .epoch import (
    DESK,
    MAINNET,
    EpochContext,
    SizeProfile,
    build_light_cache,
    cache_num_items,
    calc_dataset_item,
    dataset_num_items,
    epoch_of_block,
    epoch_seed,
    find_largest_prime,
)
from .phihash import (
    PhiHashResult,
    build_round_schedule,
    hash_batch,
    hash_full,
    hash_light,
    search,
    verify_light,
)
from .profiles import PROFILES, Profile, get_profile
from .rng import Pcg32, Pcg32State, pcg32_new, pcg32_next
from .tokenomics import (
    AmountPhi,
    ChainParams,
    block_reward,
    fee_split,
    inflation_rate,
    staking_apr,
    supply_at,
    tps,
    vram_requirement,
)

__version__ = "0.1.0"
