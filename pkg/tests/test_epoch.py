import numpy as np
import pytest

from oracles import keccak_f800_textbook, sieve_largest_prime_le, trial_division_is_prime
from phicoin import epoch as ep
from phicoin.keccak import keccak_digest

# frozen from the sieve oracle
SIEVE = {10: 7, 256: 251, 1_048_576: 1_048_573, 67_108_864: 67_108_859}


@pytest.mark.parametrize("n,expected", list(SIEVE.items()) + [(2, 2), (3, 3), (4, 3)])
def test_find_largest_prime(n, expected):
    assert ep.find_largest_prime(n) == expected


def test_find_largest_prime_vs_sieve_small():
    for n in range(2, 3000, 7):
        assert ep.find_largest_prime(n) == sieve_largest_prime_le(n)


@pytest.mark.parametrize("n", [1, 0, -5])
def test_find_largest_prime_rejects(n):
    with pytest.raises(ValueError):
        ep.find_largest_prime(n)


def test_is_prime_against_trial_division():
    for n in range(0, 5000):
        assert ep.is_prime(n) == trial_division_is_prime(n)
    # strong pseudoprimes to small bases
    for n in (3_215_031_751, 2_152_302_898_747, 3_825_123_056_546_413_051):
        assert not ep.is_prime(n)
    assert ep.is_prime(2**61 - 1)


def test_mainnet_sizes_gib():
    for e, gib in [(0, 4.0), (1, 5.0), (2, 6.25)]:
        size = ep.dataset_num_items(ep.MAINNET, e) * 64 / 2**30
        assert abs(size / gib - 1) <= 1e-3
    assert ep.dataset_num_items(ep.MAINNET, 0) == 67_108_859
    assert ep.cache_num_items(ep.MAINNET, 0) == 1_048_573


def test_desk_sizes():
    assert ep.cache_num_items(ep.DESK, 0) == 251
    assert ep.dataset_num_items(ep.DESK, 0) == sieve_largest_prime_le(16_384)


def test_growth_law_and_primality():
    sizes = [ep.dataset_num_items(ep.DESK, e) for e in range(10)]
    caches = [ep.cache_num_items(ep.DESK, e) for e in range(10)]
    for a, b in zip(sizes, sizes[1:]):
        assert abs(b / a - 1.25) <= 0.01
        assert b > a
    assert all(trial_division_is_prime(s) for s in sizes + caches)
    for s, c in zip(sizes, caches):
        assert abs(s / c / 64 - 1) < 0.05


def test_exact_rational_bound():
    # 5**e / 4**e computed exactly; float pow loses integer precision at large e
    e = 40
    assert ep._upper_bound(ep.MAINNET, e) == (2**26 * 5**e) // 4**e


def test_out_of_range_cap():
    assert ep.MAX_MAINNET_EPOCH == 118
    ep._upper_bound(ep.MAINNET, ep.MAX_MAINNET_EPOCH)
    with pytest.raises(ep.OutOfRangeError):
        ep.dataset_num_items(ep.MAINNET, ep.MAX_MAINNET_EPOCH + 1)
    with pytest.raises(ValueError):
        ep.dataset_num_items(ep.DESK, -1)


@pytest.mark.parametrize("height,epoch", [
    (0, 0), (2_102_399, 0), (2_102_400, 1), (21_024_000, 10),
])
def test_epoch_of_block(height, epoch):
    assert ep.epoch_of_block(ep.MAINNET, height) == epoch
    assert ep.epoch_of_block(ep.DESK, height) == epoch


def test_epoch_seed():
    assert ep.epoch_seed(0) == bytes(32)
    expected = bytes.fromhex("5dd431e5fbc604f499bfa0232f45f8f142d0ff5178f539e5a7800bf0643697af")
    assert ep.epoch_seed(1) == expected
    ref = keccak_f800_textbook([0] * 25)[:8]
    assert ep.epoch_seed(1) == b"".join(w.to_bytes(4, "little") for w in ref)
    assert len({ep.epoch_seed(e) for e in range(11)}) == 11


def test_light_cache_shape_and_determinism(desk_ctx):
    assert desk_ctx.light_cache.shape == (desk_ctx.num_cache_items, 16)
    assert desk_ctx.light_cache[0].tolist() != desk_ctx.light_cache[1].tolist()
    again = ep.build_light_cache(ep.DESK, 0)
    assert np.array_equal(again.light_cache, desk_ctx.light_cache)
    assert not desk_ctx.light_cache.flags.writeable


def test_light_cache_regression(desk_ctx):
    digest = keccak_digest(desk_ctx.light_cache.astype("<u4").tobytes()).hex()
    assert digest == "3f14c6771ebcce0acf48ff22e266f972d6f4e26052627bb291a92fc7c95fdf2d"


def test_item0_regression(desk_ctx):
    assert ep.calc_dataset_item(desk_ctx, 0).hex() == (
        "5e1719ad6e55be34e9eafc07d3d142a09c85cee6751fa38d6aa80306dc59725e"
        "dc98f4175926802aa5e1d95c22883e6fc1677854ed6eea61f88b12115da9c961")
    assert ep.calc_dataset_item(desk_ctx, 0) != ep.calc_dataset_item(desk_ctx, 1)


def test_item_index_range(desk_ctx):
    with pytest.raises(ValueError):
        ep.calc_dataset_item(desk_ctx, desk_ctx.num_dataset_items)
    with pytest.raises(ValueError):
        ep.calc_dataset_item(desk_ctx, -1)
    with pytest.raises(ValueError):
        ep.calc_dataset_items(desk_ctx, np.array([desk_ctx.num_dataset_items]))


def test_light_equals_full(desk_ctx, desk_full):
    rng = np.random.default_rng(1000)
    idx = rng.integers(0, desk_ctx.num_dataset_items, 1000)
    assert desk_full.dataset.shape == (desk_ctx.num_dataset_items, 16)
    batch = ep.calc_dataset_items(desk_ctx, idx)
    assert np.array_equal(batch, desk_full.dataset[idx])
    for i in idx[:100].tolist():
        assert ep.calc_dataset_item(desk_ctx, i) == desk_full.dataset[i].astype("<u4").tobytes()


def test_materialize_is_idempotent(desk_full):
    assert desk_full.materialize() is desk_full
    assert not desk_full.dataset.flags.writeable


def test_dump_roundtrip(tmp_path, desk_ctx, desk_full):
    cpath, dpath = tmp_path / "c.dag", tmp_path / "d.dag"
    ep.write_dump(cpath, ep.DESK, 0, desk_ctx.light_cache)
    ep.write_dump(dpath, ep.DESK, 0, desk_full.dataset)
    assert cpath.read_bytes()[:7] == b"PHIDAG1"
    profile, epoch, items = ep.read_dump(cpath)
    assert (profile, epoch) == (ep.DESK, 0)
    assert np.array_equal(items, desk_ctx.light_cache)
    ctx = ep.context_from_dumps(cpath, dpath)
    assert ctx.has_dataset and np.array_equal(ctx.dataset, desk_full.dataset)


def test_dump_rejects_tampering(tmp_path, desk_ctx):
    path = tmp_path / "c.dag"
    ep.write_dump(path, ep.DESK, 0, desk_ctx.light_cache)
    raw = bytearray(path.read_bytes())
    raw[-1] ^= 1
    path.write_bytes(bytes(raw))
    with pytest.raises(ValueError, match="checksum"):
        ep.read_dump(path)
    raw[-1] ^= 1
    raw[len(raw) // 2] ^= 0x40  # inside a whole 4 KiB chunk
    path.write_bytes(bytes(raw))
    with pytest.raises(ValueError, match="checksum"):
        ep.read_dump(path)
    path.write_bytes(b"NOTADAG" + bytes(60))
    with pytest.raises(ValueError):
        ep.read_dump(path)


def test_dump_rejects_mismatched_dataset(tmp_path, desk_ctx, desk_ctx1):
    cpath, dpath = tmp_path / "c.dag", tmp_path / "d.dag"
    ep.write_dump(cpath, ep.DESK, 0, desk_ctx.light_cache)
    ep.write_dump(dpath, ep.DESK, 1, desk_ctx1.light_cache)
    with pytest.raises(ValueError):
        ep.context_from_dumps(cpath, dpath)
