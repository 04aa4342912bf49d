"""Epoch sizing, light cache and dataset (DAG) generation.

Dataset item count for an epoch is the largest prime not above
``num_items_init * 1.25**epoch``. The bound is evaluated exactly as
``num_items_init * 5**e // 4**e`` so that no binary rounding can move a size
across a prime boundary. Bounds must stay below 2**64 (the range for which the
primality test is deterministic); for the mainnet profile that caps the epoch
at :data:`MAX_MAINNET_EPOCH`.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from pathlib import Path

import numpy as np

from .keccak import (
    bytes_to_words,
    keccak_digest,
    keccak_digest_many,
    keccak_hash32,
    keccak_item,
    keccak_items_batch,
    words_to_bytes,
)

MASK32 = 0xFFFF_FFFF
FNV_PRIME = 0x0100_0193
FNV_OFFSET = 0x811C_9DC5
ITEM_WORDS = 16
ITEM_BYTES = 64
BOUND_LIMIT = 1 << 64


class OutOfRangeError(ValueError):
    """An epoch whose size bound leaves the supported 64-bit range."""


class EpochMismatchError(ValueError):
    """A context was used for a block height that belongs to another epoch."""


def fnv1a(h: int, d: int) -> int:
    return ((h ^ d) * FNV_PRIME) & MASK32


# ---------------------------------------------------------------------------
# primes
# ---------------------------------------------------------------------------
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for every n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def find_largest_prime(n: int) -> int:
    if n < 2:
        raise ValueError(f"no prime <= {n}")
    if n >= BOUND_LIMIT:
        raise OutOfRangeError(f"{n} exceeds the 64-bit primality range")
    while not is_prime(n):
        n -= 1
    return n


# ---------------------------------------------------------------------------
# profiles and sizes
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class SizeProfile:
    name: str
    profile_id: int
    num_items_init: int
    cache_ratio: int = 64
    epoch_length_blocks: int = 2_102_400
    growth_factor: Fraction = Fraction(5, 4)
    cache_rounds: int = 3
    dataset_parents: int = 256


MAINNET = SizeProfile("mainnet", 0, num_items_init=(4 << 30) // ITEM_BYTES)
DESK = SizeProfile("desk", 1, num_items_init=16_384)
SIZE_PROFILES = {p.name: p for p in (MAINNET, DESK)}


def _upper_bound(profile: SizeProfile, epoch: int) -> int:
    if epoch < 0:
        raise ValueError("epoch must be non-negative")
    g = profile.growth_factor
    bound = profile.num_items_init * g.numerator**epoch // g.denominator**epoch
    if bound >= BOUND_LIMIT:
        raise OutOfRangeError(f"epoch {epoch} exceeds the supported size range")
    return bound


def max_epoch(profile: SizeProfile) -> int:
    e = 0
    while True:
        try:
            _upper_bound(profile, e + 1)
        except OutOfRangeError:
            return e
        e += 1


def dataset_num_items(profile: SizeProfile, epoch: int) -> int:
    return find_largest_prime(_upper_bound(profile, epoch))


def cache_num_items(profile: SizeProfile, epoch: int) -> int:
    return find_largest_prime(_upper_bound(profile, epoch) // profile.cache_ratio)


MAX_MAINNET_EPOCH = max_epoch(MAINNET)


def epoch_of_block(profile: SizeProfile, height: int) -> int:
    if height < 0:
        raise ValueError("height must be non-negative")
    return height // profile.epoch_length_blocks


def epoch_seed(epoch: int) -> bytes:
    if epoch < 0:
        raise ValueError("epoch must be non-negative")
    seed = bytes(32)
    for _ in range(epoch):
        seed = keccak_hash32(seed)
    return seed


# ---------------------------------------------------------------------------
# cache and dataset
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class EpochContext:
    profile: SizeProfile
    epoch_number: int
    num_dataset_items: int
    num_cache_items: int
    seed_hash: bytes
    light_cache: np.ndarray = field(repr=False)
    dataset: np.ndarray | None = field(default=None, repr=False)

    @cached_property
    def cache_rows(self) -> list[list[int]]:
        return self.light_cache.tolist()

    @cached_property
    def cache_packed(self) -> list[int]:
        # each row as one int, word k in bits [64k, 64k+32); 64-bit slots leave
        # room for the FNV product so 16 lanes multiply without carrying over
        return [_pack(row) for row in self.cache_rows]

    @property
    def has_dataset(self) -> bool:
        return self.dataset is not None

    def item_words(self, index: int) -> list[int]:
        if self.dataset is not None:
            return self.dataset[index].tolist()
        return _calc_item_words(self, index)

    def materialize(self, chunk: int = 1 << 16) -> "EpochContext":
        """Return a copy of this context carrying the full dataset."""
        if self.dataset is not None:
            return self
        n = self.num_dataset_items
        out = np.empty((n, ITEM_WORDS), dtype=np.uint32)
        for start in range(0, n, chunk):
            stop = min(n, start + chunk)
            out[start:stop] = calc_dataset_items(self, np.arange(start, stop, dtype=np.uint64))
        out.setflags(write=False)
        return replace(self, dataset=out)


def build_light_cache(profile: SizeProfile, epoch: int) -> EpochContext:
    n = cache_num_items(profile, epoch)
    seed = epoch_seed(epoch)
    try:
        cache = np.empty((n, ITEM_WORDS), dtype=np.uint32)
    except MemoryError as exc:  # pragma: no cover
        raise MemoryError(f"cannot allocate {n * ITEM_BYTES} byte cache") from exc

    rows = [keccak_item(bytes_to_words(seed))]
    for _ in range(1, n):
        rows.append(keccak_item(rows[-1]))
    for _ in range(profile.cache_rounds):
        for i in range(n):
            partner = rows[rows[i][0] % n]
            prev = rows[(i - 1) % n]
            rows[i] = keccak_item([a ^ b for a, b in zip(prev, partner)])
    cache[:] = rows
    cache.setflags(write=False)
    return EpochContext(
        profile=profile,
        epoch_number=epoch,
        num_dataset_items=dataset_num_items(profile, epoch),
        num_cache_items=n,
        seed_hash=seed,
        light_cache=cache,
    )


_SLOT_MASK = sum(MASK32 << (64 * k) for k in range(ITEM_WORDS))


def _pack(words) -> int:
    return sum(w << (64 * k) for k, w in enumerate(words))


def _calc_item_words(ctx: EpochContext, index: int) -> list[int]:
    if not 0 <= index < ctx.num_dataset_items:
        raise ValueError(f"item index {index} out of range [0, {ctx.num_dataset_items})")
    rows = ctx.cache_packed
    n = ctx.num_cache_items
    mix = rows[index % n] ^ (index & MASK32)
    for j in range(ctx.profile.dataset_parents):
        word = (mix >> (64 * (j & 15))) & MASK32
        parent = rows[((((index ^ j) & MASK32) ^ word) * FNV_PRIME & MASK32) % n]
        mix = ((mix ^ parent) * FNV_PRIME) & _SLOT_MASK
    return keccak_item([(mix >> (64 * k)) & MASK32 for k in range(ITEM_WORDS)])


def calc_dataset_item(ctx: EpochContext, index: int) -> bytes:
    """One 64-byte dataset item computed from the light cache alone."""
    return words_to_bytes(_calc_item_words(ctx, index))


def calc_dataset_items(ctx: EpochContext, indices: np.ndarray) -> np.ndarray:
    """Vectorised item generation; returns an ``(len(indices), 16)`` uint32 array."""
    idx = np.asarray(indices, dtype=np.uint64)
    if idx.size and int(idx.max()) >= ctx.num_dataset_items:
        raise ValueError("item index out of range")
    cache = ctx.light_cache
    n = np.uint64(ctx.num_cache_items)
    idx32 = (idx & np.uint64(MASK32)).astype(np.uint32)
    mix = cache[(idx % n).astype(np.intp)].copy()
    mix[:, 0] ^= idx32
    prime = np.uint32(FNV_PRIME)
    for j in range(ctx.profile.dataset_parents):
        sel = ((idx32 ^ np.uint32(j)) ^ mix[:, j & 15]) * prime
        parent = cache[(sel.astype(np.uint64) % n).astype(np.intp)]
        mix ^= parent
        mix *= prime
    return keccak_items_batch(mix)


# ---------------------------------------------------------------------------
# dump files
# ---------------------------------------------------------------------------
DUMP_MAGIC = b"PHIDAG1"
_DUMP_HEADER = struct.Struct("<7sBQQ")
_PROFILE_BY_ID = {p.profile_id: p for p in SIZE_PROFILES.values()}


_DUMP_CHUNK = 4096


def _dump_checksum(header: bytes, payload: bytes) -> bytes:
    """Digest of the header followed by the digests of each 4 KiB payload chunk."""
    whole = len(payload) - len(payload) % _DUMP_CHUNK
    body = np.frombuffer(payload[:whole], dtype=np.uint8).reshape(-1, _DUMP_CHUNK)
    parts = [keccak_digest_many(body).tobytes()] if whole else []
    if whole < len(payload):
        parts.append(keccak_digest(payload[whole:]))
    return keccak_digest(header + b"".join(parts))


def write_dump(path: str | Path, profile: SizeProfile, epoch: int, items: np.ndarray) -> None:
    """Layout: header (magic, profile id, epoch, item count) | 32-byte checksum | raw items.

    The checksum is :func:`keccak_digest` over the header followed by the digest
    of every 4 KiB chunk of the items (the last chunk may be shorter).
    """
    items = np.ascontiguousarray(items, dtype="<u4")
    header = _DUMP_HEADER.pack(DUMP_MAGIC, profile.profile_id, epoch, items.shape[0])
    payload = items.tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(_dump_checksum(header, payload))
        fh.write(payload)


def read_dump(path: str | Path) -> tuple[SizeProfile, int, np.ndarray]:
    raw = Path(path).read_bytes()
    hsize = _DUMP_HEADER.size
    if len(raw) < hsize + 32:
        raise ValueError("truncated dump file")
    magic, pid, epoch, count = _DUMP_HEADER.unpack_from(raw)
    if magic != DUMP_MAGIC:
        raise ValueError("not a PHIDAG1 dump")
    if pid not in _PROFILE_BY_ID:
        raise ValueError(f"unknown profile id {pid}")
    header, checksum, payload = raw[:hsize], raw[hsize:hsize + 32], raw[hsize + 32:]
    if len(payload) != count * ITEM_BYTES:
        raise ValueError("item count does not match payload length")
    if _dump_checksum(header, payload) != checksum:
        raise ValueError("dump checksum mismatch")
    items = np.frombuffer(payload, dtype="<u4").astype(np.uint32).reshape(count, ITEM_WORDS)
    return _PROFILE_BY_ID[pid], epoch, items


def context_from_dumps(cache_path: str | Path, dataset_path: str | Path | None = None) -> EpochContext:
    profile, epoch, cache = read_dump(cache_path)
    if cache.shape[0] != cache_num_items(profile, epoch):
        raise ValueError("cache dump has the wrong item count for its epoch")
    cache.setflags(write=False)
    ctx = EpochContext(profile, epoch, dataset_num_items(profile, epoch), cache.shape[0],
                       epoch_seed(epoch), cache)
    if dataset_path is not None:
        dprofile, depoch, data = read_dump(dataset_path)
        if (dprofile, depoch) != (profile, epoch) or data.shape[0] != ctx.num_dataset_items:
            raise ValueError("dataset dump does not match the cache dump")
        data.setflags(write=False)
        ctx = replace(ctx, dataset=data)
    return ctx
