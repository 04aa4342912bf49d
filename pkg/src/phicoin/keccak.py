"""Keccak-f[800] permutation and the absorb/squeeze helpers used by the hash.

Lane ``(x, y)`` lives at index ``x + 5*y``. Two implementations share the
tables below: :func:`keccak_f800` works on one state held as Python ints,
:func:`keccak_f800_batch` permutes an ``(N, 25)`` uint32 array in one pass.

Absorb layout (a consensus parameter):

* lanes 0-7   header hash, little-endian 32-bit words
* lanes 8-9   nonce, low word then high word
* lanes 10-17 mix digest (XORed in at finalisation)
"""
from __future__ import annotations

import struct

import numpy as np

MASK32 = 0xFFFF_FFFF
ROUNDS = 22

ROUND_CONSTANTS = (
    0x00000001, 0x00008082, 0x0000808A, 0x80008000, 0x0000808B, 0x80000001,
    0x80008081, 0x00008009, 0x0000008A, 0x00000088, 0x80008009, 0x8000000A,
    0x8000808B, 0x0000008B, 0x00008089, 0x00008003, 0x00008002, 0x00000080,
    0x0000800A, 0x8000000A, 0x80008081, 0x00008080,
)

# rotation offsets for lane index x + 5*y (Keccak-f[1600] values mod 32)
_RHO = (
    0, 1, 30, 28, 27,
    4, 12, 6, 23, 20,
    3, 10, 11, 25, 7,
    9, 13, 15, 21, 8,
    18, 2, 29, 24, 14,
)


def _pi_dest(i: int) -> int:
    x, y = i % 5, i // 5
    return y + 5 * ((2 * x + 3 * y) % 5)


# (source, destination, rotation) for the combined rho/pi step
_RHO_PI = tuple((i, _pi_dest(i), _RHO[i]) for i in range(25))


def keccak_f800(lanes: list[int]) -> list[int]:
    """Apply the 22-round permutation to a list of 25 32-bit words."""
    a = list(lanes)
    b = [0] * 25
    for rc in ROUND_CONSTANTS:
        c0 = a[0] ^ a[5] ^ a[10] ^ a[15] ^ a[20]
        c1 = a[1] ^ a[6] ^ a[11] ^ a[16] ^ a[21]
        c2 = a[2] ^ a[7] ^ a[12] ^ a[17] ^ a[22]
        c3 = a[3] ^ a[8] ^ a[13] ^ a[18] ^ a[23]
        c4 = a[4] ^ a[9] ^ a[14] ^ a[19] ^ a[24]
        d = (
            c4 ^ (((c1 << 1) | (c1 >> 31)) & MASK32),
            c0 ^ (((c2 << 1) | (c2 >> 31)) & MASK32),
            c1 ^ (((c3 << 1) | (c3 >> 31)) & MASK32),
            c2 ^ (((c4 << 1) | (c4 >> 31)) & MASK32),
            c3 ^ (((c0 << 1) | (c0 >> 31)) & MASK32),
        )
        for src, dst, r in _RHO_PI:
            v = a[src] ^ d[src % 5]
            b[dst] = ((v << r) | (v >> (32 - r))) & MASK32 if r else v
        for y in range(0, 25, 5):
            b0, b1, b2, b3, b4 = b[y], b[y + 1], b[y + 2], b[y + 3], b[y + 4]
            a[y] = b0 ^ (~b1 & b2)
            a[y + 1] = b1 ^ (~b2 & b3)
            a[y + 2] = b2 ^ (~b3 & b4)
            a[y + 3] = b3 ^ (~b4 & b0)
            a[y + 4] = b4 ^ (~b0 & b1)
        a[0] ^= rc
    return a


_RHO_NP = np.array(_RHO, dtype=np.uint32)
_RHO_NP_INV = ((32 - _RHO_NP) & 31).astype(np.uint32)
# gather index: out[dst] = rotated[src]
_PI_GATHER = np.empty(25, dtype=np.intp)
for _src, _dst, _ in _RHO_PI:
    _PI_GATHER[_dst] = _src
_RC_NP = np.array(ROUND_CONSTANTS, dtype=np.uint32)


def keccak_f800_batch(states: np.ndarray) -> np.ndarray:
    """Permute every row of an ``(N, 25)`` uint32 array; returns a new array."""
    a = np.array(states, dtype=np.uint32, copy=True).reshape(-1, 5, 5)
    for rnd in range(ROUNDS):
        c = a[:, 0] ^ a[:, 1] ^ a[:, 2] ^ a[:, 3] ^ a[:, 4]
        c_next = np.roll(c, -1, axis=1)
        d = np.roll(c, 1, axis=1) ^ ((c_next << np.uint32(1)) | (c_next >> np.uint32(31)))
        a ^= d[:, None, :]
        flat = a.reshape(-1, 25)
        rot = (flat << _RHO_NP) | (flat >> _RHO_NP_INV)
        b = rot[:, _PI_GATHER].reshape(-1, 5, 5)
        a = b ^ (~np.roll(b, -1, axis=2) & np.roll(b, -2, axis=2))
        a[:, 0, 0] ^= _RC_NP[rnd]
    return a.reshape(-1, 25)


def bytes_to_words(data: bytes) -> list[int]:
    return list(struct.unpack(f"<{len(data) // 4}I", data))


def words_to_bytes(words) -> bytes:
    return struct.pack(f"<{len(words)}I", *(int(w) for w in words))


def keccak_init(header_hash: bytes, nonce: int) -> tuple[list[int], int]:
    """Absorb header and nonce, permute once; returns ``(state, seed)``."""
    if len(header_hash) != 32:
        raise ValueError("header_hash must be 32 bytes")
    st = bytes_to_words(header_hash) + [nonce & MASK32, (nonce >> 32) & MASK32] + [0] * 15
    st = keccak_f800(st)
    return st, st[0] | (st[1] << 32)


def keccak_finalize(st: list[int], mix_digest: bytes) -> bytes:
    """XOR the mix digest into lanes 10-17, permute, squeeze lanes 0-7."""
    if len(mix_digest) != 32:
        raise ValueError("mix_digest must be 32 bytes")
    st = list(st)
    for i, w in enumerate(bytes_to_words(mix_digest)):
        st[10 + i] ^= w
    return words_to_bytes(keccak_f800(st)[:8])


def keccak_hash32(data: bytes) -> bytes:
    """32-byte rehash: ``data`` absorbed as a header with nonce 0."""
    st, _ = keccak_init(data, 0)
    return words_to_bytes(st[:8])


def keccak_item(words: list[int]) -> list[int]:
    """Squeeze one 16-word item: words in lanes 0-15, permute, lanes 0-15 out."""
    return keccak_f800(list(words) + [0] * (25 - len(words)))[:16]


def keccak_items_batch(items: np.ndarray) -> np.ndarray:
    """Vectorised :func:`keccak_item` over an ``(N, 16)`` array."""
    st = np.zeros((items.shape[0], 25), dtype=np.uint32)
    st[:, :16] = items
    return keccak_f800_batch(st)[:, :16]


def keccak_digest(data: bytes) -> bytes:
    """Sponge over arbitrary bytes (64-byte rate, 10*1 padding); 32-byte output."""
    padded = bytearray(data) + b"\x01"
    padded += b"\x00" * (-len(padded) % 64)
    padded[-1] |= 0x80
    st = [0] * 25
    for off in range(0, len(padded), 64):
        for i, w in enumerate(bytes_to_words(bytes(padded[off:off + 64]))):
            st[i] ^= w
        st = keccak_f800(st)
    return words_to_bytes(st[:8])


def keccak_digest_many(chunks: np.ndarray) -> np.ndarray:
    """:func:`keccak_digest` of every row of an ``(N, L)`` uint8 array at once.

    Returns ``(N, 32)`` uint8.
    """
    chunks = np.asarray(chunks, dtype=np.uint8)
    n, length = chunks.shape
    padded = np.zeros((n, length + 1 + (-(length + 1) % 64)), dtype=np.uint8)
    padded[:, :length] = chunks
    padded[:, length] = 0x01
    padded[:, -1] |= 0x80
    words = padded.view("<u4").astype(np.uint32)
    st = np.zeros((n, 25), dtype=np.uint32)
    for off in range(0, words.shape[1], 16):
        st[:, :16] ^= words[:, off:off + 16]
        st = keccak_f800_batch(st)
    return np.ascontiguousarray(st[:, :8], dtype="<u4").view(np.uint8)
