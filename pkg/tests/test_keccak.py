import random
import struct

import numpy as np
import pytest

from oracles import keccak_f800_textbook
from phicoin.keccak import (
    bytes_to_words,
    keccak_digest,
    keccak_digest_many,
    keccak_f800,
    keccak_f800_batch,
    keccak_finalize,
    keccak_hash32,
    keccak_init,
    keccak_item,
    keccak_items_batch,
)

rng = random.Random(800)


def rand_state():
    return [rng.getrandbits(32) for _ in range(25)]


def popcount_diff(a, b):
    return sum(bin(x ^ y).count("1") for x, y in zip(a, b))


def test_zero_state_first_lane():
    # value from oracles.keccak_f800_textbook
    assert keccak_f800([0] * 25)[0] == 0xE531D45D


@pytest.mark.parametrize("state", [rand_state() for _ in range(20)] + [[0xFFFFFFFF] * 25])
def test_matches_textbook(state):
    assert keccak_f800(state) == keccak_f800_textbook(state)


def test_batch_matches_textbook():
    states = [rand_state() for _ in range(64)]
    out = keccak_f800_batch(np.array(states, dtype=np.uint32))
    assert out.tolist() == [keccak_f800_textbook(s) for s in states]


def test_does_not_mutate_input():
    s = rand_state()
    copy = list(s)
    keccak_f800(s)
    assert s == copy


def test_twice_differs_from_once():
    s = rand_state()
    once = keccak_f800(s)
    assert keccak_f800(once) != once


def test_single_bit_avalanche():
    s = rand_state()
    t = list(s)
    t[7] ^= 1 << 13
    assert popcount_diff(keccak_f800_textbook(s), keccak_f800_textbook(t)) >= 300
    assert popcount_diff(keccak_f800(s), keccak_f800(t)) >= 300


def test_distinct_inputs_distinct_outputs():
    states = {tuple(rand_state()) for _ in range(200)}
    assert len({tuple(keccak_f800(list(s))) for s in states}) == len(states)


def test_init_zero_header_seed():
    st, seed = keccak_init(bytes(32), 0)
    # lanes 0-1 of the textbook permutation of the all-zero state
    assert seed == 0xF404C6FBE531D45D
    assert st == keccak_f800_textbook([0] * 25)


def test_init_layout():
    header = bytes([1]) + bytes(31)
    assert bytes_to_words(header)[0] == 0x00000001
    nonce = 0x1122334455667788
    absorbed = bytes_to_words(header) + [0x55667788, 0x11223344] + [0] * 15
    st, _ = keccak_init(header, nonce)
    assert st == keccak_f800_textbook(absorbed)


def test_init_nonce_changes_seed():
    assert keccak_init(bytes(32), 0)[1] != keccak_init(bytes(32), 1)[1]


def test_finalize_zero_vector():
    st, _ = keccak_init(bytes(32), 0)
    out = keccak_finalize(st, bytes(32))
    ref = keccak_f800_textbook(keccak_f800_textbook([0] * 25))
    assert out == struct.pack("<8I", *ref[:8])
    assert out.hex() == "0d2dbf75890e619b40af26c8ab84cd64d6bd05f9352883bcb901805fce2c6615"


def test_finalize_distinguishes_mix():
    st, _ = keccak_init(bytes(range(32)), 5)
    a = keccak_finalize(st, bytes(32))
    b = keccak_finalize(st, bytes(31) + b"\x01")
    assert a != b
    assert len(a) == len(b) == 32


def test_every_input_bit_reaches_final_hash():
    header = bytes(rng.getrandbits(8) for _ in range(32))
    nonce = rng.getrandbits(64)
    mix = bytes(rng.getrandbits(8) for _ in range(32))

    def final(h, n, m):
        st, _ = keccak_init(h, n)
        return keccak_finalize(st, m)

    base = final(header, nonce, mix)
    positions = rng.sample(range(256 + 64 + 256), 256)
    for pos in positions:
        h, n, m = bytearray(header), nonce, bytearray(mix)
        if pos < 256:
            h[pos // 8] ^= 1 << (pos % 8)
        elif pos < 320:
            n ^= 1 << (pos - 256)
        else:
            m[(pos - 320) // 8] ^= 1 << (pos % 8)
        assert final(bytes(h), n, bytes(m)) != base


def test_length_checks():
    with pytest.raises(ValueError):
        keccak_init(bytes(31), 0)
    st, _ = keccak_init(bytes(32), 0)
    with pytest.raises(ValueError):
        keccak_finalize(st, bytes(33))


def test_item_helpers_agree():
    items = np.array([[rng.getrandbits(32) for _ in range(16)] for _ in range(10)], dtype=np.uint32)
    batch = keccak_items_batch(items)
    for row, out in zip(items.tolist(), batch.tolist()):
        assert keccak_item(row) == out == keccak_f800_textbook(row + [0] * 9)[:16]


def test_hash32_is_init_squeeze():
    assert keccak_hash32(bytes(32)) == struct.pack("<8I", *keccak_f800_textbook([0] * 25)[:8])


def test_digest_sensitive_to_length_and_content():
    assert keccak_digest(b"") != keccak_digest(b"\x00")
    assert keccak_digest(b"a" * 64) != keccak_digest(b"a" * 65)
    assert len(keccak_digest(b"x" * 1000)) == 32


@pytest.mark.parametrize("length", [0, 1, 63, 64, 65, 4096])
def test_digest_many_matches_scalar(length):
    data = np.array([[rng.getrandbits(8) for _ in range(length)] for _ in range(3)],
                    dtype=np.uint8).reshape(3, length)
    out = keccak_digest_many(data)
    assert [row.tobytes() for row in out] == [keccak_digest(r.tobytes()) for r in data]
