"""The PhiHash proof-of-work function.

Pipeline for one ``(header, nonce, height)``::

    keccak_init -> seed -> init_mix -> 64 x mix_round -> lane digest -> keccak_finalize

The mix is a 16 x 32 array of uint32 registers (lanes x registers). Every lane
executes the same instruction stream: the per-period :class:`RoundSchedule`
fixes register choices and a 256-entry branch table, and each operation's
selector is looked up in that table with the low byte of a lane-reduced mix
register. Only the data differs between lanes.
"""
from __future__ import annotations

import enum
import importlib.resources
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .epoch import (
    FNV_OFFSET,
    FNV_PRIME,
    EpochContext,
    EpochMismatchError,
    _calc_item_words,
    calc_dataset_items,
    epoch_of_block,
    fnv1a,
)
from .fp32 import fp32_apply_array
from .keccak import (
    bytes_to_words,
    keccak_f800_batch,
    keccak_finalize,
    keccak_init,
    words_to_bytes,
)
from .rng import MASK64, MULTIPLIER, Pcg32

LANES = 16
REGS = 32
ROUNDS = 64
OPS_PER_ROUND = 8
DAG_WORDS_PER_LANE = 4
BRANCH_TABLE_SIZE = 256
PERIOD_BLOCKS = 64
SCHEDULE_TAG = 0x5048_4943_4F49_4E00  # b"PHICOIN\0"

MAX_NONCE = MASK64


class Op(enum.IntEnum):
    ADD = 0
    MUL = 1
    XOR = 2
    ROTL = 3
    CLZ = 4
    FADD = 5
    FMUL = 6
    FDIV = 7
    FSIN = 8
    FCOS = 9
    FTANH = 10

    @property
    def is_fp(self) -> bool:
        return self >= Op.FADD


NUM_OPS = len(Op)
_FP_NAMES = {Op.FADD: "fadd", Op.FMUL: "fmul", Op.FDIV: "fdiv",
             Op.FSIN: "fsin", Op.FCOS: "fcos", Op.FTANH: "ftanh"}

_U31 = np.uint32(31)
_PRIME = np.uint32(FNV_PRIME)
_LANE_IDX = np.arange(LANES)
_K_IDX = np.arange(DAG_WORDS_PER_LANE)
_DAG_WORD_IDX = (_LANE_IDX[:, None] + _K_IDX[None, :]) % LANES


def _clz32(x: np.ndarray) -> np.ndarray:
    _, exp = np.frexp(x.astype(np.float64))
    return (32 - exp).astype(np.uint32)


def apply_op(op: Op, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Evaluate one selector on uint32 lane vectors."""
    if op == Op.ADD:
        return a + b
    if op == Op.MUL:
        return a * b
    if op == Op.XOR:
        return a ^ b
    if op == Op.ROTL:
        s = b & _U31
        return (a << s) | (a >> ((np.uint32(32) - s) & _U31))
    if op == Op.CLZ:
        return _clz32(a) + _clz32(b)
    return fp32_apply_array(_FP_NAMES[op], a, b)


# ---------------------------------------------------------------------------
# schedule
# ---------------------------------------------------------------------------
class Instruction(NamedTuple):
    select_reg: int
    src1: int
    src2: int
    dst: int


@dataclass(frozen=True)
class RoundSchedule:
    epoch: int
    period: int
    branch_table: tuple[int, ...]
    dag_src: tuple[int, ...]
    dag_dst: tuple[int, ...]
    instructions: tuple[tuple[Instruction, ...], ...]

    def to_bytes(self) -> bytes:
        out = bytearray(self.branch_table)
        for r in range(ROUNDS):
            out += bytes((self.dag_src[r], self.dag_dst[r]))
            for ins in self.instructions[r]:
                out += bytes(ins)
        return bytes(out)


@lru_cache(maxsize=64)
def build_round_schedule(epoch: int, period: int) -> RoundSchedule:
    """Derive the nonce-independent schedule for one 64-block period.

    Draw order: 255 Fisher-Yates swaps over the table ``i % NUM_OPS``; then per
    round the DAG source and destination registers, then for each of the 8
    instructions its select, src1, src2 and dst registers.
    """
    rng = Pcg32(((epoch << 32) | period) & MASK64, SCHEDULE_TAG)
    table = [i % NUM_OPS for i in range(BRANCH_TABLE_SIZE)]
    for i in range(BRANCH_TABLE_SIZE - 1, 0, -1):
        j = rng() % (i + 1)
        table[i], table[j] = table[j], table[i]
    dag_src, dag_dst, instructions = [], [], []
    for _ in range(ROUNDS):
        dag_src.append(rng() % REGS)
        dag_dst.append(rng() % REGS)
        instructions.append(tuple(
            Instruction(rng() % REGS, rng() % REGS, rng() % REGS, rng() % REGS)
            for _ in range(OPS_PER_ROUND)
        ))
    return RoundSchedule(epoch, period, tuple(table), tuple(dag_src), tuple(dag_dst),
                         tuple(instructions))


# ---------------------------------------------------------------------------
# mix
# ---------------------------------------------------------------------------
def lane_stream(lane: int) -> int:
    # PCG ignores bit 0 of inc, so lanes 2k and 2k+1 would share a stream under
    # initseq = lane; doubling keeps every lane on its own odd increment
    return lane << 1


def init_mix(seed: int) -> np.ndarray:
    """Lane ``l`` holds 32 draws of ``Pcg32(seed, lane_stream(l))``."""
    return np.array([Pcg32(seed, lane_stream(lane)).draws(REGS) for lane in range(LANES)],
                    dtype=np.uint32)


def lane_reduce(column: np.ndarray) -> int:
    h = FNV_OFFSET
    for v in column.tolist():
        h = fnv1a(h, v)
    return h


def dag_index(mix: np.ndarray, round_index: int, schedule: RoundSchedule, num_items: int) -> int:
    return lane_reduce(mix[:, schedule.dag_src[round_index]]) % num_items


ItemLookup = Callable[[int], Sequence[int]]


def _mix_round(mix: np.ndarray, r: int, schedule: RoundSchedule,
               lookup: ItemLookup, num_items: int) -> None:
    idx = dag_index(mix, r, schedule, num_items)
    words = np.asarray(lookup(idx), dtype=np.uint32)
    cols = (schedule.dag_dst[r] + _K_IDX) % REGS
    mix[:, cols] = (mix[:, cols] ^ words[_DAG_WORD_IDX]) * _PRIME

    table = schedule.branch_table
    for sel, s1, s2, dst in schedule.instructions[r]:
        key = int(np.bitwise_xor.reduce(mix[:, sel])) & 0xFF
        res = apply_op(Op(table[key]), mix[:, s1], mix[:, s2])
        mix[:, dst] = (mix[:, dst] ^ res) * _PRIME


def mix_round(mix: np.ndarray, round_index: int, schedule: RoundSchedule,
              ctx: EpochContext) -> np.ndarray:
    if not 0 <= round_index < ROUNDS:
        raise ValueError(f"round_index must be in [0, {ROUNDS})")
    out = np.array(mix, dtype=np.uint32, copy=True)
    with np.errstate(over="ignore"):
        _mix_round(out, round_index, schedule, ctx.item_words, ctx.num_dataset_items)
    return out


def mix_digest(mix: np.ndarray) -> bytes:
    lane_hash = np.full(LANES, FNV_OFFSET, dtype=np.uint32)
    for reg in range(REGS):
        lane_hash = (lane_hash ^ mix[:, reg]) * _PRIME
    digest = [FNV_OFFSET] * 8
    for lane, h in enumerate(lane_hash.tolist()):
        digest[lane % 8] = fnv1a(digest[lane % 8], h)
    return words_to_bytes(digest)


# ---------------------------------------------------------------------------
# hashing and verification
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class PhiHashResult:
    mix_digest: bytes
    final_hash: bytes


def _check_epoch(ctx: EpochContext, height: int) -> None:
    e = epoch_of_block(ctx.profile, height)
    if e != ctx.epoch_number:
        raise EpochMismatchError(
            f"height {height} is in epoch {e}, context is for epoch {ctx.epoch_number}")


def _check_nonce(nonce: int) -> None:
    if not 0 <= nonce <= MAX_NONCE:
        raise ValueError("nonce must be a 64-bit unsigned integer")


def _hash(ctx: EpochContext, header_hash: bytes, nonce: int, height: int,
          lookup: ItemLookup) -> PhiHashResult:
    _check_nonce(nonce)
    st, seed = keccak_init(header_hash, nonce)
    mix = init_mix(seed)
    schedule = build_round_schedule(ctx.epoch_number, height // PERIOD_BLOCKS)
    with np.errstate(over="ignore"):
        for r in range(ROUNDS):
            _mix_round(mix, r, schedule, lookup, ctx.num_dataset_items)
    digest = mix_digest(mix)
    return PhiHashResult(digest, keccak_finalize(st, digest))


def hash_full(ctx: EpochContext, header_hash: bytes, nonce: int, height: int) -> PhiHashResult:
    """Hash using the materialised dataset (see :meth:`EpochContext.materialize`)."""
    _check_epoch(ctx, height)
    if ctx.dataset is None:
        raise ValueError("context has no materialised dataset; use hash_light")
    data = ctx.dataset
    return _hash(ctx, header_hash, nonce, height, data.__getitem__)


def hash_light(ctx: EpochContext, header_hash: bytes, nonce: int, height: int) -> PhiHashResult:
    """Hash computing every dataset item on demand from the light cache."""
    _check_epoch(ctx, height)
    return _hash(ctx, header_hash, nonce, height, lambda i: _calc_item_words(ctx, i))


# ---------------------------------------------------------------------------
# batched evaluation: many nonces at once, same results as the scalar path
# ---------------------------------------------------------------------------
def _pcg32_batch(state: np.ndarray, inc: np.ndarray, n: int) -> np.ndarray:
    """``n`` draws from independent PCG32 streams; returns ``state.shape + (n,)``."""
    state = state.astype(np.uint64, copy=True)
    step = inc.astype(np.uint64) | np.uint64(1)
    mult = np.uint64(MULTIPLIER)
    out = np.empty(state.shape + (n,), dtype=np.uint32)
    for k in range(n):
        old = state
        state = old * mult + step
        xs = (((old >> np.uint64(18)) ^ old) >> np.uint64(27)).astype(np.uint32)
        rot = (old >> np.uint64(59)).astype(np.uint32)
        out[..., k] = (xs >> rot) | (xs << ((np.uint32(32) - rot) & _U31))
    return out


def init_mix_batch(seeds: np.ndarray) -> np.ndarray:
    seeds = np.asarray(seeds, dtype=np.uint64)
    state = np.repeat(seeds[:, None], LANES, axis=1)
    inc = np.broadcast_to(np.arange(LANES, dtype=np.uint64) << np.uint64(1), state.shape)
    return _pcg32_batch(state, inc, REGS)


def hash_batch(ctx: EpochContext, header_hash: bytes, nonces: Sequence[int],
               height: int, light: bool = False) -> list[PhiHashResult]:
    """Hash one header against many nonces.

    Items come from the materialised dataset, or with ``light=True`` (or when no
    dataset exists) from vectorised on-demand generation.
    """
    _check_epoch(ctx, height)
    for n in nonces:
        _check_nonce(n)
    nonce_arr = np.asarray(list(nonces), dtype=np.uint64)
    b = nonce_arr.size
    if b == 0:
        return []
    if light or ctx.dataset is None:
        def fetch(idx):
            return calc_dataset_items(ctx, idx)
    else:
        data = ctx.dataset

        def fetch(idx):
            return data[idx.astype(np.intp)]

    st = np.zeros((b, 25), dtype=np.uint32)
    st[:, :8] = bytes_to_words(header_hash)
    st[:, 8] = (nonce_arr & np.uint64(0xFFFF_FFFF)).astype(np.uint32)
    st[:, 9] = (nonce_arr >> np.uint64(32)).astype(np.uint32)
    st = keccak_f800_batch(st)
    seeds = st[:, 0].astype(np.uint64) | (st[:, 1].astype(np.uint64) << np.uint64(32))
    mix = init_mix_batch(seeds)

    schedule = build_round_schedule(ctx.epoch_number, height // PERIOD_BLOCKS)
    table = np.array(schedule.branch_table, dtype=np.uint8)
    n_items = np.uint32(ctx.num_dataset_items)
    with np.errstate(over="ignore"):
        for r in range(ROUNDS):
            h = np.full(b, FNV_OFFSET, dtype=np.uint32)
            src = schedule.dag_src[r]
            for lane in range(LANES):
                h = (h ^ mix[:, lane, src]) * _PRIME
            words = fetch(h % n_items)
            cols = (schedule.dag_dst[r] + _K_IDX) % REGS
            mix[:, :, cols] = (mix[:, :, cols] ^ words[:, _DAG_WORD_IDX]) * _PRIME
            for sel, s1, s2, dst in schedule.instructions[r]:
                key = np.bitwise_xor.reduce(mix[:, :, sel], axis=1) & np.uint32(0xFF)
                ops = table[key]
                a, bb = mix[:, :, s1], mix[:, :, s2]
                res = np.empty((b, LANES), dtype=np.uint32)
                for op in np.unique(ops).tolist():
                    m = ops == op
                    res[m] = apply_op(Op(op), a[m], bb[m])
                mix[:, :, dst] = (mix[:, :, dst] ^ res) * _PRIME

        lane_hash = np.full((b, LANES), FNV_OFFSET, dtype=np.uint32)
        for reg in range(REGS):
            lane_hash = (lane_hash ^ mix[:, :, reg]) * _PRIME
        digest = np.full((b, 8), FNV_OFFSET, dtype=np.uint32)
        for lane in range(LANES):
            digest[:, lane % 8] = (digest[:, lane % 8] ^ lane_hash[:, lane]) * _PRIME

    st[:, 10:18] ^= digest
    final = keccak_f800_batch(st)[:, :8]
    return [PhiHashResult(words_to_bytes(d), words_to_bytes(f))
            for d, f in zip(digest.tolist(), final.tolist())]


def meets_boundary(final_hash: bytes, boundary: bytes) -> bool:
    """``final_hash <= boundary`` as big-endian 256-bit integers."""
    if len(final_hash) != 32 or len(boundary) != 32:
        raise ValueError("hash and boundary must be 32 bytes")
    return final_hash <= boundary


def verify_light(ctx: EpochContext, header_hash: bytes, nonce: int, height: int,
                 claimed_mix: bytes, boundary: bytes) -> bool:
    res = hash_light(ctx, header_hash, nonce, height)
    return res.mix_digest == claimed_mix and meets_boundary(res.final_hash, boundary)


def search(ctx: EpochContext, header_hash: bytes, height: int, boundary: bytes,
           nonce_start: int, nonce_count: int, workers: int = 1,
           chunk: int = 256) -> tuple[int, PhiHashResult] | None:
    """Return the lowest nonce in the range whose hash meets ``boundary``.

    The range is clipped at 2**64 - 1. With ``workers > 1`` nonces are hashed in
    parallel chunks; the answer is the same as the sequential scan.
    """
    if nonce_count < 1:
        raise ValueError("nonce_count must be >= 1")
    _check_epoch(ctx, height)
    _check_nonce(nonce_start)
    stop = min(nonce_start + nonce_count, MAX_NONCE + 1)

    def scan(lo: int, hi: int):
        for n, res in zip(range(lo, hi), hash_batch(ctx, header_hash, range(lo, hi), height)):
            if res.final_hash <= boundary:
                return n, res
        return None

    starts = range(nonce_start, stop, chunk)
    if workers <= 1:
        for lo in starts:
            hit = scan(lo, min(lo + chunk, stop))
            if hit is not None:
                return hit
        return None
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for i in range(0, len(starts), workers):
            batch = starts[i:i + workers]
            found = pool.map(lambda lo: scan(lo, min(lo + chunk, stop)), batch)
            for hit in found:  # map preserves order: first hit is the lowest
                if hit is not None:
                    return hit
    return None


# ---------------------------------------------------------------------------
# known-answer vectors
# ---------------------------------------------------------------------------
class KnownAnswer(NamedTuple):
    epoch: int
    height: int
    header_hash: bytes
    nonce: int
    mix_digest: bytes
    final_hash: bytes

    def to_line(self) -> str:
        return (f"{self.epoch} {self.height} {self.header_hash.hex()} {self.nonce:016x} "
                f"{self.mix_digest.hex()} {self.final_hash.hex()}")


def parse_kat(text: str) -> list[KnownAnswer]:
    records = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 6:
            raise ValueError(f"line {lineno}: expected 6 fields, got {len(parts)}")
        try:
            rec = KnownAnswer(int(parts[0]), int(parts[1]), bytes.fromhex(parts[2]),
                              int(parts[3], 16), bytes.fromhex(parts[4]), bytes.fromhex(parts[5]))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        if any(len(b) != 32 for b in (rec.header_hash, rec.mix_digest, rec.final_hash)):
            raise ValueError(f"line {lineno}: 256-bit fields need 64 hex chars")
        records.append(rec)
    return records


def read_kat(path: str | Path) -> list[KnownAnswer]:
    return parse_kat(Path(path).read_text())


def write_kat(path: str | Path, records: Sequence[KnownAnswer], comment: str = "") -> None:
    lines = [f"# {c}" for c in comment.splitlines()]
    lines.append("# epoch height header_hash nonce mix_digest final_hash")
    lines += [r.to_line() for r in records]
    Path(path).write_text("\n".join(lines) + "\n")


def builtin_kat() -> list[KnownAnswer]:
    """Frozen desk-profile vectors shipped with the package."""
    text = importlib.resources.files("phicoin").joinpath("data/desk_kat.txt").read_text()
    return parse_kat(text)
