"""Built-in consistency checks run by ``phicoin selftest``.

Each check returns ``(name, passed, detail)``. The frozen values live in
``data/regression.json`` and ``data/desk_kat.txt``.
"""
from __future__ import annotations

import importlib.resources
import json
from typing import Callable, Iterator

import numpy as np

from . import epoch as ep
from .fp32 import FP_OPS, fp32_apply, fp32_apply_array, golden_inputs
from .keccak import keccak_digest, keccak_f800
from .phihash import builtin_kat, build_round_schedule, hash_batch, hash_light, verify_light
from .rng import Pcg32, pcg32_new, pcg32_next
from .staking import parse_scenario, run_scenario
from .tokenomics import (
    AmountPhi,
    fee_split,
    inflation_rate,
    staking_apr,
    supply_at,
    tps,
)

Check = tuple[str, bool, str]


def regression_values() -> dict:
    text = importlib.resources.files("phicoin").joinpath("data/regression.json").read_text()
    return json.loads(text)


def _pcg() -> Check:
    out0, s = pcg32_next(pcg32_new(0, 0))
    out1, s1 = pcg32_next(pcg32_new(1, 0))
    ok = (out0, s.state, out1, s1.state) == (0, 1, 0, 6364136223846793006)
    ok &= Pcg32(7, 2).draws(64) == Pcg32(7, 3).draws(64)
    return "pcg32 hand-evaluated cases", ok, f"(0,0)->{out0}, (1,0)->{out1}"


def _keccak() -> Check:
    lane0 = keccak_f800([0] * 25)[0]
    return "keccak-f800 zero state", lane0 == 0xE531D45D, f"lane0={lane0:08x}"


def _fp32(reg: dict) -> Check:
    bad = [op for op in FP_OPS
           if keccak_digest(fp32_apply_array(op, *golden_inputs(op)).astype("<u4").tobytes()).hex()
           != reg["fp32_golden_digests"][op]]
    ok = not bad and fp32_apply("ftanh", 0) == 0 and fp32_apply("fdiv", 0x3F80_0000, 0) == 0x7F7F_FFFF
    return "fp32 golden vectors (4096 x 6 ops)", ok, f"mismatch: {bad}" if bad else "all ops match"


def _sizes() -> Check:
    sizes = [ep.dataset_num_items(ep.DESK, e) for e in range(9)]
    ratios = [b / a for a, b in zip(sizes, sizes[1:])]
    ok = all(ep.is_prime(s) for s in sizes) and all(abs(r - 1.25) <= 0.01 for r in ratios)
    gib = [ep.dataset_num_items(ep.MAINNET, e) * 64 / 2**30 for e in range(3)]
    ok &= all(abs(g / t - 1) < 1e-3 for g, t in zip(gib, (4, 5, 6.25)))
    return "dag growth law", ok, "mainnet GiB " + ", ".join(f"{g:.4f}" for g in gib)


def _cache(reg: dict, ctx: ep.EpochContext) -> Check:
    digest = keccak_digest(ctx.light_cache.astype("<u4").tobytes()).hex()
    item0 = ep.calc_dataset_item(ctx, 0).hex()
    ok = digest == reg["desk_epoch0_cache_digest"] and item0 == reg["desk_epoch0_item0"]
    return "desk light cache / item 0 regression", ok, digest[:16]


def _dataset_paths(ctx: ep.EpochContext) -> Check:
    idx = np.array([0, 1, 2, 250, 251, 4097, ctx.num_dataset_items - 1], dtype=np.uint64)
    batch = ep.calc_dataset_items(ctx, idx)
    ok = all(batch[i].tolist() == ep._calc_item_words(ctx, int(n)) for i, n in enumerate(idx))
    return "dataset batch vs light path", ok, f"{len(idx)} indices"


def _kat(contexts: dict[int, ep.EpochContext]) -> Check:
    records = builtin_kat()
    bad = 0
    for rec in records:
        ctx = contexts.setdefault(rec.epoch, ep.build_light_cache(ep.DESK, rec.epoch))
        res = hash_light(ctx, rec.header_hash, rec.nonce, rec.height)
        batch = hash_batch(ctx, rec.header_hash, [rec.nonce], rec.height, light=True)[0]
        good = (res.mix_digest, res.final_hash) == (rec.mix_digest, rec.final_hash) == (
            batch.mix_digest, batch.final_hash)
        good &= verify_light(ctx, rec.header_hash, rec.nonce, rec.height, rec.mix_digest,
                             b"\xff" * 32)
        bad += not good
    return "phihash known-answer vectors", bad == 0, f"{len(records) - bad}/{len(records)} match"


def _schedule() -> Check:
    a, b = build_round_schedule(0, 0), build_round_schedule(0, 1)
    ok = a.to_bytes() != b.to_bytes() and max(a.branch_table) < 11
    return "round schedule derivation", ok, f"{len(a.to_bytes())} schedule bytes"


def _tokenomics() -> Check:
    ten_m = AmountPhi.from_phi(10_000_000)
    ok = round(float(inflation_rate(1)) * 100, 2) == 4.76
    ok &= abs(float(inflation_rate(2)) * 100 - 2.32) <= 0.02
    ok &= supply_at(2_102_400) == AmountPhi.from_phi(220_752_000)
    ok &= float(staking_apr(1, ten_m)) == 0.05256 and float(staking_apr(2, ten_m)) == 0.02628
    ok &= round(tps()) == 1243
    ok &= fee_split(AmountPhi.from_phi(5)) == tuple(
        AmountPhi.from_phi(v) for v in ("4.75", "0.15", "0.10"))
    return "tokenomics figures", ok, "inflation, supply, APR, TPS, fee split"


def _staking() -> Check:
    res = run_scenario(parse_scenario("deposit s 10000000 0\nend 2102400\n"))
    apr = res.positions[0].apr(res.blocks_per_year)
    return "staking year-1 APR", float(apr) == 0.05256, f"{float(apr) * 100:.3f}%"


def run_checks() -> Iterator[Check]:
    reg = regression_values()
    contexts = {0: ep.build_light_cache(ep.DESK, 0)}
    steps: list[Callable[[], Check]] = [
        _pcg,
        _keccak,
        lambda: _fp32(reg),
        _sizes,
        lambda: _cache(reg, contexts[0]),
        lambda: _dataset_paths(contexts[0]),
        _schedule,
        lambda: _kat(contexts),
        _tokenomics,
        _staking,
    ]
    for step in steps:
        try:
            yield step()
        except Exception as exc:  # a crashing check is a failing check
            yield getattr(step, "__name__", "check"), False, f"error: {exc!r}"
