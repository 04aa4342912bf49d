"""Command-line front end.

Exit codes: 0 success/accept, 2 verification reject, 64 usage error,
65 epoch/context mismatch. All 256-bit values are big-endian hex without
a prefix (64 characters).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path
from typing import Sequence

from . import epoch as ep
from .phihash import hash_batch, hash_light, meets_boundary, search
from .profiles import get_profile
from .selftest import run_checks
from .staking import ScenarioError, parse_scenario, run_scenario
from .tokenomics import emission_table

EXIT_OK = 0
EXIT_REJECT = 2
EXIT_USAGE = 64
EXIT_MISMATCH = 65


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _hex256(text: str) -> bytes:
    if len(text) != 64:
        raise UsageError(f"expected 64 hex characters, got {len(text)}: {text!r}")
    try:
        return bytes.fromhex(text)
    except ValueError:
        raise UsageError(f"malformed hex: {text!r}") from None


def _uint(text: str, what: str, bits: int | None = None) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise UsageError(f"malformed {what}: {text!r}") from None
    if value < 0 or (bits is not None and value >= 1 << bits):
        raise UsageError(f"{what} out of range: {text}")
    return value


def _emit(rows: list[dict], fmt: str, out) -> None:
    if fmt == "json":
        json.dump(rows if len(rows) != 1 else rows[0], out, indent=2)
        out.write("\n")
    elif fmt == "csv":
        w = csv.DictWriter(out, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    else:
        for row in rows:
            width = max(len(k) for k in row)
            for k, v in row.items():
                out.write(f"{k:<{width}}  {v}\n")


def _context(args, height: int, need_dataset: bool = False) -> ep.EpochContext:
    profile = get_profile(args.profile)
    epoch = ep.epoch_of_block(profile.size, height)
    if args.epoch is not None and args.epoch != epoch:
        raise ep.EpochMismatchError(f"--epoch {args.epoch} but height {height} is in epoch {epoch}")
    if profile.name == "mainnet" and not args.allow_large:
        raise UsageError("mainnet cache/DAG needs multi-GB memory; pass --allow-large to proceed")
    ctx = ep.build_light_cache(profile.size, epoch)
    return ctx.materialize() if need_dataset else ctx


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------
def cmd_dag_info(args, out) -> int:
    profile = get_profile(args.profile)
    if args.epoch is None or args.epoch < 0:
        raise UsageError("--epoch must be given and non-negative")
    e = args.epoch
    try:
        items = ep.dataset_num_items(profile.size, e)
        cache = ep.cache_num_items(profile.size, e)
    except ep.OutOfRangeError as exc:
        raise UsageError(str(exc)) from None
    row = {
        "profile": profile.name,
        "epoch": e,
        "first_block": e * profile.size.epoch_length_blocks,
        "dataset_items": items,
        "dataset_bytes": items * ep.ITEM_BYTES,
        "dataset_gib": round(items * ep.ITEM_BYTES / 2**30, 6),
        "cache_items": cache,
        "cache_bytes": cache * ep.ITEM_BYTES,
        "seed_hash": ep.epoch_seed(e).hex(),
        "growth_vs_prev": (round(items / ep.dataset_num_items(profile.size, e - 1), 6)
                           if e > 0 else ""),
    }
    _emit([row], args.out, out)
    return EXIT_OK


def cmd_hash(args, out) -> int:
    header = _hex256(args.header)
    nonce = _uint(args.nonce, "nonce", 64)
    ctx = _context(args, args.height)
    res = hash_light(ctx, header, nonce, args.height)
    _emit([{"epoch": ctx.epoch_number, "height": args.height, "header_hash": header.hex(),
            "nonce": f"{nonce:016x}", "mix_digest": res.mix_digest.hex(),
            "final_hash": res.final_hash.hex()}], args.out, out)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    header = _hex256(args.header)
    claimed = _hex256(args.mix)
    boundary = _hex256(args.boundary)
    nonce = _uint(args.nonce, "nonce", 64)
    ctx = _context(args, args.height)
    res = hash_light(ctx, header, nonce, args.height)
    mix_ok = res.mix_digest == claimed
    target_ok = meets_boundary(res.final_hash, boundary)
    verdict = "accept" if mix_ok and target_ok else "reject"
    _emit([{"result": verdict, "mix_ok": mix_ok, "boundary_ok": target_ok,
            "final_hash": res.final_hash.hex()}], args.out, out)
    return EXIT_OK if verdict == "accept" else EXIT_REJECT


def cmd_mine(args, out) -> int:
    header = _hex256(args.header)
    boundary = _hex256(args.boundary)
    start = _uint(args.nonce, "nonce", 64)
    if args.nonce_count < 1:
        raise UsageError("--nonce-count must be >= 1")
    ctx = _context(args, args.height, need_dataset=True)
    hit = search(ctx, header, args.height, boundary, start, args.nonce_count, workers=args.workers)
    if hit is None:
        _emit([{"result": "exhausted", "nonce_start": f"{start:016x}",
                "nonce_count": args.nonce_count}], args.out, out)
        return EXIT_OK
    nonce, res = hit
    _emit([{"result": "found", "nonce": f"{nonce:016x}", "mix_digest": res.mix_digest.hex(),
            "final_hash": res.final_hash.hex()}], args.out, out)
    return EXIT_OK


def cmd_emission(args, out) -> int:
    if args.years < 1:
        raise UsageError("--years must be >= 1")
    rows = [{
        "year": r["year"],
        "block_reward": str(r["block_reward"]),
        "annual_emission": str(r["annual_emission"]),
        "end_supply": str(r["end_supply"]),
        "inflation_pct": f"{float(r['inflation_pct']):.4f}",
    } for r in emission_table(args.years)]
    _emit(rows, args.out, out)
    return EXIT_OK


def cmd_staking_sim(args, out) -> int:
    try:
        text = Path(args.scenario).read_text()
    except OSError as exc:
        raise UsageError(str(exc)) from None
    try:
        result = run_scenario(parse_scenario(text))
    except ScenarioError as exc:
        raise UsageError(f"{args.scenario}: {exc}") from None
    weeks = [{
        "week": s.week_index, "start_height": s.start_height, "end_height": s.end_height,
        "owner": result.owners[pid], "position": pid, "payout": str(amount),
    } for s in result.settlements for pid, amount in s.payouts.items()]
    summary = [{
        "position": p.position_id, "owner": p.owner, "staked": str(p.amount),
        "accrued": str(p.accrued), "earning_blocks": p.earning_blocks,
        "apr_pct": f"{float(p.apr(result.blocks_per_year)) * 100:.4f}",
    } for p in result.positions]
    if args.out == "json":
        json.dump({"weeks": weeks, "summary": summary}, out, indent=2)
        out.write("\n")
    else:
        if weeks:
            _emit(weeks, "csv", out)
            out.write("\n")
        if summary:
            _emit(summary, "csv", out)
    return EXIT_OK


def cmd_selftest(args, out) -> int:
    failed = 0
    for name, ok, detail in run_checks():
        failed += not ok
        out.write(f"{'PASS' if ok else 'FAIL'}  {name}  ({detail})\n")
    out.write("selftest: all checks passed\n" if not failed else f"selftest: {failed} failed\n")
    return EXIT_OK if not failed else 1


def cmd_bench(args, out) -> int:
    if args.nonce_count < 1:
        raise UsageError("--nonce-count must be >= 1")
    ctx = _context(args, args.height, need_dataset=True)
    header = bytes(32)
    t0 = time.perf_counter()
    hash_batch(ctx, header, range(args.nonce_count), args.height)
    elapsed = time.perf_counter() - t0
    _emit([{"profile": args.profile, "hashes": args.nonce_count,
            "seconds": f"{elapsed:.3f}",
            "hashes_per_second": f"{args.nonce_count / elapsed:.1f}",
            "deterministic": "no (timing)"}], args.out, out)
    return EXIT_OK


def cmd_dump(args, out) -> int:
    ctx = _context(args, args.height, need_dataset=args.dataset_file is not None)
    profile = get_profile(args.profile).size
    ep.write_dump(args.cache_file, profile, ctx.epoch_number, ctx.light_cache)
    if args.dataset_file:
        ep.write_dump(args.dataset_file, profile, ctx.epoch_number, ctx.dataset)
    out.write(f"wrote epoch {ctx.epoch_number} ({ctx.num_cache_items} cache items"
              f"{', %d dataset items' % ctx.num_dataset_items if args.dataset_file else ''})\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="phicoin", description="PhiHash proof-of-work and tokenomics tools")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--profile", default="desk", choices=["desk", "mainnet"])
        p.add_argument("--out", default="text", choices=["text", "csv", "json"])
        p.add_argument("--epoch", type=int, default=None, help="optional; must agree with --height")
        p.add_argument("--height", type=int, default=0)
        p.add_argument("--allow-large", action="store_true",
                       help="confirm multi-GB mainnet cache/DAG allocation")

    p = sub.add_parser("dag-info", help="epoch sizes and seed")
    p.add_argument("--profile", default="desk", choices=["desk", "mainnet"])
    p.add_argument("--out", default="text", choices=["text", "csv", "json"])
    p.add_argument("--epoch", type=int, default=0)
    p.set_defaults(func=cmd_dag_info)

    p = sub.add_parser("hash", help="compute mix digest and final hash")
    common(p)
    p.add_argument("--header", required=True)
    p.add_argument("--nonce", default="0")
    p.set_defaults(func=cmd_hash)

    p = sub.add_parser("verify", help="light verification; exit 0 accept, 2 reject")
    common(p)
    p.add_argument("--header", required=True)
    p.add_argument("--nonce", default="0")
    p.add_argument("--mix", required=True)
    p.add_argument("--boundary", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("mine", help="scan a nonce range for the first hash under the boundary")
    common(p)
    p.add_argument("--header", required=True)
    p.add_argument("--boundary", required=True)
    p.add_argument("--nonce", default="0", help="first nonce")
    p.add_argument("--nonce-count", type=int, default=4096)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("emission", help="yearly emission and inflation table")
    p.add_argument("--years", type=int, default=15)
    p.add_argument("--out", default="csv", choices=["text", "csv", "json"])
    p.set_defaults(func=cmd_emission)

    p = sub.add_parser("staking-sim", aliases=["stake"], help="run a staking scenario file")
    p.add_argument("scenario")
    p.add_argument("--out", default="csv", choices=["csv", "json"])
    p.set_defaults(func=cmd_staking_sim)

    p = sub.add_parser("selftest", help="known-answer and invariant checks")
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("bench", help="hashes per second (timing is not deterministic)")
    common(p)
    p.add_argument("--nonce-count", type=int, default=1024)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("dump", help="write cache (and optionally dataset) dump files")
    common(p)
    p.add_argument("--cache-file", required=True)
    p.add_argument("--dataset-file", default=None)
    p.set_defaults(func=cmd_dump)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"phicoin: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ep.EpochMismatchError as exc:
        print(f"phicoin: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except ValueError as exc:
        print(f"phicoin: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run(argv: Sequence[str] | None = None) -> str:
    """Run a command and return its standard output (handy in notebooks)."""
    buf = io.StringIO()
    main(argv, buf)
    return buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())
