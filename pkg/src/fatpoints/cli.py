"""Command-line front-end: dim, classify, prove and cache verbs."""

from __future__ import annotations

import argparse
import asyncio
import logging
import sys
from pathlib import Path
from typing import Any, NoReturn, Optional, Sequence, TextIO

from pydantic import ValidationError

from . import __version__, oracle
from .cache import CacheEntry, CacheFile, source_for
from .classifier import classify
from .config import FatpointsConfig
from .core import LinearSystem, Source, expected_dimension, virtual_dimension
from .cremona import evaluate
from .exceptions import CacheError, FatpointsError
from .prover import Hint, Prover
from .sweep import (
    Channel,
    ProveSummary,
    Row,
    SweepSpec,
    classify_row,
    parse_range,
    prove_worker,
    render,
    row_worker,
    run_sweep,
)
from .trace import ProofTrace, check_trace, trace_filename

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors with exit status 1."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _hint(text: str) -> Hint:
    try:
        k, b = (int(part) for part in text.split(":"))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"hint must look like K:B, got {text!r}") from e
    return k, b


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prime", type=int, help="field characteristic for the oracle")
    common.add_argument("--trials", type=int, help="oracle trials")
    common.add_argument("--seed", type=int, help="oracle seed")
    common.add_argument("--format", choices=("csv", "json"), default="csv", dest="fmt")
    common.add_argument("--out", type=Path, help="output file (or directory for prove)")
    common.add_argument("--cache", type=Path, help="cache file to record results in")
    common.add_argument("--workers", type=int, help="worker processes for sweeps")
    common.add_argument(
        "--negative-clamp",
        choices=("oracle", "exceptional"),
        help="treatment of Cremona multiplicities <= -2",
    )
    common.add_argument("--log-level", help="logging level")
    return common


def _sweep_options(parser: argparse.ArgumentParser, *, required: bool) -> None:
    parser.add_argument("--d", type=parse_range, required=required, help="degree range a:b")
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--m0", type=parse_range, help="m0 range a:b (default 0:d)")
    group.add_argument("--m0-offset", type=parse_range, help="m0 = d - c for c in range a:b")
    points = parser.add_mutually_exclusive_group()
    points.add_argument("--n", type=parse_range, help="point count range a:b")
    points.add_argument("--critical", action="store_true", help="boundary n values only")
    parser.add_argument("--m", type=int, default=4, help="multiplicity of the n points")


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = _Parser(prog="fatpoints", description="Dimensions of quasi-homogeneous systems")
    parser.add_argument("--version", action="version", version=f"fatpoints {__version__}")
    verbs = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    dim = verbs.add_parser("dim", parents=[common], help="dimension of one system")
    dim.add_argument("system", nargs="+", help="d m0 n m, or L(d,m0,n,m)")
    for channel in ("list", "cremona", "oracle", "prove"):
        dim.add_argument(f"--{channel}", action="store_true", help=f"use the {channel} channel")
    dim.add_argument("--all", action="store_true", help="every channel")
    dim.add_argument(
        "--replay", action="store_true", help="also replay the fixed regression points"
    )

    classify_verb = verbs.add_parser("classify", parents=[common], help="classification table")
    _sweep_options(classify_verb, required=True)
    channel = classify_verb.add_mutually_exclusive_group()
    channel.add_argument("--oracle", action="store_true", help="dimension column from the oracle")
    channel.add_argument("--prove", action="store_true", help="dimension column from the prover")

    prove = verbs.add_parser("prove", parents=[common], help="proof traces")
    prove.add_argument("system", nargs="*", help="d m0 n m, or L(d,m0,n,m)")
    _sweep_options(prove, required=False)
    prove.add_argument("--hint", type=_hint, action="append", default=[], help="try (K,B) first")
    prove.add_argument("--check", action="store_true", help="re-check every trace")

    cache = verbs.add_parser("cache", parents=[common], help="inspect or maintain a cache file")
    cache.add_argument("path", type=Path)
    cache.add_argument("action", choices=("inspect", "compact", "verify"))
    cache.add_argument("--sample", type=int, help="number of entries to verify")
    return parser


def _config(args: argparse.Namespace) -> FatpointsConfig:
    overrides: dict[str, Any] = {}
    for option, name in (
        ("prime", "prime"),
        ("trials", "trials"),
        ("seed", "seed"),
        ("workers", "max_workers"),
        ("negative_clamp", "negative_clamp"),
        ("log_level", "log_level"),
        ("cache", "cache_path"),
    ):
        value = getattr(args, option, None)
        if value is not None:
            overrides[name] = value
    return FatpointsConfig(**overrides)


def _system(tokens: Sequence[str]) -> LinearSystem:
    return LinearSystem.parse(" ".join(tokens))


def _cache(config: FatpointsConfig) -> Optional[CacheFile]:
    if config.cache_path is None:
        return None
    return CacheFile(config.cache_path, tool=f"fatpoints {config.tool_version}")


def _emit(text: str, out: Optional[Path], stream: TextIO) -> None:
    if out is None:
        stream.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")


# -- verbs ----------------------------------------------------------------------


def cmd_dim(args: argparse.Namespace, config: FatpointsConfig, stream: TextIO) -> int:
    s = _system(args.system)
    channels = [name for name in ("list", "cremona", "oracle", "prove") if getattr(args, name)]
    if args.all:
        channels = ["list", "cremona", "oracle", "prove"]
    if not channels:
        channels = ["prove"]

    lines = [str(s), f"v={virtual_dimension(s)} e={expected_dimension(s)}"]
    entries: list[CacheEntry] = []
    for channel in channels:
        if channel == "list":
            row = classify_row(s, "list", config)
            dim = "?" if row.dim is None else str(row.dim)
            lines.append(f"list: dim={dim} {row.verdict} ({row.rule})")
        elif channel == "cremona":
            outcome = evaluate(s, config)
            reduction = outcome.reduction
            state = "certified" if outcome.certified else "uncertified"
            dim = "?" if outcome.dimension is None else str(outcome.dimension)
            lines.append(
                f"cremona: dim={dim} {state} "
                f"({len(reduction.steps)} steps to {reduction.final}, {reduction.status.value})"
            )
        elif channel == "oracle":
            result = oracle.dimension(s, config=config)
            lines.append(
                f"oracle: dim={result.dimension} trials={result.trials} prime={result.prime}"
                f"{'' if result.unanimous else ' (not unanimous)'}"
            )
            entries.append(
                CacheEntry(s, result.dimension, Source.ORACLE, provenance=config.provenance())
            )
        else:
            trace = Prover(config).prove(s)
            claim = trace.claim
            state = "certified" if claim.certified else "uncertified"
            lines.append(f"prove: dim={claim.dimension} by {claim.rule.value} {state}")
            entries.append(
                CacheEntry(
                    s, claim.dimension, source_for(claim.rule), provenance=config.provenance()
                )
            )
    if args.replay:
        lines.append(f"replay: dim={oracle.replay(s, prime=config.prime)}")

    cache = _cache(config)
    if cache is not None and entries:
        # Replay keeps the last entry per key, so the oracle measurement goes last.
        entries.sort(key=lambda entry: entry.source is Source.ORACLE)
        cache.extend(entries)
    stream.write("\n".join(lines) + "\n")
    return EXIT_OK


def _spec(args: argparse.Namespace) -> SweepSpec:
    return SweepSpec(
        d=args.d,
        m0=args.m0,
        m0_offset=args.m0_offset,
        n=args.n,
        critical=args.critical,
        m=args.m,
        fmt=args.fmt,
    )


def cmd_classify(args: argparse.Namespace, config: FatpointsConfig, stream: TextIO) -> int:
    spec = _spec(args)
    systems = spec.systems()
    channel: Channel = "oracle" if args.oracle else "prove" if args.prove else "list"
    rows: list[Row]
    if channel == "list" or config.max_workers == 1:
        prover = Prover(config) if channel == "prove" else None
        rows = [classify_row(s, channel, config, prover) for s in systems]
    else:
        settings = config.model_dump()
        items = [(s.key, channel, settings) for s in systems]
        rows = asyncio.run(run_sweep(items, row_worker, config.max_workers))
    _emit(render(rows, spec.fmt), args.out, stream)
    special = sum(1 for s in systems if classify(s).special)
    logger.info(f"Classified {len(rows)} systems, {special} on the list")
    return EXIT_OK


def cmd_prove(args: argparse.Namespace, config: FatpointsConfig, stream: TextIO) -> int:
    if args.system and args.d is not None:
        raise FatpointsError("give a system or a sweep, not both")
    if args.system:
        systems = [_system(args.system)]
    elif args.d is not None:
        systems = _spec(args).systems()
    else:
        raise FatpointsError("give a system or a sweep range")

    if len(systems) == 1 or config.max_workers == 1:
        prover = Prover(config)
        traces = [prover.prove(s, hints=args.hint) for s in systems]
    else:
        settings = config.model_dump()
        items = [(s.key, list(args.hint), settings) for s in systems]
        raw = asyncio.run(run_sweep(items, prove_worker, config.max_workers))
        traces = [ProofTrace.from_json(text) for text in raw]

    out_dir: Path = args.out or Path("traces")
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = ProveSummary()
    entries: list[CacheEntry] = []
    for trace in traces:
        path = trace.write(out_dir / trace_filename(trace.root))
        summary.add(trace)
        claim = trace.claim
        entries.append(
            CacheEntry(
                trace.root,
                claim.dimension,
                source_for(claim.rule),
                trace=str(path),
                provenance=config.provenance(),
            )
        )
        if args.check:
            result = check_trace(ProofTrace.read(path), config)
            if not result:
                summary.failed_checks.append(trace.root)
                stream.write(
                    f"check failed for {trace.root} at {result.location}: {result.failure}\n"
                )

    cache = _cache(config)
    if cache is not None:
        cache.extend(entries)
    stream.write(summary.render())
    return EXIT_VERIFY if summary.failed_checks else EXIT_OK


def cmd_cache(args: argparse.Namespace, config: FatpointsConfig, stream: TextIO) -> int:
    cache = CacheFile(args.path, tool=f"fatpoints {config.tool_version}")
    try:
        if args.action == "inspect":
            info = cache.inspect()
            stream.write(f"path: {info.path}\nlines: {info.lines}\nentries: {info.entries}\n")
            for source, count in info.sources.items():
                stream.write(f"  {source}: {count}\n")
            stream.write(f"state: {info.state_hash}\n")
            return EXIT_OK
        if args.action == "compact":
            stream.write(f"compacted to {cache.compact()} entries\n")
            return EXIT_OK
        verification = cache.verify(args.sample, config)
    except CacheError as e:
        stream.write(f"corrupt cache: {e}\n")
        return EXIT_VERIFY
    for system, recorded, fresh in verification.mismatches:
        stream.write(f"mismatch {system}: recorded {recorded}, recomputed {fresh}\n")
    status = "ok" if verification.ok else "FAILED"
    stream.write(f"verified {verification.checked} entries: {status}\n")
    return EXIT_OK if verification.ok else EXIT_VERIFY


_VERBS = {
    "dim": cmd_dim,
    "classify": cmd_classify,
    "prove": cmd_prove,
    "cache": cmd_cache,
}


def main(argv: Optional[Sequence[str]] = None, stream: TextIO | None = None) -> int:
    """Entry point; returns the process exit status."""
    stream = stream or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config(args)
    except ValidationError as e:
        sys.stderr.write(f"fatpoints: invalid settings: {e}\n")
        return EXIT_USAGE

    logging.basicConfig(
        level=getattr(logging, config.log_level.upper(), logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return _VERBS[args.verb](args, config, stream)
    except ValidationError as e:
        sys.stderr.write(f"fatpoints: invalid sweep: {e}\n")
        return EXIT_USAGE
    except FatpointsError as e:
        sys.stderr.write(f"fatpoints: {e}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
