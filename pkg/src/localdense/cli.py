"""Command-line entry point.

Exit codes: 0 success, 1 verification mismatch, 2 usage error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, TextIO

from .driver import DenseRegion, DriverProgressError, RunStats, label_key, lds_topk, ltds_topk
from .flow import FlowOverflowError
from .frank_wolfe import DEFAULT_ITERS
from .generators import barabasi_albert_edges
from .graph import EdgeListParseError, Graph, load_edge_list
from .oracle import OracleTooLarge, enumerate_lds_bf

log = logging.getLogger("localdense")

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3
MODES = {"lds": "edge", "ltds": "triangle"}


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    mode: str
    input: str
    output: str
    k: int
    iters: Optional[int] = None
    stats: Optional[str] = None
    fast: bool = False
    verifier: str = "bounded"
    max_outer: Optional[int] = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise UsageError(f"mode must be lds or ltds, got {self.mode!r}")
        if self.k < 1:
            raise UsageError("k must be >= 1")
        if self.iters is not None and self.iters < 1:
            raise UsageError("iters must be >= 1")
        if not self.input or not self.output:
            raise UsageError("input and output paths must be non-empty")
        if self.stats == "":
            raise UsageError("stats path must be non-empty")
        if self.verifier not in ("bounded", "core"):
            raise UsageError("verifier must be bounded or core")

    @property
    def effective_iters(self) -> int:
        return self.iters if self.iters is not None else DEFAULT_ITERS[MODES[self.mode]]


def region_record(region: DenseRegion) -> dict:
    rec = {
        "rank": region.rank,
        "density": {"num": region.density.numerator, "den": region.density.denominator,
                    "approx": float(region.density)},
        "size": region.size,
        "edges": region.edge_count,
        "vertices": list(region.vertices),
    }
    if region.triangle_count is not None:
        rec["triangles"] = region.triangle_count
    return rec


def write_records(regions: Iterable[DenseRegion], stream: TextIO) -> None:
    for region in regions:
        stream.write(json.dumps(region_record(region), separators=(",", ":")) + "\n")


def read_records(stream: TextIO) -> list[dict]:
    return [json.loads(line) for line in stream if line.strip()]


@contextmanager
def _open_out(path: Optional[str]) -> Iterator[TextIO]:
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _load(path: str) -> Graph:
    if path == "-":
        return load_edge_list(sys.stdin)
    with open(path, encoding="utf-8") as fh:
        return load_edge_list(fh)


def run_pipeline(g: Graph, config: RunConfig) -> tuple[list[DenseRegion], RunStats]:
    fn = lds_topk if config.mode == "lds" else ltds_topk
    return fn(g, config.k, config.effective_iters, variant=config.verifier, fast=config.fast,
              max_outer=config.max_outer)


def oracle_regions(g: Graph, mode: str, k: int) -> list[DenseRegion]:
    found = enumerate_lds_bf(g, MODES[mode])
    pairs = g.edges.tolist()
    out = []
    for members, rho in found:
        inside = set(members)
        edges = sum(1 for u, v in pairs if u in inside and v in inside)
        tri = int(rho * len(members)) if mode == "ltds" else None
        out.append((rho, members, edges, tri))
    out.sort(key=lambda r: (-r[0], min(label_key(g.labels[u]) for u in r[1])))
    return [DenseRegion(i + 1, [g.labels[u] for u in ids], ids, rho, m, tri)
            for i, (rho, ids, m, tri) in enumerate(out[:k])]


def cmd_run(config: RunConfig) -> int:
    g = _load(config.input)
    regions, stats = run_pipeline(g, config)
    with _open_out(config.output) as fh:
        write_records(regions, fh)
    if config.stats:
        doc = stats.as_dict()
        doc["mode"] = config.mode
        doc["k"] = config.k
        doc["iters"] = config.effective_iters
        doc["verifier"] = config.verifier
        doc["regions"] = len(regions)
        if g.load_stats is not None:
            doc["load"] = vars(g.load_stats)
        with open(config.stats, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    print(f"{len(regions)} region(s), {stats.completeness}", file=sys.stderr)
    return EXIT_OK


def cmd_oracle(input_path: str, mode: str, k: int, output: Optional[str] = None) -> int:
    g = _load(input_path)
    with _open_out(output) as fh:
        write_records(oracle_regions(g, mode, k), fh)
    return EXIT_OK


def _signature(records: list[dict]) -> list[tuple]:
    return [(frozenset(r["vertices"]), Fraction(r["density"]["num"], r["density"]["den"]))
            for r in records]


def cmd_verify(input_path: str, mode: str, k: int, results: Optional[str] = None,
               iters: Optional[int] = None, verifier: str = "bounded") -> int:
    """Compare pipeline output (or a given result file) with the oracle."""
    g = _load(input_path)
    expected = [region_record(r) for r in oracle_regions(g, mode, k)]
    if results is None:
        config = RunConfig(mode, input_path, "-", k, iters, verifier=verifier)
        got = [region_record(r) for r in run_pipeline(g, config)[0]]
    else:
        with open(results, encoding="utf-8") as fh:
            got = read_records(fh)
    a, b = _signature(got), _signature(expected)
    if a == b:
        print(f"ok: {len(a)} region(s) match the oracle", file=sys.stderr)
        return EXIT_OK
    print("mismatch against the oracle:", file=sys.stderr)
    for i in range(max(len(a), len(b))):
        left = a[i] if i < len(a) else None
        right = b[i] if i < len(b) else None
        if left != right:
            print(f"  rank {i + 1}: got {_fmt(left)}, expected {_fmt(right)}", file=sys.stderr)
    return EXIT_MISMATCH


def _fmt(entry) -> str:
    if entry is None:
        return "nothing"
    verts, rho = entry
    return f"{sorted(verts, key=label_key)} at {rho}"


def cmd_gen(model: str, n: int, attach_m: int, seed: int, output: Optional[str] = None) -> int:
    if model != "ba":
        raise UsageError(f"unknown model {model!r}")
    try:
        edges = barabasi_albert_edges(n, attach_m, seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    with _open_out(output) as fh:
        fh.writelines(f"{u} {v}\n" for u, v in edges)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="localdense",
                                     description="Top-k locally densest subgraph discovery")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="find the top-k LDS or LTDS of an edge list")
    run.add_argument("--mode", choices=sorted(MODES), default="lds")
    run.add_argument("--input", "-i", required=True)
    run.add_argument("--output", "-o", default="-")
    run.add_argument("-k", type=int, default=1)
    run.add_argument("--iters", type=int, default=None,
                     help="Frank-Wolfe iterations (default 100 for lds, 200 for ltds)")
    run.add_argument("--stats", default=None, help="write run statistics as JSON")
    run.add_argument("--fast", action="store_true",
                     help="drop vertices below half the maximum core number first (may miss results)")
    run.add_argument("--verifier", choices=["bounded", "core"], default="bounded")
    run.add_argument("--max-outer", type=int, default=None, help="outer iteration cap (default 10n)")

    orc = sub.add_parser("oracle", help="exhaustive enumeration for graphs with n <= 10")
    orc.add_argument("--mode", choices=sorted(MODES), default="lds")
    orc.add_argument("--input", "-i", required=True)
    orc.add_argument("--output", "-o", default="-")
    orc.add_argument("-k", type=int, default=10)

    ver = sub.add_parser("verify", help="compare the pipeline (or a result file) with the oracle")
    ver.add_argument("--mode", choices=sorted(MODES), default="lds")
    ver.add_argument("--input", "-i", required=True)
    ver.add_argument("-k", type=int, default=10)
    ver.add_argument("--results", default=None, help="check this result file instead of running")
    ver.add_argument("--iters", type=int, default=None)
    ver.add_argument("--verifier", choices=["bounded", "core"], default="bounded")

    gen = sub.add_parser("gen", help="generate a synthetic edge list")
    gen.add_argument("--model", choices=["ba"], default="ba")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--attach-m", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--output", "-o", default="-")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "run":
            config = RunConfig(args.mode, args.input, args.output, args.k, args.iters,
                               args.stats, args.fast, args.verifier, args.max_outer)
            return cmd_run(config)
        if args.command == "gen":
            return cmd_gen(args.model, args.n, args.attach_m, args.seed, args.output)
        if args.k < 1:
            raise UsageError("k must be >= 1")
        if args.command == "oracle":
            return cmd_oracle(args.input, args.mode, args.k, args.output)
        return cmd_verify(args.input, args.mode, args.k, args.results, args.iters, args.verifier)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, EdgeListParseError, DriverProgressError, OracleTooLarge,
            FlowOverflowError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
