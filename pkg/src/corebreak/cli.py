"""Command-line front end: ``corebreak {decompose,attack,percolate,bench,oracle}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Sequence

from .attack import SearchBoundError, Strategy, exhaustive_min_attack, run_attack
from .graph_core import (
    Graph,
    NoCoreError,
    ParseError,
    core_decompose,
    load_edge_list,
    write_core_numbers,
)
from .metrics import percent
from .percolation import (
    DegreeDistribution,
    PercolationConfig,
    SweepMode,
    deletion_sweep,
    er_graph,
    q_fixed_point,
)

log = logging.getLogger("corebreak")

BIG_GRAPH_EDGES = 2_000_000
DEFAULT_SEED = 42
AGGREGATE_HEADER = ["network", "strategy", "ndn", "nde", "ecr_pct", "far_pct", "runs", "nde_mean"]


class CliError(Exception):
    pass


def parse_seeds(text: str | None) -> list[int]:
    """``a..b`` (inclusive), a comma list, or a mix of both."""
    if not text:
        return []
    seeds: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            a, b = int(lo), int(hi)
            if b < a:
                raise CliError(f"empty seed range {part!r}")
            seeds.extend(range(a, b + 1))
        elif part:
            seeds.append(int(part))
    return seeds


def parse_strategies(values: Sequence[str]) -> list[Strategy]:
    names = [s.strip().lower() for v in values for s in v.split(",") if s.strip()]
    valid = [s.value for s in Strategy if s is not Strategy.EXHAUSTIVE]
    out = []
    for name in names:
        if name not in valid:
            raise CliError(f"unknown strategy {name!r}; valid names: {', '.join(valid)}")
        out.append(Strategy(name))
    if not out:
        raise CliError(f"no strategy given; valid names: {', '.join(valid)}")
    return out


def load_graph(path: str | Path, big: bool = False) -> Graph:
    g = load_edge_list(path)
    if g.edge_count > BIG_GRAPH_EDGES and not big:
        raise CliError(f"{path}: {g.edge_count} edges exceeds {BIG_GRAPH_EDGES}; pass --big to run anyway")
    return g


def dataset_name(path: str | Path) -> str:
    return Path(path).stem


def summary_row(g: Graph) -> list[int]:
    """|V|, |E|, k_max, |V_I|, |E_I|."""
    decomp = core_decompose(g)
    I = decomp.k_max
    if g.edge_count == 0:
        return [len(g), 0, 0, 0, 0]
    core = set(decomp.core_nodes(I))
    e_i = sum(1 for u, v in g.edges() if u in core and v in core)
    return [len(g), g.edge_count, I, len(core), e_i]


def _output_dir(path: str | None) -> Path:
    out = Path(path or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_decompose(args) -> int:
    g = load_graph(args.input, args.big)
    name = dataset_name(args.input)
    decomp = core_decompose(g)
    row = summary_row(g)
    if args.output:
        out = _output_dir(args.output)
        with open(out / f"{name}__cores.csv", "w", newline="") as fh:
            write_core_numbers(g, decomp, fh)
    if args.format == "json":
        keys = ["nodes", "edges", "k_max", "core_nodes", "core_edges"]
        print(json.dumps(dict(zip(keys, row))))
    else:
        print(",".join(map(str, row)))
    return 0


@dataclass(frozen=True)
class RunSummary:
    strategy: str
    seed: int | None
    ndn: int
    nde: int
    ecr_num: int
    ecr_den: int
    far_num: int
    far_den: int


def _seeds_for(strategy: Strategy, seeds: list[int]) -> list[int | None]:
    if not strategy.randomized:
        return [None]
    if not seeds:
        log.warning("no --seeds for %s; using default seed %d", strategy.value, DEFAULT_SEED)
        return [DEFAULT_SEED]
    return list(seeds)


def _run_file_stem(name: str, strategy: Strategy, seed: int | None) -> str:
    return f"{name}__{strategy.value}__{'det' if seed is None else seed}"


def _execute(g: Graph, name: str, strategy: Strategy, seed: int | None, out: Path | None) -> RunSummary:
    result = run_attack(g, strategy, seed)
    if out is not None:
        stem = _run_file_stem(name, strategy, seed)
        with open(out / f"{stem}.csv", "w", newline="") as fh:
            result.trajectory.write_csv(fh)
        (out / f"{stem}.json").write_text(result.to_json(g, f"{stem}.csv") + "\n")
    m = result.terminal_metrics
    return RunSummary(
        strategy.value, seed, m.ndn, m.nde,
        m.ecr.numerator, m.ecr.denominator, m.far.numerator, m.far.denominator,
    )


def aggregate_row(network: str, runs: list[RunSummary]) -> list:
    best = min(runs, key=lambda r: (r.nde, r.ndn))
    mean = statistics.fmean(r.nde for r in runs)
    return [
        network,
        best.strategy,
        best.ndn,
        best.nde,
        percent(Fraction(best.ecr_num, best.ecr_den)),
        percent(Fraction(best.far_num, best.far_den)),
        len(runs),
        f"{mean:.2f}",
    ]


def _write_rows(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def cmd_attack(args) -> int:
    strategies = parse_strategies(args.strategy)
    seeds = parse_seeds(args.seeds)
    g = load_graph(args.input, args.big)
    name = dataset_name(args.input)
    out = _output_dir(args.output)
    rows = []
    for strategy in strategies:
        runs = [_execute(g, name, strategy, s, out) for s in _seeds_for(strategy, seeds)]
        rows.append(aggregate_row(name, runs))
    _write_rows(out / f"{name}__aggregate.csv", AGGREGATE_HEADER, rows)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(AGGREGATE_HEADER)
    w.writerows(rows)
    return 0


def cmd_percolate(args) -> int:
    out = _output_dir(args.output)
    if args.theory:
        if args.poisson_mean is None or args.k is None or args.del_frac is None:
            raise CliError("--theory needs --poisson-mean, --k and --del-frac")
        if not 0.0 <= args.del_frac <= 1.0:
            raise CliError("--del-frac must lie in [0, 1]")
        total = int(round(args.nodes * args.poisson_mean / 2))
        cfg = PercolationConfig.from_fraction(args.k, args.del_frac, total)
        fp = q_fixed_point(DegreeDistribution.poisson(args.poisson_mean), cfg)
        text = json.dumps(fp.to_dict())
        (out / f"theory__k{args.k}__mean{args.poisson_mean:g}__del{args.del_frac:g}.json").write_text(text + "\n")
        print(text)
        if not args.er and not args.input:
            return 0

    modes = [SweepMode(m.strip()) for m in args.mode.split(",")]
    seeds = parse_seeds(args.seeds) or [DEFAULT_SEED]
    if args.er:
        try:
            n, m = (int(x) for x in args.er.split(","))
        except ValueError:
            raise CliError("--er expects N,M") from None
        name = f"er{n}-{m}"
    elif args.input:
        fixed = load_graph(args.input, args.big)
        name = dataset_name(args.input)
    else:
        raise CliError("percolate needs --er N,M or --input PATH (or --theory)")

    collapse: dict[tuple[int, SweepMode], int | None] = {}
    for seed in seeds:
        g = er_graph(n, m, seed) if args.er else fixed
        for mode in modes:
            sweep = deletion_sweep(g, mode, args.step, seed)
            with open(out / f"{name}__{mode.value}__{seed}.csv", "w", newline="") as fh:
                sweep.write_csv(fh)
            collapse[(seed, mode)] = sweep.collapse_nde
            if mode is SweepMode.CASE_II:
                collapse[(seed, "jump")] = sweep.largest_jump()[1]
                collapse[(seed, "pre")] = sweep.pre_jump_max_change()

    if SweepMode.CASE_II in modes and SweepMode.UNIFORM in modes:
        rows, earlier, sharp = [], 0, 0
        for seed in seeds:
            c2, un = collapse[(seed, SweepMode.CASE_II)], collapse[(seed, SweepMode.UNIFORM)]
            holds = c2 is not None and un is not None and c2 < un
            disc = collapse[(seed, "jump")] > 0.5 and collapse[(seed, "pre")] < 0.05
            earlier += holds
            sharp += disc
            rows.append([seed, c2, un, int(holds), f"{collapse[(seed, 'jump')]:.6f}", int(disc)])
        _write_rows(
            out / f"{name}__compare.csv",
            ["seed", "case_ii_collapse_nde", "uniform_collapse_nde", "case_ii_earlier", "jump", "discontinuous"],
            rows,
        )
        print(f"case_ii earlier on {earlier}/{len(seeds)} seeds; discontinuous on {sharp}/{len(seeds)}")
    return 0


@lru_cache(maxsize=8)
def _cached_graph(path: str, big: bool) -> Graph:
    return load_graph(path, big)


def _bench_cell(cell: tuple[str, str, str, int | None, bool]) -> RunSummary:
    name, path, strategy, seed, big = cell
    return _execute(_cached_graph(path, big), name, Strategy(strategy), seed, None)


def cmd_bench(args) -> int:
    manifest_path = Path(args.manifest)
    manifest = json.loads(manifest_path.read_text())
    base = manifest_path.parent
    strategies = parse_strategies(manifest.get("strategies") or [s.value for s in Strategy if s is not Strategy.EXHAUSTIVE])
    seeds = parse_seeds(str(manifest.get("seeds", "")))
    red_seeds = parse_seeds(str(manifest["red_seeds"])) if "red_seeds" in manifest else seeds

    cells, datasets, failed = [], [], 0
    for entry in manifest["datasets"]:
        path = Path(entry["path"])
        path = path if path.is_absolute() else base / path
        name = entry.get("name") or dataset_name(path)
        try:
            _cached_graph(str(path), args.big)
        except (OSError, ParseError, CliError) as exc:
            log.warning("skipping %s: %s", name, exc)
            failed += 1
            continue
        datasets.append(name)
        for strategy in strategies:
            pool = red_seeds if strategy is Strategy.RED else seeds
            for seed in _seeds_for(strategy, pool):
                cells.append((name, str(path), strategy.value, seed, args.big))
    if not datasets:
        raise CliError("no dataset in the manifest could be loaded")

    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            results = list(ex.map(_bench_cell, cells))
    else:
        results = [_bench_cell(c) for c in cells]

    grouped: dict[tuple[str, str], list[RunSummary]] = {}
    for cell, res in zip(cells, results):
        grouped.setdefault((cell[0], cell[2]), []).append(res)
    rows = [aggregate_row(name, grouped[(name, s.value)]) for name in datasets for s in strategies]

    out = _output_dir(args.output)
    _write_rows(out / "bench.csv", AGGREGATE_HEADER, rows)
    text = format_table(AGGREGATE_HEADER, rows)
    (out / "bench.txt").write_text(text)
    sys.stdout.write(text)
    return 0


def format_table(header: list[str], rows: list[list]) -> str:
    cells = [header] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    buf = io.StringIO()
    for r in cells:
        buf.write("  ".join(c.rjust(w) if i else c.ljust(w) for i, (c, w) in enumerate(zip(r, widths))).rstrip())
        buf.write("\n")
    return buf.getvalue()


def cmd_oracle(args) -> int:
    g = load_graph(args.input, args.big)
    result = exhaustive_min_attack(g, args.d_max)
    labels = g.node_labels
    print(json.dumps({
        "min_nde": result.nde,
        "edges": [[labels[u], labels[v]] for u, v in result.deleted_edges],
    }))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="corebreak", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", help="output directory")
    common.add_argument("--format", choices=["json", "csv"], default="csv")
    common.add_argument("--big", action="store_true", help=f"allow graphs above {BIG_GRAPH_EDGES} edges")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", parents=[common], help="core numbers and innermost-core summary")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("attack", parents=[common], help="run attack strategies on one graph")
    p.add_argument("--input", required=True)
    p.add_argument("--strategy", action="append", required=True,
                   help="red, hde, hdn, ckc, coreattack, greedy (comma list or repeated)")
    p.add_argument("--seeds", help="e.g. 1..20 or 1,5,9")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("percolate", parents=[common], help="deletion sweeps and the Q fixed point")
    p.add_argument("--er", help="N,M for an Erdos-Renyi graph per seed")
    p.add_argument("--input")
    p.add_argument("--mode", default="case_ii", help="case_i, case_ii, uniform (comma list)")
    p.add_argument("--step", type=int, default=1, help="edges deleted per round")
    p.add_argument("--seeds")
    p.add_argument("--theory", action="store_true")
    p.add_argument("--poisson-mean", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--del-frac", type=float)
    p.add_argument("--nodes", type=int, default=10_000, help="graph size used to turn --del-frac into L")
    p.set_defaults(func=cmd_percolate)

    p = sub.add_parser("bench", parents=[common], help="strategy x dataset table from a JSON manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("oracle", parents=[common], help="exhaustive minimum attack for tiny graphs")
    p.add_argument("--input", required=True)
    p.add_argument("--d-max", type=int, default=4)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (CliError, ParseError, NoCoreError, SearchBoundError, ValueError, OSError) as exc:
        print(f"corebreak {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
