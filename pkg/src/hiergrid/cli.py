"""Command line benchmark driver.

Subcommands: generate (write a point set), sweep (cost heatmap + stats for
one configuration), compare (stats and heatmaps across divisions, flat vs
hierarchical), verify (randomized oracle batteries, nonzero exit on a hard
failure). All outputs are deterministic for a given argument list: fixed
RNG streams, no timestamps, stable file names.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .datasets import gaussian_points, uniform_points
from .geometry import Extents, Point2D
from .gridindex import GridIndex
from .hierarchy import HierConfig, HierGridIndex
from .bruteforce import BruteForceIndex
from .pgm import write_pgm
from .sources import PointCollection, load_points
from .sweep import colorize, match_battery, summarize, sweep_cost

STATS_HEADER = (
    "config,n,div_x,div_y,hier,max_bin_records,"
    "cost_min,cost_max,cost_mean,interior_max,interior_mean,oracle_match_rate"
)
# Battery RNG stream is derived from, but distinct from, the dataset seed.
BATTERY_SEED_OFFSET = 1


def _parse_divisions(text: str) -> tuple[int, int]:
    try:
        xs, ys = text.lower().split("x")
        dx, dy = int(xs), int(ys)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, e.g. 10x10, got {text!r}")
    if dx < 1 or dy < 1:
        raise argparse.ArgumentTypeError(f"divisions must be >= 1, got {text!r}")
    return dx, dy


def _parse_divisions_list(text: str) -> list[tuple[int, int]]:
    return [_parse_divisions(part) for part in text.split(",") if part]


def _add_dataset_args(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--dataset",
        choices=("uniform", "gaussian", "file"),
        default="uniform",
        help="point set to index (default: uniform)",
    )
    p.add_argument("--file", help="points file for --dataset file (x,y per line)")
    p.add_argument("--n", type=int, default=5000, help="generated record count (default: 5000)")
    p.add_argument("--seed", type=int, default=42, help="dataset RNG seed (default: 42)")


def _add_index_args(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--divisions",
        type=_parse_divisions,
        default=(10, 10),
        metavar="WxH",
        help="grid divisions (default: 10x10)",
    )
    p.add_argument(
        "--hierarchical",
        choices=("true", "false"),
        default="false",
        help="subdivide overfull bins (default: false)",
    )
    _add_hier_args(p)


def _add_hier_args(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--max-bin-records",
        type=int,
        default=1,
        help="bins holding more than this subdivide (default: 1)",
    )
    p.add_argument(
        "--smallest-bin-dimension",
        type=float,
        default=None,
        help="bins this small never subdivide (default: diagonal-scaled)",
    )


def _add_sweep_args(p: argparse.ArgumentParser, default_color: str) -> None:
    p.add_argument(
        "--sweep-resolution",
        type=_parse_divisions,
        default=(256, 256),
        metavar="WxH",
        help="query lattice resolution (default: 256x256)",
    )
    p.add_argument(
        "--color",
        choices=("relative", "absolute"),
        default=default_color,
        help=f"grayscale mapping (default: {default_color})",
    )
    p.add_argument(
        "--cap-fraction",
        type=float,
        default=0.01,
        help="absolute-mode white point as a fraction of n (default: 0.01)",
    )


def _load_dataset(args: argparse.Namespace) -> tuple[PointCollection, str]:
    if args.dataset == "file":
        if not args.file:
            raise SystemExit("--dataset file requires --file")
        points = load_points(args.file)
        return points, f"file-{Path(args.file).stem}"
    if args.n < 1:
        raise SystemExit(f"--n must be >= 1, got {args.n}")
    if args.dataset == "uniform":
        return uniform_points(args.n, seed=args.seed), f"uniform-n{args.n}-seed{args.seed}"
    return gaussian_points(args.n, seed=args.seed), f"gaussian-n{args.n}-seed{args.seed}"


def _build_index(
    points: PointCollection,
    divisions: tuple[int, int],
    hierarchical: bool,
    max_bin_records: int,
    smallest_bin_dimension: float | None,
) -> GridIndex:
    dx, dy = divisions
    if hierarchical:
        cfg = HierConfig(
            max_bin_records=max_bin_records,
            smallest_bin_dimension=smallest_bin_dimension,
        )
        return HierGridIndex(points, dx, dy, cfg)
    return GridIndex(points, dx, dy)


def _config_label(ds_label: str, divisions: tuple[int, int], hierarchical: bool, mbr: int) -> str:
    dx, dy = divisions
    mode = f"hier-b{mbr}" if hierarchical else "flat"
    return f"{ds_label}-{dx}x{dy}-{mode}"


def _stats_row(
    label: str,
    n: int,
    divisions: tuple[int, int],
    hierarchical: bool,
    mbr: int,
    stats,
    match_rate: float,
) -> str:
    return ",".join(
        (
            label,
            str(n),
            str(divisions[0]),
            str(divisions[1]),
            "true" if hierarchical else "false",
            str(mbr if hierarchical else 0),
            str(stats.cost_min),
            str(stats.cost_max),
            repr(float(stats.cost_mean)),
            str(stats.interior_max),
            repr(float(stats.interior_mean)),
            repr(float(match_rate)),
        )
    )


def _run_config(points, args, divisions, hierarchical):
    index = _build_index(
        points, divisions, hierarchical, args.max_bin_records, args.smallest_bin_dimension
    )
    field = sweep_cost(index, *args.sweep_resolution)
    stats = summarize(field)
    report = match_battery(index, seed=args.seed + BATTERY_SEED_OFFSET)
    return index, field, stats, report


def _cmd_generate(args: argparse.Namespace) -> int:
    if args.dataset == "file":
        raise SystemExit("generate writes synthetic sets; --dataset must be uniform or gaussian")
    points, label = _load_dataset(args)
    from .sources import save_points

    save_points(args.out, points, header=f"dataset {label}")
    print(f"wrote {points.record_count} points to {args.out}")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    points, ds_label = _load_dataset(args)
    hierarchical = args.hierarchical == "true"
    label = _config_label(ds_label, args.divisions, hierarchical, args.max_bin_records)
    index, field, stats, report = _run_config(points, args, args.divisions, hierarchical)
    pixels = colorize(field, args.color, args.cap_fraction)
    pgm_path = f"{args.out}_{label}_{args.color}.pgm"
    write_pgm(pgm_path, pixels)
    csv_path = f"{args.out}_stats.csv"
    row = _stats_row(
        label,
        points.record_count,
        args.divisions,
        hierarchical,
        args.max_bin_records,
        stats,
        report.match_rate,
    )
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(STATS_HEADER + "\n" + row + "\n")
    print(f"{label}: interior max {stats.interior_max}, interior mean "
          f"{stats.interior_mean:.2f}, sweep max {stats.cost_max}, "
          f"match rate {report.match_rate:.4f}")
    print(f"wrote {pgm_path}")
    print(f"wrote {csv_path}")
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    points, ds_label = _load_dataset(args)
    if args.hierarchical == "both":
        modes = (False, True)
    else:
        modes = (args.hierarchical == "true",)
    rows = []
    print(f"{'config':<42} {'int.max':>8} {'int.mean':>9} {'max':>6} {'match':>7}")
    for divisions in args.divisions:
        for hierarchical in modes:
            label = _config_label(ds_label, divisions, hierarchical, args.max_bin_records)
            index, field, stats, report = _run_config(points, args, divisions, hierarchical)
            pixels = colorize(field, args.color, args.cap_fraction)
            write_pgm(f"{args.out}_{label}_{args.color}.pgm", pixels)
            rows.append(
                _stats_row(
                    label,
                    points.record_count,
                    divisions,
                    hierarchical,
                    args.max_bin_records,
                    stats,
                    report.match_rate,
                )
            )
            print(
                f"{label:<42} {stats.interior_max:>8} {stats.interior_mean:>9.2f} "
                f"{stats.cost_max:>6} {report.match_rate:>7.4f}"
            )
    csv_path = f"{args.out}_stats.csv"
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(STATS_HEADER + "\n")
        for row in rows:
            fh.write(row + "\n")
    print(f"wrote {csv_path}")
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    import numpy as np

    points, ds_label = _load_dataset(args)
    hierarchical = args.hierarchical == "true"
    label = _config_label(ds_label, args.divisions, hierarchical, args.max_bin_records)
    index = _build_index(
        points, args.divisions, hierarchical, args.max_bin_records, args.smallest_bin_dimension
    )
    failures = []

    try:
        report = match_battery(index, queries=args.queries, seed=args.seed + BATTERY_SEED_OFFSET)
    except Exception as exc:  # totality: every query must produce a record
        print(f"nearest battery : FAILED ({exc})")
        print(f"verify {label}: FAIL")
        return 1
    sc_note = f"short-circuit {report.sc_fired}/{report.total}"
    if report.sc_inexact:
        failures.append(f"{report.sc_inexact} short-circuited results were not exact")
        sc_note += f", {report.sc_inexact} INEXACT"
    else:
        sc_note += ", all exact"
    print(
        f"nearest battery : {report.total} queries, match rate "
        f"{report.match_rate:.4f}, {sc_note}"
    )

    index.ensure_built()
    ext = index.shape.extents.scaled(2.0)
    rng = np.random.default_rng(args.seed + BATTERY_SEED_OFFSET + 1)
    brute = BruteForceIndex(points)
    bad_ranges = 0
    for _ in range(args.ranges):
        xs = rng.uniform(ext.min.x, ext.max.x, 2)
        ys = rng.uniform(ext.min.y, ext.max.y, 2)
        rect = Extents(
            Point2D(float(xs.min()), float(ys.min())), Point2D(float(xs.max()), float(ys.max()))
        )
        if index.range_query(rect) != brute.range(rect):
            bad_ranges += 1
    if bad_ranges:
        failures.append(f"{bad_ranges} range queries disagreed with the oracle")
        print(f"range battery   : {args.ranges} rectangles, {bad_ranges} MISMATCHED")
    else:
        print(f"range battery   : {args.ranges} rectangles, all exact")

    if failures:
        for f in failures:
            print(f"FAIL: {f}")
        print(f"verify {label}: FAIL")
        return 1
    print(f"verify {label}: PASS")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hiergrid",
        description="Grid spatial index benchmarks: cost heatmaps, stats, oracle checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic point set to a file")
    _add_dataset_args(p)
    p.add_argument("--out", default="points.csv", help="output path (default: points.csv)")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("sweep", help="cost heatmap and stats for one configuration")
    _add_dataset_args(p)
    _add_index_args(p)
    _add_sweep_args(p, default_color="relative")
    p.add_argument("--out", default="sweep", help="output file prefix (default: sweep)")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("compare", help="stats across divisions, flat vs hierarchical")
    _add_dataset_args(p)
    p.add_argument(
        "--divisions",
        type=_parse_divisions_list,
        default=[(2, 2), (4, 4), (8, 8), (16, 16)],
        metavar="WxH[,WxH...]",
        help="division list (default: 2x2,4x4,8x8,16x16)",
    )
    p.add_argument(
        "--hierarchical",
        choices=("true", "false", "both"),
        default="both",
        help="index modes to run (default: both)",
    )
    _add_hier_args(p)
    _add_sweep_args(p, default_color="absolute")
    p.add_argument("--out", default="compare", help="output file prefix (default: compare)")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("verify", help="randomized oracle batteries; exit 1 on hard failure")
    _add_dataset_args(p)
    _add_index_args(p)
    p.add_argument("--queries", type=int, default=4096, help="nearest queries (default: 4096)")
    p.add_argument("--ranges", type=int, default=256, help="range queries (default: 256)")
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
