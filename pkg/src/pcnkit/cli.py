"""``pcnkit`` command-line interface.

Exit codes: 0 success (batch exclusions included), 1 usage error,
2 data error, 3 network or IO error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .distributions import density_scaling_fit, seqdist_histogram
from .dynamics import TRAJECTORY_COLUMNS, detect_transition, simulate_folding
from .errors import DataError, FetchError, PCNError, TrajectoryTooShort
from .genmodel import GenConfig, compare_to_target, generate
from .metrics import REPORT_COLUMNS, compute_report
from .network import DEFAULT_LE_TH, DEFAULT_TH, link_density, read_network, save_network
from .output import csv_text, json_text, vector_csv, write_atomic
from .pdb import fetch_pdb
from .pipeline import (
    SUMMARY_COLUMNS,
    Params,
    batch_summary,
    load_manifest,
    logbins_csv,
    run_pipeline,
    seqdist_csv,
)
from .rewire import RewireConfig, rewire_ensemble

log = logging.getLogger("pcnkit")

DEFAULT_SEED = 0
EXIT_USAGE, EXIT_DATA, EXIT_IO = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _add_globals(p, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--cache", default=d(None), help="PDB cache directory (env PCNKIT_CACHE)")
    p.add_argument("--out", default=d("pcnkit-out"), help="output directory")
    p.add_argument("--th", type=float, default=d(DEFAULT_TH), help="contact threshold in angstrom")
    p.add_argument("--le-th", type=int, default=d(DEFAULT_LE_TH), help="long-range seq-dist threshold")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json", default=d("json"))
    fmt.add_argument("--csv", dest="fmt", action="store_const", const="csv", default=d("json"))
    p.add_argument("--jobs", type=int, default=d(1), help="concurrent proteins in batch mode")
    p.add_argument("-v", "--verbose", action="store_true", default=d(False))


def _seed(args) -> int:
    if args.seed is None:
        print(f"using seed {DEFAULT_SEED}", file=sys.stderr)
        return DEFAULT_SEED
    return args.seed


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pcnkit", description="Protein contact network analysis")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _add_globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def cmd(name, help_):
        p = sub.add_parser(name, help=help_)
        _add_globals(p, suppress=True)
        return p

    p = cmd("fetch", "download PDB files into the cache")
    p.add_argument("ids", nargs="+")

    p = cmd("build", "build a contact network from a PDB id or file")
    p.add_argument("source", help="PDB id or path to a .pdb file")
    p.add_argument("--density-limit", type=float, default=0.1)

    p = cmd("stats", "static statistics of a network file")
    p.add_argument("network")
    p.add_argument("--no-hierarchy", action="store_true", help="skip the hierarchy index")
    p.add_argument("--vectors", action="store_true", help="also write per-node CSVs under --out")

    p = cmd("rewire", "degree-preserving randomisation ensemble")
    p.add_argument("network")
    p.add_argument("--mode", choices=("all", "se", "le"), default="all")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--swaps", type=int, help="applied-swap target (default 10 x eligible links)")
    p.add_argument("--preserve-class", action="store_true")

    p = cmd("dynamics", "add long-range links one at a time")
    p.add_argument("network")
    p.add_argument("--order", choices=("seqdist", "random"), default="seqdist")
    p.add_argument("--seed", type=int)
    p.add_argument("--snapshots", default="", help="comma-separated steps for betweenness vectors")
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--window", type=int, default=5)

    p = cmd("generate", "lattice plus random long-range links model")
    p.add_argument("--n", type=int, default=385)
    p.add_argument("--v", type=int, default=6)
    p.add_argument("--topology", choices=("linear", "ring"), default="linear")
    p.add_argument("--le-count", type=int)
    p.add_argument("--band", help="min:max sequence distance band")
    p.add_argument("--sorted", action="store_true")
    p.add_argument("--seed", type=int)
    p.add_argument("--runs", type=int, default=2)
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--target", help="network file to compare against")

    p = cmd("dist", "sequence-distance histograms and density scaling")
    p.add_argument("networks", nargs="+")

    p = cmd("batch", "run the pipeline over a manifest")
    p.add_argument("manifest", help="manifest file or builtin name (gh64, eva132, desk)")
    p.add_argument("--density-limit", type=float, default=0.1)
    p.add_argument("--no-hierarchy", action="store_true")
    return parser


def _params(args, **extra) -> Params:
    return Params(
        th=args.th,
        le_th=args.le_th,
        cache_dir=Path(args.cache) if args.cache else None,
        out_dir=Path(args.out),
        **extra,
    )


def _emit(args, obj_json, header=None, rows=None):
    if args.fmt == "csv" and header is not None:
        sys.stdout.write(csv_text(header, rows))
    else:
        sys.stdout.write(json_text(obj_json))


def cmd_fetch(args):
    for pid in args.ids:
        print(fetch_pdb(pid, args.cache))


def cmd_build(args):
    res = run_pipeline(args.source, _params(args, density_limit=args.density_limit, with_hierarchy=False))
    target = Path(args.out) / f"{res.pdb_id}.pcn"
    write_atomic(target, save_network(res.network))
    v = res.verdict
    _emit(args, {
        "id": res.pdb_id, "network": str(target), "n": res.network.n, "m": res.network.m,
        "density": v.density, "components": v.components, "ok": v.ok, "reasons": list(v.reasons),
    }, ("id", "network", "n", "m", "density", "components", "ok"),
        [(res.pdb_id, target, res.network.n, res.network.m, v.density, v.components, v.ok)])


def cmd_stats(args):
    net = read_network(args.network)
    rep = compute_report(net, with_hierarchy=not args.no_hierarchy)
    if args.vectors:
        folder = Path(args.out) / (net.source or Path(args.network).stem)
        write_atomic(folder / "degree.csv", vector_csv(rep.degree.per_node_degree, "degree"))
        write_atomic(folder / "clustering.csv", vector_csv(rep.per_node_clustering, "clustering"))
        write_atomic(folder / "betweenness.csv", vector_csv(rep.betweenness.values, "betweenness"))
    _emit(args, rep.to_json_dict(), REPORT_COLUMNS, [rep.to_row()])


def cmd_rewire(args):
    net = read_network(args.network)
    cfg = RewireConfig(args.mode, args.le_th, args.swaps, _seed(args), args.preserve_class)
    ens = rewire_ensemble(net, cfg, args.trials)
    stem = f"{net.source or Path(args.network).stem}_rand{args.mode}"
    names = list(ens.original)
    header = ["seed", "applied"] + names
    write_atomic(Path(args.out) / f"{stem}_trials.csv", csv_text(header, ens.trials))
    summary = {
        "network": args.network, "mode": cfg.mode, "le_th": cfg.le_th, "seed": cfg.seed,
        "trials": args.trials, "preserve_class": cfg.preserve_class,
        "starved_trials": ens.starved_trials, "original": ens.original,
        "mean": ens.mean, "std": ens.std, "delta_mean": ens.delta_mean, "delta_std": ens.delta_std,
    }
    write_atomic(Path(args.out) / f"{stem}_summary.json", json_text(summary))
    _emit(args, summary, header, ens.trials)


def _parse_steps(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"bad step list {text!r}") from None


def _trajectory_rows(traj):
    return [r.as_row() for r in traj.records]


def cmd_dynamics(args):
    net = read_network(args.network)
    seed = _seed(args)
    snaps = _parse_steps(args.snapshots)
    traj = simulate_folding(net, args.le_th, args.order, seed, snaps, args.stride)
    stem = f"{net.source or Path(args.network).stem}_{args.order}_seed{seed}"
    out = Path(args.out)
    write_atomic(out / f"{stem}_trajectory.csv", csv_text(TRAJECTORY_COLUMNS, _trajectory_rows(traj)))
    for t, vec in sorted(traj.snapshots.items()):
        write_atomic(out / f"{stem}_betweenness_t{t}.csv", vector_csv(vec, "betweenness"))
    summary = {"network": args.network, "order": args.order, "seed": seed, "le_th": args.le_th,
               "steps": traj.length, "snapshots": sorted(traj.snapshots)}
    try:
        tr = detect_transition(traj, args.window)
        summary["transition"] = {"t_star": tr.t_star, "hpl_drop": tr.hpl_drop,
                                 "median_spike_t": tr.median_spike_t, "method": tr.method}
    except TrajectoryTooShort as exc:
        summary["transition"] = {"error": str(exc)}
    write_atomic(out / f"{stem}_summary.json", json_text(summary))
    _emit(args, summary, TRAJECTORY_COLUMNS, _trajectory_rows(traj))


def _parse_band(text):
    if text is None:
        return None
    try:
        lo, hi = text.split(":")
        return int(lo), int(hi)
    except ValueError:
        raise UsageError(f"--band expects min:max, got {text!r}") from None


def cmd_generate(args):
    seed = _seed(args)
    band = _parse_band(args.band)
    target = read_network(args.target) if args.target else None
    out = Path(args.out)
    results = []
    for run in range(args.runs):
        cfg = GenConfig(args.n, args.v, args.topology, args.le_count, band, args.sorted, seed + run)
        traj = generate(cfg, stride=args.stride)
        stem = f"{traj.final.source}"
        write_atomic(out / f"{stem}_trajectory.csv", csv_text(TRAJECTORY_COLUMNS, _trajectory_rows(traj)))
        write_atomic(out / f"{stem}.pcn", save_network(traj.final))
        entry = {"run": run, "seed": cfg.seed, "trajectory": str(out / f"{stem}_trajectory.csv"),
                 "le_count": cfg.le_count, "band": list(cfg.band)}
        if target is not None:
            cmp = compare_to_target(traj, target, args.le_th)
            write_atomic(out / f"{stem}_comparison.json", json_text(cmp.to_json_dict()))
            entry["comparison"] = cmp.rows
        results.append(entry)
    _emit(args, {"runs": results}, ("run", "seed", "trajectory"), results)


def cmd_dist(args):
    out = Path(args.out)
    rows, points = [], []
    for path in args.networks:
        net = read_network(path)
        hist = seqdist_histogram(net)
        stem = net.source or Path(path).stem
        write_atomic(out / f"{stem}_seqdist.csv", seqdist_csv(hist))
        write_atomic(out / f"{stem}_seqdist_logbins.csv", logbins_csv(hist))
        density = link_density(net)
        points.append((net.n, density))
        rows.append({"network": stem, "n": net.n, "m": net.m, "density": density,
                     "max_seq_dist": hist.max_seq_dist, "max_ratio": hist.max_ratio,
                     "mean_seq_dist": hist.mean, "median_seq_dist": hist.median})
    result = {"networks": rows}
    if len(points) >= 3:
        fit = density_scaling_fit(points)
        write_atomic(out / "density_scaling.json", json_text(fit.to_json_dict()))
        result["scaling_fit"] = fit.to_json_dict()
    header = ("network", "n", "m", "density", "max_seq_dist", "max_ratio", "mean_seq_dist",
              "median_seq_dist")
    _emit(args, result, header, rows)


def cmd_batch(args):
    manifest = load_manifest(args.manifest)
    params = _params(args, density_limit=args.density_limit, with_hierarchy=not args.no_hierarchy)
    table = batch_summary(manifest, params, args.jobs)
    _emit(args, table.to_json_dict(), SUMMARY_COLUMNS, table.rows)


COMMANDS = {
    "fetch": cmd_fetch, "build": cmd_build, "stats": cmd_stats, "rewire": cmd_rewire,
    "dynamics": cmd_dynamics, "generate": cmd_generate, "dist": cmd_dist, "batch": cmd_batch,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.cache is None:
        args.cache = os.environ.get("PCNKIT_CACHE")
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except FetchError as exc:
        print(f"pcnkit: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DataError, PCNError, ValueError) as exc:
        print(f"pcnkit: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"pcnkit: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
