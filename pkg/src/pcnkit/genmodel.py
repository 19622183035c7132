"""Lattice6 backbone plus random long-range links: a minimal folding model."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import seqdist_histogram
from .dynamics import Trajectory, replay
from .errors import BandExhausted, InvalidSpec
from .metrics import assortativity, clustering_coefficient, degree_summary
from .network import DEFAULT_LE_TH, ContactNetwork, LatticeSpec, make_lattice, partition_links

PROGRESS_POINTS = (0.0, 0.1, 0.2, 0.5, 1.0)


@dataclass(frozen=True)
class GenConfig:
    n: int
    v: int = 6
    topology: str = "linear"
    le_count: int | None = None
    band: tuple[int, int] | None = None
    sorted_addition: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.topology not in ("linear", "ring"):
            raise InvalidSpec(f"unknown topology {self.topology!r}")
        if self.le_count is None:
            object.__setattr__(self, "le_count", int(round(1.2 * self.n)))
        if self.band is None:
            object.__setattr__(self, "band", (10, int(math.floor(0.7 * self.n))))
        lo, hi = self.band
        if lo < 2:
            raise InvalidSpec("band minimum must be >= 2")
        if hi > self.n - 1:
            raise InvalidSpec("band maximum must be <= n - 1")
        if lo > hi:
            raise InvalidSpec("empty band")
        if self.le_count < 1:
            raise InvalidSpec("le_count must be >= 1")


def _band_pairs(n: int, lo: int, hi: int, ring: bool) -> int:
    """Number of unordered node pairs whose (circular) distance lies in [lo, hi]."""
    total = 0
    if not ring:
        for d in range(lo, min(hi, n - 1) + 1):
            total += n - d
        return total
    for d in range(lo, min(hi, n // 2) + 1):
        total += n // 2 if 2 * d == n else n
    return total


def _dist(a: int, b: int, n: int, ring: bool) -> int:
    d = abs(a - b)
    return min(d, n - d) if ring else d


def draw_long_links(cfg: GenConfig, lattice: ContactNetwork) -> list[tuple[int, int]]:
    """Uniform draws over admissible non-edges, in draw order."""
    n = cfg.n
    ring = cfg.topology == "ring"
    lo, hi = cfg.band
    present = lattice.edge_set()
    in_band_existing = sum(1 for a, b in present if lo <= _dist(a, b, n, ring) <= hi)
    admissible = _band_pairs(n, lo, hi, ring) - in_band_existing
    if admissible < cfg.le_count:
        raise BandExhausted(f"only {admissible} admissible pairs for {cfg.le_count} links")

    rng = np.random.default_rng(cfg.seed)
    chosen = []
    while len(chosen) < cfg.le_count:
        pairs = rng.integers(0, n, size=(4096, 2))
        for a, b in pairs.tolist():
            if a == b:
                continue
            e = (a, b) if a < b else (b, a)
            if e in present:
                continue
            if not lo <= _dist(a, b, n, ring) <= hi:
                continue
            present.add(e)
            chosen.append(e)
            if len(chosen) == cfg.le_count:
                break
    return chosen


def generate(cfg: GenConfig, snapshots=(), stride: int = 1) -> Trajectory:
    """Run the model; the returned trajectory's ``final`` is the generated network.

    The lattice is always linear. For the ring topology only placement and
    sequence distance are circular.
    """
    ring = cfg.topology == "ring"
    lattice = make_lattice(LatticeSpec(cfg.n, cfg.v, "linear"))
    links = draw_long_links(cfg, lattice)
    sds = [_dist(a, b, cfg.n, ring) for a, b in links]
    if cfg.sorted_addition:
        order = np.argsort(np.asarray(sds), kind="stable")
        links = [links[i] for i in order]
        sds = [sds[i] for i in order]
    tag = f"{'s' if cfg.sorted_addition else ''}{'ring' if ring else 'lin'}-n{cfg.n}-seed{cfg.seed}"
    start = ContactNetwork(cfg.n, lattice.edges, 0.0, tag, ring=ring)
    mode = "sorted" if cfg.sorted_addition else "drawn"
    return replay(start, links, mode, cfg.seed, snapshots, stride, sds)


def _progress_profile(traj: Trajectory, column: str = "apl") -> dict[str, float]:
    """Values at fixed fractions of the run, relative to the final value."""
    recs = traj.records
    ts = np.array([r.t for r in recs])
    vals = np.array([getattr(r, column) for r in recs], dtype=float)
    final = vals[-1]
    out = {}
    for frac in PROGRESS_POINTS:
        t = int(math.ceil(frac * traj.length))
        i = int(np.searchsorted(ts, t))
        i = min(i, len(ts) - 1)
        out[f"{column}@{frac:g}"] = float(vals[i] / final) if final else math.nan
    return out


def _static_profile(net: ContactNetwork, le_th: int) -> dict:
    part = partition_links(net, le_th)
    r = assortativity(net) if net.m else None
    return {
        "clustering": clustering_coefficient(net)[0],
        "assortativity": math.nan if r is None else r,
        "le_nodes_fraction": part.ratios["le_nodes_fraction"],
        "le_fraction": part.ratios["le_fraction"],
        "k_mean": degree_summary(net).mean,
        "degree_histogram": degree_summary(net).histogram,
        "seqdist_histogram": seqdist_histogram(net).counts,
    }


@dataclass(frozen=True)
class Comparison:
    rows: list[dict]
    model_degree_histogram: dict[int, int]
    target_degree_histogram: dict[int, int]
    model_seqdist_histogram: dict[int, int]
    target_seqdist_histogram: dict[int, int]

    def value(self, metric: str, which: str = "delta") -> float:
        for row in self.rows:
            if row["metric"] == metric:
                return row[which]
        raise KeyError(metric)

    def to_json_dict(self) -> dict:
        return {
            "rows": self.rows,
            "degree_histogram": {"model": _str_keys(self.model_degree_histogram),
                                 "target": _str_keys(self.target_degree_histogram)},
            "seqdist_histogram": {"model": _str_keys(self.model_seqdist_histogram),
                                  "target": _str_keys(self.target_seqdist_histogram)},
        }


def _str_keys(d):
    return {str(k): v for k, v in d.items()}


def _hist_l1(a: dict, b: dict) -> float:
    """Total variation distance between two count histograms."""
    sa, sb = sum(a.values()) or 1, sum(b.values()) or 1
    keys = set(a) | set(b)
    return 0.5 * sum(abs(a.get(k, 0) / sa - b.get(k, 0) / sb) for k in keys)


def compare_to_target(model_traj: Trajectory, target: ContactNetwork, le_th: int = DEFAULT_LE_TH,
                      target_traj: Trajectory | None = None) -> Comparison:
    """Evidence table of model versus target statistics (no verdict)."""
    m = _static_profile(model_traj.final, le_th)
    t = _static_profile(target, le_th)
    rows = []
    for key in ("clustering", "assortativity", "le_nodes_fraction", "le_fraction", "k_mean"):
        rows.append({"metric": key, "model": m[key], "target": t[key], "delta": m[key] - t[key]})
    for key, name in (("degree_histogram", "degree_hist_tv"), ("seqdist_histogram", "seqdist_hist_tv")):
        rows.append({"metric": name, "model": 0.0, "target": 0.0, "delta": _hist_l1(m[key], t[key])})
    mp = _progress_profile(model_traj)
    tp = _progress_profile(target_traj) if target_traj is not None else {}
    for key, val in mp.items():
        tv = tp.get(key, math.nan)
        rows.append({"metric": key, "model": val, "target": tv, "delta": val - tv})
    return Comparison(rows, m["degree_histogram"], t["degree_histogram"],
                      m["seqdist_histogram"], t["seqdist_histogram"])
