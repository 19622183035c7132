"""Replaying long-range link formation on the short-range backbone."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csgraph

from .errors import NoLongRangeLinks, SnapshotNotRecorded, TrajectoryTooShort
from .metrics import path_stats
from .network import DEFAULT_LE_TH, ContactNetwork, partition_links, subnetwork

ORDER_MODES = ("seqdist", "random")
TRAJECTORY_COLUMNS = ("t", "seq_dist", "edges", "bt_mean", "bt_std", "bt_median", "bt_max",
                      "apl", "hpl", "components")


@dataclass(frozen=True)
class TrajectoryRecord:
    t: int
    added_edge: tuple[int, int] | None
    seq_dist: int | None
    edges: int
    bt_mean: float
    bt_std: float
    bt_median: float
    bt_max: float
    apl: float
    hpl: float
    n_components: int

    def as_row(self) -> dict:
        return {
            "t": self.t, "seq_dist": self.seq_dist, "edges": self.edges,
            "bt_mean": self.bt_mean, "bt_std": self.bt_std, "bt_median": self.bt_median,
            "bt_max": self.bt_max, "apl": self.apl, "hpl": self.hpl, "components": self.n_components,
        }


@dataclass
class Trajectory:
    records: list[TrajectoryRecord]
    order_mode: str
    seed: int | None
    initial: ContactNetwork
    final: ContactNetwork
    # every added link in order, also for steps skipped by a stride
    additions: list[tuple[int, int]] = field(default_factory=list)
    snapshots: dict[int, np.ndarray] = field(default_factory=dict)

    @property
    def length(self) -> int:
        """Number of link additions (the last time step)."""
        return len(self.additions)

    def record_at(self, t: int) -> TrajectoryRecord:
        for rec in self.records:
            if rec.t == t:
                return rec
        raise KeyError(t)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records], dtype=float)

    def network_at(self, t: int) -> ContactNetwork:
        edges = np.concatenate([self.initial.edges, np.array(self.additions[:t], dtype=np.int64).reshape(-1, 2)])
        return self.initial.with_edges(edges, source=self.final.source)


def measure(net: ContactNetwork, t: int, added=None, seq_dist=None):
    """One trajectory record plus the per-node betweenness vector."""
    ps = path_stats(net)
    ncomp = int(csgraph.connected_components(net.csr, directed=False)[0]) if net.n else 0
    b = ps.betweenness
    rec = TrajectoryRecord(
        t=t,
        added_edge=added,
        seq_dist=seq_dist,
        edges=net.m,
        bt_mean=b.mean,
        bt_std=b.std,
        bt_median=b.median,
        bt_max=b.max,
        apl=ps.paths.apl,
        hpl=ps.hpl,
        n_components=ncomp,
    )
    return rec, b.values


def replay(initial: ContactNetwork, additions, order_mode: str, seed, snapshots=(), stride: int = 1,
           seq_dists=None) -> Trajectory:
    """Add ``additions`` one per step to ``initial`` and record statistics.

    Records are taken at t = 0, every ``stride``-th step, every snapshot step
    and the final step.
    """
    if stride < 1:
        raise ValueError("stride must be >= 1")
    additions = [(int(a), int(b)) if a < b else (int(b), int(a)) for a, b in additions]
    total = len(additions)
    if seq_dists is None:
        seq_dists = [_sd(a, b, initial) for a, b in additions]
    wanted_snaps = set(int(s) for s in snapshots)
    edges = [tuple(e) for e in initial.edges.tolist()]
    records = []
    snaps = {}
    net = initial
    rec, bt = measure(net, 0)
    records.append(rec)
    if 0 in wanted_snaps:
        snaps[0] = bt.copy()
    for t, (edge, sd) in enumerate(zip(additions, seq_dists), start=1):
        edges.append(edge)
        if t % stride and t != total and t not in wanted_snaps:
            continue
        net = initial.with_edges(np.array(edges, dtype=np.int64))
        rec, bt = measure(net, t, edge, int(sd))
        records.append(rec)
        if t in wanted_snaps:
            snaps[t] = bt.copy()
    final = initial.with_edges(np.array(edges, dtype=np.int64).reshape(-1, 2))
    return Trajectory(records, order_mode, seed, initial, final, additions, snaps)


def _sd(a: int, b: int, net: ContactNetwork) -> int:
    d = abs(a - b)
    return min(d, net.n - d) if net.ring else d


def folding_order(le_edges: np.ndarray, le_sd: np.ndarray, order_mode: str, seed) -> np.ndarray:
    """Permutation of the long-range links for the chosen addition order."""
    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(le_edges))
    if order_mode == "random":
        return perm
    if order_mode == "seqdist":
        # shuffled first, then a stable sort: ties at equal seq_dist stay in random order
        return perm[np.argsort(le_sd[perm], kind="stable")]
    raise ValueError(f"unknown order mode {order_mode!r}")


def simulate_folding(net: ContactNetwork, le_th: int = DEFAULT_LE_TH, order_mode: str = "seqdist",
                     seed: int = 0, betweenness_snapshots=(), stride: int = 1) -> Trajectory:
    """Start from the SE-only network and add the LE links one at a time."""
    part = partition_links(net, le_th)
    if len(part.le) == 0:
        raise NoLongRangeLinks(f"{net.source or 'network'} has no links with seq_dist > {le_th}")
    start = subnetwork(net, part, "SE")
    start = start.with_edges(start.edges, source=net.source)
    le_sd = part.le[:, 1] - part.le[:, 0]
    if net.ring:
        le_sd = np.minimum(le_sd, net.n - le_sd)
    order = folding_order(part.le, le_sd, order_mode, seed)
    return replay(start, part.le[order], order_mode, seed, betweenness_snapshots, stride, le_sd[order])


@dataclass(frozen=True)
class Transition:
    t_star: int
    hpl_drop: float
    median_spike_t: int
    median_spike: float
    window: int
    method: str = "windowed hpl drop (heuristic)"


def detect_transition(traj: Trajectory, window: int = 5) -> Transition:
    """Step with the largest drop between the mean hpl of the preceding and following windows.

    Also reports the largest forward jump of median betweenness. With a stride
    the windows are counted in recorded steps.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    recs = traj.records
    if len(recs) <= 2 * window:
        raise TrajectoryTooShort(f"{len(recs)} records, need more than {2 * window}")
    hpl = np.array([r.hpl for r in recs], dtype=float)
    ts = [r.t for r in recs]
    csum = np.concatenate([[0.0], np.cumsum(hpl)])
    best_i, best = None, -math.inf
    for i in range(window, len(recs) - window + 1):
        before = (csum[i] - csum[i - window]) / window
        after = (csum[i + window] - csum[i]) / window
        drop = before - after
        if drop > best:
            best_i, best = i, drop
    med = np.array([r.bt_median for r in recs], dtype=float)
    diff = np.diff(med)
    j = int(np.argmax(diff))
    return Transition(ts[best_i], float(best), ts[j], float(diff[j]), window)


def betweenness_distribution_at(traj: Trajectory, t: int) -> np.ndarray:
    if t not in traj.snapshots:
        raise SnapshotNotRecorded(f"no betweenness snapshot at t={t}")
    return traj.snapshots[t]
