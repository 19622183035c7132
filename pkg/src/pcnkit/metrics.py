"""Static network statistics and their regular/random reference values."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import _kernels
from .errors import (
    AllPairsUnreachable,
    DomainError,
    LengthMismatch,
    NoEdges,
    NoPairs,
    TooFewNodes,
    ZeroVariance,
)
from .network import ContactNetwork, link_density


def _csr_arrays(net: ContactNetwork):
    csr = net.csr
    return csr.indptr.astype(np.int64), csr.indices.astype(np.int64)


def _median(values) -> float:
    # numpy's median already averages the two middle values for even counts
    return float(np.median(values)) if len(values) else 0.0


@dataclass(frozen=True)
class DegreeSummary:
    per_node_degree: np.ndarray
    mean: float
    std: float
    median: float
    min: int
    max: int
    histogram: dict[int, int]


@dataclass(frozen=True)
class PathSummary:
    apl: float
    median: float
    std: float
    diameter: int
    distribution: dict[int, int]
    unreachable_pairs: int

    @property
    def defined(self) -> bool:
        return bool(self.distribution)


@dataclass(frozen=True)
class BetweennessResult:
    values: np.ndarray
    mean: float
    std: float
    median: float
    max: float


@dataclass(frozen=True)
class References:
    c_random: float
    c_regular: float
    l_random: float
    l_regular: float


# Column order of MetricsReport.to_row(); also the CSV header.
REPORT_COLUMNS = (
    "source", "n", "m", "density",
    "k_mean", "k_std", "k_median", "k_min", "k_max",
    "clustering", "c_random", "c_regular",
    "assortativity",
    "apl", "path_median", "path_std", "diameter", "unreachable_pairs",
    "l_random", "l_regular", "hpl",
    "bt_mean", "bt_std", "bt_median", "bt_max",
    "hierarchy_index",
)


@dataclass(frozen=True)
class MetricsReport:
    source: str
    n: int
    m: int
    degree: DegreeSummary
    clustering: float
    c_random: float
    c_regular: float
    assortativity: float | None
    paths: PathSummary
    l_random: float
    l_regular: float
    hpl: float
    betweenness: BetweennessResult
    hierarchy_index: float
    density: float
    per_node_clustering: np.ndarray = field(repr=False, default=None)

    def to_row(self) -> dict:
        """Flat mapping in REPORT_COLUMNS order; undefined values become None."""
        d = self.degree
        p = self.paths
        b = self.betweenness
        row = {
            "source": self.source, "n": self.n, "m": self.m, "density": self.density,
            "k_mean": d.mean, "k_std": d.std, "k_median": d.median, "k_min": d.min, "k_max": d.max,
            "clustering": self.clustering, "c_random": self.c_random, "c_regular": self.c_regular,
            "assortativity": self.assortativity,
            "apl": p.apl if p.defined else None, "path_median": p.median if p.defined else None,
            "path_std": p.std if p.defined else None, "diameter": p.diameter,
            "unreachable_pairs": p.unreachable_pairs,
            "l_random": self.l_random, "l_regular": self.l_regular, "hpl": self.hpl,
            "bt_mean": b.mean, "bt_std": b.std, "bt_median": b.median, "bt_max": b.max,
            "hierarchy_index": self.hierarchy_index,
        }
        return {k: _plain(row[k]) for k in REPORT_COLUMNS}

    def to_json_dict(self) -> dict:
        out = self.to_row()
        out["degree_histogram"] = {str(k): v for k, v in self.degree.histogram.items()}
        out["path_distribution"] = {str(k): v for k, v in self.paths.distribution.items()}
        return out


def _plain(v):
    if v is None:
        return None
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return None if math.isnan(v) or math.isinf(v) else v
    return v


def degree_summary(net: ContactNetwork) -> DegreeSummary:
    k = np.asarray(net.degrees)
    if net.n == 0:
        return DegreeSummary(k, 0.0, 0.0, 0.0, 0, 0, {})
    values, counts = np.unique(k, return_counts=True)
    return DegreeSummary(
        per_node_degree=k,
        mean=float(k.mean()),
        std=float(k.std()),
        median=_median(k),
        min=int(k.min()),
        max=int(k.max()),
        histogram={int(a): int(b) for a, b in zip(values, counts)},
    )


def clustering_coefficient(net: ContactNetwork) -> tuple[float, np.ndarray]:
    """Mean local clustering over all nodes; nodes with degree < 2 count as 0."""
    if net.n == 0:
        return 0.0, np.zeros(0)
    indptr, indices = _csr_arrays(net)
    tri = _kernels.triangles_per_node(indptr, indices, net.n)
    k = np.asarray(net.degrees, dtype=float)
    denom = k * (k - 1)
    c = np.zeros(net.n)
    ok = k >= 2
    c[ok] = 2.0 * tri[ok] / denom[ok]
    return float(c.mean()), c


def canonical_references(n: int, k: float) -> References:
    """Clustering and path length of size-matched random and 1-D regular graphs."""
    if n < 2:
        raise DomainError("reference values need n >= 2")
    if k <= 1:
        raise DomainError(f"reference values need mean degree > 1, got {k}")
    return References(
        c_random=k / n,
        c_regular=3.0 * (k - 2) / (4.0 * (k - 1)),
        l_random=math.log(n) / math.log(k),
        l_regular=n * (n + k - 2) / (2.0 * k * (n - 1)),
    )


def assortativity(net: ContactNetwork) -> float | None:
    """Newman degree assortativity; None when a degree marginal has zero variance."""
    if net.m == 0:
        raise NoEdges("assortativity needs at least one edge")
    k = np.asarray(net.degrees, dtype=float)
    a = k[net.edges[:, 0]]
    b = k[net.edges[:, 1]]
    x = np.concatenate([a, b])
    y = np.concatenate([b, a])
    xm = x - x.mean()
    ym = y - y.mean()
    sxx = float(xm @ xm)
    syy = float(ym @ ym)
    if sxx == 0.0 or syy == 0.0:
        return None
    return float(xm @ ym) / math.sqrt(sxx * syy)


def neighbor_degree_curve(net: ContactNetwork) -> dict[int, tuple[float, float]]:
    """degree k -> (mean, std) of the degrees of all neighbours of degree-k nodes."""
    if net.m == 0:
        raise NoEdges("neighbour degree curve needs at least one edge")
    k = np.asarray(net.degrees)
    src = np.concatenate([net.edges[:, 0], net.edges[:, 1]])
    dst = np.concatenate([net.edges[:, 1], net.edges[:, 0]])
    src_k = k[src]
    dst_k = k[dst].astype(float)
    curve = {}
    for deg in np.unique(src_k):
        vals = dst_k[src_k == deg]
        curve[int(deg)] = (float(vals.mean()), float(vals.std()))
    return curve


def _path_pass(net: ContactNetwork):
    indptr, indices = _csr_arrays(net)
    return _kernels.brandes_paths(indptr, indices, net.n)


def _path_summary_from_hist(n: int, hist: np.ndarray) -> PathSummary:
    counts = hist // 2  # ordered -> unordered pairs
    lengths = np.nonzero(counts)[0]
    total_pairs = n * (n - 1) // 2
    reachable = int(counts.sum())
    dist = {int(d): int(counts[d]) for d in lengths}
    if reachable == 0:
        return PathSummary(math.nan, math.nan, math.nan, 0, {}, total_pairs)
    w = counts[lengths].astype(float)
    d = lengths.astype(float)
    apl = float((w * d).sum() / reachable)
    std = math.sqrt(float((w * (d - apl) ** 2).sum() / reachable))
    cum = np.cumsum(counts[lengths])
    # midpoint of the two middle pair distances when the pair count is even
    lo = int(lengths[np.searchsorted(cum, (reachable - 1) // 2 + 1)])
    hi = int(lengths[np.searchsorted(cum, reachable // 2 + 1)])
    median = (lo + hi) / 2.0
    return PathSummary(apl, median, std, int(lengths.max()), dist, total_pairs - reachable)


def _hpl_from_hist(n: int, hist: np.ndarray) -> float:
    if n < 2:
        raise TooFewNodes("harmonic path length needs at least two nodes")
    d = np.arange(len(hist), dtype=float)
    inv = float((hist[1:] / d[1:]).sum()) / 2.0
    if inv == 0.0:
        raise AllPairsUnreachable("no pair of nodes is connected")
    return (n * (n - 1) / 2.0) / inv


def _betweenness_from_raw(n: int, raw: np.ndarray) -> BetweennessResult:
    if n >= 3:
        values = raw / 2.0 / ((n - 1) * (n - 2) / 2.0)
    else:
        values = np.zeros(n)
    if n == 0:
        return BetweennessResult(values, 0.0, 0.0, 0.0, 0.0)
    return BetweennessResult(
        values, float(values.mean()), float(values.std()), _median(values), float(values.max())
    )


def path_summary(net: ContactNetwork) -> PathSummary:
    _, hist = _path_pass(net)
    return _path_summary_from_hist(net.n, hist)


def harmonic_path_length(net: ContactNetwork) -> float:
    """Inverse of the mean inverse distance over all pairs (unreachable pairs add 0)."""
    if net.n < 2:
        raise TooFewNodes("harmonic path length needs at least two nodes")
    _, hist = _path_pass(net)
    return _hpl_from_hist(net.n, hist)


def betweenness_centrality(net: ContactNetwork) -> BetweennessResult:
    """Brandes betweenness normalised by the (N-1)(N-2)/2 unordered pairs."""
    raw, _ = _path_pass(net)
    return _betweenness_from_raw(net.n, raw)


@dataclass(frozen=True)
class PathStats:
    """Everything one all-pairs BFS sweep yields; used by the trajectory code."""

    betweenness: BetweennessResult
    paths: PathSummary
    hpl: float


def path_stats(net: ContactNetwork) -> PathStats:
    raw, hist = _path_pass(net)
    try:
        hpl = _hpl_from_hist(net.n, hist)
    except (AllPairsUnreachable, TooFewNodes):
        hpl = math.inf
    return PathStats(_betweenness_from_raw(net.n, raw), _path_summary_from_hist(net.n, hist), hpl)


def hierarchy_index(net: ContactNetwork) -> float:
    """Fraction of canonical shortest paths whose degree profile is up-then-down."""
    indptr, indices = _csr_arrays(net)
    pairs, good = _kernels.hierarchical_pairs(indptr, indices, np.asarray(net.degrees), net.n)
    if pairs == 0:
        raise NoPairs("no connected pair of nodes")
    return good / pairs


def clustering_by_degree(net: ContactNetwork) -> dict[int, float]:
    _, c = clustering_coefficient(net)
    k = np.asarray(net.degrees)
    return {int(deg): float(c[k == deg].mean()) for deg in np.unique(k)}


def correlate(x, y, method: str = "pearson") -> float:
    """Pearson r or Kendall tau-b between two per-node vectors."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y):
        raise LengthMismatch(f"vectors differ in length ({len(x)} vs {len(y)})")
    if len(x) < 3:
        raise LengthMismatch("correlation needs at least three observations")
    if method == "pearson":
        if np.ptp(x) == 0 or np.ptp(y) == 0:
            raise ZeroVariance("pearson correlation of a constant vector")
        return float(stats.pearsonr(x, y)[0])
    if method == "kendall":
        if np.ptp(x) == 0 or np.ptp(y) == 0:
            raise ZeroVariance("kendall tau of a constant vector")
        return float(stats.kendalltau(x, y, variant="b")[0])
    raise ValueError(f"unknown correlation method {method!r}")


def compute_report(net: ContactNetwork, with_hierarchy: bool = True) -> MetricsReport:
    """Every static statistic of one network."""
    deg = degree_summary(net)
    c, per_node = clustering_coefficient(net)
    try:
        refs = canonical_references(net.n, deg.mean)
    except DomainError:
        refs = References(math.nan, math.nan, math.nan, math.nan)
    r = assortativity(net) if net.m else None
    ps = path_stats(net)
    hier = math.nan
    if with_hierarchy:
        try:
            hier = hierarchy_index(net)
        except NoPairs:
            pass
    return MetricsReport(
        source=net.source,
        n=net.n,
        m=net.m,
        degree=deg,
        clustering=c,
        c_random=refs.c_random,
        c_regular=refs.c_regular,
        assortativity=r,
        paths=ps.paths,
        l_random=refs.l_random,
        l_regular=refs.l_regular,
        hpl=ps.hpl,
        betweenness=ps.betweenness,
        hierarchy_index=hier,
        density=link_density(net) if net.n >= 2 else 0.0,
        per_node_clustering=per_node,
    )


__all__ = [
    "BetweennessResult", "DegreeSummary", "MetricsReport", "PathStats", "PathSummary",
    "REPORT_COLUMNS", "References", "assortativity", "betweenness_centrality",
    "canonical_references", "clustering_by_degree", "clustering_coefficient",
    "compute_report", "correlate", "degree_summary", "harmonic_path_length",
    "hierarchy_index", "neighbor_degree_curve", "path_stats", "path_summary",
]
