"""Link sequence-distance spectra and the density-versus-size power law."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoEdges, NonPositiveValue, TooFewPoints
from .network import ContactNetwork

LOG_BIN_RATIO = 2


@dataclass(frozen=True)
class SeqDistHistogram:
    counts: dict[int, int]
    n: int
    max_seq_dist: int
    max_ratio: float
    mean: float
    median: float
    log_bins: list[tuple[int, int, int]]

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def log_bins(counts: dict[int, int], ratio: int = LOG_BIN_RATIO) -> list[tuple[int, int, int]]:
    """Geometric bins [lo, hi) with hi = ratio * lo, starting at 1."""
    if not counts:
        return []
    top = max(counts)
    out = []
    lo = 1
    while lo <= top:
        hi = lo * ratio
        out.append((lo, hi, sum(c for d, c in counts.items() if lo <= d < hi)))
        lo = hi
    return out


def seqdist_histogram(net: ContactNetwork) -> SeqDistHistogram:
    if net.m == 0:
        raise NoEdges("sequence-distance histogram needs at least one edge")
    sd = np.asarray(net.seq_dist)
    values, freq = np.unique(sd, return_counts=True)
    counts = {int(v): int(c) for v, c in zip(values, freq)}
    mx = int(sd.max())
    return SeqDistHistogram(
        counts=counts,
        n=net.n,
        max_seq_dist=mx,
        max_ratio=mx / net.n,
        mean=float(sd.mean()),
        median=float(np.median(sd)),
        log_bins=log_bins(counts),
    )


@dataclass(frozen=True)
class ScalingFit:
    points: list[tuple[float, float]]
    slope: float
    intercept: float
    r_squared: float

    def to_json_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept,
                "r_squared": self.r_squared, "n_points": len(self.points)}


def density_scaling_fit(points) -> ScalingFit:
    """Least-squares line through (ln N, ln density); the slope estimates the exponent."""
    pts = [(float(a), float(b)) for a, b in points]
    if len(pts) < 3:
        raise TooFewPoints(f"scaling fit needs >= 3 points, got {len(pts)}")
    if any(a <= 0 or b <= 0 for a, b in pts):
        raise NonPositiveValue("sizes and densities must be positive")
    x = np.log([a for a, _ in pts])
    y = np.log([b for _, b in pts])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid ** 2).sum()) / ss_tot if ss_tot > 0 else math.nan
    return ScalingFit(pts, float(slope), float(intercept), r2)
