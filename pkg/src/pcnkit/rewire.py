"""Degree-preserving link randomisation (randAll / randSE / randLE null models)."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import SwapStarvation, TooFewEligibleEdges
from .metrics import assortativity, clustering_coefficient, path_summary
from .network import DEFAULT_LE_TH, ContactNetwork

MODES = ("all", "se_only", "le_only")
_MODE_ALIASES = {"all": "all", "se": "se_only", "se_only": "se_only", "le": "le_only", "le_only": "le_only"}
ATTEMPT_CAP_FACTOR = 100


@dataclass(frozen=True)
class RewireConfig:
    mode: str = "all"
    le_th: int = DEFAULT_LE_TH
    # Applied-swap target; None means 10 x the number of eligible edges.
    attempts: int | None = None
    seed: int = 0
    preserve_class: bool = False

    def __post_init__(self):
        mode = _MODE_ALIASES.get(self.mode)
        if mode is None:
            raise ValueError(f"unknown rewire mode {self.mode!r}")
        object.__setattr__(self, "mode", mode)
        if self.attempts is not None and self.attempts < 1:
            raise ValueError("attempts must be >= 1")


@dataclass(frozen=True)
class RewireResult:
    network: ContactNetwork
    target: int
    applied: int
    attempts: int
    starved: bool


def _seq_dist(a: int, b: int, n: int, ring: bool) -> int:
    d = abs(a - b)
    return min(d, n - d) if ring else d


def rewire(net: ContactNetwork, cfg: RewireConfig) -> RewireResult:
    """Swap pairs of eligible links (a,b),(c,d) -> (a,c),(b,d) keeping every degree.

    Edges are drawn with replacement; a draw of the same edge twice, a swap
    touching fewer than four distinct nodes, or one that would recreate an
    existing link is rejected. The input network is never modified.
    """
    n, ring, le_th = net.n, net.ring, cfg.le_th
    is_long = net.seq_dist > le_th
    if cfg.mode == "all":
        eligible_mask = np.ones(net.m, dtype=bool)
    elif cfg.mode == "se_only":
        eligible_mask = ~is_long
    else:
        eligible_mask = is_long
    pool = [(int(a), int(b)) for a, b in net.edges[eligible_mask]]
    if len(pool) < 2:
        raise TooFewEligibleEdges(f"mode {cfg.mode} has {len(pool)} eligible edge(s), need 2")
    fixed = [(int(a), int(b)) for a, b in net.edges[~eligible_mask]]

    target = cfg.attempts if cfg.attempts is not None else 10 * len(pool)
    cap = ATTEMPT_CAP_FACTOR * target
    present = set(pool)
    present.update(fixed)
    rng = np.random.default_rng(cfg.seed)
    n_pool = len(pool)

    applied = 0
    attempts = 0
    # draw in blocks to keep the per-attempt Python overhead low
    block = 4096
    while applied < target and attempts < cap:
        picks = rng.integers(0, n_pool, size=(block, 2))
        flips = rng.random(block) < 0.5
        for (i, j), flip in zip(picks.tolist(), flips.tolist()):
            if applied >= target or attempts >= cap:
                break
            attempts += 1
            if i == j:
                continue
            a, b = pool[i]
            if flip:
                a, b = b, a
            c, d = pool[j]
            if a == c or a == d or b == c or b == d:
                continue
            e3 = (a, c) if a < c else (c, a)
            e4 = (b, d) if b < d else (d, b)
            if e3 in present or e4 in present:
                continue
            if cfg.preserve_class:
                if (_seq_dist(a, b, n, ring) > le_th) != (_seq_dist(*e3, n, ring) > le_th):
                    continue
                if (_seq_dist(c, d, n, ring) > le_th) != (_seq_dist(*e4, n, ring) > le_th):
                    continue
            present.discard(pool[i])
            present.discard(pool[j])
            present.add(e3)
            present.add(e4)
            pool[i] = e3
            pool[j] = e4
            applied += 1

    starved = applied < 0.5 * target
    if starved:
        warnings.warn(
            SwapStarvation(f"only {applied} of {target} swaps applied in {attempts} attempts"),
            stacklevel=2,
        )
    out = net.with_edges(np.array(pool + fixed, dtype=np.int64).reshape(-1, 2))
    return RewireResult(out, target, applied, attempts, starved)


DEFAULT_ENSEMBLE_METRICS = ("clustering", "assortativity", "apl", "diameter")


def _selected_metrics(net: ContactNetwork, names) -> dict[str, float]:
    out = {}
    if "clustering" in names:
        out["clustering"] = clustering_coefficient(net)[0]
    if "assortativity" in names:
        r = assortativity(net) if net.m else None
        out["assortativity"] = math.nan if r is None else r
    if "apl" in names or "diameter" in names:
        ps = path_summary(net)
        if "apl" in names:
            out["apl"] = ps.apl
        if "diameter" in names:
            out["diameter"] = float(ps.diameter)
    return out


@dataclass(frozen=True)
class EnsembleResult:
    config: RewireConfig
    original: dict[str, float]
    trials: list[dict[str, float]]
    mean: dict[str, float] = field(default_factory=dict)
    std: dict[str, float] = field(default_factory=dict)
    delta_mean: dict[str, float] = field(default_factory=dict)
    delta_std: dict[str, float] = field(default_factory=dict)
    starved_trials: int = 0

    def deltas(self, name: str) -> np.ndarray:
        return np.array([t[name] - self.original[name] for t in self.trials])


def rewire_ensemble(net: ContactNetwork, cfg: RewireConfig, trials: int,
                    metrics=DEFAULT_ENSEMBLE_METRICS) -> EnsembleResult:
    """Independent rewires with seeds ``cfg.seed + i``; per-metric mean and std."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    original = _selected_metrics(net, metrics)
    rows = []
    starved = 0
    for i in range(trials):
        trial_cfg = RewireConfig(cfg.mode, cfg.le_th, cfg.attempts, cfg.seed + i, cfg.preserve_class)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", SwapStarvation)
            res = rewire(net, trial_cfg)
        starved += res.starved
        row = _selected_metrics(res.network, metrics)
        row["seed"] = trial_cfg.seed
        row["applied"] = res.applied
        rows.append(row)
    mean, std, dmean, dstd = {}, {}, {}, {}
    for name in metrics:
        vals = np.array([r[name] for r in rows], dtype=float)
        delta = vals - original[name]
        mean[name] = float(vals.mean())
        std[name] = float(vals.std())
        dmean[name] = float(delta.mean())
        dstd[name] = float(delta.std())
    return EnsembleResult(cfg, original, rows, mean, std, dmean, dstd, starved)
