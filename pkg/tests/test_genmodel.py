import math

import numpy as np
import pytest

from pcnkit.errors import BandExhausted, InvalidSpec
from pcnkit.genmodel import GenConfig, compare_to_target, draw_long_links, generate
from pcnkit.dynamics import simulate_folding
from pcnkit.metrics import clustering_coefficient
from pcnkit.network import LatticeSpec, make_lattice, partition_links


def test_defaults():
    cfg = GenConfig(385)
    assert cfg.le_count == 462
    assert cfg.band == (10, 269)


@pytest.mark.parametrize("kwargs", [
    dict(n=50, band=(1, 20)), dict(n=50, band=(10, 50)), dict(n=50, band=(30, 20)),
    dict(n=50, le_count=0), dict(n=50, topology="helix"),
])
def test_invalid_configs(kwargs):
    with pytest.raises(InvalidSpec):
        GenConfig(**kwargs)


def test_initial_lattice_and_single_link():
    traj = generate(GenConfig(385, le_count=1, seed=2))
    assert traj.records[0].edges == 1149
    assert traj.length == 1
    assert traj.final.m == 1150


@pytest.mark.parametrize("topology", ["linear", "ring"])
def test_links_stay_in_band(topology):
    cfg = GenConfig(120, topology=topology, le_count=150, band=(10, 50), seed=3)
    traj = generate(cfg, stride=1000)
    n = cfg.n
    for a, b in traj.additions:
        d = b - a
        if topology == "ring":
            d = min(d, n - d)
        assert 10 <= d <= 50
    assert len(set(traj.additions)) == 150
    lattice = make_lattice(LatticeSpec(n, 6)).edge_set()
    assert not lattice & set(traj.additions)


def test_ring_reaches_across_the_ends():
    cfg = GenConfig(100, topology="ring", le_count=300, band=(10, 30), seed=0)
    traj = generate(cfg, stride=1000)
    assert traj.final.ring
    # circular placement admits pairs with |i - j| > 30
    assert max(b - a for a, b in traj.additions) > 30
    assert all(sd <= 30 for sd in traj.final.seq_dist[traj.final.seq_dist >= 10])


def test_sorted_addition_changes_order_only():
    drawn = generate(GenConfig(150, seed=8), stride=1000)
    srt = generate(GenConfig(150, sorted_addition=True, seed=8), stride=1000)
    assert drawn.final.edge_set() == srt.final.edge_set()
    assert sorted(drawn.additions) == sorted(srt.additions)
    sds = [b - a for a, b in srt.additions]
    assert sds == sorted(sds)
    assert drawn.additions != srt.additions
    assert srt.order_mode == "sorted" and drawn.order_mode == "drawn"


def test_band_exhausted():
    # band [10, 12] on 20 nodes holds 10 + 9 + 8 = 27 pairs
    with pytest.raises(BandExhausted):
        generate(GenConfig(20, le_count=28, band=(10, 12)))
    traj = generate(GenConfig(20, le_count=27, band=(10, 12)), stride=100)
    assert traj.length == 27


def test_band_exhaustion_counts_ring_pairs():
    # ring of 20 with band [9, 10]: 20 pairs at distance 9, 10 at distance 10
    cfg = GenConfig(20, topology="ring", le_count=30, band=(9, 10))
    assert len(draw_long_links(cfg, make_lattice(LatticeSpec(20, 6)))) == 30
    with pytest.raises(BandExhausted):
        draw_long_links(GenConfig(20, topology="ring", le_count=31, band=(9, 10)),
                        make_lattice(LatticeSpec(20, 6)))


def test_deterministic():
    a = generate(GenConfig(100, seed=5), stride=10)
    b = generate(GenConfig(100, seed=5), stride=10)
    assert a.additions == b.additions and a.records == b.records
    assert generate(GenConfig(100, seed=6), stride=1000).additions != a.additions


def test_hpl_non_increasing():
    traj = generate(GenConfig(120, seed=1))
    assert np.all(np.diff(traj.column("hpl")) <= 1e-12)


def _apl_progress(seeds=range(20), n=385, le=482):
    t20 = math.ceil(0.2 * le)
    out = []
    for seed in seeds:
        traj = generate(GenConfig(n, le_count=le, seed=seed), snapshots=[t20], stride=le)
        out.append((traj.record_at(0).apl, traj.record_at(t20).apl, traj.record_at(le).apl))
    return np.array(out)


@pytest.fixture(scope="module")
def apl_progress():
    return _apl_progress()


def test_apl_within_ten_percent_of_final_after_a_fifth_of_the_links(apl_progress):
    ratios = apl_progress[:, 1] / apl_progress[:, 2]
    print(f"apl(t20)/apl(final): mean {ratios.mean():.3f}, max {ratios.max():.3f}")
    assert np.all(ratios <= 1.10), ratios


def test_most_of_the_apl_drop_happens_in_the_first_fifth(apl_progress):
    start, mid, end = apl_progress.T
    remaining = (mid - end) / (start - end)
    assert np.all(remaining <= 0.10), remaining


def test_compare_to_self_is_zero():
    net = make_lattice(LatticeSpec(80, 6))
    traj = generate(GenConfig(80, le_count=40, seed=0))
    cmp = compare_to_target(traj, traj.final, target_traj=traj)
    for row in cmp.rows:
        assert row["delta"] == pytest.approx(0.0, abs=1e-12) or math.isnan(row["delta"]), row
    assert cmp.value("clustering", "model") == pytest.approx(clustering_coefficient(traj.final)[0])
    assert cmp.value("degree_hist_tv") == 0.0
    with pytest.raises(KeyError):
        cmp.value("nope")
    assert net.m == 3 * 80 - 6


def test_compare_against_folded_target():
    # a dense, clustered target built from a wider lattice plus its own long-range links
    target = make_lattice(LatticeSpec(150, 10))
    extra = [(i, i + 40) for i in range(0, 100, 3)]
    target = target.with_edges(np.vstack([target.edges, extra]), source="target")
    model = generate(GenConfig(150, le_count=len(partition_links(target).le), seed=2))
    cmp = compare_to_target(model, target, target_traj=simulate_folding(target, seed=0))
    assert cmp.value("clustering") < -0.05
    expected = (partition_links(model.final).ratios["le_nodes_fraction"]
                - partition_links(target).ratios["le_nodes_fraction"])
    assert cmp.value("le_nodes_fraction") == pytest.approx(expected)
    assert cmp.value("degree_hist_tv") > 0
    js = cmp.to_json_dict()
    assert set(js) == {"rows", "degree_histogram", "seqdist_histogram"}
    assert "apl@0.2" in {r["metric"] for r in js["rows"]}
