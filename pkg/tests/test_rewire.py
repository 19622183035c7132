import random
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from pcnkit.errors import SwapStarvation, TooFewEligibleEdges
from pcnkit.metrics import clustering_coefficient, path_summary
from pcnkit.network import ContactNetwork, LatticeSpec, make_lattice, partition_links
from pcnkit.rewire import RewireConfig, rewire, rewire_ensemble


def mixed_network(n=80, seed=0):
    """Lattice backbone plus random long-range links, a rough PCN stand-in."""
    rng = np.random.default_rng(seed)
    base = make_lattice(LatticeSpec(n, 4))
    extra = set()
    while len(extra) < n // 2:
        a, b = sorted(rng.integers(0, n, size=2).tolist())
        if b - a > 9:
            extra.add((a, b))
    return base.with_edges(np.vstack([base.edges, sorted(extra)]), source="mixed")


def check_simple(net):
    assert np.all(net.edges[:, 0] < net.edges[:, 1])
    assert len(net.edge_set()) == net.m


@pytest.mark.parametrize("mode", ["all", "se", "le"])
def test_degrees_preserved_over_many_swaps(mode):
    rng = random.Random(11)
    net = ContactNetwork(120, oracles.random_graph(120, 0.08, rng))
    res = rewire(net, RewireConfig(mode, le_th=9, attempts=10_000, seed=1))
    assert res.applied == 10_000
    assert np.array_equal(res.network.degrees, net.degrees)
    check_simple(res.network)
    assert res.network.m == net.m


@pytest.mark.parametrize("mode", ["se", "le"])
def test_only_eligible_class_changes(mode):
    net = mixed_network()
    part = partition_links(net)
    res = rewire(net, RewireConfig(mode, seed=4))
    removed = net.edge_set() - res.network.edge_set()
    untouched = {tuple(e) for e in (part.le if mode == "se" else part.se).tolist()}
    eligible = {tuple(e) for e in (part.se if mode == "se" else part.le).tolist()}
    assert removed and removed <= eligible
    assert untouched <= res.network.edge_set()


def test_preserve_class_keeps_class_sizes():
    net = mixed_network(seed=2)
    before = partition_links(net)
    for mode in ("all", "se", "le"):
        res = rewire(net, RewireConfig(mode, seed=5, preserve_class=True))
        after = partition_links(res.network)
        assert len(after.le) == len(before.le)
        assert np.array_equal(res.network.degrees, net.degrees)


def test_class_drift_happens_without_preservation():
    net = mixed_network(seed=2)
    res = rewire(net, RewireConfig("all", seed=5))
    assert len(partition_links(res.network).le) != len(partition_links(net).le)


def test_deterministic():
    net = mixed_network()
    cfg = RewireConfig("all", seed=77)
    assert rewire(net, cfg).network == rewire(net, cfg).network
    assert rewire(net, RewireConfig("all", seed=78)).network != rewire(net, cfg).network


def test_input_is_not_modified():
    net = mixed_network()
    snapshot = net.edges.copy()
    rewire(net, RewireConfig("all", seed=3))
    assert np.array_equal(net.edges, snapshot)


def test_default_target_is_ten_times_eligible():
    net = mixed_network()
    part = partition_links(net)
    res = rewire(net, RewireConfig("le", seed=0))
    assert res.target == 10 * len(part.le)


def test_too_few_eligible_edges():
    net = ContactNetwork(30, [(0, 1), (1, 2), (2, 3), (0, 20)])
    with pytest.raises(TooFewEligibleEdges):
        rewire(net, RewireConfig("le"))


def test_mode_names():
    assert RewireConfig("se").mode == "se_only"
    assert RewireConfig("le_only").mode == "le_only"
    with pytest.raises(ValueError):
        RewireConfig("random")
    with pytest.raises(ValueError):
        RewireConfig(attempts=0)


def test_starvation_warning():
    # in K4 every proposed link already exists
    net = ContactNetwork(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    with pytest.warns(SwapStarvation):
        res = rewire(net, RewireConfig("all", attempts=5, seed=0))
    assert res.starved and res.applied == 0
    assert res.attempts == 500
    assert res.network == net


def test_rewiring_randomises_a_lattice():
    net = make_lattice(LatticeSpec(300, 8))
    with warnings.catch_warnings():
        warnings.simplefilter("error", SwapStarvation)
        res = rewire(net, RewireConfig("all", seed=0))
    c0 = clustering_coefficient(net)[0]
    c1 = clustering_coefficient(res.network)[0]
    assert c0 > 0.6
    # random-graph level is K/N, about 0.027 here
    assert c1 < 0.06
    assert path_summary(res.network).apl < path_summary(net).apl / 3


def test_ensemble():
    net = mixed_network()
    ens = rewire_ensemble(net, RewireConfig("all", seed=10), trials=3)
    assert [t["seed"] for t in ens.trials] == [10, 11, 12]
    single = rewire(net, RewireConfig("all", seed=10)).network
    assert ens.trials[0]["clustering"] == clustering_coefficient(single)[0]
    assert ens.deltas("clustering")[0] == pytest.approx(
        clustering_coefficient(single)[0] - clustering_coefficient(net)[0])
    assert ens.delta_mean["clustering"] < 0
    with pytest.raises(ValueError):
        rewire_ensemble(net, RewireConfig(), trials=0)


@given(st.integers(8, 40), st.floats(0.1, 0.6), st.integers(0, 2**32 - 1), st.sampled_from(["all", "se", "le"]),
       st.booleans())
@settings(max_examples=60, deadline=None)
def test_rewire_properties(n, p, seed, mode, keep):
    net = ContactNetwork(n, oracles.random_graph(n, p, random.Random(seed)))
    cfg = RewireConfig(mode, le_th=4, attempts=200, seed=seed, preserve_class=keep)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", SwapStarvation)
            res = rewire(net, cfg)
    except TooFewEligibleEdges:
        return
    out = res.network
    assert np.array_equal(out.degrees, net.degrees)
    check_simple(out)
    if mode != "all":
        long_before = {e for e in net.edge_set() if e[1] - e[0] > 4}
        short_before = net.edge_set() - long_before
        kept = short_before if mode == "le" else long_before
        assert kept <= out.edge_set()
    if keep:
        assert len(partition_links(out, 4).le) == len(partition_links(net, 4).le)
