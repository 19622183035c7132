import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from pcnkit.cli import main
from pcnkit.dynamics import TRAJECTORY_COLUMNS
from pcnkit.metrics import REPORT_COLUMNS
from pcnkit.network import LatticeSpec, make_lattice, read_network, save_network
from synthetic import bundle_trace, pdb_bytes, split_trace


@pytest.fixture
def folded_file(tmp_path):
    rng = np.random.default_rng(0)
    base = make_lattice(LatticeSpec(60, 4))
    links = set()
    while len(links) < 25:
        a, b = sorted(rng.integers(0, 60, size=2).tolist())
        if b - a > 9:
            links.add((a, b))
    net = base.with_edges(np.vstack([base.edges, sorted(links)]), source="toy")
    path = tmp_path / "toy.pcn"
    path.write_bytes(save_network(net))
    return path


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_usage_errors(capsys):
    assert run([], capsys)[0] == 1
    assert run(["stats"], capsys)[0] == 1
    assert run(["rewire", "x.pcn", "--mode", "sideways"], capsys)[0] == 1
    code, _, err = run(["generate", "--band", "10-20"], capsys)
    assert code == 1 and "--band" in err


def test_missing_file_is_io_error(tmp_path, capsys):
    assert run(["stats", tmp_path / "missing.pcn"], capsys)[0] == 3


def test_bad_network_file_is_data_error(tmp_path, capsys):
    bad = tmp_path / "bad.pcn"
    bad.write_text("#pcn v1\n#source x\n#n -5\n#th 7.000\n")
    code, _, err = run(["stats", bad], capsys)
    assert code == 2 and "line 3" in err


def test_stats_json_and_csv(data_dir, tmp_path, capsys):
    code, out, _ = run(["stats", data_dir / "hairpin.pcn", "--out", tmp_path, "--vectors"], capsys)
    assert code == 0
    js = json.loads(out)
    assert js["n"] == 47 and js["m"] == 162
    assert js["unreachable_pairs"] > 0
    assert (tmp_path / "9xyz" / "betweenness.csv").is_file()
    code, out, _ = run(["--csv", "stats", data_dir / "hairpin.pcn", "--no-hierarchy"], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == list(REPORT_COLUMNS)
    assert rows[1][REPORT_COLUMNS.index("hierarchy_index")] == ""
    # the global flag is accepted after the subcommand as well
    code, out2, _ = run(["stats", data_dir / "hairpin.pcn", "--no-hierarchy", "--csv"], capsys)
    assert out2 == out


def test_rewire_outputs_are_reproducible(folded_file, tmp_path, capsys):
    argv = ["rewire", folded_file, "--mode", "se", "--seed", 4, "--trials", 3]
    code, out1, _ = run(argv + ["--out", tmp_path / "a"], capsys)
    assert code == 0
    code, out2, _ = run(argv + ["--out", tmp_path / "b"], capsys)
    assert out1 == out2
    a = (tmp_path / "a" / "toy_randse_trials.csv").read_bytes()
    assert a == (tmp_path / "b" / "toy_randse_trials.csv").read_bytes()
    assert a.decode().splitlines()[0] == "seed,applied,clustering,assortativity,apl,diameter"
    summary = json.loads((tmp_path / "a" / "toy_randse_summary.json").read_text())
    assert summary["mode"] == "se_only" and summary["trials"] == 3


def test_default_seed_is_announced(folded_file, tmp_path, capsys):
    code, _, err = run(["rewire", folded_file, "--trials", 1, "--out", tmp_path], capsys)
    assert code == 0 and "using seed 0" in err


def test_dynamics(folded_file, tmp_path, capsys):
    argv = ["dynamics", folded_file, "--seed", 2, "--snapshots", "0,10", "--out", tmp_path, "--csv"]
    code, out, _ = run(argv, capsys)
    assert code == 0
    traj = (tmp_path / "toy_seqdist_seed2_trajectory.csv").read_text().splitlines()
    assert traj[0] == ",".join(TRAJECTORY_COLUMNS)
    assert len(traj) == 1 + 26
    assert out.splitlines() == traj
    assert (tmp_path / "toy_seqdist_seed2_betweenness_t10.csv").is_file()
    summary = json.loads((tmp_path / "toy_seqdist_seed2_summary.json").read_text())
    assert summary["steps"] == 25 and "t_star" in summary["transition"]
    assert run(argv[:-1] + ["--snapshots", "a,b"], capsys)[0] == 1


def test_generate(tmp_path, folded_file, capsys):
    argv = ["generate", "--n", 60, "--le-count", 20, "--band", "10:40", "--seed", 3, "--runs", 2,
            "--target", folded_file, "--out", tmp_path]
    code, out, _ = run(argv, capsys)
    assert code == 0
    runs = json.loads(out)["runs"]
    assert [r["seed"] for r in runs] == [3, 4]
    assert (tmp_path / "lin-n60-seed3_trajectory.csv").is_file()
    assert (tmp_path / "lin-n60-seed4_comparison.json").is_file()
    assert read_network(tmp_path / "lin-n60-seed3.pcn").m == 3 * 60 - 6 + 20
    first = (tmp_path / "lin-n60-seed3_trajectory.csv").read_bytes()
    run(argv, capsys)
    assert (tmp_path / "lin-n60-seed3_trajectory.csv").read_bytes() == first


def test_generate_band_exhausted_is_data_error(tmp_path, capsys):
    code, _, err = run(["generate", "--n", 20, "--le-count", 500, "--seed", 0, "--out", tmp_path], capsys)
    assert code == 2 and "admissible" in err


def test_dist(tmp_path, capsys):
    files = []
    for n in (100, 200, 400):
        p = tmp_path / f"l{n}.pcn"
        p.write_bytes(save_network(make_lattice(LatticeSpec(n, 8))))
        files.append(p)
    code, out, _ = run(["dist", *files, "--out", tmp_path / "o"], capsys)
    assert code == 0
    js = json.loads(out)
    assert len(js["networks"]) == 3
    assert js["scaling_fit"]["n_points"] == 3
    assert (tmp_path / "o" / "density_scaling.json").is_file()
    assert (tmp_path / "o" / "lattice8-linear_seqdist_logbins.csv").read_text().startswith(
        "log_bin_lo,log_bin_hi,count\n")


def test_fetch_build_and_batch(tmp_path, pdb_server, monkeypatch, capsys):
    pdb_server.files["1TST.pdb"] = pdb_bytes(bundle_trace(source_id="1tst"))
    pdb_server.files["2TST.pdb"] = pdb_bytes(split_trace())
    pdb_server.files["3TST.pdb"] = pdb_bytes(bundle_trace(8, 25, source_id="3tst"))
    monkeypatch.setenv("PCNKIT_PDB_BASE", pdb_server.base_url)
    cache = tmp_path / "cache"
    code, out, _ = run(["fetch", "1tst", "--cache", cache], capsys)
    assert code == 0 and out.strip() == str(cache / "1tst.pdb")
    code, out, _ = run(["build", "1tst", "--cache", cache, "--out", tmp_path / "b"], capsys)
    assert code == 0 and json.loads(out)["ok"] is True
    assert (tmp_path / "b" / "1tst.pcn").is_file()

    manifest = tmp_path / "m.txt"
    manifest.write_text("1tst\n2tst\n3tst\n9nop\n")
    code, out, _ = run(["batch", manifest, "--cache", cache, "--out", tmp_path / "o", "--jobs", 2], capsys)
    assert code == 0
    js = json.loads(out)
    assert [r["id"] for r in js["rows"]] == ["1tst", "3tst"]
    assert {e["id"] for e in js["exclusions"]} == {"2tst", "9nop"}

    code, _, _ = run(["fetch", "9nop", "--cache", cache], capsys)
    assert code == 3
    code, _, _ = run(["fetch", "bad!", "--cache", cache], capsys)
    assert code == 2


def test_cache_from_environment(tmp_path, pdb_server, monkeypatch, capsys):
    pdb_server.files["1TST.pdb"] = pdb_bytes(bundle_trace(source_id="1tst"))
    monkeypatch.setenv("PCNKIT_PDB_BASE", pdb_server.base_url)
    monkeypatch.setenv("PCNKIT_CACHE", str(tmp_path / "envcache"))
    assert run(["fetch", "1tst"], capsys)[0] == 0
    assert (tmp_path / "envcache" / "1tst.pdb").is_file()


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pcnkit.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("pcnkit ")
