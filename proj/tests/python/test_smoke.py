import os
import subprocess
from pathlib import Path

import pytest

import ringsim

SCENARIOS = Path(os.environ.get("RINGSIM_SOURCE_DIR", Path(__file__).parents[2])) / "scenarios"
SMALL = """
name = "small"
seeds = [1, 2]
[fabric]
pods = 1
tors = 2
spines = 2
hosts_per_tor = 4
[[jobs]]
id = 0
rings = 2
chunk_bytes = 65536
passes = 1
"""


def test_parse_and_serialize_round_trip():
    sc = ringsim.parse_scenario(SMALL)
    again = ringsim.parse_scenario(sc.to_toml())
    assert sc.hash() == again.hash()
    assert sc.seeds == [1, 2]


def test_unknown_key_is_config_error():
    with pytest.raises(ringsim.ConfigError, match="fabirc"):
        ringsim.parse_scenario(SMALL + "\n[fabirc]\npods = 2\n")


def test_run_returns_complete_summaries():
    sc = ringsim.parse_scenario(SMALL)
    runs = ringsim.run(sc, workers=1)
    assert [r["seed"] for r in runs] == [1, 2]
    for r in runs:
        assert not r["truncated"]
        assert r["jobs"][0]["complete"]
        assert r["jobs"][0]["cct_ms"] > 0


def test_compare_paired_dirs(tmp_path):
    sc = ringsim.parse_scenario(SMALL)
    ringsim.run_to_dir(sc, tmp_path / "base", workers=1)
    sc.symphony_enabled = True
    ringsim.run_to_dir(sc, tmp_path / "sym", workers=1)
    jobs = ringsim.compare(tmp_path / "base", tmp_path / "sym")
    assert jobs[0]["seeds"] == [1, 2]
    assert len(jobs[0]["cct_improvement"]) == 2


def test_marker_primitives():
    p = ringsim.MarkerParams()
    s = ringsim.MarkerState()
    rng = ringsim.Rng(7)
    s.step_min, s.psn_rec, s.alpha = 5, 200, 2
    cls, delta, prob, _ = ringsim.process_packet(s, 6, 400, False, p, rng)
    assert cls == "outpacing"
    assert delta == 4.0
    assert prob == pytest.approx(0.04)
    assert ringsim.process_packet(s, 5, 10, False, p, rng)[0] == "lagging"


def test_scenario_files_parse():
    for f in sorted(SCENARIOS.glob("*.toml")):
        ringsim.load_scenario(f)


def test_cli_exit_codes(tmp_path):
    cli = os.environ.get("RINGSIM_CLI")
    if not cli:
        pytest.skip("CLI path not provided")
    bad = tmp_path / "bad.toml"
    bad.write_text(SMALL + "\n[fabirc]\n")
    assert subprocess.run([cli, "run", str(bad), "-o", str(tmp_path / "o")]).returncode == 1
    good = tmp_path / "good.toml"
    good.write_text(SMALL)
    assert subprocess.run([cli, "run", str(good), "-o", str(tmp_path / "o")]).returncode == 0
    assert (tmp_path / "o" / "manifest.json").exists()
