import json
import math
import subprocess
import sys

import pytest

import disclab as dl
from disclab import harness as hz
from disclab.cli import main
from disclab.setsystem import IncidenceMatrix


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr().out
    return code, out


def test_derived_n_uses_natural_log():
    assert hz.derived_n(4.0, 3) == 40  # ceil(36 ln 3)
    with pytest.raises(ValueError):
        hz.derived_n(4.0, 1)


def test_config_rejects_oversized_n():
    with pytest.raises(ValueError):
        hz.ExperimentConfig(m_list=[4000], C=100.0)
    with pytest.raises(ValueError):
        hz.ExperimentConfig(m_list=[], C=4.0)
    with pytest.raises(ValueError):
        hz.ExperimentConfig(m_list=[3], solver="sdp")


def test_theorem_experiment_zero_trials():
    cfg = hz.ExperimentConfig(m_list=[3], trials=0)
    rep = hz.run_theorem_experiment(cfg)
    assert rep.rows == []
    assert rep.per_m[3]["success_rate"] is None


def test_theorem_experiment_rows_and_regime_flags():
    cfg = hz.ExperimentConfig(m_list=[2, 3], trials=4, budget=20000, seed=5)
    rep = hz.run_theorem_experiment(cfg)
    assert len(rep.rows) == 8
    assert rep.per_m[3]["n"] == 40
    assert rep.per_m[3]["regime_n_ok"]
    # t = 1.5 < 4 ln 40: the frequency condition fails at desk scale and is
    # reported, not enforced
    assert not rep.per_m[3]["regime_t_ok"]


def test_theorem_experiment_reproducible_across_threads(tmp_path):
    cfg1 = hz.ExperimentConfig(m_list=[3], trials=6, budget=20000, seed=9, threads=1)
    cfg4 = hz.ExperimentConfig(m_list=[3], trials=6, budget=20000, seed=9, threads=4)
    r1 = hz.run_theorem_experiment(cfg1)
    r4 = hz.run_theorem_experiment(cfg4)
    p1, p4 = tmp_path / "a.csv", tmp_path / "b.csv"
    r1.write_csv(p1)
    r4.write_csv(p4)
    assert p1.read_bytes() == p4.read_bytes()
    header = p1.read_text().splitlines()[0]
    assert header == "m,n,p,C,trial,seed,solver,budget,found,disc,flips"


def test_success_rate_monotone_in_n():
    # fixed (m, p, solver, budget), 3-point n grid, 2 binomial stderr slack
    m, p, trials, budget = 3, 0.5, 40, 3000
    rates = []
    for n in (12, 24, 48):
        hits = 0
        for k in range(trials):
            A = dl.sample_bernoulli(m, n, p, dl.rng.child_seed(17, n, k))
            hits += dl.random_search(A, 1, budget, dl.rng.child_seed(18, n, k)).found
        rates.append(hits / trials)
    se = math.sqrt(0.25 / trials)
    assert rates[1] >= rates[0] - 2 * se
    assert rates[2] >= rates[1] - 2 * se


def test_lowerbound_probe():
    rep = hz.run_lowerbound_probe(10, 10, 0.5, trials=20, seed=3)
    assert sum(rep["min_disc_histogram"].values()) == 20
    assert rep["mean_within_bound"] is True
    assert rep["counting_bound"] == pytest.approx(dl.counting_bound(10, 10, 1, 3.0))
    # opposite regime: a single wide set almost always reaches disc <= 1
    easy = hz.run_lowerbound_probe(1, 24, 0.5, trials=20, seed=4)
    assert easy["prob_min_disc_at_most_delta"] >= 0.95
    with pytest.raises(ValueError):
        hz.run_lowerbound_probe(2, 25, 0.5, trials=1)


def test_cli_gen_and_disc_round_trip(tmp_path, capsys):
    inst = tmp_path / "inst.json"
    code, _ = run_cli(["gen", "--m", "3", "--n", "12", "--p", "0.5",
                       "--seed", "7", "--out", str(inst)], capsys)
    assert code == 0
    A = IncidenceMatrix.load(inst)
    assert (A.m, A.n) == (3, 12)
    assert A == dl.sample_bernoulli(3, 12, 0.5, 7)

    code, out = run_cli(["disc", "--in", str(inst), "--solver", "exhaustive",
                         "--target", "1"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["found"] is True
    x = dl.Coloring.from_string(payload["coloring"])
    assert dl.disc_of_coloring(A, x) == payload["disc"] <= 1

    code, out = run_cli(["disc", "--in", str(inst), "--solver", "random",
                         "--target", "1", "--budget", "100000", "--seed", "3"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["found"] and payload["flips_used"] >= 0


def test_cli_disc_reports_miss_with_failure_exit(tmp_path, capsys):
    inst = tmp_path / "odd.json"
    IncidenceMatrix([[1]]).save(inst)
    code, out = run_cli(["disc", "--in", str(inst), "--solver", "random",
                         "--target", "0", "--budget", "64", "--seed", "1"], capsys)
    assert code == 1
    assert json.loads(out)["found"] is False


def test_cli_invert_exact_and_mc(tmp_path, capsys):
    inst = tmp_path / "inst.json"
    IncidenceMatrix([[1, 1]]).save(inst)
    code, out = run_cli(["invert", "--in", str(inst), "--delta", "1",
                         "--lambda", "0", "--samples", "100000",
                         "--seed", "42", "--exact"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["exact"] == "1/4"
    assert abs(payload["estimate"]["value"] - 0.25) <= max(
        3 * payload["estimate"]["stderr"], 1e-3)
    assert payload["estimate"]["samples"] == 100000


def test_cli_fourier_eval(tmp_path, capsys):
    inst = tmp_path / "inst.json"
    IncidenceMatrix([[1, 0], [0, 1]]).save(inst)
    code, out = run_cli(["fourier", "eval", "--in", str(inst),
                         "--theta", "0.125,0.0", "--delta", "1"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["dhat"] == pytest.approx(math.cos(math.pi / 4))
    assert payload["xhat"] == pytest.approx(
        math.cos(math.pi / 4) * (0.5 + 0.5 * math.cos(math.pi / 4)))


def test_cli_verify_suite(tmp_path, capsys):
    out_file = tmp_path / "report.json"
    code, _ = run_cli(["verify", "--suite", "gaussian", "--seed", "42",
                       "--out", str(out_file)], capsys)
    assert code == 0
    report = json.loads(out_file.read_text())
    assert report["suite"] == "gaussian"
    assert report["failures"] == 0
    assert report["checks_run"] > 0
    assert {"name", "passed"} <= set(report["checks"][0])


def test_cli_unknown_suite_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--suite", "nonsense"])
    assert exc.value.code == 2


def test_cli_usage_error_no_command():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_cli_experiment_theorem_csv(tmp_path, capsys):
    csv_path = tmp_path / "rows.csv"
    code, out = run_cli([
        "experiment", "theorem", "--m-list", "3", "--trials", "5",
        "--budget", "50000", "--seed", "11", "--csv", str(csv_path)], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["per_m"]["3"]["n"] == 40
    lines = csv_path.read_text().splitlines()
    assert len(lines) == 6
    assert lines[1].startswith("3,40,0.5,4.0,0,11,random,50000,")
    # rerun reproduces byte-identical output
    code, _ = run_cli([
        "experiment", "theorem", "--m-list", "3", "--trials", "5",
        "--budget", "50000", "--seed", "11", "--csv", str(tmp_path / "rows2.csv")], capsys)
    assert (tmp_path / "rows2.csv").read_bytes() == csv_path.read_bytes()


def test_cli_experiment_lowerbound(capsys):
    code, out = run_cli(["experiment", "lowerbound", "--m", "4", "--n", "8",
                         "--p", "0.5", "--trials", "5", "--seed", "2"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["trials"] == 5
    assert "counting_bound" in payload


def test_cli_oversized_config_is_usage_error(capsys):
    code = main(["experiment", "theorem", "--m-list", "4000", "--C", "100",
                 "--trials", "1"])
    assert code == 2


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "disclab.cli", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "disclab" in proc.stdout
