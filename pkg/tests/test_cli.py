"""CLI contract: exit codes, schemas, reproducibility, config merging."""

import json

import numpy as np
import pytest

from ordstat import cli, random_orthogonal, write_matrix


def run(capsys, *argv):
    rc = cli.main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def test_bounds_command_schema(capsys):
    rc, out, _ = run(capsys, "bounds", "--x", "1,2,4", "--k", "2", "--p", "1",
                     "--dist", "half-normal")
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0] == "name,k,p,lower,upper,params,citation"
    sandwich = next(l for l in lines if l.startswith("sum-kmin-sandwich"))
    fields = sandwich.split(",")
    assert float(fields[3]) <= float(fields[4])
    assert all("," in l for l in lines[1:])


def test_unknown_flag_exits_2(capsys):
    rc, _, err = run(capsys, "bounds", "--nonsense", "1")
    assert rc == 2
    assert "usage" in err.lower()


def test_estimate_requires_k(capsys):
    rc, _, err = run(capsys, "estimate", "--n", "4")
    assert rc == 2
    assert "--k" in err


def test_estimate_reproducible_byte_identical(capsys):
    args = ("estimate", "--x", "1,2", "--k", "1", "--p", "2", "--samples", "5000",
            "--seed", "11", "--dist", "exponential")
    rc1, out1, _ = run(capsys, *args)
    rc2, out2, _ = run(capsys, *args)
    assert rc1 == rc2 == 0
    assert out1 == out2
    header = out1.splitlines()[0]
    assert header.startswith("model,statistic,k,p,mean,stderr,median")
    assert header.endswith("samples,seed,citation")


def test_estimate_json_single_object(capsys):
    rc, out, _ = run(capsys, "estimate", "--x", "1,1", "--k", "2", "--samples",
                     "4000", "--seed", "2", "--format", "json")
    assert rc == 0
    blob = json.loads(out)
    assert blob["command"] == "estimate"
    (record,) = blob["records"]
    assert record["samples"] == 4000 and record["seed"] == 2
    assert record["citation"]


def test_estimate_kmin_statistic(capsys):
    rc, out, _ = run(capsys, "estimate", "--n", "4", "--k", "2", "--statistic",
                     "k-min", "--samples", "4000", "--seed", "3")
    assert rc == 0
    assert "k-min" in out


def test_estimate_model_kinds(capsys):
    rc, out, _ = run(capsys, "estimate", "--model", "diagonal", "--variances",
                     "1,2,3", "--k", "2", "--p", "2", "--samples", "4000",
                     "--seed", "5")
    assert rc == 0 and "gaussian-diagonal" in out
    rc, out, _ = run(capsys, "estimate", "--model", "comonotone", "--x", "1,2",
                     "--dist", "uniform", "--k", "1", "--samples", "4000",
                     "--seed", "5")
    assert rc == 0 and "comonotone" in out
    rc, out, _ = run(capsys, "estimate", "--model", "rotated", "--variances",
                     "1,2", "--matrix-seed", "4", "--k", "1", "--samples",
                     "4000", "--seed", "5")
    assert rc == 0 and "rotated" in out


def test_x_gen_loguniform(capsys):
    rc, out1, _ = run(capsys, "bounds", "--x-gen", "loguniform:n=8,lo=0.1,hi=10,seed=3",
                      "--k", "3")
    assert rc == 0
    rc, out2, _ = run(capsys, "bounds", "--x-gen", "loguniform:n=8,lo=0.1,hi=10,seed=3",
                      "--k", "3")
    assert out1 == out2
    rc, _, err = run(capsys, "bounds", "--x-gen", "linuniform:n=8", "--k", "1")
    assert rc == 2 and "generator" in err


def test_partition_command(capsys):
    rc, out, _ = run(capsys, "partition", "--a", "10,1,1,1", "--k", "2")
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0] == "block,start,end,sum,pivot_m,citation"
    assert lines[1].startswith("1,1,1,10,2")
    assert lines[2].startswith("2,2,4,3,2")


def test_verify_sandwich_single_instance(capsys):
    rc, out, _ = run(capsys, "verify", "--suite", "sandwich", "--n", "16", "--k",
                     "8", "--p", "1", "--seed", "7", "--samples", "2000",
                     "--instances", "2")
    assert rc == 0
    assert out.count("PASS sandwich") == 2


def test_verify_pinned_scenario_runs_one_instance(capsys):
    rc, out, _ = run(capsys, "verify", "--suite", "sandwich", "--n", "16", "--k",
                     "8", "--p", "1", "--seed", "7", "--samples", "200000")
    assert rc == 0
    assert out.count("PASS sandwich") == 1


def test_verify_dep_gap_suite(capsys):
    rc, out, _ = run(capsys, "verify", "--suite", "dep-gap", "--samples", "2000")
    assert rc == 0
    assert "median ratio" in out


def test_verify_unknown_suite(capsys):
    rc, _, err = run(capsys, "verify", "--suite", "bogus")
    assert rc == 2 and "suite" in err


def test_verify_exit_1_on_violation(capsys, monkeypatch):
    from ordstat import verify as v

    def fake_suite(**kwargs):
        return [v.CheckResult("fake", "forced violation", False, {})]

    monkeypatch.setitem(v.SUITES, "fake", fake_suite)
    rc, out, _ = run(capsys, "verify", "--suite", "fake")
    assert rc == 1
    assert "FAIL fake" in out


def test_config_file_merging(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("samples=4000\nseed=9\n# comment\nk=2\n")
    rc, out1, _ = run(capsys, "estimate", "--x", "1,2", "--config", str(cfg))
    assert rc == 0
    assert ",4000,9," in out1
    # explicit flags win over the config file
    rc, out2, _ = run(capsys, "estimate", "--x", "1,2", "--config", str(cfg),
                      "--seed", "10")
    assert ",4000,10," in out2


def test_mz_command_with_saved_matrix(tmp_path, capsys):
    mpath = tmp_path / "T.txt"
    write_matrix(mpath, np.asarray(random_orthogonal(4, 8)))
    args = ("mz", "--variances", "1,2,3,4", "--k", "2", "--samples", "4000",
            "--seed", "6", "--matrix", str(mpath))
    rc, out1, _ = run(capsys, *args)
    assert rc == 0
    rc, out2, _ = run(capsys, *args)
    assert out1 == out2
    header = out1.splitlines()[0]
    assert header.startswith("n,k,lhs_mean")


def test_approx_command_curve(capsys):
    rc, out, _ = run(capsys, "approx", "--variances", "2,1,0.5", "--samples",
                     "4000", "--seed", "4")
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0] == "m,E0,E_mean,E_stderr,samples,seed,citation"
    assert len(lines) == 4  # full curve m = 0, 1, 2
    e0s = [float(l.split(",")[1]) for l in lines[1:]]
    assert e0s == [3.5, 1.5, 0.5]


def test_approx_command_covariance_file(tmp_path, capsys):
    cov = np.array([[2.0, 0.5], [0.5, 1.0]])
    path = tmp_path / "cov.txt"
    write_matrix(path, cov)
    rc, out, _ = run(capsys, "approx", "--cov", str(path), "--m", "1",
                     "--samples", "4000", "--seed", "12")
    assert rc == 0
    row = out.strip().splitlines()[1].split(",")
    assert float(row[1]) == pytest.approx(1.0, rel=1e-9)  # smaller second moment


def test_out_file_writing(tmp_path, capsys):
    path = tmp_path / "report.csv"
    rc, out, _ = run(capsys, "bounds", "--x", "1,2", "--k", "1", "--out", str(path))
    assert rc == 0 and out == ""
    assert path.read_text().startswith("name,k,p,")


def test_threads_env_fallback(monkeypatch, capsys):
    monkeypatch.setenv("ORDSTAT_THREADS", "2")
    args = ("estimate", "--x", "1,2", "--k", "1", "--samples", "40000", "--seed", "1")
    rc, out1, _ = run(capsys, *args)
    monkeypatch.delenv("ORDSTAT_THREADS")
    rc, out2, _ = run(capsys, *args)
    assert out1 == out2  # thread count never changes results
