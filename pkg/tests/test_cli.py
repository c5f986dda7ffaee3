import json

import numpy as np
import pytest

from ipmkit.cli import main


def write_csv(path, rows):
    path.write_text("\n".join(",".join(str(v) for v in row) for row in rows) + "\n")


@pytest.fixture
def toy_files(tmp_path):
    p = tmp_path / "p.csv"
    q = tmp_path / "q.csv"
    write_csv(p, [[0.0]])
    write_csv(q, [[3.0]])
    return p, q


def test_estimate_wasserstein(toy_files, capsys):
    p, q = toy_files
    code = main(["estimate", "--p", str(p), "--q", str(q), "--metric", "wasserstein", "--ground", "l1"])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert out["value"] == pytest.approx(3.0, abs=1e-9)
    assert out["metric"] == "wasserstein"


def test_estimate_identical_files_zero(tmp_path, capsys):
    p = tmp_path / "p.csv"
    q = tmp_path / "q.csv"
    rows = [[0.1, 0.2], [1.5, -0.5], [2.0, 2.0]]
    write_csv(p, rows)
    write_csv(q, rows)
    for metric in ("wasserstein", "dudley", "mmd", "tv"):
        code = main(["estimate", "--p", str(p), "--q", str(q), "--metric", metric])
        assert code == 0
        assert json.loads(capsys.readouterr().out)["value"] == 0.0


def test_estimate_matches_library(tmp_path, capsys):
    rng = np.random.default_rng(61)
    X = rng.normal(0, 1, (10, 1))
    Y = rng.normal(1, 1, (8, 1))
    p = tmp_path / "p.csv"
    q = tmp_path / "q.csv"
    write_csv(p, X.tolist())
    write_csv(q, Y.tolist())
    code = main(["estimate", "--p", str(p), "--q", str(q), "--metric", "mmd",
                 "--kernel", "gaussian", "--kernel-param", "1"])
    assert code == 0
    got = json.loads(capsys.readouterr().out)["value"]

    from ipmkit import Kernel, SampleLabel, SampleSet, mmd, pool

    ps = pool(SampleSet(X, SampleLabel.P), SampleSet(Y, SampleLabel.Q))
    assert got == mmd(ps, Kernel.from_name("gaussian", 1.0)).value


def test_exit_codes(tmp_path, toy_files, capsys):
    p, q = toy_files
    assert main(["estimate", "--p", str(p), "--q", str(tmp_path / "nope.csv"),
                 "--metric", "tv"]) == 2
    assert main(["estimate", "--p", str(p), "--q", str(q), "--metric", "bogus"]) == 1
    assert main(["bogus-command"]) == 1
    capsys.readouterr()


def test_witness_roundtrip_via_cli(tmp_path, capsys):
    rng = np.random.default_rng(62)
    p = tmp_path / "p.csv"
    q = tmp_path / "q.csv"
    pts = tmp_path / "eval.csv"
    write_csv(p, rng.normal(0, 1, (6, 1)).tolist())
    write_csv(q, rng.normal(1, 1, (5, 1)).tolist())
    write_csv(pts, [[0.0], [0.5], [2.0]])
    wfile = tmp_path / "w.json"
    code = main(["estimate", "--p", str(p), "--q", str(q), "--metric", "wasserstein",
                 "--ground", "l1", "--witness-out", str(wfile)])
    assert code == 0
    capsys.readouterr()
    code = main(["witness-eval", "--witness", str(wfile), "--points", str(pts),
                 "--ground", "l1"])
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 3
    float(lines[0])  # parses


def test_classify_cli(tmp_path, capsys):
    train = tmp_path / "train.csv"
    test = tmp_path / "test.csv"
    write_csv(train, [[0.0, 1], [2.0, -1]])
    write_csv(test, [[-0.5], [3.0]])
    code = main(["classify", "--train", str(train), "--test", str(test),
                 "--rule", "lipschitz", "--ground", "l1"])
    assert code == 0
    captured = capsys.readouterr()
    assert captured.out.strip().splitlines() == ["+1", "-1"]
    report = json.loads(captured.err.strip().splitlines()[-1])
    assert report["bound_holds"] is True
    assert report["train_accuracy"] == 1.0


def test_classify_infeasible_exit_4(tmp_path, capsys):
    train = tmp_path / "train.csv"
    test = tmp_path / "test.csv"
    write_csv(train, [[0.0, 1], [0.0, -1]])
    write_csv(test, [[1.0]])
    code = main(["classify", "--train", str(train), "--test", str(test),
                 "--rule", "lipschitz"])
    assert code == 4
    capsys.readouterr()


def test_oracle_cli(capsys):
    code = main([
        "oracle",
        "--p", '{"kind": "truncexp", "d": 1, "rate": 3, "trunc": 5}',
        "--q", '{"kind": "truncexp", "d": 1, "rate": 1, "trunc": 5}',
        "--metric", "wasserstein",
    ])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert out["population"] == pytest.approx(0.6327, abs=5e-4)


def test_bench_cli_writes_csv_and_figure(tmp_path, capsys):
    spec = {
        "id": "cli_t",
        "metric": "mmd",
        "p": {"kind": "gaussian", "d": 1, "mean": 0, "std": 1.4142135623730951},
        "q": {"kind": "gaussian", "d": 1, "mean": 1, "std": 1.4142135623730951},
        "ground": {"kernel": "gaussian", "param": 1.0},
        "sweep": {"kind": "sample_size", "values": [50]},
        "replications": 3,
        "seed": 0,
    }
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(spec))
    out_dir = tmp_path / "out"
    code = main(["bench", "--spec", str(spec_path), "--out-dir", str(out_dir)])
    assert code == 0
    assert (out_dir / "cli_t.csv").exists()
    assert (out_dir / "cli_t.png").exists()
    capsys.readouterr()
    # run again into a second directory: byte-identical CSV
    out2 = tmp_path / "out2"
    assert main(["bench", "--spec", str(spec_path), "--out-dir", str(out2)]) == 0
    capsys.readouterr()
    assert (out_dir / "cli_t.csv").read_bytes() == (out2 / "cli_t.csv").read_bytes()


def test_bench_cli_malformed_spec(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{\"id\": \"x\"}")
    assert main(["bench", "--spec", str(bad)]) == 1
    capsys.readouterr()
