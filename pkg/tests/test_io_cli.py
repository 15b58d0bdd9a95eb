import json
import math

import numpy as np
import pandas as pd
import pytest

from trpgrowth import brownian_market, riskless_market, sample_path
from trpgrowth.cli import main
from trpgrowth.io import read_market, read_path, write_market, write_path


@pytest.fixture
def files(tmp_path):
    bm = tmp_path / "bm.json"
    write_market(brownian_market(0.03), bm)
    rl = tmp_path / "rl.json"
    write_market(riskless_market(), rl)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"samples": [1, 2], "pmf1": [0.5, 0.4], "pmf2": [0.5, 0.5]}))
    return {"bm": str(bm), "rl": str(rl), "bad": str(bad), "dir": tmp_path}


def test_market_round_trip(files):
    m = read_market(files["bm"])
    ref = brownian_market(0.03)
    np.testing.assert_array_equal(m.samples, ref.samples)
    np.testing.assert_array_equal(m.pmf2, ref.pmf2)


def test_market_pmfs_list(tmp_path):
    p = tmp_path / "m.json"
    p.write_text(json.dumps({"samples": [1.0, 1.1], "pmfs": [[1, 0], [0.5, 0.5], [0, 1]]}))
    assert read_market(p).n_assets == 3


def test_path_round_trip(tmp_path):
    X = sample_path(brownian_market(0.03), 100, seed=1)
    write_path(X, tmp_path / "p.csv")
    np.testing.assert_allclose(read_path(tmp_path / "p.csv"), X, rtol=1e-11)
    assert (tmp_path / "p.csv").read_text().splitlines()[0] == "period,x1,x2"


def test_bad_path_header(tmp_path):
    (tmp_path / "p.csv").write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        read_path(tmp_path / "p.csv")


def test_optimize_brownian(files, capsys):
    out = files["dir"] / "o"
    rc = main(["optimize", "--market", files["bm"], "--cost", "0.01", "--out", str(out),
               "--grid-b", "0.3:0.7:5", "--grid-eps", "0.02:0.3:5"])
    assert rc == 0
    line = capsys.readouterr().out.strip()
    fields = dict(kv.split("=") for kv in line.split())
    assert float(fields["g"]) > 0
    table = pd.read_csv(out / "grid.csv")
    assert list(table.columns) == ["b", "eps", "feasible", "finite", "states", "growth", "lambda1"]


def test_optimize_riskless(files, capsys):
    rc = main(["optimize", "--market", files["rl"], "--out", str(files["dir"] / "r"),
               "--grid-b", "0.3:0.7:3", "--grid-eps", "0.05:0.2:3"])
    assert rc == 0
    assert float(capsys.readouterr().out.split("g=")[1]) == 0


def test_optimize_bad_pmf(files, capsys):
    rc = main(["optimize", "--market", files["bad"], "--out", str(files["dir"] / "x")])
    assert rc != 0
    assert "BadPmf" in capsys.readouterr().err


def test_simulate_header_only(files):
    out = files["dir"] / "s0"
    assert main(["simulate", "--market", files["bm"], "-n", "0", "--out", str(out)]) == 0
    assert (out / "path.csv").read_text() == "period,x1,x2\n"


def test_simulate_reproducible(files):
    a, b = files["dir"] / "a", files["dir"] / "b"
    for d in (a, b):
        main(["simulate", "--market", files["bm"], "-n", "500", "--seed", "4", "--out", str(d)])
    assert (a / "path.csv").read_bytes() == (b / "path.csv").read_bytes()


def test_simulate_frequencies(files):
    out = files["dir"] / "big"
    main(["simulate", "--market", files["bm"], "-n", "100000", "--seed", "1", "--out", str(out)])
    X = read_path(out / "path.csv")
    up = np.mean(np.isclose(X[:, 1], math.exp(0.03)))
    assert abs(up - 0.5) < 0.01


BT = ["--block", "500", "--initial-window", "500", "--grid-b", "0.3:0.7:3",
      "--grid-eps", "0.05:0.2:4", "--fallback-horizon", "20"]


def test_backtest_costs_and_reproducibility(files):
    path = files["dir"] / "p"
    main(["simulate", "--market", files["bm"], "-n", "1500", "--seed", "7", "--out", str(path)])
    runs = {}
    for tag, c in [("lo", "0.01"), ("hi", "0.03"), ("lo2", "0.01")]:
        out = files["dir"] / tag
        assert main(["backtest", "--path", str(path / "path.csv"), "--cost", c,
                     "--out", str(out)] + BT) == 0
        runs[tag] = out
    lo = json.loads((runs["lo"] / "summary.json").read_text())
    hi = json.loads((runs["hi"] / "summary.json").read_text())
    if lo["trp"]["blocks"] == hi["trp"]["blocks"]:
        assert lo["trp"]["terminal_wealth"] >= hi["trp"]["terminal_wealth"]
    for name in ["wealth_trp.csv", "wealth_crp.csv", "summary.json"]:
        assert (runs["lo"] / name).read_bytes() == (runs["lo2"] / name).read_bytes()
    df = pd.read_csv(runs["lo"] / "wealth_trp.csv")
    assert list(df.columns) == ["period", "wealth", "portfolio", "rebalanced", "cost_paid"]


def test_backtest_from_market_with_seed(files):
    outs = []
    for tag in ("m1", "m2"):
        out = files["dir"] / tag
        assert main(["backtest", "--market", files["bm"], "--periods", "1200", "--seed", "3",
                     "--out", str(out)] + BT) == 0
        outs.append((out / "wealth_trp.csv").read_bytes())
    assert outs[0] == outs[1]


def test_backtest_too_short(files, capsys):
    path = files["dir"] / "short"
    main(["simulate", "--market", files["bm"], "-n", "10", "--out", str(path)])
    rc = main(["backtest", "--path", str(path / "path.csv"), "--out", str(files["dir"] / "t")])
    assert rc != 0 and "PathTooShort" in capsys.readouterr().err


def test_estimate_and_evaluate(files):
    path = files["dir"] / "e"
    main(["simulate", "--market", files["bm"], "-n", "3000", "--seed", "2", "--out", str(path)])
    assert main(["estimate", "--path", str(path / "path.csv"), "--bins", "4",
                 "--out", str(path)]) == 0
    m = read_market(path / "market.json")
    np.testing.assert_allclose(m.samples, brownian_market(0.03).samples, rtol=1e-11)
    assert main(["evaluate", "--market", files["bm"], "--b", "0.5", "--eps", "0.1", "-n", "5",
                 "--out", str(path)]) == 0
    ew = pd.read_csv(path / "expected_wealth.csv")
    assert ew.expected_wealth.iloc[0] == pytest.approx(0.5 + 0.5 * math.cosh(0.03), rel=1e-11)


def test_bad_range_flag(files):
    with pytest.raises(SystemExit):
        main(["optimize", "--market", files["bm"], "--grid-b", "0.3-0.7"])
