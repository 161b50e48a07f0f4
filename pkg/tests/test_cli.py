import json
import subprocess
import sys

import pytest

from mcupdate import standin
from mcupdate.cli import EXIT_INFEASIBLE, EXIT_IO, EXIT_OK, EXIT_USAGE, main
from mcupdate.samples import SampleSet


def test_update_mixed_scenario(tmp_path):
    assert main(["update", "--scenario", "case1", "--strategy", "mixed", "--seed", "1", "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["n_added"] == 797 and rep["strategy"] == "mixed"
    s = SampleSet.read_csv(tmp_path / "samples.csv")
    assert len(s) == rep["n_after"]
    ov = json.loads((tmp_path / "overlay.json").read_text())
    assert len(ov["bin_edges"]) == len(ov["updated_counts"]) + 1
    assert len(ov["grid"]) == len(ov["p_pdf"]) == len(ov["q_pdf"])


def test_update_infeasible_still_writes_report(tmp_path):
    code = main(["update", "--scenario", "support3", "--strategy", "reweight", "--seed", "1", "--out", str(tmp_path)])
    assert code == EXIT_INFEASIBLE
    assert json.loads((tmp_path / "report.json").read_text())["reason"] == "support"


def test_update_inline_identity_is_noop(tmp_path):
    spec = '{"family": "Gamma", "params": [3, 2]}'
    for strategy in ("reweight", "augment", "filter", "mixed"):
        out = tmp_path / strategy
        assert main(["update", "--p", spec, "--q", spec, "--n", "500", "--strategy", strategy,
                     "--seed", "2", "--out", str(out)]) == EXIT_OK
        rep = json.loads((out / "report.json").read_text())
        assert rep["n_added"] == 0 and rep["n_rejected"] == 0


def test_update_from_config_and_samples(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"p": {"family": "Normal", "params": [10, 1]},
                               "q": {"family": "Normal", "params": [10, 0.5]},
                               "N": 1000, "strategy": "filter", "seed": 4}))
    assert main(["update", "--config", str(cfg), "--out", str(tmp_path / "a")]) == 0
    assert main(["update", "--config", str(cfg), "--samples", str(tmp_path / "a" / "samples.csv"),
                 "--strategy", "reweight", "--out", str(tmp_path / "b")]) == 0


def test_usage_and_io_codes(tmp_path, capsys):
    assert main(["update", "--seed", "1", "--out", str(tmp_path)]) == EXIT_USAGE
    assert main(["fit", "--data", str(tmp_path / "missing.csv"), "--out", str(tmp_path)]) == EXIT_IO
    with pytest.raises(SystemExit) as err:
        main(["bogus"])
    assert err.value.code == EXIT_USAGE


def test_tables_byte_identical_across_workers(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["tables", "--n", "2000", "--seed", "3", "--out", str(a)]) == 0
    assert main(["tables", "--n", "2000", "--seed", "3", "--workers", "4", "--out", str(b)]) == 0
    for name in ("table1.csv", "table1.json", "table2.csv", "table2.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_fit_and_buckle(tmp_path):
    data = standin.data_dir() / "yield_stage_10.csv"
    assert main(["fit", "--data", str(data), "--n-k", "2000", "--seed", "1", "--out", str(tmp_path)]) == 0
    fit = json.loads((tmp_path / "fit.json").read_text())
    assert abs(sum(fit["posteriors"].values()) - 1) < 1e-12
    dens = json.dumps(fit["density"])
    assert main(["buckle", "--density", dens, "--n", "1000", "--seed", "1", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "cdf.csv").read_text().splitlines()
    assert lines[0] == "psi,cdf" and len(lines) == 1001


def test_pipeline_small(tmp_path):
    stages = [standin.data_dir() / f"yield_stage_{n}.csv" for n in (10, 20)]
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"stages": [str(p) for p in stages], "N": 1000, "N_k": 2000, "seed": 1}))
    assert main(["pipeline", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    summary = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert len(summary["stages"]) == 2 and "savings_ratio" in summary["savings"]
    for k in (0, 1):
        for name in ("fit.json", "report.json", "samples.csv", "cdf.csv"):
            assert (tmp_path / "o" / f"stage_{k}" / name).exists()


def test_console_script_help():
    out = subprocess.run([sys.executable, "-m", "mcupdate.cli", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "pipeline" in out.stdout
