import json
import subprocess
import sys

import pytest

from nkmuddle.cli import main
from nkmuddle.experiments import SpecError
from nkmuddle.io import parse_spec, read_aggregates, read_records
from nkmuddle.landscape import Landscape, build_landscape
from nkmuddle.plotting import render_svg


@pytest.fixture
def spec_file(tmp_path):
    def write(data, name="spec.json"):
        p = tmp_path / name
        p.write_text(json.dumps(data))
        return p

    return write


PAPER_DEFAULT = {"n": 20, "k_values": [2, 8], "algorithms": ["sa", "cs", "pu", "mt:4:1"], "master_seed": 1}


def test_parse_spec_defaults(spec_file):
    spec = parse_spec(spec_file({"n": 20, "k_values": [8], "algorithms": ["mt:4:1"], "master_seed": 1}))
    assert spec.budget == 1000 and spec.replications == 500 and spec.scheme == "random"


def test_parse_spec_errors(spec_file, tmp_path):
    with pytest.raises(SpecError, match=r"k_values\[0\].*n-1 = 19"):
        parse_spec(spec_file({"n": 20, "k_values": [25], "algorithms": ["sa"], "master_seed": 1}))
    with pytest.raises(SpecError, match="not found"):
        parse_spec(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{ nope")
    with pytest.raises(SpecError, match="malformed"):
        parse_spec(bad)
    with pytest.raises(SpecError, match=r"algorithms\[0\].*fewer than 2 members"):
        parse_spec(spec_file({"n": 6, "k_values": [1], "algorithms": ["mt:4:1"], "master_seed": 1}))


def test_run_writes_outputs(spec_file, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", str(spec_file(PAPER_DEFAULT)), "--replications", "10", "--out-dir", str(out)]) == 0
    for name in ("records.csv", "aggregates.csv", "aggregates.json", "metadata.json"):
        assert (out / name).is_file()
    recs = read_records(out / "records.csv")
    assert len(recs) == 10 * 2 * 4
    assert list(recs[0]) == [
        "replication", "k", "algorithm", "landscape_seed", "best_fitness",
        "hamming", "evaluations", "steps", "termination",
    ]
    meta = json.loads((out / "metadata.json").read_text())
    assert meta["spec"]["replications"] == 10
    # echoed spec parses back to the same spec
    assert parse_spec(spec_file(meta["spec"], "echo.json")) == parse_spec(spec_file({**PAPER_DEFAULT, "replications": 10}, "x.json"))
    assert capsys.readouterr().out.count("\n") == 4


def test_run_deterministic_across_workers(spec_file, tmp_path):
    spec = spec_file({**PAPER_DEFAULT, "replications": 4})
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", str(spec), "--out-dir", str(a), "--workers", "1"]) == 0
    assert main(["run", str(spec), "--out-dir", str(b), "--workers", "3"]) == 0
    for name in ("records.csv", "aggregates.csv", "aggregates.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_run_normalize_and_trace(spec_file, tmp_path):
    spec = spec_file({"n": 12, "k_values": [3], "algorithms": ["sa", "mt:3:1"], "master_seed": 5, "replications": 3})
    out = tmp_path / "o"
    assert main(["run", str(spec), "--out-dir", str(out), "--normalize", "--trace"]) == 0
    recs = read_records(out / "records.csv")
    reports = json.loads((out / "oracle.json").read_text())
    gmax = {(r["replication"], r["k"]): r["global_max_fitness"] for r in reports}
    for r in recs:
        ratio = float(r["best_fitness"]) / gmax[(int(r["replication"]), int(r["k"]))]
        assert float(r["normalized_fitness"]) == ratio <= 1.0
    aggs = read_aggregates(out / "aggregates.csv")
    assert all(a["normalized_fitness_mean"] <= 1.0 for a in aggs)
    header = (out / "traces.csv").read_text().splitlines()[0]
    assert header == "replication,k,algorithm,step,proposal,accepted,current_fitness,best_fitness"


def test_run_env_out_dir(spec_file, tmp_path, monkeypatch):
    monkeypatch.setenv("NK_MUDDLE_OUT_DIR", str(tmp_path / "env"))
    assert main(["run", str(spec_file({**PAPER_DEFAULT, "replications": 1, "k_values": [1]}))]) == 0
    assert (tmp_path / "env" / "records.csv").is_file()


def test_run_bad_spec_exit_code(spec_file, tmp_path, capsys):
    code = main(["run", str(spec_file({"n": 20, "k_values": [25], "algorithms": ["sa"], "master_seed": 1})), "--out-dir", str(tmp_path)])
    assert code != 0
    err = capsys.readouterr().err
    assert "k_values[0]" in err and "Traceback" not in err


def test_plot(spec_file, tmp_path):
    out = tmp_path / "o"
    main(["run", str(spec_file({**PAPER_DEFAULT, "replications": 3})), "--out-dir", str(out)])
    svgs = []
    for metric in ("fitness", "hamming", "evaluations"):
        svg = tmp_path / f"{metric}.svg"
        assert main(["plot", str(out / "aggregates.csv"), "--metric", metric, "--series", "sa,cs,pu,mt:4:1", "-o", str(svg)]) == 0
        text = svg.read_text()
        assert text.startswith("<svg") and text.count("<polyline") == 4
        svgs.append(text)
    again = tmp_path / "again.svg"
    main(["plot", str(out / "aggregates.json"), "--metric", "fitness", "--series", "sa,cs,pu,mt:4:1", "-o", str(again)])
    assert again.read_text() == svgs[0]


def test_plot_errors(spec_file, tmp_path, capsys):
    out = tmp_path / "o"
    main(["run", str(spec_file({**PAPER_DEFAULT, "replications": 2})), "--out-dir", str(out)])
    assert main(["plot", str(out / "aggregates.csv"), "--series", "ga", "-o", str(tmp_path / "x.svg")]) == 1
    assert "available" in capsys.readouterr().err
    rows = read_aggregates(out / "aggregates.csv")
    with pytest.raises(ValueError, match="available"):
        render_svg(rows, "speed", ["sa"])


def test_oracle_command(capsys):
    assert main(["oracle", "--seed", "3", "--n", "8", "--k", "2"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["n_enumerated"] == 256 and rep["local_optima_count"] >= 1


def test_landscape_export(tmp_path):
    p = tmp_path / "ls.json"
    assert main(["landscape", "export", "--seed", "7", "--n", "20", "--k", "8", "-o", str(p)]) == 0
    assert Landscape.load(p) == build_landscape(7, 20, 8)
    assert main(["oracle", "--landscape", str(p)]) == 0


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "nkmuddle", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "nk-muddle" in res.stdout
