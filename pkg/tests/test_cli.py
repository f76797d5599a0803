import json

import numpy as np
import pytest

from rootldpc import cli, gf2


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_construct_is_deterministic(tmp_path, capsys):
    for tag in ("a", "b"):
        code, _, _ = run(["construct", "--family", "root", "--N", "64", "--code-seed", "5",
                          "--out", str(tmp_path / tag)], capsys)
        assert code == 0
    assert (tmp_path / "a.alist").read_text() == (tmp_path / "b.alist").read_text()
    assert json.loads((tmp_path / "a.json").read_text())
    H = gf2.read_alist(tmp_path / "a.alist")
    assert H.shape == (32, 64)


def test_construct_roundtrip_through_alist(tmp_path, capsys):
    run(["construct", "--N", "32", "--code-seed", "1", "--out", str(tmp_path / "c")], capsys)
    code, via_file, _ = run(["analyze", "--alist", str(tmp_path / "c.alist"),
                             "--meta", str(tmp_path / "c.json")], capsys)
    assert code == 0
    _, direct, _ = run(["analyze", "--N", "32", "--code-seed", "1"], capsys)
    body = lambda text: [l for l in text.splitlines() if not l.startswith("#")]
    assert body(via_file) == body(direct)
    assert "rate=0.500000" in direct


def test_analyze_wstar2_family(capsys):
    code, out, _ = run(["analyze", "--family", "wstar2", "--N", "12"], capsys)
    assert code == 0 and "wstar=2" in out
    assert out.startswith("# config: ")


def test_machine_readable_error(capsys):
    code, _, err = run(["analyze", "--family", "nonsense"], capsys)
    assert code == 2
    line = err.strip().splitlines()[-1]
    assert line.startswith("error ")
    payload = json.loads(line[len("error "):])
    assert payload["type"] == "ValueError" and "nonsense" in payload["message"]


def test_simulate_erasure_csv(tmp_path, capsys):
    out = tmp_path / "wer.csv"
    code, _, _ = run(["simulate", "--N", "64", "--mode", "erasure", "--epsilon", "0.5",
                      "--variant", "peeling", "--ebn0", "10", "--min-errors", "20",
                      "--max-trials", "400", "--seed", "3", "--workers", "1", "--out", str(out)], capsys)
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# config: ") and lines[1] == "# seed: 3"
    assert lines[2].split(",")[:4] == ["ebn0_db", "trials", "word_errors", "wer"]
    row = dict(zip(lines[2].split(","), lines[3].split(",")))
    assert 0.1 < float(row["wer"]) < 0.45


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = {"command": "outage", "seed": 9, "channel": {"rate": 0.5},
           "sweep": {"ebn0_db": [5.0, 10.0], "outage_samples": 20000}}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    code, out, _ = run(["outage", "--config", str(path), "--ebn0", "5", "--workers", "1"], capsys)
    assert code == 0
    rows = [l for l in out.splitlines() if not l.startswith("#")]
    assert rows[0].startswith("ebn0_db,p_out")
    assert len(rows) == 2
    assert "# seed: 9" in out
    p, quad = float(rows[1].split(",")[1]), float(rows[1].split(",")[-1])
    assert p == pytest.approx(quad, rel=0.1)


def test_unknown_config_key_is_reported(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"code": {"colour": 1}}))
    code, _, err = run(["analyze", "--config", str(path)], capsys)
    assert code == 2 and "colour" in err


def test_appendix_rows(capsys):
    code, out, _ = run(["appendix"], capsys)
    assert code == 0
    rows = [l.split(",") for l in out.splitlines() if l.startswith("chi2_cdf,0.5,")]
    assert np.all(np.diff([float(r[4]) for r in rows]) >= 0)
