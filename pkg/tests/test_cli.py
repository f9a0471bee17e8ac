import csv

from msura.harness import cli


def test_predict_writes_csv_and_config(tmp_path):
    out = tmp_path / "p.csv"
    assert cli.main(["predict", "--grid=-8:-6:1", "--out", str(out), "--seed", "3"]) == 0
    rows = list(csv.DictReader(out.open()))
    assert [r["ebn0_db"] for r in rows] == ["-8.0", "-7.0", "-6.0"]
    assert {r["source"] for r in rows} == {"analytic"}
    assert "seed = 3" in (tmp_path / "p.csv.config").read_text()


def test_stdout_logs_config(capsys):
    assert cli.main(["predict", "--grid=-7", "--format", "ndtext"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("# variant = MS-MRA")
    assert '"source": "analytic"' in out


def test_config_file_and_overrides(tmp_path):
    cfg = tmp_path / "a.cfg"
    cfg.write_text("M = 8\nK_a = 6\n")
    out = tmp_path / "p.csv"
    assert cli.main(["predict", "--config", str(cfg), "--set", "S=3", "--out", str(out)]) == 0
    row = next(csv.DictReader(out.open()))
    assert (row["M"], row["Ka"], row["S"]) == ("8", "6", "3")


def test_error_exit_codes(tmp_path):
    assert cli.main(["simulate", "--set", "variant=nope"]) == 2
    assert cli.main(["simulate", "--trials", "5"]) == 2
    assert cli.main(["predict", "--config", str(tmp_path / "missing.cfg")]) == 2
    assert cli.main(["predict", "--set", "variant=MSUG-MRA", "--set", "G=2"]) == 2
    assert cli.main(["predict", "--grid=a,b"]) == 2
    assert cli.main(["predict", "--out", str(tmp_path / "no" / "x.csv")]) == 1


def test_search_unattained_exit_code(monkeypatch, tmp_path):
    from msura.harness.sweep import SearchResult
    monkeypatch.setattr(cli, "search_target",
                        lambda *a, **k: SearchResult(False, None, None, (0.0, 1.0), ()))
    assert cli.main(["search", "--out", str(tmp_path / "s.csv")]) == 3


def test_grid_parser():
    assert cli._grid("-1:0:0.25") == [-1.0, -0.75, -0.5, -0.25, 0.0]
    assert cli._grid("1, 2") == [1.0, 2.0]
