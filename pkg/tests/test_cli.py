import json

import pytest

from quatbanach.cli import main
from quatbanach.config import ConfigError, RunConfig, load_config, parse_text

SMALL = "p = 5\nN = 60\nM = 30\nwindow = 10\n"


@pytest.fixture
def small_cfg(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(SMALL)
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# --- configuration --------------------------------------------------------------------

def test_defaults():
    cfg = RunConfig()
    assert (cfg.p, cfg.iota, cfg.prec, cfg.M, cfg.window) == (5, 2, 200, 160, 40)


def test_parse_text_comments_and_aliases():
    vals = parse_text("# comment\nN = 80   # precision\nn = 2\nlambda_h = 3\nformat = JSON\niota = auto\n")
    assert vals == {"prec": 80, "n": 2, "lam_h": 3, "format": "json", "iota": None}


def test_unknown_key_and_bad_value():
    with pytest.raises(ConfigError, match="unknown"):
        parse_text("colour = blue")
    with pytest.raises(ConfigError, match="integer"):
        parse_text("M = many")
    with pytest.raises(ConfigError, match="key = value"):
        parse_text("just words")


def test_environment_overrides_file(small_cfg):
    cfg = load_config(small_cfg, environ={"QUATBANACH_M": "40", "QUATBANACH_LEVEL": "2", "OTHER": "x"})
    assert cfg.M == 40 and cfg.n == 2 and cfg.prec == 60


def test_explicit_overrides_win(small_cfg):
    cfg = load_config(small_cfg, environ={"QUATBANACH_SEED": "3"}, seed=9, format=None)
    assert cfg.seed == 9 and cfg.format == "csv"


@pytest.mark.parametrize("bad", [
    {"iota": 4}, {"p": 9}, {"M": 0}, {"window": 100}, {"c_w": 7}, {"format": "xml"}, {"seed": -1},
])
def test_validation(bad):
    with pytest.raises(ConfigError):
        RunConfig(**bad)


# --- commands ------------------------------------------------------------------------------

def test_brackets_verify_passes(capsys):
    code, out, err = run(capsys, "brackets-verify")
    assert code == 0 and "False" not in out
    assert "seed=0" in err


def test_brackets_verify_p7(capsys, tmp_path):
    path = tmp_path / "p7.cfg"
    path.write_text("p = 7\nN = 40\nwindow = 10\nM = 20\nc_w = 49\nc_v = 7\n")
    code, out, _ = run(capsys, "brackets-verify", "--config", str(path), "--format", "json")
    body = json.loads(out)
    assert code == 0 and body["header"]["p"] == 7 and all(r["passed"] for r in body["rows"])


def test_square_iota_is_a_construction_error(capsys, monkeypatch):
    monkeypatch.setenv("QUATBANACH_IOTA", "4")
    code, _, err = run(capsys, "brackets-verify")
    assert code == 2 and "non-residue" in err


def test_expand_zero_coordinates(capsys, small_cfg, monkeypatch):
    monkeypatch.setenv("QUATBANACH_C_W", "0")
    monkeypatch.setenv("QUATBANACH_C_V", "0")
    code, out, _ = run(capsys, "expand", "--config", small_cfg)
    assert code == 0
    assert out.strip().splitlines() == ["m,val_a,val_b,censored", "0,0,inf,False"]


def test_expand_row_six(capsys, small_cfg):
    code, out, err = run(capsys, "expand", "--config", small_cfg)
    rows = {line.split(",")[0]: line.split(",") for line in out.strip().splitlines()[1:]}
    assert code == 0 and rows["6"][1] == "8"
    assert "slope_a=" in err and "in_W1=" in err


def test_csv_and_json_have_identical_numbers(capsys, small_cfg, tmp_path):
    out_csv, out_json = tmp_path / "t.csv", tmp_path / "t.json"
    assert run(capsys, "valuation-table", "--config", small_cfg, "--out", str(out_csv))[0] == 0
    assert run(capsys, "valuation-table", "--config", small_cfg, "--format", "json", "--out", str(out_json))[0] == 0
    csv_rows = [line.split(",") for line in out_csv.read_text().strip().splitlines()[1:]]
    body = json.loads(out_json.read_text())
    assert body["header"]["M"] == 30
    assert [[str(r["m"]), r["val_a"], r["val_b"], str(r["censored"])] for r in body["rows"]] == csv_rows


def test_output_is_deterministic(capsys, small_cfg):
    first = run(capsys, "decompose", "--config", small_cfg, "--seed", "5")
    second = run(capsys, "decompose", "--config", small_cfg, "--seed", "5")
    assert first == second and first[0] == 0
    assert "seed=5" in first[2]


def test_membership_exit_code_tracks_agreement(capsys, small_cfg, monkeypatch):
    monkeypatch.setenv("QUATBANACH_C_W", "25")
    monkeypatch.setenv("QUATBANACH_C_V", "25")
    code, out, _ = run(capsys, "membership", "--config", small_cfg)
    assert code == 0 and out.strip().splitlines()[1].endswith("True")


def test_suite_subset(capsys):
    code, out, _ = run(capsys, "suite", "--only", "1,2,10")
    assert code == 0
    assert out.splitlines()[:3] == ["PASS [1] bracket table", "PASS [2] casimir centrality", "PASS [10] iwasawa norms"]


def test_suite_verbose_json(capsys):
    code, out, _ = run(capsys, "suite", "--only", "4", "--verbose", "--format", "json")
    check = json.loads(out)["checks"][0]
    assert code == 0 and check["passed"] and "statement" in check and check["detail"]["violations"] == 0


def test_suite_unknown_criterion(capsys):
    assert run(capsys, "suite", "--only", "11")[0] == 2


def test_raised_precision_keeps_verdicts(capsys, monkeypatch):
    base = run(capsys, "suite", "--only", "1,3,9")
    monkeypatch.setenv("QUATBANACH_N", "240")
    raised = run(capsys, "suite", "--only", "1,3,9")
    assert base[0] == raised[0] == 0 and base[1] == raised[1]
