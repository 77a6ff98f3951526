import csv
import io
from fractions import Fraction as F

import pytest

from treedim.cli import run
from treedim.config import dump_toml, family_to_document, load_family

from conftest import CONFIGS

A = str(CONFIGS / "family_a.toml")


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_family_a(capsys):
    code, out, _ = call(capsys, "verify", "--config", A, "--depth", "6")
    assert code == 0
    assert out.strip().endswith("all checks passed")


def test_member(capsys):
    code, out, _ = call(capsys, "member", "--config", A, "--word", "11")
    assert code == 0 and "member: false" in out
    code, out, _ = call(capsys, "member", "--config", A, "--word", "1")
    assert "member: true" in out and "successors: 0 (forced)" in out


def test_derive_rejects_equal_terms(tmp_path, capsys):
    cfg = tmp_path / "bad.toml"
    cfg.write_text('n_levels = 1\n[sequence]\nterms = ["1/2", "1/2"]\n')
    code, _, err = call(capsys, "derive", "--config", str(cfg))
    assert code == 2 and "consecutive" in err


def test_usage_errors(capsys):
    assert call(capsys, "frobnicate")[0] == 2
    assert call(capsys, "structure", "--config", A)[0] == 2
    assert call(capsys, "structure", "--config", A, "--max-len", "99")[0] == 2
    assert call(capsys, "member", "--config", "/nonexistent.toml", "--word", "0")[0] == 2
    assert call(capsys, "martingale", "--config", A, "--word", "0", "--sigma", "0.5")[0] == 2


def test_derive_output_round_trips(tmp_path, capsys):
    out_path = tmp_path / "a_doc.toml"
    assert call(capsys, "derive", "--config", A, "--out", str(out_path))[0] == 0
    assert load_family(out_path).family == load_family(A).family
    code, out, _ = call(capsys, "verify", "--config", str(out_path), "--depth", "6")
    assert code == 0


def test_structure_csv_round_trip(capsys):
    code, out, _ = call(capsys, "structure", "--config", str(CONFIGS / "family_b.toml"), "--max-len", "12")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 12
    for row in rows:
        ell, e = int(row["ell"]), int(row["exponent"])
        assert F(e, ell) == F(int(row["density_num"]), int(row["density_den"]))
    assert rows[-1]["exponent"] == "6"


def test_structure_accepts_huge_max_len(capsys):
    cfg = str(CONFIGS / "oscillating.toml")
    code, _, err = call(capsys, "structure", "--config", cfg, "--max-len", "10" * 20)
    assert code == 2 and "exceeds" in err


def test_jsonlike_output(capsys):
    code, out, _ = call(capsys, "structure", "--config", A, "--max-len", "3", "--format", "jsonlike")
    assert code == 0 and '"density_den": "2"' in out


def test_martingale_command(capsys):
    code, out, _ = call(capsys, "martingale", "--config", A, "--word", "10", "--sigma", "1/2")
    assert code == 0 and "|X|^1 = 2" in out and "gale_exponent (sigma=1/2): 0/1" in out


def test_dimension_and_witness_csv(tmp_path, capsys):
    out_csv = tmp_path / "w.csv"
    code, out, _ = call(capsys, "dimension", "--config", str(CONFIGS / "oscillating.toml"),
                        "--levels", "5", "--out", str(out_csv))
    assert code == 0 and "certified_lower:" in out
    rows = list(csv.DictReader(out_csv.open()))
    assert [r["level"] for r in rows] == [str(i) for i in range(6)]
    for r in rows:
        thm2 = F(int(r["thm2_exp_num"]), int(r["thm2_exp_den"]))
        assert thm2 == (F(1, 2) - F(r["q_i"])) * int(r["ell_i"])


def test_cutpoint_command(capsys):
    code, out, _ = call(capsys, "cutpoint", "--gale", str(CONFIGS / "constant_martingale.toml"))
    assert code == 0 and "cut_point: 1/1 (exact)" in out


def test_cutpoint_bracket(tmp_path, capsys):
    g = tmp_path / "g.toml"
    g.write_text('alphabet_size = 2\n[values]\n"" = "2"\n"0" = "3"\n"1" = "0"\n')
    code, out, _ = call(capsys, "cutpoint", "--gale", str(g), "--precision", "20")
    assert code == 0 and "bracket" in out


@pytest.mark.parametrize("argv", [
    ("structure", "--config", A, "--max-len", "6"),
    ("dimension", "--config", str(CONFIGS / "oscillating.toml"), "--levels", "5"),
    ("verify", "--config", str(CONFIGS / "three_term.toml"), "--depth", "30"),
])
def test_output_is_deterministic(capsys, argv):
    first = call(capsys, *argv)
    assert call(capsys, *argv) == first


@pytest.mark.parametrize("field", ["k", "ell", "r", "p", "kappa"])
@pytest.mark.parametrize("level", [0, 1])
def test_corruption_fails_verify(tmp_path, capsys, field, level):
    fam = load_family(CONFIGS / "decreasing.toml").family
    doc = family_to_document(fam)
    row = doc["levels"][level]
    row[field] = str(int(row[field]) + 1)
    path = tmp_path / "bad.toml"
    path.write_text(dump_toml(doc))
    code, out, _ = call(capsys, "verify", "--config", str(path), "--depth", "10")
    assert code == 1 and "FAIL parameters" in out
