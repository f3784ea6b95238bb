import csv
import io
import json

import numpy as np
import pytest

from flagcurv.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, main, parse_flag, parse_vector


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_vector_forms():
    labels = ("e1", "e2", "e3")
    np.testing.assert_array_equal(parse_vector("0,2,0", labels), [0, 2, 0])
    np.testing.assert_array_equal(parse_vector("2e2", labels), [0, 2, 0])
    np.testing.assert_array_equal(parse_vector("e1 - 0.5*e3", labels), [1, 0, -0.5])
    with pytest.raises(ValueError):
        parse_vector("1,2", labels)
    with pytest.raises(ValueError):
        parse_vector("e4", labels)


def test_parse_flag_forms():
    labels = ("e1", "e2", "e3")
    U, Y = parse_flag("U=e1,Y=e2", labels)
    np.testing.assert_array_equal(U, [1, 0, 0])
    U, Y = parse_flag("U=1,0,0;Y=0,1,0", labels)
    np.testing.assert_array_equal(Y, [0, 1, 0])
    with pytest.raises(ValueError):
        parse_flag("U=e1", labels)


def test_validate_ok_and_fail(capsys, fixtures_dir):
    code, out, _ = run(capsys, "validate", "su2_berger")
    assert code == EXIT_OK and json.loads(out)["valid"]
    code, out, _ = run(capsys, "validate", str(fixtures_dir / "bad_jacobi.json"))
    assert code == EXIT_FAIL and "jacobi" in json.loads(out)["failed"]
    code, _, err = run(capsys, "validate", str(fixtures_dir / "malformed.json"))
    assert code == EXIT_INPUT and "malformed" in err
    code, _, _ = run(capsys, "validate", "missing.json")
    assert code == EXIT_INPUT


def test_shen(capsys):
    assert run(capsys, "shen", "exponential", "0.5")[0] == EXIT_OK
    assert run(capsys, "shen", "exponential", "1.2")[0] == EXIT_FAIL


def test_curvature_spot_value(capsys):
    code, out, _ = run(capsys, "curvature", "su2_biinvariant", "--flag", "U=e1,Y=e2", "--X", "2e2",
                       "--mode", "literal", "--family", "infinite-series")
    assert code == EXIT_OK
    rep = json.loads(out)
    assert rep["closed_form"] == pytest.approx(-1 / 320, abs=1e-12)
    assert rep["convention"] == "literal"


def test_curvature_strict_and_bad_input(capsys):
    args = ["curvature", "su2_biinvariant", "--flag", "U=e1,Y=e2", "--X", "2e2",
            "--family", "infinite-series"]
    assert run(capsys, *args, "--strict")[0] == EXIT_FAIL
    assert run(capsys, *args, "--strict", "--form", "corrected")[0] == EXIT_OK
    assert run(capsys, "curvature", "su2_biinvariant", "--flag", "U=e2,Y=e2")[0] == EXIT_INPUT
    assert run(capsys, "curvature", "su2_biinvariant", "--flag", "U=e1,Y=e2", "--X", "e2",
               "--family", "infinite-series")[0] == EXIT_INPUT
    assert run(capsys, "curvature", "su2_berger", "--flag", "U=e1,Y=e2", "--theorem", "natred")[0] == EXIT_INPUT
    assert run(capsys, "curvature", "su2_berger", "--flag", "U=e1,Y=e2", "--theorem", "natred",
               "--override")[0] == EXIT_OK


def test_sweep_is_deterministic_across_threads(capsys, tmp_path):
    base = ["sweep", "u2_central", "--samples", "12", "--seed", "5"]
    _, one, _ = run(capsys, *base, "--threads", "1")
    _, four, _ = run(capsys, *base, "--threads", "4")
    assert one == four
    rows = list(csv.DictReader(io.StringIO(one)))
    assert len(rows) == 12 and rows[0]["sample_index"] == "0"
    assert {"Y_z", "U_z", "s_value", "K_closed", "K_oracle", "rel_diff"} <= set(rows[0])
    out = tmp_path / "sweep.csv"
    assert run(capsys, *base, "--out", str(out))[0] == EXIT_OK
    assert out.read_text() == one


def test_sweep_zero_X_exact(capsys):
    _, out, _ = run(capsys, "sweep", "su2_biinvariant", "--samples", "5")
    for row in csv.DictReader(io.StringIO(out)):
        assert float(row["K_closed"]) == pytest.approx(0.25, abs=1e-13)
        assert float(row["K_oracle"]) == pytest.approx(0.25, abs=1e-12)


def test_xcheck_exit_codes(capsys, tmp_path):
    out = tmp_path / "ledger.json"
    code, text, _ = run(capsys, "xcheck", "su2_biinvariant", "--samples", "5", "--out", str(out))
    assert code == EXIT_OK and json.loads(out.read_text()) == json.loads(text)
    code, text, _ = run(capsys, "xcheck", "su2_biinvariant", "--samples", "5", "--family",
                        "infinite-series", "--X", "1.5e2")
    assert code == EXIT_FAIL
    kinds = {(e["form"], e["kind"]) for e in json.loads(text)["entries"]}
    assert ("literal", "term-mismatch") in kinds
    assert ("corrected", "term-mismatch") not in kinds


def test_natred_command(capsys):
    code, out, _ = run(capsys, "natred", "u2_central", "--samples", "40")
    assert code == EXIT_OK and json.loads(out)["berwald"] is True
    code, out, _ = run(capsys, "natred", "su2_berger", "--samples", "40")
    assert code == EXIT_FAIL
    names = [c["name"] for c in json.loads(out)["checks"]]
    assert names == ["natred-riemannian", "parallel-X", "natred-finsler[exponential]"]


def test_validate_reports_jacobi_residual(capsys, fixtures_dir):
    code, out, _ = run(capsys, "validate", str(fixtures_dir / "bad_jacobi.json"))
    checks = {c["name"]: c for c in json.loads(out)["report"]["checks"]}
    assert code == EXIT_FAIL and checks["jacobi"]["residual"] == pytest.approx(1.0)
