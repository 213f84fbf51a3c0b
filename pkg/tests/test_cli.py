import io
import json
from fractions import Fraction

import mpmath
import pytest

from graevlab.cli import run
from graevlab.serialize import (
    InputError,
    fixture_path,
    parse_lincomb,
    parse_model,
    parse_space,
    parse_torus_point,
    parse_word,
    read_json,
)

FIXTURES = fixture_path("")
EXPECTED = sorted((FIXTURES / "expected").glob("*.json"))


def call(*argv, cwd=FIXTURES):
    """Run the CLI with fixture-relative paths; returns (exit code, parsed report)."""
    argv = [str(cwd / a) if (cwd / a).is_file() else a for a in argv]
    out = io.StringIO()
    code, _ = run(argv, out)
    return code, json.loads(out.getvalue())


@pytest.mark.parametrize("path", EXPECTED, ids=lambda p: p.stem)
def test_expected_reports(path):
    want = json.loads(path.read_text())
    code, got = call(*want["argv"])
    assert code == want["exit"]
    for key in ("status", "checks", "result"):
        assert got[key] == want[key]


class TestCommands:
    def test_norm_value(self):
        code, rep = call("norm", "--space", "space_discrete3.json", "--word", "word_2a_minus_b.json")
        assert code == 0 and rep["result"]["value"] == "2"
        assert set(rep) == {"command", "seed", "inputs", "status", "checks", "result", "wall_time"}
        assert len(rep["inputs"]["space"]) == 64

    def test_tu_check_equal(self):
        code, rep = call("tu-check", "--space", "space_discrete3.json", "--word", "word_2a_minus_b.json")
        assert code == 0 and rep["result"]["equal"] is True

    def test_seminorm_inline(self):
        code, rep = call("seminorm", "--space", "space_path4.json",
                         "--lincomb", '{"coeffs": {"c": "2", "a": "-1"}}')
        # a at 1/2, c at 5/2 on a line through the basepoint: 2*(5/2) - 1/2
        assert code == 0
        assert Fraction(rep["result"]["value"]) == Fraction(5) - Fraction(1, 2)

    def test_validate_failure(self):
        code, rep = call("validate", "--space", "space_triangle_violation.json")
        assert code == 1 and rep["status"] == "fail"
        assert rep["checks"][0]["witness"]["axiom"] == "triangle"

    def test_kronecker_against_mpmath(self):
        code, rep = call("torus", "kronecker", "--x", "point_sqrt2.json", "--target", '["1/2"]',
                         "--eps", "1/20", "--max-m", "100")
        with mpmath.workdps(40):
            dists = [abs(mpmath.frac(m * mpmath.sqrt(2)) - mpmath.mpf(1) / 2) for m in range(1, 101)]
        least = next(m for m, d in enumerate(dists, 1) if d < mpmath.mpf(1) / 20)
        assert code == 0 and rep["result"]["m"] == least == 6

    def test_kronecker_absent(self):
        code, rep = call("torus", "kronecker", "--x", '["0"]', "--target", '["1/2"]',
                         "--eps", "1/4", "--max-m", "10")
        assert code == 1 and rep["result"]["m"] is None

    def test_net_exit_codes(self):
        code, rep = call("torus", "net", "--points", "net_quarters.json", "--eps", "1/8")
        assert code == 1 and rep["result"]["status"] == "refuted"
        code, rep = call("torus", "net", "--points", "net_quarters.json",
                         "--eps", str(Fraction(1, 8) + Fraction(1, 4000)))
        assert code == 3 and rep["status"] == "inconclusive"

    def test_rolewicz_pipeline(self, tmp_path):
        out = io.StringIO()
        code, _ = run(["rolewicz", "build", "--depth", "2"], out)
        assert code == 0
        cert = tmp_path / "cert.json"
        cert.write_text(out.getvalue())
        code, rep = call("rolewicz", "verify", "--cert", str(cert))
        assert code == 0 and rep["result"]["ok"]
        code, rep = call("rolewicz", "approx", "--cert", str(cert), "--target",
                         '["1/2", "1/2"]', "--eps", "1/2")
        assert code == 0 and rep["result"]["m"] >= 1
        code, rep = call("rolewicz", "approx", "--cert", str(cert), "--target",
                         '["1/2", "1/2"]', "--eps", "1/3")
        assert code == 2 and rep["result"]["error"]["field"] == "eps"

    def test_check_command(self):
        code, rep = call("check", "--space", "space_path4.json", "--trials", "20", "--seed", "1")
        assert code == 0
        names = {c["name"] for c in rep["checks"]}
        assert {"graev.triangle", "graev.tu_equality", "graev.brute_force"} <= names
        assert all(c["status"] == "pass" and c["trials"] >= 1 for c in rep["checks"])

    def test_csv(self, tmp_path):
        target = tmp_path / "summary.csv"
        code, rep = call("norm", "--space", "space_discrete3.json", "--word",
                         "word_2a_minus_b.json", "--csv", str(target))
        lines = target.read_text().splitlines()
        assert lines[0] == "name,status,trials,margin"
        assert len(lines) == 1 + len(rep["checks"])

    def test_unknown_subcommand(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run(["frobnicate"], io.StringIO())
        assert exc.value.code == 2
        assert "usage" in capsys.readouterr().err


class TestInputErrors:
    def test_missing_file(self):
        code, rep = call("norm", "--space", "/nonexistent.json", "--word", "{}")
        assert code == 2
        assert rep["result"]["error"]["path"] == "/nonexistent.json"

    def test_bad_field_named(self, tmp_path):
        bad = tmp_path / "space.json"
        bad.write_text(json.dumps({"points": ["*", "a"], "basepoint": "*",
                                   "dist": [["0", "1"], ["1", "x"]]}))
        code, rep = call("norm", "--space", str(bad), "--word", '{"coeffs": {"a": 1}}')
        assert code == 2
        assert rep["result"]["error"] == {"path": str(bad), "field": "dist[1][1]",
                                          "message": rep["result"]["error"]["message"]}

    def test_word_errors(self):
        space = parse_space(read_json(fixture_path("space_discrete3.json"))[0])
        with pytest.raises(InputError) as exc:
            parse_word({"coeffs": {"z": 1}}, space, "w.json")
        assert (exc.value.path, exc.value.field) == ("w.json", "coeffs.z")
        with pytest.raises(InputError) as exc:
            parse_word({"coeffs": {"a": "1/2"}}, space, "w.json")
        assert exc.value.field == "coeffs.a"
        with pytest.raises(InputError):
            parse_word({"coeffs": {space.basepoint: 1}}, space)
        assert parse_lincomb({"coeffs": {"a": "1/2"}}, space)

    def test_space_errors(self):
        with pytest.raises(InputError) as exc:
            parse_space({"points": ["*"], "dist": [["0"]]}, "s.json")
        assert exc.value.field == "basepoint"
        with pytest.raises(InputError) as exc:
            parse_space({"points": ["*", "*"], "basepoint": "*", "dist": []}, "s.json")
        assert exc.value.field == "points"
        data, _ = read_json(fixture_path("space_triangle_violation.json"))
        with pytest.raises(InputError) as exc:
            parse_space(data, "t.json")
        assert exc.value.field == "dist"

    def test_model_errors(self):
        data, _ = read_json(fixture_path("model_e2_m3_n3.json"))
        model, metrics = parse_model(data)
        assert metrics == ("l1", "linf")
        with pytest.raises(InputError) as exc:
            parse_model(dict(data, x_points=[["1"]]), "m.json")
        assert exc.value.field == "x_points[0]"
        with pytest.raises(InputError) as exc:
            parse_model(dict(data, metrics=["l3"]), "m.json")
        assert exc.value.field == "metrics[0]"

    def test_torus_point_error(self):
        with pytest.raises(InputError) as exc:
            parse_torus_point([{"rat": "1/2"}, {"coords": {"sqrt4": "1"}}], "p.json")
        assert exc.value.field == "point[1]"
        assert parse_torus_point("1/3").dim == 1

    def test_invalid_json(self, tmp_path):
        bad = tmp_path / "broken.json"
        bad.write_text("{")
        with pytest.raises(InputError) as exc:
            read_json(bad)
        assert exc.value.field == "<document>"
