import json

import pytest

from pcgl.cli import fixture_path, load_presentation, main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


WEYL = fixture_path("weyl")
PPLANE = fixture_path("pplane")
BELLSIG = fixture_path("bellsig")
M2 = fixture_path("m2")


class TestCheck:
    def test_weyl_passes(self, capsys):
        code, out, _ = run(capsys, "check", WEYL)
        assert code == 0
        report = json.loads(out)
        assert report["ok"] is True

    def test_bellsig_fails_flagging_level_four(self, capsys):
        code, out, _ = run(capsys, "check", BELLSIG)
        assert code == 1
        report = json.loads(out)
        level4 = report["levels"][3]
        assert level4["ok"] is False
        assert level4["delta_nilpotent"] is False
        assert level4["h_exists"] is False

    def test_malformed_json(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code, _, err = run(capsys, "check", str(bad))
        assert code == 2
        assert "error" in err

    def test_missing_file(self, capsys):
        code, _, _ = run(capsys, "check", "/nonexistent/nope.json")
        assert code == 2

    def test_unknown_variable_in_bracket(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(
            '{"vars": ["a", "X"], "brackets": {"2,1": "q*X"}, "grading": []}'
        )
        code, _, _ = run(capsys, "check", str(bad))
        assert code == 2

    def test_bad_bracket_key(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"vars": ["a", "X"], "brackets": {"1,2": "a"}, "grading": []}')
        code, _, _ = run(capsys, "check", str(bad))
        assert code == 2

    def test_wrong_h_shape(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(
            '{"vars": ["a", "X"], "brackets": {"2,1": "a*X"},'
            ' "grading": [[1, 0], [0, 1]], "h": [["1", "0"]]}'
        )
        code, _, _ = run(capsys, "check", str(bad))
        assert code == 2

    def test_level_out_of_range(self, capsys):
        code, _, _ = run(capsys, "theta", WEYL, "--level", "5", "a")
        assert code == 2


class TestComputations:
    def test_theta(self, capsys):
        code, out, _ = run(capsys, "theta", WEYL, "--level", "2", "a")
        assert code == 0
        assert out.strip() == "a - X^-1"

    def test_normal(self, capsys):
        code, out, _ = run(capsys, "normal", WEYL, "--level", "2", "a")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "a*X - 1"
        assert "poisson-normal: verified" in lines[1]

    def test_normal_rejects_bad_input(self, capsys):
        code, _, err = run(capsys, "normal", M2, "--level", "4", "a + b")
        assert code == 1

    def test_d(self, capsys):
        code, out, _ = run(capsys, "d", WEYL, "--level", "2")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "1/a"
        assert "sigma(d) = lambda*d: verified" in lines[1]

    def test_d_with_modulo(self, capsys):
        code, _, _ = run(capsys, "d", M2, "--level", "4", "--modulo", "b;c")
        assert code == 0

    def test_d_inconclusive(self, capsys):
        code, _, err = run(capsys, "d", WEYL, "--level", "2", "--modulo", "a")
        assert code == 1
        assert "inconclusive" in err


class TestHPrimes:
    def test_pplane_square_poset(self, capsys):
        code, out, _ = run(capsys, "hprimes", PPLANE)
        assert code == 0
        data = json.loads(out)
        assert data["count"] == 4
        dot_code, dot_out, _ = run(capsys, "hprimes", PPLANE, "--format", "dot")
        assert dot_code == 0
        assert dot_out.count("->") == 4

    def test_weyl(self, capsys):
        code, out, _ = run(capsys, "hprimes", WEYL)
        assert json.loads(out)["count"] == 2

    def test_m2(self, capsys):
        code, out, _ = run(capsys, "hprimes", M2)
        data = json.loads(out)
        assert data["count"] == 14
        assert data["inconclusive"] is False

    def test_failing_presentation(self, capsys):
        code, _, err = run(capsys, "hprimes", BELLSIG)
        assert code == 1


class TestReports:
    def test_closure(self, capsys):
        code, out, _ = run(capsys, "closure", BELLSIG, "-g", "x")
        assert code == 0
        assert json.loads(out)["generators"] == ["x", "y*z"]

    def test_hcore(self, capsys):
        code, out, _ = run(capsys, "hcore", WEYL, "-g", "a + X^2")
        assert code == 0
        assert json.loads(out)["generators"] == []

    def test_chain(self, capsys):
        code, out, _ = run(
            capsys,
            "chain",
            BELLSIG,
            "--ideal", "0",
            "--ideal", "x;y",
            "--ideal", "x;y;z",
        )
        assert code == 0
        data = json.loads(out)
        assert data["length"] == 2
        assert data["dimension_drops"] == [2, 1]
        assert data["all_drops_one"] is False

    def test_center_pplane(self, capsys):
        code, out, _ = run(capsys, "center", PPLANE)
        assert code == 0
        assert json.loads(out)["center"] == "QQ"

    def test_center_weyl_not_affine(self, capsys):
        code, _, err = run(capsys, "center", WEYL)
        assert code == 1


class TestDeterminism:
    @pytest.mark.parametrize(
        "argv",
        [
            ("check", WEYL),
            ("hprimes", M2),
            ("closure", BELLSIG, "-g", "x"),
            ("center", PPLANE),
            ("chain", BELLSIG, "--ideal", "0", "--ideal", "z"),
        ],
    )
    def test_byte_identical_reruns(self, capsys, argv):
        _, out1, _ = run(capsys, *argv)
        _, out2, _ = run(capsys, *argv)
        assert out1 == out2


def test_fixture_loader_roundtrip():
    pres, bounds = load_presentation(M2)
    assert pres.nvars == 4
    assert pres.grading.rank == 4
