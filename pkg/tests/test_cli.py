import json

import pytest

from saubasis.cli import main


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestBuild:
    def test_single_stage(self, tmp_path, capsys):
        path = tmp_path / "basis.json"
        code, _, err = run_cli(["build", "--stages", "1", "--out", str(path)], capsys)
        assert code == 0
        obj = json.loads(path.read_text())
        assert obj["model"] == "abelian"
        assert len(obj["family"]) == 1
        assert "stage 1" in err

    def test_six_stages_contains_rademacher(self, tmp_path, capsys):
        path = tmp_path / "basis.json"
        code, _, _ = run_cli(["build", "--stages", "6", "--out", str(path)], capsys)
        assert code == 0
        obj = json.loads(path.read_text())
        assert {
            "breakpoints": ["0", "1/2", "1"],
            "values": ["1", "-1"],
        } in obj["family"]

    def test_matrix_n1_matches_abelian(self, tmp_path, capsys):
        pa = tmp_path / "a.json"
        pm = tmp_path / "m.json"
        assert run_cli(["build", "--stages", "3", "--out", str(pa)], capsys)[0] == 0
        assert (
            run_cli(
                ["build", "--model", "matrix", "--n", "1", "--stages", "3", "--out", str(pm)],
                capsys,
            )[0]
            == 0
        )
        a = json.loads(pa.read_text())
        m = json.loads(pm.read_text())
        assert len(a["family"]) == len(m["family"])

    def test_rejects_bad_dimension(self, capsys):
        code, _, _ = run_cli(
            ["build", "--model", "matrix", "--n", "9", "--stages", "1"], capsys
        )
        assert code == 2

    def test_byte_identical_builds(self, tmp_path, capsys):
        p1, p2 = tmp_path / "b1.json", tmp_path / "b2.json"
        run_cli(["build", "--stages", "15", "--out", str(p1)], capsys)
        run_cli(["build", "--stages", "15", "--out", str(p2)], capsys)
        assert p1.read_bytes() == p2.read_bytes()


class TestVerify:
    @pytest.fixture()
    def basis_file(self, tmp_path, capsys):
        path = tmp_path / "basis.json"
        assert run_cli(["build", "--stages", "15", "--out", str(path)], capsys)[0] == 0
        capsys.readouterr()
        return path

    def test_build_output_passes(self, basis_file, capsys):
        code, out, _ = run_cli(["verify", str(basis_file)], capsys)
        assert code == 0
        assert json.loads(out)["passed"]

    def test_mutated_value_fails_with_witness(self, basis_file, capsys):
        obj = json.loads(basis_file.read_text())
        obj["family"][1]["values"][0] = "2/1"
        basis_file.write_text(json.dumps(obj))
        code, out, _ = run_cli(["verify", str(basis_file)], capsys)
        assert code == 1
        report = json.loads(out)
        assert not report["passed"]

    def test_window_beyond_processed_reports_not_certified(self, basis_file, capsys):
        code, out, _ = run_cli(
            ["verify", str(basis_file), "--j-max", "9", "--k-max", "9"], capsys
        )
        assert code == 0
        report = json.loads(out)
        assert report["not_certified"]

    def test_matrix_build_verifies(self, tmp_path, capsys):
        path = tmp_path / "mat.json"
        run_cli(
            ["build", "--model", "matrix", "--n", "2", "--stages", "8", "--out", str(path)],
            capsys,
        )
        code, out, _ = run_cli(["verify", str(path)], capsys)
        assert code == 0

    def test_missing_file(self, tmp_path, capsys):
        code, _, _ = run_cli(["verify", str(tmp_path / "nope.json")], capsys)
        assert code == 3

    def test_garbage_file(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("not json {")
        code, _, _ = run_cli(["verify", str(path)], capsys)
        assert code == 4

    def test_round_trip_parse_serialize_bytes(self, basis_file, capsys):
        from saubasis.basis import BasisState

        text = basis_file.read_text()
        state = BasisState.from_json(json.loads(text))
        again = json.dumps(state.to_json(), indent=2, sort_keys=True) + "\n"
        assert again == text


class TestPursueCommand:
    def test_rademacher(self, tmp_path, capsys):
        out_path = tmp_path / "trace.json"
        code, _, err = run_cli(
            [
                "pursue",
                "--target", '{"breakpoints":["0","1/2","1"],"values":["-1","1"]}',
                "--epsilon", "1/2",
                "--out", str(out_path),
            ],
            capsys,
        )
        assert code == 0
        payload = json.loads(out_path.read_text())
        assert [rec["alpha"] for rec in payload["trace"]["iterations"]] == ["1"]
        assert payload["residual"]["values"] == ["0"]
        assert "iterations: 1" in err

    def test_csv_decay_table(self, tmp_path, capsys):
        csv_path = tmp_path / "decay.csv"
        code, _, _ = run_cli(
            [
                "pursue",
                "--target",
                '{"breakpoints":["0","1/3","2/3","1"],"values":["1","0","-1"]}',
                "--epsilon", "1/100",
                "--csv", str(csv_path),
                "--out", str(tmp_path / "t.json"),
            ],
            capsys,
        )
        assert code == 0
        lines = csv_path.read_text().strip().splitlines()
        assert lines[0] == "k,alpha,norm2_sq_after,norm_inf_after"
        assert lines[1].startswith("1,2/3,")

    def test_family_file(self, tmp_path, capsys):
        fam_path = tmp_path / "fam.json"
        run_cli(["build", "--stages", "6", "--out", str(fam_path)], capsys)
        code, _, err = run_cli(
            [
                "pursue",
                "--target", '{"breakpoints":["0","1/2","1"],"values":["-1","1"]}',
                "--family", str(fam_path),
                "--epsilon", "1/4",
                "--out", str(tmp_path / "t.json"),
            ],
            capsys,
        )
        assert code == 0
        assert "iterations: 0" in err  # already in the span

    def test_domain_error(self, capsys):
        code, _, _ = run_cli(
            [
                "pursue",
                "--target", '{"breakpoints":["0","1"],"values":["1"]}',
                "--epsilon", "0",
            ],
            capsys,
        )
        assert code == 2

    def test_bad_target(self, capsys):
        code, _, _ = run_cli(
            ["pursue", "--target", "{broken", "--epsilon", "1/2"], capsys
        )
        assert code == 4


class TestBoundCommand:
    def test_zero_case(self, capsys):
        code, out, _ = run_cli(["bound", "1/4", "1", "1"], capsys)
        assert code == 0
        assert out.strip() == "0"

    def test_spec_scale(self, capsys):
        code, out, _ = run_cli(["bound", "1", "1", "1/2"], capsys)
        assert code == 0
        assert 10 ** 6 <= int(out.strip()) <= 10 ** 8

    def test_huge_regime_prints_magnitude(self, capsys):
        code, out, _ = run_cli(["bound", "1", "1", "1/64"], capsys)
        assert code == 0
        assert out.strip().startswith("~10^")

    def test_domain_error(self, capsys):
        code, _, _ = run_cli(["bound", "0", "1", "1/2"], capsys)
        assert code == 2


class TestShowCommand:
    def test_show_member(self, tmp_path, capsys):
        path = tmp_path / "basis.json"
        run_cli(["build", "--stages", "6", "--out", str(path)], capsys)
        code, out, _ = run_cli(["show", str(path), "--member", "1"], capsys)
        assert code == 0
        assert "[0,1/2)" in out

    def test_show_out_of_range(self, tmp_path, capsys):
        path = tmp_path / "basis.json"
        run_cli(["build", "--stages", "1", "--out", str(path)], capsys)
        code, _, _ = run_cli(["show", str(path), "--member", "5"], capsys)
        assert code == 4
