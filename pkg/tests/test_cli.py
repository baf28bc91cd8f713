import json
from fractions import Fraction

import pytest

from kplab import cli


class TestParseSpec:
    def test_minimal_valid(self):
        spec = cli.parse_spec("experiment=degenerate n=4 k=2 r=1 prime=3 out=deg.csv")
        assert spec.kind == "degenerate"
        assert spec.params == {"n": 4, "k": 2, "r": 1, "prime": 3}
        assert spec.out == "deg.csv"

    def test_one_key_per_line_with_comments(self):
        text = """
        # census of the Grassmannian
        experiment=grassmann-census
        n=4
        k=2   # ambient pair
        prime=3
        """
        spec = cli.parse_spec(text)
        assert spec.kind == "grassmann-census"
        assert spec.params == {"n": 4, "k": 2, "prime": 3}

    def test_rational_values(self):
        spec = cli.parse_spec(
            "experiment=maximal-ratio n=4 k=2 prime=3 p_exp=11/6 q_exp=22/5"
        )
        assert spec.params["p_exp"] == Fraction(11, 6)
        assert spec.params["q_exp"] == Fraction(22, 5)

    def test_seed_range(self):
        spec = cli.parse_spec(
            "experiment=two-ends n=4 k=2 r=1 prime=3 num_directions=4 density=1/2 seeds=1..5"
        )
        assert spec.params["seeds"] == [1, 2, 3, 4, 5]

    def test_non_prime_rejected(self):
        with pytest.raises(cli.SpecError, match="prime"):
            cli.parse_spec("experiment=grassmann-census n=4 k=2 prime=9")

    def test_duplicate_key_rejected(self):
        with pytest.raises(cli.SpecError, match="duplicate"):
            cli.parse_spec("experiment=degenerate n=4 n=5 k=2 r=1 prime=3")

    def test_unknown_key_rejected(self):
        with pytest.raises(cli.SpecError, match="unknown keys"):
            cli.parse_spec("experiment=degenerate n=4 k=2 r=1 prime=3 shape=round")

    def test_missing_experiment_rejected(self):
        with pytest.raises(cli.SpecError, match="experiment"):
            cli.parse_spec("n=4 k=2")

    def test_unknown_experiment_rejected(self):
        with pytest.raises(cli.SpecError, match="unknown experiment"):
            cli.parse_spec("experiment=frobnicate n=4")

    def test_missing_required_key_rejected(self):
        with pytest.raises(cli.SpecError, match="missing mandatory"):
            cli.parse_spec("experiment=degenerate n=4 k=2 prime=3")


class TestRunExperiment:
    def test_census_row(self):
        spec = cli.parse_spec("experiment=grassmann-census n=4 k=2 prime=3")
        rows = cli.run_experiment(spec)
        assert rows == [
            {
                "experiment": "grassmann-census",
                "n": 4,
                "k": 2,
                "prime": 3,
                "enumerated": 130,
                "formula": 130,
                "verdict_match": True,
            }
        ]

    def test_degenerate_row(self):
        spec = cli.parse_spec("experiment=degenerate n=4 k=2 r=1 prime=3")
        (row,) = cli.run_experiment(spec)
        assert row["num_points"] == 3
        assert row["num_flats"] == 13
        assert row["incidences"] == 39
        assert row["verdict_worst_case"] is True
        assert row["dominant_term"] == "Pi_F"

    def test_exponent_identity_rows(self):
        spec = cli.parse_spec("experiment=exponent-identities kmax=6")
        rows = cli.run_experiment(spec)
        main_rows = [r for r in rows if r["verdict_main_identity"] != ""]
        assert len(main_rows) == 5 and all(r["verdict_main_identity"] for r in main_rows)
        chain_rows = [r for r in rows if r["chain_variant"] != ""]
        assert all(
            r["chain_variant"] == "holds_with_corrected_denominator" for r in chain_rows
        )

    def test_budget_refusal(self):
        spec = cli.parse_spec("experiment=grassmann-census n=4 k=2 prime=3")
        with pytest.raises(cli.BudgetError):
            cli.run_experiment(spec, budget=1)


class TestMainEntryPoint:
    def test_census_subcommand(self, capsys):
        assert cli.main(["census", "-n", "3", "-k", "1", "-p", "2"]) == 0
        assert "7" in capsys.readouterr().out

    def test_json_output(self, capsys):
        assert cli.main(["--json", "census", "-n", "3", "-k", "1", "-p", "2"]) == 0
        rows = json.loads(capsys.readouterr().out)
        assert rows[0]["enumerated"] == 7

    def test_missing_spec_file(self, tmp_path, capsys):
        assert cli.main(["run", str(tmp_path / "nope.spec")]) == 1

    def test_invalid_spec_exits_1(self, tmp_path):
        spec = tmp_path / "bad.spec"
        spec.write_text("experiment=grassmann-census n=4 k=2 prime=9\n")
        assert cli.main(["run", str(spec)]) == 1

    def test_budget_exits_2(self, tmp_path):
        spec = tmp_path / "census.spec"
        spec.write_text("experiment=grassmann-census n=4 k=2 prime=3\n")
        assert cli.main(["--budget", "1", "run", str(spec)]) == 2

    def test_verify_exponents(self, capsys):
        assert cli.main(["verify-exponents", "--kmax", "8"]) == 0

    def test_selftest(self, capsys):
        assert cli.main(["selftest"]) == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "FAIL" not in out

    def test_run_writes_csv_and_json(self, tmp_path):
        out = tmp_path / "deg.csv"
        spec = tmp_path / "deg.spec"
        spec.write_text(f"experiment=degenerate n=4 k=2 r=1 prime=3 out={out}\n")
        assert cli.main(["run", str(spec)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("# generated ")
        assert "incidences" in lines[1]
        mirrored = json.loads(out.with_suffix(".json").read_text())
        assert mirrored[0]["incidences"] == 39

    def test_csv_determinism_excluding_timestamp(self, tmp_path):
        out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (out_a, out_b):
            spec = tmp_path / f"{out.stem}.spec"
            spec.write_text(
                "experiment=two-ends n=3 k=1 r=1 prime=3 num_directions=4 "
                f"density=1/2 seeds=0..4 out={out}\n"
            )
            threads = "1" if out is out_a else "8"
            assert cli.main(["--threads", threads, "run", str(spec)]) == 0
        body_a = out_a.read_text().splitlines()[1:]
        body_b = out_b.read_text().splitlines()[1:]
        assert body_a == body_b
        assert out_a.with_suffix(".json").read_bytes() == out_b.with_suffix(".json").read_bytes()
