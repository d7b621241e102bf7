import json

import pytest

from meantype.cli import main, parse_vector
from meantype.errors import ParseError

AGM_CFG = "p = 2\ndomain = (0, inf)\ncomponents = arithmetic, geometric\n"
AH_BOX_CFG = "p = 2\ndomain = [0.5, 10]\ncomponents = arithmetic, harmonic\n"
SHIFT3_CFG = "p = 3\ndomain = (-inf, inf)\ncomponents = projection:2, projection:3, arithmetic\n"
PROJ_CFG = "p = 2\ndomain = (-inf, inf)\ncomponents = projection:1, projection:2\n"


@pytest.fixture
def cfg(tmp_path):
    def write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return {
        "agm": write("agm.cfg", AGM_CFG),
        "ah": write("ah.cfg", AH_BOX_CFG),
        "shift3": write("shift3.cfg", SHIFT3_CFG),
        "proj": write("proj.cfg", PROJ_CFG),
    }


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestParseVector:
    def test_basic(self):
        assert parse_vector("1,2.5,-3") == (1.0, 2.5, -3.0)

    def test_scientific(self):
        assert parse_vector("1e-3, 2E4") == (0.001, 20000.0)

    def test_bad_token(self):
        with pytest.raises(ParseError) as exc:
            parse_vector("1,zap,3")
        assert exc.value.token == "zap"


class TestExitCodes:
    def test_success_is_zero(self, capsys, cfg):
        code, out, _ = run(capsys, "invariant", "--mapping", cfg["agm"], "--vector", "1,2")
        assert code == 0

    def test_missing_file_is_one(self, capsys):
        code, _, err = run(capsys, "invariant", "--mapping", "nope.cfg", "--vector", "1,2")
        assert code == 1
        assert "error" in err

    def test_malformed_config_is_one(self, capsys, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("p = 2\ndomain = (0, inf)\ncomponents = arithmetic, quadratic\n")
        code, _, err = run(capsys, "map-apply", "--mapping", str(bad), "--vector", "1,2")
        assert code == 1
        assert "quadratic" in err

    def test_bad_vector_is_one(self, capsys, cfg):
        code, _, err = run(capsys, "map-apply", "--mapping", cfg["agm"], "--vector", "1,x")
        assert code == 1
        assert "x" in err

    def test_arity_mismatch_is_one(self, capsys, cfg):
        code, _, err = run(capsys, "map-apply", "--mapping", cfg["agm"], "--vector", "1,2,3")
        assert code == 1

    def test_usage_error_is_one(self, capsys, cfg):
        code, _, err = run(capsys, "invariant", "--mapping", cfg["agm"])  # no --vector
        assert code == 1

    def test_counterexample_is_two(self, capsys, cfg):
        code, out, _ = run(capsys, "contractive-probe", "--mapping", cfg["proj"],
                           "--samples", "10")
        assert code == 2
        assert "counterexample" in out

    def test_no_counterexample_is_zero(self, capsys, cfg):
        code, out, _ = run(capsys, "contractive-probe", "--mapping", cfg["agm"],
                           "--samples", "200")
        assert code == 0
        assert "no counterexample" in out

    def test_n0_cap_exhausted_is_two(self, capsys, cfg):
        code, out, _ = run(capsys, "n0", "--mapping", cfg["proj"], "--vector", "0,1",
                           "--cap", "20")
        assert code == 2

    def test_max_iter_reached_is_two(self, capsys, cfg):
        code, out, _ = run(capsys, "invariant", "--mapping", cfg["proj"],
                           "--vector", "0,1", "--max-iter", "25")
        assert code == 2
        assert "max_iter_reached" in out


class TestCommands:
    def test_invariant_agm(self, capsys, cfg):
        code, out, _ = run(capsys, "invariant", "--mapping", cfg["agm"], "--vector", "1,2")
        assert code == 0
        assert "value = 1.456791031" in out
        assert "status = converged" in out

    def test_map_apply_fixed_point(self, capsys, cfg):
        code, out, _ = run(capsys, "map-apply", "--mapping", cfg["agm"], "--vector", "5,5")
        assert code == 0
        assert "result = (5.0, 5.0)" in out

    def test_n0_shift3(self, capsys, cfg):
        code, out, _ = run(capsys, "n0", "--mapping", cfg["shift3"], "--vector", "0,1,0")
        assert code == 0
        assert "n0 = 2" in out

    def test_mean_eval(self, capsys):
        code, out, _ = run(capsys, "mean-eval", "--mean", "power:0.5",
                           "--vector", "4,9", "--domain", "(0, inf)")
        assert code == 0
        value = float(out.split("=")[1])
        assert value == pytest.approx(((2.0 + 3.0) / 2) ** 2, abs=1e-12)

    def test_mean_eval_rejects_bad_mean(self, capsys):
        code, _, err = run(capsys, "mean-eval", "--mean", "quadratic", "--vector", "1,2")
        assert code == 1
        assert "quadratic" in err

    def test_map_iterate_human(self, capsys, cfg):
        code, out, _ = run(capsys, "map-iterate", "--mapping", cfg["shift3"],
                           "--vector", "0,1,0", "--steps", "2")
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 3
        assert lines[0].startswith("step 0:")

    def test_residual_with_catalog_mean(self, capsys, cfg):
        code, out, _ = run(capsys, "residual", "--mapping", cfg["ah"],
                           "--mean", "geometric", "--samples", "100")
        assert code == 0
        assert float(out.split("=")[1]) <= 1e-12

    def test_residual_default_invariant_mean(self, capsys, cfg):
        code, out, _ = run(capsys, "residual", "--mapping", cfg["ah"], "--samples", "50")
        assert code == 0
        assert float(out.split("=")[1]) <= 2e-12

    def test_uniqueness(self, capsys, cfg):
        code, out, _ = run(capsys, "uniqueness", "--mapping", cfg["agm"],
                           "--samples", "50")
        assert code == 0
        assert float(out.split("=")[1].split("(")[0]) <= 2e-12

    def test_decompose_invariant_function(self, capsys, cfg):
        code, out, _ = run(capsys, "decompose", "--mapping", cfg["ah"],
                           "--function", "product", "--samples", "50")
        assert code == 0
        assert "invariance_residual" in out

    def test_decompose_non_invariant_is_two(self, capsys, cfg):
        code, out, _ = run(capsys, "decompose", "--mapping", cfg["agm"],
                           "--function", "coord:1", "--samples", "50")
        assert code == 2
        assert "exceeds threshold" in out


class TestOutputFormats:
    def test_json_document_fields(self, capsys, cfg):
        code, out, _ = run(capsys, "invariant", "--mapping", cfg["agm"],
                           "--vector", "1,2", "--output", "json")
        assert code == 0
        doc = json.loads(out)
        assert set(doc) >= {"mapping", "v", "tol", "max_iter", "value", "steps",
                            "final_diameter", "status", "timestamp"}
        assert doc["status"] == "converged"
        assert doc["v"] == [1.0, 2.0]

    def test_json_stable_modulo_timestamp(self, capsys, cfg):
        _, out1, _ = run(capsys, "invariant", "--mapping", cfg["agm"],
                         "--vector", "1,2", "--output", "json")
        _, out2, _ = run(capsys, "invariant", "--mapping", cfg["agm"],
                         "--vector", "1,2", "--output", "json")
        doc1, doc2 = json.loads(out1), json.loads(out2)
        doc1.pop("timestamp")
        doc2.pop("timestamp")
        assert json.dumps(doc1) == json.dumps(doc2)

    def test_probe_json_stable_for_seed(self, capsys, cfg):
        _, out1, _ = run(capsys, "contractive-probe", "--mapping", cfg["shift3"],
                         "--samples", "50", "--seed", "7", "--output", "json")
        _, out2, _ = run(capsys, "contractive-probe", "--mapping", cfg["shift3"],
                         "--samples", "50", "--seed", "7", "--output", "json")
        doc1, doc2 = json.loads(out1), json.loads(out2)
        doc1.pop("timestamp")
        doc2.pop("timestamp")
        assert doc1 == doc2

    def test_csv_trace(self, capsys, cfg):
        code, out, _ = run(capsys, "map-iterate", "--mapping", cfg["agm"],
                           "--vector", "1,2", "--steps", "3", "--output", "csv")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "step,x1,x2,diameter"
        assert len(lines) == 5

    def test_csv_rejected_without_trace(self, capsys, cfg):
        code, _, err = run(capsys, "map-apply", "--mapping", cfg["agm"],
                           "--vector", "1,2", "--output", "csv")
        assert code == 1
        assert "csv" in err

    def test_invariant_trace_csv(self, capsys, cfg):
        code, out, _ = run(capsys, "invariant", "--mapping", cfg["agm"],
                           "--vector", "1,2", "--trace", "--output", "csv")
        assert code == 0
        assert out.startswith("step,x1,x2,diameter")

    def test_trace_attached_to_json(self, capsys, cfg):
        _, out, _ = run(capsys, "invariant", "--mapping", cfg["agm"],
                        "--vector", "1,2", "--trace", "--output", "json")
        doc = json.loads(out)
        assert "trace" in doc
        assert doc["trace"]["steps"][0]["vector"] == [1.0, 2.0]


class TestSeedEnvVar:
    def test_env_overrides_default_seed(self, capsys, cfg, monkeypatch):
        monkeypatch.setenv("MEANTYPE_SEED", "777")
        _, out, _ = run(capsys, "contractive-probe", "--mapping", cfg["agm"],
                        "--samples", "20", "--output", "json")
        assert json.loads(out)["seed"] == 777

    def test_explicit_flag_beats_env(self, capsys, cfg, monkeypatch):
        monkeypatch.setenv("MEANTYPE_SEED", "777")
        _, out, _ = run(capsys, "contractive-probe", "--mapping", cfg["agm"],
                        "--samples", "20", "--seed", "3", "--output", "json")
        assert json.loads(out)["seed"] == 3

    def test_bad_env_value_is_error(self, capsys, cfg, monkeypatch):
        monkeypatch.setenv("MEANTYPE_SEED", "not-a-number")
        code, _, err = run(capsys, "contractive-probe", "--mapping", cfg["agm"],
                           "--samples", "20")
        assert code == 1
        assert "MEANTYPE_SEED" in err
