import csv
import io
import json
import subprocess
import sys

import pytest

from orbitlab.cli import fmt_real, run

SUBCOMMANDS = ["orbit", "steps", "rate", "classify", "dw", "dilation", "stable-partition", "tangent",
               "verify-premodel", "sigma-formula", "catalog"]


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_steps_csv_example():
    code, text, _ = call("steps", "--catalog", "siegel_shear", "--point", "(i,0)", "--m", "1",
                         "--n-max", "128", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["n", "value"]
    assert float(rows[-1][1]) == pytest.approx(0.693147, abs=1e-6)


def test_classify_example():
    code, text, _ = call("classify", "--catalog", "halfplane_translation", "--point", "i")
    assert code == 0
    assert "parabolic" in text


def test_verify_premodel_example():
    code, text, _ = call("verify-premodel", "--catalog", "siegel_shear", "--premodel-r", "1",
                         "--format", "structured")
    assert code == 0
    doc = json.loads(text)
    assert doc["intertwining_residual"] < 1e-12
    assert doc["passed"] is True


def test_structured_output_is_deterministic():
    argv = ["stable-partition", "--catalog", "siegel_shear", "--sample", "(2i,0)", "--sample", "(3i,0)",
            "--sample", "(2i,0.3i)", "--format", "structured"]
    a, b = call(*argv), call(*argv)
    assert a == b
    doc = json.loads(a[1])
    assert len(doc["classes"]) == 2


def test_twelve_significant_digits():
    assert fmt_real(2 / 3) == "0.666666666667"
    assert fmt_real(0.0) == "0"


@pytest.mark.parametrize("sub", SUBCOMMANDS)
def test_every_subcommand_has_help(sub, capsys):
    code, _, _ = call(sub, "--help")
    assert code == 0
    assert "usage" in capsys.readouterr().out


REQUIRED = {
    "dilation": ["--zeta", "(1,0)"],
    "tangent": ["--dir", "(1,0)"],
    "sigma-formula": ["--theta", "0", "--lam", "2", "--m", "1"],
    "catalog": ["list"],
}


@pytest.mark.parametrize("sub", SUBCOMMANDS)
def test_unknown_flag_exits_2(sub, capsys):
    code, _, _ = call(sub, *REQUIRED.get(sub, []), "--bogus-flag")
    assert code == 2
    assert "--bogus-flag" in capsys.readouterr().err


def test_usage_errors_exit_2():
    assert call("steps", "--point", "(i,0)")[0] == 2  # no map source
    assert call("steps", "--catalog", "nope")[0] == 2
    code, _, err = call("steps", "--map", "siegel 1 : (z1 + 1", "--point", "i")
    assert code == 2 and "offset" in err
    assert call("steps", "--catalog", "siegel_shear", "--map", "disc 1 : (z1)")[0] == 2


def test_strict_exit_1_on_inconclusive():
    argv = ["steps", "--catalog", "siegel_shear", "--point", "(2i, 0.5)", "--n-max", "60"]
    assert call(*argv)[0] == 0
    assert call(*argv, "--strict")[0] == 1


def test_config_file_and_out(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"catalog": "disc_hyperbolic", "params": {"lam": 2.0}, "format": "csv", "m-max": 10}))
    target = tmp_path / "rate.csv"
    code, text, _ = call("rate", "--config", str(cfg), "--point", "0", "--out", str(target))
    assert code == 0 and text == ""
    rows = list(csv.reader(target.open()))
    assert float(rows[1][-1]) == pytest.approx(0.693147180560, abs=1e-9)


def test_config_rejects_unknown_key(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"catalog": "siegel_shear", "colour": "red"}))
    assert call("classify", "--config", str(cfg))[0] == 2


def test_convention_flag_halves_distances():
    a = call("sigma-formula", "--theta", "0", "--lam", "2", "--m", "1", "--format", "plain")[1]
    b = call("sigma-formula", "--theta", "0", "--lam", "2", "--m", "1", "--format", "plain",
             "--convention", "arctanh")[1]
    assert "0.69314718056" in a
    assert "0.34657359028" in b


def test_catalog_list_and_show():
    code, text, _ = call("catalog", "list")
    assert code == 0 and "siegel_shear" in text
    code, text, _ = call("catalog", "show", "disc_hyperbolic", "--params", '{"lam": 2}', "--format", "structured")
    doc = json.loads(text)
    assert doc["truth"]["brfp_dilation"]["value"] == 2


def test_other_commands_run():
    assert call("orbit", "--catalog", "siegel_shear", "--point", "(i,0)", "--n-max", "3")[0] == 0
    assert call("dw", "--catalog", "disc_hyperbolic", "--start", "0")[0] == 0
    assert call("dilation", "--catalog", "siegel_shear", "--zeta", "(-1,0)", "--radial", "12")[0] == 0
    assert call("tangent", "--catalog", "siegel_shear", "--point", "(i,0)", "--dir", "(1,0)")[0] == 0


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "orbitlab", "catalog", "list"], capture_output=True, text=True)
    assert res.returncode == 0
    assert "disc_rotation" in res.stdout
