import json
import math

import pytest

from saddlenode.cli import EXIT_INVALID, EXIT_NUMERIC, EXIT_OK, run

SMALL = ["--radius", "2", "--circle-points", "400"]


def _run_json(tmp_path, argv, name="out.json"):
    out = tmp_path / name
    assert run(argv + ["--output", str(out)]) == EXIT_OK
    return json.loads(out.read_text()), out


def _write(tmp_path, doc, name="in.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return str(p)


def test_model_coeffs_flags(tmp_path):
    doc, _ = _run_json(tmp_path, ["model-coeffs", "--k", "1", "--mu", "0", "0", "--m", "2", "--n", "1"])
    re, im = doc["coefficients"][0]["c"]
    assert abs(re) < 1e-14 and im == pytest.approx(2 * math.pi, rel=1e-14)
    assert doc["parameters"]["mu"] == [0.0, 0.0]


def test_model_coeffs_from_terms(tmp_path):
    src = _write(tmp_path, {"k": 1, "mu": [0, 0], "terms": [[2, 1], [1, 1, 0]]})
    doc, _ = _run_json(tmp_path, ["model-coeffs", "--input", src])
    assert [row["c"][1] for row in doc["coefficients"]] == pytest.approx([2 * math.pi, -2 * math.pi])


def test_modulus_output_and_echo(tmp_path):
    src = _write(tmp_path, {"k": 1, "mu": [0, 0], "R": [[0, 1, 1, 0]]})
    doc, _ = _run_json(tmp_path, ["modulus", "--input", src, "--degree", "3"] + SMALL)
    p = doc["parameters"]
    for key in ("radius", "beta", "step", "eps_min", "circle_radius", "circle_points", "degree", "y_floor", "tail_tol"):
        assert p[key] is not None
    assert p["radius"] == 2.0 and p["circle_points"] == 400 and p["degree"] == 3
    row = doc["orbital"]["0"]
    got = [complex(*z) for z in row]
    ref = [-((2j * math.pi) ** n) / n for n in (1, 2, 3)]
    for g, r in zip(got, ref):
        assert abs(g - r) < 1e-4 * abs(r)
    assert set(doc) >= {"parameters", "field", "orbital", "temporal", "c0"}


def test_output_is_deterministic(tmp_path):
    src = _write(tmp_path, {"k": 2, "mu": [0.5, 0], "R": [[0, 1, 0.3, 0], [1, 1, 0, 0.2]]})
    argv = ["modulus", "--input", src, "--degree", "2"] + SMALL
    _, a = _run_json(tmp_path, argv, "a.json")
    _, b = _run_json(tmp_path, argv, "b.json")
    assert a.read_bytes() == b.read_bytes()


def _pairs(values):
    return [[complex(v).real, complex(v).imag] for v in values]


BERNOULLI_MODULUS = {"k": 1, "mu": [0, 0], "orbital": {"0": _pairs(-((2j * math.pi) ** n) / n for n in range(1, 5))}}


def test_integrability_command(tmp_path):
    doc, _ = _run_json(tmp_path, ["integrability", "--input", _write(tmp_path, BERNOULLI_MODULUS)])
    assert doc["verdict"]["integrable_form"] is True
    assert doc["parameters"]["tol"] == 1e-8
    bad = {"k": 1, "mu": [0, 0], "orbital": {"0": _pairs([-2j * math.pi, 2 * math.pi**2 - 2j * math.pi, 59.2 + 78.3j])}}
    doc, _ = _run_json(tmp_path, ["integrability", "--input", _write(tmp_path, bad, "bad.json")], "bad_out.json")
    assert doc["verdict"]["integrable_form"] is False


def test_normal_form_first_block(tmp_path):
    src = _write(tmp_path, {"k": 1, "mu": [0, 0], "orbital": {"0": [[1, 0]]}})
    doc, _ = _run_json(tmp_path, ["normal-form", "--input", src, "--payload-offset", "0"] + SMALL)
    nf = doc["normal_form"]
    assert nf["payload_offset"] == 0
    m, n, re, im = nf["R"][0]
    assert (m, n) == (0, 1)
    assert complex(re, im) == pytest.approx(1j / (2 * math.pi), rel=1e-13)
    assert "field" in nf


def test_holonomy_command(tmp_path):
    src = _write(tmp_path, {"psi": [[1, 0], [0.5, 0]]})
    doc, _ = _run_json(tmp_path, ["holonomy", "--input", src] + SMALL)
    assert doc["mu"] == [0.0, 0.0]
    assert doc["parameters"]["degree"] == 1


def test_roundtrip_command(tmp_path):
    src = _write(tmp_path, {"k": 1, "mu": [0.5, 0], "orbital": {"0": [[0.2, 0], [0, -0.1]]}})
    doc, _ = _run_json(tmp_path, ["roundtrip", "--input", src, "--circle-radius", "0.1", "--circle-points", "1000",
                                  "--radius", "1"])
    assert doc["max_residual"] < 1e-6


def test_invalid_inputs_exit_2(tmp_path, capsys):
    pure_x = _write(tmp_path, {"k": 1, "mu": [0, 0], "R": [[2, 0, 1, 0]]}, "purex.json")
    assert run(["modulus", "--input", pure_x]) == EXIT_INVALID
    assert "R(x, 0) must vanish" in capsys.readouterr().err
    broken = _write(tmp_path, '{"k": 1,\n "mu": [0, 0', "broken.json")
    assert run(["modulus", "--input", broken]) == EXIT_INVALID
    assert "broken.json" in capsys.readouterr().err
    zero_unit = _write(tmp_path, {"k": 1, "mu": [0, 0], "U": [[0, 0, 0, 0]]}, "u0.json")
    assert run(["modulus", "--input", zero_unit]) == EXIT_INVALID
    no_orbital = _write(tmp_path, {"k": 1, "mu": [0, 0]}, "empty.json")
    assert run(["normal-form", "--input", no_orbital]) == EXIT_INVALID
    assert run(["model-coeffs", "--n", "0"]) == EXIT_INVALID


def test_bad_flag_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        run(["modulus", "--input", "x.json", "--radius", "-1"])
    assert exc.value.code == 2


def test_numeric_failure_exit_3(tmp_path, capsys):
    src = _write(tmp_path, {"k": 1, "mu": [0, 0], "R": [[0, 1, 1, 0]]})
    assert run(["modulus", "--input", src, "--eps-min", "0.5", "--degree", "2"] + SMALL) == EXIT_NUMERIC
    err = capsys.readouterr().err
    assert "numeric failure" in err and "sector 0" in err


def test_shipped_inputs_parse(tmp_path):
    doc, _ = _run_json(tmp_path, ["model-coeffs", "--input", "inputs/model_query.json"])
    assert len(doc["coefficients"]) == 3
