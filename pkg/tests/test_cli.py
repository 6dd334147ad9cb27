import io
import json
import math
from pathlib import Path

import pytest

from samrot import cli
from samrot.errors import StepFailure
from samrot.series import Series

REFERENCE = Path(__file__).resolve().parents[1] / "configs" / "reference_j10.json"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_params_axisymmetric():
    code, out, _ = run("params", "--inertia", "2,2,3")
    d = json.loads(out)
    assert code == 0
    assert d["beta"] == 0 and d["omega"] == 1


def test_params_rejects_unordered():
    code, _, err = run("params", "--inertia", "3,2,1")
    assert code == 1 and "error" in err


def test_usage_error_exit_code():
    code, _, err = run("frobnicate")
    assert code == 1 and err
    code, _, _ = run("params")
    assert code == 1


def test_series_output(tmp_path):
    path = tmp_path / "s.json"
    code, _, _ = run("series", "--inertia", "1,2,3", "--order", "2", "--out", str(path))
    assert code == 0
    d = json.loads(path.read_text())
    p = [Series.from_json(x) for x in d["p"]]
    assert p[1] == Series.constant(1)
    # the engine carries the unit factor -i on p_2; magnitude beta^2/2
    (term,) = d["p"][2]["terms"]
    assert term["exp"]["beta"] == 2
    assert term["coeff"] == {"re": "0/1", "im": "-1/2"}
    assert d["published"]["p"][2]["ratio"] == {"re": "0/1", "im": "-1/1"}
    assert set(d) >= {"K", "S", "p", "s", "direct", "inverse"}


def test_series_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run("series", "--inertia", "1,2,3", "--order", "3", "--out", str(a))
    run("series", "--inertia", "1,2,3", "--order", "3", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_compare_reference_config():
    code, out, _ = run("compare", "--config", str(REFERENCE), "--order", "3")
    assert code == 0
    d = json.loads(out)
    assert max(d["max_abs_err"]["x"], d["max_abs_err"]["X"]) < 1e-4
    assert d["order"] == 3


def test_compare_is_deterministic():
    assert run("compare", "--config", str(REFERENCE), "--order", "1")[1] == \
        run("compare", "--config", str(REFERENCE), "--order", "1")[1]


def test_propagate_and_oracle_csv(tmp_path):
    for cmd, extra in (("propagate", ["--order", "2"]), ("oracle", ["--tol", "1e-10"])):
        path = tmp_path / f"{cmd}.csv"
        code, _, _ = run(cmd, "--config", str(REFERENCE), *extra, "--out", str(path))
        assert code == 0
        lines = path.read_text().splitlines()
        assert lines[0] == "t,x,X,y,Y,H"
        assert len(lines) == 402
        t_end = float(lines[-1].split(",")[0])
        assert t_end == pytest.approx(2 * math.pi)


def test_gravgrad_output():
    code, out, _ = run("gravgrad", "--config", str(REFERENCE))
    assert code == 0
    d = json.loads(out)
    assert set(d) == {"D", "D_avg", "S_paper", "S_engine", "residual_paper", "residual_engine", "ratio"}
    assert d["ratio"]["re"] == pytest.approx(-0.375)
    assert d["residual_engine"] < 1e-10 * abs(d["D"])


def test_gravgrad_requires_orbit(tmp_path):
    cfg = json.loads(REFERENCE.read_text())
    del cfg["orbit"]
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    assert run("gravgrad", "--config", str(path))[0] == 1


@pytest.mark.parametrize("mutate", [
    lambda c: c.update(order=0),
    lambda c: c["grid"].update(dt=0.0),
    lambda c: c["andoyer"].update(N=2.0),
    lambda c: c.update(inertia=[3, 2, 1]),
    lambda c: c.pop("andoyer"),
])
def test_config_validation(tmp_path, mutate):
    cfg = json.loads(REFERENCE.read_text())
    mutate(cfg)
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    assert run("compare", "--config", str(path))[0] == 1


def test_missing_config_file(tmp_path):
    assert run("oracle", "--config", str(tmp_path / "nope.json"))[0] == 1


def test_numerical_failure_exit_code(monkeypatch):
    def boom(*args, **kwargs):
        raise StepFailure("step size underflow")
    monkeypatch.setattr(cli.oracle, "integrate", boom)
    code, _, err = run("oracle", "--config", str(REFERENCE))
    assert code == 2 and "numerical" in err


def test_check_quick():
    code, out, _ = run("check", "--quick")
    assert code == 0
    assert "FAIL" not in out


def test_canonical_json_floats():
    text = cli.dumps({"b": 0.1, "a": [1, 2.0, complex(0.5, -1)]})
    assert text.index('"a"') < text.index('"b"')
    assert "0.10000000000000001" in text
    assert json.loads(text)["a"][2] == {"im": -1.0, "re": 0.5}
