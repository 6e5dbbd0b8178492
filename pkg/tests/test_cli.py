import csv
import io
import json
from fractions import Fraction

import pytest

from bkspair import cli
from bkspair.suites import a1_closed_form


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_rootsys_info_g2(capsys):
    code, out, _ = run(capsys, "rootsys", "info", "--type", "G", "--rank", "2")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["results"]["positive_roots"]) == 6
    assert ["3/1", "2/1"] in doc["results"]["positive_roots"]
    assert doc["version"] and doc["digest"]


def test_rootsys_info_a1_gram(capsys):
    code, out, _ = run(capsys, "rootsys", "info", "--type", "A1")
    assert code == 0
    gram = json.loads(out)["results"]["gram"]
    assert [[Fraction(x) for x in row] for row in gram] == [[2]]


def test_invalid_type_exit_2(capsys):
    code, _, err = run(capsys, "rootsys", "info", "--type", "Z", "--rank", "9")
    assert code == cli.EXIT_VALIDATION
    assert "valid types" in err


def test_weyl_enumerate_and_cache(capsys, tmp_path):
    args = ["weyl", "enumerate", "--type", "F4", "--cache-dir", str(tmp_path)]
    code, out1, _ = run(capsys, *args)
    assert code == 0
    doc1 = json.loads(out1)
    assert doc1["results"]["order"] == 1152
    assert sum(doc1["results"]["length_histogram"]) == 1152
    assert doc1["meta"]["cache_hit"] is False
    cache = next(tmp_path.iterdir()).read_bytes()
    code, out2, _ = run(capsys, *args)
    doc2 = json.loads(out2)
    assert doc2["meta"]["cache_hit"] is True
    assert doc2["digest"] == doc1["digest"]
    assert next(tmp_path.iterdir()).read_bytes() == cache


def test_e8_cap_exit_4(capsys):
    code, _, err = run(capsys, "weyl", "enumerate", "--type", "E8")
    assert code == cli.EXIT_RESOURCE
    assert "max-weyl" in err


def test_cache_env_var(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("BKS_CACHE_DIR", str(tmp_path / "envcache"))
    run(capsys, "weyl", "enumerate", "--type", "A2")
    assert any((tmp_path / "envcache").iterdir())


def test_pairing_a1_matches_closed_form(capsys):
    code, out, _ = run(capsys, "pairing", "--type", "A1", "--k", "3", "--beta", "1/6", "--beta-prime", "1/3")
    assert code == 0
    res = json.loads(out)["results"]
    total = complex(res["total"]["re"], res["total"]["im"])
    assert abs(total - a1_closed_form(3, 1, 2)) <= 1e-12
    assert len(res["weyl_terms"]) == 2
    assert res["constant_sq"] == "1/2"


def test_pairing_lam_coordinates(capsys):
    _, out1, _ = run(capsys, "pairing", "--type", "A2", "--k", "4", "--lam", "1,2", "--lam-prime", "1,1")
    _, out2, _ = run(capsys, "pairing", "--type", "A2", "--k", "4", "--beta", "1/3,5/12",
                     "--beta-prime", "1/4,1/4")
    assert json.loads(out1)["results"]["total"] == json.loads(out2)["results"]["total"]


def test_pairing_table_rows(capsys):
    code, out, _ = run(capsys, "pairing", "--type", "A2", "--k", "5", "--table", "--no-terms")
    assert code == 0
    doc = json.loads(out)
    assert doc["results"]["count"] == 36 == len(doc["results"]["rows"])
    code, out, _ = run(capsys, "pairing", "--type", "A2", "--k", "5", "--table", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == cli.CSV_COLUMNS and len(rows) == 37


def test_pairing_phase_k(capsys):
    base = ["pairing", "--type", "A1", "--k", "3", "--beta", "1/6", "--beta-prime", "1/3"]
    _, out0, _ = run(capsys, *base)
    _, out1, _ = run(capsys, *base, "--phase-k")
    t0 = json.loads(out0)["results"]["weyl_terms"]
    t1 = json.loads(out1)["results"]["weyl_terms"]
    import cmath
    import math

    for a, b in zip(t0, t1):
        e = 3 * Fraction(a["norm_sq"])
        want = cmath.exp(2j * math.pi * float(e % 1))
        assert abs(complex(b["phase"]["re"], b["phase"]["im"]) - want) <= 1e-15


def test_pairing_errors(capsys):
    assert run(capsys, "pairing", "--type", "A2", "--k", "4", "--beta", "1/2,1/2",
               "--beta-prime", "1/4,1/4")[0] == 2
    assert run(capsys, "pairing", "--type", "A2", "--k", "4")[0] == 2
    assert run(capsys, "pairing", "--type", "A2", "--k", "4", "--beta", "x", "--beta-prime", "1")[0] == 2
    assert run(capsys, "pairing", "--type", "A2", "--k", "0", "--table")[0] == 2
    assert run(capsys, "rootsys", "info", "--type", "A2", "--format", "csv")[0] == 2


def test_verify_trials_zero(capsys):
    assert run(capsys, "verify", "--trials", "0")[0] == cli.EXIT_VALIDATION


def test_verify_densities(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "densities", "--trials", "20", "--seed", "42")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["checks"]) == 4 and all(c["passed"] for c in doc["checks"])


def test_verify_failure_exit_3(capsys, monkeypatch):
    from bkspair import suites

    def broken(seed, trials):
        return [suites.CheckResult("always fails", False, 1, 1.0, {"trial": 0})]

    monkeypatch.setattr(cli, "run_suite", lambda name, seed, trials: broken(seed, trials))
    code, out, err = run(capsys, "verify", "--suite", "signs")
    assert code == cli.EXIT_CHECK_FAILED
    assert json.loads(out)["checks"][0]["failure"] == {"trial": 0}
    assert "always fails" in err


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# test config\ntype = A\nrank = 3\nk = 5\n")
    code, out, _ = run(capsys, "rootsys", "info", "--config", str(cfg))
    assert json.loads(out)["results"]["type"] == "A3"
    code, out, _ = run(capsys, "rootsys", "info", "--config", str(cfg), "--rank", "2")
    assert json.loads(out)["results"]["type"] == "A2"
    cfg.write_text("colour = blue\n")
    assert run(capsys, "rootsys", "info", "--config", str(cfg))[0] == 2
    assert run(capsys, "rootsys", "info", "--config", str(tmp_path / "missing"))[0] == 2


def test_float_serialization():
    assert cli.dumps(0.1) == "0.10000000000000001"
    assert cli.dumps(1.0) == "1.0"
    assert cli.dumps({"b": [1, 2.5], "a": None}, indent=None) == '{"a": null,"b": [1,2.5]}'
    assert json.loads(cli.dumps({"x": 1 / 3})) == {"x": 1 / 3}
    assert cli.to_jsonable({"q": Fraction(3), "z": 1 + 2j}) == {"q": "3/1", "z": {"re": 1.0, "im": 2.0}}


def test_output_file(capsys, tmp_path):
    path = tmp_path / "r.json"
    assert cli.main(["rootsys", "info", "--type", "A1", "-o", str(path)]) == 0
    assert json.loads(path.read_text())["results"]["m"] == 1


def test_recorded_command_drops_storage_flags():
    argv = ["verify", "-o", "a.json", "--cache-dir=/x", "--seed", "1", "--output", "b"]
    assert cli.recorded_command(argv) == ["verify", "--seed", "1"]
