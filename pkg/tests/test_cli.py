import csv
import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dopo.cli import EXIT_CONFIG, EXIT_OK, load_seeds, main, parse_sigmas, validate
from dopo.errors import ConfigError
from dopo.observables import WignerGrid


def read_csv(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def test_parse_sigmas():
    assert parse_sigmas("1") == (1.0,)
    assert parse_sigmas("0.5,1") == (0.5, 1.0)
    assert parse_sigmas("0:0.5:2") == (0.0, 0.5, 1.0, 1.5, 2.0)
    with pytest.raises(ConfigError):
        parse_sigmas("a,b")


def test_validate_resolves_eps():
    cfg = validate({"mode": "steady", "chi": 0.5, "eps_p": 3.0, "methods": "meanfield"})
    assert_allclose(cfg.params.sigma, 1.5)
    assert cfg.params.gamma_s == 1.0


@pytest.mark.parametrize("raw, fragment", [
    ({"mode": "steady", "chi": 1, "sigma": "1"}, "missing method"),
    ({"mode": "steady", "chi": 1, "sigma": "1", "eps_p": 2, "methods": "cmop"}, "contradicts"),
    ({"mode": "steady", "chi": 1, "methods": "cmop"}, "sigma"),
    ({"mode": "steady", "chi": 1, "sigma": "1", "methods": "magic"}, "unknown methods"),
    ({"mode": "steady", "chi": 1, "sigma": "1", "methods": "full", "dp": 20, "ds": 60},
     "--allow-large"),
    ({"mode": "compare", "chi": 1, "sigma": "1", "methods": "cmop"}, "at least two"),
    ({"mode": "steady", "sigma": "1", "methods": "cmop"}, "--chi"),
])
def test_validate_errors(raw, fragment):
    with pytest.raises(ConfigError, match=fragment):
        validate(raw)


def test_full_cap_lifted():
    cfg = validate({"mode": "steady", "chi": 1, "sigma": "1", "methods": "full", "dp": 20,
                    "ds": 60, "allow_large": True})
    assert cfg.allow_large


def test_config_error_exit_code(capsys):
    assert main(["steady", "--chi", "1", "--sigma", "1"]) == EXIT_CONFIG
    assert "missing method" in capsys.readouterr().err


def test_steady_csv_output(capsys):
    rc = main(["steady", "--chi", "1", "--sigma", "0.5", "--method", "cmop,meanfield",
               "--ds", "16"])
    assert rc == EXIT_OK
    out = capsys.readouterr().out
    assert "# chi=1" in out and "# run: timestamp=" in out
    rows = read_csv(out)
    assert [r["method"] for r in rows] == ["cmop", "meanfield"]
    assert float(rows[0]["photon_number"]) > 0


def test_ini_config_with_override(tmp_path, capsys):
    ini = tmp_path / "run.ini"
    ini.write_text("[dopo]\nchi = 1\nsigma = 0.5\nmethod = meanfield\ngamma-p = 2\n")
    assert main(["steady", "--config", str(ini), "--sigma", "0.3", "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["metadata"]["gamma_p"] == 2.0
    assert data["rows"][0]["sigma"] == pytest.approx(0.3)


def test_unknown_ini_key(tmp_path):
    ini = tmp_path / "bad.ini"
    ini.write_text("[dopo]\nbogus = 1\n")
    assert main(["steady", "--config", str(ini)]) == EXIT_CONFIG


def test_sweep_parallel_matches_serial(tmp_path):
    base = ["sweep", "--chi", "1", "--sigma", "0.2:0.2:0.6", "--method", "meanfield,gsa-cmop"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(base + ["--out", str(a), "--jobs", "1"]) == 0
    assert main(base + ["--out", str(b), "--jobs", "2"]) == 0
    ra, rb = read_csv(a.read_text()), read_csv(b.read_text())
    assert [r["sigma"] for r in ra] == ["0.2", "0.4", "0.6"]
    assert ra == rb
    assert "reldiff_gsa-cmop_vs_meanfield_photon_number" in ra[0]


def test_compare_reldiff(capsys):
    assert main(["compare", "--chi", "1", "--sigma", "0.5", "--method", "full,cmop",
                 "--dp", "5", "--ds", "16"]) == 0
    rows = read_csv(capsys.readouterr().out)
    assert float(rows[0]["reldiff_photon_number"]) == 0
    assert float(rows[1]["reldiff_photon_number"]) < 0.02


def test_seed_from_round_trip(tmp_path):
    out = tmp_path / "s.json"
    assert main(["steady", "--chi", "1", "--sigma", "0.8", "--method", "cmop", "--ds", "16",
                 "--format", "json", "--out", str(out)]) == 0
    seeds = load_seeds(out)
    assert 0.8 in seeds
    out2 = tmp_path / "s2.json"
    assert main(["steady", "--chi", "1", "--sigma", "0.85", "--method", "cmop", "--ds", "16",
                 "--format", "json", "--out", str(out2), "--seed-from", str(out)]) == 0


def test_dynamics_output(capsys):
    assert main(["dynamics", "--chi", "1", "--sigma", "0.5", "--method", "meanfield,gsa-full",
                 "--tmax", "2", "--nt", "5"]) == 0
    rows = read_csv(capsys.readouterr().out)
    assert len(rows) == 5
    assert_allclose(float(rows[-1]["meanfield_photon_number"]),
                    float(rows[-1]["gsa-full_photon_number"]), rtol=1e-7)


def test_wigner_binary(tmp_path):
    path = tmp_path / "w.bin"
    assert main(["wigner", "--chi", "0.1", "--sigma", "2", "--method", "gsa-full", "--format",
                 "bin", "--out", str(path), "--points", "61"]) == 0
    grid = WignerGrid.from_binary(path)
    assert grid.values.shape == (61, 61)
    assert len(grid.local_maxima()) == 2


def test_std_lin_threshold_reported_as_divergent(capsys):
    assert main(["steady", "--chi", "1", "--sigma", "1", "--method", "std-lin"]) == 0
    rows = read_csv(capsys.readouterr().out)
    assert rows[0]["photon_number"] == "inf" and rows[0]["branches"] == "diverged"
