import csv
import io
import json
import math

import numpy as np
import pytest

from cavitykitaev.cli import main, parse_config, run
from cavitykitaev.cli.emit import RunReport, normalize, to_csv, to_json
from cavitykitaev.errors import ConfigError, InconsistentFrequenciesError, SerializationError


@pytest.fixture
def table1_text(table1_config):
    return table1_config.read_text()


def write(tmp_path, text, name="run.toml"):
    path = tmp_path / name
    path.write_text(text)
    return path


def invoke(tmp_path, workflow, config, fmt="json", *extra):
    out = tmp_path / "out"
    code = main([workflow, "--config", str(config), "--format", fmt, "--out", str(out), *extra])
    return code, out / f"{workflow}.{fmt}"


# config ---------------------------------------------------------------------


def test_example_config_parses(table1_config):
    cfg = parse_config(table1_config, workflow="audit")
    assert cfg.params is not None and cfg.numerics["n_max"] == 2
    assert len(cfg.input_hash) == 64


def test_non_positive_omega_ba_names_the_key(tmp_path, table1_text):
    bad = write(tmp_path, table1_text.replace("omega_ba = 100.0", "omega_ba = 0.0"))
    with pytest.raises(ConfigError, match=r"\[atom\]\.omega_ba"):
        parse_config(bad)


def test_strict_mode_rejects_unknown_keys(tmp_path, table1_text):
    bad = write(tmp_path, table1_text.replace("[lattice]\n", "[lattice]\nL3 = 4\n"))
    with pytest.raises(ConfigError, match=r"\[lattice\]\.L3"):
        parse_config(bad)
    assert parse_config(bad, strict=False).sections["lattice"]["L3"] == 4


def test_raw_frequencies_must_satisfy_the_double_resonance(tmp_path, table1_text):
    raw = table1_text.replace('mode = "solve"             # "solve": nu1', 'mode = "raw"\nnu1 = 951.0  #')
    with pytest.raises(InconsistentFrequenciesError):
        parse_config(write(tmp_path, raw))
    ok = table1_text.replace('mode = "solve"             # "solve": nu1', 'mode = "raw"\nnu1 = 950.0  #')
    assert parse_config(write(tmp_path, ok, "ok.toml")).params.nu1 == 950.0


def test_derived_frequency_cannot_be_given_in_solve_mode(tmp_path, table1_text):
    bad = write(tmp_path, table1_text.replace("nu2 = 750.0", "nu2 = 750.0\nnu1 = 950.0"))
    with pytest.raises(ConfigError, match=r"\[drive\]\.nu1"):
        parse_config(bad)


def test_non_numeric_value_rejected(tmp_path, table1_text):
    bad = write(tmp_path, table1_text.replace("Omega_b2 = 0.1", 'Omega_b2 = "0.1"'))
    with pytest.raises(ConfigError, match=r"\[drive\]\.Omega_b2"):
        parse_config(bad)


def test_workflow_specific_requirements(tmp_path):
    cfg = write(tmp_path, "[kitaev]\nJ_z = 1.0\n")
    with pytest.raises(ConfigError, match="lattice"):
        parse_config(cfg, workflow="kitaev-ed")
    with pytest.raises(ConfigError):
        parse_config(cfg, workflow="audit")


# serialisation --------------------------------------------------------------


def test_normalize_rounds_and_handles_infinities():
    assert normalize(1 / 3) == 0.333333333333
    assert normalize([math.inf, -math.inf]) == ["inf", "-inf"]
    assert normalize(np.array([1, 2])) == [1, 2]
    assert normalize({"z": np.bool_(True)}) == {"z": True}


def test_nan_is_a_serialization_error():
    with pytest.raises(SerializationError, match="results.x"):
        to_json(RunReport("w", "h", {"x": math.nan}))


def test_empty_table_gives_header_only_csv():
    text = to_csv(RunReport("w", "h", {}, table=[], columns=["a", "b"]))
    assert text == "a,b\n"


def test_key_value_csv_flattens_results():
    text = to_csv(RunReport("w", "h", {"b": {"y": 2, "x": 1.5}, "a": True}))
    assert list(csv.reader(io.StringIO(text))) == [["key", "value"], ["a", "true"], ["b.x", "1.5"], ["b.y", "2"]]


# workflows ------------------------------------------------------------------


def test_audit_of_example_config_passes(tmp_path, table1_config):
    code, path = invoke(tmp_path, "audit", table1_config)
    assert code == 0
    doc = json.loads(path.read_text())
    assert doc["results"]["verdict"] is True
    assert doc["results"]["table"] == 1
    assert all(row["satisfied"] for row in doc["conditions"])


def test_runs_are_byte_identical(tmp_path, table1_config):
    outs = []
    for fmt in ("json", "csv"):
        for run_dir in ("a", "b"):
            code, path = invoke(tmp_path / run_dir, "effective", table1_config, fmt)
            assert code == 0
            outs.append(path.read_bytes())
    assert outs[0] == outs[1] and outs[2] == outs[3]


def test_effective_reports_kitaev_couplings(table1_config):
    report = run("effective", parse_config(table1_config))
    kc = report.results["kitaev"]
    assert kc["J_x"] > 0 and kc["J_y"] > 0 and kc["J_z"] > 0
    assert report.results["verdict"]


def test_phase_scan_has_one_transition(tmp_path, table1_config):
    code, path = invoke(tmp_path, "phase-scan", table1_config, "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(path.read_text())))
    assert len(rows) == 29
    labels = [r["classification"] for r in rows]
    assert labels[0] == "gapless" and labels[-1] == "gapped"
    assert sum(a != b for a, b in zip(labels, labels[1:])) == 1


def test_phase_scan_oracle_refuses_a_field(tmp_path, table1_text):
    cfg = write(tmp_path, table1_text.replace("B = 0.0", "B = 0.1"))
    code, _ = invoke(tmp_path, "phase-scan", cfg)
    assert code == 1


def test_kitaev_ed_from_couplings(tmp_path):
    cfg = write(tmp_path, '[lattice]\nL1 = 2\nL2 = 2\n[kitaev]\nsource = "couplings"\nJ_z = 1.0\n')
    code, path = invoke(tmp_path, "kitaev-ed", cfg)
    assert code == 0
    res = json.loads(path.read_text())["results"]
    assert res["E0"] == -4.0 and res["gap"] == 2.0
    assert res["classification"] == "gapped"
    assert max(res["plaquette_commutator_norms"]) == 0.0


def test_validate_bond_without_tunnelling_gives_zero_coupling(tmp_path, table1_text):
    text = table1_text.replace("scale_ratios = [20.0, 40.0, 80.0]\n", "")
    text = text.replace('bonds = ["z", "x"]', 'bonds = ["z"]')
    text = text.replace("g_b = -1.0\nt = 0.0005", "g_b = -1.0\nt = 0.0")
    report = run("validate-bond", parse_config(write(tmp_path, text)))
    (row,) = report.results["rows"]
    assert row["bond"] == "z" and abs(row["J_extracted"]) < 1e-12 and row["J_analytic"] == 0.0


def test_feasibility_preset(tmp_path):
    cfg = write(tmp_path, '[feasibility]\npreset = "toroidal"\n')
    report = run("feasibility", parse_config(cfg, workflow="feasibility"))
    assert report.results["report"]["cooperativity"] == pytest.approx(1e7, rel=1e-12)


def test_feasibility_from_parameters_needs_decay(tmp_path, table1_text):
    cut = table1_text.index("[decay]")
    text = table1_text[:cut] + table1_text[table1_text.index("[validate_bond]"):]
    with pytest.raises(ConfigError, match="decay"):
        run("feasibility", parse_config(write(tmp_path, text)))


def test_exit_codes(tmp_path, table1_text, capsys):
    bad = write(tmp_path, table1_text.replace("omega_ba = 100.0", "omega_ba = -5.0"))
    code, _ = invoke(tmp_path, "audit", bad)
    assert code == 2
    assert "[atom].omega_ba" in capsys.readouterr().err
    code, _ = invoke(tmp_path, "audit", tmp_path / "absent.toml")
    assert code == 2
    assert main(["audit", "--config", str(bad), "--threads", "0"]) == 2
