"""Tests for the table formats, config parsing and the CLI surface."""

import json

import pytest

from specprod.cli import main
from specprod.config import RunConfig, parse_config
from specprod.errors import InputError
from specprod.tables import OutputTable, emit, format_number, read_table


def test_format_number_significant_digits():
    assert format_number(0.5) == "0.5"
    assert format_number(1.0 / 3.0) == "0.333333333333"
    assert format_number(12345) == "12345"
    assert format_number(1.23456789012345e-7) == "1.23456789012e-07"


def test_empty_table_is_header_only_csv(tmp_path):
    path = tmp_path / "empty.csv"
    emit(OutputTable(columns=["a", "b"]), str(path))
    assert path.read_text() == "a,b\n"


def test_row_length_validation():
    with pytest.raises(InputError):
        OutputTable(columns=["a", "b"], rows=[[1.0]])


def test_csv_round_trip_is_identity_on_normalized_values(tmp_path):
    table = OutputTable(columns=["eps", "trace"],
                        rows=[[0.001, 3.45387764], [0.0001, 4.60517019]],
                        metadata={"note": "round-trip"}).normalized()
    path = tmp_path / "t.csv"
    emit(table, str(path), "csv")
    back = read_table(str(path))
    assert back.columns == table.columns
    assert back.rows == table.rows
    assert back.metadata == table.metadata


def test_json_round_trip(tmp_path):
    table = OutputTable(columns=["f", "value"], rows=[["t^1", 0.25]],
                        metadata={"seed": 7}).normalized()
    path = tmp_path / "t.json"
    emit(table, str(path), "json")
    back = read_table(str(path))
    assert back.columns == table.columns
    assert back.rows == table.rows
    assert back.metadata == table.metadata


def test_emit_then_parse_then_emit_is_fixed_point(tmp_path):
    table = OutputTable(columns=["x"], rows=[[1.0 / 3.0], [2.0 / 7.0]])
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    emit(table, str(p1))
    emit(read_table(str(p1)), str(p2))
    assert p1.read_text() == p2.read_text()


def test_config_defaults_gamma_moments():
    cfg = parse_config("gamma-moments")
    assert cfg.delta == 1.0
    assert cfg.eps_list[0] == 1e-3 and cfg.eps_list[-1] == 1e-8
    assert cfg.f_list == ["t^1", "t^2", "t^3"]


def test_config_unknown_keys_listed(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"epz_list": [0.1], "bogus": 1}))
    with pytest.raises(InputError) as err:
        parse_config("gamma-moments", str(path))
    assert "bogus" in str(err.value) and "epz_list" in str(err.value)


def test_config_decreasing_eps_named(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"eps_list": [0.1, 0.2]}))
    with pytest.raises(InputError, match="eps_list"):
        parse_config("gamma-moments", str(path))


def test_config_functionals_validated(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"f_list": ["t^2", "nonsense"]}))
    with pytest.raises(InputError, match="nonsense"):
        parse_config("schrodinger-sweep", str(path))


def test_config_echo_round_trips_byte_identically(tmp_path):
    cfg = parse_config("schrodinger-sweep", overrides={"output_path": "x.csv"})
    echo = cfg.canonical_json()
    rebuilt = RunConfig(**json.loads(echo))
    assert rebuilt.canonical_json() == echo


def test_cli_rejects_bad_config(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"eps_list": []}))
    code = main(["gamma-moments", "--config", str(path),
                 "--out", str(tmp_path / "o.csv")])
    assert code == 2
    assert "eps_list" in capsys.readouterr().err


def test_cli_gamma_moments_schema_and_determinism(tmp_path):
    cfgfile = tmp_path / "c.json"
    cfgfile.write_text(json.dumps({"eps_list": [1e-2, 1e-3], "f_list": ["t^1"]}))
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["gamma-moments", "--config", str(cfgfile), "--out", str(out1)]) == 0
    assert main(["gamma-moments", "--config", str(cfgfile), "--out", str(out2)]) == 0
    table = read_table(str(out1))
    assert table.columns == ["eps", "delta", "q", "trace", "trace_over_ln",
                             "predicted_constant"]
    assert len(table.rows) == 2

    def strip_wall_time(path):
        lines = path.read_text().splitlines()
        out = []
        for ln in lines:
            if ln.startswith("# metadata: "):
                meta = json.loads(ln[len("# metadata: "):])
                meta.pop("wall_time_s", None)
                ln = "# metadata: " + json.dumps(meta, sort_keys=True)
            out.append(ln)
        return "\n".join(out)

    assert strip_wall_time(out1) == strip_wall_time(out2)


def test_cli_gamma_moments_rejects_non_power_functional(tmp_path, capsys):
    cfgfile = tmp_path / "c.json"
    cfgfile.write_text(json.dumps({"eps_list": [1e-2, 1e-3], "f_list": ["log1m"]}))
    code = main(["gamma-moments", "--config", str(cfgfile),
                 "--out", str(tmp_path / "o.csv")])
    assert code == 2


def test_cli_scattering_table(tmp_path):
    cfgfile = tmp_path / "c.json"
    cfgfile.write_text(json.dumps({"energies": [0.5, 1.0],
                                   "potential": {"kind": "square_well",
                                                 "depth": 2.0, "half_width": 1.0}}))
    out = tmp_path / "s.csv"
    assert main(["scattering-table", "--config", str(cfgfile),
                 "--out", str(out)]) == 0
    table = read_table(str(out))
    assert table.columns[:5] == ["lambda", "theta1", "theta2", "a1", "a2"]
    assert len(table.rows) == 2
    meta = table.metadata
    assert "config" in meta and "version" in meta and "wall_time_s" in meta


def test_cli_schrodinger_sweep_small(tmp_path):
    cfgfile = tmp_path / "c.json"
    cfgfile.write_text(json.dumps({
        "grid": {"half_length": 10.0, "n_points": 200},
        "potential": {"kind": "square_well", "depth": 2.0, "half_width": 1.0},
        "eps_list": [0.4, 0.3, 0.2],
        "f_list": ["t^1"],
    }))
    out = tmp_path / "sweep.json"
    assert main(["schrodinger-sweep", "--config", str(cfgfile),
                 "--out", str(out), "--format", "json"]) == 0
    table = read_table(str(out))
    assert table.columns == ["f", "eps", "abs_ln_eps", "value"]
    assert len(table.rows) == 3
    assert "regressions" in table.metadata
    echoed = json.loads(table.metadata["config"])
    assert echoed["eps_list"] == [0.4, 0.3, 0.2]


def test_cli_config_command_mismatch(tmp_path, capsys):
    cfgfile = tmp_path / "c.json"
    cfgfile.write_text(json.dumps({"command": "logdet"}))
    assert main(["gamma-moments", "--config", str(cfgfile),
                 "--out", str(tmp_path / "o.csv")]) == 2
