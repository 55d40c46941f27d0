import csv

from click.testing import CliRunner

from cdsnet import builtin_scenario, serialize_scenario
from cdsnet.cli import main


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_catalog_lists_all_scenarios():
    result = CliRunner().invoke(main, ["catalog"])
    assert result.exit_code == 0
    names = result.output.split()
    assert len(names) == 16
    assert "S0" in names and "S~10" in names


def test_run_writes_raw_and_density_products(tmp_path):
    result = CliRunner().invoke(main, [
        "run", "--scenario", "S0", "--xi0-points", "101", "--bins", "50",
        "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    raw = read_csv(tmp_path / "S0_raw.csv")
    assert raw[0] == ["xi0", "L", "m"]
    assert len(raw) == 102
    for var in ("L", "m"):
        rows = read_csv(tmp_path / f"S0_density_{var}.csv")
        assert rows[0] == ["bin_center", "density"]
        assert len(rows) == 51
    assert "mean_m=" in result.output


def test_run_accepts_config_file(tmp_path):
    config = tmp_path / "scenario.json"
    config.write_text(serialize_scenario(builtin_scenario("S9")))
    result = CliRunner().invoke(main, [
        "run", "--config", str(config), "--xi0-points", "51", "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    assert (tmp_path / "S9_raw.csv").exists()


def test_run_requires_exactly_one_source(tmp_path):
    assert CliRunner().invoke(main, ["run"]).exit_code != 0
    config = tmp_path / "s.json"
    config.write_text(serialize_scenario(builtin_scenario("S0")))
    result = CliRunner().invoke(main, [
        "run", "--scenario", "S0", "--config", str(config)])
    assert result.exit_code != 0


def test_sweep_hedge_product(tmp_path):
    out = tmp_path / "sweep.csv"
    result = CliRunner().invoke(main, [
        "sweep-hedge", "--from", "0", "--to", "1", "--steps", "3",
        "--seller", "B", "--xi0-points", "101", "--out", str(out)])
    assert result.exit_code == 0, result.output
    rows = read_csv(out)
    assert rows[0] == ["f_h", "mean_m", "far_99", "var_99"]
    assert len(rows) == 4
    assert [float(r[0]) for r in rows[1:]] == [0.0, 0.5, 1.0]


def test_validate_small_scale_passes():
    result = CliRunner().invoke(main, [
        "validate", "--scenario", "S0", "--nodes", "4000,400,400",
        "--connectivity", "8", "--replicas", "6", "--seed", "3", "--xi0", "0"])
    assert result.exit_code == 0, result.output
    assert "validation passed" in result.output


def test_validate_rejects_bad_nodes():
    result = CliRunner().invoke(main, ["validate", "--nodes", "1,2"])
    assert result.exit_code != 0
