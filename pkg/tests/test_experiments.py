import json

import numpy as np
import pandas as pd
import pytest

from esslab import experiments
from esslab.exceptions import UnknownScenario
from esslab.experiments import get_scenario, read_table, round_sig, run_scenario, scenario_ids, write_result


def quick_config(scenario_id):
    base = get_scenario(scenario_id).config
    if base is None:
        return None
    return base.with_updates(bootstrap_count=300, replicates=min(base.replicates, 3))


@pytest.mark.parametrize(
    "prefix",
    ["fig1", "fig2", "fig4", "fig5", "fig6", "fig_beta_sim"]
    + [f"table{i}" for i in range(1, 9)],
)
def test_registry_covers_every_figure_and_table(prefix):
    assert prefix in scenario_ids()


def test_registry_row_scenarios():
    ids = scenario_ids()
    assert sum(i.startswith("table1_row") for i in ids) == 21
    assert sum(i.startswith("table2_row") for i in ids) == 16
    assert {"table_realdata1", "table_realdata2"} <= set(ids)


def test_unknown_scenario():
    with pytest.raises(UnknownScenario):
        run_scenario("table99")


@pytest.mark.parametrize("scenario_id", scenario_ids())
def test_csv_round_trip(scenario_id, tmp_path):
    result = run_scenario(scenario_id, quick_config(scenario_id))
    csv_path, meta_path = write_result(result, tmp_path, scenario_id)
    back = read_table(csv_path)
    pd.testing.assert_frame_equal(back, result.table, check_dtype=False)
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    assert meta["id"] == scenario_id
    assert meta["columns"] == list(result.table.columns)
    assert meta["rows"] == len(result.table)
    for col in ("sweep_param", "ess_pvalue", "sd", "n_failed"):
        if scenario_id != "fig1" or col != "sweep_param":
            assert col in result.table.columns


def test_round_sig():
    assert round_sig(123456789.0) == 123457000.0
    assert round_sig(-0.000123456789) == -0.000123457
    assert round_sig(0.0) == 0.0
    assert np.isnan(round_sig(float("nan")))


def test_csv_format_six_significant_digits():
    table = pd.DataFrame({"x": [1 / 3, 2e-9], "label": ["a", "b"]})
    text = experiments.table_to_csv(experiments.round_table(table))
    assert text.splitlines() == ["x,label", "0.333333,a", "2e-09,b"]


def test_write_leaves_no_temp_files(tmp_path):
    write_result(run_scenario("fig2"), tmp_path, "fig2")
    assert sorted(p.name for p in tmp_path.iterdir()) == ["fig2.csv", "fig2.json"]


def test_fig1_metadata_records_discrepancy():
    meta = run_scenario("fig1").metadata
    assert meta["minima"]["0.0"]["ess"] == 17
    assert meta["minima"]["0.1"]["ess"] == 13
    assert meta["minima"]["0.5"]["ess"] == -67
    disc = meta["discrepancy"]
    assert disc["reported_minimum"] == -79
    assert disc["n_implied_by_reported"] == 1580
    assert disc["closed_form_at_implied_n"] == pytest.approx(-79, abs=0.5)
    assert meta["n"] == 100


def test_fig1_curves_have_single_minimum():
    table = run_scenario("fig1").table
    assert set(table["delta"]) == {0.0, 0.1, 0.5}
    assert table.groupby("delta")["is_minimum"].sum().tolist() == [1, 1, 1]


def test_scenario_config_override_is_recorded():
    cfg = quick_config("table4")
    result = run_scenario("table4", cfg)
    assert result.metadata["config"]["bootstrap_count"] == 300
    assert result.metadata["config"]["replicates"] == 3


def test_exact_scenarios_ignore_config():
    assert run_scenario("fig2").metadata["config"] is None


def test_scenarios_deterministic():
    cfg = quick_config("table7")
    a = run_scenario("table7", cfg).table
    b = run_scenario("table7", cfg).table
    pd.testing.assert_frame_equal(a, b)
