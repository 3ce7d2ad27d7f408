import os

import numpy as np
import pandas as pd
import pytest

from pytdpt.api import predict_scenario, run_scenario, simulate
from pytdpt.errors import ConfigurationError, PhysicsGuardError, ResolutionError
from pytdpt.iterator import ScenarioIterator
from pytdpt.utils import configs_from_manifest, load_manifest
from pytdpt.workflow import ScenarioConfig, SimulationWorkflow


def _quick(**changes):
    """A cheap parameter point: free motion in a weak static field."""
    base = ScenarioConfig(mass=2000.0, pulse_variant='constant', E0_prime=0.005, dt=1.0, k=2,
                          n_steps=40, report_stride=10)
    return base.replace(**changes)


# --- ScenarioConfig ---

def test_default_config_is_valid():
    config = ScenarioConfig()
    assert config.validate() == []
    config.check()
    assert config.resolved_n_steps == 100


def test_validation_lists_every_problem():
    config = ScenarioConfig(scenario='nope', dt=-1.0, k=40, b2=3.0)
    problems = config.validate()
    assert len(problems) == 4
    with pytest.raises(ConfigurationError) as excinfo:
        config.check()
    assert 'scenario' in str(excinfo.value) and 'dt' in str(excinfo.value)


def test_from_mapping_coerces_and_rejects():
    config = ScenarioConfig.from_mapping({'n_points': '512', 'dt': 2, 'k': 4.0, 'n_steps': float('nan')})
    assert config.n_points == 512 and isinstance(config.dt, float) and config.k == 4
    assert config.n_steps is None
    with pytest.raises(ConfigurationError):
        ScenarioConfig.from_mapping({'bogus': 1})
    with pytest.raises(ConfigurationError):
        ScenarioConfig.from_mapping({'k': 2.5})


def test_builders_follow_the_config():
    config = ScenarioConfig(pulse_variant='chirped', E0_prime=0.01, tau_prime=200.0, b2=1e3, n_points=512)
    pulse = config.build_pulse()
    assert pulse.variant == 'chirped' and pulse.tau_prime == pytest.approx(200.0)
    grid = config.build_grid()
    assert grid.n_points == 512
    with pytest.raises(ResolutionError):
        ScenarioConfig(packet_width=0.5).build_initial_state(ScenarioConfig().build_grid())


# --- SimulationWorkflow ---

def test_execute_requires_configuration():
    with pytest.raises(RuntimeError):
        SimulationWorkflow(_quick()).execute()


def test_workflow_records_every_stride(capsys):
    workflow = SimulationWorkflow()
    workflow.configure_and_preview(_quick(), n_steps=45)
    assert 'SIMULATION CONFIGURATION' in capsys.readouterr().out
    result = workflow.execute()
    frame = result.frame
    assert list(frame.columns) == ['t', 'total_norm', 'N_2', 'N_4', 'class_1', 'class_2']
    assert frame['t'].tolist() == [0.0, 10.0, 20.0, 30.0, 40.0, 45.0]
    assert frame['total_norm'].iloc[0] == pytest.approx(1.0, abs=1e-14)
    assert frame['N_2'].iloc[-1] == pytest.approx(-45.0 * 0.005 ** 2, rel=1e-10)
    assert result.summary['n_steps'] == 45
    assert result.summary['divergence_onset'] == np.inf


def test_workflow_warns_when_the_pulse_is_cut_off(caplog):
    workflow = SimulationWorkflow(_quick(pulse_variant='unchirped', tau_prime=413.0, t_d=100.0))
    with caplog.at_level('WARNING'):
        workflow.configure_and_preview(show_preview=False)
    assert 'before the pulse has passed' in caplog.text


def test_invalid_overrides_leave_workflow_unconfigured():
    workflow = SimulationWorkflow()
    with pytest.raises(ConfigurationError):
        workflow.configure_and_preview(_quick(), show_preview=False, dt=0.0)
    assert not workflow.is_config_valid


def test_halving_dt_halves_stationary_and_keeps_oscillatory_orders():
    coarse = simulate(_quick(dt=1.0, n_steps=400, report_stride=40))
    fine = simulate(_quick(dt=0.5, n_steps=800, report_stride=80))
    both = coarse.merge(fine, on='t', suffixes=('_coarse', '_fine'))
    late = both[both['t'] >= 200.0]
    assert len(late) == 6

    assert late['N_2_fine'].to_numpy() == pytest.approx(0.5 * late['N_2_coarse'].to_numpy(), rel=0.05)
    assert late['N_4_fine'].to_numpy() == pytest.approx(late['N_4_coarse'].to_numpy(), rel=0.01)


def test_guard_trips_for_a_packet_at_the_edge():
    with pytest.raises(PhysicsGuardError):
        simulate(_quick(packet_center=38.0))


# --- ScenarioIterator ---

def test_defaults_priority_and_template():
    iterator = ScenarioIterator()
    iterator.set_default_values(dt=0.5, k=3, not_a_field=1)
    assert 'not_a_field' not in iterator.custom_defaults
    template = iterator.get_template_dataframe()
    assert list(template.columns) == ScenarioConfig.field_names()

    runs = pd.DataFrame([{'k': 4}, {'k': np.nan}])
    plan = iterator.generate_scenario_runs(runs)
    assert plan['k'].tolist() == [4, 3]
    assert plan['dt'].tolist() == [0.5, 0.5]
    assert plan['n_points'].tolist() == [256, 256]


def test_plan_drops_duplicates(caplog):
    iterator = ScenarioIterator()
    row = _quick().to_dict()
    with caplog.at_level('WARNING'):
        plan = iterator.generate_scenario_runs(pd.DataFrame([row, row]))
    assert len(plan) == 1
    assert 'duplicates' in caplog.text


def test_plan_reports_all_invalid_rows():
    iterator = ScenarioIterator()
    runs = pd.DataFrame([{'dt': -1.0}, {'k': 2}, {'packet_width': 0.1}])
    with pytest.raises(ConfigurationError) as excinfo:
        iterator.generate_scenario_runs(runs)
    assert 'row 0' in str(excinfo.value) and 'row 2' in str(excinfo.value)
    with pytest.raises(ConfigurationError):
        iterator.generate_scenario_runs(pd.DataFrame([{'unknown_column': 1}]))


def test_run_requires_a_plan(tmp_path):
    with pytest.raises(RuntimeError):
        ScenarioIterator().run_scenario_runs(str(tmp_path))


def test_scenario_outputs_are_reproducible(tmp_path):
    first = tmp_path / 'first'
    result = run_scenario({**_quick().to_dict(), 'k': [1, 2]}, str(first))
    manifest = load_manifest(str(first))
    assert manifest['package'] == 'pytdpt'
    assert [p['status'] for p in manifest['points']] == ['ok', 'ok']
    assert len(result.frames) == 2

    second = tmp_path / 'second'
    configs = configs_from_manifest(str(first))
    assert configs == [_quick(k=1), _quick(k=2)]
    run_scenario(pd.DataFrame([c.to_dict() for c in configs]), str(second))

    for point in manifest['points']:
        for name in point['outputs']:
            assert (first / name).read_bytes() == (second / name).read_bytes()


def test_parallel_run_matches_serial_run(tmp_path):
    sweep = {**_quick().to_dict(), 'm0': [0.0, 1e-3]}
    serial = run_scenario(sweep, str(tmp_path / 'serial'))
    parallel = run_scenario(sweep, str(tmp_path / 'parallel'), jobs=2)
    for run_id, frame in serial.frames.items():
        pd.testing.assert_frame_equal(frame, parallel.frames[run_id])


def test_guard_failure_is_recorded_before_raising(tmp_path):
    sweep = {**_quick().to_dict(), 'packet_center': [0.0, 38.0]}
    with pytest.raises(PhysicsGuardError):
        run_scenario(sweep, str(tmp_path))
    manifest = load_manifest(str(tmp_path))
    assert [p['status'] for p in manifest['points']] == ['ok', 'guard_error']
    assert manifest['points'][1]['outputs'] == []


def test_chirp_sweep_writes_prediction_tables(tmp_path):
    config = _quick(scenario='chirp_sweep', pulse_variant='chirped', E0_prime=0.01, tau_prime=20.0,
                    t_d=20.0, omega0=0.5, b2=50.0, n_steps=60)
    result = run_scenario(config, str(tmp_path))
    outputs = result.points[0]['outputs']
    assert len(outputs) == 2 and outputs[1].endswith('_prediction.csv')
    table = pd.read_csv(tmp_path / outputs[1])
    assert {'stationary_leading', 'simulated_stationary', 'oscillatory_sum'} <= set(table.columns)


# --- Predictions ---

def test_predict_scenario_for_a_continuous_wave():
    table = predict_scenario(_quick(k=6, n_steps=2000, report_stride=100))
    assert table['t'].iloc[-1] == 2000.0
    assert table['w_bar'].iloc[0] == pytest.approx(0.005)
    assert 400.0 < table.attrs['predicted_divergence_onset'] < 500.0
    with pytest.raises(ConfigurationError):
        predict_scenario({**_quick().to_dict(), 'k': [1, 2]})
