# pytdpt/api.py

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Union

import numpy as np
import pandas as pd

from .analytics import build_prediction_set, predicted_divergence_onset, prediction_table
from .errors import ConfigurationError
from .iterator import ScenarioIterator
from .utils import expand_sweep
from .workflow import ScenarioConfig, SimulationWorkflow

ConfigLike = Union[ScenarioConfig, Dict[str, Any]]


@dataclass
class ScenarioResult:
    """Outputs of :func:`run_scenario`.

    Attributes:
        plan (pd.DataFrame): Resolved parameter points with their run ids.
        frames (Dict[str, pd.DataFrame]): Norm-order series per run id.
        manifest_path (str): Path of the written ``manifest.json``.
        points (list): Manifest entries, one per point.
    """
    plan: pd.DataFrame
    frames: Dict[str, pd.DataFrame]
    manifest_path: str
    points: list = field(default_factory=list)


def _as_config(config: ConfigLike) -> ScenarioConfig:
    if isinstance(config, ScenarioConfig):
        return config
    if any(isinstance(v, list) for v in config.values()):
        raise ConfigurationError("A single point was expected, but the mapping contains swept (list) values.")
    return ScenarioConfig.from_mapping(config)


def simulate(config: ConfigLike, show_preview: bool = False) -> pd.DataFrame:
    """Runs one parameter point and returns its norm-order series.

    Args:
        config (ScenarioConfig or dict): The parameter point.
        show_preview (bool, optional): Print the configuration summary.

    Returns:
        pd.DataFrame: Columns ``t, total_norm, N_2, ..., class_1, ...``.
    """
    workflow = SimulationWorkflow(_as_config(config))
    workflow.configure_and_preview(show_preview=show_preview)
    return workflow.execute().frame


def run_scenario(config: Union[ConfigLike, pd.DataFrame], output_dir: str = './pytdpt_results',
                 jobs: int = 1) -> ScenarioResult:
    """Runs a scenario in one call: plan, propagate, write CSVs and manifest.

    Args:
        config: A single ScenarioConfig, a flat mapping whose list values are
            swept (Cartesian product), or a DataFrame with one row per point.
        output_dir (str, optional): Destination folder. Defaults to './pytdpt_results'.
        jobs (int, optional): Number of worker processes. Defaults to 1.

    Returns:
        ScenarioResult: The plan, the frames and the manifest location.

    Raises:
        ConfigurationError: If any point is invalid.
        PhysicsGuardError: If any point reached the box edge (after the
            manifest has been written).
    """
    # Turn every accepted input into a runs DataFrame with one row per point.
    if isinstance(config, ScenarioConfig):
        runs_df = pd.DataFrame([config.to_dict()])
    elif isinstance(config, pd.DataFrame):
        runs_df = config
    else:
        runs_df = expand_sweep(config)

    # Plan and run the points; the iterator writes the CSVs and the manifest.
    iterator = ScenarioIterator()
    plan = iterator.generate_scenario_runs(runs_df)
    outcome = iterator.run_scenario_runs(output_dir, jobs=jobs)
    return ScenarioResult(plan, outcome['frames'], outcome['manifest_path'], outcome['points'])


def predict_scenario(config: ConfigLike, times: Optional[np.ndarray] = None,
                     w_bar: Optional[float] = None) -> pd.DataFrame:
    """Analytic prediction table on the time grid of a parameter point.

    The predicted divergence onset of the summed oscillatory estimates is
    stored in ``table.attrs['predicted_divergence_onset']``.
    """
    config = _as_config(config)
    config.check()
    # Default to the reporting grid of the simulation, last step included.
    if times is None:
        n_steps = config.resolved_n_steps
        steps = np.arange(0, n_steps + 1, config.report_stride)
        if steps[-1] != n_steps:
            steps = np.append(steps, n_steps)
        times = steps * config.dt
    times = np.asarray(times, dtype=float)
    # A continuous wave has no FWHM; average over the propagation instead.
    window = (0.0, float(times.max())) if config.pulse_variant == 'constant' else None
    predictions = build_prediction_set(config.build_pulse(), config.mu, config.dt, config.k, w_bar=w_bar,
                                       erf_form=config.erf_form, window=window)
    table = prediction_table(predictions, times)
    onset = predicted_divergence_onset(config.k, predictions.w_bar, config.onset_threshold,
                                       t_max=max(float(np.max(times)), 1.0))
    table.attrs['predicted_divergence_onset'] = onset
    logging.info(f"Prediction for {config.scenario}: w_bar={predictions.w_bar:.6g}, onset {onset:.6g}")
    return table
