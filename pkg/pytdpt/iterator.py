# pytdpt/iterator.py

import os
import json
import hashlib
import logging
import multiprocessing
from typing import Any, Dict, List, Optional

import pandas as pd

from .analytics import build_prediction_set, prediction_table
from .constants import CSV_FLOAT_FORMAT
from .errors import ConfigurationError, PhysicsGuardError, PytdptError
from .norm_analysis import stationary_baseline
from .utils import write_manifest
from .workflow import ScenarioConfig, SimulationWorkflow


def _run_id(config: ScenarioConfig) -> str:
    payload = json.dumps(config.to_dict(), sort_keys=True)
    return hashlib.sha1(payload.encode('utf-8')).hexdigest()


def _run_point(config_dict: Dict[str, Any]) -> Dict[str, Any]:
    """Worker entry point: runs one parameter point and never raises."""
    config = ScenarioConfig.from_mapping(config_dict)
    workflow = SimulationWorkflow(config)
    try:
        workflow.configure_and_preview(show_preview=False)
        result = workflow.execute()
    except PhysicsGuardError as e:
        return {'status': 'guard_error', 'error': str(e), 'frame': None, 'summary': {}}
    except PytdptError as e:
        return {'status': 'failed', 'error': str(e), 'frame': None, 'summary': {}}
    return {'status': 'ok', 'error': None, 'frame': result.frame, 'summary': result.summary}


def write_frame(frame: pd.DataFrame, path: str):
    """Writes a frame with the fixed float format so reruns are byte-identical."""
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n', encoding='utf-8')


class ScenarioIterator:
    """Runs a batch of parameter points of one scenario.

    The typical usage mirrors a single workflow, lifted to many points:

    **Step 1: Initialization**
        ``iterator = ScenarioIterator()``

    **Step 2: Define Common Parameters (Optional)**
        ``set_default_values()`` sets values shared by every point, such as
        the grid or the pulse.

    **Step 3: Define the Runs DataFrame**
        Start from ``get_template_dataframe()`` and add one row per point, or
        expand a config file with :func:`pytdpt.utils.expand_sweep`.

    **Step 4: Generate the Plan**
        ``generate_scenario_runs(runs_df)`` resolves every row to a full
        :class:`ScenarioConfig`, validates it and stores the plan in
        ``scenario_plan_df``.

    **Step 5: Execute**
        ``run_scenario_runs(output_dir, jobs)`` runs the points in a worker
        pool and writes one CSV per point plus ``manifest.json``.

    Attributes:
        workflow_class (type): Workflow run for every point.
        custom_defaults (Dict[str, Any]): Values set with ``set_default_values``.
        prepared_configs (List[ScenarioConfig]): Resolved configs, in plan order.
        scenario_plan_df (Optional[pd.DataFrame]): Resolved plan with run ids.
    """

    def __init__(self, workflow_class: type = SimulationWorkflow):
        self.workflow_class = workflow_class
        self.custom_defaults: Dict[str, Any] = {}
        self.prepared_configs: List[ScenarioConfig] = []
        self.scenario_plan_df: Optional[pd.DataFrame] = None
        logging.info(f"ScenarioIterator initialized for {workflow_class.__name__}.")

    def set_default_values(self, **defaults):
        """Sets values used by every point unless a row gives its own.

        Priority, lowest first: ScenarioConfig defaults, values set here,
        values in the runs DataFrame. Keys that are not config fields are
        ignored with a warning.
        """
        allowed = set(ScenarioConfig.field_names())
        for key in [k for k in defaults if k not in allowed]:
            logging.warning(f"Argument '{key}' is not applicable for {self.workflow_class.__name__} and will be ignored.")
            defaults.pop(key)
        self.custom_defaults = {key: value for key, value in defaults.items() if value is not None}
        logging.info(f"Custom default values have been set for the iterator: {self.custom_defaults}")

    def get_template_dataframe(self) -> pd.DataFrame:
        """Returns an empty DataFrame with one column per ScenarioConfig field."""
        return pd.DataFrame(columns=ScenarioConfig.field_names())

    def _apply_defaults(self, runs_df: pd.DataFrame) -> pd.DataFrame:
        """(Private) Fills missing columns and NaN cells with the default values."""
        unknown = sorted(set(runs_df.columns) - set(ScenarioConfig.field_names()))
        if unknown:
            raise ConfigurationError(f"Unknown run column(s): {unknown}.")
        # Merge defaults: the iterator's own values take precedence over the ScenarioConfig ones.
        hardcoded_defaults = ScenarioConfig().to_dict()
        final_defaults = {**hardcoded_defaults, **self.custom_defaults}

        # Add the missing columns and fill empty cells; values given in a row always win.
        completed_df = runs_df.copy()
        for col, default_val in final_defaults.items():
            if col not in completed_df.columns:
                completed_df[col] = [default_val] * len(completed_df)
            elif default_val is not None:
                completed_df[col] = completed_df[col].apply(lambda x: default_val if pd.isnull(x) else x)
        return completed_df[ScenarioConfig.field_names()]

    def generate_scenario_runs(self, runs_df: pd.DataFrame) -> pd.DataFrame:
        """Resolves and validates every row of ``runs_df``.

        Duplicated points are dropped with a warning.

        Raises:
            ConfigurationError: If any row is invalid; all problems are listed.
        """
        logging.info("Generating the execution plan...")
        completed_df = self._apply_defaults(runs_df)

        configs: List[ScenarioConfig] = []
        seen = set()
        problems = []
        rows = []
        # Validate every row and build its initial packet; nothing is propagated here.
        for index, row in enumerate(completed_df.to_dict('records')):
            try:
                config = ScenarioConfig.from_mapping(row)
                config.check()
                config.build_initial_state(config.build_grid())
            except PytdptError as e:
                problems.append(f"row {index}: {e}")
                continue
            run_id = _run_id(config)
            if run_id in seen:
                logging.warning(f"Row {index} duplicates an earlier point and will be skipped.")
                continue
            seen.add(run_id)
            configs.append(config)
            rows.append({'run_id': run_id, **config.to_dict()})
        if problems:
            raise ConfigurationError("Invalid runs: " + " | ".join(problems))

        self.prepared_configs = configs
        self.scenario_plan_df = pd.DataFrame(rows)
        logging.info(f"Plan ready: {len(configs)} point(s).")
        return self.scenario_plan_df

    def _output_name(self, index: int, config: ScenarioConfig, run_id: str) -> str:
        return f"{config.scenario}_{index:03d}_{run_id[:10]}.csv"

    def run_scenario_runs(self, output_dir: str, jobs: int = 1) -> Dict[str, Any]:
        """Runs every prepared point and writes the outputs.

        Points run in a pool of ``jobs`` worker processes; all files are
        written here, by the calling process. A failing point is logged and
        recorded in the manifest, and the batch continues.

        Returns:
            Dict[str, Any]: ``manifest_path``, ``frames`` (run id to DataFrame)
            and ``points`` (the manifest entries).

        Raises:
            RuntimeError: If no points were prepared.
            PhysicsGuardError: After writing the manifest, if any point
                tripped the boundary guard.
        """
        from . import __version__

        if not self.prepared_configs:
            raise RuntimeError("No points prepared. Call generate_scenario_runs() first.")
        # Create the destination directory if it doesn't already exist.
        os.makedirs(output_dir, exist_ok=True)
        total = len(self.prepared_configs)
        payloads = [c.to_dict() for c in self.prepared_configs]

        # Propagate the points, in worker processes when more than one job is allowed.
        if jobs > 1 and total > 1:
            with multiprocessing.Pool(processes=min(jobs, total)) as pool:
                results = pool.map(_run_point, payloads)
        else:
            results = []
            for i, payload in enumerate(payloads, start=1):
                logging.info(f"--- Running point {i}/{total} ---")
                results.append(_run_point(payload))

        # Write the CSV of each finished point and collect its manifest entry.
        points = []
        frames: Dict[str, pd.DataFrame] = {}
        guard_failures = []
        for index, (config, result) in enumerate(zip(self.prepared_configs, results)):
            run_id = _run_id(config)
            entry = {'run_id': run_id, 'config': config.to_dict(), 'outputs': [],
                     'status': result['status'], 'summary': result['summary'], 'error': result['error']}
            if result['status'] == 'ok':
                frame = result['frame']
                name = self._output_name(index, config, run_id)
                write_frame(frame, os.path.join(output_dir, name))
                entry['outputs'].append(name)
                frames[run_id] = frame
                if config.scenario == 'chirp_sweep':
                    entry['outputs'].append(self._write_prediction(output_dir, name, config, frame))
                print(f"point {index + 1}/{total} [{run_id[:10]}]: final norm {result['summary']['final_norm']:.12g}, "
                      f"onset {result['summary']['divergence_onset']:.6g}")
            else:
                logging.error(f"Point {index + 1}/{total} ({run_id[:10]}) {result['status']}: {result['error']}")
                if result['status'] == 'guard_error':
                    guard_failures.append(run_id)
            points.append(entry)

        # Write the manifest first; guard failures are raised only afterwards.
        scenario = self.prepared_configs[0].scenario
        manifest_path = write_manifest(output_dir, scenario, points, __version__)
        if guard_failures:
            raise PhysicsGuardError(f"{len(guard_failures)} point(s) reached the box edge: {guard_failures}")
        return {'manifest_path': manifest_path, 'frames': frames, 'points': points}

    def _write_prediction(self, output_dir: str, name: str, config: ScenarioConfig, frame: pd.DataFrame) -> str:
        times = frame['t'].to_numpy()
        window = (0.0, float(times.max())) if config.pulse_variant == 'constant' else None
        predictions = build_prediction_set(config.build_pulse(), config.mu, config.dt, config.k,
                                           erf_form=config.erf_form, window=window)
        table = prediction_table(predictions, times)
        table['simulated_stationary'] = (stationary_baseline(frame) - 1.0).to_numpy()
        prediction_name = name.replace('.csv', '_prediction.csv')
        write_frame(table, os.path.join(output_dir, prediction_name))
        return prediction_name
