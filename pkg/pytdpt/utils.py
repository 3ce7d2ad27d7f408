# pytdpt/utils.py

import os
import ast
import json
import shutil
import logging
import itertools
from typing import Any, Dict, List, Sequence, Union

import pandas as pd
from importlib import resources

from .constants import FS_TO_AU, MANIFEST_NAME
from .errors import ConfigurationError

_package_name = 'pytdpt'


def _parse_value(raw: str) -> Any:
    """Parses a config value as a Python literal, falling back to a bare string."""
    raw = raw.strip()
    try:
        return ast.literal_eval(raw)
    except (ValueError, SyntaxError):
        return raw


def _convert_fs(key: str, value: Any):
    """Converts a ``*_fs`` key and its value(s) from femtoseconds to atomic units."""
    if not key.endswith('_fs'):
        return key, value
    base = key[:-3]
    if isinstance(value, (list, tuple)):
        return base, [float(v) * FS_TO_AU for v in value]
    try:
        return base, float(value) * FS_TO_AU
    except (TypeError, ValueError):
        raise ConfigurationError(f"'{key}' must be numeric, got {value!r}.")


def _parse_assignment(text: str, source: str) -> tuple:
    if '=' not in text:
        raise ConfigurationError(f"{source}: expected 'key = value', got '{text}'.")
    key, raw = text.split('=', 1)
    key = key.strip()
    if not key.isidentifier():
        raise ConfigurationError(f"{source}: invalid key '{key}'.")
    return _convert_fs(key, _parse_value(raw))


def load_config(path: str) -> Dict[str, Any]:
    """Reads a flat ``key = value`` config file.

    Lines starting with ``#`` and trailing ``# ...`` comments are ignored.
    Values are Python literals (bare words are read as strings). Keys ending
    in ``_fs`` are given in femtoseconds and stored without the suffix in
    atomic units. List values mark the keys that are swept.

    Args:
        path (str): Path to the config file.

    Returns:
        Dict[str, Any]: The raw key/value mapping, lists preserved.

    Raises:
        ConfigurationError: For malformed lines or keys given twice.
    """
    logging.info(f"Loading config from '{path}'...")
    values: Dict[str, Any] = {}
    with open(path, 'r', encoding='utf-8') as f:
        for number, line in enumerate(f, start=1):
            # Drop comments and blank lines before parsing the assignment.
            text = line.split('#', 1)[0].strip()
            if not text:
                continue
            key, value = _parse_assignment(text, f"{os.path.basename(path)}:{number}")
            if key in values:
                raise ConfigurationError(f"{os.path.basename(path)}:{number}: key '{key}' is given twice.")
            values[key] = value
    return values


def parse_overrides(overrides: Sequence[str]) -> Dict[str, Any]:
    """Parses ``key=value`` overrides with the same rules as :func:`load_config`."""
    values: Dict[str, Any] = {}
    for item in overrides or []:
        key, value = _parse_assignment(item, '--set')
        values[key] = value
    return values


def expand_sweep(mapping: Dict[str, Any]) -> pd.DataFrame:
    """Expands list-valued keys into the Cartesian product of parameter points.

    Scalars are repeated on every row. The row order follows the key order of
    ``mapping`` with the last swept key varying fastest.
    """
    swept = {k: list(v) for k, v in mapping.items() if isinstance(v, list)}
    for key, options in swept.items():
        if not options:
            raise ConfigurationError(f"Sweep over '{key}' has no values.")
    fixed = {k: v for k, v in mapping.items() if k not in swept}
    rows = []
    # One row per combination of the swept values, scalars repeated.
    for combo in itertools.product(*swept.values()):
        row = dict(fixed)
        row.update(zip(swept.keys(), combo))
        rows.append(row)
    return pd.DataFrame(rows, columns=list(mapping.keys()))


def resolve_config_path(name: str) -> str:
    """Returns ``name`` if it exists, else the bundled config of that name."""
    if os.path.exists(name):
        return name
    candidate = resources.files(f'{_package_name}.configs').joinpath(os.path.basename(name))
    if candidate.is_file():
        return str(candidate)
    raise ConfigurationError(f"Config file '{name}' not found (also not among the bundled configs).")


def copy_example_configs(dest_dir: str = './pytdpt_configs') -> List[str]:
    """Copies the bundled scenario configs to a local directory.

    Args:
        dest_dir (str, optional): Destination folder, created if needed.
            Defaults to './pytdpt_configs'.

    Returns:
        List[str]: Paths of the copied files.
    """
    source_package = f'{_package_name}.configs'
    try:
        source_path_obj = resources.files(source_package)
    except (ModuleNotFoundError, AttributeError):
        logging.error(f"Could not find the configs sub-package '{source_package}'. The package might be corrupted.")
        return []

    # Create the destination directory if it doesn't already exist.
    os.makedirs(dest_dir, exist_ok=True)
    logging.info(f"Copying example configs to '{os.path.abspath(dest_dir)}'...")

    copied = []
    for source_item in source_path_obj.iterdir():
        if not source_item.name.endswith('.cfg'):
            continue
        dest_path = os.path.join(dest_dir, source_item.name)
        with resources.as_file(source_item) as source_item_path:
            shutil.copy2(source_item_path, dest_path)
        copied.append(dest_path)
    logging.info(f"Copied {len(copied)} config file(s).")
    return copied


def export_template_config(file_path: str = 'scenario_template.cfg') -> str:
    """Writes every ScenarioConfig key with its default value to a config file."""
    from .workflow import ScenarioConfig

    defaults = ScenarioConfig().to_dict()
    with open(file_path, 'w', encoding='utf-8') as f:
        f.write("# pytdpt scenario config; all values in atomic units.\n")
        f.write("# Add the suffix _fs to a time key to give it in femtoseconds.\n")
        for key, value in defaults.items():
            f.write(f"{key} = {value!r}\n")
    logging.info(f"Template successfully exported to '{os.path.abspath(file_path)}'")
    return file_path


def load_runs_from_csv(file_path: str) -> pd.DataFrame:
    """Loads a DataFrame of runs from a CSV file.

    String cells holding list literals are converted back to lists.
    """
    logging.info(f"Loading runs from '{file_path}'...")
    df = pd.read_csv(file_path)
    for col in df.columns:
        df[col] = df[col].apply(
            lambda x: ast.literal_eval(x) if isinstance(x, str) and x.startswith('[') else x
        )
    return df


def write_manifest(output_dir: str, scenario: str, points: List[Dict[str, Any]], version: str) -> str:
    """Writes ``manifest.json`` listing every point, its resolved config and its outputs."""
    path = os.path.join(output_dir, MANIFEST_NAME)
    # The resolved config of each point is enough to rerun it exactly.
    manifest = {'package': _package_name, 'version': version, 'scenario': scenario, 'points': points}
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(manifest, f, indent=2, sort_keys=False)
        f.write('\n')
    logging.info(f"Manifest written to '{os.path.abspath(path)}'")
    return path


def load_manifest(path: str) -> Dict[str, Any]:
    """Reads a manifest; ``path`` may be the file or its output directory."""
    if os.path.isdir(path):
        path = os.path.join(path, MANIFEST_NAME)
    with open(path, 'r', encoding='utf-8') as f:
        return json.load(f)


def configs_from_manifest(manifest: Union[str, Dict[str, Any]]) -> list:
    """Rebuilds the ScenarioConfig of every point recorded in a manifest."""
    from .workflow import ScenarioConfig

    if isinstance(manifest, str):
        manifest = load_manifest(manifest)
    return [ScenarioConfig.from_mapping(point['config']) for point in manifest['points']]
