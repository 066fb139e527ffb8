"""
Dataset files and golden comparisons.

CSV files start with one `# key: <json>` line per metadata entry, followed by
a header row and the data rows. JSON files hold a `metadata` object, the
column list and a flat `nodes` array of records. Both writers sort keys and
format floats with repr, so identical runs produce identical bytes.
"""

import csv
import io
import json
import logging
import math
import os
from typing import Any, Dict, List, Optional

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .analysis import relative_l2
from .errors import ShapeMismatchError
from .models import Dataset, GoldenReport, OutputFormat, WorstNode

logger = logging.getLogger(__name__)

WORST_NODES = 5
KEY_COLUMNS = ("p", "l", "k")


def _plain(value: Any) -> Any:
    """Convert numpy scalars and arrays into JSON-native values"""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_cell(text: str) -> Any:
    if text == "":
        return None
    try:
        number = int(text)
        return number
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def format_for(path: str, default: OutputFormat = OutputFormat.CSV) -> OutputFormat:
    extension = os.path.splitext(path)[1].lower().lstrip(".")
    return OutputFormat(extension) if extension in {f.value for f in OutputFormat} else default


def dumps_dataset(dataset: Dataset, output_format: OutputFormat = OutputFormat.CSV) -> str:
    metadata = _plain(dataset.metadata)
    if output_format == OutputFormat.JSON:
        document = {
            "metadata": metadata,
            "columns": dataset.columns,
            "nodes": [dict(zip(dataset.columns, _plain(row))) for row in dataset.rows],
        }
        return json.dumps(document, indent=2, sort_keys=True) + "\n"

    buffer = io.StringIO()
    for key in sorted(metadata):
        buffer.write(f"# {key}: {json.dumps(metadata[key], sort_keys=True)}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(dataset.columns)
    for row in dataset.rows:
        writer.writerow([_cell(v) for v in _plain(row)])
    return buffer.getvalue()


def write_dataset(dataset: Dataset, path: str, output_format: Optional[OutputFormat] = None) -> str:
    output_format = output_format or format_for(path)
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(dumps_dataset(dataset, output_format))
    logger.info("Wrote %d rows to %s", len(dataset.rows), path)
    return path


def loads_dataset(text: str, output_format: OutputFormat = OutputFormat.CSV) -> Dataset:
    if output_format == OutputFormat.JSON:
        document = json.loads(text)
        columns = document["columns"]
        rows = [[node.get(c) for c in columns] for node in document["nodes"]]
        return Dataset(columns=columns, rows=rows, metadata=document.get("metadata", {}))

    metadata: Dict[str, Any] = {}
    body: List[str] = []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            metadata[key] = json.loads(value)
        elif line:
            body.append(line)
    reader = csv.reader(body)
    columns = next(reader)
    rows = [[_parse_cell(cell) for cell in row] for row in reader]
    return Dataset(columns=columns, rows=rows, metadata=metadata)


def read_dataset(path: str) -> Dataset:
    with open(path, "r", encoding="utf-8") as f:
        return loads_dataset(f.read(), format_for(path))


def _is_integer(value: Any) -> bool:
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


def _is_number(value: Any) -> bool:
    return value is None or isinstance(value, (int, float, np.integer, np.floating))


def _key_columns(dataset: Dataset) -> List[str]:
    """Identifier columns: the map axes, named indices and all-integer columns"""
    keys = []
    for name in dataset.columns:
        values = dataset.column(name)
        if (dataset.is_map and name in ("theta", "phi")) or name in KEY_COLUMNS \
                or (values and all(_is_integer(v) for v in values)):
            keys.append(name)
    return keys


def _value_columns(dataset: Dataset) -> List[str]:
    keys = set(_key_columns(dataset))
    return [name for name in dataset.columns
            if name not in keys and all(_is_number(v) for v in dataset.column(name))]


def _as_array(values) -> np.ndarray:
    return np.array([np.nan if v is None else float(v) for v in values])


def _map_axes(dataset: Dataset):
    thetas = np.unique(_as_array(dataset.column("theta")))
    phis = np.unique(_as_array(dataset.column("phi")))
    if thetas.size * phis.size != len(dataset.rows):
        raise ShapeMismatchError("Map dataset is not a theta-major product grid")
    return thetas, phis


def _resample(reference: Dataset, target: Dataset, column: str) -> np.ndarray:
    """Linear interpolation of a reference map column onto the target nodes, periodic in φ"""
    thetas, phis = _map_axes(reference)
    values = _as_array(reference.column(column)).reshape(thetas.size, phis.size)
    # Close the azimuthal period on both sides
    phis_ext = np.concatenate([phis[-1:] - 2.0 * np.pi, phis, phis[:1] + 2.0 * np.pi])
    values_ext = np.concatenate([values[:, -1:], values, values[:, :1]], axis=1)
    interpolator = RegularGridInterpolator((thetas, phis_ext), values_ext, bounds_error=False, fill_value=None)
    points = np.stack([_as_array(target.column("theta")), _as_array(target.column("phi"))], axis=-1)
    return interpolator(points)


def golden_check(dataset: Dataset, reference: Dataset, tolerance: float = 0.02) -> GoldenReport:
    """
    Relative L² comparison of every numeric value column; key columns only
    identify rows. Maps on a different grid are resampled from the reference
    onto the dataset nodes; other tables must match key for key.
    """
    columns = _value_columns(dataset)
    if columns != _value_columns(reference) or dataset.columns != reference.columns:
        raise ShapeMismatchError(f"Columns differ: {dataset.columns} vs {reference.columns}")

    resampled = False
    if len(dataset.rows) != len(reference.rows):
        if not dataset.is_map:
            raise ShapeMismatchError(f"Row counts differ: {len(dataset.rows)} vs {len(reference.rows)}")
        resampled = True
    elif not dataset.is_map:
        for key in _key_columns(dataset):
            if dataset.column(key) != reference.column(key):
                raise ShapeMismatchError(f"Key column {key!r} differs between dataset and reference")
    else:
        same_nodes = (np.allclose(_as_array(dataset.column("theta")), _as_array(reference.column("theta")))
                      and np.allclose(_as_array(dataset.column("phi")), _as_array(reference.column("phi"))))
        resampled = not same_nodes

    values, expected = [], []
    for column in columns:
        values.append(_as_array(dataset.column(column)))
        expected.append(_resample(reference, dataset, column) if resampled else _as_array(reference.column(column)))
    values = np.concatenate(values)
    expected = np.concatenate(expected)

    defined = np.isfinite(values) & np.isfinite(expected)
    error = relative_l2(values[defined], expected[defined])
    deviation = np.where(defined, np.abs(values - expected), -np.inf)

    n_rows = len(dataset.rows)
    worst = []
    for flat in np.argsort(-deviation, kind="stable")[:WORST_NODES]:
        if not np.isfinite(deviation[flat]):
            break
        row = int(flat % n_rows)
        if dataset.is_map:
            label = f"theta={dataset.rows[row][0]:.6f} phi={dataset.rows[row][1]:.6f}"
        else:
            label = ",".join(str(v) for v in dataset.rows[row][:2])
        worst.append(WorstNode(
            index=row,
            label=f"{columns[int(flat // n_rows)]} @ {label}",
            value=float(values[flat]),
            reference=float(expected[flat]),
            deviation=float(deviation[flat]),
        ))

    report = GoldenReport(
        passed=bool(error <= tolerance),
        error=error,
        tolerance=tolerance,
        resampled=resampled,
        compared_nodes=int(np.count_nonzero(defined)),
        worst_nodes=worst,
    )
    logger.info("Golden check: error %.3e against tolerance %.3e (%s)",
                error, tolerance, "pass" if report.passed else "fail")
    return report
