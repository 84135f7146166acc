"""
Reading problem documents and writing reports.

JSON and CSV outputs are written to `<path>.tmp` first and moved into place
with os.replace, so an interrupted run never leaves a half-written report.
"""
import csv
import json
import math
import os

from .console import fail
from .errors import SpecError

CSV_FLOAT_FORMAT = ".9g"


def format_float(x):
    """9 significant digits; -0 prints as 0 and infinities as inf / -inf."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    text = format(x, CSV_FLOAT_FORMAT)
    return "0" if text in ("-0", "0") else text


def _json_default(value):
    # numpy scalars and arrays
    if hasattr(value, "tolist"):
        return value.tolist()
    if isinstance(value, complex):
        return [value.real, value.imag]
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _prepare_dir(path):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)


def _discard(tmp_path):
    try:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
    except OSError:
        pass


def atomic_save(path, data, log_prefix="ReportStore"):
    """Write a JSON object atomically. Returns True on success."""
    if not isinstance(data, dict):
        fail(log_prefix, f"Refusing to save non-dict data to {path}")
        return False

    tmp_path = path + ".tmp"
    try:
        _prepare_dir(path)
        with open(tmp_path, "w", encoding="utf-8") as f:
            json.dump(data, f, indent=2, ensure_ascii=False, default=_json_default)
            f.write("\n")
        os.replace(tmp_path, path)
        return True
    except (OSError, TypeError, ValueError) as e:
        fail(log_prefix, f"Error saving {path}: {e}")
        _discard(tmp_path)
        return False


def atomic_save_csv(path, header, rows, log_prefix="ReportStore"):
    """Write a header and rows as LF-terminated UTF-8 CSV. Returns True on success."""
    tmp_path = path + ".tmp"
    try:
        _prepare_dir(path)
        with open(tmp_path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
        os.replace(tmp_path, path)
        return True
    except OSError as e:
        fail(log_prefix, f"Error saving {path}: {e}")
        _discard(tmp_path)
        return False


def load_json_document(path):
    """Load a JSON object, raising SpecError with a precise location otherwise."""
    if not os.path.exists(path):
        raise SpecError("", f"file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise SpecError("", f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    except (OSError, UnicodeDecodeError) as e:
        raise SpecError("", f"cannot read {path}: {e}") from e
    if not isinstance(data, dict):
        raise SpecError("", f"{path}: top level must be a JSON object, got {type(data).__name__}")
    return data


def render_json(data):
    """The text atomic_save would write, for printing to stdout."""
    return json.dumps(data, indent=2, ensure_ascii=False, default=_json_default)
