"""
Run settings for qtherm.

A single in-process cache with defaults. The CLI and tests may override
entries through save_setting(); the sweep thread count is re-read from the
QTHERM_THREADS environment variable on every call.
Used by: qmat (dimension cap), simulator (bath defaults), commands (threads, progress)
"""
import os

import psutil

from .console import warn
from .errors import SettingsError

THREADS_ENV_VAR = "QTHERM_THREADS"

_settings_cache = {
    "dimension_cap": 4096,
    "bath_dim": 4,
    "bath_spacing": 1.0,
    "threads": None,            # None = QTHERM_THREADS, else psutil.cpu_count()
    "show_progress": True,
}

ALLOWED_SETTINGS = {
    "dimension_cap": int,
    "bath_dim": int,
    "bath_spacing": float,
    "threads": int,
    "show_progress": bool,
}


def get_setting(key):
    if key not in _settings_cache:
        raise SettingsError(f"unknown setting '{key}'")
    return _settings_cache[key]


def save_setting(key, value):
    """Validate and store a setting. Returns the stored value."""
    if key not in ALLOWED_SETTINGS:
        raise SettingsError(f"unknown setting '{key}'")

    expected = ALLOWED_SETTINGS[key]
    if expected is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if value is not None or key != "threads":
        if not isinstance(value, expected) or (expected is int and isinstance(value, bool)):
            raise SettingsError(f"setting '{key}' expects {expected.__name__}, got {type(value).__name__}")
        if expected in (int, float) and value <= 0:
            raise SettingsError(f"setting '{key}' must be positive")

    _settings_cache[key] = value
    return value


def thread_count():
    """Worker cap for sweeps: explicit setting, then QTHERM_THREADS, then CPU count."""
    explicit = _settings_cache.get("threads")
    if explicit:
        return int(explicit)

    raw = os.environ.get(THREADS_ENV_VAR, "").strip()
    if raw:
        try:
            value = int(raw)
            if value > 0:
                return value
        except ValueError:
            pass
        warn("Settings", f"Ignoring {THREADS_ENV_VAR}={raw!r}; expected a positive integer")

    return psutil.cpu_count(logical=True) or 1
