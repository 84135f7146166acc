import psutil
import pytest

from qtherm.py import settings
from qtherm.py.errors import SettingsError, ValidationError
from qtherm.py.settings import get_setting, save_setting, thread_count


def test_defaults():
    assert get_setting("dimension_cap") == 4096
    assert get_setting("bath_dim") == 4
    assert get_setting("show_progress") is True


def test_save_setting_validates_keys_and_types():
    assert save_setting("bath_spacing", 2) == 2.0
    assert get_setting("bath_spacing") == 2.0
    with pytest.raises(SettingsError):
        save_setting("no_such_key", 1)
    with pytest.raises(SettingsError):
        save_setting("bath_dim", "4")
    with pytest.raises(SettingsError):
        save_setting("bath_dim", True)
    with pytest.raises(SettingsError):
        save_setting("dimension_cap", 0)
    with pytest.raises(SettingsError):
        get_setting("no_such_key")


def test_settings_error_is_a_validation_error():
    assert issubclass(SettingsError, ValidationError)


def test_thread_count_sources(monkeypatch):
    monkeypatch.setenv(settings.THREADS_ENV_VAR, "3")
    assert thread_count() == 3
    save_setting("threads", 5)
    assert thread_count() == 5
    save_setting("threads", None)
    monkeypatch.setenv(settings.THREADS_ENV_VAR, "lots")
    assert thread_count() == (psutil.cpu_count(logical=True) or 1)


def test_invalid_thread_env_warns(monkeypatch, capsys):
    monkeypatch.setenv(settings.THREADS_ENV_VAR, "-2")
    thread_count()
    assert "Ignoring QTHERM_THREADS" in capsys.readouterr().err
