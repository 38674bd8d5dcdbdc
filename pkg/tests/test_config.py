from __future__ import annotations

import pytest

from tricolor import bench
from tricolor.config import load_settings
from tricolor.errors import ConfigError

ENV = ("TRICOLOR_JOBS", "TRICOLOR_LOG_LEVEL", "TRICOLOR_RESULTS_DIR", "TRICOLOR_BUDGET", "TRICOLOR_RUNS",
       "TRICOLOR_RUN_SLOW")


@pytest.fixture
def clean_env(monkeypatch):
    for name in ENV:
        monkeypatch.delenv(name, raising=False)
    return monkeypatch


def test_defaults(clean_env):
    settings = load_settings()
    assert settings.jobs is None
    assert settings.log_level == "INFO"
    assert settings.results_dir == "results"
    assert settings.budget == 300_000 and settings.runs == 25
    assert settings.run_slow is False


def test_overrides(clean_env):
    clean_env.setenv("TRICOLOR_JOBS", "3")
    clean_env.setenv("TRICOLOR_LOG_LEVEL", "debug")
    clean_env.setenv("TRICOLOR_BUDGET", "1000")
    clean_env.setenv("TRICOLOR_RUN_SLOW", "yes")
    settings = load_settings()
    assert settings.jobs == 3 and settings.budget == 1000
    assert settings.log_level == "DEBUG"
    assert settings.run_slow is True


@pytest.mark.parametrize("value", ["0", "false", "No", ""])
def test_flag_convention(clean_env, value):
    clean_env.setenv("TRICOLOR_RUN_SLOW", value)
    assert load_settings().run_slow is False


def test_bad_values(clean_env):
    clean_env.setenv("TRICOLOR_BUDGET", "lots")
    with pytest.raises(ConfigError, match="TRICOLOR_BUDGET"):
        load_settings()
    clean_env.setenv("TRICOLOR_BUDGET", "10")
    clean_env.setenv("TRICOLOR_JOBS", "0")
    with pytest.raises(ConfigError):
        load_settings()


def test_default_jobs(clean_env):
    assert bench.default_jobs(4) == 4
    assert bench.default_jobs(None) >= 1
    clean_env.setenv("TRICOLOR_JOBS", "2")
    assert bench.default_jobs(8) == 2
