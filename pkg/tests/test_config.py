import importlib

import pytest

import config


@pytest.fixture
def reload_config(monkeypatch):
    """Reload config under patched environment, restoring the real one afterwards."""
    yield lambda: importlib.reload(config).Config
    monkeypatch.undo()
    importlib.reload(config)


def test_defaults(reload_config, monkeypatch):
    monkeypatch.delenv("LVR_THREADS", raising=False)
    Config = reload_config()
    assert Config.THREADS == 1
    assert Config.ENGINE == "gudhi"
    assert Config.validate()


def test_thread_count_from_environment(reload_config, monkeypatch):
    monkeypatch.setenv("LVR_THREADS", "4")
    assert reload_config().THREADS == 4


@pytest.mark.parametrize("raw", ["four", "0", "-2", "1.5"])
def test_bad_thread_count_is_reported_not_raised(reload_config, monkeypatch, capsys, raw):
    monkeypatch.setenv("LVR_THREADS", raw)
    Config = reload_config()
    assert Config.THREADS is None
    assert not Config.validate()
    assert f"LVR_THREADS must be a positive integer, got {raw!r}" in capsys.readouterr().err


def test_default_grids(reload_config):
    Config = reload_config()
    assert Config.grid_for("plain") == (0.0, 10.0, 100)
    assert Config.grid_for("locally-scaled") == (0.5, 1.5, 100)
    assert Config.get_spec_path("two-circles").name == "two_circles.json"
