from __future__ import annotations

import logging

from saddlevr.logs import LOG_ENV_VAR, configure_logging


def test_explicit_level_wins(monkeypatch):
    monkeypatch.setenv(LOG_ENV_VAR, "debug")
    assert configure_logging("info") == logging.INFO
    assert logging.getLogger("saddlevr").level == logging.INFO


def test_level_from_environment(monkeypatch):
    monkeypatch.setenv(LOG_ENV_VAR, "DEBUG")
    assert configure_logging() == logging.DEBUG


def test_unknown_level_falls_back_to_error(monkeypatch):
    monkeypatch.setenv(LOG_ENV_VAR, "chatty")
    assert configure_logging() == logging.ERROR


def test_handler_is_installed_once(monkeypatch):
    monkeypatch.delenv(LOG_ENV_VAR, raising=False)
    configure_logging()
    configure_logging()
    handlers = [h for h in logging.getLogger("saddlevr").handlers if getattr(h, "_saddlevr", False)]
    assert len(handlers) == 1
