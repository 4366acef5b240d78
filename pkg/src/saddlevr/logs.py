from __future__ import annotations

import logging
import os

LOG_ENV_VAR = "SADDLE_LOG"
_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: str | None = None) -> int:
    """Attach one stream handler to the package logger.

    Args:
        level: One of ``error``, ``info``, ``debug``. Read from ``SADDLE_LOG``
            when omitted.

    Returns:
        The numeric level that was applied.
    """
    name = (level or os.environ.get(LOG_ENV_VAR) or "error").strip().lower()
    root = logging.getLogger("saddlevr")
    numeric = _LEVELS.get(name, logging.ERROR)

    if not any(getattr(h, "_saddlevr", False) for h in root.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(_FORMAT))
        handler._saddlevr = True  # type: ignore[attr-defined]
        root.addHandler(handler)
    root.setLevel(numeric)

    if name not in _LEVELS:
        root.warning("Unknown %s value %r, using 'error'", LOG_ENV_VAR, name)
    return numeric
