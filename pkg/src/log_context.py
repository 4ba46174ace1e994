"""Logging context for run tracking."""

import logging
from contextvars import ContextVar

# Current run's tag, e.g. "spdc:3fa2c1d0", "verify:9b07e115"
run_tag: ContextVar[str] = ContextVar("run_tag", default="")


class RunTagFilter(logging.Filter):
    """Inject run_tag into log records."""
    def filter(self, record):
        tag = run_tag.get()
        record.run_tag = f" [{tag}]" if tag else ""
        return True
