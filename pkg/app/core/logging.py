import logging
import sys

import structlog


class _Stderr:
    """Resolves sys.stderr on every write so swapped streams keep receiving logs."""

    def write(self, message: str) -> int:
        return sys.stderr.write(message)

    def flush(self) -> None:
        sys.stderr.flush()


def configure_logging(level: str = "INFO") -> None:
    """Configure structlog for the CLI, the service and harness workers; logs go to stderr."""
    structlog.configure(
        cache_logger_on_first_use=True,
        wrapper_class=structlog.make_filtering_bound_logger(
            getattr(logging, "getLevelNamesMapping", lambda: dict(logging._nameToLevel))().get(
                level.upper(), logging.INFO
            )
        ),
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.format_exc_info,
            structlog.processors.TimeStamper(fmt="iso", utc=True),
            structlog.dev.ConsoleRenderer(colors=False),
        ],
        logger_factory=structlog.PrintLoggerFactory(file=_Stderr()),
    )
