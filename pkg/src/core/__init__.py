"""Core functionality: configuration, logging, errors and the command runner

Config, the CLI and the orchestrator are imported from their modules
directly; this package only re-exports the logging helpers so that low-level
modules can import src.core.errors without pulling in the whole stack.
"""

from .logger import (
    setup_logger,
    get_console,
    log_section,
    log_stats,
    log_check_table,
    log_success,
    log_warning,
    log_error,
)

__all__ = [
    "setup_logger",
    "get_console",
    "log_section",
    "log_stats",
    "log_check_table",
    "log_success",
    "log_warning",
    "log_error",
]
