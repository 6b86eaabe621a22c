"""Logging and console presentation using the rich library"""

import logging
import os
from pathlib import Path
from typing import Iterable, Optional

from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table
from rich.text import Text


def setup_logger(
    name: str = "wscforge",
    log_file: Optional[str] = None,
    level: Optional[str] = None,
    rich_tracebacks: bool = True,
    show_path: bool = False,
    show_time: bool = True
) -> logging.Logger:
    """Setup logger with rich console formatting

    Args:
        name: Logger name
        log_file: Optional path to a plain-text log file (WSC_FORGE_LOG_FILE if unset)
        level: Logging level (WSC_FORGE_LOG_LEVEL, then INFO, if unset)
        rich_tracebacks: Whether to use rich tracebacks
        show_path: Whether to show file path in logs
        show_time: Whether to show time in console logs

    Returns:
        Configured logger instance
    """
    level = level or os.getenv("WSC_FORGE_LOG_LEVEL", "INFO")
    log_file = log_file or os.getenv("WSC_FORGE_LOG_FILE") or None

    logger = logging.getLogger(name)
    logger.setLevel(getattr(logging, level.upper(), logging.INFO))
    logger.propagate = False
    logger.handlers.clear()

    rich_handler = RichHandler(
        console=Console(stderr=True),
        show_time=show_time,
        show_path=show_path,
        rich_tracebacks=rich_tracebacks,
        markup=False,
        log_time_format="[%H:%M:%S]"
    )
    rich_handler.setFormatter(logging.Formatter("%(message)s", datefmt="[%X]"))
    logger.addHandler(rich_handler)

    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, mode='a', encoding='utf-8')
        file_handler.setFormatter(logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        ))
        logger.addHandler(file_handler)

    return logger


def get_console() -> Console:
    """Rich console on stderr, so stdout stays free for machine-readable output"""
    return Console(stderr=True)


def log_section(title: str, subtitle: Optional[str] = None):
    """Display a formatted section header"""
    console = get_console()

    content = Text(title, style="bold blue")
    if subtitle:
        content = content + "\n" + Text(subtitle, style="dim")

    console.print(Panel(content, expand=True, border_style="cyan", padding=(0, 2)))


def log_stats(stats: dict, title: str = "Statistics"):
    """Display key/value statistics in a table"""
    table = Table(title=title, show_header=True, header_style="bold magenta")
    table.add_column("Metric", style="cyan", width=30)
    table.add_column("Value", style="green", justify="right")

    for key, value in stats.items():
        if isinstance(value, float):
            formatted_value = f"{value:,.6g}"
        elif isinstance(value, int) and not isinstance(value, bool):
            formatted_value = f"{value:,}"
        else:
            formatted_value = str(value)
        table.add_row(str(key), formatted_value)

    get_console().print(table)


def log_check_table(checks: Iterable, title: str = "Verification"):
    """Display pass/fail per check report (objects with name/passed/checked/violations)"""
    table = Table(title=title, show_header=True, header_style="bold magenta")
    table.add_column("Check", style="cyan")
    table.add_column("Samples", justify="right")
    table.add_column("Violations", justify="right")
    table.add_column("Result", justify="center")

    for check in checks:
        result = "[bold green]PASS[/bold green]" if check.passed else "[bold red]FAIL[/bold red]"
        table.add_row(check.name, f"{check.checked:,}", str(len(check.violations)), result)

    get_console().print(table)


def log_success(message: str):
    get_console().print(f"[bold green]✓[/bold green] {message}")


def log_warning(message: str):
    get_console().print(f"[bold yellow]⚠[/bold yellow] {message}")


def log_error(message: str):
    get_console().print(f"[bold red]✗[/bold red] {message}")
