"""
Logger untuk GeoPhase
=====================

Rich console + file log harian. Semua named logger memakai handler yang sama;
`warnings.warn` (mis. GuardViolationWarning) ikut masuk ke log lewat `py.warnings`.
"""

import logging
from datetime import datetime
from functools import lru_cache
from pathlib import Path
from typing import List, Optional

from rich.console import Console
from rich.logging import RichHandler
from rich.theme import Theme
from rich.traceback import install

from config.config import Config

install(show_locals=False)

geophase_theme = Theme({
    "info": "cyan",
    "warning": "yellow",
    "error": "bold red",
    "success": "bold green",
    "step": "bold white",
    "phase": "bold magenta",
    "oracle": "bold blue",
    "check_pass": "green",
    "check_fail": "bold red",
})

console = Console(theme=geophase_theme, stderr=True)

class RunFileFormatter(logging.Formatter):
    """One line per record: time, level, logger, message"""

    def format(self, record):
        timestamp = datetime.fromtimestamp(record.created).strftime('%Y-%m-%d %H:%M:%S')
        return f"[{timestamp}] [{record.levelname:<7}] [{record.name}] {record.getMessage()}"

@lru_cache(maxsize=None)
def _shared_handlers() -> List[logging.Handler]:
    handlers: List[logging.Handler] = []
    if Config.LOG_TO_FILE:
        log_dir = Path(Config.LOG_DIR)
        log_dir.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(
            log_dir / f"geophase_{datetime.now().strftime('%Y%m%d')}.log", encoding='utf-8'
        )
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(RunFileFormatter())
        handlers.append(file_handler)

    rich_handler = RichHandler(console=console, show_path=False, rich_tracebacks=True,
                               markup=False, log_time_format="[%H:%M:%S]")
    rich_handler.setLevel(getattr(logging, Config.LOG_LEVEL.upper(), logging.INFO))
    handlers.append(rich_handler)

    logging.captureWarnings(True)
    warnings_logger = logging.getLogger("py.warnings")
    warnings_logger.handlers = list(handlers)
    warnings_logger.propagate = False
    return handlers

class Logger:
    """Thin wrapper over `logging.Logger` with GeoPhase console helpers"""

    def __init__(self, name: str = "GeoPhase"):
        self.logger = logging.getLogger(name)
        self.logger.setLevel(logging.DEBUG)
        self.logger.handlers = list(_shared_handlers())
        self.logger.propagate = False
        self.console = console

    def info(self, message: str):
        self.logger.info(message, stacklevel=2)

    def warning(self, message: str):
        self.logger.warning(message, stacklevel=2)

    def error(self, message: str):
        self.logger.error(message, stacklevel=2)

    def debug(self, message: str):
        self.logger.debug(message, stacklevel=2)

    def success(self, message: str):
        self.console.print(f"✅ {message}", style="success")
        self.logger.debug(f"SUCCESS: {message}")

    def step(self, step_name: str, description: str = ""):
        """One highlighted line per pipeline stage (sweep start, oracle run, ...)"""
        suffix = f" [dim]{description}[/dim]" if description else ""
        self.console.print(f"[step]▶ {step_name}[/step]{suffix}")
        self.logger.debug(f"STEP: {step_name} - {description}")

    def phase_log(self, message: str, method: str = ""):
        prefix = f"[{method}] " if method else ""
        self.logger.debug(f"PHASE {prefix}{message}")

    def oracle_log(self, message: str, model: str = ""):
        prefix = f"[{model}] " if model else ""
        self.logger.info(f"ORACLE {prefix}{message}")

    def check_log(self, name: str, passed: bool, measured: float, tolerance: float):
        mark, style = ("PASS", "check_pass") if passed else ("FAIL", "check_fail")
        self.console.print(f"  {mark}  {name}: {measured:.3e} (tol {tolerance:.1e})", style=style)
        self.logger.debug(f"CHECK {mark} {name}: measured={measured!r} tol={tolerance!r}")

    def separator(self, title: Optional[str] = None):
        self.console.rule(f"[bold blue]{title}[/bold blue]" if title else "")

logger = Logger()

def get_logger(name: Optional[str] = None) -> Logger:
    return Logger(name) if name else logger
