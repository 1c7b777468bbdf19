"""Where finsler-verify keeps its files, anchored at the checkout root.

Everything resolves from this file's location, not the working directory,
so the suite runner, the analysis script and the CLI agree on paths.
"""

from __future__ import annotations

from pathlib import Path

PROJECT_ROOT: Path = Path(__file__).resolve().parents[1]

RESULTS_DIR: Path = PROJECT_ROOT / "results"
LOGS_DIR: Path = PROJECT_ROOT / "logs"

DEFAULT_SUITE_CSV: Path = PROJECT_ROOT / "config" / "suite.csv"
DEFAULT_REPORTS_DIR: Path = RESULTS_DIR / "suite"


def ensure_dir(path: Path) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path


__all__ = [
    "PROJECT_ROOT",
    "RESULTS_DIR",
    "LOGS_DIR",
    "DEFAULT_SUITE_CSV",
    "DEFAULT_REPORTS_DIR",
    "ensure_dir",
]
