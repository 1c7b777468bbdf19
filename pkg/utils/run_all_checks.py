#!/usr/bin/env python3
"""
finsler-verify Suite Runner

Runs every row of the acceptance suite (config/suite.csv) as
``python -m finsler <args>`` in a subprocess, writes each report under
results/suite/, and compares the exit code with the row's ``expect`` column.
"""

import os
import sys
import csv
import shlex
import argparse
import subprocess
import time
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from finsler.logging_config import setup_logging
from finsler.paths import DEFAULT_REPORTS_DIR, DEFAULT_SUITE_CSV, PROJECT_ROOT, ensure_dir

logger = setup_logging("finsler.suite")

EXTENSIONS = {"json": "json", "csv": "csv", "text": "txt"}


@dataclass(frozen=True)
class SuiteRow:
    name: str
    args: List[str]
    expect: int

    @property
    def format(self) -> str:
        if "--format" in self.args:
            i = self.args.index("--format")
            if i + 1 < len(self.args):
                return self.args[i + 1]
        return "json"


def load_suite(path: Path) -> List[SuiteRow]:
    """
    Read the suite CSV.

    Args:
        path: CSV with columns name, args, expect

    Returns:
        The suite rows in file order
    """
    rows: List[SuiteRow] = []
    with open(path, newline="", encoding="utf-8") as f:
        for record in csv.DictReader(f):
            name = (record.get("name") or "").strip()
            if not name or name.startswith("#"):
                continue
            rows.append(SuiteRow(name, shlex.split(record["args"]), int(record.get("expect") or 0)))
    logger.info(f"Loaded {len(rows)} suite rows from {path}")
    return rows


def run_row(row: SuiteRow, output_dir: Path) -> int:
    """
    Run one suite row and return its exit code.

    Args:
        row: The suite row
        output_dir: Directory to save the report
    """
    out_path = output_dir / f"{row.name}.{EXTENSIONS.get(row.format, 'out')}"
    env = os.environ.copy()
    env.setdefault("FINSLER_LOG_LEVEL", "WARNING")
    cmd = [sys.executable, "-m", "finsler", *row.args, "--output", str(out_path)]
    logger.info(f"Running {row.name}: {' '.join(shlex.quote(a) for a in row.args)}")
    try:
        result = subprocess.run(
            cmd,
            cwd=str(PROJECT_ROOT),
            env=env,
            capture_output=True,
            text=True,
        )
    except OSError as e:
        logger.error(f"Could not start {row.name}: {e}")
        return -1
    if result.returncode != row.expect:
        logger.error(f"Stdout: {result.stdout}")
        logger.error(f"Stderr: {result.stderr}")
    else:
        logger.debug(f"Stderr: {result.stderr}")
    return result.returncode


def main(argv: Optional[List[str]] = None) -> int:
    """Run the whole suite; non-zero when any row misses its expected exit code."""
    parser = argparse.ArgumentParser(description="Run the finsler-verify acceptance suite")

    parser.add_argument(
        "--suite",
        type=Path,
        default=DEFAULT_SUITE_CSV,
        help=f"Suite CSV (default: {DEFAULT_SUITE_CSV})",
    )

    parser.add_argument(
        "--output-dir",
        type=Path,
        default=DEFAULT_REPORTS_DIR,
        help=f"Directory to save reports (default: {DEFAULT_REPORTS_DIR})",
    )

    parser.add_argument(
        "--only",
        nargs="+",
        default=None,
        help="Run only the named rows",
    )

    args = parser.parse_args(argv)
    rows = load_suite(args.suite)
    if args.only:
        rows = [r for r in rows if r.name in set(args.only)]
    ensure_dir(args.output_dir)

    logger.info("=" * 50)
    logger.info("finsler-verify Suite Runner")
    logger.info("=" * 50)
    logger.info(f"Suite: {args.suite}")
    logger.info(f"Rows: {len(rows)}")
    logger.info(f"Output Directory: {args.output_dir}")
    logger.info("=" * 50)

    mismatches: List[str] = []
    start_time = time.time()
    for row in rows:
        row_start = time.time()
        code = run_row(row, args.output_dir)
        duration = time.time() - row_start
        status = "ok" if code == row.expect else f"MISMATCH (expected {row.expect})"
        logger.info(f"Completed {row.name} in {duration:.2f} seconds, exit {code} {status}")
        if code != row.expect:
            mismatches.append(row.name)

    total_duration = time.time() - start_time
    logger.info(f"All rows completed in {total_duration:.2f} seconds")
    if mismatches:
        logger.error(f"{len(mismatches)} rows missed their expected exit code: {', '.join(mismatches)}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
