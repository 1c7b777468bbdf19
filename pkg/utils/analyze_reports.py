#!/usr/bin/env python3
"""
finsler-verify Report Analyzer

Loads verification reports (JSON) and per-point residual dumps (CSV) written
by ``python -m finsler`` and summarizes them per check.

- JSON reports contribute one row per report (check, norm, max residual, passed)
  plus their per-point rows when present.
- CSV dumps contribute per-point rows; they carry no pass flag, so the pass
  rate of a CSV-only check is reported as NaN.
"""

import sys
import json
import argparse
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from finsler.logging_config import setup_logging
from finsler.paths import DEFAULT_REPORTS_DIR, RESULTS_DIR, ensure_dir
from finsler.reports import VerificationReport

logger = setup_logging("finsler.analyze")

POINT_COLUMNS = ["check", "label", "lhs", "rhs", "abs_residual", "rel_residual"]


def load_report_json(path: Path) -> Tuple[Dict, pd.DataFrame]:
    """
    Load one JSON report.

    Args:
        path: Path to a report written with ``--format json``

    Returns:
        (summary row, per-point DataFrame)
    """
    report = VerificationReport.from_json(path.read_text(encoding="utf-8"))
    summary = {
        "file": path.name,
        "check": report.check,
        "norm": report.norm,
        "corrupt": report.corrupt,
        "samples": report.samples,
        "max_rel_residual": report.max_rel_residual,
        "tolerance": report.tolerance,
        "passed": report.passed,
    }
    rows = [
        {"check": report.check, "label": pt.label, "lhs": pt.lhs, "rhs": pt.rhs,
         "abs_residual": pt.abs_residual, "rel_residual": pt.rel_residual}
        for pt in report.points
    ]
    return summary, pd.DataFrame(rows, columns=POINT_COLUMNS)


def load_points_csv(path: Path) -> pd.DataFrame:
    """
    Load a per-point residual dump written with ``--format csv``.

    Args:
        path: Path to the CSV file

    Returns:
        A DataFrame with the point columns (coordinates dropped)
    """
    df = pd.read_csv(path)
    missing = [c for c in POINT_COLUMNS if c not in df.columns]
    if missing:
        raise ValueError(f"{path} is not a residual dump; missing columns {missing}")
    df["label"] = df["label"].fillna("")
    return df[POINT_COLUMNS]


def load_reports(paths: Iterable[Path]) -> Tuple[pd.DataFrame, pd.DataFrame]:
    """
    Load every JSON and CSV file under ``paths`` (files or directories).

    Returns:
        (one row per JSON report, one row per evaluated point)
    """
    summaries: List[Dict] = []
    frames: List[pd.DataFrame] = []
    for root in paths:
        files = sorted(root.rglob("*")) if root.is_dir() else [root]
        for path in files:
            try:
                if path.suffix == ".json":
                    summary, points = load_report_json(path)
                    summaries.append(summary)
                    frames.append(points)
                elif path.suffix == ".csv":
                    frames.append(load_points_csv(path))
            except (ValueError, json.JSONDecodeError) as e:
                logger.warning(f"Skipping {path}: {e}")
    reports = pd.DataFrame(summaries)
    frames = [f for f in frames if not f.empty]
    points = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=POINT_COLUMNS)
    logger.info(f"Loaded {len(reports)} reports and {len(points)} point rows")
    return reports, points


def summarize(reports: pd.DataFrame, points: pd.DataFrame) -> pd.DataFrame:
    """
    Per-check statistics.

    Args:
        reports: One row per JSON report
        points: One row per evaluated point

    Returns:
        DataFrame indexed by check with count, max/median relative residual
        and pass rate
    """
    if points.empty:
        stats = pd.DataFrame(columns=["count", "max_rel", "median_rel"])
    else:
        grouped = points.groupby("check")["rel_residual"]
        stats = pd.DataFrame({
            "count": grouped.size(),
            "max_rel": grouped.max(),
            "median_rel": grouped.median(),
        })
    if not reports.empty:
        rate = reports.groupby("check")["passed"].mean().rename("pass_rate")
        stats = stats.join(rate, how="outer")
        missing = stats["count"].isna()
        if missing.any():
            worst = reports.groupby("check")["max_rel_residual"].max()
            stats.loc[missing, "max_rel"] = worst[missing[missing].index]
            stats.loc[missing, "count"] = 0
    else:
        stats["pass_rate"] = np.nan
    return stats.sort_index()


def plot_residual_histogram(points: pd.DataFrame, output_dir: Path) -> Optional[Path]:
    """
    Log-scale histogram of relative residuals, one series per check.

    Args:
        points: One row per evaluated point
        output_dir: Directory to save the PNG

    Returns:
        Path of the saved plot, or None when there is nothing to plot
    """
    finite = points[np.isfinite(points["rel_residual"].astype(float))]
    if finite.empty:
        logger.warning("No finite residuals to plot")
        return None
    ensure_dir(output_dir)
    floor = 1e-18
    values = np.log10(finite["rel_residual"].astype(float).clip(lower=floor))
    bins = np.linspace(values.min(), max(values.max(), values.min() + 1.0), 40)

    plt.figure(figsize=(12, 6))
    for check, group in finite.groupby("check"):
        plt.hist(np.log10(group["rel_residual"].astype(float).clip(lower=floor)),
                 bins=bins, alpha=0.5, label=str(check))
    plt.title("Relative Residuals by Check")
    plt.xlabel("log10(relative residual)")
    plt.ylabel("Points")
    plt.legend()
    plt.tight_layout()
    out_path = output_dir / "residual_histogram.png"
    plt.savefig(out_path)
    plt.close()
    logger.info(f"Saved plot to {out_path}")
    return out_path


def main(argv: Optional[List[str]] = None) -> int:
    """Main function to run the analysis."""
    parser = argparse.ArgumentParser(description="Analyze finsler-verify reports")

    parser.add_argument(
        "inputs",
        nargs="*",
        type=Path,
        default=[DEFAULT_REPORTS_DIR],
        help=f"Report files or directories (default: {DEFAULT_REPORTS_DIR})",
    )

    parser.add_argument(
        "--output-dir",
        type=Path,
        default=RESULTS_DIR / "analysis",
        help="Directory to save the summary and plots",
    )

    parser.add_argument(
        "--plot",
        action="store_true",
        help="Generate a residual histogram",
    )

    args = parser.parse_args(argv)

    reports, points = load_reports(args.inputs)
    if reports.empty and points.empty:
        logger.error("No reports found")
        return 1
    stats = summarize(reports, points)

    print("\n=== Check Summary ===")
    print(stats.to_string())

    ensure_dir(args.output_dir)
    out_csv = args.output_dir / "summary.csv"
    stats.to_csv(out_csv)
    logger.info(f"Saved summary to {out_csv}")

    if args.plot:
        plot_residual_histogram(points, args.output_dir)
    return 0


if __name__ == "__main__":
    sys.exit(main())
