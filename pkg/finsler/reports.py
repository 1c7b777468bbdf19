"""Verification reports and their JSON / CSV / text renderings."""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Iterable, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

SCHEMA_VERSION = 1
MAX_WORST = 10
DENOMINATOR_FLOOR = 1e-12


def relative_residual(lhs: float, rhs: float, scale: float = 0.0) -> float:
    """|lhs − rhs| / (max(|lhs|, |rhs|, scale) + 1e-12)."""
    return abs(lhs - rhs) / (max(abs(lhs), abs(rhs), scale) + DENOMINATOR_FLOOR)


class PointResidual(BaseModel):
    x: list[float]
    lhs: float
    rhs: float
    abs_residual: float
    rel_residual: float
    label: str = ""


class SubCheck(BaseModel):
    name: str
    max_abs_residual: float
    max_rel_residual: float
    tolerance: float
    passed: bool


class VerificationReport(BaseModel):
    """Structured outcome of one check."""

    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = Field(SCHEMA_VERSION, alias="schema")
    check: str
    norm: str
    p: Optional[float] = None
    n: int
    samples: int
    max_abs_residual: float
    max_rel_residual: float
    tolerance: float
    passed: bool
    worst: list[PointResidual] = Field(default_factory=list)
    seed: Optional[int] = None
    fd_step: Optional[float] = None
    corrupt: str = "none"
    sub_checks: list[SubCheck] = Field(default_factory=list)
    extras: dict[str, Any] = Field(default_factory=dict)
    points: list[PointResidual] = Field(default_factory=list)

    def to_json(self) -> str:
        """Canonical JSON: sorted keys, fixed indentation."""
        return json.dumps(self.model_dump(mode="json", by_alias=True), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "VerificationReport":
        return cls.model_validate_json(text)

    def to_csv(self) -> str:
        buf = io.StringIO()
        width = max((len(pt.x) for pt in self.points), default=self.n)
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            ["check", "label"] + [f"x{i + 1}" for i in range(width)]
            + ["lhs", "rhs", "abs_residual", "rel_residual"]
        )
        for pt in self.points:
            writer.writerow(
                [self.check, pt.label] + [repr(v) for v in pt.x]
                + [repr(pt.lhs), repr(pt.rhs), repr(pt.abs_residual), repr(pt.rel_residual)]
            )
        return buf.getvalue()

    def to_text(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        lines = [
            f"{self.check}: {status}",
            f"  norm        {self.norm}",
            f"  n, p        {self.n}, {self.p if self.p is not None else '-'}",
            f"  samples     {self.samples} (seed {self.seed if self.seed is not None else '-'})",
            f"  max |res|   {self.max_abs_residual:.3e}",
            f"  max rel     {self.max_rel_residual:.3e}  (tolerance {self.tolerance:.1e})",
        ]
        if self.corrupt != "none":
            lines.append(f"  corrupt     {self.corrupt}")
        for sub in self.sub_checks:
            mark = "ok" if sub.passed else "FAILED"
            lines.append(
                f"  - {sub.name:<28} rel {sub.max_rel_residual:.3e} (tol {sub.tolerance:.1e}) {mark}"
            )
        for key in sorted(self.extras):
            lines.append(f"  {key:<12}{json.dumps(self.extras[key])}")
        if self.worst:
            lines.append("  worst points:")
            for pt in self.worst[:3]:
                coords = ", ".join(f"{v:.4g}" for v in pt.x)
                lines.append(
                    f"    ({coords}) lhs={pt.lhs:.6g} rhs={pt.rhs:.6g} rel={pt.rel_residual:.2e}"
                )
        return "\n".join(lines) + "\n"


class ResidualTable:
    """Accumulates per-point residuals and reduces them into report fields."""

    def __init__(self) -> None:
        self.rows: list[PointResidual] = []

    def add(
        self,
        x: Iterable[float],
        lhs: float,
        rhs: float,
        *,
        scale: float = 0.0,
        abs_residual: Optional[float] = None,
        label: str = "",
    ) -> PointResidual:
        a = abs(lhs - rhs) if abs_residual is None else abs_residual
        rel = a / (max(abs(lhs), abs(rhs), scale) + DENOMINATOR_FLOOR)
        if not (math.isfinite(a) and math.isfinite(rel)):
            a, rel = math.inf, math.inf
        row = PointResidual(
            x=[float(v) for v in np.asarray(x, dtype=float).ravel()],
            lhs=float(lhs),
            rhs=float(rhs),
            abs_residual=float(a),
            rel_residual=float(rel),
            label=label,
        )
        self.rows.append(row)
        return row

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def max_abs(self) -> float:
        return max((r.abs_residual for r in self.rows), default=0.0)

    @property
    def max_rel(self) -> float:
        return max((r.rel_residual for r in self.rows), default=0.0)

    def worst(self, k: int = MAX_WORST) -> list[PointResidual]:
        return sorted(self.rows, key=lambda r: r.rel_residual, reverse=True)[:k]

    def sub_check(self, name: str, tolerance: float) -> SubCheck:
        return SubCheck(
            name=name,
            max_abs_residual=self.max_abs,
            max_rel_residual=self.max_rel,
            tolerance=tolerance,
            passed=self.max_rel <= tolerance,
        )

    def report(
        self,
        *,
        check: str,
        norm: str,
        n: int,
        tolerance: float,
        p: Optional[float] = None,
        seed: Optional[int] = None,
        fd_step: Optional[float] = None,
        corrupt: str = "none",
        sub_checks: Optional[list[SubCheck]] = None,
        extras: Optional[dict[str, Any]] = None,
    ) -> VerificationReport:
        subs = sub_checks or []
        passed = self.max_rel <= tolerance and all(s.passed for s in subs)
        return VerificationReport(
            check=check,
            norm=norm,
            p=p,
            n=n,
            samples=len(self.rows),
            max_abs_residual=self.max_abs,
            max_rel_residual=self.max_rel,
            tolerance=tolerance,
            passed=passed,
            worst=self.worst(),
            seed=seed,
            fd_step=fd_step,
            corrupt=corrupt,
            sub_checks=subs,
            extras=extras or {},
            points=list(self.rows),
        )


__all__ = [
    "SCHEMA_VERSION",
    "PointResidual",
    "SubCheck",
    "VerificationReport",
    "ResidualTable",
    "relative_residual",
]
