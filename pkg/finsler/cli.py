"""finsler-verify command line

Purpose
-------
Run one identity check of the anisotropic p-Laplacian theory and write its
report as JSON, CSV (per-point residuals) or a text summary.

Usage
-----
python -m finsler theorem1 --norm "quad:[[4,0],[0,1]]" --p 2 --field "poly:y1^2+y2^2" --points 50 --seed 7
python -m finsler classify --norm q:4 --n 2 --points 100 --seed 1
python -m finsler liouville --norm "quad:[[1,0],[0,1]]" --extent 200 --density 2048

Environment:
- FINSLER_SEED sets the default seed.
- FINSLER_LOG_LEVEL=DEBUG (or INFO/WARNING/ERROR) controls log verbosity.

Exit codes: 0 when the check passes, 1 when it fails or evaluation raises,
2 on usage or configuration errors (no output file is written).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Callable, Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import FinslerError
from .fields import BumpFunction
from .logging_config import setup_logging
from .norms import QuadraticNorm
from .operators import OperatorConfig
from .paths import ensure_dir
from .reports import VerificationReport
from .sampling import SampleSpec
from .specs import parse_field, parse_floats, parse_norm, parse_points, parse_polynomial
from .verifier import (
    ALGEBRA_TOL,
    ANALYTIC_TOL,
    DUAL_TOL,
    FK_TOL,
    DEFAULT_ANNULI,
    check_dual_norm,
    check_dual_weak,
    check_kelvin_algebra,
    check_kelvin_p2,
    check_kelvin_pn,
    check_liouville,
    check_mvp,
    check_theorem1,
    check_theorem1_weak,
    classify_norm,
    evaluate_operator,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

Command = Literal[
    "theorem1",
    "kelvin2",
    "kelvin-n",
    "mvp",
    "liouville",
    "classify",
    "dual",
    "op",
    "kelvin-algebra",
    "theorem1-weak",
    "dual-weak",
]

QUADRATIC_COMMANDS = {
    "theorem1", "kelvin2", "kelvin-n", "mvp", "liouville",
    "kelvin-algebra", "theorem1-weak", "dual-weak",
}
KELVIN_COMMANDS = {"kelvin2", "kelvin-n", "kelvin-algebra"}

DEFAULT_FIELDS = {
    "theorem1": "poly:y1^2+y2^2",
    "kelvin2": "poly:y1^2+y2^2",
    "kelvin-n": "poly:y1+2*y2",
    "op": "poly:y1^2+y2^2",
    "theorem1-weak": "poly:y1^2+y2^2",
    "dual-weak": "poly:y1^2+y2^2",
    "mvp": "poly:y1^2-y2^2",
}
DEFAULT_DENSITY = {"mvp": 128, "liouville": 2048, "theorem1-weak": 64, "dual-weak": 64}


class UsageError(Exception):
    """A flag value is unusable; reported with the flag name, exit code 2."""


def _env_seed() -> int:
    try:
        return int(os.getenv("FINSLER_SEED", "0"))
    except ValueError:
        return 0


# -----------------------------------------------------------------------------
# Configuration
# -----------------------------------------------------------------------------

class CliConfig(BaseModel):
    """Parsed command line; :meth:`to_argv` is its textual form."""

    model_config = ConfigDict(frozen=True)

    command: Command
    norm: str = "euclidean"
    n: Optional[int] = Field(None, ge=2, le=8)
    seed: int = 0
    output: Optional[str] = None
    format: Literal["json", "csv", "text"] = "json"
    corrupt: Literal["none", "matrix", "exponent"] = "none"
    tolerance: Optional[float] = Field(None, gt=0.0)
    log_level: Optional[str] = None
    points: int = Field(100, ge=1)
    r_min: Optional[float] = Field(None, ge=0.0)
    r_max: Optional[float] = Field(None, gt=0.0)
    parallel: bool = False
    p: float = Field(2.0, gt=1.0)
    field: Optional[str] = None
    step: Optional[float] = Field(None, gt=0.0)
    grad_mode: Literal["analytic", "finite-difference"] = "analytic"
    at: Optional[str] = None
    radii: Optional[str] = None
    density: Optional[int] = Field(None, ge=32)
    grid_density: int = Field(256, ge=16)
    extent: float = Field(200.0, gt=0.0)
    alpha: float = Field(0.0, gt=-2.0)
    scale: float = Field(1.0, gt=0.0)
    bump_center: Optional[str] = None
    bump_radius: float = Field(1.0, gt=0.0)
    exponent: Literal["2", "n"] = "2"

    @model_validator(mode="after")
    def _check_combinations(self) -> "CliConfig":
        if self.command == "liouville" and self.n not in (None, 2):
            raise ValueError(f"liouville runs in dimension 2, got --n {self.n}")
        if self.r_min is not None and self.r_max is not None and self.r_min >= self.r_max:
            raise ValueError(f"--r-min {self.r_min} must be below --r-max {self.r_max}")
        if self.command in KELVIN_COMMANDS and self.r_min == 0.0:
            raise ValueError("Kelvin checks need --r-min > 0")
        if self.command == "mvp" and self.density is not None and self.density < 64:
            raise ValueError(f"mvp needs --density >= 64, got {self.density}")
        return self

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace) -> "CliConfig":
        values = {k: v for k, v in vars(ns).items() if k in cls.model_fields}
        return cls.model_validate(values)

    def to_argv(self) -> list[str]:
        argv = [self.command, "--seed", str(self.seed)]
        for name, info in type(self).model_fields.items():
            if name in ("command", "seed"):
                continue
            value = getattr(self, name)
            if value == info.default:
                continue
            flag = "--" + name.replace("_", "-")
            if isinstance(value, bool):
                argv.append(flag)
            else:
                argv.extend([flag, str(value)])
        return argv


# -----------------------------------------------------------------------------
# Argument parsing
# -----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--norm", default="euclidean",
                        help="Norm H: quad:<matrix>, q:<exponent> or euclidean")
    common.add_argument("--n", type=int, default=None,
                        help="Dimension (inferred from quad: matrices; q-norms default to 2)")
    common.add_argument("--seed", type=int, default=_env_seed(),
                        help="Sampling seed (default from FINSLER_SEED)")
    common.add_argument("--output", "-o", default=None, help="Report path (stdout when omitted)")
    common.add_argument("--format", choices=["json", "csv", "text"], default="json", help="Report format")
    common.add_argument("--corrupt", choices=["none", "matrix", "exponent"], default="none",
                        help="Negative-control corruption")
    common.add_argument("--tolerance", type=float, default=None,
                        help="Override the check's default tolerance")
    common.add_argument("--log-level", default=None, help="Log level (default from FINSLER_LOG_LEVEL)")

    sampling = argparse.ArgumentParser(add_help=False)
    sampling.add_argument("--points", type=int, default=100, help="Number of sample points")
    sampling.add_argument("--r-min", type=float, default=None, help="Inner radius of the sample annulus")
    sampling.add_argument("--r-max", type=float, default=None, help="Outer radius of the sample annulus")
    sampling.add_argument("--parallel", action="store_true", help="Evaluate sample points concurrently")

    exponent = argparse.ArgumentParser(add_help=False)
    exponent.add_argument("--p", type=float, default=2.0, help="Exponent p > 1")

    field = argparse.ArgumentParser(add_help=False)
    field.add_argument("--field", default=None,
                       help="Field: poly:<terms>, harmonic-pullback:<terms>, liouville, constant:<c>, "
                            "exp:<c1,...>, log-norm, bump")

    numerics = argparse.ArgumentParser(add_help=False)
    numerics.add_argument("--step", type=float, default=None,
                          help="Divergence step (default 1e-5*(1+|x|), 1e-4*(1+|x|) when nested)")
    numerics.add_argument("--grad-mode", choices=["analytic", "finite-difference"], default="analytic",
                          help="Inner gradient source")

    bump = argparse.ArgumentParser(add_help=False)
    bump.add_argument("--bump-center", default=None, help="Test-function center 'c1,c2,...'")
    bump.add_argument("--bump-radius", type=float, default=1.0, help="Test-function radius")
    bump.add_argument("--density", type=int, default=None, help="Quadrature points per axis (default 64)")

    parser = argparse.ArgumentParser(
        prog="finsler-verify",
        description="Numerical verification of anisotropic p-Laplacian identities",
        formatter_class=fmt,
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    sub.add_parser("theorem1", parents=[common, sampling, exponent, field, numerics], formatter_class=fmt,
                   help="Δ_p(u∘L_B) against (Δ_p^H u)∘L_B")
    sub.add_parser("kelvin2", parents=[common, sampling, field, numerics], formatter_class=fmt,
                   help="Kelvin duality for p = 2 (hat transform)")
    sub.add_parser("kelvin-n", parents=[common, sampling, field, numerics], formatter_class=fmt,
                   help="Kelvin duality for p = n (star transform)")
    sub.add_parser("kelvin-algebra", parents=[common, sampling], formatter_class=fmt,
                   help="T_H* ∘ T_H = id, norm reciprocity, inversion factorization")
    sub.add_parser("classify", parents=[common, sampling], formatter_class=fmt,
                   help="Quadratic-norm classification and the pairing identity")

    op = sub.add_parser("op", parents=[common, sampling, exponent, field, numerics], formatter_class=fmt,
                        help="Evaluate Δ_p^H u with a step-halving consistency check")
    op.add_argument("--at", default=None, help="Explicit points 'x1,x2;y1,y2' instead of samples")

    dual = sub.add_parser("dual", parents=[common, sampling], formatter_class=fmt,
                          help="Evaluate H* numerically against its closed form")
    dual.add_argument("--at", default=None, help="Explicit points 'x1,x2;y1,y2' instead of samples")
    dual.add_argument("--grid-density", type=int, default=256, help="Sphere grid density")

    mvp = sub.add_parser("mvp", parents=[common, field], formatter_class=fmt,
                         help="Mean value property over Wulff balls")
    mvp.add_argument("--at", default=None, help="Ball centers 'x1,x2;y1,y2'")
    mvp.add_argument("--radii", default=None, help="Ball radii 'r1,r2,...' (default 0.25,0.5,1)")
    mvp.add_argument("--density", type=int, default=None, help="Quadrature density (default 128)")

    liouville = sub.add_parser("liouville", parents=[common, sampling, numerics], formatter_class=fmt,
                               help="Liouville profile: pointwise equation and total mass")
    liouville.add_argument("--extent", type=float, default=200.0, help="Half-width L of the mass box")
    liouville.add_argument("--density", type=int, default=None, help="Mass grid points per axis (default 2048)")
    liouville.add_argument("--alpha", type=float, default=0.0, help="Weight exponent α > −2")
    liouville.add_argument("--scale", type=float, default=1.0, help="Profile scale λ > 0")

    sub.add_parser("theorem1-weak", parents=[common, exponent, field, numerics, bump], formatter_class=fmt,
                   help="Integrated form of the linear change of variables")
    dual_weak = sub.add_parser("dual-weak", parents=[common, field, numerics, bump], formatter_class=fmt,
                               help="Weak form of the Kelvin dual equations")
    dual_weak.add_argument("--exponent", choices=["2", "n"], default="2", help="p = 2 (hat) or p = n (star)")
    return parser


# -----------------------------------------------------------------------------
# Planning: everything that can fail on bad input happens here
# -----------------------------------------------------------------------------

def _flag(flag: str, build: Callable):
    try:
        return build()
    except (FinslerError, ValueError) as e:
        raise UsageError(f"{flag}: {e}") from e


def plan(config: CliConfig) -> Callable[[], VerificationReport]:
    """Parse every specification in ``config`` and return the check to run."""
    cmd = config.command
    norm = _flag("--norm", lambda: parse_norm(config.norm, config.n))
    n = norm.n
    if cmd in QUADRATIC_COMMANDS and not isinstance(norm, QuadraticNorm):
        raise UsageError(f"--norm: {cmd} needs a quadratic norm, got {config.norm!r}")
    if cmd == "liouville" and n != 2:
        raise UsageError(f"--norm: liouville runs in dimension 2, got a norm on R^{n}")

    corrupt = config.corrupt
    samples = None
    if cmd in DEFAULT_ANNULI:
        lo, hi = DEFAULT_ANNULI[cmd]
        r_min = config.r_min if config.r_min is not None else lo
        r_max = config.r_max if config.r_max is not None else hi
        samples = _flag("--r-min/--r-max", lambda: SampleSpec(seed=config.seed, count=config.points, r_min=r_min, r_max=r_max))
    cfg = _flag("--step", lambda: OperatorConfig(p=config.p, h_flux=config.step, grad_mode=config.grad_mode))
    density = config.density or DEFAULT_DENSITY.get(cmd, 64)
    field_text = config.field or DEFAULT_FIELDS.get(cmd)

    def field():
        return _flag("--field", lambda: parse_field(field_text, n, norm))

    def bump() -> BumpFunction:
        if config.bump_center is None:
            if cmd == "theorem1-weak":
                return BumpFunction(np.zeros(n), config.bump_radius)
            return BumpFunction(np.eye(n)[0] * (config.bump_radius + 0.5), config.bump_radius)
        center = _flag("--bump-center", lambda: parse_points(config.bump_center, n)[0])
        return BumpFunction(center, config.bump_radius)

    common = dict(tolerance=config.tolerance, corrupt=corrupt)
    if cmd == "theorem1":
        u = field()
        return lambda: check_theorem1(norm, config.p, u, samples, cfg, parallel=config.parallel, **common)
    if cmd == "kelvin2":
        u = field()
        return lambda: check_kelvin_p2(norm, u, samples, cfg, parallel=config.parallel, **common)
    if cmd == "kelvin-n":
        u = field()
        return lambda: check_kelvin_pn(norm, u, samples, cfg, parallel=config.parallel, **common)
    if cmd == "op":
        u = field()
        at = _flag("--at", lambda: parse_points(config.at, n)) if config.at else None
        return lambda: evaluate_operator(norm, u, samples, cfg, points=at, parallel=config.parallel, **common)
    if cmd == "theorem1-weak":
        u, phi = field(), bump()
        return lambda: check_theorem1_weak(norm, u, phi, cfg, density, **common)
    if cmd == "dual-weak":
        u, phi = field(), bump()
        if float(np.linalg.norm(phi.center)) <= phi.radius:
            raise UsageError("--bump-center: the test function support must exclude the origin")
        return lambda: check_dual_weak(norm, u, phi, cfg, density, exponent=config.exponent, **common)
    if cmd == "mvp":
        kind, _, terms = field_text.partition(":")
        if kind not in ("poly", "harmonic-pullback"):
            raise UsageError(f"--field: mvp needs a polynomial, got {field_text!r}")
        poly = _flag("--field", lambda: parse_polynomial(terms, n, source=field_text, offset=len(kind) + 1))
        if not poly.is_harmonic():
            raise UsageError(f"--field: {field_text!r} is not harmonic (Laplacian {poly.laplacian()})")
        centers = _flag("--at", lambda: parse_points(config.at, n)) if config.at else None
        radii = _flag("--radii", lambda: parse_floats(config.radii)) if config.radii else None
        if radii is not None and any(r <= 0.0 for r in radii):
            raise UsageError(f"--radii: radii must be positive, got {radii}")
        kwargs = {} if radii is None else {"radii": radii}
        return lambda: check_mvp(norm, poly, centers, quad_density=density,
                                 tolerance=config.tolerance or ANALYTIC_TOL, corrupt=corrupt, **kwargs)
    if cmd == "liouville":
        return lambda: check_liouville(
            norm, samples, config.extent, density, alpha=config.alpha, scale=config.scale,
            cfg=cfg, parallel=config.parallel, **common,
        )
    if cmd == "classify":
        if corrupt == "exponent":
            raise UsageError("--corrupt: classify has no exponent to corrupt")
        return lambda: classify_norm(norm, samples, tolerance=config.tolerance or FK_TOL, corrupt=corrupt)
    if cmd == "dual":
        if corrupt == "exponent":
            raise UsageError("--corrupt: dual has no exponent to corrupt")
        at = _flag("--at", lambda: parse_points(config.at, n)) if config.at else None
        return lambda: check_dual_norm(norm, samples, config.grid_density, points=at,
                                       tolerance=config.tolerance or DUAL_TOL, corrupt=corrupt)
    # kelvin-algebra
    return lambda: check_kelvin_algebra(norm, samples, tolerance=config.tolerance or ALGEBRA_TOL, corrupt=corrupt)


# -----------------------------------------------------------------------------
# Output
# -----------------------------------------------------------------------------

def render(report: VerificationReport, fmt: str) -> str:
    if fmt == "csv":
        return report.to_csv()
    if fmt == "text":
        return report.to_text()
    return report.to_json()


def write_report(report: VerificationReport, config: CliConfig) -> None:
    text = render(report, config.format)
    if config.output is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = Path(config.output)
    ensure_dir(path.parent)
    path.write_text(text, encoding="utf-8")
    logger.info("Report written to %s", path)


def execute(config: CliConfig) -> VerificationReport:
    """Plan and run ``config`` without writing anything."""
    return plan(config)()


# -----------------------------------------------------------------------------
# Entry points
# -----------------------------------------------------------------------------

def _validation_message(e: ValidationError) -> str:
    first = e.errors()[0]
    loc = [str(part) for part in first.get("loc", ())]
    flag = "--" + loc[0].replace("_", "-") if loc else "arguments"
    return f"{flag}: {first.get('msg', str(e))}"


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    log = setup_logging(level=args.log_level)
    try:
        config = CliConfig.from_namespace(args)
        job = plan(config)
    except ValidationError as e:
        message = _validation_message(e)
    except UsageError as e:
        message = str(e)
    else:
        message = None
    if message is not None:
        log.error("usage error: %s", message)
        sys.stderr.write(f"finsler-verify: error: {message}\n")
        return EXIT_USAGE

    try:
        report = job()
    except (FinslerError, ArithmeticError, ValueError):
        log.exception("%s failed during evaluation", config.command)
        return EXIT_FAILED

    try:
        write_report(report, config)
    except OSError as e:
        log.error("could not write report: %s", e)
        return EXIT_USAGE
    return EXIT_OK if report.passed else EXIT_FAILED


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
