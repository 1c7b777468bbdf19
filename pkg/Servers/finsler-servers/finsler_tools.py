import sys
import json
import shlex
import pathlib
sys.path.insert(0, str(pathlib.Path(__file__).parents[2]))

from mcp.server.fastmcp import FastMCP
from typing import Annotated, Optional
from pydantic import Field, ValidationError

from finsler.cli import CliConfig, UsageError, build_parser, execute
from finsler.errors import FinslerError
from finsler.logging_config import setup_logging
from finsler.norms import dual_eval_numeric
from finsler.operators import OperatorConfig, finsler_p_laplacian_terms
from finsler.specs import parse_field, parse_norm, parse_points
from finsler.transforms import KelvinMap, kelvin_point as kelvin_map_point

logger = setup_logging("finsler")

mcp = FastMCP("Finsler-Verify")


def _error(e: Exception) -> str:
    logger.warning("tool call rejected: %s", e)
    return json.dumps({"error": type(e).__name__, "message": str(e)}, sort_keys=True)


def _point(text: str, n: int):
    pts = parse_points(text, n)
    if len(pts) != 1:
        raise UsageError(f"expected a single point, got {len(pts)}")
    return pts[0]


@mcp.tool(
    name="eval-norm",
    description="Evaluate a norm H and its gradient at a vector"
)
async def eval_norm(
    norm: Annotated[str, Field(description="Norm spec: quad:[[4,0],[0,1]], q:4 or euclidean")],
    xi: Annotated[str, Field(description="Vector as comma-separated coordinates, e.g. 1,2")],
    n: Annotated[Optional[int], Field(description="Dimension for q: and euclidean norms (default 2)")] = None,
) -> str:
    try:
        h = parse_norm(norm, n)
        v = _point(xi, h.n)
        out = {"norm": h.spec, "xi": v.tolist(), "value": h.value(v)}
        if any(v):
            out["gradient"] = h.gradient(v).tolist()
        return json.dumps(out, sort_keys=True)
    except (FinslerError, UsageError) as e:
        return _error(e)


@mcp.tool(
    name="dual-norm",
    description="Evaluate the dual norm H* in closed form and, optionally, from its support-function definition"
)
async def dual_norm(
    norm: Annotated[str, Field(description="Norm spec: quad:[[4,0],[0,1]], q:4 or euclidean")],
    x: Annotated[str, Field(description="Point as comma-separated coordinates")],
    n: Annotated[Optional[int], Field(description="Dimension for q: and euclidean norms (default 2)")] = None,
    numeric: Annotated[bool, Field(description="Also evaluate the sphere-grid maximization")] = False,
    grid_density: Annotated[int, Field(description="Sphere grid density for the numeric evaluation", ge=16)] = 256,
) -> str:
    try:
        h = parse_norm(norm, n)
        v = _point(x, h.n)
        hstar = h.dual()
        out = {"dual": hstar.spec, "x": v.tolist(), "closed_form": hstar.value(v)}
        if numeric:
            out["numeric"] = dual_eval_numeric(h, v, grid_density)
        return json.dumps(out, sort_keys=True)
    except (FinslerError, UsageError) as e:
        return _error(e)


@mcp.tool(
    name="kelvin-point",
    description="Map a point through the anisotropic Kelvin inversion T_H(x) = M x / H(x)^2"
)
async def kelvin_point(
    norm: Annotated[str, Field(description="Quadratic norm spec, e.g. quad:[[4,0],[0,1]]")],
    x: Annotated[str, Field(description="Nonzero point as comma-separated coordinates")],
) -> str:
    try:
        h = parse_norm(norm)
        kmap = KelvinMap.for_norm(h)
        v = _point(x, h.n)
        y = kelvin_map_point(kmap, v)
        return json.dumps(
            {"norm": h.spec, "x": v.tolist(), "image": y.tolist(), "reciprocity": h.dual().value(y) * h.value(v)},
            sort_keys=True,
        )
    except (FinslerError, UsageError) as e:
        return _error(e)


@mcp.tool(
    name="p-laplacian",
    description="Evaluate the anisotropic p-Laplacian of a field at a point"
)
async def p_laplacian(
    norm: Annotated[str, Field(description="Norm spec: quad:[[4,0],[0,1]], q:4 or euclidean")],
    field: Annotated[str, Field(description="Field spec, e.g. poly:y1^2+y2^2, exp:0.3,-0.2, log-norm")],
    x: Annotated[str, Field(description="Point as comma-separated coordinates")],
    p: Annotated[float, Field(description="Exponent p > 1", gt=1.0)] = 2.0,
    n: Annotated[Optional[int], Field(description="Dimension for q: and euclidean norms (default 2)")] = None,
    step: Annotated[Optional[float], Field(description="Divergence step; default follows the step-size policy")] = None,
) -> str:
    try:
        h = parse_norm(norm, n)
        u = parse_field(field, h.n, h)
        v = _point(x, h.n)
        cfg = OperatorConfig(p=p, h_flux=step)
        terms = finsler_p_laplacian_terms(h, cfg, u, v)
        return json.dumps(
            {"norm": h.spec, "field": u.label, "x": v.tolist(), "p": p,
             "value": terms.value, "magnitude": terms.magnitude},
            sort_keys=True,
        )
    except (FinslerError, UsageError, ValidationError) as e:
        return _error(e)


@mcp.tool(
    name="run-check",
    description="Run one finsler-verify check from a command line and return its JSON report"
)
async def run_check(
    args: Annotated[str, Field(description="Arguments as on the command line, e.g. 'theorem1 --norm quad:[[4,0],[0,1]] --points 20'")],
) -> str:
    try:
        ns = build_parser().parse_args(shlex.split(args))
    except SystemExit:
        return _error(UsageError(f"could not parse arguments {args!r}"))
    try:
        report = execute(CliConfig.from_namespace(ns))
    except (FinslerError, UsageError, ValidationError, ValueError, ArithmeticError) as e:
        return _error(e)
    return report.to_json()


if __name__ == "__main__":
    mcp.run()
