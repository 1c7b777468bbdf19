"""Reproducible sample points in an annulus r_min ≤ |x| ≤ r_max."""

from __future__ import annotations

import logging
from typing import Callable, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import TooFewSamples

logger = logging.getLogger(__name__)

MAX_REJECTION_ROUNDS = 100

Exclusion = Callable[[np.ndarray], bool]


class SampleSpec(BaseModel):
    """Seeded sample specification; the same seed always yields the same points.

    ``exclude`` marks points to skip (degenerate-gradient loci, singular sets).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    seed: int = 0
    count: int = Field(default=100, ge=1)
    r_min: float = Field(default=0.0, ge=0.0)
    r_max: float = 1.0
    exclude: Optional[Exclusion] = None

    @model_validator(mode="after")
    def _check_annulus(self) -> "SampleSpec":
        if self.r_min >= self.r_max:
            raise ValueError(f"need 0 <= r_min < r_max, got [{self.r_min}, {self.r_max}]")
        return self

    def with_exclusion(self, exclude: Exclusion) -> "SampleSpec":
        return self.model_copy(update={"exclude": exclude})

    def excluding(self, predicate: Exclusion) -> "SampleSpec":
        """Add ``predicate`` to the existing exclusion."""
        prior = self.exclude
        if prior is None:
            return self.with_exclusion(predicate)
        return self.with_exclusion(lambda x: prior(x) or predicate(x))

    def with_annulus(self, r_min: float, r_max: float) -> "SampleSpec":
        return SampleSpec(seed=self.seed, count=self.count, r_min=r_min, r_max=r_max, exclude=self.exclude)

    def points(self, n: int) -> np.ndarray:
        """``count`` points, direction uniform on the sphere, radius uniform."""
        rng = np.random.default_rng(self.seed)
        accepted: list[np.ndarray] = []
        for _ in range(MAX_REJECTION_ROUNDS):
            need = self.count - len(accepted)
            g = rng.standard_normal((need, n))
            g /= np.linalg.norm(g, axis=1, keepdims=True)
            r = rng.uniform(self.r_min, self.r_max, size=need)
            for x in g * r[:, None]:
                if self.exclude is None or not self.exclude(x):
                    accepted.append(x)
            if len(accepted) == self.count:
                logger.debug("drew %d points in R^%d (seed %d)", self.count, n, self.seed)
                return np.array(accepted)
        raise TooFewSamples(
            f"only {len(accepted)} of {self.count} points survived the exclusion predicate"
        )

    def describe(self) -> dict:
        return {"seed": self.seed, "count": self.count, "r_min": self.r_min, "r_max": self.r_max}


def avoid_coordinate_planes(tol: float = 1e-3) -> Exclusion:
    """Exclude points with a coordinate closer than ``tol`` to zero."""
    return lambda x: bool(np.min(np.abs(x)) < tol)


__all__ = ["SampleSpec", "avoid_coordinate_planes"]
