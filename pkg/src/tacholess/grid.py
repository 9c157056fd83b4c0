"""Shared RPM hypothesis grid and grid-aligned log-likelihoods."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

NORMALIZATION_TOL = 1e-9


@dataclass(frozen=True)
class RpmGrid:
    """Uniform discretization of the feasible speed range [r_min, r_max] RPM.

    Point g (0-based) sits at ``r_min + g * step``; the same arithmetic is used
    everywhere downstream so index math and axis values never disagree.
    """

    r_min: float
    r_max: float
    n_points: int
    values: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not np.isfinite(self.r_min) or self.r_min <= 0:
            raise ValueError(f"grid.r_min must be positive and finite, got {self.r_min}")
        if not np.isfinite(self.r_max) or self.r_max <= self.r_min:
            raise ValueError(
                f"grid.r_max must exceed r_min, got [{self.r_min}, {self.r_max}]"
            )
        if self.n_points < 2:
            raise ValueError(f"grid.n_points must be >= 2, got {self.n_points}")
        vals = self.r_min + np.arange(self.n_points) * self.step
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_step(cls, r_min: float, r_max: float, step_rpm: float) -> "RpmGrid":
        """Build a grid from a step size, holding r_min and the step exact.

        r_max is snapped to the nearest whole number of steps.
        """
        if step_rpm <= 0:
            raise ValueError(f"grid step must be positive, got {step_rpm}")
        n = int(round((r_max - r_min) / step_rpm)) + 1
        if n < 2:
            raise ValueError(f"grid [{r_min}, {r_max}] step {step_rpm} has fewer than 2 points")
        return cls(r_min, r_min + (n - 1) * step_rpm, n)

    @property
    def step(self) -> float:
        return (self.r_max - self.r_min) / (self.n_points - 1)

    def __len__(self) -> int:
        return self.n_points


@dataclass(frozen=True)
class GridLogLikelihood:
    """Normalized log-likelihood over an RpmGrid: logsumexp(log_values) == 0."""

    grid: RpmGrid
    log_values: np.ndarray
    estimator_id: str

    def __post_init__(self):
        lv = np.asarray(self.log_values, dtype=np.float64)
        if lv.shape != (self.grid.n_points,):
            raise ValueError(
                f"log_values shape {lv.shape} does not match grid ({self.grid.n_points},)"
            )
        if not np.all(np.isfinite(lv)):
            raise ValueError(f"log-likelihood '{self.estimator_id}' has non-finite values")
        norm = logsumexp(lv)
        if abs(norm) > NORMALIZATION_TOL:
            raise ValueError(
                f"log-likelihood '{self.estimator_id}' not normalized: logsumexp={norm:.3e}"
            )
        lv.flags.writeable = False
        object.__setattr__(self, "log_values", lv)

    def probabilities(self) -> np.ndarray:
        return np.exp(self.log_values)
