"""Aligning native-axis evidence curves onto the shared RPM grid.

The pipeline per curve: map the native axis to RPM, robust-standardize the
values (median/IQR), flip sign by polarity so low energy = plausible, weight
points by exp(-beta * energy), and spread each weighted point onto the grid
with a truncated Gaussian kernel. The aggregated mass is floored and
log-normalized into a :class:`GridLogLikelihood`.

No change-of-variables correction is applied when mapping reciprocal axes
(lag/quefrency) to RPM; the kernel aggregation operates on mapped point
locations as-is.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .estimators import AxisType, EvidenceCurve, Polarity
from .grid import GridLogLikelihood, RpmGrid

# floor added to aggregated kernel mass so log-values stay finite everywhere;
# far below any curve's evidence scale
LIKELIHOOD_FLOOR = float(np.finfo(np.float64).tiny)


@dataclass(frozen=True)
class CurveToGridConfig:
    beta: float = 1.0
    kernel_bandwidth_rpm: float = 0.5
    eps_norm: float = 1e-10
    kernel_truncation_sigmas: float = 6.0

    def __post_init__(self):
        for name in ("beta", "kernel_bandwidth_rpm", "eps_norm", "kernel_truncation_sigmas"):
            v = getattr(self, name)
            if not np.isfinite(v) or v <= 0:
                raise ValueError(f"alignment.{name} must be positive and finite, got {v}")


def map_axis_to_rpm(z, axis_type: AxisType, sample_rate_hz: float):
    """Convert native axis coordinates to RPM.

    lag/quefrency (samples): 60 * fs / z; hz: 60 * z; rpm: identity.
    """
    z = np.asarray(z, dtype=np.float64)
    if axis_type in (AxisType.LAG, AxisType.QUEFRENCY):
        if np.any(z <= 0):
            raise ValueError(f"{axis_type.value} coordinates must be positive")
        return 60.0 * sample_rate_hz / z
    if axis_type is AxisType.HZ:
        if np.any(z < 0):
            raise ValueError("frequency coordinates must be non-negative")
        return 60.0 * z
    return z.copy()


def robust_standardize(values: np.ndarray, eps: float = 1e-10) -> np.ndarray:
    """(values - median) / (IQR + eps), quartiles by linear interpolation.

    Scale- and offset-robust: outliers move the quartiles little, and a
    degenerate all-equal input comes back as zeros rather than NaN.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise ValueError("cannot standardize an empty vector")
    if not np.all(np.isfinite(v)):
        raise ValueError("cannot standardize non-finite values")
    q1, med, q3 = np.percentile(v, [25.0, 50.0, 75.0])
    return (v - med) / ((q3 - q1) + eps)


def to_energy(standardized: np.ndarray, polarity: Polarity) -> np.ndarray:
    """Orient standardized values so that smaller energy means more plausible."""
    return -float(polarity.value) * np.asarray(standardized, dtype=np.float64)


def curve_to_grid_loglik(curve: EvidenceCurve, grid: RpmGrid, cfg: CurveToGridConfig,
                         sample_rate_hz: float) -> GridLogLikelihood:
    """Aggregate one evidence curve into a normalized grid log-likelihood.

    Each curve point m contributes exp(-beta * E[m]) times a Gaussian kernel
    (bandwidth in RPM, truncated at cfg.kernel_truncation_sigmas) centered at
    its mapped RPM. Points whose kernel window misses the grid entirely are
    dropped; if that drops everything the curve is disjoint from the grid.
    """
    rpm = map_axis_to_rpm(curve.axis, curve.axis_type, sample_rate_hz)
    energy = to_energy(robust_standardize(curve.values, cfg.eps_norm), curve.polarity)
    log_w = -cfg.beta * energy
    log_w -= log_w.max()  # overall scale cancels in normalization; avoids exp overflow
    weights = np.exp(log_w)

    h = cfg.kernel_bandwidth_rpm
    radius = cfg.kernel_truncation_sigmas * h
    inside = (rpm >= grid.r_min - radius) & (rpm <= grid.r_max + radius)
    if not np.any(inside):
        raise ValueError(
            f"curve '{curve.estimator_id}' disjoint from grid: all {len(rpm)} points map "
            f"outside [{grid.r_min}, {grid.r_max}] RPM (+/- {radius:.3g} kernel reach)"
        )
    rpm = rpm[inside]
    weights = weights[inside]

    dr = grid.step
    half = int(np.ceil(radius / dr))
    centers = np.round((rpm - grid.r_min) / dr).astype(np.int64)
    idx = centers[:, None] + np.arange(-half, half + 1)[None, :]
    u = (grid.r_min + idx * dr - rpm[:, None]) / h
    kern = np.where(np.abs(u) <= cfg.kernel_truncation_sigmas,
                    np.exp(-0.5 * u * u), 0.0)
    valid = (idx >= 0) & (idx < grid.n_points)
    mass = np.bincount(idx[valid], weights=(weights[:, None] * kern)[valid],
                       minlength=grid.n_points)

    log_values = np.log(mass + LIKELIHOOD_FLOOR)
    log_values -= logsumexp(log_values)
    return GridLogLikelihood(grid=grid, log_values=log_values,
                             estimator_id=curve.estimator_id)
