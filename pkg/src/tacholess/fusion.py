"""Weighted log-linear pooling of grid log-likelihoods."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.special import logsumexp

from .grid import GridLogLikelihood, RpmGrid

# probabilities are floored here before weighting so a zero bin cannot veto
LOG_PROB_FLOOR = float(np.log(1e-300))


@dataclass(frozen=True)
class FusionWeights:
    """Per-estimator pooling weights; estimators not listed default to 1.0."""

    weights: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for eid, w in self.weights.items():
            if not np.isfinite(w) or w < 0:
                raise ValueError(f"fusion weight for '{eid}' must be >= 0 and finite, got {w}")

    def weight_for(self, estimator_id: str) -> float:
        return float(self.weights.get(estimator_id, 1.0))


def _require_shared_grid(likelihoods: Sequence[GridLogLikelihood]) -> RpmGrid:
    grid = likelihoods[0].grid
    for lik in likelihoods[1:]:
        g = lik.grid
        if (g.r_min, g.r_max, g.n_points) != (grid.r_min, grid.r_max, grid.n_points):
            raise ValueError(
                f"cannot fuse '{lik.estimator_id}': grid [{g.r_min}, {g.r_max}]x{g.n_points} "
                f"differs from [{grid.r_min}, {grid.r_max}]x{grid.n_points}"
            )
    return grid


def fuse_loglik(likelihoods: Sequence[GridLogLikelihood],
                weights: FusionWeights | None = None) -> GridLogLikelihood:
    """log L(g) = sum_i w_i * log p_i(g), renormalized over the grid.

    A weight of zero drops that estimator exactly; at least one effective
    weight must be positive.
    """
    if not likelihoods:
        raise ValueError("fuse_loglik needs at least one likelihood")
    weights = weights or FusionWeights()
    grid = _require_shared_grid(likelihoods)
    w = np.array([weights.weight_for(lik.estimator_id) for lik in likelihoods])
    if not np.any(w > 0):
        raise ValueError(
            "all fusion weights are zero for "
            + ", ".join(lik.estimator_id for lik in likelihoods)
        )
    acc = np.zeros(grid.n_points)
    for wi, lik in zip(w, likelihoods):
        if wi > 0:
            acc += wi * np.maximum(lik.log_values, LOG_PROB_FLOOR)
    acc -= logsumexp(acc)
    return GridLogLikelihood(grid=grid, log_values=acc, estimator_id="fused")


def mass_entropy(p: np.ndarray) -> float:
    """Shannon entropy in nats of a probability vector; 0*log(0) taken as 0."""
    p = np.asarray(p, dtype=np.float64)
    pos = p > 0
    return float(-np.sum(p[pos] * np.log(p[pos])))


def posterior_entropy(loglik: GridLogLikelihood) -> float:
    """Entropy of the normalized likelihood; high entropy flags conflicting frames."""
    return mass_entropy(loglik.probabilities())
