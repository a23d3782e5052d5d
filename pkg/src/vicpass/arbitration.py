"""Gaussian fusion of wrench commands and stiffness modulation.

Several attractors each propose a wrench with an uncertainty ellipsoid.  The
product of those Gaussians yields a fused command plus one scaling matrix per
attractor; the scalings always sum to the identity, so arbitration follows
confidence without inventing or destroying command authority.  A scaling can
then be pushed through a chart into an equivalent modulated stiffness, whose
symmetric part drives a regular spring and whose skew remainder is handled
separately by the curl passivation.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ChartSingularityError, IllConditionedCovarianceError
from .geom import Pose
from .impedance import ManifoldChart, chart_transform

CONDITION_LIMIT = 1e12


@dataclass
class GaussianWrench:
    """A wrench command with a covariance expressing its confidence."""

    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=float).reshape(-1)
        self.covariance = np.asarray(self.covariance, dtype=float)
        n = self.mean.shape[0]
        if self.covariance.shape != (n, n):
            raise ValueError("covariance shape must match the mean dimension")
        scale = max(1.0, float(np.max(np.abs(self.covariance))))
        if np.max(np.abs(self.covariance - self.covariance.T)) > 1e-9 * scale:
            raise ValueError("covariance must be symmetric within 1e-9")


@dataclass
class StiffnessDecomposition:
    """Symmetric spring part and skew remainder of a modulated stiffness."""

    symmetric: np.ndarray
    skew: np.ndarray


def _checked_precision(covariance):
    """Invert an SPD covariance through its eigenfactorization.

    Near-singular or indefinite covariances raise instead of being silently
    regularized, so degenerate configurations surface immediately.
    """
    cov = 0.5 * (covariance + covariance.T)
    lam, Q = np.linalg.eigh(cov)
    if lam[0] <= 0.0 or lam[-1] / lam[0] > CONDITION_LIMIT:
        raise IllConditionedCovarianceError(
            f"covariance condition {lam[-1]:.3e}/{lam[0]:.3e} exceeds {CONDITION_LIMIT:g}"
        )
    P = Q @ np.diag(1.0 / lam) @ Q.T
    return 0.5 * (P + P.T)


def gaussian_product(inputs):
    """Fuse Gaussian wrench commands; return the product and per-input scalings.

    The fused covariance is the inverse of the summed precisions, the fused
    mean is the precision-weighted mean, and scaling i is fused covariance
    times precision i.  The scalings sum to the identity.
    """
    if len(inputs) == 0:
        raise ValueError("gaussian_product needs at least one input")
    precisions = [_checked_precision(g.covariance) for g in inputs]
    P = np.zeros_like(precisions[0])
    for Pi in precisions:
        P = P + Pi
    lam, Q = np.linalg.eigh(P)
    if lam[0] <= 0.0 or lam[-1] / lam[0] > CONDITION_LIMIT:
        raise IllConditionedCovarianceError(
            f"fused precision condition {lam[-1]:.3e}/{lam[0]:.3e} exceeds {CONDITION_LIMIT:g}"
        )
    Sigma = Q @ np.diag(1.0 / lam) @ Q.T
    Sigma = 0.5 * (Sigma + Sigma.T)
    weighted = np.zeros_like(inputs[0].mean)
    for g, Pi in zip(inputs, precisions):
        weighted = weighted + Pi @ g.mean
    fused = GaussianWrench(mean=Sigma @ weighted, covariance=Sigma)
    scalings = [Sigma @ Pi for Pi in precisions]
    return fused, scalings


def scaling_to_stiffness(S, chart: ManifoldChart, ee_pose: Pose, K_p):
    """Turn a wrench-space scaling into an equivalent stiffness modulation.

    Returns K' with S T K_p = T K' where T is the chart's wrench transform at
    the current pose, so scaling the spring wrench and springing with the
    modulated stiffness produce identical commands.  Raises
    :class:`ChartSingularityError` where the chart transform is undefined.
    """
    S = np.asarray(S, dtype=float)
    K_p = np.asarray(K_p, dtype=float)
    T = chart_transform(chart, ee_pose)
    return np.linalg.solve(T, S @ (T @ K_p))


def symmetrize_split(K):
    """Split a matrix into its symmetric and skew-symmetric parts."""
    K = np.asarray(K, dtype=float)
    symmetric = 0.5 * (K + K.T)
    skew = 0.5 * (K - K.T)
    return StiffnessDecomposition(symmetric=symmetric, skew=skew)
