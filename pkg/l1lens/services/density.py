"""Gaussian kernel density estimates over one-dimensional rate samples.

Evaluation is done in log space (``scipy.special.logsumexp``) and clamped
at the model floor, so a point far from every support point costs at most
``-log(floor)`` nats.
"""

import math
from collections.abc import Sequence

import numpy as np
from django.conf import settings
from scipy.special import logsumexp

from l1lens.errors import MetricError
from l1lens.schemas.metrics import DensityModel

LOG_SQRT_2PI = 0.5 * math.log(2 * math.pi)


def _default_floor() -> float:
    return float(settings.L1LENS["DENSITY_FLOOR"])


def silverman_bandwidth(values: Sequence[float]) -> float:
    """0.9 * min(sd, IQR / 1.34) * n^(-1/5), with a degenerate fallback."""
    data = np.sort(np.asarray(values, dtype=float))
    n = data.size
    if n < 2:  # noqa: PLR2004
        raise MetricError(f"bandwidth needs at least 2 values, got {n}")
    sd = float(np.std(data, ddof=1))
    q75, q25 = np.percentile(data, [75, 25], method="inverted_cdf")
    iqr = float(q75 - q25)
    if sd == 0 or iqr == 0:
        return max(0.01, 0.1 * abs(float(np.mean(data))))
    return 0.9 * min(sd, iqr / 1.34) * n ** (-1 / 5)


def fit_density(
    values: Sequence[float],
    floor: float | None = None,
    bandwidth: float | None = None,
) -> DensityModel:
    if bandwidth is None:
        bandwidth = silverman_bandwidth(values)
    return DensityModel(
        bandwidth=bandwidth,
        support_points=sorted(float(v) for v in values),
        floor=floor if floor is not None else _default_floor(),
    )


def log_density(model: DensityModel, xs) -> np.ndarray:
    points = np.atleast_1d(np.asarray(xs, dtype=float))
    support = np.asarray(model.support_points, dtype=float)
    h = model.bandwidth
    z = (points[:, None] - support[None, :]) / h
    log_p = (
        logsumexp(-0.5 * z**2, axis=1)
        - math.log(support.size * h)
        - LOG_SQRT_2PI
    )
    return np.maximum(log_p, math.log(model.floor))


def kde_eval(model: DensityModel, x: float) -> float:
    return float(np.exp(log_density(model, [x])[0]))


def leave_one_out_log_density(
    values: Sequence[float], bandwidth: float, floor: float
) -> np.ndarray:
    """log p(x_i) under the estimate fitted on every other point."""
    data = np.asarray(values, dtype=float)
    n = data.size
    if n < 2:  # noqa: PLR2004
        raise MetricError("leave-one-out needs at least 2 values")
    z = (data[:, None] - data[None, :]) / bandwidth
    kernel = -0.5 * z**2
    np.fill_diagonal(kernel, -np.inf)
    log_p = (
        logsumexp(kernel, axis=1)
        - math.log((n - 1) * bandwidth)
        - LOG_SQRT_2PI
    )
    return np.maximum(log_p, math.log(floor))


def grid_bounds(models: Sequence[DensityModel]) -> tuple[float, float]:
    lows = [m.support_points[0] - 3 * m.bandwidth for m in models]
    highs = [m.support_points[-1] + 3 * m.bandwidth for m in models]
    return min(lows), max(highs)


def density_grid(
    models: DensityModel | Sequence[DensityModel],
    points: int | None = None,
) -> tuple[np.ndarray, list[np.ndarray]]:
    """Densities of every model on one shared grid.

    The grid spans [min - 3h, max + 3h] over all models.
    """
    if isinstance(models, DensityModel):
        models = [models]
    if not models:
        raise MetricError("no density models to evaluate")
    if points is None:
        points = settings.L1LENS["DENSITY_GRID_POINTS"]
    low, high = grid_bounds(models)
    grid = np.linspace(low, high, points)
    return grid, [np.exp(log_density(model, grid)) for model in models]
