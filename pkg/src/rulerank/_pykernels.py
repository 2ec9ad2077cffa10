"""NumPy reference implementations of the hot statistic kernels.

The compiled twin in ``_fastkernels`` mirrors these two-pass algorithms;
``rulerank.kernels`` selects whichever backend is available at import.
"""

from __future__ import annotations

import numpy as np


def studentized_moments(d: np.ndarray, kappa: float, shift: float) -> tuple[float, float]:
    """Mean and standard error of the bias-adjusted differences.

    Applies x -> (x - shift) - kappa * |x - shift| elementwise and returns
    ``(mean, se)`` with se^2 = sum((x_adj - mean)^2) / (m * (m - 1)).
    The caller guarantees m >= 2.
    """
    x = d - shift
    adj = x - kappa * np.abs(x)
    mean = float(adj.mean())
    dev = adj - mean
    m = adj.size
    return mean, float(np.sqrt(float(dev @ dev) / (m * (m - 1.0))))


def signed_moments(d: np.ndarray) -> tuple[float, float, float, float, float]:
    """First and second sample moments of d and |d|, 1/m-normalized.

    Returns ``(mean, mean_abs, var, var_abs, cov)``.
    """
    m = d.size
    a = np.abs(d)
    mean = float(d.mean())
    mean_abs = float(a.mean())
    dev = d - mean
    dev_abs = a - mean_abs
    return (
        mean,
        mean_abs,
        float(dev @ dev) / m,
        float(dev_abs @ dev_abs) / m,
        float(dev @ dev_abs) / m,
    )
