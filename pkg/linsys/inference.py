# Copyright © 2025 The linsys developers

"""
Normal distribution helpers and p-value aggregation across splits.
"""

from enum import Enum

import numpy as np
from scipy.special import ndtri
from scipy.stats import norm

__all__ = ["Combiner", "normal_quantile", "normal_cdf", "aggregate_pvalues"]


class Combiner(Enum):
    """Rules for merging p-values from independent sample splits."""

    TWICE_AVERAGE = "twice_average"
    EXCHANGEABLE = "exchangeable"


def normal_quantile(q) -> float:
    """Standard normal quantile.

    >>> from linsys.inference import normal_quantile
    >>> round(normal_quantile(0.95), 7)
    1.6448536

    Raises
    ------
    ValueError
        Unless ``0 < q < 1``.
    """
    if not 0.0 < q < 1.0:
        raise ValueError("q must be in (0, 1), cannot be {0}".format(q))
    return float(ndtri(q))


def normal_cdf(x) -> float:
    """Standard normal distribution function."""
    return float(norm.cdf(x))


def aggregate_pvalues(p_values, strategy=Combiner.TWICE_AVERAGE) -> float:
    """Combine p-values obtained from different random splits.

    Parameters
    ----------
    p_values : sequence of float
        Values in ``[0, 1]``.
    strategy : :class:`Combiner` or str, optional (default: "twice_average")
        ``"twice_average"`` returns ``min(1, 2 * mean(p_values))``, which is
        valid under arbitrary dependence between the splits.

    Returns
    -------
    p_value : float

    Examples
    --------

    >>> from linsys.inference import aggregate_pvalues
    >>> round(aggregate_pvalues([0.01, 0.03]), 12)
    0.04
    >>> aggregate_pvalues([0.5, 0.5])
    1.0
    """
    _p = np.asarray(p_values, dtype=float).ravel()
    if _p.size == 0:
        raise ValueError("p_values must be non-empty")
    if np.any(~np.isfinite(_p)) or np.any(_p < 0.0) or np.any(_p > 1.0):
        raise ValueError("p_values must lie in [0, 1], found {0}".format(_p))
    _strategy = Combiner(strategy)
    if _strategy is Combiner.EXCHANGEABLE:
        # TODO: exchangeable-splits refinement of twice-the-average.
        raise NotImplementedError("the exchangeable combiner is not available yet")
    return float(min(1.0, 2.0 * _p.mean()))
