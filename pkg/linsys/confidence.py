# Copyright © 2025 The linsys developers

"""
Confidence sets by test inversion.

A scalar parameter whose hypothesized value enters only ``b_{d1+1}`` is
tested at every point of a grid; the confidence set is the set of values
that are not rejected. Optionally the two outermost accept/reject
transitions are refined by bisection.

Examples
--------

>>> import numpy as np
>>> from linsys.confidence import invert_ci
>>> from linsys.designs import gen_cox
>>> _data, _model = gen_cox(H=3, theta=0.0, n=400, seed=4)
>>> _cs = invert_ci(_model, _data, grid=np.linspace(-1.0, 1.0, 5), seed=1)
>>> bool(_cs.accepted[0])
True
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional
from typing import Tuple
import json
import logging

import numpy as np
import pandas as pd

from ._parallel import parallel_map
from ._random import check_seed
from ._random import derive_seed
from .moments import MomentModel
from .split_test import run_test

__all__ = ["SeedPolicy", "ConfidenceSet", "invert_ci"]

logger = logging.getLogger(__name__)

_BISECTION_STEPS = 8


class SeedPolicy(Enum):
    """Which split seed each grid point uses."""

    SHARED = "shared"
    PER_POINT = "per_point"


@dataclass(frozen=True)
class ConfidenceSet:
    """Grid of hypothesized values with their p-values.

    Attributes
    ----------
    grid, p_values : ndarray
    accepted : ndarray of bool
        ``p_values >= alpha``.
    alpha : float
    interval_hull : tuple of float or None
        Ends of the confidence set: the bisected transitions when
        ``refined``, otherwise the smallest and largest accepted grid values.
    grid_hull : tuple of float or None
        Smallest and largest accepted grid value.
    refined : bool
        Whether the outermost transitions were bisected.
    contiguous : bool
        Whether the accepted grid points form one run.
    """

    grid: np.ndarray
    p_values: np.ndarray
    accepted: np.ndarray
    alpha: float
    interval_hull: Optional[Tuple[float, float]]
    grid_hull: Optional[Tuple[float, float]] = None
    refined: bool = False
    contiguous: bool = True

    def to_dict(self) -> dict:
        return {
            "grid": self.grid.tolist(),
            "p_values": self.p_values.tolist(),
            "accepted": self.accepted.tolist(),
            "alpha": self.alpha,
            "interval_hull": None
            if self.interval_hull is None
            else list(self.interval_hull),
            "grid_hull": None if self.grid_hull is None else list(self.grid_hull),
            "refined": self.refined,
            "contiguous": self.contiguous,
        }

    @staticmethod
    def from_dict(payload):
        def _pair(values):
            return None if values is None else (float(values[0]), float(values[1]))

        return ConfidenceSet(
            grid=np.asarray(payload["grid"], dtype=float),
            p_values=np.asarray(payload["p_values"], dtype=float),
            accepted=np.asarray(payload["accepted"], dtype=bool),
            alpha=float(payload["alpha"]),
            interval_hull=_pair(payload["interval_hull"]),
            grid_hull=_pair(payload.get("grid_hull")),
            refined=bool(payload.get("refined", False)),
            contiguous=bool(payload.get("contiguous", True)),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {"value": self.grid, "p_value": self.p_values, "accepted": self.accepted}
        )

    def __eq__(self, other):
        if not isinstance(other, ConfidenceSet):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    __hash__ = None


def _family(model_family):
    if isinstance(model_family, MomentModel):
        return model_family.with_null_value
    if not callable(model_family):
        raise ValueError(
            "model_family must be a MomentModel or a callable, cannot be {0}".format(
                model_family
            )
        )
    return model_family


def _check_grid(grid):
    _grid = np.asarray(grid, dtype=float).ravel()
    if _grid.size == 0:
        raise ValueError("grid must be non-empty")
    if not np.all(np.isfinite(_grid)):
        raise ValueError("grid has non-finite values")
    if np.any(np.diff(_grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    return _grid


def _p_value(family, data, value, method, alpha, seed, options):
    return run_test(
        family(value), data, method=method, alpha=alpha, seed=seed, options=options
    ).p_value


def _bisect(p_at, accepted_end, rejected_end, alpha, tol):
    """Move the accepted end of an accept/reject bracket toward the transition."""
    while abs(accepted_end - rejected_end) > tol:
        _mid = 0.5 * (accepted_end + rejected_end)
        if p_at(_mid) >= alpha:
            accepted_end = _mid
        else:
            rejected_end = _mid
    return accepted_end


def invert_ci(
    model_family,
    data,
    grid,
    method=None,
    alpha=0.05,
    seed=0,
    seed_policy=SeedPolicy.SHARED,
    options=None,
    refine=False,
    n_jobs=None,
) -> ConfidenceSet:
    """Invert :func:`linsys.split_test.run_test` over a grid.

    Parameters
    ----------
    model_family : :class:`linsys.moments.MomentModel` or callable
        Either a model whose ``null_coef`` entries carry the hypothesized
        value, or a function mapping a value to a model.
    data : pandas.DataFrame or array-like
    grid : array-like of float
        Non-empty and strictly increasing.
    method : :class:`linsys.direction.MethodChoice`, optional
    alpha : float, optional (default: 0.05)
    seed : int, optional (default: 0)
    seed_policy : :class:`SeedPolicy` or str, optional (default: "shared")
        ``"shared"`` reuses ``seed`` at every grid point; ``"per_point"``
        uses ``derive_seed(seed, i)`` at grid index ``i``.
    options : :class:`linsys.split_test.TestOptions`, optional
    refine : bool, optional (default: False)
        Bisect the outermost transitions down to a width of
        ``step / 2**8``, ``step`` being the local grid spacing.
    n_jobs : int, optional
        joblib workers for the grid, capped by ``LINSYS_THREADS``.

    Returns
    -------
    confidence_set : :class:`ConfidenceSet`
    """
    _family_fn = _family(model_family)
    _grid = _check_grid(grid)
    _policy = SeedPolicy(seed_policy)
    _seed = check_seed(seed)

    def _seed_at(index):
        return _seed if _policy is SeedPolicy.SHARED else derive_seed(_seed, index)

    _p_values = np.array(
        parallel_map(
            _p_value,
            [
                (_family_fn, data, _v, method, alpha, _seed_at(_i), options)
                for _i, _v in enumerate(_grid)
            ],
            n_jobs=n_jobs,
        )
    )
    _accepted = _p_values >= alpha
    _where = np.flatnonzero(_accepted)
    if _where.size == 0:
        logger.info("no grid value is accepted at alpha=%s", alpha)
        return ConfidenceSet(
            grid=_grid,
            p_values=_p_values,
            accepted=_accepted,
            alpha=float(alpha),
            interval_hull=None,
        )

    _lo, _hi = int(_where[0]), int(_where[-1])
    _hull = (float(_grid[_lo]), float(_grid[_hi]))
    _contiguous = bool(_where.size == _hi - _lo + 1)

    _interval = _hull
    if refine:
        _refined_lo, _refined_hi = _hull
        if _lo > 0:
            _seed_lo = _seed_at(_lo)

            def _p_lo(value):
                return _p_value(
                    _family_fn, data, value, method, alpha, _seed_lo, options
                )

            _step = _grid[_lo] - _grid[_lo - 1]
            _refined_lo = _bisect(
                _p_lo, _grid[_lo], _grid[_lo - 1], alpha, _step / 2 ** _BISECTION_STEPS
            )
        if _hi < _grid.size - 1:
            _seed_hi = _seed_at(_hi)

            def _p_hi(value):
                return _p_value(
                    _family_fn, data, value, method, alpha, _seed_hi, options
                )

            _step = _grid[_hi + 1] - _grid[_hi]
            _refined_hi = _bisect(
                _p_hi, _grid[_hi], _grid[_hi + 1], alpha, _step / 2 ** _BISECTION_STEPS
            )
        _interval = (float(_refined_lo), float(_refined_hi))

    return ConfidenceSet(
        grid=_grid,
        p_values=_p_values,
        accepted=_accepted,
        alpha=float(alpha),
        interval_hull=_interval,
        grid_hull=_hull,
        refined=bool(refine),
        contiguous=_contiguous,
    )
