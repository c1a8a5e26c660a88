# Copyright © 2025 The linsys developers

"""
Monte Carlo rejection curves.

For every hypothesized value on a grid and every replication a fresh data
set is drawn, both test variants are run on that same data set, and the
rejections are tallied. Seeds are derived from ``(base_seed, grid_index,
rep)`` so any subset of replications can be recomputed, in any order or in
parallel, with identical results.

Examples
--------

>>> from linsys.simulation import monte_carlo
>>> _curve = monte_carlo("cox", grid=[-1.0, 1.0], reps=2, n=200, H=3, base_seed=7)
>>> _curve.to_frame().shape
(2, 7)
"""

from dataclasses import dataclass
from typing import Tuple
import io
import logging
import math

import numpy as np
import pandas as pd

from ._parallel import parallel_map
from ._random import check_seed
from ._random import derive_seed
from .designs import DesignSpec
from .direction import CnRegime
from .direction import Method
from .direction import MethodChoice
from .exceptions import ReplicationError
from .split_test import TestOptions
from .split_test import check_first_split
from .split_test import run_test

__all__ = ["CSV_COLUMNS", "RejectionCurve", "monte_carlo"]

logger = logging.getLogger(__name__)

CSV_COLUMNS = (
    "value",
    "reject_direct",
    "se_direct",
    "reject_screening",
    "se_screening",
    "reps",
    "n",
)


def _mc_se(frequencies, reps):
    _f = np.asarray(frequencies, dtype=float)
    return np.sqrt(_f * (1.0 - _f) / reps)


@dataclass(frozen=True)
class RejectionCurve:
    """Rejection frequencies over a grid of hypothesized values.

    Attributes
    ----------
    grid : ndarray
    reject_direct, reject_screening : ndarray
        Frequencies in ``[0, 1]``; NaN for a method that was not run.
    reps, n : int
    """

    grid: np.ndarray
    reject_direct: np.ndarray
    reject_screening: np.ndarray
    reps: int
    n: int

    @property
    def se_direct(self) -> np.ndarray:
        return _mc_se(self.reject_direct, self.reps)

    @property
    def se_screening(self) -> np.ndarray:
        return _mc_se(self.reject_screening, self.reps)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "value": self.grid,
                "reject_direct": self.reject_direct,
                "se_direct": self.se_direct,
                "reject_screening": self.reject_screening,
                "se_screening": self.se_screening,
                "reps": self.reps,
                "n": self.n,
            },
            columns=list(CSV_COLUMNS),
        )

    def to_csv(self, path=None):
        """Write the CSV; returns the text when ``path`` is None."""
        return self.to_frame().to_csv(path, index=False)

    @staticmethod
    def from_csv(path_or_buffer):
        """Read a curve written by :meth:`to_csv` (a path, buffer or CSV text)."""
        if isinstance(path_or_buffer, str) and "\n" in path_or_buffer:
            path_or_buffer = io.StringIO(path_or_buffer)
        _frame = pd.read_csv(path_or_buffer)
        _missing = [_c for _c in CSV_COLUMNS if _c not in _frame.columns]
        if _missing:
            raise ValueError("rejection curve CSV lacks columns {0}".format(_missing))
        if _frame.empty:
            raise ValueError("rejection curve CSV has no rows")
        return RejectionCurve(
            grid=_frame["value"].to_numpy(dtype=float),
            reject_direct=_frame["reject_direct"].to_numpy(dtype=float),
            reject_screening=_frame["reject_screening"].to_numpy(dtype=float),
            reps=int(_frame["reps"].iloc[0]),
            n=int(_frame["n"].iloc[0]),
        )

    def to_dict(self) -> dict:
        return {
            "grid": self.grid.tolist(),
            "reject_direct": self.reject_direct.tolist(),
            "se_direct": self.se_direct.tolist(),
            "reject_screening": self.reject_screening.tolist(),
            "se_screening": self.se_screening.tolist(),
            "reps": self.reps,
            "n": self.n,
        }

    def __eq__(self, other):
        if not isinstance(other, RejectionCurve):
            return NotImplemented
        return (
            self.reps == other.reps
            and self.n == other.n
            and np.array_equal(self.grid, other.grid)
            and np.array_equal(self.reject_direct, other.reject_direct, equal_nan=True)
            and np.array_equal(
                self.reject_screening, other.reject_screening, equal_nan=True
            )
        )

    __hash__ = None


def _as_choice(method, cn_regime):
    if isinstance(method, MethodChoice):
        return method
    return MethodChoice(kind=Method(method), cn_regime=CnRegime(cn_regime))


def _replicate(
    design, grid_index, value, rep, n, H, methods, alpha, base_seed, options
):
    _data_seed = derive_seed(base_seed, grid_index, rep)
    _split_seed = derive_seed(base_seed, grid_index, rep, 1)
    try:
        if callable(design):
            _data, _model = design(value, n, _data_seed)
        else:
            _data, _model = DesignSpec(
                kind=design, n=n, hypothesized_value=value, seed=_data_seed, H=H
            ).generate()
        return tuple(
            run_test(
                _model,
                _data,
                method=_method,
                alpha=alpha,
                seed=_split_seed,
                options=options,
            ).reject
            for _method in methods
        )
    except Exception as _err:
        raise ReplicationError(
            "replication {0} at value {1} (grid index {2}, data seed {3}) failed: "
            "{4}".format(rep, value, grid_index, _data_seed, _err)
        ) from _err


def monte_carlo(
    design,
    grid,
    reps,
    n,
    methods=("direct", "screening"),
    alpha=0.05,
    base_seed=0,
    H=None,
    cn_regime="high",
    options=None,
    n_jobs=None,
) -> RejectionCurve:
    """Estimate rejection frequencies of each test variant over a grid.

    Parameters
    ----------
    design : str, :class:`linsys.designs.DesignKind` or callable
        A built-in design, or a function ``(value, n, seed) -> (data, model)``.
    grid : array-like of float
        Hypothesized values.
    reps : int
        Replications per grid value.
    n : int
        Sample size of each replication.
    methods : sequence of str or :class:`linsys.direction.MethodChoice`
        Variants to run, each at most once among direct and screening.
    alpha : float, optional (default: 0.05)
    base_seed : int, optional (default: 0)
    H : int, optional
        Number of restrictions for the cox design.
    cn_regime : str, optional (default: "high")
    options : :class:`linsys.split_test.TestOptions`, optional
    n_jobs : int, optional
        joblib workers, capped by ``LINSYS_THREADS``.

    Returns
    -------
    curve : :class:`RejectionCurve`

    Raises
    ------
    ValueError
        For invalid settings, including a built-in design whose sample size
        is too small for the screening weights.
    ReplicationError
        When any replication fails.
    """
    if isinstance(reps, bool) or not isinstance(reps, (int, np.integer)) or reps < 1:
        raise ValueError("reps must be a positive integer, cannot be {0}".format(reps))
    _grid = np.asarray(grid, dtype=float).ravel()
    if _grid.size == 0:
        raise ValueError("grid must be non-empty")
    _base_seed = check_seed(base_seed, "base_seed")
    _methods = tuple(_as_choice(_m, cn_regime) for _m in methods)
    _kinds = [_m.kind for _m in _methods]
    if not _methods or len(set(_kinds)) != len(_kinds):
        raise ValueError("methods must name direct and/or screening once each")
    if not callable(design):
        _model = DesignSpec(
            kind=design, n=n, hypothesized_value=float(_grid[0]), H=H
        ).model()
        _fraction = (options or TestOptions()).split_fraction
        for _method in _methods:
            check_first_split(_model, n, _method, _fraction)

    _tallies = np.zeros((_grid.size, len(_methods)))
    for _gi, _value in enumerate(_grid):
        _results = parallel_map(
            _replicate,
            [
                (design, _gi, _value, _r, n, H, _methods, alpha, _base_seed, options)
                for _r in range(reps)
            ],
            n_jobs=n_jobs,
        )
        _tallies[_gi] = np.sum(np.asarray(_results, dtype=float), axis=0)
        logger.info(
            "value %.6g: rejections %s out of %d",
            _value,
            _tallies[_gi].astype(int).tolist(),
            reps,
        )

    _freq = _tallies / reps
    _columns = {_k: _freq[:, _i] for _i, _k in enumerate(_kinds)}
    _missing = np.full(_grid.size, math.nan)
    return RejectionCurve(
        grid=_grid,
        reject_direct=_columns.get(Method.DIRECT, _missing),
        reject_screening=_columns.get(Method.SCREENING, _missing),
        reps=int(reps),
        n=int(n),
    )
