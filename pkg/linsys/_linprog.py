# Copyright © 2025 The linsys developers

"""
Small LP helpers shared by the closure oracles and the direction LPs.

Every LP in linsys is solved with :func:`scipy.optimize.linprog` using the
HiGHS backend. The helpers translate solver status codes into three outcomes:
an optimum, a proven infeasibility, or an :class:`LPSolverError`.
"""

import logging

import numpy as np
from scipy.optimize import linprog

from .exceptions import LPSolverError

logger = logging.getLogger(__name__)

# scipy.optimize.linprog status codes
_OPTIMAL = 0
_INFEASIBLE = 2


def solve(
    c,
    A_ub=None,
    b_ub=None,
    A_eq=None,
    b_eq=None,
    bounds=(0, None),
    options=None,
    confirm_infeasible=False,
):
    """Minimize ``c @ x`` and return ``(x, value)`` or ``None`` when infeasible.

    Parameters
    ----------
    c : array-like
        Objective coefficients.
    A_ub, b_ub, A_eq, b_eq, bounds
        Passed through to :func:`scipy.optimize.linprog`.
    options : dict, optional
        HiGHS options, e.g. ``primal_feasibility_tolerance``.
    confirm_infeasible : bool, optional (default: False)
        Re-solve with presolve switched off before reporting infeasibility.
        Presolve can misjudge rows that are feasible only up to the solver
        tolerance.

    Returns
    -------
    result : tuple of (ndarray, float) or None
        The optimizer and optimal value, or None for a proven infeasible LP.

    Raises
    ------
    LPSolverError
        When the solver stops for any other reason (iteration limit,
        unboundedness, numerical trouble).
    """
    _options = dict(options or {})
    _res = _linprog(c, A_ub, b_ub, A_eq, b_eq, bounds, _options)
    if _res.status == _INFEASIBLE and confirm_infeasible:
        logger.debug("infeasible after presolve; re-solving without it")
        _options["presolve"] = False
        _res = _linprog(c, A_ub, b_ub, A_eq, b_eq, bounds, _options)
    if _res.status == _OPTIMAL:
        return _res.x, float(_res.fun)
    if _res.status == _INFEASIBLE:
        return None
    raise LPSolverError(
        "LP solver failed with status {0}: {1}".format(_res.status, _res.message)
    )


def _linprog(c, A_ub, b_ub, A_eq, b_eq, bounds, options):
    _res = linprog(
        np.asarray(c, dtype=float),
        A_ub=A_ub,
        b_ub=b_ub,
        A_eq=A_eq,
        b_eq=b_eq,
        bounds=bounds,
        method="highs",
        options=options or None,
    )
    logger.debug("linprog status=%s message=%s", _res.status, _res.message)
    return _res


def max_min_over_l1_ball(rows, weights=None, floor_rows=None, floor_rhs=None):
    """Solve ``max t`` over the unit l1 ball with the positive/negative split.

    The program is::

        max  t
        s.t. rows[j] @ (y+ - y-) >= t * weights[j]       for every j
             floor_rows[k] @ (y+ - y-) >= floor_rhs[k]   for every k
             1'y+ + 1'y- <= 1,  y+, y- >= 0

    Parameters
    ----------
    rows : ndarray, shape (m, p)
        Rows entering the max-min objective.
    weights : ndarray, shape (m,), optional
        Positive divisors for the objective rows (default: all ones).
    floor_rows : ndarray, shape (k, p), optional
        Rows that must clear ``floor_rhs``.
    floor_rhs : ndarray, shape (k,), optional

    Returns
    -------
    result : tuple of (ndarray, float) or None
        ``(y, t)`` with ``y = y+ - y-``, or None when the floor constraints
        cannot be met.
    """
    _rows = np.atleast_2d(np.asarray(rows, dtype=float))
    _m, _p = _rows.shape
    _w = np.ones(_m) if weights is None else np.asarray(weights, dtype=float)

    # Variables: [t, y+ (p), y- (p)]
    _objective = np.zeros(1 + 2 * _p)
    _objective[0] = -1.0

    _blocks = [np.hstack([_w[:, None], -_rows, _rows])]
    _rhs = [np.zeros(_m)]
    if floor_rows is not None and len(floor_rows) > 0:
        _floor = np.atleast_2d(np.asarray(floor_rows, dtype=float))
        _blocks.append(np.hstack([np.zeros((_floor.shape[0], 1)), -_floor, _floor]))
        _rhs.append(-np.asarray(floor_rhs, dtype=float))
    _blocks.append(np.hstack([[0.0], np.ones(2 * _p)])[None, :])
    _rhs.append(np.ones(1))

    _bounds = [(None, None)] + [(0, None)] * (2 * _p)
    _solution = solve(
        _objective, A_ub=np.vstack(_blocks), b_ub=np.concatenate(_rhs), bounds=_bounds
    )
    if _solution is None:
        return None
    _x, _ = _solution
    return _x[1 : 1 + _p] - _x[1 + _p :], float(_x[0])
