# Copyright © 2025 The linsys developers

"""
Direction selection on the first split.

The direction ``y`` is the optimizer of a weighted max-min LP over the unit
l1 ball: the projected moments ``sqrt(n1) b_j' M0 y`` indexed by ``J*`` are
maximized relative to their weights, while every index in the complement of
``J*`` must clear its own weight. When that LP is infeasible the direction is
zero and the test cannot reject.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional
from typing import Tuple
import logging
import math

import numpy as np

from . import _linprog
from .exceptions import LPSolverError
from .exceptions import ModelSpecError
from .linalg import RANK_TOL
from .moments import SIGMA_FLOOR
from .moments import covariance_vj
from .moments import gradient_dj
from .moments import projected_moments
from .moments import sigma_hat

__all__ = [
    "Method",
    "CnRegime",
    "MethodChoice",
    "DirectionResult",
    "resolve_jstar",
    "MIN_FIRST_SPLIT",
    "c_n",
    "solve_prelim",
    "compute_weights",
    "solve_direction",
    "select_direction",
]

logger = logging.getLogger(__name__)

# Relative slack allowed on the screening constraints when re-checking the LP.
_SCREEN_SLACK = 1e-7


class Method(Enum):
    DIRECT = "direct"
    SCREENING = "screening"


class CnRegime(Enum):
    """Growth rate of the inflation factor on the screened weights."""

    LOW_DIM = "low"
    HIGH_DIM = "high"


# Smallest first-split size for which c_n is defined and positive.
MIN_FIRST_SPLIT = {CnRegime.LOW_DIM: 3, CnRegime.HIGH_DIM: 16}


@dataclass(frozen=True)
class MethodChoice:
    """Test variant.

    Parameters
    ----------
    kind : :class:`Method`
    j_star : int, optional
        1-based index kept in ``J*`` by the screening method. Defaults to
        ``d1 + 1``, the ``-beta`` column.
    cn_regime : :class:`CnRegime`, optional (default: HIGH_DIM)
    """

    kind: Method = Method.DIRECT
    j_star: Optional[int] = None
    cn_regime: CnRegime = CnRegime.HIGH_DIM

    @classmethod
    def direct(cls, cn_regime=CnRegime.HIGH_DIM):
        return cls(kind=Method.DIRECT, cn_regime=cn_regime)

    @classmethod
    def screening(cls, j_star=None, cn_regime=CnRegime.HIGH_DIM):
        return cls(kind=Method.SCREENING, j_star=j_star, cn_regime=cn_regime)


@dataclass(frozen=True)
class DirectionResult:
    """Outcome of the direction LP.

    Attributes
    ----------
    y_hat : ndarray of shape (p,)
        LP optimizer, or zeros when infeasible.
    feasible : bool
    t_star : float or None
        Optimal value; None when infeasible.
    weights : ndarray of shape (d1 + 1,)
        Weight of every column; index ``j - 1`` holds column ``j``.
    j_star_set : tuple of int
        Realized ``J*``, 1-based.
    """

    y_hat: np.ndarray
    feasible: bool
    t_star: Optional[float]
    weights: np.ndarray
    j_star_set: Tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "y_hat": self.y_hat.tolist(),
            "feasible": self.feasible,
            "t_star": self.t_star,
            "weights": self.weights.tolist(),
            "j_star_set": list(self.j_star_set),
        }


def resolve_jstar(model, method):
    """Split ``J = {1, ..., d1 + 1}`` into ``J*`` and its complement.

    Parameters
    ----------
    model : :class:`linsys.moments.MomentModel`
    method : :class:`MethodChoice`

    Returns
    -------
    j_star_set, complement : tuple of int
        Both 1-based and sorted.

    Examples
    --------

    >>> from linsys.direction import MethodChoice, resolve_jstar
    >>> from linsys.designs import gen_goff
    >>> _, _model = gen_goff(tau0=0.62, n=50, seed=0)
    >>> resolve_jstar(_model, MethodChoice.direct())
    ((1, 2, 3, 6), (4, 5))
    >>> resolve_jstar(_model, MethodChoice.screening())
    ((6,), (1, 2, 3, 4, 5))
    """
    _all = tuple(range(1, model.d1 + 2))
    if method.kind is Method.DIRECT:
        _complement = tuple(sorted(model.deterministic_columns))
    else:
        _j = model.d1 + 1 if method.j_star is None else method.j_star
        if isinstance(_j, bool) or not isinstance(_j, (int, np.integer)):
            raise ValueError("j_star must be an integer, cannot be {0}".format(_j))
        if not 1 <= _j <= model.d1 + 1:
            raise ValueError(
                "j_star must be in [1, {0}], cannot be {1}".format(model.d1 + 1, _j)
            )
        _complement = tuple(_i for _i in _all if _i != _j)
    _j_star_set = tuple(_i for _i in _all if _i not in _complement)
    if not _j_star_set:
        raise ModelSpecError(
            "every column is deterministic, there is nothing to test"
        )
    return _j_star_set, _complement


def c_n(regime, n1, p, d1) -> float:
    """Inflation factor for the screened weights.

    ``LOW_DIM``: ``sqrt(log(log(n1)))``. ``HIGH_DIM``:
    ``sqrt(log(log(log(n1))) * log(p + d1))``.

    >>> from linsys.direction import CnRegime, c_n
    >>> round(c_n(CnRegime.LOW_DIM, 100, 1, 1), 4)
    1.2358
    >>> round(c_n(CnRegime.HIGH_DIM, 5000, 25, 25), 4)
    1.7263

    Raises
    ------
    ValueError
        When ``n1`` is too small for the iterated logarithm to be positive.
    """
    _regime = CnRegime(regime)
    if n1 < MIN_FIRST_SPLIT[_regime]:
        raise ValueError(
            "n1 = {0} is too small for the {1} c_n sequence".format(n1, _regime.name)
        )
    if _regime is CnRegime.LOW_DIM:
        return math.sqrt(math.log(math.log(n1)))
    if p + d1 < 2:
        raise ValueError("p + d1 must be at least 2, cannot be {0}".format(p + d1))
    return math.sqrt(math.log(math.log(math.log(n1))) * math.log(p + d1))


def _scaled_rows(est, indices, n1):
    _proj = projected_moments(est)
    return math.sqrt(n1) * _proj[[_j - 1 for _j in indices]]


def solve_prelim(est, j_star_set, complement, n1) -> np.ndarray:
    """Preliminary direction used to evaluate the weights.

    Maximizes ``min_{j in J*} sqrt(n1) b_j' M0 y`` over the unit l1 ball
    subject to ``sqrt(n1) b_j' M0 y >= 0`` for ``j`` in the complement.
    """
    _solution = _linprog.max_min_over_l1_ball(
        _scaled_rows(est, j_star_set, n1),
        floor_rows=_scaled_rows(est, complement, n1) if complement else None,
        floor_rhs=np.zeros(len(complement)),
    )
    if _solution is None:
        raise LPSolverError("preliminary direction LP reported infeasible")
    _y, _value = _solution
    logger.debug("preliminary LP value %.6g", _value)
    return _y


def compute_weights(
    est,
    y0,
    j_star_set,
    complement,
    n1,
    sigma_floor=SIGMA_FLOOR,
    cn_regime=CnRegime.HIGH_DIM,
    rank_tol=RANK_TOL,
) -> np.ndarray:
    """Per-column weights evaluated at the preliminary direction ``y0``.

    ``sigma_j(y0)`` for ``j`` in ``J*``, ``c_n * sigma_j(y0)`` for ``j`` in the
    complement. The returned array has ``d1 + 1`` entries, column ``j`` at
    index ``j - 1``.
    """
    _weights = np.empty(est.d1 + 1)
    _truncated = 0
    for _j in range(1, est.d1 + 2):
        _sigma = sigma_hat(
            covariance_vj(est, _j),
            gradient_dj(est.a0_hat, est.b_hat[_j - 1], y0, rank_tol=rank_tol),
            sigma_floor,
        )
        _weights[_j - 1] = _sigma.sigma
        _truncated += _sigma.truncated
    if complement:
        _weights[[_j - 1 for _j in complement]] *= c_n(
            cn_regime, n1, est.p, est.d1
        )
    if _truncated == est.d1 + 1:
        logger.warning("sigma floor binds for every column on the first split")
    return _weights


def solve_direction(est, weights, j_star_set, complement, n1) -> DirectionResult:
    """Solve the weighted max-min direction LP.

    ``max t`` subject to ``sqrt(n1) b_j' M0 y >= t w_j`` for ``j`` in ``J*``,
    ``sqrt(n1) b_j' M0 y >= w_j`` for ``j`` in the complement and
    ``||y||_1 <= 1``.
    """
    _weights = np.asarray(weights, dtype=float)
    if not np.all(_weights > 0):
        raise ValueError("weights must be strictly positive")
    _comp_rows = _scaled_rows(est, complement, n1) if complement else None
    _comp_w = _weights[[_j - 1 for _j in complement]]
    _solution = _linprog.max_min_over_l1_ball(
        _scaled_rows(est, j_star_set, n1),
        weights=_weights[[_j - 1 for _j in j_star_set]],
        floor_rows=_comp_rows,
        floor_rhs=_comp_w,
    )
    _feasible = _solution is not None
    if _feasible and complement:
        _y, _ = _solution
        _shortfall = _comp_w - _comp_rows @ _y
        if np.any(_shortfall > _SCREEN_SLACK * _comp_w):
            logger.debug(
                "direction LP optimum violates screening rows by %.3e",
                float(np.max(_shortfall)),
            )
            _feasible = False

    if not _feasible:
        logger.debug("direction LP infeasible, using y = 0")
        return DirectionResult(
            y_hat=np.zeros(est.p),
            feasible=False,
            t_star=None,
            weights=_weights,
            j_star_set=tuple(j_star_set),
        )
    _y, _t_star = _solution
    logger.debug("direction LP value %.6g", _t_star)
    return DirectionResult(
        y_hat=_y,
        feasible=True,
        t_star=_t_star,
        weights=_weights,
        j_star_set=tuple(j_star_set),
    )


def select_direction(
    est,
    j_star_set,
    complement,
    sigma_floor=SIGMA_FLOOR,
    cn_regime=CnRegime.HIGH_DIM,
    rank_tol=RANK_TOL,
) -> DirectionResult:
    """Preliminary LP, weights and direction LP on first-split estimates."""
    _n1 = est.n
    _y0 = solve_prelim(est, j_star_set, complement, _n1)
    _weights = compute_weights(
        est,
        _y0,
        j_star_set,
        complement,
        _n1,
        sigma_floor=sigma_floor,
        cn_regime=cn_regime,
        rank_tol=rank_tol,
    )
    return solve_direction(est, _weights, j_star_set, complement, _n1)
