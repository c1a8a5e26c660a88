# Copyright © 2025 The linsys developers

"""
Built-in simulation designs.

Three data-generating processes with their moment models:

- ``cox``: ``H`` one-sided restrictions with a scalar nuisance ``x0``,
  ``A0 = E[C]``, ``A1 = I_H``, ``beta = -E[X] - v theta``;
  identified set ``(-inf, 0]``.
- ``goff``: bounds on ``E[Y(1)]`` under a quadratic marginal treatment
  response with a binary instrument; identified set ``[0.58, 0.67]``.
- ``fh``: nonparametric instrumental variables with a discrete regressor,
  a decreasing structural function and ``L(g) = g(2)``; identified set
  ``[20.21, 24.61]``.

Each ``gen_*`` function returns a :class:`pandas.DataFrame` of raw variables
and derived feature columns together with the :class:`MomentModel` whose
``null_value`` is the hypothesized value.

Examples
--------

>>> from linsys.designs import gen_fh
>>> _data, _model = gen_fh(L0=22.0, n=100, seed=0)
>>> _model.p, _model.d0, _model.d1
(8, 6, 5)
>>> _data.shape[0]
100
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional
import logging
import math

import numpy as np
import pandas as pd

from ._random import check_seed
from ._random import make_rng
from .closure import Triple
from .moments import EntrySpec
from .moments import MomentModel

__all__ = [
    "DesignKind",
    "DesignSpec",
    "gen_cox",
    "gen_goff",
    "gen_fh",
    "population_triple",
    "population_feature_means",
    "identified_set",
]

logger = logging.getLogger(__name__)

# pylint: disable=invalid-name

# Cox design
COX_X_VAR = 1.0
COX_C_VAR = 2.0

# Goff design: propensity scores and the marginal treatment response
GOFF_PROPENSITY = (1.0 / 3.0, 2.0 / 3.0)
GOFF_MTR = (1.0, -1.0, 0.5)
# Known rows of A1: theta0 + s1 = 1, shape restriction, target functional
GOFF_KNOWN_ROWS = np.array(
    [
        [1.0, 0.0, 0.0, 1.0, 0.0],
        [-2.0, 1.0, 2.0, 0.0, 1.0],
        [2.0 / 3.0, -1.0 / 6.0, 1.0 / 3.0, 0.0, 0.0],
    ]
)

# FH design: support of X, joint pmf of (X, W) with W in {0, 1}, true g
FH_SUPPORT = (2, 3, 4, 5, 6, 7)
FH_PI = np.array(
    [
        [0.20, 0.15],
        [0.10, 0.12],
        [0.06, 0.07],
        [0.05, 0.08],
        [0.03, 0.06],
        [0.03, 0.05],
    ]
)
FH_G = np.array([23.0, 17.0, 13.0, 11.0, 9.0, 8.0])

_IDENTIFIED_SETS = {
    "cox": (-math.inf, 0.0),
    "goff": (0.58, 0.67),
    "fh": (20.21, 24.61),
}


class DesignKind(Enum):
    COX = "cox"
    GOFF = "goff"
    FH = "fh"


def _check_n(n):
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise ValueError("n must be an integer, cannot be {0}".format(n))
    if n < 20:
        raise ValueError("n must be at least 20, cannot be {0}".format(n))
    return int(n)


def _check_h(H):
    if isinstance(H, bool) or not isinstance(H, (int, np.integer)):
        raise ValueError("H must be an integer, cannot be {0}".format(H))
    if H < 2:
        raise ValueError("H must be at least 2, cannot be {0}".format(H))
    return int(H)


def identified_set(kind):
    """Published identified set ``(lo, hi)`` of the design's parameter.

    >>> from linsys.designs import identified_set
    >>> identified_set("goff")
    (0.58, 0.67)
    """
    return _IDENTIFIED_SETS[DesignKind(kind).value]


# Cox -------------------------------------------------------------------------


def _cox_mu_nu(H):
    _mu = np.ones(H)
    _mu[0] = -1.0
    return _mu, -_mu


def _cox_v(H):
    _v = np.zeros(H)
    _v[:2] = 1.0
    return _v


def cox_model(H, theta=0.0) -> MomentModel:
    """Moment model of the Cox design with ``H`` restrictions."""
    _H = _check_h(H)
    _v = _cox_v(_H)
    _features = ["c{0}".format(_h) for _h in range(1, _H + 1)] + [
        "x{0}".format(_h) for _h in range(1, _H + 1)
    ]
    _a0 = [[EntrySpec.mean("c{0}".format(_h + 1))] for _h in range(_H)]
    _b = []
    for _h in range(_H):
        _row = [EntrySpec.constant(1.0 if _j == _h else 0.0) for _j in range(_H)]
        # -beta_h = mu_h + v_h * theta
        _row.append(EntrySpec.mean("x{0}".format(_h + 1), null_coef=_v[_h]))
        _b.append(_row)
    return MomentModel(
        b_entries=_b, a0_entries=_a0, features=_features, null_value=theta
    )


def gen_cox(H, theta, n, seed):
    """Draw ``n`` observations of the Cox design.

    ``X ~ N(mu, I_H)`` and ``C ~ N(nu, 2 I_H)`` independently, with
    ``mu = (-1, 1, ..., 1)`` and ``nu = -mu``.

    Returns
    -------
    data : pandas.DataFrame
        Columns ``c1..cH`` and ``x1..xH``.
    model : :class:`linsys.moments.MomentModel`
    """
    _H = _check_h(H)
    _n = _check_n(n)
    _rng = make_rng(seed)
    _mu, _nu = _cox_mu_nu(_H)
    _x = _rng.normal(loc=_mu, scale=math.sqrt(COX_X_VAR), size=(_n, _H))
    _c = _rng.normal(loc=_nu, scale=math.sqrt(COX_C_VAR), size=(_n, _H))
    _data = pd.DataFrame(
        np.hstack([_c, _x]),
        columns=["c{0}".format(_h) for _h in range(1, _H + 1)]
        + ["x{0}".format(_h) for _h in range(1, _H + 1)],
    )
    return _data, cox_model(_H, theta)


# Goff ------------------------------------------------------------------------


def _goff_conditional_ydz(p):
    # E[YD | Z = z] = int_0^p m(u) du with m(u) = t0 + t1 u + t2 u^2
    _t0, _t1, _t2 = GOFF_MTR
    return _t0 * p + _t1 * p ** 2 / 2.0 + _t2 * p ** 3 / 3.0


def _goff_a1(p0, p1):
    def _row(p):
        return [p - p ** 3 / 3.0, p ** 3 / 3.0 - p ** 2 / 2.0, p ** 3 / 3.0, 0.0, 0.0]

    return np.vstack([_row(p0), _row(p1), GOFF_KNOWN_ROWS])


def goff_model(tau0=0.62) -> MomentModel:
    """Moment model of the Goff design.

    ``x1 = (theta0, theta1, delta, s1, s2)``; there is no ``A0``. The first
    two rows use the propensity score ``p(z) = E[D 1{Z=z}] / P{Z=z}`` and the
    conditional mean ``E[YD | Z=z] = E[YD 1{Z=z}] / P{Z=z}``.
    """
    _p = "(m[1]/m[0])"
    _b = []
    for _z in (0, 1):
        _pd = ["z{0}".format(_z), "dz{0}".format(_z)]
        _pyd = ["z{0}".format(_z), "ydz{0}".format(_z)]
        _b.append(
            [
                EntrySpec.smooth("{0} - {0}^3/3".format(_p), _pd),
                EntrySpec.smooth("{0}^3/3 - {0}^2/2".format(_p), _pd),
                EntrySpec.smooth("{0}^3/3".format(_p), _pd),
                EntrySpec.constant(0.0),
                EntrySpec.constant(0.0),
                EntrySpec.smooth("-m[1]/m[0]", _pyd),
            ]
        )
    _neg_beta = [
        EntrySpec.constant(-1.0),
        EntrySpec.constant(0.0),
        EntrySpec.constant(0.0, null_coef=-1.0),
    ]
    for _row, _last in zip(GOFF_KNOWN_ROWS, _neg_beta):
        _b.append([EntrySpec.constant(_v) for _v in _row] + [_last])
    return MomentModel(
        b_entries=_b,
        features=["z0", "dz0", "ydz0", "z1", "dz1", "ydz1"],
        null_value=tau0,
    )


def gen_goff(tau0, n, seed):
    """Draw ``n`` observations of the Goff design.

    ``Z ~ Bernoulli(1/2)``, ``U, V ~ U(0, 1)``, ``D = 1{p(Z) >= U}`` and
    ``Y = D 1{V <= 1 - U + U^2 / 2}``.

    Returns
    -------
    data : pandas.DataFrame
        Columns ``y, d, z`` and the features ``z0, dz0, ydz0, z1, dz1, ydz1``.
    model : :class:`linsys.moments.MomentModel`
    """
    _n = _check_n(n)
    _rng = make_rng(seed)
    _z = _rng.integers(0, 2, size=_n)
    _u = _rng.random(_n)
    _v = _rng.random(_n)
    _t0, _t1, _t2 = GOFF_MTR
    _d = (np.asarray(GOFF_PROPENSITY)[_z] >= _u).astype(float)
    _y = _d * (_v <= _t0 + _t1 * _u + _t2 * _u ** 2)
    _data = pd.DataFrame({"y": _y, "d": _d, "z": _z.astype(float)})
    for _k in (0, 1):
        _in = (_z == _k).astype(float)
        _data["z{0}".format(_k)] = _in
        _data["dz{0}".format(_k)] = _d * _in
        _data["ydz{0}".format(_k)] = _y * _d * _in
    return _data, goff_model(tau0)


# FH --------------------------------------------------------------------------


def _fh_difference_matrix():
    _h = len(FH_SUPPORT)
    _s = np.zeros((_h - 1, _h))
    for _i in range(_h - 1):
        _s[_i, _i] = -1.0
        _s[_i, _i + 1] = 1.0
    return _s


def _fh_conditional_x():
    """``E[X | W = w]`` implied by the joint pmf."""
    _x = np.asarray(FH_SUPPORT, dtype=float)
    return (_x @ FH_PI) / FH_PI.sum(axis=0)


def _fh_indicator(h, k):
    return "x{0}_w{1}".format(FH_SUPPORT[h], k)


def fh_model(L0=22.0) -> MomentModel:
    """Moment model of the FH design.

    ``A0 = [Pi'; S; c']`` with ``Pi'`` estimated from indicator means, ``S``
    the first-difference matrix and ``c = e_1``; ``A1 = [0; I_5; 0]``;
    ``beta = (E[Y 1{W=0}], E[Y 1{W=1}], 0, ..., 0, L0)``.
    """
    _H = len(FH_SUPPORT)
    _K = FH_PI.shape[1]
    _S = _fh_difference_matrix()
    _M = _S.shape[0]
    _c = np.eye(_H)[0]

    _a0 = [
        [EntrySpec.mean(_fh_indicator(_h, _k)) for _h in range(_H)]
        for _k in range(_K)
    ]
    _a0 += [[EntrySpec.constant(_v) for _v in _row] for _row in _S]
    _a0.append([EntrySpec.constant(_v) for _v in _c])

    _a1 = np.vstack([np.zeros((_K, _M)), np.eye(_M), np.zeros((1, _M))])
    _neg_beta = [EntrySpec.mean("y_w{0}".format(_k), scale=-1.0) for _k in range(_K)]
    _neg_beta += [EntrySpec.constant(0.0) for _ in range(_M)]
    _neg_beta.append(EntrySpec.constant(0.0, null_coef=-1.0))

    _b = [
        [EntrySpec.constant(_v) for _v in _row] + [_last]
        for _row, _last in zip(_a1, _neg_beta)
    ]
    _features = [_fh_indicator(_h, _k) for _k in range(_K) for _h in range(_H)]
    _features += ["y_w{0}".format(_k) for _k in range(_K)]
    return MomentModel(b_entries=_b, a0_entries=_a0, features=_features, null_value=L0)


def gen_fh(L0, n, seed):
    """Draw ``n`` observations of the FH design.

    ``(X, W)`` from the joint pmf, ``Z ~ N(0, 1)`` independent, and
    ``Y = g(X) + X Z^2 - E[X | W]``.

    Returns
    -------
    data : pandas.DataFrame
        Columns ``y, x, w, z``, the indicators ``x{h}_w{k}`` and the products
        ``y_w{k}``.
    model : :class:`linsys.moments.MomentModel`
    """
    _n = _check_n(n)
    _rng = make_rng(seed)
    _H, _K = FH_PI.shape
    _cells = _rng.choice(_H * _K, size=_n, p=FH_PI.ravel())
    _h, _w = np.divmod(_cells, _K)
    _x = np.asarray(FH_SUPPORT, dtype=float)[_h]
    _z = _rng.standard_normal(_n)
    _y = FH_G[_h] + _x * _z ** 2 - _fh_conditional_x()[_w]

    _data = pd.DataFrame({"y": _y, "x": _x, "w": _w.astype(float), "z": _z})
    for _k in range(_K):
        for _i in range(_H):
            _data[_fh_indicator(_i, _k)] = ((_h == _i) & (_w == _k)).astype(float)
    for _k in range(_K):
        _data["y_w{0}".format(_k)] = _y * (_w == _k)
    return _data, fh_model(L0)


# Population objects ----------------------------------------------------------


def population_triple(kind, value, H=None) -> Triple:
    """Exact population ``(A0, A1, beta)`` of a design at a hypothesized value.

    Examples
    --------

    >>> from linsys.closure import member_c0
    >>> from linsys.designs import population_triple
    >>> member_c0(population_triple("cox", -1.0, H=3))[0]
    True
    """
    _kind = DesignKind(kind)
    if _kind is DesignKind.COX:
        _H = _check_h(H)
        _mu, _nu = _cox_mu_nu(_H)
        return Triple(
            a0=_nu[:, None], a1=np.eye(_H), beta=-_mu - _cox_v(_H) * value
        )
    if _kind is DesignKind.GOFF:
        _p0, _p1 = GOFF_PROPENSITY
        _beta = np.array(
            [_goff_conditional_ydz(_p0), _goff_conditional_ydz(_p1), 1.0, 0.0, value]
        )
        return Triple(a0=None, a1=_goff_a1(_p0, _p1), beta=_beta)
    _H, _K = FH_PI.shape
    _S = _fh_difference_matrix()
    _M = _S.shape[0]
    _a0 = np.vstack([FH_PI.T, _S, np.eye(_H)[:1]])
    _a1 = np.vstack([np.zeros((_K, _M)), np.eye(_M), np.zeros((1, _M))])
    _beta = np.concatenate([FH_PI.T @ FH_G, np.zeros(_M), [value]])
    return Triple(a0=_a0, a1=_a1, beta=_beta)


def population_feature_means(kind, H=None) -> pd.Series:
    """Population means of the feature columns used by a design's model."""
    _kind = DesignKind(kind)
    if _kind is DesignKind.COX:
        _H = _check_h(H)
        _mu, _nu = _cox_mu_nu(_H)
        _names = ["c{0}".format(_h) for _h in range(1, _H + 1)]
        _names += ["x{0}".format(_h) for _h in range(1, _H + 1)]
        return pd.Series(np.concatenate([_nu, _mu]), index=_names)
    if _kind is DesignKind.GOFF:
        _values = {}
        for _z, _p in enumerate(GOFF_PROPENSITY):
            _values["z{0}".format(_z)] = 0.5
            _values["dz{0}".format(_z)] = 0.5 * _p
            _values["ydz{0}".format(_z)] = 0.5 * _goff_conditional_ydz(_p)
        return pd.Series(_values)
    _H, _K = FH_PI.shape
    _values = {
        _fh_indicator(_h, _k): FH_PI[_h, _k] for _k in range(_K) for _h in range(_H)
    }
    for _k in range(_K):
        _values["y_w{0}".format(_k)] = float(FH_PI[:, _k] @ FH_G)
    return pd.Series(_values)


@dataclass(frozen=True)
class DesignSpec:
    """One draw of a built-in design.

    Parameters
    ----------
    kind : :class:`DesignKind` or str
    n : int
        Sample size, at least 20.
    hypothesized_value : float
        ``theta`` (cox), ``tau0`` (goff) or ``L0`` (fh).
    seed : int
    H : int, optional
        Number of restrictions, cox only (at least 2).
    """

    kind: DesignKind
    n: int
    hypothesized_value: float
    seed: int = 0
    H: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", DesignKind(self.kind))
        _check_n(self.n)
        check_seed(self.seed)
        if self.kind is DesignKind.COX:
            _check_h(self.H)
        elif self.H is not None:
            raise ValueError("H only applies to the cox design")

    def generate(self):
        """Draw the data and build the model: ``(data, model)``."""
        if self.kind is DesignKind.COX:
            return gen_cox(self.H, self.hypothesized_value, self.n, self.seed)
        if self.kind is DesignKind.GOFF:
            return gen_goff(self.hypothesized_value, self.n, self.seed)
        return gen_fh(self.hypothesized_value, self.n, self.seed)

    def model(self) -> MomentModel:
        """The design's model without drawing data."""
        if self.kind is DesignKind.COX:
            return cox_model(self.H, self.hypothesized_value)
        if self.kind is DesignKind.GOFF:
            return goff_model(self.hypothesized_value)
        return fh_model(self.hypothesized_value)
