# Copyright © 2025 The linsys developers

"""
Moment models: plug-in estimates of ``(A0, b_1, ..., b_{d1+1})`` with
influence-function samples and delta-method standard errors.

Every entry of ``A0`` and of the columns ``b_j`` is declared with an
:class:`EntrySpec`:

- ``constant``: a known number, zero influence;
- ``mean``: ``scale`` times the sample mean of one feature;
- ``smooth``: a function of the means of a list of features, with influence
  obtained from a central finite-difference gradient.

Column ``d1 + 1`` of ``b`` holds ``-beta``. Any entry may also carry a
``null_coef``, which adds ``null_coef * null_value`` to the entry so that a
single model describes a family indexed by the hypothesized value.

Examples
--------

>>> import numpy as np
>>> from linsys.moments import EntrySpec, MomentModel, estimate
>>> _model = MomentModel(
...     b_entries=[[EntrySpec.constant(1.0), EntrySpec.mean("x", scale=-1.0)]],
...     features=["x"],
... )
>>> _est = estimate(_model, np.array([[1.0], [2.0], [3.0]]))
>>> _est.b_hat
array([[ 1.],
       [-2.]])
>>> _est.n
3
"""

from dataclasses import dataclass
from dataclasses import replace
from enum import Enum
from typing import Callable
from typing import Optional
from typing import Tuple
from typing import Union
import json
import logging

import numpy as np
import pandas as pd

from .exceptions import ModelSpecError
from .exceptions import NumericalError
from .expression import Expression
from .linalg import RANK_TOL
from .linalg import annihilator
from .linalg import kron
from .linalg import pseudoinverse

__all__ = [
    "EntryKind",
    "EntrySpec",
    "MomentModel",
    "EstimationResult",
    "SigmaEstimate",
    "estimate",
    "covariance_vj",
    "gradient_dj",
    "sigma_hat",
    "influence_xi",
    "projected_moments",
]

logger = logging.getLogger(__name__)

SIGMA_FLOOR = 1e-6
_FD_STEP = 1e-6


class EntryKind(Enum):
    """How one coefficient is estimated."""

    CONSTANT = "constant"
    MEAN = "mean"
    SMOOTH = "smooth"


FeatureRef = Union[int, str]


@dataclass(frozen=True)
class EntrySpec:
    """Declaration of a single coefficient.

    Use the :meth:`constant`, :meth:`mean` and :meth:`smooth` constructors
    rather than calling the class directly.

    Parameters
    ----------
    kind : :class:`EntryKind`
    value : float
        The known value of a CONSTANT entry.
    feature : int or str
        Feature column of a MEAN entry, by position or by name.
    scale : float
        Multiplier applied to the mean of a MEAN entry.
    function : :class:`linsys.expression.Expression` or callable
        Map from the vector of base means to the entry (SMOOTH).
    features : tuple of int or str
        Features whose means form the argument of ``function``; ``m[k]`` in
        an expression refers to ``features[k]``.
    null_coef : float
        Coefficient on the hypothesized value of the model.
    """

    kind: EntryKind
    value: float = 0.0
    feature: Optional[FeatureRef] = None
    scale: float = 1.0
    function: Optional[Callable] = None
    features: Tuple[FeatureRef, ...] = ()
    null_coef: float = 0.0

    @classmethod
    def constant(cls, value, null_coef=0.0):
        return cls(
            kind=EntryKind.CONSTANT, value=float(value), null_coef=float(null_coef)
        )

    @classmethod
    def mean(cls, feature, scale=1.0, null_coef=0.0):
        return cls(
            kind=EntryKind.MEAN,
            feature=feature,
            scale=float(scale),
            null_coef=float(null_coef),
        )

    @classmethod
    def smooth(cls, function, features, null_coef=0.0):
        """SMOOTH entry from an expression string or a callable.

        >>> from linsys.moments import EntrySpec
        >>> EntrySpec.smooth("m[1]/m[0]", ["z1", "dz1"]).function
        Expression('m[1]/m[0]')
        """
        _features = tuple(features)
        if not _features:
            raise ModelSpecError("smooth entry needs at least one feature")
        if isinstance(function, str):
            function = Expression(function)
            if function.arity > len(_features):
                raise ModelSpecError(
                    "expression {0!r} uses m[{1}] but only {2} features are "
                    "given".format(function.source, function.arity - 1, len(_features))
                )
        elif not callable(function):
            raise ModelSpecError(
                "smooth function must be a string or callable, found {0!r}".format(
                    function
                )
            )
        return cls(
            kind=EntryKind.SMOOTH,
            function=function,
            features=_features,
            null_coef=float(null_coef),
        )

    @property
    def referenced_features(self):
        if self.kind is EntryKind.MEAN:
            return (self.feature,)
        if self.kind is EntryKind.SMOOTH:
            return self.features
        return ()

    def to_dict(self) -> dict:
        if self.kind is EntryKind.CONSTANT:
            _out = {"kind": "constant", "value": self.value}
        elif self.kind is EntryKind.MEAN:
            _out = {"kind": "mean", "feature": self.feature}
            if self.scale != 1.0:
                _out["scale"] = self.scale
        else:
            if not isinstance(self.function, Expression):
                raise ModelSpecError(
                    "only expression-string smooth entries can be serialized"
                )
            _out = {
                "kind": "smooth",
                "expr": self.function.source,
                "features": list(self.features),
            }
        if self.null_coef != 0.0:
            _out["null_coef"] = self.null_coef
        return _out

    @staticmethod
    def from_dict(payload):
        if not isinstance(payload, dict) or "kind" not in payload:
            raise ModelSpecError(
                "entry must be an object with a 'kind' key, found {0!r}".format(
                    payload
                )
            )
        _kind = payload["kind"]
        _null_coef = payload.get("null_coef", 0.0)
        try:
            if _kind == "constant":
                return EntrySpec.constant(payload["value"], null_coef=_null_coef)
            if _kind == "mean":
                return EntrySpec.mean(
                    payload["feature"],
                    scale=payload.get("scale", 1.0),
                    null_coef=_null_coef,
                )
            if _kind == "smooth":
                return EntrySpec.smooth(
                    payload["expr"], payload["features"], null_coef=_null_coef
                )
        except KeyError as _err:
            raise ModelSpecError(
                "{0} entry is missing key {1}".format(_kind, _err)
            ) from _err
        raise ModelSpecError("unknown entry kind {0!r}".format(_kind))


def _entry_grid(grid, name):
    if grid is None:
        return None
    _rows = tuple(tuple(_row) for _row in grid)
    if not _rows or not _rows[0]:
        raise ModelSpecError("{0} must be a non-empty grid of entries".format(name))
    _width = len(_rows[0])
    for _row in _rows:
        if len(_row) != _width:
            raise ModelSpecError("{0} rows have unequal lengths".format(name))
        for _entry in _row:
            if not isinstance(_entry, EntrySpec):
                raise ModelSpecError(
                    "{0} must hold EntrySpec objects, found {1!r}".format(
                        name, _entry
                    )
                )
    return _rows


def _all_constant(entries):
    return all(_e.kind is EntryKind.CONSTANT for _e in entries)


@dataclass(frozen=True)
class MomentModel:
    """Declarative map from observations to ``(A0, b_1, ..., b_{d1+1})``.

    Parameters
    ----------
    b_entries : grid of :class:`EntrySpec`, shape (p, d1 + 1)
        Column ``j <= d1`` is ``a_j``; the last column is ``-beta``.
    a0_entries : grid of :class:`EntrySpec`, shape (p, d0), or None
    features : sequence of str, optional
        Names of the feature columns, in order. When given, entries may refer
        to features by name and data frames are read by these names.
    null_value : float, optional (default: 0.0)
        Hypothesized value entering every ``null_coef``.
    deterministic_columns : set of int, optional
        1-based ``j`` whose ``b_j' M0`` is known exactly. Inferred from the
        entry kinds when omitted; validated against them when given.
    """

    b_entries: tuple
    a0_entries: Optional[tuple] = None
    features: Optional[Tuple[str, ...]] = None
    null_value: float = 0.0
    deterministic_columns: Optional[frozenset] = None

    def __post_init__(self):
        _b = _entry_grid(self.b_entries, "b_entries")
        _a0 = _entry_grid(self.a0_entries, "a0_entries")
        if len(_b[0]) < 2:
            raise ModelSpecError("b_entries needs at least d1 + 1 = 2 columns")
        if _a0 is not None and len(_a0) != len(_b):
            raise ModelSpecError(
                "a0_entries has {0} rows but b_entries has {1}".format(
                    len(_a0), len(_b)
                )
            )
        _features = None if self.features is None else tuple(self.features)
        if _features is not None and len(set(_features)) != len(_features):
            raise ModelSpecError("feature names must be unique")
        object.__setattr__(self, "b_entries", _b)
        object.__setattr__(self, "a0_entries", _a0)
        object.__setattr__(self, "features", _features)
        object.__setattr__(self, "null_value", float(self.null_value))
        object.__setattr__(self, "_columns", self._resolve_features())

        _inferred = self._infer_deterministic()
        if self.deterministic_columns is None:
            object.__setattr__(self, "deterministic_columns", _inferred)
        else:
            _given = frozenset(int(_j) for _j in self.deterministic_columns)
            _bad = sorted(_given - _inferred)
            if _bad:
                raise ModelSpecError(
                    "columns {0} are declared deterministic but have estimated "
                    "entries".format(_bad)
                )
            object.__setattr__(self, "deterministic_columns", _given)

    @property
    def p(self) -> int:
        return len(self.b_entries)

    @property
    def d0(self) -> int:
        return 0 if self.a0_entries is None else len(self.a0_entries[0])

    @property
    def d1(self) -> int:
        return len(self.b_entries[0]) - 1

    @property
    def n_features(self) -> int:
        if self.features is not None:
            return len(self.features)
        return max(self._columns.values(), default=-1) + 1

    def _all_entries(self):
        for _row in self.b_entries:
            yield from _row
        if self.a0_entries is not None:
            for _row in self.a0_entries:
                yield from _row

    def _resolve_features(self):
        _columns = {}
        for _entry in self._all_entries():
            for _ref in _entry.referenced_features:
                _columns[_ref] = self._column_of(_ref)
        return _columns

    def _column_of(self, ref):
        if isinstance(ref, (int, np.integer)) and not isinstance(ref, bool):
            if ref < 0 or (self.features is not None and ref >= len(self.features)):
                raise ModelSpecError("feature index {0} is out of range".format(ref))
            return int(ref)
        if isinstance(ref, str):
            if self.features is None or ref not in self.features:
                raise ModelSpecError("unknown feature name {0!r}".format(ref))
            return self.features.index(ref)
        raise ModelSpecError("invalid feature reference {0!r}".format(ref))

    def _infer_deterministic(self):
        if self.a0_entries is not None and not _all_constant(
            _e for _row in self.a0_entries for _e in _row
        ):
            return frozenset()
        return frozenset(
            _j + 1
            for _j in range(self.d1 + 1)
            if _all_constant(_row[_j] for _row in self.b_entries)
        )

    def with_null_value(self, value):
        """Copy of the model with a different hypothesized value."""
        return replace(self, null_value=float(value))

    def feature_matrix(self, data) -> np.ndarray:
        """Extract the ``(n, n_features)`` feature matrix from ``data``.

        Parameters
        ----------
        data : pandas.DataFrame or array-like of shape (n, n_features)
            Data frames are read by the model's feature names.
        """
        if isinstance(data, pd.DataFrame):
            if self.features is not None:
                _missing = [_f for _f in self.features if _f not in data.columns]
                if _missing:
                    raise ModelSpecError(
                        "data has no column for features {0}".format(_missing)
                    )
                data = data.loc[:, list(self.features)]
            data = data.to_numpy()
        try:
            _x = np.asarray(data, dtype=float)
        except (TypeError, ValueError) as _err:
            raise ModelSpecError(
                "data has non-numeric entries: {0}".format(_err)
            ) from _err
        if _x.ndim != 2:
            raise ModelSpecError(
                "data must be two-dimensional, found shape {0}".format(_x.shape)
            )
        if _x.shape[1] < self.n_features:
            raise ModelSpecError(
                "data has {0} feature columns, model needs {1}".format(
                    _x.shape[1], self.n_features
                )
            )
        if not np.all(np.isfinite(_x)):
            raise ModelSpecError("data has non-finite entries")
        return _x

    def to_dict(self) -> dict:
        return {
            "features": None if self.features is None else list(self.features),
            "null_value": self.null_value,
            "a0": None
            if self.a0_entries is None
            else [[_e.to_dict() for _e in _row] for _row in self.a0_entries],
            "b": [[_e.to_dict() for _e in _row] for _row in self.b_entries],
            "deterministic_columns": sorted(self.deterministic_columns),
        }

    @staticmethod
    def from_dict(payload):
        """Build a model from the JSON schema.

        The payload has keys ``b`` (required, p rows of d1 + 1 entries),
        ``a0`` (optional), ``features``, ``null_value`` and
        ``deterministic_columns``.
        """
        if not isinstance(payload, dict):
            raise ModelSpecError("model must be a JSON object")
        if "b" not in payload:
            raise ModelSpecError("model is missing key b")

        def _grid(rows, name):
            if not isinstance(rows, list) or not all(
                isinstance(_r, list) for _r in rows
            ):
                raise ModelSpecError("{0} must be a list of rows".format(name))
            return [[EntrySpec.from_dict(_e) for _e in _row] for _row in rows]

        _a0 = payload.get("a0")
        _det = payload.get("deterministic_columns")
        return MomentModel(
            b_entries=_grid(payload["b"], "b"),
            a0_entries=None if _a0 is None else _grid(_a0, "a0"),
            features=payload.get("features"),
            null_value=payload.get("null_value", 0.0),
            deterministic_columns=None if _det is None else frozenset(_det),
        )

    @staticmethod
    def from_json(text):
        return MomentModel.from_dict(json.loads(text))


@dataclass(frozen=True)
class EstimationResult:
    """Plug-in estimates and centered influence samples.

    Attributes
    ----------
    a0_hat : ndarray of shape (p, d0), or None
    b_hat : ndarray of shape (d1 + 1, p)
        Row ``j - 1`` is the estimate of ``b_j``.
    psi_samples : ndarray of shape (n, p, d0), or None
        Influence samples of ``A0``.
    phi_samples : ndarray of shape (d1 + 1, n, p)
        Influence samples of each ``b_j``.
    n : int
    m0_hat : ndarray of shape (p, p)
        Annihilator of ``a0_hat``.
    a0_pinv : ndarray of shape (d0, p), or None
    """

    a0_hat: Optional[np.ndarray]
    b_hat: np.ndarray
    psi_samples: Optional[np.ndarray]
    phi_samples: np.ndarray
    n: int
    m0_hat: np.ndarray
    a0_pinv: Optional[np.ndarray]

    @property
    def p(self) -> int:
        return self.b_hat.shape[1]

    @property
    def d1(self) -> int:
        return self.b_hat.shape[0] - 1


@dataclass(frozen=True)
class SigmaEstimate:
    """Truncated delta-method standard error."""

    sigma: float
    raw_variance: float
    truncated: bool


def _smooth_gradient(function, point):
    _grad = np.empty_like(point)
    for _k in range(point.shape[0]):
        _h = _FD_STEP * (1.0 + abs(point[_k]))
        _up = point.copy()
        _down = point.copy()
        _up[_k] += _h
        _down[_k] -= _h
        _grad[_k] = (float(function(_up)) - float(function(_down))) / (2.0 * _h)
    return _grad


def _entry_estimate(model, entry, means, centered):
    """Value and influence samples of one entry."""
    _n = centered.shape[0]
    _shift = entry.null_coef * model.null_value
    if entry.kind is EntryKind.CONSTANT:
        return entry.value + _shift, np.zeros(_n)
    if entry.kind is EntryKind.MEAN:
        _k = model._columns[entry.feature]
        return entry.scale * means[_k] + _shift, entry.scale * centered[:, _k]

    _cols = [model._columns[_f] for _f in entry.features]
    _point = means[_cols]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        _value = float(entry.function(_point))
        _grad = _smooth_gradient(entry.function, _point)
    if not np.isfinite(_value) or not np.all(np.isfinite(_grad)):
        raise NumericalError(
            "smooth entry {0!r} is not finite near the base means {1}".format(
                entry.function, _point
            )
        )
    return _value + _shift, centered[:, _cols] @ _grad


def _recenter(samples):
    return samples - samples.mean(axis=-2, keepdims=True)


def estimate(model, data, indices=None, rank_tol=RANK_TOL):
    """Plug-in estimates with influence samples.

    Parameters
    ----------
    model : :class:`MomentModel`
    data : pandas.DataFrame or array-like of shape (n, n_features)
    indices : array-like of int, optional
        Restrict estimation to these rows.
    rank_tol : float, optional (default: 1e-10)
        Relative cut-off for the pseudoinverse of ``a0_hat``.

    Returns
    -------
    result : :class:`EstimationResult`

    Raises
    ------
    ModelSpecError
        Fewer than two observations, or data inconsistent with the model.
    NumericalError
        A SMOOTH entry is not finite near the sample base means.
    """
    _x = model.feature_matrix(data)
    if indices is not None:
        _x = _x[np.asarray(indices, dtype=int)]
    _n = _x.shape[0]
    if _n < 2:
        raise ModelSpecError("need at least 2 observations, found {0}".format(_n))

    _means = _x.mean(axis=0)
    _centered = _x - _means

    _b_hat = np.empty((model.d1 + 1, model.p))
    _phi = np.empty((model.d1 + 1, _n, model.p))
    for _i, _row in enumerate(model.b_entries):
        for _j, _entry in enumerate(_row):
            _b_hat[_j, _i], _phi[_j, :, _i] = _entry_estimate(
                model, _entry, _means, _centered
            )

    _a0_hat = None
    _psi = None
    _a0_pinv = None
    if model.a0_entries is not None:
        _a0_hat = np.empty((model.p, model.d0))
        _psi = np.empty((_n, model.p, model.d0))
        for _i, _row in enumerate(model.a0_entries):
            for _k, _entry in enumerate(_row):
                _a0_hat[_i, _k], _psi[:, _i, _k] = _entry_estimate(
                    model, _entry, _means, _centered
                )
        _psi = _recenter(_psi.reshape(_n, -1)).reshape(_psi.shape)
        _a0_pinv = pseudoinverse(_a0_hat, rank_tol=rank_tol)

    logger.debug("estimated model with p=%d d1=%d on n=%d", model.p, model.d1, _n)
    return EstimationResult(
        a0_hat=_a0_hat,
        b_hat=_b_hat,
        psi_samples=_psi,
        phi_samples=_recenter(_phi),
        n=_n,
        m0_hat=annihilator(_a0_hat, model.p, rank_tol=rank_tol),
        a0_pinv=_a0_pinv,
    )


def _check_index(result, j):
    if isinstance(j, bool) or not isinstance(j, (int, np.integer)):
        raise ValueError("j must be an integer, cannot be {0}".format(j))
    if not 1 <= j <= result.d1 + 1:
        raise ValueError(
            "j must be in [1, {0}], cannot be {1}".format(result.d1 + 1, j)
        )


def _stacked_influence(result, j):
    _phi = result.phi_samples[j - 1]
    if result.psi_samples is None:
        return _phi
    # vec of each p x d0 sample, column-major
    _vec_psi = result.psi_samples.transpose(0, 2, 1).reshape(result.n, -1)
    return np.hstack([_vec_psi, _phi])


def covariance_vj(result, j) -> np.ndarray:
    """Covariance (divisor n) of the stacked influence ``(vec Psi_i, phi_j,i)``.

    Parameters
    ----------
    result : :class:`EstimationResult`
    j : int
        1-based column index in ``[1, d1 + 1]``.

    Returns
    -------
    vj : ndarray of shape (p * d0 + p, p * d0 + p)
    """
    _check_index(result, j)
    if result.n < 2:
        raise ValueError("need at least 2 observations, found {0}".format(result.n))
    _z = _stacked_influence(result, j)
    _z = _z - _z.mean(axis=0)
    _vj = _z.T @ _z / result.n
    return 0.5 * (_vj + _vj.T)


def gradient_dj(a0_hat, b_hat_j, y, rank_tol=RANK_TOL) -> np.ndarray:
    """Gradient of ``(A0, b_j) -> b_j' M(A0) y`` in ``(vec A0, b_j)``.

    Parameters
    ----------
    a0_hat : ndarray of shape (p, d0), or None
    b_hat_j : ndarray of shape (p,)
    y : ndarray of shape (p,)

    Returns
    -------
    dj : ndarray of shape (p * d0 + p,)
        ``(-(A0^+ y kron M0 b_j + A0^+ b_j kron M0 y), M0 y)``; just ``y``
        when ``a0_hat`` is None.

    Examples
    --------

    >>> import numpy as np
    >>> from linsys.moments import gradient_dj
    >>> gradient_dj(None, np.array([1.0, 2.0]), np.array([0.5, -0.5]))
    array([ 0.5, -0.5])
    """
    _b = np.asarray(b_hat_j, dtype=float)
    _y = np.asarray(y, dtype=float)
    if _b.shape != _y.shape:
        raise ModelSpecError(
            "b_j has shape {0} but y has shape {1}".format(_b.shape, _y.shape)
        )
    if a0_hat is None:
        return _y.copy()
    _pinv = pseudoinverse(a0_hat, rank_tol=rank_tol)
    _m0 = annihilator(a0_hat, _b.shape[0], rank_tol=rank_tol)
    _m0_b = _m0 @ _b
    _m0_y = _m0 @ _y
    _psi_block = -(kron(_pinv @ _y, _m0_b) + kron(_pinv @ _b, _m0_y))
    return np.concatenate([_psi_block, _m0_y])


def sigma_hat(vj, dj, sigma_floor=SIGMA_FLOOR) -> SigmaEstimate:
    """``sqrt(max(dj' vj dj, sigma_floor^2))``.

    >>> import numpy as np
    >>> from linsys.moments import sigma_hat
    >>> sigma_hat(np.array([[4.0]]), np.array([0.5]))
    SigmaEstimate(sigma=1.0, raw_variance=1.0, truncated=False)
    """
    if not sigma_floor > 0:
        raise ValueError(
            "sigma_floor must be positive, cannot be {0}".format(sigma_floor)
        )
    _v = np.atleast_2d(np.asarray(vj, dtype=float))
    _d = np.asarray(dj, dtype=float)
    if _v.shape != (_d.shape[0], _d.shape[0]):
        raise ModelSpecError(
            "vj has shape {0} but dj has length {1}".format(_v.shape, _d.shape[0])
        )
    _raw = float(_d @ _v @ _d)
    _floor2 = sigma_floor ** 2
    return SigmaEstimate(
        sigma=float(np.sqrt(max(_raw, _floor2))),
        raw_variance=_raw,
        truncated=_raw < _floor2,
    )


def influence_xi(result, j) -> np.ndarray:
    """Plug-in influence samples of ``b_j' M0``, shape (n, p).

    ``xi_i = M0 phi_i - M0 Psi_i A0^+ b_j - (A0^+)' Psi_i' M0 b_j``.
    """
    _check_index(result, j)
    _phi = result.phi_samples[j - 1]
    _m0 = result.m0_hat
    if result.psi_samples is None:
        return _phi @ _m0
    _b = result.b_hat[j - 1]
    _pinv_b = result.a0_pinv @ _b
    _m0_b = _m0 @ _b
    _term_a = np.einsum("pq,nqk,k->np", _m0, result.psi_samples, _pinv_b)
    _term_b = np.einsum("kp,nqk,q->np", result.a0_pinv, result.psi_samples, _m0_b)
    return _phi @ _m0 - _term_a - _term_b


def projected_moments(result) -> np.ndarray:
    """Rows ``b_j' M0`` for ``j = 1, ..., d1 + 1``, shape (d1 + 1, p)."""
    return result.b_hat @ result.m0_hat
