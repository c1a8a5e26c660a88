# Copyright © 2025 The linsys developers

"""
Tests for linsys.moments
"""

import json

import numpy as np
from numpy.testing import assert_allclose
import pandas as pd
import pytest

from linsys.exceptions import ModelSpecError
from linsys.exceptions import NumericalError
from linsys.moments import EntryKind
from linsys.moments import EntrySpec
from linsys.moments import MomentModel
from linsys.moments import covariance_vj
from linsys.moments import estimate
from linsys.moments import gradient_dj
from linsys.moments import influence_xi
from linsys.moments import projected_moments
from linsys.moments import sigma_hat

_C = EntrySpec.constant
_M = EntrySpec.mean


def _random_model():
    """p = 3, d0 = 1, d1 = 1 with every entry a feature mean."""
    return MomentModel(
        a0_entries=[[_M(0)], [_M(1)], [_M(2)]],
        b_entries=[[_M(3), _M(4)], [_M(5), _M(6)], [_M(7), _M(8)]],
    )


def _random_data(n=60, seed=0):
    _rng = np.random.default_rng(seed)
    return _rng.normal(loc=1.0, size=(n, 9))


def test_constant_model():
    """Constants are estimated exactly with zero influence."""
    _model = MomentModel(b_entries=[[_C(1.0), _C(-2.0)], [_C(0.5), _C(3.0)]])
    _est = estimate(_model, np.zeros((4, 1)))
    assert_allclose(_est.b_hat, [[1.0, 0.5], [-2.0, 3.0]])
    assert np.all(_est.phi_samples == 0.0)
    assert_allclose(covariance_vj(_est, 1), np.zeros((2, 2)))
    assert _model.deterministic_columns == frozenset({1, 2})


def test_mean_entry():
    """A MEAN entry over {1, 2, 3} gives 2 with influence (-1, 0, 1)."""
    _model = MomentModel(b_entries=[[_M(0), _C(0.0)]])
    _est = estimate(_model, np.array([[1.0], [2.0], [3.0]]))
    assert_allclose(_est.b_hat[0], [2.0])
    assert_allclose(_est.phi_samples[0, :, 0], [-1.0, 0.0, 1.0])


def test_smooth_square():
    """g(m) = m^2 over {1, 2, 3}: value 4, influence close to (-4, 0, 4)."""
    _model = MomentModel(b_entries=[[EntrySpec.smooth("m[0]^2", [0]), _C(0.0)]])
    _est = estimate(_model, np.array([[1.0], [2.0], [3.0]]))
    assert_allclose(_est.b_hat[0], [4.0])
    assert_allclose(_est.phi_samples[0, :, 0], [-4.0, 0.0, 4.0], atol=1e-5)


def test_smooth_callable():
    """SMOOTH entries also accept Python callables."""
    _entry = EntrySpec.smooth(lambda m: m[0] * m[1], [0, 1])
    _model = MomentModel(b_entries=[[_entry, _C(0.0)]])
    _est = estimate(_model, np.array([[1.0, 2.0], [3.0, 4.0]]))
    assert_allclose(_est.b_hat[0], [2.0 * 3.0])


def test_affine_smooth_matches_mean():
    """The delta method is exact for affine maps."""
    _x = _random_data(n=40, seed=3)
    _smooth = MomentModel(
        b_entries=[[EntrySpec.smooth("2*m[0] - 1", [0]), _C(0.0)]]
    )
    _mean = MomentModel(b_entries=[[_M(0, scale=2.0), _C(0.0)]])
    _s = estimate(_smooth, _x)
    _m = estimate(_mean, _x)
    assert_allclose(_s.b_hat[0] + 1.0, _m.b_hat[0], atol=1e-12)
    assert_allclose(_s.phi_samples, _m.phi_samples, atol=1e-7)


def test_influence_samples_are_centered():
    """Every influence collection sums to zero."""
    _est = estimate(_random_model(), _random_data())
    assert np.max(np.abs(_est.phi_samples.sum(axis=1))) <= 1e-9 * _est.n
    assert np.max(np.abs(_est.psi_samples.sum(axis=0))) <= 1e-9 * _est.n


def test_null_value_shift():
    """null_coef adds a multiple of the hypothesized value."""
    _model = MomentModel(
        b_entries=[[_C(1.0), _C(0.0, null_coef=-1.0)]], null_value=0.25
    )
    _est = estimate(_model, np.zeros((2, 1)))
    assert_allclose(_est.b_hat[:, 0], [1.0, -0.25])
    _shifted = estimate(_model.with_null_value(2.0), np.zeros((2, 1)))
    assert_allclose(_shifted.b_hat[:, 0], [1.0, -2.0])


def test_estimate_on_index_subset():
    """indices restricts estimation to those rows."""
    _model = MomentModel(b_entries=[[_M(0), _C(0.0)]])
    _x = np.array([[1.0], [2.0], [3.0], [10.0]])
    _est = estimate(_model, _x, indices=[0, 2])
    assert _est.n == 2
    assert_allclose(_est.b_hat[0], [2.0])


def test_estimate_reads_named_columns():
    """Data frames are read by feature name, in any column order."""
    _model = MomentModel(b_entries=[[_M("x"), _M("y")]], features=["x", "y"])
    _frame = pd.DataFrame({"y": [1.0, 3.0], "x": [10.0, 20.0]})
    _est = estimate(_model, _frame)
    assert_allclose(_est.b_hat[:, 0], [15.0, 2.0])


def test_estimate_too_few_rows():
    """A single observation is not enough."""
    _model = MomentModel(b_entries=[[_M(0), _C(0.0)]])
    with pytest.raises(ModelSpecError):
        estimate(_model, np.array([[1.0]]))


def test_smooth_not_finite():
    """A SMOOTH entry that blows up at the base means raises NumericalError."""
    _model = MomentModel(
        b_entries=[[EntrySpec.smooth("m[0]/m[1]", [0, 1]), _C(0.0)]]
    )
    with pytest.raises(NumericalError):
        estimate(_model, np.array([[1.0, -1.0], [1.0, 1.0]]))


def test_missing_feature_column():
    """A data frame without a model feature is rejected."""
    _model = MomentModel(b_entries=[[_M("x"), _C(0.0)]], features=["x"])
    with pytest.raises(ModelSpecError):
        estimate(_model, pd.DataFrame({"z": [1.0, 2.0]}))


def test_non_finite_data():
    """NaN observations are rejected."""
    _model = MomentModel(b_entries=[[_M(0), _C(0.0)]])
    with pytest.raises(ModelSpecError):
        estimate(_model, np.array([[1.0], [np.nan]]))


@pytest.mark.parametrize(
    "data",
    [
        pd.DataFrame({"x": ["a", "1.0"]}),
        [[1.0], ["b"]],
        [[1.0], [2.0, 3.0]],
    ],
)
def test_non_numeric_data(data):
    """Text or ragged observations are rejected."""
    _model = MomentModel(b_entries=[[_M("x"), _C(0.0)]], features=["x"])
    with pytest.raises(ModelSpecError):
        _model.feature_matrix(data)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"b_entries": [[_C(1.0)]]},
        {"b_entries": []},
        {"b_entries": [[_C(1.0), _C(1.0)], [_C(1.0)]]},
        {"b_entries": [[1.0, 2.0]]},
        {"b_entries": [[_M("x"), _C(0.0)]]},
        {"b_entries": [[_M("x"), _C(0.0)]], "features": ["y"]},
        {"b_entries": [[_M(0), _C(0.0)]], "features": ["x", "x"]},
        {"b_entries": [[_M(0), _C(0.0)]], "a0_entries": [[_C(1.0)], [_C(1.0)]]},
        {"b_entries": [[_M(0), _C(0.0)]], "deterministic_columns": {1}},
    ],
)
def test_bad_models(kwargs):
    """Malformed grids, references and declarations raise ModelSpecError."""
    with pytest.raises(ModelSpecError):
        MomentModel(**kwargs)


def test_smooth_arity_check():
    """An expression cannot use more means than features are listed."""
    with pytest.raises(ModelSpecError):
        EntrySpec.smooth("m[2]", ["a", "b"])


def test_deterministic_columns_need_constant_a0():
    """Estimated A0 entries make every column stochastic."""
    _model = MomentModel(
        a0_entries=[[_M(0)]], b_entries=[[_C(1.0), _C(0.0)]]
    )
    assert _model.deterministic_columns == frozenset()


def test_covariance_identical_observations():
    """No dispersion, no covariance."""
    _model = MomentModel(b_entries=[[_M(0), _M(1)]])
    _est = estimate(_model, np.array([[1.0, 2.0], [1.0, 2.0]]))
    assert_allclose(covariance_vj(_est, 2), [[0.0]])


def test_covariance_matches_double_loop():
    """V_j agrees with an explicit covariance loop."""
    _model = MomentModel(b_entries=[[_M(0), _M(1)], [_M(2), _C(1.0)]])
    _x = np.random.default_rng(9).normal(size=(5, 3))
    _est = estimate(_model, _x)
    _z = _x[:, [0, 2]]
    _bar = _z.mean(axis=0)
    _oracle = np.zeros((2, 2))
    for _i in range(5):
        for _a in range(2):
            for _b in range(2):
                _oracle[_a, _b] += (_z[_i, _a] - _bar[_a]) * (_z[_i, _b] - _bar[_b])
    assert_allclose(covariance_vj(_est, 1), _oracle / 5, atol=1e-12)


def test_covariance_is_psd():
    """V_j has no materially negative eigenvalue."""
    _est = estimate(_random_model(), _random_data())
    _vj = covariance_vj(_est, 2)
    assert _vj.shape == (6, 6)
    assert np.min(np.linalg.eigvalsh(_vj)) >= -1e-9 * np.trace(_vj)


@pytest.mark.parametrize("j", [0, 3, 1.5, True])
def test_covariance_bad_index(j):
    """j outside [1, d1 + 1] is rejected."""
    _est = estimate(_random_model(), _random_data())
    with pytest.raises(ValueError):
        covariance_vj(_est, j)


def test_gradient_without_a0():
    """Without A0 the gradient is y."""
    assert_allclose(gradient_dj(None, [1.0, 2.0], [0.3, -0.7]), [0.3, -0.7])


def test_gradient_zero_direction():
    """The gradient is linear in y."""
    _a0 = np.array([[1.0], [2.0], [0.5]])
    assert_allclose(gradient_dj(_a0, [1.0, -1.0, 2.0], np.zeros(3)), np.zeros(6))


def _random_instance(rng):
    """A MEAN-entry model of random shape with data and a direction."""
    _p = int(rng.integers(2, 5))
    _d0 = int(rng.integers(1, _p))
    _d1 = int(rng.integers(1, 3))
    _features = iter(range(_p * (_d0 + _d1 + 1)))
    _model = MomentModel(
        a0_entries=[[_M(next(_features)) for _ in range(_d0)] for _ in range(_p)],
        b_entries=[
            [_M(next(_features)) for _ in range(_d1 + 1)] for _ in range(_p)
        ],
    )
    _data = rng.normal(loc=1.0, size=(80, _p * (_d0 + _d1 + 1)))
    return _model, _data, rng.normal(size=_p)


def _central_differences(a0, b, y, step=1e-6):
    _p, _d0 = a0.shape

    def _f(theta):
        _a = theta[: _p * _d0].reshape(_p, _d0, order="F")
        _m0 = np.eye(_p) - _a @ np.linalg.pinv(_a)
        return theta[_p * _d0 :] @ _m0 @ y

    _theta = np.concatenate([a0.ravel(order="F"), b])
    _fd = np.empty(_theta.size)
    for _k in range(_theta.size):
        _e = np.zeros(_theta.size)
        _e[_k] = step
        _fd[_k] = (_f(_theta + _e) - _f(_theta - _e)) / (2.0 * step)
    return _fd


def test_gradient_and_xi_variance_on_random_instances():
    """D_j matches finite differences and Var(xi' y) = D_j' V_j D_j."""
    _rng = np.random.default_rng(21)
    for _ in range(100):
        _model, _data, _y = _random_instance(_rng)
        _est = estimate(_model, _data)
        for _j in range(1, _est.d1 + 2):
            _b = _est.b_hat[_j - 1]
            _dj = gradient_dj(_est.a0_hat, _b, _y)
            _fd = _central_differences(_est.a0_hat, _b, _y)
            assert np.linalg.norm(_dj - _fd) < 1e-5 * np.linalg.norm(_fd)

            _xi = influence_xi(_est, _j) @ _y
            _lhs = np.mean((_xi - _xi.mean()) ** 2)
            _rhs = _dj @ covariance_vj(_est, _j) @ _dj
            assert_allclose(_lhs, _rhs, rtol=1e-8)


def test_gradient_shape_mismatch():
    """b_j and y must have the same length."""
    with pytest.raises(ModelSpecError):
        gradient_dj(None, [1.0, 2.0], [1.0])


def test_sigma_floor_binds():
    """A zero covariance gives the floor."""
    _s = sigma_hat(np.zeros((2, 2)), [1.0, 1.0], sigma_floor=1e-3)
    assert _s.sigma == pytest.approx(1e-3)
    assert _s.truncated


def test_sigma_scalar():
    """vj = 4, dj = 0.5 gives variance 1."""
    _s = sigma_hat(np.array([[4.0]]), np.array([0.5]))
    assert _s.raw_variance == pytest.approx(1.0)
    assert _s.sigma == pytest.approx(1.0)
    assert not _s.truncated


def test_sigma_homogeneous_in_y():
    """Doubling y doubles sigma above the floor."""
    _est = estimate(_random_model(), _random_data())
    _vj = covariance_vj(_est, 1)
    _y = np.array([0.2, -0.5, 0.3])
    _s1 = sigma_hat(_vj, gradient_dj(_est.a0_hat, _est.b_hat[0], _y))
    _s2 = sigma_hat(_vj, gradient_dj(_est.a0_hat, _est.b_hat[0], 2.0 * _y))
    assert _s2.sigma == pytest.approx(2.0 * _s1.sigma, rel=1e-10)


@pytest.mark.parametrize("sigma_floor", [0.0, -1.0])
def test_sigma_bad_floor(sigma_floor):
    """The floor must be positive."""
    with pytest.raises(ValueError):
        sigma_hat(np.eye(1), [1.0], sigma_floor=sigma_floor)


def test_sigma_dimension_mismatch():
    """vj and dj must agree in size."""
    with pytest.raises(ModelSpecError):
        sigma_hat(np.eye(2), [1.0, 2.0, 3.0])


def test_projected_moments():
    """Rows of b_hat M0 are orthogonal to the columns of A0."""
    _est = estimate(_random_model(), _random_data())
    assert_allclose(projected_moments(_est) @ _est.a0_hat, 0.0, atol=1e-10)


def test_model_json_round_trip():
    """A model re-parses into an equal model."""
    _model = MomentModel(
        a0_entries=[[_M("a")], [_C(1.0)]],
        b_entries=[
            [EntrySpec.smooth("m[1]/m[0]", ["a", "b"]), _M("b", scale=-1.0)],
            [_C(0.0), _C(0.0, null_coef=-1.0)],
        ],
        features=["a", "b"],
        null_value=0.5,
    )
    _again = MomentModel.from_json(json.dumps(_model.to_dict()))
    assert _again.to_dict() == _model.to_dict()
    assert _again.b_entries[0][0].kind is EntryKind.SMOOTH


@pytest.mark.parametrize(
    "payload",
    [
        [],
        {"a0": None},
        {"b": "nope"},
        {"b": [[{"kind": "mean"}, {"kind": "constant", "value": 0}]]},
        {"b": [[{"kind": "median", "feature": 0}, {"kind": "constant", "value": 0}]]},
        {"b": [[{"value": 1.0}, {"kind": "constant", "value": 0}]]},
    ],
)
def test_bad_model_json(payload):
    """Schema violations raise ModelSpecError."""
    with pytest.raises(ModelSpecError):
        MomentModel.from_dict(payload)
