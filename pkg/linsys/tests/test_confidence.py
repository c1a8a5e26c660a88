# Copyright © 2025 The linsys developers

"""
Tests for linsys.confidence
"""

import json

import numpy as np
import pytest

from linsys._random import derive_seed
from linsys.confidence import ConfidenceSet
from linsys.confidence import SeedPolicy
from linsys.confidence import invert_ci
from linsys.designs import gen_cox
from linsys.moments import EntrySpec
from linsys.moments import MomentModel
from linsys.split_test import run_test

# Never rejects: the deterministic zero column makes the direction LP infeasible.
_ACCEPTING = MomentModel(b_entries=[[EntrySpec.constant(0.0), EntrySpec.mean(0)]])
# Always rejects: both columns have mean 5 and unit variance.
_REJECTING = MomentModel(b_entries=[[EntrySpec.mean(0), EntrySpec.mean(1)]])


def _data(n=200):
    return np.random.default_rng(0).normal(loc=5.0, size=(n, 2))


def _accept_below(cut):
    def _family(value):
        return _ACCEPTING if value <= cut else _REJECTING

    return _family


def test_everything_accepted():
    """A test that never rejects accepts the whole grid."""
    _cs = invert_ci(lambda _v: _ACCEPTING, _data(), grid=[0.0, 1.0, 2.0])
    assert _cs.accepted.all()
    assert _cs.p_values == pytest.approx([0.5, 0.5, 0.5])
    assert _cs.interval_hull == (0.0, 2.0)
    assert _cs.grid_hull == (0.0, 2.0)
    assert not _cs.refined
    assert _cs.contiguous


def test_nothing_accepted():
    """A test that always rejects gives an empty set."""
    _cs = invert_ci(lambda _v: _REJECTING, _data(), grid=[0.0, 1.0])
    assert not _cs.accepted.any()
    assert _cs.interval_hull is None
    assert _cs.grid_hull is None


def test_accepted_matches_pvalues():
    """Acceptance is p >= alpha at every grid point."""
    _data_cox, _model = gen_cox(H=3, theta=0.0, n=400, seed=4)
    _cs = invert_ci(_model, _data_cox, grid=np.linspace(-1.0, 1.0, 5), seed=1)
    assert np.array_equal(_cs.accepted, _cs.p_values >= 0.05)


def test_shared_seed_policy():
    """Every grid point uses the same split seed."""
    _data_cox, _model = gen_cox(H=3, theta=0.0, n=300, seed=2)
    _grid = [-0.5, 0.5]
    _cs = invert_ci(_model, _data_cox, grid=_grid, seed=6)
    for _v, _p in zip(_grid, _cs.p_values):
        _expected = run_test(_model.with_null_value(_v), _data_cox, seed=6).p_value
        assert _p == pytest.approx(_expected)


def test_per_point_seed_policy():
    """Grid index i uses derive_seed(seed, i)."""
    _data_cox, _model = gen_cox(H=3, theta=0.0, n=300, seed=2)
    _grid = [-0.5, 0.5]
    _cs = invert_ci(_model, _data_cox, grid=_grid, seed=6, seed_policy="per_point")
    for _i, (_v, _p) in enumerate(zip(_grid, _cs.p_values)):
        _expected = run_test(
            _model.with_null_value(_v), _data_cox, seed=derive_seed(6, _i)
        ).p_value
        assert _p == pytest.approx(_expected)


def test_refine_upper_transition():
    """Bisection locates the transition within step / 2**8."""
    _cs = invert_ci(
        _accept_below(0.3), _data(), grid=[0.0, 0.25, 0.5, 0.75, 1.0], refine=True
    )
    assert _cs.refined
    assert _cs.grid_hull == (0.0, 0.25)
    _lo, _hi = _cs.interval_hull
    assert _lo == 0.0
    assert 0.3 - 0.25 / 2 ** 8 <= _hi <= 0.3


def test_refine_lower_transition():
    """The lower end moves toward the transition as well."""

    def _family(value):
        return _ACCEPTING if value >= 0.6 else _REJECTING

    _cs = invert_ci(_family, _data(), grid=[0.0, 0.5, 1.0], refine=True)
    _lo, _hi = _cs.interval_hull
    assert _cs.grid_hull == (1.0, 1.0)
    assert 0.6 <= _lo <= 0.6 + 0.5 / 2 ** 8
    assert _hi == 1.0


def test_non_contiguous():
    """Accepted points separated by a rejection are flagged."""

    def _family(value):
        return _ACCEPTING if abs(value - 0.5) > 0.2 else _REJECTING

    _cs = invert_ci(_family, _data(), grid=[0.0, 0.5, 1.0])
    assert list(_cs.accepted) == [True, False, True]
    assert not _cs.contiguous
    assert _cs.interval_hull == (0.0, 1.0)


@pytest.mark.parametrize(
    "test_input", [[], [0.0, 0.0], [1.0, 0.0], [0.0, np.inf], [np.nan]]
)
def test_bad_grid(test_input):
    """The grid must be non-empty, finite and strictly increasing."""
    with pytest.raises(ValueError):
        invert_ci(_ACCEPTING, _data(), grid=test_input)


@pytest.mark.parametrize("test_input", ["model.json", 3, None])
def test_bad_family(test_input):
    """The family must be a model or a callable."""
    with pytest.raises(ValueError):
        invert_ci(test_input, _data(), grid=[0.0])


def test_bad_seed_policy():
    """Unknown seed policies raise ValueError."""
    with pytest.raises(ValueError):
        invert_ci(_ACCEPTING, _data(), grid=[0.0], seed_policy="random")


def test_parallel_matches_serial():
    """joblib workers give the same confidence set."""
    _data_cox, _model = gen_cox(H=3, theta=0.0, n=200, seed=9)
    _grid = np.linspace(-1.0, 1.0, 4)
    _serial = invert_ci(_model, _data_cox, grid=_grid, seed=2, n_jobs=1)
    _parallel = invert_ci(_model, _data_cox, grid=_grid, seed=2, n_jobs=2)
    assert _serial == _parallel


def test_json_round_trip():
    """A ConfidenceSet re-parses into an equal object."""
    _cs = invert_ci(_accept_below(0.3), _data(), grid=[0.0, 0.5], refine=True)
    assert ConfidenceSet.from_dict(json.loads(_cs.to_json())) == _cs
    assert SeedPolicy("shared") is SeedPolicy.SHARED


def test_to_frame():
    """One row per grid value."""
    _frame = invert_ci(_accept_below(0.3), _data(), grid=[0.0, 0.5]).to_frame()
    assert list(_frame.columns) == ["value", "p_value", "accepted"]
    assert list(_frame["accepted"]) == [True, False]
