# Copyright © 2025 The linsys developers

"""
Base class for sample-splitting tests
"""

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._meta import DEBUG
from ._random import check_seed
from .direction import CnRegime
from .direction import Method
from .direction import MethodChoice
from .moments import SIGMA_FLOOR
from .moments import MomentModel


class BaseSplitTest(BaseEstimator):
    """Base class for deriving sample-splitting tests

    This class extends :class:`sklearn.base.BaseEstimator`, so every tuning
    knob of the test is an ``__init__`` parameter and ``get_params`` /
    ``set_params`` / ``repr`` behave like any scikit-learn estimator.
    Parameters are validated when :meth:`fit` is called, not at construction.

    Examples
    --------

    :class:`linsys.split_test.SplitSampleTest` is derived from this class.
    A subclass only has to implement ``fit()``:

    >>> from linsys.base import BaseSplitTest
    >>> class AlwaysAccept(BaseSplitTest):
    ...     def fit(self, data):
    ...         self._check_params()
    ...         self.p_value_ = 1.0
    ...         return self
    ...
    >>> AlwaysAccept(alpha=0.1)
    AlwaysAccept(alpha=0.1)
    >>> AlwaysAccept().n_splits
    1
    """

    # pylint: disable=too-many-instance-attributes,too-many-arguments

    def __init__(
        self,
        model=None,
        method="direct",
        j_star=None,
        alpha=0.05,
        seed=0,
        n_splits=1,
        sigma_floor=SIGMA_FLOOR,
        split_fraction=0.5,
        rank_tau=0.0,
        cn_regime="high",
    ):
        """Initialize a BaseSplitTest"""
        self.model = model
        self.method = method
        self.j_star = j_star
        self.alpha = alpha
        self.seed = seed
        self.n_splits = n_splits
        self.sigma_floor = sigma_floor
        self.split_fraction = split_fraction
        self.rank_tau = rank_tau
        self.cn_regime = cn_regime
        self.debug = DEBUG

    def _check_params(self):
        """Check validity of parameters. Raise ValueError if errors are detected."""
        if self.model is None:
            raise ValueError("model must be set, cannot be {0}".format(self.model))
        if not isinstance(self.model, MomentModel):
            raise ValueError(
                "model should be a linsys.MomentModel object, cannot be {0}".format(
                    self.model
                )
            )
        if self.method not in [_m.value for _m in Method]:
            raise ValueError(
                "method must be 'direct' or 'screening', cannot be {0}".format(
                    self.method
                )
            )
        if self.cn_regime not in [_c.value for _c in CnRegime]:
            raise ValueError(
                "cn_regime must be 'low' or 'high', cannot be {0}".format(
                    self.cn_regime
                )
            )
        if not isinstance(self.n_splits, int) or isinstance(self.n_splits, bool):
            raise ValueError(
                "n_splits must be an integer, cannot be {0}".format(self.n_splits)
            )
        if self.n_splits <= 0:
            raise ValueError(
                "n_splits must be greater than 0, cannot be {0}".format(self.n_splits)
            )
        check_seed(self.seed)

    def _check_initialized(self):
        """Check for the test outcome, raise an error if not found."""
        check_is_fitted(self, "outcome_")

    def _method_choice(self):
        return MethodChoice(
            kind=Method(self.method),
            j_star=self.j_star,
            cn_regime=CnRegime(self.cn_regime),
        )

    def fit(self, data):
        raise NotImplementedError
