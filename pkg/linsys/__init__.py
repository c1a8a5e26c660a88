# Copyright © 2025 The linsys developers

"""
linsys: tests of whether an estimated linear system has a solution with
non-negative components.

Submodules
----------

closure
    Membership of a known triple in the closure of the solvable set.
moments
    Declarative moment models, estimation and delta-method variances.
direction
    Direction selection by linear programming.
split_test
    The sample-splitting test and its estimator front-end.
confidence
    Confidence sets by test inversion.
designs, simulation, plotting
    Simulation designs, Monte Carlo rejection curves and their plots.
"""

from .closure import MembershipReport
from .closure import Triple
from .closure import member_closure
from .confidence import ConfidenceSet
from .confidence import invert_ci
from .direction import MethodChoice
from .moments import EntrySpec
from .moments import MomentModel
from .simulation import RejectionCurve
from .simulation import monte_carlo
from .split_test import SplitSampleTest
from .split_test import TestOptions
from .split_test import TestOutcome
from .split_test import run_test

from ._meta import __author__
from ._meta import __version__

__all__ = [
    "ConfidenceSet",
    "EntrySpec",
    "MembershipReport",
    "MethodChoice",
    "MomentModel",
    "RejectionCurve",
    "SplitSampleTest",
    "TestOptions",
    "TestOutcome",
    "Triple",
    "invert_ci",
    "member_closure",
    "monte_carlo",
    "run_test",
    "__author__",
    "__version__",
]
