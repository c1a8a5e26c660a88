# Copyright © 2025 The linsys developers

"""
Membership oracles for the set of solvable linear systems and its closure.

A :class:`Triple` ``(A0, A1, beta)`` belongs to ``C0`` when
``A0 x0 + A1 x1 = beta`` has a solution with ``x0`` free and ``x1 >= 0``.
The Euclidean closure of ``C0`` is the union of

- ``Cbar0``: triples for which the largest value of
  ``min(min_j a_j' M0 y, -beta' M0 y)`` over the unit l1 ball is not positive,
  where ``M0`` annihilates the column space of ``A0``, and
- ``C_RD``: triples whose ``A0`` is rank deficient.

Examples
--------

The scalar model ``a x = b`` with ``x >= 0``: the point ``(1, -1)`` lies
outside the closure, while every point on the line ``a = 0`` lies inside it.

>>> from linsys.closure import Triple, member_closure
>>> member_closure(Triple(a0=None, a1=[[1.0]], beta=[-1.0])).in_closure
False
>>> member_closure(Triple(a0=None, a1=[[0.0]], beta=[1.0])).in_closure
True
"""

from dataclasses import dataclass
from typing import Optional
import json
import logging

import numpy as np

from . import _linprog
from .exceptions import ModelSpecError
from .linalg import RANK_TOL
from .linalg import annihilator
from .linalg import as_matrix
from .linalg import as_vector
from .linalg import numerical_rank

__all__ = [
    "Triple",
    "MembershipReport",
    "member_c0",
    "member_c0_unprojected",
    "member_crd",
    "member_cbar0",
    "member_closure",
]

logger = logging.getLogger(__name__)

EQUALITY_TOL = 1e-8
FEASIBILITY_TOL = 1e-8


@dataclass(frozen=True)
class Triple:
    """A deterministic instance ``(A0, A1, beta)`` of the linear system.

    Parameters
    ----------
    a0 : array-like of shape (p, d0), or None
        Coefficients of the unrestricted unknowns. None when ``d0 = 0``.
    a1 : array-like of shape (p, d1)
        Coefficients of the non-negative unknowns, ``d1 >= 1``.
    beta : array-like of shape (p,)
        Right-hand side.
    """

    a0: Optional[np.ndarray]
    a1: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        _a1 = as_matrix(self.a1, "a1")
        _beta = as_vector(self.beta, "beta")
        if _a1.shape[1] < 1:
            raise ModelSpecError("a1 must have at least one column")
        if _a1.shape[0] != _beta.shape[0]:
            raise ModelSpecError(
                "a1 has {0} rows but beta has length {1}".format(
                    _a1.shape[0], _beta.shape[0]
                )
            )
        _a0 = None
        if self.a0 is not None:
            _a0 = as_matrix(self.a0, "a0")
            if _a0.shape[1] < 1:
                raise ModelSpecError("a0 must be None or have at least one column")
            if _a0.shape[0] != _a1.shape[0]:
                raise ModelSpecError(
                    "a0 has {0} rows but a1 has {1}".format(
                        _a0.shape[0], _a1.shape[0]
                    )
                )
        object.__setattr__(self, "a0", _a0)
        object.__setattr__(self, "a1", _a1)
        object.__setattr__(self, "beta", _beta)

    @property
    def p(self) -> int:
        return self.a1.shape[0]

    @property
    def d0(self) -> int:
        return 0 if self.a0 is None else self.a0.shape[1]

    @property
    def d1(self) -> int:
        return self.a1.shape[1]

    def to_dict(self) -> dict:
        return {
            "a0": None if self.a0 is None else self.a0.tolist(),
            "a1": self.a1.tolist(),
            "beta": self.beta.tolist(),
        }

    @staticmethod
    def from_dict(payload):
        """Build a Triple from the ``{"a0", "a1", "beta"}`` JSON schema."""
        if not isinstance(payload, dict):
            raise ModelSpecError("triple must be a JSON object")
        _missing = {"a1", "beta"} - set(payload)
        if _missing:
            raise ModelSpecError(
                "triple is missing keys: {0}".format(", ".join(sorted(_missing)))
            )
        _a1 = payload["a1"]
        if not _a1 or not isinstance(_a1, list) or not all(_a1):
            raise ModelSpecError("a1 must be a non-empty list of non-empty rows")
        return Triple(a0=payload.get("a0"), a1=_a1, beta=payload["beta"])

    @staticmethod
    def from_json(text):
        return Triple.from_dict(json.loads(text))


@dataclass(frozen=True)
class MembershipReport:
    """Verdicts of the three oracles on one triple.

    Attributes
    ----------
    in_c0, in_cbar0, in_crd, in_closure : bool
        ``in_closure`` is ``in_cbar0 or in_crd``.
    lp_value : float
        Optimal value ``t*`` of the ``Cbar0`` program.
    witness : ndarray or None
        A feasible ``x1`` when ``in_c0``; otherwise the maximizing ``y`` of
        the ``Cbar0`` program when the triple lies outside the closure.
    near_boundary : bool
        The triple is outside ``C0`` and ``|t*|`` is within ten times the
        feasibility tolerance, so the ``Cbar0`` verdict rests on the
        tolerance convention. Always False for members of ``C0``.
    """

    in_c0: bool
    in_cbar0: bool
    in_crd: bool
    in_closure: bool
    lp_value: float
    witness: Optional[np.ndarray] = None
    near_boundary: bool = False

    def to_dict(self) -> dict:
        return {
            "in_c0": self.in_c0,
            "in_cbar0": self.in_cbar0,
            "in_crd": self.in_crd,
            "in_closure": self.in_closure,
            "lp_value": self.lp_value,
            "witness": None if self.witness is None else self.witness.tolist(),
            "near_boundary": self.near_boundary,
        }

    @staticmethod
    def from_dict(payload):
        _witness = payload.get("witness")
        return MembershipReport(
            in_c0=bool(payload["in_c0"]),
            in_cbar0=bool(payload["in_cbar0"]),
            in_crd=bool(payload["in_crd"]),
            in_closure=bool(payload["in_closure"]),
            lp_value=float(payload["lp_value"]),
            witness=None if _witness is None else np.asarray(_witness, dtype=float),
            near_boundary=bool(payload.get("near_boundary", False)),
        )


def _equality_feasible(matrix, rhs, bounds, tol):
    """Find ``x`` within ``bounds`` with ``matrix @ x = rhs`` up to ``tol``."""
    _solution = _linprog.solve(
        np.zeros(matrix.shape[1]),
        A_eq=matrix,
        b_eq=rhs,
        bounds=bounds,
        options={"primal_feasibility_tolerance": tol},
        confirm_infeasible=True,
    )
    return None if _solution is None else _solution[0]


def member_c0(triple, tol=EQUALITY_TOL, rank_tol=RANK_TOL):
    """Decide whether ``M0 A1 x1 = M0 beta`` has a solution ``x1 >= 0``.

    Parameters
    ----------
    triple : :class:`Triple`
    tol : float, optional (default: 1e-8)
        Equality rows may miss by at most ``tol``; handed to HiGHS as its
        primal feasibility tolerance.

    Returns
    -------
    member : bool
    witness : ndarray or None
        A feasible ``x1`` when ``member`` is True.
    """
    _m0 = annihilator(triple.a0, triple.p, rank_tol=rank_tol)
    _x1 = _equality_feasible(_m0 @ triple.a1, _m0 @ triple.beta, (0, None), tol)
    return _x1 is not None, _x1


def member_c0_unprojected(triple, tol=EQUALITY_TOL):
    """Decide membership in ``C0`` from ``A0 x0 + A1 x1 = beta`` directly.

    Cross-check for :func:`member_c0`, which works on the projected system.
    Returns ``(member, (x0, x1))`` with ``x0`` None when ``d0 = 0``.
    """
    if triple.a0 is None:
        _A = triple.a1
        _bounds = [(0, None)] * triple.d1
    else:
        _A = np.hstack([triple.a0, triple.a1])
        _bounds = [(None, None)] * triple.d0 + [(0, None)] * triple.d1
    _x = _equality_feasible(_A, triple.beta, _bounds, tol)
    if _x is None:
        return False, None
    if triple.a0 is None:
        return True, (None, _x)
    return True, (_x[: triple.d0], _x[triple.d0 :])


def member_crd(a0, tol=RANK_TOL) -> bool:
    """Whether ``a0`` is numerically rank deficient.

    Always False for ``a0 = None`` and always True when ``a0`` has fewer rows
    than columns.

    >>> import numpy as np
    >>> from linsys.closure import member_crd
    >>> member_crd(np.ones((1, 2)))
    True
    >>> member_crd(np.eye(2))
    False
    """
    if a0 is None:
        return False
    _a0 = as_matrix(a0, "a0")
    if _a0.shape[0] < _a0.shape[1]:
        return True
    return numerical_rank(_a0, rank_tol=tol) < _a0.shape[1]


def _cbar0_program(triple, rank_tol):
    _m0 = annihilator(triple.a0, triple.p, rank_tol=rank_tol)
    # Rows a_j' M0 for j <= d1 followed by -beta' M0.
    _rows = np.vstack([(_m0 @ triple.a1).T, -(_m0 @ triple.beta)[None, :]])
    _solution = _linprog.max_min_over_l1_ball(_rows)
    if _solution is None:
        # y = 0, t = 0 is always feasible
        raise AssertionError("Cbar0 program reported infeasible")
    return _solution


def member_cbar0(triple, feasibility_tol=FEASIBILITY_TOL, rank_tol=RANK_TOL):
    """Decide membership in ``Cbar0``.

    Solves ``max t`` subject to ``(M0 a_j)' y >= t`` for every column of
    ``A1``, ``-(M0 beta)' y >= t`` and ``||y||_1 <= 1``.

    Returns
    -------
    member : bool
        ``t* <= feasibility_tol``; ties count as members since ``Cbar0`` is
        closed.
    lp_value : float
        The optimal value ``t*``, never negative since ``y = 0`` is feasible.
    """
    _, _t_star = _cbar0_program(triple, rank_tol)
    return _t_star <= feasibility_tol, _t_star


def member_closure(
    triple, tol=EQUALITY_TOL, feasibility_tol=FEASIBILITY_TOL, rank_tol=RANK_TOL
):
    """Run all three oracles and combine them into a :class:`MembershipReport`.

    Parameters
    ----------
    triple : :class:`Triple`
    tol : float, optional (default: 1e-8)
        Equality tolerance for the ``C0`` feasibility LP.
    feasibility_tol : float, optional (default: 1e-8)
        Threshold on ``t*`` for the ``Cbar0`` verdict.
    rank_tol : float, optional (default: 1e-10)
        Relative singular-value cut-off for ranks and pseudoinverses.

    Returns
    -------
    report : :class:`MembershipReport`
    """
    _in_c0, _x1 = member_c0(triple, tol=tol, rank_tol=rank_tol)
    _y, _t_star = _cbar0_program(triple, rank_tol)
    _in_cbar0 = _t_star <= feasibility_tol
    _in_crd = member_crd(triple.a0, tol=rank_tol)
    _in_closure = _in_cbar0 or _in_crd

    _near_boundary = not _in_c0 and abs(_t_star) <= 10.0 * feasibility_tol
    if _near_boundary:
        logger.warning(
            "Cbar0 value %.3e is within tolerance of zero; verdict follows the "
            "closed-set convention",
            _t_star,
        )

    if _in_c0:
        _witness = _x1
    elif not _in_closure:
        _witness = _y
    else:
        _witness = None

    return MembershipReport(
        in_c0=_in_c0,
        in_cbar0=_in_cbar0,
        in_crd=_in_crd,
        in_closure=_in_closure,
        lp_value=_t_star,
        witness=_witness,
        near_boundary=_near_boundary,
    )
