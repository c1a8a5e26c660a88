# Copyright © 2025 The linsys developers

"""
Dense linear algebra kernel.

Thin wrappers around :mod:`scipy.linalg` that fix the conventions used in the
rest of the package: finite entries only, a relative rank tolerance for the
pseudoinverse, and a column-major ``vec`` operator so that

.. math:: \\mathrm{vec}(ABC) = (C' \\otimes A)\\,\\mathrm{vec}(B).

Examples
--------

>>> import numpy as np
>>> from linsys.linalg import annihilator, vec
>>> annihilator(np.array([[1.0], [0.0]]), 2)
array([[0., 0.],
       [0., 1.]])
>>> vec(np.array([[1.0, 2.0], [3.0, 4.0]]))
array([1., 3., 2., 4.])
"""

import numpy as np
import scipy.linalg

from .exceptions import ModelSpecError
from .exceptions import NumericalError

__all__ = [
    "RANK_TOL",
    "as_matrix",
    "as_vector",
    "pseudoinverse",
    "annihilator",
    "kron",
    "vec",
    "singular_values",
    "numerical_rank",
]

# Relative to the largest singular value.
RANK_TOL = 1e-10


def _to_float_array(values, name):
    try:
        return np.array(values, dtype=float)
    except (TypeError, ValueError) as _err:
        raise ModelSpecError(
            "{0} is not a rectangular array of numbers: {1}".format(name, _err)
        ) from _err


def as_matrix(values, name="matrix") -> np.ndarray:
    """Convert ``values`` to a finite two-dimensional float array.

    Raises
    ------
    ModelSpecError
        If the input is ragged, non-numeric, not two-dimensional or has
        NaN/Inf entries.
    """
    _m = _to_float_array(values, name)
    if _m.ndim != 2:
        raise ModelSpecError(
            "{0} must be two-dimensional, found shape {1}".format(name, _m.shape)
        )
    if not np.all(np.isfinite(_m)):
        raise ModelSpecError("{0} has non-finite entries".format(name))
    return _m


def as_vector(values, name="vector") -> np.ndarray:
    """Convert ``values`` to a finite one-dimensional float array."""
    _v = _to_float_array(values, name)
    if _v.ndim != 1:
        raise ModelSpecError(
            "{0} must be one-dimensional, found shape {1}".format(name, _v.shape)
        )
    if not np.all(np.isfinite(_v)):
        raise ModelSpecError("{0} has non-finite entries".format(name))
    return _v


def pseudoinverse(matrix, rank_tol=RANK_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse computed from the SVD.

    Parameters
    ----------
    matrix : array-like, shape (rows, cols)
        Finite matrix.
    rank_tol : float, optional (default: 1e-10)
        Singular values below ``rank_tol * s_max`` are treated as zero.

    Returns
    -------
    pinv : ndarray, shape (cols, rows)

    Examples
    --------

    >>> import numpy as np
    >>> from linsys.linalg import pseudoinverse
    >>> pseudoinverse(np.array([[3.0], [4.0]]))
    array([[0.12, 0.16]])
    """
    _m = as_matrix(matrix)
    try:
        return scipy.linalg.pinv(_m, atol=0.0, rtol=rank_tol)
    except np.linalg.LinAlgError as _err:
        raise NumericalError("SVD did not converge: {0}".format(_err)) from _err


def annihilator(a0, p, rank_tol=RANK_TOL) -> np.ndarray:
    """Projection onto the orthogonal complement of the column space of ``a0``.

    Parameters
    ----------
    a0 : array-like of shape (p, d0), or None
        When None (``d0 = 0``) the column space is empty and the identity is
        returned.
    p : int
        Number of rows.

    Returns
    -------
    m0 : ndarray, shape (p, p)
        Symmetric idempotent matrix ``I_p - a0 a0^+``.
    """
    if a0 is None:
        return np.eye(p)
    _a0 = as_matrix(a0, "a0")
    if _a0.shape[0] != p:
        raise ModelSpecError(
            "a0 must have {0} rows, found {1}".format(p, _a0.shape[0])
        )
    _m0 = np.eye(p) - _a0 @ pseudoinverse(_a0, rank_tol=rank_tol)
    return 0.5 * (_m0 + _m0.T)


def kron(a, b) -> np.ndarray:
    """Kronecker product of two vectors, in the standard order."""
    return np.kron(np.ravel(a), np.ravel(b))


def vec(matrix) -> np.ndarray:
    """Stack the columns of ``matrix`` top to bottom."""
    return np.asarray(matrix, dtype=float).reshape(-1, order="F")


def singular_values(matrix) -> np.ndarray:
    """Singular values in non-increasing order, ``min(rows, cols)`` of them."""
    _m = as_matrix(matrix)
    if _m.size == 0:
        return np.zeros(0)
    try:
        return scipy.linalg.svdvals(_m)
    except np.linalg.LinAlgError as _err:
        raise NumericalError("SVD did not converge: {0}".format(_err)) from _err


def numerical_rank(matrix, rank_tol=RANK_TOL) -> int:
    """Count of singular values strictly above ``rank_tol * s_max``."""
    _s = singular_values(matrix)
    if _s.size == 0 or _s[0] == 0.0:
        return 0
    return int(np.sum(_s > rank_tol * _s[0]))
