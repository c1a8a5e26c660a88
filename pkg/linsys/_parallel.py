# Copyright © 2025 The linsys developers

"""
joblib plumbing: the ``LINSYS_THREADS`` environment variable caps ``n_jobs``.
"""

import os

from joblib import Parallel
from joblib import delayed
from joblib import effective_n_jobs

__all__ = ["THREADS_ENV", "resolve_n_jobs", "parallel_map"]

THREADS_ENV = "LINSYS_THREADS"


def resolve_n_jobs(n_jobs=None) -> int:
    """Number of workers for ``n_jobs`` after applying ``LINSYS_THREADS``."""
    _n = effective_n_jobs(1 if n_jobs is None else n_jobs)
    _cap = os.environ.get(THREADS_ENV)
    if _cap is None or _cap == "":
        return _n
    try:
        _cap = int(_cap)
    except ValueError:
        raise ValueError(
            "{0} must be a positive integer, cannot be {1!r}".format(THREADS_ENV, _cap)
        ) from None
    if _cap < 1:
        raise ValueError(
            "{0} must be a positive integer, cannot be {1}".format(THREADS_ENV, _cap)
        )
    return min(_n, _cap)


def parallel_map(function, arguments, n_jobs=None):
    """``[function(*a) for a in arguments]``, possibly on several workers.

    Results keep the order of ``arguments``.
    """
    _n_jobs = resolve_n_jobs(n_jobs)
    if _n_jobs == 1:
        return [function(*_args) for _args in arguments]
    return Parallel(n_jobs=_n_jobs)(delayed(function)(*_args) for _args in arguments)
