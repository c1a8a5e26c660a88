# Copyright © 2025 The linsys developers

"""
SVG rendering of rejection curves.

The direct method is drawn solid and the screening method dashed, the
identified set is shaded and a dotted horizontal line marks the nominal
level.
"""

import logging
import math

import numpy as np
from matplotlib import rc_context
from matplotlib.figure import Figure

__all__ = ["plot_rejection_curve"]

logger = logging.getLogger(__name__)


def plot_rejection_curve(
    curve,
    path=None,
    identified_set=None,
    alpha=0.05,
    xlabel="hypothesized value",
    title=None,
):
    """Draw a :class:`linsys.simulation.RejectionCurve`.

    Parameters
    ----------
    curve : :class:`linsys.simulation.RejectionCurve`
    path : str or path-like, optional
        Where to write the figure; the format follows the suffix (use
        ``.svg``). Nothing is written when None.
    identified_set : tuple of float, optional
        ``(lo, hi)`` to shade; infinite ends are clipped to the grid.
    alpha : float, optional (default: 0.05)
        Height of the reference line.
    xlabel : str, optional
    title : str, optional

    Returns
    -------
    figure : :class:`matplotlib.figure.Figure`
    """
    _fig = Figure(figsize=(5.0, 3.5))
    _ax = _fig.add_subplot(1, 1, 1)
    _grid = np.asarray(curve.grid, dtype=float)

    if identified_set is not None:
        _lo, _hi = identified_set
        _lo = _grid.min() if math.isinf(_lo) else _lo
        _hi = _grid.max() if math.isinf(_hi) else _hi
        _ax.axvspan(_lo, _hi, color="0.85", zorder=0, label="identified set")

    if not np.all(np.isnan(curve.reject_direct)):
        _ax.plot(_grid, curve.reject_direct, "k-", label="direct")
    if not np.all(np.isnan(curve.reject_screening)):
        _ax.plot(_grid, curve.reject_screening, "k--", label="screening")
    _ax.axhline(alpha, color="0.4", linestyle=":", linewidth=1.0)

    if _grid.size > 1:
        _ax.set_xlim(_grid.min(), _grid.max())
    _ax.set_ylim(0.0, 1.0)
    _ax.set_xlabel(xlabel)
    _ax.set_ylabel("rejection probability")
    if title is not None:
        _ax.set_title(title)
    _ax.legend(loc="upper left", frameon=False)
    _fig.tight_layout()

    if path is not None:
        # fixed ids and no timestamp keep SVG output byte-stable
        with rc_context({"svg.hashsalt": "linsys"}):
            if str(path).lower().endswith(".svg"):
                _fig.savefig(path, metadata={"Date": None})
            else:
                _fig.savefig(path)
        logger.info("wrote rejection curve plot to %s", path)
    return _fig
