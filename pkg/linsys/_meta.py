# Copyright © 2025 The linsys developers

"""
Package metadata and the global debug switch.

``DEBUG`` is read once from the ``LINSYS_DEBUG`` environment variable at
import time and must stay off in distributed builds. When it is on, the
command line interface logs at DEBUG level and :class:`linsys.base.BaseSplitTest`
subclasses print their outcomes after ``fit``.

>>> from linsys._meta import DEBUG
>>> isinstance(DEBUG, bool)
True
"""

import os

__author__ = "The linsys developers"
__version__ = "0.1.0.dev"

DEBUG = os.environ.get("LINSYS_DEBUG", "").strip().lower() not in ("", "0", "false")
