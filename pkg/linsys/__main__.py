# Copyright © 2025 The linsys developers

"""``python -m linsys``"""

import sys

from .cli import main

sys.exit(main())
