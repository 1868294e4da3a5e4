"""Kernel selection.

The compiled extension is used when it imports; ``TITCHMARSH_PURE_PYTHON=1``
forces the numpy fallback.
"""

import os

from . import _purepy

kernels = _purepy
NAME = "python"

if os.environ.get("TITCHMARSH_PURE_PYTHON", "") != "1":
    try:
        from . import _kernels as kernels  # noqa: F811
        NAME = "compiled"
    except ImportError:
        pass

phi_pair_grid = kernels.phi_pair_grid
max_pair_ratio = kernels.max_pair_ratio
