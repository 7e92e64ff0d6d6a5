"""Backend selection for the chain-walking kernels.

The compiled extension is used when it imports; otherwise the pure-Python
walkers are used. Set ``URNCTRW_BACKEND=python`` to force the fallback.
"""

import os

from . import _pykernels

python_backend = _pykernels

if os.environ.get("URNCTRW_BACKEND", "").lower() == "python":
    compiled_backend = None
    active = _pykernels
else:
    try:
        from . import _kernels as compiled_backend
    except ImportError:  # extension not built
        compiled_backend = None
        active = _pykernels
    else:
        active = compiled_backend

BACKEND = active.BACKEND
bl_walk = active.bl_walk
wf_walk = active.wf_walk
binomial_from_mode = active.binomial_from_mode
