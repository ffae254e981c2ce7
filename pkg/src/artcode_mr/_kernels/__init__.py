"""Hot kernels with a compiled backend and a pure-Python fallback.

The compiled extension is used when it imports; set ``ARTCODE_MR_PURE=1``
to force the fallback.  ``BACKEND`` names the active implementation.
"""

import os

from . import _pykernels as python

if os.environ.get("ARTCODE_MR_PURE", "") not in ("", "0"):
    compiled = None
else:
    try:
        from . import _ckernels as compiled
    except ImportError:  # extension not built
        compiled = None

_impl = compiled if compiled is not None else python
BACKEND = "compiled" if compiled is not None else "python"

label_mask = _impl.label_mask
best_split = _impl.best_split

__all__ = ["BACKEND", "best_split", "compiled", "label_mask", "python"]
