"""Backend selection for the hot loops.

The compiled extension is used when it imports; set ``MEASFRIDGE_PURE=1`` to
force the numpy fallback.
"""

import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled

DEFAULT = "python" if os.environ.get("MEASFRIDGE_PURE") or _compiled is None else "compiled"


def get(name=None):
    name = name or DEFAULT
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} unavailable; have {sorted(BACKENDS)}") from None
