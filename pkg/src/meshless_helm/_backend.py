"""Pick the compiled kernels when present, the numpy fallback otherwise.

Set ``MESHLESS_HELM_PURE_PYTHON=1`` to force the fallback (used by the
benchmark and by the equivalence tests).
"""
import os

from . import _fallback

BACKEND = "python"
kernels = _fallback

if os.environ.get("MESHLESS_HELM_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _speedups as _compiled
    except ImportError:
        pass
    else:
        kernels = _compiled
        BACKEND = "compiled"


def compiled_available():
    try:
        from . import _speedups  # noqa: F401
    except ImportError:
        return False
    return True
