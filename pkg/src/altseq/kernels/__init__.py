"""Hot numerical kernels with a compiled core and a pure-Python fallback.

Two interchangeable implementations of the same three operations live here:

* ``_ckern`` -- Cython extension, used when it imported successfully;
* ``pykern`` -- numpy reference implementation, always available.

Selection happens once at import time.  The environment variable
``ALTSEQ_BACKEND`` forces a choice: ``python`` (or ``py``) for the fallback,
``cython`` (or ``c``) to require the extension (ImportError if missing),
anything else is rejected.  ``BACKEND`` records what was picked.

Both backends are deterministic given identical inputs; across backends the
results agree to floating-point tolerance, not bit-for-bit.
"""

import os

_choice = os.environ.get("ALTSEQ_BACKEND", "auto").strip().lower()

if _choice in ("", "auto"):
    try:
        from . import _ckern as _impl
        BACKEND = "cython"
    except ImportError:
        from . import pykern as _impl
        BACKEND = "python"
elif _choice in ("cython", "c"):
    from . import _ckern as _impl
    BACKEND = "cython"
elif _choice in ("python", "py"):
    from . import pykern as _impl
    BACKEND = "python"
else:
    raise ImportError(
        f"ALTSEQ_BACKEND={_choice!r} not recognized; use 'auto', 'cython' or 'python'")

std_info = _impl.std_info
mh_chain = _impl.mh_chain
criterion_table = _impl.criterion_table

__all__ = ["BACKEND", "std_info", "mh_chain", "criterion_table"]
