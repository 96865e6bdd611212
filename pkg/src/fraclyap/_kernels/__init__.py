"""Hot numerical kernels: compiled core with a pure-NumPy fallback.

Both backends expose the same four functions (``causal_conv``,
``ml_series_vec``, ``caputo_adams``, ``abc_adams``).  The compiled Cython
extension is preferred when importable; set ``FRACLYAP_BACKEND=python`` or
``FRACLYAP_BACKEND=compiled`` to force a choice.
"""

import os

from . import _pykernels

_requested = os.environ.get("FRACLYAP_BACKEND", "").strip().lower()
if _requested not in ("", "python", "compiled"):
    raise ValueError(f"FRACLYAP_BACKEND must be 'python' or 'compiled', got {_requested!r}")

if _requested == "python":
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise
        _impl = _pykernels
        BACKEND = "python"

causal_conv = _impl.causal_conv
ml_series_vec = _impl.ml_series_vec
caputo_adams = _impl.caputo_adams
abc_adams = _impl.abc_adams

__all__ = ["BACKEND", "causal_conv", "ml_series_vec", "caputo_adams", "abc_adams"]
