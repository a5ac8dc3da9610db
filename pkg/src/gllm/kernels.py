"""Backend selection for the numeric kernels.

The compiled extension is used when it imports cleanly; otherwise the
NumPy fallback is used. Set ``GLLM_PURE_PYTHON=1`` to force the fallback.
"""
import os

from gllm import _pykernels

if os.environ.get("GLLM_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from gllm import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

margin_sums = _impl.margin_sums
ipf_loop = _impl.ipf_loop
gammainc_pq = _impl.gammainc_pq


def compiled_module():
    """Return the compiled kernel module, or None if it is not built."""
    try:
        from gllm import _kernels
    except ImportError:
        return None
    return _kernels
