"""Kernel selection: compiled extension when available, pure Python otherwise.

Set JAGG_PURE_KERNELS=1 to force the pure fallback (used by the benchmark
and to exercise both code paths in the test suite).
"""

import os

if os.environ.get("JAGG_PURE_KERNELS") == "1":
    from . import _core_py as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _core_py as _impl

IMPL = _impl.IMPL
NEG_SENTINEL = _impl.NEG_SENTINEL
lam_index = _impl.lam_index
maxplus_pass = _impl.maxplus_pass
sat_masks = _impl.sat_masks
