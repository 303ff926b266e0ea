"""Kernel backend selection.

Prefers the compiled extension; falls back to the numpy reference
implementation. Set SINRSCHED_KERNEL=python or =c to force one.
"""

import os

from . import _kernel_py

_choice = os.environ.get("SINRSCHED_KERNEL", "").strip().lower()

if _choice == "python":
    impl = _kernel_py
else:
    try:
        from . import _kernel_c as impl  # type: ignore[no-redef]
    except ImportError:
        if _choice == "c":
            raise ImportError(
                "SINRSCHED_KERNEL=c requested but the compiled kernel is not built"
            ) from None
        impl = _kernel_py

BACKEND: str = impl.BACKEND
run_distributed_chunk = impl.run_distributed_chunk
