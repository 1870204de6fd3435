"""State-vector gate kernels.

The compiled Cython core is used when its extension module built; otherwise
the NumPy implementation takes over transparently. Set ``VQEKIT_PURE_PYTHON=1``
to force the fallback (the benchmark uses this to compare both).
"""

import os

from . import _numpy_kernels

if os.environ.get("VQEKIT_PURE_PYTHON"):
    _impl = _numpy_kernels
else:
    try:
        from . import _cykernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _numpy_kernels

IMPLEMENTATION = _impl.IMPLEMENTATION
apply_1q = _impl.apply_1q
apply_2q = _impl.apply_2q
apply_pauli = _impl.apply_pauli
