"""Select the compiled kernel when it is built; ``CTQ_PURE_PYTHON=1`` forces the fallback."""
import os

from . import _kernels_py

if os.environ.get("CTQ_PURE_PYTHON") == "1":
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

Evaluator = _impl.Evaluator
BACKEND = _impl.BACKEND
local_maxima = _impl.local_maxima


def evaluator_for(s, backend=None):
    """Kernel evaluator for a canonical state; ``backend`` picks "python" or "cython" explicitly."""
    impl = _impl
    if backend == "python":
        impl = _kernels_py
    elif backend == "cython":
        from . import _kernels as impl
    return impl.Evaluator(*s.a, s.mu)
