"""Hot kernels, dispatched to numba or numpy by ``gazebench._accel``.

Both implementations are importable directly as ``kernels.numba_impl`` and
``kernels.numpy_impl`` for cross-checking and benchmarking.
"""
from .. import _accel
from . import _numpy as numpy_impl

if _accel.HAVE_NUMBA:
    from . import _numba as numba_impl
else:  # pragma: no cover
    numba_impl = None

_impl = numba_impl if _accel.USE_NUMBA else numpy_impl

cone_flat_indices = _impl.cone_flat_indices
cone_sums = _impl.cone_sums
raycast = _impl.raycast
swept = _impl.swept
astar = _impl.astar

__all__ = ["cone_flat_indices", "cone_sums", "raycast", "swept", "astar", "numpy_impl", "numba_impl"]
