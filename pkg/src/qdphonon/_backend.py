"""Dispatch to the numba or numpy kernel module."""

from ._accel import USE_NUMBA, backend_name

if USE_NUMBA:
    from . import _kernels_numba as kernels
else:
    from . import _kernels_numpy as kernels

__all__ = ["kernels", "backend_name"]
