"""Kernel dispatch: compiled extension when importable, numpy otherwise.

Set BOTTFORGE_KERNELS=python to force the numpy path.
"""
import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels
if os.environ.get("BOTTFORGE_KERNELS", "").lower() != "python":
    try:
        from . import _ckernels as _impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

pfaffian = _impl.pfaffian
batch_pfaffian = _impl.batch_pfaffian
loop_phase = _impl.loop_phase
