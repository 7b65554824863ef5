"""Select the Montgomery kernel implementation at import time.

The compiled extension is preferred; set ``PMKRSA_BACKEND=python`` to force
the pure-Python fallback.
"""
import os

from pmkrsa import _pykernels as python_kernels

try:
    from pmkrsa import _cmont as compiled_kernels
except ImportError:
    compiled_kernels = None

if os.environ.get("PMKRSA_BACKEND", "").lower() == "python" or compiled_kernels is None:
    kernels = python_kernels
    NAME = "python"
else:
    kernels = compiled_kernels
    NAME = "cython"


def for_width(k):
    """Kernel module able to run REDC with R = 2**k."""
    if kernels is compiled_kernels and k % 64 == 0:
        return kernels
    return python_kernels
