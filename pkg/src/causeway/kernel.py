"""Kernel selection: the compiled extension when built, else the Python interpreter.

Set ``CAUSEWAY_PURE_PYTHON=1`` to force the fallback.
"""

import os

from ._program import OPCODES, Program, compile_model
from . import _kernel_py

if os.environ.get("CAUSEWAY_PURE_PYTHON"):
    _impl = _kernel_py
else:
    try:
        from . import _kernel as _impl
    except ImportError:  # extension not built
        _impl = _kernel_py

if _impl.OPCODES != OPCODES:  # pragma: no cover - build skew guard
    raise ImportError("compiled kernel opcodes do not match causeway._program")

run = _impl.run
IMPLEMENTATION = _impl.IMPLEMENTATION

__all__ = ["IMPLEMENTATION", "Program", "compile_model", "run"]
