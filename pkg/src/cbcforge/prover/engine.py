"""Engine backend selection.

The compiled extension (built from _engine.pyx) is preferred; the pure
backend is a drop-in twin. Set CBCFORGE_PURE=1 to force the pure one.
"""

from __future__ import annotations

import os

from . import _engine_py

if os.environ.get("CBCFORGE_PURE") == "1":
    backend = _engine_py
else:
    try:
        from . import _engine as backend  # type: ignore[no-redef]
    except ImportError:
        backend = _engine_py

BACKEND = backend.BACKEND

CODE_VALID = _engine_py.CODE_VALID
CODE_INVALID = _engine_py.CODE_INVALID
CODE_HYP_ERROR = _engine_py.CODE_HYP_ERROR
CODE_CONCL_ERROR = _engine_py.CODE_CONCL_ERROR


def availableBackends():
    """All importable backends, for equivalence tests and benchmarks."""
    out = [_engine_py]
    try:
        from . import _engine

        out.append(_engine)
    except ImportError:
        pass
    return out
