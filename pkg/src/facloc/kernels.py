"""Backend selection for the numeric kernels.

The compiled extension is used when it was built; otherwise the pure-Python
module is loaded.  Callers go through the module-level names below, so
:func:`use_backend` switches every caller at once.
"""

from importlib import import_module
from types import ModuleType

from facloc import _pykernels

_NAMES = ("nearest", "max_nearest", "sum_nearest", "expected_nearest", "kcenter", "kmedian")

try:
    _compiled: ModuleType | None = import_module("facloc._ckernels")
except ImportError:
    _compiled = None

BACKEND = ""


def available_backends() -> list[str]:
    return ["python"] + (["compiled"] if _compiled is not None else [])


def backend_module(name: str) -> ModuleType:
    if name == "python":
        return _pykernels
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built; reinstall with a C compiler")
        return _compiled
    raise ValueError(f"unknown kernel backend {name!r}")


def use_backend(name: str) -> None:
    """Route all kernel calls through ``"python"`` or ``"compiled"``."""
    global BACKEND
    mod = backend_module(name)
    g = globals()
    for fn in _NAMES:
        g[fn] = getattr(mod, fn)
    BACKEND = name


use_backend("compiled" if _compiled is not None else "python")
