"""Backend selection for the message-passing kernels.

The compiled extension is used when importable; ``SUBFIELD_LDPC_BACKEND``
(``auto``, ``cython`` or ``python``) overrides the choice.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = ("auto", "cython", "python")


def available() -> list[str]:
    return ["cython", "python"] if _ckernels is not None else ["python"]


def get_backend(name: str | None = None) -> ModuleType:
    name = name or os.environ.get("SUBFIELD_LDPC_BACKEND", "auto")
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}; expected one of {BACKENDS}")
    if name == "python":
        return _pykernels
    if name == "cython":
        if _ckernels is None:
            raise ImportError("compiled kernels are not built; run `pip install -e .`")
        return _ckernels
    return _ckernels if _ckernels is not None else _pykernels


def default_backend() -> str:
    return get_backend().BACKEND
