"""Kernel dispatch: compiled Cython loops when built, numpy otherwise.

Set ``EXPOST_KERNELS=numpy`` to force the fallback.
"""
from __future__ import annotations

import itertools
import os
from types import ModuleType

import numpy as np

from . import _fallback


def _load_compiled() -> ModuleType | None:
    if os.environ.get("EXPOST_KERNELS", "").lower() == "numpy":
        return None
    try:
        from . import _kernels
    except ImportError:
        return None
    return _kernels


_compiled = _load_compiled()
BACKEND = "cython" if _compiled is not None else "numpy"
_BACKENDS: dict[str, ModuleType] = {"numpy": _fallback}
if _compiled is not None:
    _BACKENDS["cython"] = _compiled


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def get_backend(name: str | None = None) -> ModuleType:
    return _BACKENDS[name or BACKEND]


def pure_strategy_table(n_types: int, n_actions: int) -> np.ndarray:
    """All pure strategies in lexicographic order, one row of actions per strategy."""
    rows = list(itertools.product(range(n_actions), repeat=n_types))
    return np.array(rows, dtype=np.int_).reshape(len(rows), n_types)


def induced_payoff_matrix(joint, payoff, digits_a, digits_b, backend: str | None = None):
    impl = get_backend(backend)
    return impl.induced_payoff_matrix(
        np.ascontiguousarray(joint, dtype=float), np.ascontiguousarray(payoff, dtype=float),
        np.ascontiguousarray(digits_a, dtype=np.int_), np.ascontiguousarray(digits_b, dtype=np.int_),
    )


def pure_profile_regrets(cond_a, cond_b, payoff_a, payoff_b, digits_a, digits_b,
                         backend: str | None = None):
    impl = get_backend(backend)
    c = np.ascontiguousarray
    return impl.pure_profile_regrets(
        c(cond_a, dtype=float), c(cond_b, dtype=float),
        c(payoff_a, dtype=float), c(payoff_b, dtype=float),
        c(digits_a, dtype=np.int_), c(digits_b, dtype=np.int_),
    )
