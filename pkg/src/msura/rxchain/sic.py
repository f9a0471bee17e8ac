"""Least-squares successive interference cancellation."""
from __future__ import annotations

import numpy as np

from ..errors import InputError

COND_LIMIT = 1e10


def ls_sic(Y: np.ndarray, X: np.ndarray) -> tuple[np.ndarray, bool]:
    """Project the decoded signals out of ``Y``.

    Returns ``(Y - Y X^H (X X^H)^{-1} X, regularized)``. When the Gram matrix
    is badly conditioned a ridge of ``1e-9 * trace / K`` is added and the
    flag is set.
    """
    Y = np.asarray(Y)
    X = np.asarray(X, dtype=complex)
    if X.size == 0:
        return Y.copy(), False
    if X.ndim != 2 or X.shape[1] != Y.shape[1]:
        raise InputError(f"signal matrix shape {X.shape} does not match observation {Y.shape}")
    gram = X @ X.conj().T
    regularized = False
    if not np.isfinite(np.linalg.cond(gram)) or np.linalg.cond(gram) > COND_LIMIT:
        eps = 1e-9 * np.real(np.trace(gram)) / X.shape[0]
        if not eps > 0:
            return Y.copy(), True
        gram = gram + eps * np.eye(X.shape[0])
        regularized = True
    coef = np.linalg.solve(gram, X @ Y.conj().T).conj().T
    return Y - coef @ X, regularized
