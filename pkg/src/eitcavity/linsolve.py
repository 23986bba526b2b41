"""Dense complex Gaussian elimination with partial pivoting for tiny systems."""
from __future__ import annotations

import numpy as np

from .errors import SingularParametersError

# |det| below this fraction of the product of row scales counts as singular
SINGULAR_RTOL = 1e-300


def solve_pivoted(matrix, rhs):
    """Solve ``matrix @ x = rhs`` by row-pivoted elimination.

    Parameters
    ----------
    matrix : (n, n) array_like
    rhs : (n,) array_like

    Returns
    -------
    x : (n,) complex ndarray
    det : complex
        Determinant of ``matrix``, a by-product of the factorisation.

    Raises
    ------
    SingularParametersError
        If the determinant magnitude is negligible relative to the row scales.
    """
    a = np.array(matrix, dtype=complex)
    b = np.array(rhs, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n) or b.shape != (n,):
        raise ValueError(f"shape mismatch: matrix {a.shape}, rhs {b.shape}")

    scale = float(np.prod(np.abs(a).max(axis=1)))
    det = 1.0 + 0.0j
    for k in range(n):
        pivot = k + int(np.argmax(np.abs(a[k:, k])))
        if pivot != k:
            a[[k, pivot]] = a[[pivot, k]]
            b[[k, pivot]] = b[[pivot, k]]
            det = -det
        det *= a[k, k]
        if a[k, k] == 0:
            break
        for i in range(k + 1, n):
            factor = a[i, k] / a[k, k]
            if factor != 0:
                a[i, k:] -= factor * a[k, k:]
                b[i] -= factor * b[k]

    if scale == 0 or not abs(det) > SINGULAR_RTOL * scale:
        raise SingularParametersError(f"matrix is singular (|det| = {abs(det):.3g})")

    x = np.empty(n, dtype=complex)
    for i in range(n - 1, -1, -1):
        x[i] = (b[i] - a[i, i + 1:] @ x[i + 1:]) / a[i, i]
    return x, det
