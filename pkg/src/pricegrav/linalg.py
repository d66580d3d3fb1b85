"""Dense linear algebra for small price systems.

Gaussian elimination with partial pivoting is the solver used for every
linear system in the package (steady states and Newton steps). The matrix
exponential and the affine closed form serve as oracles for the integrator.
"""

import math

import numpy as np

from .errors import SingularMatrix

__all__ = ["gauss_solve", "mat_exp", "affine_steady_solution"]


def _as_square(M, name="M"):
    M = np.array(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    return M


def gauss_solve(M, b, pivot_tol=None):
    """Solve ``M x = b`` by Gaussian elimination with partial pivoting.

    At step ``k`` the row holding the largest ``|M[i, k]|`` for ``i >= k``
    is swapped into the pivot position.

    Parameters
    ----------
    M : (n, n) array_like
    b : (n,) array_like
    pivot_tol : float, optional
        Pivots with magnitude ``<= pivot_tol`` are treated as zero. Defaults
        to ``1e-12 * max|M|`` so the test scales with the data.

    Returns
    -------
    x : (n,) ndarray

    Raises
    ------
    SingularMatrix
        If some column has no admissible pivot.
    """
    a = _as_square(M)
    x = np.array(b, dtype=float).reshape(-1)
    n = a.shape[0]
    if x.shape[0] != n:
        raise ValueError(f"b has length {x.shape[0]}, expected {n}")
    if not np.all(np.isfinite(x)):
        raise ValueError("b has non-finite entries")
    if pivot_tol is None:
        pivot_tol = 1e-12 * (np.abs(a).max() if n else 0.0)

    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[p, k]) <= pivot_tol:
            raise SingularMatrix(f"no pivot above {pivot_tol:.3g} in column {k}", column=k)
        if p != k:
            a[[k, p]] = a[[p, k]]
            x[[k, p]] = x[[p, k]]
        if k + 1 < n:
            lam = a[k + 1:, k] / a[k, k]
            a[k + 1:, k:] -= np.outer(lam, a[k, k:])
            x[k + 1:] -= lam * x[k]

    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - a[k, k + 1:] @ x[k + 1:]) / a[k, k]
    return x


def mat_exp(M, t=1.0):
    """Return ``exp(t M)`` by scaling and squaring around a Taylor core.

    ``t M`` is scaled by ``2**-s`` until its infinity norm is at most 1/2,
    the Taylor series is summed until the next term is below machine
    precision, and the result is squared ``s`` times.
    """
    M = _as_square(M)
    t = float(t)
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    X = t * M
    n = X.shape[0]
    norm = np.abs(X).sum(axis=1).max() if n else 0.0
    s = max(0, math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0
    X = X / 2.0**s

    E = np.eye(n)
    term = np.eye(n)
    for k in range(1, 40):
        term = term @ X / k
        E = E + term
        if np.abs(term).max() <= np.finfo(float).eps * np.abs(E).max():
            break
    for _ in range(s):
        E = E @ E
    return E


def affine_steady_solution(M, g, P0, t):
    """Exact solution at time ``t`` of ``dx/dt = M x + g`` with ``x(0) = P0``.

    Evaluates ``exp(tM) P0 + M^{-1} (exp(tM) - I) g`` for constant ``g``.
    Raises :class:`SingularMatrix` when ``M`` is not invertible.
    """
    M = _as_square(M)
    g = np.asarray(g, dtype=float)
    P0 = np.asarray(P0, dtype=float)
    E = mat_exp(M, t)
    return E @ P0 + gauss_solve(M, (E - np.eye(M.shape[0])) @ g)
