"""Perron-Frobenius analysis of nonnegative input matrices."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NegativeEntry, NoConvergence, NotIrreducible, ZeroSpectralRadius
from .linalg import gauss_solve

__all__ = [
    "SpectralResult",
    "is_irreducible",
    "perron_eigenpair",
    "max_profit_rate",
    "strong_components",
]


@dataclass(frozen=True)
class SpectralResult:
    rho: float
    perron_vector: np.ndarray
    irreducible: bool
    positive: bool
    iterations: int
    max_profit_rate: Optional[float]


def _nonnegative(A):
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"A must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("A has non-finite entries")
    if np.any(A < 0):
        i, j = np.argwhere(A < 0)[0]
        raise NegativeEntry(f"A[{i}, {j}] = {A[i, j]!r} is negative")
    return A


def _reach(adj, start):
    seen = np.zeros(adj.shape[0], dtype=bool)
    seen[start] = True
    stack = [start]
    while stack:
        i = stack.pop()
        for j in np.flatnonzero(adj[i] & ~seen):
            seen[j] = True
            stack.append(j)
    return seen


def _reaches_all(adj):
    return bool(_reach(adj, 0).all())


def strong_components(A):
    """Index arrays of the strongly connected components of the graph of A."""
    adj = np.asarray(A) > 0
    n = adj.shape[0]
    assigned = np.zeros(n, dtype=bool)
    comps = []
    for i in range(n):
        if not assigned[i]:
            comp = np.flatnonzero(_reach(adj, i) & _reach(adj.T, i))
            assigned[comp] = True
            comps.append(comp)
    return comps


def is_irreducible(A):
    """True iff the graph with an edge i -> j for every ``a_ij > 0`` is
    strongly connected.

    A 1x1 matrix counts as irreducible exactly when its entry is positive.
    """
    A = _nonnegative(A)
    n = A.shape[0]
    if n == 0:
        raise ValueError("A is empty")
    if n == 1:
        return bool(A[0, 0] > 0)
    adj = A > 0
    return _reaches_all(adj) and _reaches_all(adj.T)


def perron_eigenpair(A, tol=1e-12, max_iter=None, *, allow_reducible=False,
                     shift=None, x0=None):
    """Dominant eigenpair of a nonnegative matrix by shifted power iteration.

    Iterates ``x <- (A + cI) x / ||(A + cI) x||_1`` from a positive start.
    The shift ``c > 0`` leaves the Perron vector unchanged and makes
    ``rho + c`` strictly dominant even when ``A`` is cyclic (eigenvalues
    spread evenly on the circle of radius ``rho``), where the unshifted
    iteration oscillates.

    Parameters
    ----------
    A : (n, n) array_like, nonnegative
    tol : float
        Stop once successive iterates differ by at most ``tol`` in the
        max norm.
    max_iter : int, optional
        Defaults to ``100 n + 1000``.
    allow_reducible : bool
        Compute the pair for a reducible matrix instead of raising
        :class:`NotIrreducible`. The vector is then only nonnegative.
    shift : float, optional
        Diagonal shift ``c``. Defaults to the largest row sum of ``A``
        (an upper bound on ``rho``), or 1 for the zero matrix.
    x0 : array_like, optional
        Positive starting vector; uniform by default.

    Returns
    -------
    SpectralResult
    """
    A = _nonnegative(A)
    n = A.shape[0]
    irreducible = is_irreducible(A)
    if not irreducible and not allow_reducible:
        raise NotIrreducible("A is reducible; pass allow_reducible=True to proceed")
    if max_iter is None:
        max_iter = 100 * n + 1000
    if not irreducible:
        return _reducible_eigenpair(A, tol, max_iter)
    if shift is None:
        shift = A.sum(axis=1).max()
        if shift == 0:
            shift = 1.0
    x = np.full(n, 1.0 / n) if x0 is None else np.asarray(x0, dtype=float)
    x = x / x.sum()

    for it in range(1, max_iter + 1):
        y = A @ x + shift * x
        y /= y.sum()
        delta = np.abs(y - x).max()
        x = y
        if delta <= tol:
            break
    else:
        raise NoConvergence(f"power iteration did not converge in {max_iter} iterations",
                            iterations=max_iter)

    # sum(x) == 1, so the l1 growth factor of A is the Rayleigh-style estimate
    rho = float((A @ x).sum())
    return SpectralResult(
        rho=rho,
        perron_vector=x,
        irreducible=irreducible,
        positive=bool(np.all(A > 0)),
        iterations=it,
        max_profit_rate=1.0 / rho - 1.0 if rho > 0 else None,
    )


def _reducible_eigenpair(A, tol, max_iter):
    """rho from the irreducible diagonal blocks, vector by inverse iteration.

    For ``sigma > rho`` the resolvent ``(sigma I - A)^{-1}`` is nonnegative
    and its dominant eigenvalue ``1 / (sigma - rho)`` is well separated, so
    iterating it from a positive start converges fast even when two blocks
    share nearly the same radius.
    """
    n = A.shape[0]
    rho, iterations = 0.0, 0
    for comp in strong_components(A):
        if comp.size == 1:
            rho = max(rho, float(A[comp[0], comp[0]]))
        else:
            sub = perron_eigenpair(A[np.ix_(comp, comp)], tol, max_iter)
            rho = max(rho, sub.rho)
            iterations += sub.iterations

    # A defective rho (Jordan block) pulls the iterate in only like shift / k,
    # hence the small shift; it stays far above the pivot tolerance.
    scale = max(rho, float(A.sum(axis=1).max())) or 1.0
    R = (rho + 1e-9 * scale) * np.eye(n) - A
    x = np.full(n, 1.0 / n)
    for it in range(1, max_iter + 1):
        y = gauss_solve(R, x)
        y /= y.sum()
        delta = np.abs(y - x).max()
        x = y
        if delta <= tol:
            break
    else:
        raise NoConvergence(f"inverse iteration did not converge in {max_iter} iterations",
                            iterations=max_iter)
    x = np.where(x < 0, 0.0, x)
    x /= x.sum()
    return SpectralResult(
        rho=rho,
        perron_vector=x,
        irreducible=False,
        positive=bool(np.all(A > 0)),
        iterations=iterations + it,
        max_profit_rate=1.0 / rho - 1.0 if rho > 0 else None,
    )


def max_profit_rate(A, *, allow_reducible=False):
    """Maximum uniform profit rate ``R = 1/rho(A) - 1``.

    For ``0 <= r < R`` the matrix ``I - (1+r)A`` has a nonnegative inverse.
    """
    res = perron_eigenpair(A, allow_reducible=allow_reducible)
    if res.rho <= 0:
        raise ZeroSpectralRadius("rho(A) = 0, maximum profit rate is unbounded")
    return res.max_profit_rate
