"""Independent oracles and random-instance generators for the test suite.

Nothing here calls the code paths it is used to check.
"""

import numpy as np

from pricegrav import EconomyModel, Variant


def charpoly(A):
    """Characteristic polynomial coefficients by Faddeev-LeVerrier."""
    n = A.shape[0]
    coeffs = [1.0]
    Mk = np.zeros_like(A)
    I = np.eye(n)
    for k in range(1, n + 1):
        Mk = A @ Mk + coeffs[-1] * I
        coeffs.append(-np.trace(A @ Mk) / k)
    return np.array(coeffs)


def dominant_root(A):
    """Largest real root of det(lambda I - A), Newton-polished.

    For a nonnegative matrix this is the spectral radius. Imprimitive
    matrices have complex roots of the same modulus, so the pick is by
    real part among the (numerically) real roots.
    """
    c = charpoly(np.asarray(A, dtype=float))
    roots = np.roots(c)
    real = roots[np.abs(roots.imag) <= 1e-6 * max(1.0, np.abs(roots).max())]
    lam = real.real.max()
    dc = np.polyder(c)
    for _ in range(5):
        d = np.polyval(dc, lam)
        if d == 0:
            break
        lam -= np.polyval(c, lam) / d
    return lam


def plain_rk4_affine(K, g, x0, T, N):
    """Textbook RK4 for dx/dt = K x + g, price block only."""
    h = T / N
    x = np.array(x0, dtype=float)
    F = lambda y: K @ y + g
    for _ in range(N):
        k1 = F(x)
        k2 = F(x + h / 2 * k1)
        k3 = F(x + h / 2 * k2)
        k4 = F(x + h * k3)
        x = x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return x


def central_difference_jacobian(fun, v, eps=1e-5):
    v = np.asarray(v, dtype=float)
    cols = []
    for j in range(v.size):
        e = np.zeros_like(v)
        e[j] = eps
        cols.append((fun(v + e) - fun(v - e)) / (2 * eps))
    return np.column_stack(cols)


def random_irreducible(rng, n, density=0.5):
    """Nonnegative matrix containing a random Hamiltonian cycle."""
    A = rng.uniform(0, 1, (n, n)) * (rng.uniform(0, 1, (n, n)) < density)
    perm = rng.permutation(n)
    for k in range(n):
        i, j = perm[k], perm[(k + 1) % n]
        if A[i, j] == 0:
            A[i, j] = rng.uniform(0.1, 1)
    return A


def random_wage_price_model(rng, n, horizon=1.0, wage=None):
    """Positive A with rho(A) in [0.3, 0.8] and (1+r) rho(A) < 0.95."""
    A = rng.uniform(0.05, 1.0, (n, n))
    rho = np.abs(np.linalg.eigvals(A)).max()
    A *= rng.uniform(0.3, 0.8) / rho
    rho = np.abs(np.linalg.eigvals(A)).max()
    r = rng.uniform(0.0, min(0.5, 0.95 / rho - 1.0))
    L = rng.uniform(0.5, 1.5, n)
    return EconomyModel(A=A, L=L, profit_rate=r, horizon=horizon,
                        variant=Variant.WAGE_PRICE, wage=wage)


def random_gravitation_model(rng, n, horizon=1.0):
    A = rng.uniform(0.0, 0.4, (n, n))
    B = np.eye(n) + np.diag(rng.uniform(0.0, 0.5, n))
    return EconomyModel(A=A, B=B, L=rng.uniform(0.5, 1.5, n),
                        profit_rate=rng.uniform(0.0, 0.2), horizon=horizon,
                        variant=Variant.GRAVITATION)
