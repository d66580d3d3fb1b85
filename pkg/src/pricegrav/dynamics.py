"""Price dynamics and forward sensitivities integrated by classical RK4.

The state carried by the integrator is an ``(n, n+1)`` array ``X`` whose
first column is the price vector ``P`` and whose remaining block is the
sensitivity matrix ``S[i, j] = dP_i/dv_j``. Both variants are linear in
``X`` for fixed rates ``v``:

gravitation::

    dP/dt = v * (M P) + f(t)
    dS/dt = v[:, None] * (M S) + diag(M P)

wage-price::

    dP/dt = (1+r) A P - v * P + f(t)        (f defaults to w L)
    dS/dt = (1+r) A S - v[:, None] * S - diag(P)
"""

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NonFiniteState
from .model import Variant

__all__ = [
    "AugmentedState",
    "Forcing",
    "Trajectory",
    "rhs_model_g",
    "rhs_model_w",
    "system_matrix",
    "default_steps",
    "default_forcing",
    "integrate_rk4",
    "spectral_abscissa",
    "VerifyReport",
    "verify_rk4",
]


@dataclass(frozen=True)
class AugmentedState:
    prices: np.ndarray
    sensitivities: np.ndarray
    time: float = 0.0

    @classmethod
    def initial(cls, P0):
        P0 = np.asarray(P0, dtype=float)
        return cls(P0.copy(), np.zeros((P0.size, P0.size)), 0.0)

    def as_array(self):
        return np.column_stack([self.prices, self.sensitivities])


class ForcingMode(enum.Enum):
    CONSTANT = "constant"
    SAMPLED = "sampled"


@dataclass(frozen=True)
class Forcing:
    """Exogenous term ``f(t)``: constant, or sampled and linearly interpolated."""

    mode: ForcingMode
    constant_value: Optional[np.ndarray] = None
    times: Optional[np.ndarray] = None
    samples: Optional[np.ndarray] = None

    @classmethod
    def constant(cls, value):
        value = np.array(value, dtype=float).reshape(-1)
        if not np.all(np.isfinite(value)):
            raise ValueError("forcing value has non-finite entries")
        return cls(ForcingMode.CONSTANT, constant_value=value)

    @classmethod
    def zero(cls, n):
        return cls.constant(np.zeros(n))

    @classmethod
    def sampled(cls, times, samples):
        times = np.array(times, dtype=float).reshape(-1)
        samples = np.array(samples, dtype=float)
        if samples.ndim != 2 or samples.shape[0] != times.size:
            raise ValueError("samples must be a (len(times), n) array")
        if times.size < 2 or np.any(np.diff(times) <= 0):
            raise ValueError("sample times must be strictly increasing (at least two knots)")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(samples))):
            raise ValueError("forcing samples have non-finite entries")
        return cls(ForcingMode.SAMPLED, times=times, samples=samples)

    @property
    def n(self):
        if self.mode is ForcingMode.CONSTANT:
            return self.constant_value.size
        return self.samples.shape[1]

    @property
    def is_constant(self):
        return self.mode is ForcingMode.CONSTANT

    def covers(self, T):
        return self.is_constant or (self.times[0] <= 0.0 and self.times[-1] >= T)

    def __call__(self, t):
        if self.is_constant:
            return self.constant_value
        return np.array([np.interp(t, self.times, col) for col in self.samples.T])


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    prices: np.ndarray

    def __len__(self):
        return self.times.size


def system_matrix(model, V):
    """Matrix ``K`` of the price block ``dP/dt = K P + f`` at rates ``V``."""
    V = np.asarray(V, dtype=float)
    if model.variant is Variant.GRAVITATION:
        return V[:, None] * model.system_matrix
    return model.markup_matrix - np.diag(V)


def spectral_abscissa(model, V):
    """Largest real part among the eigenvalues of ``system_matrix(model, V)``.

    Negative values mean the price block is asymptotically stable.
    """
    return float(np.linalg.eigvals(system_matrix(model, V)).real.max())


def default_steps(model, V):
    K = system_matrix(model, V)
    return max(200, math.ceil(50.0 * model.horizon * np.abs(K).sum(axis=1).max()))


def default_forcing(model):
    """Zero for the gravitation model, the wage bill ``w L`` for wage-price."""
    if model.variant is Variant.GRAVITATION:
        return Forcing.zero(model.n)
    return Forcing.constant(model.effective_wage() * model.L)


def _g_derivative(M, v, X, ft):
    Y = M @ X
    dX = v[:, None] * Y
    idx = np.arange(v.size)
    dX[idx, idx + 1] += Y[:, 0]
    dX[:, 0] += ft
    return dX


def _w_derivative(K, v, X, ft):
    dX = K @ X - v[:, None] * X
    idx = np.arange(v.size)
    dX[idx, idx + 1] -= X[:, 0]
    dX[:, 0] += ft
    return dX


def _check_dims(model, V, state):
    if V.shape != (model.n,) or state.prices.shape != (model.n,):
        raise ValueError(f"dimension mismatch: model order {model.n}, "
                         f"V {V.shape}, prices {state.prices.shape}")


def _as_derivative(state, dX):
    return AugmentedState(dX[:, 0].copy(), dX[:, 1:].copy(), state.time)


def rhs_model_g(state, V, model, f=None):
    """Time derivative of the augmented gravitation state.

    ``dP_i/dt = v_i (M P)_i + f_i(t)`` and
    ``dS_ij/dt = delta_ij (M P)_i + v_i (M S)_ij``. The ``delta_ij`` term is
    the derivative of ``v_i`` itself and multiplies the prices, not the
    sensitivities.
    """
    V = np.asarray(V, dtype=float)
    _check_dims(model, V, state)
    f = Forcing.zero(model.n) if f is None else f
    dX = _g_derivative(model.system_matrix, V, state.as_array(), f(state.time))
    return _as_derivative(state, dX)


def rhs_model_w(state, V, model, f=None):
    """Time derivative of the augmented wage-price state.

    ``f`` defaults to the constant wage bill ``w L``.
    """
    V = np.asarray(V, dtype=float)
    _check_dims(model, V, state)
    f = default_forcing(model) if f is None else f
    dX = _w_derivative(model.markup_matrix, V, state.as_array(), f(state.time))
    return _as_derivative(state, dX)


def integrate_rk4(model, V, P0, f=None, steps=None, stride=1):
    """Integrate prices and sensitivities from ``t = 0`` to ``T``.

    Parameters
    ----------
    model : EconomyModel
    V : (n,) array_like
        Differentiation rates.
    P0 : (n,) array_like
        Initial prices; the initial sensitivities are zero.
    f : Forcing, optional
        See :func:`default_forcing`.
    steps : int, optional
        Number of fixed RK4 steps, ``h = T / steps``. See :func:`default_steps`.
    stride : int
        Record prices every ``stride`` steps (``floor(steps/stride) + 1``
        snapshots, starting at ``t = 0``).

    Returns
    -------
    state : AugmentedState
        Prices and sensitivities at exactly ``t = T``.
    trajectory : Trajectory

    Raises
    ------
    NonFiniteState
        When any entry overflows or becomes NaN.
    """
    V = np.array(V, dtype=float).reshape(-1)
    P0 = np.array(P0, dtype=float).reshape(-1)
    n = model.n
    if V.shape != (n,) or P0.shape != (n,):
        raise ValueError(f"V and P0 must have length {n}")
    if not (np.all(np.isfinite(V)) and np.all(np.isfinite(P0))):
        raise ValueError("V and P0 must be finite")
    if f is None:
        f = default_forcing(model)
    if f.n != n:
        raise ValueError(f"forcing has dimension {f.n}, expected {n}")
    T = model.horizon
    if not f.covers(T):
        raise ValueError(f"sampled forcing does not cover [0, {T!r}]")
    if steps is None:
        steps = default_steps(model, V)
    steps = int(steps)
    stride = int(stride)
    if steps < 1 or stride < 1:
        raise ValueError("steps and stride must be >= 1")

    if model.variant is Variant.GRAVITATION:
        deriv, K = _g_derivative, model.system_matrix
    else:
        deriv, K = _w_derivative, model.markup_matrix

    h = T / steps
    X = np.zeros((n, n + 1))
    X[:, 0] = P0
    n_rec = steps // stride + 1
    rec_t = np.empty(n_rec)
    rec_p = np.empty((n_rec, n))
    rec_t[0], rec_p[0] = 0.0, P0
    r = 1
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(steps):
            t = k * h
            k1 = deriv(K, V, X, f(t))
            k2 = deriv(K, V, X + (0.5 * h) * k1, f(t + 0.5 * h))
            k3 = deriv(K, V, X + (0.5 * h) * k2, f(t + 0.5 * h))
            k4 = deriv(K, V, X + h * k3, f(t + h))
            X = X + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.isfinite(X).all():
                raise NonFiniteState(step=k + 1, time=(k + 1) * h)
            if (k + 1) % stride == 0:
                rec_t[r] = T if k + 1 == steps else (k + 1) * h
                rec_p[r] = X[:, 0]
                r += 1

    state = AugmentedState(X[:, 0].copy(), X[:, 1:].copy(), T)
    return state, Trajectory(rec_t, rec_p)


@dataclass(frozen=True)
class VerifyReport:
    reference: str
    discrepancy: float
    order_estimate: Optional[float]
    order_steps: Optional[tuple]
    steps: int
    prices_rk4: np.ndarray
    prices_reference: np.ndarray


def verify_rk4(model, V, P0, f=None, steps=None):
    """Compare the RK4 prices at ``T`` with an independent reference.

    For constant forcing the price block is ``dP/dt = K P + g`` with
    ``K = system_matrix(model, V)``. The reference is the closed form
    ``exp(TK) P0 + K^{-1}(exp(TK) - I) g`` when ``K`` is invertible,
    ``P0 + T g`` when ``K = 0``, and otherwise RK4 with 16 times the steps.

    The order estimate is ``log2(e(N) / e(2N))`` against the reference, on
    a grid coarse enough (``h |K| <= 1/4``) for the errors to sit well above
    rounding; with the RK4 fallback it is the three-level Richardson
    estimate from ``N, 2N, 4N`` steps instead. ``None`` when the errors are
    at rounding level.
    """
    from .linalg import affine_steady_solution
    from .errors import SingularMatrix

    if f is None:
        f = default_forcing(model)
    if not f.is_constant:
        raise ValueError("closed-form oracle needs constant forcing")
    V = np.asarray(V, dtype=float)
    P0 = np.asarray(P0, dtype=float)
    T = model.horizon
    K = system_matrix(model, V)
    g = f.constant_value
    if steps is None:
        steps = default_steps(model, V)

    def prices(N):
        return integrate_rk4(model, V, P0, f, steps=N, stride=N)[0].prices

    p_rk = prices(steps)
    if not np.any(K):
        kind, ref = "quadrature", P0 + T * g
    else:
        try:
            kind, ref = "closed_form", affine_steady_solution(K, g, P0, T)
        except SingularMatrix:
            kind, ref = "rk4_16x", prices(16 * steps)
    discrepancy = float(np.abs(p_rk - ref).max())

    floor = 1e-12 * (1.0 + float(np.abs(ref).max()))
    N = max(1, math.ceil(4.0 * T * np.abs(K).sum(axis=1).max()))
    order = None
    if kind == "closed_form":
        e1 = np.abs(prices(N) - ref).max()
        e2 = np.abs(prices(2 * N) - ref).max()
        if e2 > floor:
            order = float(math.log2(e1 / e2))
    elif kind == "rk4_16x":
        y1, y2, y4 = prices(N), prices(2 * N), prices(4 * N)
        d1, d2 = np.abs(y1 - y2).max(), np.abs(y2 - y4).max()
        if d2 > floor:
            order = float(math.log2(d1 / d2))
    return VerifyReport(kind, discrepancy, order, (N, 2 * N) if order is not None else None,
                        steps, p_rk, ref)
