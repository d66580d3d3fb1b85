"""Shooting for the differentiation rates that steer prices onto target.

Find ``v`` with ``G(v) = P(T, v) - p_star = 0``. Each Newton step integrates
prices together with their sensitivities, uses ``H(v) = dP(T)/dv`` as the
Jacobian and solves ``H d = -G`` with :func:`~pricegrav.linalg.gauss_solve`.
"""

import enum
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .dynamics import Trajectory, default_steps, integrate_rk4
from .errors import InvalidParams, NonFiniteState, SingularMatrix
from .linalg import gauss_solve
from .model import Variant

__all__ = [
    "FailureReason",
    "ShootOptions",
    "ShootingResult",
    "DiagnosisStatus",
    "Diagnosis",
    "is_viable",
    "shoot",
    "diagnose_existence_scalar",
    "sensitivity_report",
]


class FailureReason(enum.Enum):
    NONE = "NONE"
    MAX_ITER = "MAX_ITER"
    SINGULAR_JACOBIAN = "SINGULAR_JACOBIAN"
    DIVERGED = "DIVERGED"
    NONFINITE = "NONFINITE"
    LINE_SEARCH = "LINE_SEARCH"


@dataclass(frozen=True)
class ShootOptions:
    tol: float = 1e-10
    max_iter: int = 50
    damping: bool = True
    max_halvings: int = 30
    # fixed for the whole run so that G stays a smooth function of v
    steps: Optional[int] = None
    stride: int = 1
    divergence_factor: float = 1e6


@dataclass
class ShootingResult:
    v_solution: np.ndarray
    converged: bool
    residual_history: List[float]
    iterations: int
    final_trajectory: Optional[Trajectory]
    viable: bool
    failure_reason: FailureReason
    steps: int
    prices_at_T: Optional[np.ndarray] = None
    jacobian: Optional[np.ndarray] = None
    v_history: List[np.ndarray] = field(default_factory=list)
    step_lengths: List[float] = field(default_factory=list)


def is_viable(v):
    """Economic viability: every differentiation rate strictly positive."""
    return bool(np.all(np.asarray(v) > 0))


def _sup(x):
    return float(np.abs(x).max())


def shoot(model, P0, p_star, f=None, v0=None, opts=None):
    """Newton-Kantorovich shooting for the rates ``v``.

    Backtracking (on by default) starts from the full step and halves
    ``alpha`` while ``|G(v + alpha d)| > (1 - 1e-4 alpha) |G(v)|``, so no
    accepted step increases the residual. ``opts.damping=False`` takes the
    bare Newton step every time.

    Failures never raise; they end the run with ``converged=False`` and a
    :class:`FailureReason`.
    """
    opts = opts or ShootOptions()
    if opts.tol <= 0:
        raise ValueError("tol must be positive")
    n = model.n
    P0 = np.asarray(P0, dtype=float)
    p_star = np.asarray(p_star, dtype=float)
    if P0.shape != (n,) or p_star.shape != (n,):
        raise ValueError(f"P0 and p_star must have length {n}")
    v = np.ones(n) if v0 is None else np.array(v0, dtype=float).reshape(-1)
    steps = opts.steps if opts.steps is not None else default_steps(model, v)

    def run(rates):
        state, traj = integrate_rk4(model, rates, P0, f, steps=steps, stride=opts.stride)
        return state, traj, state.prices - p_star

    def finish(reason, history, state=None, traj=None):
        return ShootingResult(
            v_solution=v,
            converged=reason is FailureReason.NONE,
            residual_history=history,
            iterations=len(history) - 1,
            final_trajectory=traj,
            viable=is_viable(v),
            failure_reason=reason,
            steps=steps,
            prices_at_T=None if state is None else state.prices,
            jacobian=None if state is None else state.sensitivities,
            v_history=v_history,
            step_lengths=step_lengths,
        )

    v_history = [v.copy()]
    step_lengths = []
    try:
        state, traj, G = run(v)
    except NonFiniteState:
        return finish(FailureReason.NONFINITE, [math.inf])
    g = _sup(G)
    history = [g]

    while True:
        if g <= opts.tol:
            return finish(FailureReason.NONE, history, state, traj)
        if len(history) - 1 >= opts.max_iter:
            return finish(FailureReason.MAX_ITER, history, state, traj)
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                d = gauss_solve(state.sensitivities, -G)
        except SingularMatrix:
            return finish(FailureReason.SINGULAR_JACOBIAN, history, state, traj)
        if not np.all(np.isfinite(d)):
            return finish(FailureReason.NONFINITE, history, state, traj)

        alpha = 1.0
        for _ in range(opts.max_halvings + 1):
            v_try = v + alpha * d
            try:
                if not np.all(np.isfinite(v_try)):
                    raise NonFiniteState(step=0)
                trial = run(v_try)
                g_try = _sup(trial[2])
            except NonFiniteState:
                trial, g_try = None, math.inf
            if not opts.damping or g_try <= (1.0 - 1e-4 * alpha) * g:
                break
            alpha *= 0.5
        else:
            return finish(FailureReason.LINE_SEARCH, history, state, traj)
        if trial is None:
            return finish(FailureReason.NONFINITE, history, state, traj)

        v = v_try
        state, traj, G = trial
        g = g_try
        history.append(g)
        v_history.append(v.copy())
        step_lengths.append(alpha)
        if not math.isfinite(g) or g > opts.divergence_factor * history[0]:
            return finish(FailureReason.DIVERGED, history, state, traj)


class DiagnosisStatus(enum.Enum):
    SOLVABLE_VIABLE = "SOLVABLE_VIABLE"
    SOLVABLE_NONVIABLE = "SOLVABLE_NONVIABLE"
    NO_SOLUTION = "NO_SOLUTION"


@dataclass(frozen=True)
class Diagnosis:
    status: DiagnosisStatus
    v: Optional[float] = None
    note: str = ""


def diagnose_existence_scalar(variant, a, T, P0, p_star):
    """Closed-form solvability of the one-branch problems.

    ``GRAVITATION``: ``dP/dt = v a P`` gives ``P(T) = P0 exp(v a T)``.
    ``WAGE_PRICE``: ``dP/dt = (a - v) P`` gives ``P(T) = P0 exp((a - v) T)``.

    A target is reachable only from an initial price of the same strict
    sign. When ``P0 == p_star == 0`` every rate works; the status is then
    ``SOLVABLE_VIABLE`` with ``v=None``.
    """
    variant = Variant.parse(variant)
    if not (a > 0) or not (T > 0):
        raise InvalidParams(f"need a > 0 and T > 0, got a={a!r}, T={T!r}")
    if P0 == 0 and p_star == 0:
        return Diagnosis(DiagnosisStatus.SOLVABLE_VIABLE, None, "P stays at zero for every v")
    if P0 * p_star <= 0:
        return Diagnosis(DiagnosisStatus.NO_SOLUTION, None,
                         "initial and target prices differ in sign or one of them is zero")
    log_ratio = math.log(p_star / P0)
    if variant is Variant.GRAVITATION:
        v = log_ratio / (T * a)
    else:
        v = a - log_ratio / T
    status = DiagnosisStatus.SOLVABLE_VIABLE if v > 0 else DiagnosisStatus.SOLVABLE_NONVIABLE
    return Diagnosis(status, v)


def sensitivity_report(model, V, P0, f=None, steps=None):
    """Terminal sensitivity matrix ``H[i, j] = dP_i(T)/dv_j`` at rates ``V``."""
    state, _ = integrate_rk4(model, V, P0, f, steps=steps)
    return state.sensitivities
