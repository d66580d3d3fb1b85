"""Economy definition, hypothesis checks and steady-state price solvers.

Two variants share one data type:

* ``GRAVITATION``: ``dP/dt = D M P + f`` with ``M = B - (1+i) A``; steady
  prices solve ``B P = (1+i) A P + w L`` with ``e (B - A) P = 1``.
* ``WAGE_PRICE``: ``dP/dt = (1+r) A P + w L - D P``; steady prices solve
  ``P = (1+r) A P + w L`` with ``e P = 1``.

``e`` is the all-ones row vector throughout.
"""

import enum
import warnings
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import (
    NonpositivePrices,
    NonpositivePricesWarning,
    PriceGravError,
    ZeroSpectralRadius,
)
from .linalg import gauss_solve
from .spectral import is_irreducible, max_profit_rate

__all__ = [
    "Variant",
    "EconomyModel",
    "SteadyState",
    "ValidationReport",
    "solve_production_prices_w",
    "solve_production_prices_g",
    "solve_steady_state",
    "validate",
]


class Variant(enum.Enum):
    GRAVITATION = "gravitation"
    WAGE_PRICE = "wage_price"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        aliases = {"g": "gravitation", "w": "wage_price", "wage": "wage_price"}
        return cls(aliases.get(key, key))


@dataclass(frozen=True)
class EconomyModel:
    """Fixed economic data of one scenario.

    ``B=None`` stands for the identity output matrix and ``wage=None`` for a
    wage fixed by the price normalization. ``profit_rate`` is ``r`` in the
    wage-price model and ``i`` in the gravitation model. Construction only
    checks shapes and finiteness; the economic hypotheses are reported by
    :func:`validate`.
    """

    A: np.ndarray
    L: np.ndarray
    profit_rate: float
    horizon: float
    variant: Variant = Variant.WAGE_PRICE
    B: Optional[np.ndarray] = None
    wage: Optional[float] = None

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
            raise ValueError(f"A must be a non-empty square matrix, got shape {A.shape}")
        n = A.shape[0]
        L = np.array(self.L, dtype=float).reshape(-1)
        if L.shape != (n,):
            raise ValueError(f"L has length {L.size}, expected {n}")
        B = None
        if self.B is not None:
            B = np.array(self.B, dtype=float)
            if B.shape != (n, n):
                raise ValueError(f"B has shape {B.shape}, expected {(n, n)}")
        for name, arr in (("A", A), ("L", L), ("B", B)):
            if arr is not None:
                if not np.all(np.isfinite(arr)):
                    raise ValueError(f"{name} has non-finite entries")
                arr.setflags(write=False)
        scalars = {"profit_rate": self.profit_rate, "horizon": self.horizon}
        if self.wage is not None:
            scalars["wage"] = self.wage
        for name, value in scalars.items():
            if not np.isfinite(float(value)):
                raise ValueError(f"{name} must be finite")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "variant", Variant.parse(self.variant))
        object.__setattr__(self, "profit_rate", float(self.profit_rate))
        object.__setattr__(self, "horizon", float(self.horizon))
        if self.wage is not None:
            object.__setattr__(self, "wage", float(self.wage))

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def output_matrix(self):
        return np.eye(self.n) if self.B is None else np.array(self.B)

    @property
    def system_matrix(self):
        """``M = B - (1+i) A`` of the gravitation model."""
        return self.output_matrix - (1.0 + self.profit_rate) * self.A

    @property
    def markup_matrix(self):
        """``(1+r) A``, the cost-plus part of the wage-price model."""
        return (1.0 + self.profit_rate) * self.A

    def effective_wage(self):
        """Wage used in the dynamics: the given one, else the normalized one."""
        if self.wage is not None:
            return self.wage
        return solve_steady_state(self).wage_used


@dataclass(frozen=True)
class SteadyState:
    p_star: np.ndarray
    wage_used: float
    normalization_residual: float


@dataclass
class ValidationReport:
    violations: List[str] = field(default_factory=list)
    satisfied: List[str] = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def _check(self, holds, ok_msg, bad_msg):
        (self.satisfied if holds else self.violations).append(ok_msg if holds else bad_msg)


def _scaled_solution(q, wage, normalizer):
    """Return (p, w, residual) where ``normalizer @ p`` is meant to equal 1."""
    if wage is None:
        w = 1.0 / float(normalizer @ q)
        p = w * q
    else:
        w = wage
        p = w * q
    return p, w, abs(float(normalizer @ p) - 1.0)


def solve_production_prices_w(model):
    """Production prices of the wage-price model.

    Solves ``(I - (1+r)A) q = L``; prices are ``p = w q``. With the wage unset
    ``w = 1 / (e q)`` so that ``e p = 1``; a given wage is honoured and the
    normalization residual ``|e p - 1|`` is reported instead.

    Raises :class:`SingularMatrix` when ``r`` is at the maximum profit rate
    and :class:`NonpositivePrices` when some price or the wage is ``<= 0``
    (beyond the maximum rate ``q`` can be all negative, which a normalized
    wage would otherwise hide behind positive prices).
    """
    if model.variant is not Variant.WAGE_PRICE:
        raise ValueError("solve_production_prices_w needs a WAGE_PRICE model")
    q = gauss_solve(np.eye(model.n) - model.markup_matrix, model.L)
    p, w, resid = _scaled_solution(q, model.wage, np.ones(model.n))
    if np.any(p <= 0) or w <= 0:
        raise NonpositivePrices(f"production prices not positive: p = {p.tolist()}, w = {w!r}")
    return SteadyState(p_star=p, wage_used=w, normalization_residual=resid)


def solve_production_prices_g(model):
    """Steady prices of the gravitation model.

    Solves ``(B - (1+i)A) q = L`` and scales ``p = w q`` with
    ``w = 1 / (e (B - A) q)`` when the wage is unset. Nonpositive prices only
    trigger a :class:`NonpositivePricesWarning`; nothing guarantees
    positivity for a general output matrix.
    """
    if model.variant is not Variant.GRAVITATION:
        raise ValueError("solve_production_prices_g needs a GRAVITATION model")
    q = gauss_solve(model.system_matrix, model.L)
    normalizer = np.ones(model.n) @ (model.output_matrix - model.A)
    p, w, resid = _scaled_solution(q, model.wage, normalizer)
    if np.any(p <= 0):
        warnings.warn(f"steady prices not positive: {p.tolist()}", NonpositivePricesWarning,
                      stacklevel=2)
    return SteadyState(p_star=p, wage_used=w, normalization_residual=resid)


def solve_steady_state(model):
    if model.variant is Variant.WAGE_PRICE:
        return solve_production_prices_w(model)
    return solve_production_prices_g(model)


def validate(model):
    """Check the standing hypotheses of ``model`` without raising."""
    report = ValidationReport()
    A = model.A
    nonneg = bool(np.all(A >= 0))
    report._check(nonneg, "A nonnegative", "A has negative entries")
    L = model.L
    report._check(bool(np.all(L >= 0) and np.any(L > 0)),
                  "L nonnegative with a positive entry",
                  "L must be nonnegative with at least one positive entry")
    report._check(model.horizon > 0, "horizon positive", "horizon T must be positive")
    if model.variant is Variant.WAGE_PRICE:
        report._check(model.B is None or np.array_equal(model.B, np.eye(model.n)),
                      "B is identity", "B must be identity for WAGE_PRICE")
    if not nonneg:
        return report

    irreducible = is_irreducible(A)
    report._check(irreducible, "A irreducible", "A reducible")
    if model.variant is Variant.WAGE_PRICE:
        try:
            R = max_profit_rate(A, allow_reducible=True)
        except ZeroSpectralRadius:
            report.satisfied.append("profit rate below maximum (rho(A) = 0)")
        except PriceGravError as exc:
            report.violations.append(f"maximum profit rate unavailable: {exc}")
        else:
            report._check(model.profit_rate < R,
                          f"profit rate below maximum ({model.profit_rate!r} < {R!r})",
                          f"profit rate not below maximum ({model.profit_rate!r} >= {R!r})")
    return report
