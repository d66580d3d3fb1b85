"""Scenario files: one JSON document per run.

Layout (all matrices row-major nested arrays)::

    {
      "name": "two_branch",
      "variant": "wage_price",            # or "gravitation"
      "economy": {
        "A": [[0.2, 0.3], [0.4, 0.1]],
        "B": null,                        # identity when null or absent
        "L": [1, 1],
        "profit_rate": 0.1,
        "wage": null,                     # null: fixed by normalization
        "horizon": 1.0
      },
      "P0": [0.6, 0.4],
      "p_star": "auto",                   # or an explicit vector
      "forcing": {"mode": "constant", "value": [0, 0]},
      "v0": "ones",
      "V": [0.3, 0.7],                    # rates for simulate / verify
      "solver": {"steps": null, "tol": 1e-10, "max_iter": 50,
                 "damping": true, "stride": 1}
    }

Only ``economy.A`` is needed by the ``spectral`` command.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .dynamics import Forcing
from .model import EconomyModel, Variant


class ScenarioError(ValueError):
    """Malformed or inconsistent scenario; ``field`` names the offending key."""

    def __init__(self, message, field=None, line=None):
        super().__init__(message)
        self.field = field
        self.line = line

    def to_dict(self):
        out = {"error": str(self), "kind": "parse"}
        if self.field is not None:
            out["field"] = self.field
        if self.line is not None:
            out["line"] = self.line
        return out


@dataclass
class SolverConfig:
    steps: Optional[int] = None
    tol: float = 1e-10
    max_iter: int = 50
    damping: bool = True
    stride: int = 1


@dataclass
class Scenario:
    name: str
    raw: dict
    variant: Variant
    solver: SolverConfig = field(default_factory=SolverConfig)

    @property
    def A(self):
        return _matrix(_get(self.raw, "economy.A"), "economy.A")

    def model(self):
        eco = _get(self.raw, "economy")
        if not isinstance(eco, dict):
            raise ScenarioError("economy must be an object", "economy")
        A = self.A
        n = A.shape[0]
        B = eco.get("B")
        B = None if B is None else _matrix(B, "economy.B", n)
        L = _vector(_get(self.raw, "economy.L"), "economy.L", n)
        wage = eco.get("wage")
        try:
            return EconomyModel(
                A=A,
                B=B,
                L=L,
                profit_rate=_number(_get(self.raw, "economy.profit_rate"), "economy.profit_rate"),
                wage=None if wage is None else _number(wage, "economy.wage"),
                horizon=_number(_get(self.raw, "economy.horizon"), "economy.horizon"),
                variant=self.variant,
            )
        except ValueError as exc:
            raise ScenarioError(str(exc), "economy") from exc

    def vector(self, key, n, required=True):
        value = self.raw.get(key)
        if value is None:
            if required:
                raise ScenarioError(f"missing field '{key}'", key)
            return None
        return _vector(value, key, n)

    def p_star_spec(self, n):
        value = self.raw.get("p_star")
        if value is None or value == "auto":
            return value
        return _vector(value, "p_star", n)

    def v0(self, n):
        value = self.raw.get("v0", "ones")
        if value == "ones":
            return np.ones(n)
        return _vector(value, "v0", n)

    def forcing(self, n):
        spec = self.raw.get("forcing")
        if spec is None:
            return None
        if not isinstance(spec, dict):
            raise ScenarioError("forcing must be an object", "forcing")
        mode = spec.get("mode", "constant")
        try:
            if mode == "constant":
                return Forcing.constant(_vector(spec.get("value"), "forcing.value", n))
            if mode == "sampled":
                times = _vector(spec.get("times"), "forcing.times")
                values = _matrix(spec.get("values"), "forcing.values", square=False)
                if values.shape[1] != n:
                    raise ScenarioError(f"forcing.values rows must have length {n}",
                                        "forcing.values")
                return Forcing.sampled(times, values)
        except ScenarioError:
            raise
        except ValueError as exc:
            raise ScenarioError(str(exc), "forcing") from exc
        raise ScenarioError(f"unknown forcing mode {mode!r}", "forcing.mode")


def _get(raw, path):
    node: Any = raw
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            raise ScenarioError(f"missing field '{path}'", path)
        node = node[part]
    return node


def _number(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{name} must be a number", name)
    if not math.isfinite(value):
        raise ScenarioError(f"{name} must be finite", name)
    return float(value)


def _vector(value, name, n=None):
    if not isinstance(value, list) or not value:
        raise ScenarioError(f"{name} must be a non-empty array of numbers", name)
    out = np.array([_number(x, f"{name}[{k}]") for k, x in enumerate(value)])
    if n is not None and out.size != n:
        raise ScenarioError(f"{name} has length {out.size}, expected {n}", name)
    return out


def _matrix(value, name, n=None, square=True):
    if not isinstance(value, list) or not value:
        raise ScenarioError(f"{name} must be a non-empty array of rows", name)
    rows = [_vector(row, f"{name}[{i}]") for i, row in enumerate(value)]
    width = rows[0].size
    if any(r.size != width for r in rows):
        raise ScenarioError(f"{name} rows have unequal lengths", name)
    M = np.vstack(rows)
    if square and M.shape[0] != M.shape[1]:
        raise ScenarioError(f"{name} must be square, got {M.shape[0]}x{M.shape[1]}", name)
    if n is not None and M.shape != (n, n):
        raise ScenarioError(f"{name} must be {n}x{n}", name)
    return M


def parse_scenario(text, default_name="scenario"):
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc
    if not isinstance(raw, dict):
        raise ScenarioError("scenario must be a JSON object")
    name = raw.get("name", default_name)
    if not isinstance(name, str) or not name:
        raise ScenarioError("name must be a non-empty string", "name")
    try:
        variant = Variant.parse(raw.get("variant", "wage_price"))
    except ValueError as exc:
        raise ScenarioError(f"unknown variant {raw.get('variant')!r}", "variant") from exc

    solver = raw.get("solver", {})
    if not isinstance(solver, dict):
        raise ScenarioError("solver must be an object", "solver")
    cfg = SolverConfig()
    for key in ("steps", "max_iter", "stride"):
        if solver.get(key) is not None:
            val = solver[key]
            if isinstance(val, bool) or not isinstance(val, int) or val < 1:
                raise ScenarioError(f"solver.{key} must be a positive integer", f"solver.{key}")
            setattr(cfg, key, val)
    if solver.get("tol") is not None:
        cfg.tol = _number(solver["tol"], "solver.tol")
        if cfg.tol <= 0:
            raise ScenarioError("solver.tol must be positive", "solver.tol")
    if solver.get("damping") is not None:
        if not isinstance(solver["damping"], bool):
            raise ScenarioError("solver.damping must be true or false", "solver.damping")
        cfg.damping = solver["damping"]
    return Scenario(name=name, raw=raw, variant=variant, solver=cfg)


def load_scenario(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_scenario(text, default_name=path.stem)
