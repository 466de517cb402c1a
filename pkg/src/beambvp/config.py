"""Problem configuration files.

A config is a JSON object naming the nonlinearity and the boundary
coefficients, with optional solver settings and declared limits:

    {"f": "t + abs(cos(u))",
     "alpha": 0.3333333333333333,
     "beta": [0.14285714285714285, 0.25, 0.03571428571428571],
     "eta": [0.4666666666666667, 0.6666666666666666, 0.8461538461538461],
     "theta": 0.25,
     "limits": {"f0": "inf", "fsupinf": "zero"},
     "solver": {"grid_n": 401, "method": "newton"}}

Keys are validated strictly: unknown keys are rejected so typos fail
loudly instead of being silently ignored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from numbers import Real

from .errors import ConfigError, DomainError, ExprError, StructuralError
from .expr import parse
from .hammerstein import SolveSettings
from .kernel import DEFAULT_THETA, ProblemSpec

__all__ = ["ProblemConfig", "load_config", "config_from_dict"]

_TOP_KEYS = {"f", "alpha", "beta", "eta", "theta", "limits", "solver"}
_LIMIT_KEYS = {"f0", "fsup0", "finf", "fsupinf"}
_LIMIT_VALUES = {"zero", "finite", "inf"}
_SOLVER_KEYS = {"grid_n", "tol", "max_iter", "damping", "method", "seeds"}


@dataclass(frozen=True)
class ProblemConfig:
    """Parsed and validated problem configuration."""

    problem: ProblemSpec
    theta: float
    limits: dict = field(default_factory=dict)
    solver: SolveSettings = field(default_factory=SolveSettings)
    raw: dict = field(default_factory=dict)


def _require(data: dict, key: str, kind, kind_name: str):
    if key not in data:
        raise ConfigError(f"missing required key {key!r}", key=key)
    value = data[key]
    if not isinstance(value, kind) or isinstance(value, bool):
        raise ConfigError(f"key {key!r} must be a {kind_name}", key=key)
    return value


def _number_list(data: dict, key: str) -> tuple[float, ...]:
    value = _require(data, key, list, "list of numbers")
    out = []
    for i, item in enumerate(value):
        if not isinstance(item, Real) or isinstance(item, bool):
            raise ConfigError(f"{key}[{i}] must be a number", key=key)
        out.append(float(item))
    return tuple(out)


def config_from_dict(data: dict) -> ProblemConfig:
    """Validate a decoded JSON object and build the problem it describes."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    for key in data:
        if key not in _TOP_KEYS:
            raise ConfigError(f"unknown key {key!r}", key=key)

    f_text = _require(data, "f", str, "string")
    try:
        f_node = parse(f_text)
    except ExprError as exc:
        raise ConfigError(f"key 'f' does not parse: {exc}", key="f") from exc
    alpha = float(_require(data, "alpha", Real, "number"))
    betas = _number_list(data, "beta")
    etas = _number_list(data, "eta")

    try:
        problem = ProblemSpec(f_node, alpha, betas, etas)
    except StructuralError as exc:
        raise ConfigError(str(exc)) from exc
    for violation in problem.structural_violations():
        label = "C3" if violation.startswith("alpha + sum") else "C2"
        raise ConfigError(f"({label}) {violation}")

    theta = DEFAULT_THETA
    if "theta" in data:
        if not isinstance(data["theta"], Real) or isinstance(data["theta"], bool):
            raise ConfigError("key 'theta' must be a number", key="theta")
        theta = float(data["theta"])
        if not 0.0 < theta < 0.5:
            raise ConfigError(
                f"theta = {theta} must lie in (0, 1/2)", key="theta")

    limits = {}
    if "limits" in data:
        raw_limits = data["limits"]
        if not isinstance(raw_limits, dict):
            raise ConfigError("key 'limits' must be an object", key="limits")
        for key, value in raw_limits.items():
            if key not in _LIMIT_KEYS:
                raise ConfigError(
                    f"unknown limits key {key!r} (expected one of "
                    f"{sorted(_LIMIT_KEYS)})", key=key)
            if value not in _LIMIT_VALUES:
                raise ConfigError(
                    f"limits[{key!r}] must be one of {sorted(_LIMIT_VALUES)}, "
                    f"got {value!r}", key=key)
            limits[key] = value

    solver_kwargs = {}
    if "solver" in data:
        raw_solver = data["solver"]
        if not isinstance(raw_solver, dict):
            raise ConfigError("key 'solver' must be an object", key="solver")
        for key, value in raw_solver.items():
            if key not in _SOLVER_KEYS:
                raise ConfigError(
                    f"unknown solver key {key!r} (expected one of "
                    f"{sorted(_SOLVER_KEYS)})", key=key)
            if key == "method":
                if value not in ("picard", "newton"):
                    raise ConfigError(
                        "solver method must be 'picard' or 'newton'",
                        key="method")
                solver_kwargs[key] = value
            elif key == "seeds":
                if (not isinstance(value, list) or not value
                        or not all(isinstance(s, Real)
                                   and not isinstance(s, bool)
                                   for s in value)):
                    raise ConfigError(
                        "solver seeds must be a nonempty list of numbers",
                        key="seeds")
                solver_kwargs[key] = tuple(float(s) for s in value)
            elif key in ("grid_n", "max_iter"):
                if not isinstance(value, int) or isinstance(value, bool):
                    raise ConfigError(f"solver {key} must be an integer",
                                      key=key)
                solver_kwargs[key] = value
            else:
                if not isinstance(value, Real) or isinstance(value, bool):
                    raise ConfigError(f"solver {key} must be a number",
                                      key=key)
                solver_kwargs[key] = float(value)
    try:
        solver = SolveSettings(**solver_kwargs)
    except (DomainError, ValueError) as exc:
        raise ConfigError(f"invalid solver settings: {exc}",
                          key="solver") from exc

    return ProblemConfig(problem=problem, theta=theta, limits=limits,
                         solver=solver, raw=data)


def load_config(path) -> ProblemConfig:
    """Read and validate a JSON config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config {path} is not valid JSON at byte offset {exc.pos}: "
            f"{exc.msg}") from exc
    return config_from_dict(data)
