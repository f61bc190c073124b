"""Scenario configuration files.

A scenario is a YAML mapping with exactly the fields of :class:`ScenarioConfig`.
Unknown fields are rejected. Numeric fields accept plain numbers or short
arithmetic expressions over ``pi``, ``e`` and ``sqrt`` (e.g. ``5/sqrt(3)``,
``11*pi/24``). Matrix entries accept numbers, expressions, or complex literals
such as ``"1+2j"``.
"""

from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np
import yaml

from .dynamics import basis_state, maximally_mixed
from .hamiltonian import NHHamiltonian, TwoLevelParams, build_apt, build_pt, generic

__all__ = ["ConfigError", "ScenarioConfig", "load_config", "parse_config", "parse_number"]

FAMILIES = ("apt", "pt", "generic")
INITIAL_STATES = ("maximally_mixed", "basis0", "basis1")
MEASURES = ("dist", "svn", "snh", "neglntr")


class ConfigError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, field_name: Optional[str] = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field_name is not None:
            where.append(f"field '{field_name}'")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.line = line
        self.field_name = field_name


_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_NAMES = {"pi": math.pi, "e": math.e, "j": 1j}
_FUNCS = {"sqrt": math.sqrt}


def _eval_node(node):
    if isinstance(node, ast.Expression):
        return _eval_node(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)):
        return node.value
    if isinstance(node, ast.Name) and node.id in _NAMES:
        return _NAMES[node.id]
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
        value = _eval_node(node.operand)
        return -value if isinstance(node.op, ast.USub) else value
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_node(node.left), _eval_node(node.right))
    if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
            and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
        return _FUNCS[node.func.id](_eval_node(node.args[0]))
    raise ValueError("unsupported expression")


def parse_number(value, allow_complex: bool = False) -> Union[float, complex]:
    """Parse a YAML scalar into a float (or complex) value."""
    if isinstance(value, bool):
        raise ValueError(f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        result = value
    elif isinstance(value, str):
        text = value.strip()
        try:
            result = complex(text.replace(" ", "")) if allow_complex else float(text)
        except ValueError:
            try:
                result = _eval_node(ast.parse(text, mode="eval"))
            except (SyntaxError, ValueError, ZeroDivisionError, OverflowError, TypeError):
                raise ValueError(f"cannot parse {value!r} as a number") from None
    else:
        raise ValueError(f"expected a number, got {value!r}")
    if isinstance(result, complex):
        if not allow_complex:
            if result.imag != 0:
                raise ValueError(f"expected a real number, got {value!r}")
            result = result.real
    if allow_complex:
        result = complex(result)
        if not (math.isfinite(result.real) and math.isfinite(result.imag)):
            raise ValueError(f"non-finite value {value!r}")
        return result
    result = float(result)
    if not math.isfinite(result):
        raise ValueError(f"non-finite value {value!r}")
    return result


@dataclass(frozen=True)
class ScenarioConfig:
    family: str = "pt"
    r: Optional[float] = None
    theta: Optional[float] = None
    r1: Optional[float] = None
    theta1: Optional[float] = None
    matrix: Optional[tuple] = None
    initial: Union[str, tuple] = "maximally_mixed"
    t_max: float = 10.0
    steps: int = 2001
    measures: tuple = ("snh", "neglntr")
    seed: int = 0
    output_dir: str = "out"

    @property
    def params(self) -> Optional[TwoLevelParams]:
        if self.family == "generic":
            return None
        return TwoLevelParams(self.r, self.theta, self.r1, self.theta1)

    def hamiltonian(self) -> NHHamiltonian:
        if self.family == "apt":
            return build_apt(self.params)
        if self.family == "pt":
            return build_pt(self.params)
        return generic(np.array(self.matrix, dtype=np.complex128))

    @property
    def dim(self) -> int:
        return 2 if self.family != "generic" else len(self.matrix)

    def initial_state(self) -> np.ndarray:
        if self.initial == "maximally_mixed":
            return maximally_mixed(self.dim)
        if self.initial == "basis0":
            return basis_state(0, self.dim)
        if self.initial == "basis1":
            return basis_state(1, self.dim)
        return np.array(self.initial, dtype=np.complex128)

    def as_dict(self) -> dict:
        def encode(m):
            return [[[complex(x).real, complex(x).imag] for x in row] for row in m]

        out = {
            "family": self.family,
            "initial": self.initial if isinstance(self.initial, str) else encode(self.initial),
            "t_max": self.t_max,
            "steps": self.steps,
            "measures": list(self.measures),
            "seed": self.seed,
            "output_dir": self.output_dir,
        }
        if self.family == "generic":
            out["matrix"] = encode(self.matrix)
        else:
            out.update(r=self.r, theta=self.theta, r1=self.r1, theta1=self.theta1)
        return out


_FIELDS = {f for f in ScenarioConfig.__dataclass_fields__}


def _parse_matrix(node, name, line):
    if not isinstance(node, list) or not node or not all(isinstance(row, list) for row in node):
        raise ConfigError("expected a non-empty list of rows", line, name)
    n = len(node)
    if any(len(row) != n for row in node):
        raise ConfigError(f"matrix must be square ({n} rows)", line, name)
    try:
        return tuple(tuple(parse_number(x, allow_complex=True) for x in row) for row in node)
    except ValueError as exc:
        raise ConfigError(str(exc), line, name) from None


def parse_config(text: str, source: str = "<config>") -> ScenarioConfig:
    try:
        root = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ConfigError(f"{source}: invalid YAML ({getattr(exc, 'problem', exc)})", line) from None
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a mapping")
    lines = {}
    for key_node, _ in root.value:
        lines[key_node.value] = key_node.start_mark.line + 1

    unknown = sorted(set(data) - _FIELDS)
    if unknown:
        raise ConfigError(f"unknown field (allowed: {', '.join(sorted(_FIELDS))})",
                          lines[unknown[0]], unknown[0])

    kwargs = {}

    def number(name, integer=False):
        if name not in data:
            return
        try:
            value = parse_number(data[name])
        except ValueError as exc:
            raise ConfigError(str(exc), lines[name], name) from None
        if integer:
            if value != int(value):
                raise ConfigError("expected an integer", lines[name], name)
            value = int(value)
        kwargs[name] = value

    family = data.get("family", "pt")
    if family not in FAMILIES:
        raise ConfigError(f"must be one of {FAMILIES}", lines.get("family"), "family")
    kwargs["family"] = family

    for name in ("r", "theta", "r1", "theta1", "t_max"):
        number(name)
    for name in ("steps", "seed"):
        number(name, integer=True)

    if family == "generic":
        if "matrix" not in data:
            raise ConfigError("generic family requires 'matrix'", None, "matrix")
        for name in ("r", "theta", "r1", "theta1"):
            if name in data:
                raise ConfigError("not allowed for the generic family", lines[name], name)
        kwargs["matrix"] = _parse_matrix(data["matrix"], "matrix", lines["matrix"])
    else:
        if "matrix" in data:
            raise ConfigError(f"not allowed for the {family} family", lines["matrix"], "matrix")
        for name in ("r", "theta", "r1", "theta1"):
            if name not in kwargs:
                raise ConfigError(f"required for the {family} family", None, name)

    if "initial" in data:
        initial = data["initial"]
        if isinstance(initial, str):
            if initial not in INITIAL_STATES:
                raise ConfigError(f"must be one of {INITIAL_STATES} or a matrix",
                                  lines["initial"], "initial")
            kwargs["initial"] = initial
        else:
            kwargs["initial"] = _parse_matrix(initial, "initial", lines["initial"])

    if "measures" in data:
        measures = data["measures"]
        if isinstance(measures, str):
            measures = [measures]
        if not isinstance(measures, list) or not measures:
            raise ConfigError("expected a non-empty list", lines["measures"], "measures")
        bad = [m for m in measures if m not in MEASURES]
        if bad:
            raise ConfigError(f"unknown measure {bad[0]!r} (allowed: {MEASURES})",
                              lines["measures"], "measures")
        kwargs["measures"] = tuple(dict.fromkeys(measures))

    if "output_dir" in data:
        kwargs["output_dir"] = str(data["output_dir"])

    cfg = ScenarioConfig(**kwargs)
    if cfg.steps < 2:
        raise ConfigError("must be >= 2", lines.get("steps"), "steps")
    if not cfg.t_max > 0:
        raise ConfigError("must be positive", lines.get("t_max"), "t_max")
    if not isinstance(cfg.initial, str) and len(cfg.initial) != cfg.dim:
        raise ConfigError(f"initial matrix must be {cfg.dim}x{cfg.dim}", lines.get("initial"), "initial")
    if "dist" in cfg.measures and cfg.dim < 2:
        raise ConfigError("dist needs the basis0/basis1 pair (dimension >= 2)",
                          lines.get("measures"), "measures")
    try:
        cfg.hamiltonian()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def load_config(path: Union[str, Path]) -> ScenarioConfig:
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), str(path))
