"""JSON run configuration -> module-level values.

Every rejection raises :class:`ConfigError` carrying the dotted path of the
offending field, e.g. ``family.multiplicities``.
"""
from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional

from .families import (
    Equidistant, GeneralizedCylinder, GeodesicSphere, HFGeodesicSphere, HFHorosphere,
    Horosphere, HyperbolicField, SpaceForm, SphereMunzner,
)
from .flow import FlowProblem, SolverConfig
from .weingarten import GaussK, MeanCurvature, Power, SquaredNorm, WeingartenDomainError


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class OutputConfig:
    path: Optional[str] = None
    format: str = "csv"
    samples: Optional[int] = None


@dataclass
class RunConfig:
    problem: FlowProblem
    solver: SolverConfig
    output: OutputConfig
    raw: dict = field(default_factory=dict)


def _get(d: dict, key: str, path: str, kind=None, default: Any = ...):
    if not isinstance(d, dict):
        raise ConfigError(path, "expected an object")
    if key not in d:
        if default is ...:
            raise ConfigError(f"{path}.{key}" if path else key, "missing field")
        return default
    value = d[key]
    if kind is None or value is None:
        return value
    numeric = isinstance(value, (int, float)) and not isinstance(value, bool)
    if kind is float and numeric:
        return float(value)
    if kind is int and numeric and float(value).is_integer():
        return int(value)
    if kind not in (int, float) and isinstance(value, kind):
        return value
    raise ConfigError(f"{path}.{key}" if path else key, f"expected {kind.__name__}, got {value!r}")


def parse_ambient(d: dict, path: str = "ambient"):
    kind = _get(d, "kind", path, str)
    try:
        if kind == "space_form":
            return SpaceForm(_get(d, "eps", path, int), _get(d, "dim", path, int))
        if kind == "hyperbolic":
            return HyperbolicField(_get(d, "field", path, str), _get(d, "m", path, int))
    except (ValueError, TypeError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(path, str(exc)) from None
    raise ConfigError(f"{path}.kind", f"unknown ambient kind {kind!r}")


def parse_family(d: dict, ambient, path: str = "family"):
    kind = _get(d, "kind", path, str)
    try:
        if kind == "munzner":
            mults = _get(d, "multiplicities", path, list)
            if not mults or not all(isinstance(m, int) and m >= 1 for m in mults):
                raise ConfigError(f"{path}.multiplicities", "expected positive integers")
            g = _get(d, "g", path, int, None)
            if g is not None and g != len(mults):
                raise ConfigError(f"{path}.multiplicities", f"expected g={g} entries")
            fam = SphereMunzner(tuple(mults))
            if ambient is not None:
                if not (isinstance(ambient, SpaceForm) and ambient.eps == 1):
                    raise ConfigError("ambient", "Munzner families live in the round sphere")
                if sum(mults) != ambient.n:
                    raise ConfigError(f"{path}.multiplicities",
                                      f"multiplicities sum to {sum(mults)}, ambient has n={ambient.n}")
            return fam
        if ambient is None:
            raise ConfigError("ambient", "missing field")
        simple = {
            "geodesic_sphere": GeodesicSphere, "horosphere": Horosphere,
            "equidistant": Equidistant, "hf_sphere": HFGeodesicSphere,
            "hf_horosphere": HFHorosphere,
        }
        if kind in simple:
            return simple[kind](ambient)
        if kind == "generalized_cylinder":
            return GeneralizedCylinder(ambient, _get(d, "k", path, int))
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(path, str(exc)) from None
    raise ConfigError(f"{path}.kind", f"unknown family kind {kind!r}")


def parse_weingarten(d: dict, path: str = "weingarten"):
    kind = _get(d, "kind", path, str)
    try:
        if kind == "H":
            return MeanCurvature(_get(d, "r", path, int, 1))
        if kind == "norm2":
            return SquaredNorm()
        if kind == "K":
            return GaussK()
        if kind == "power":
            return Power(parse_weingarten(_get(d, "base", path, dict), f"{path}.base"),
                         _get(d, "p", path, float))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None
    raise ConfigError(f"{path}.kind", f"unknown weingarten kind {kind!r}")


def parse_solver(d: dict, path: str = "solver") -> tuple[SolverConfig, Optional[float]]:
    d = d or {}
    defaults = SolverConfig()
    kwargs = {}
    for key in ("rtol", "atol", "max_step", "collapse_margin"):
        kwargs[key] = _get(d, key, path, float, getattr(defaults, key))
    kwargs["max_step"] = math.inf if kwargs["max_step"] is None else kwargs["max_step"]
    try:
        solver = SolverConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None
    return solver, _get(d, "t_max", path, float, None)


def parse_output(d: dict, path: str = "output") -> OutputConfig:
    d = d or {}
    fmt = _get(d, "format", path, str, "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"{path}.format", f"expected csv or json, got {fmt!r}")
    samples = _get(d, "samples", path, int, None)
    if samples is not None and samples < 2:
        raise ConfigError(f"{path}.samples", "need at least 2 samples")
    return OutputConfig(_get(d, "path", path, str, None), fmt, samples)


def parse_run_config(doc: dict) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("", "configuration must be a JSON object")
    ambient = parse_ambient(doc["ambient"]) if "ambient" in doc else None
    family = parse_family(_get(doc, "family", ""), ambient)
    spec = parse_weingarten(_get(doc, "weingarten", ""))
    tau0 = _get(doc, "tau0", "", float)
    solver, t_max = parse_solver(doc.get("solver"))
    output = parse_output(doc.get("output"))
    try:
        problem = FlowProblem(family, spec, tau0, t_max)
    except WeingartenDomainError as exc:
        raise ConfigError("weingarten", str(exc)) from None
    except ValueError as exc:
        raise ConfigError("tau0", str(exc)) from None
    return RunConfig(problem, solver, output, raw=doc)


def set_path(doc: dict, dotted: str, value: Any) -> dict:
    """Return a copy of ``doc`` with ``dotted`` set to ``value``."""
    doc = copy.deepcopy(doc)
    node = doc
    keys = dotted.split(".")
    for key in keys[:-1]:
        node = node.setdefault(key, {})
        if not isinstance(node, dict):
            raise ConfigError(dotted, "cannot descend into a non-object")
    node[keys[-1]] = value
    return doc


def parse_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text
