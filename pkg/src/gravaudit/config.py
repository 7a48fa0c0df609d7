"""Strict TOML run configuration: unknown keys are errors, defaults are echoed back."""

from __future__ import annotations

import copy
import sys

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from dataclasses import dataclass

from .entanglement import SUITE_MODES
from .model import GeometryError, PhysicalParams, SetupGeometry, ValidationError
from .quadrature import QuadratureSpec

DEFAULTS = {
    "params": {"G": 1.0, "hbar": 1.0, "c": 1.0, "m": 1.0, "N": 1, "R": 1.0, "t": 1.0,
               "unit_system": "natural"},
    "geometry": {},
    "quadrature": {"method": "gauss-product", "radial_nodes": 12, "angular_nodes": 12,
                   "mc_samples": 1_000_000, "seed": 0},
    "verdict": {"modes": list(SUITE_MODES), "scale": "kappa-units", "v_source": "farfield",
                "tolerance": 1e-8},
    "integral": {"d_over_R": [5.0, 10.0, 20.0, 50.0], "monte_carlo": True},
    "fock": {"D": 3, "momenta": [], "p_max": 1.0, "mass": 1.0, "N": 2, "N_max": 2,
             "duration": 1.0, "potential": "gaussian", "amplitude": 1.0, "width": 1.0,
             "random_draws": 0, "pair_coupling": False, "pair_N_max": 4,
             "pair_epsilons": [1e-3, 2e-3, 4e-3, 8e-3], "pair_duration": 0.1},
    "firstq": {"max_order": 4, "v_source": "quadrature"},
    "sweep": {"axis": [1.0, 0.0, 0.0], "shifts": [0.0, 1.0, 2.0]},
    "output": {"directory": "gravaudit-out", "formats": ["csv", "json"]},
}
REQUIRED_SECTIONS = ("params", "geometry")
GEOMETRY_KEYS = ("X_1L", "X_1R", "X_2L", "X_2R")


class ConfigError(ValueError):
    """Syntax or semantic problem in a run configuration."""


@dataclass(frozen=True)
class RunConfig:
    params: PhysicalParams
    geometry: SetupGeometry
    quadrature: QuadratureSpec
    raw: dict

    def section(self, name: str) -> dict:
        return self.raw[name]

    @property
    def seed(self) -> int:
        return self.raw["quadrature"]["seed"]


def _merge(data: dict) -> dict:
    merged = copy.deepcopy(DEFAULTS)
    for section, values in data.items():
        if section not in DEFAULTS:
            raise ConfigError(f"unknown section [{section}]; allowed: {', '.join(DEFAULTS)}")
        if not isinstance(values, dict):
            raise ConfigError(f"[{section}] must be a table")
        allowed = GEOMETRY_KEYS if section == "geometry" else DEFAULTS[section]
        for key, value in values.items():
            if key not in allowed:
                raise ConfigError(f"unknown key {section}.{key}; allowed: {', '.join(allowed)}")
            default = DEFAULTS[section].get(key)
            if isinstance(default, bool) and not isinstance(value, bool):
                raise ConfigError(f"{section}.{key} must be true or false")
            if isinstance(default, float) and isinstance(value, int) and not isinstance(value, bool):
                value = float(value)
            merged[section][key] = value
    return merged


def _semantic_checks(cfg: dict):
    modes = cfg["verdict"]["modes"]
    bad = [m for m in modes if m not in SUITE_MODES]
    if bad:
        raise ConfigError(f"verdict.modes: unknown mode(s) {bad}; allowed {list(SUITE_MODES)}")
    if cfg["verdict"]["scale"] not in ("absolute", "kappa-units"):
        raise ConfigError("verdict.scale must be 'absolute' or 'kappa-units'")
    for sec in ("verdict", "firstq"):
        if cfg[sec]["v_source"] not in ("farfield", "quadrature"):
            raise ConfigError(f"{sec}.v_source must be 'farfield' or 'quadrature'")
    if not cfg["verdict"]["tolerance"] > 0:
        raise ConfigError("verdict.tolerance must be > 0")
    if any(x <= 2 for x in cfg["integral"]["d_over_R"]):
        raise ConfigError("integral.d_over_R values must exceed 2 (non-overlapping balls)")
    fock = cfg["fock"]
    if not 1 <= fock["D"] <= 6:
        raise ConfigError("fock.D must be between 1 and 6")
    if fock["momenta"] and len(fock["momenta"]) != fock["D"]:
        raise ConfigError(f"fock.momenta must have D={fock['D']} entries")
    if fock["N"] < 1 or fock["N_max"] < fock["N"] or fock["N_max"] > 6:
        raise ConfigError("fock: need 1 <= N <= N_max <= 6")
    if fock["potential"] not in ("gaussian", "random"):
        raise ConfigError("fock.potential must be 'gaussian' or 'random'")
    if fock["pair_coupling"] and fock["pair_N_max"] < 4:
        raise ConfigError("fock.pair_N_max must be >= 4 (vacuum plus two pairs)")
    if fock["random_draws"] < 0:
        raise ConfigError("fock.random_draws must be >= 0")
    if cfg["firstq"]["max_order"] not in range(0, 5):
        raise ConfigError("firstq.max_order must be between 0 and 4")
    if len(cfg["sweep"]["axis"]) != 3:
        raise ConfigError("sweep.axis must be a 3-vector")
    bad_formats = set(cfg["output"]["formats"]) - {"csv", "json"}
    if bad_formats:
        raise ConfigError(f"output.formats: unsupported {sorted(bad_formats)}")


def parse_config(text: str) -> RunConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"syntax error: {exc}") from exc
    for section in REQUIRED_SECTIONS:
        if section not in data:
            raise ConfigError(f"missing required section [{section}]")
    missing = [k for k in GEOMETRY_KEYS if k not in data["geometry"]]
    if missing:
        raise ConfigError(f"geometry: missing center(s) {missing}")
    cfg = _merge(data)
    _semantic_checks(cfg)
    try:
        params = PhysicalParams(**cfg["params"])
    except ValidationError as exc:
        raise ConfigError(f"params.{exc}") from exc
    except TypeError as exc:
        raise ConfigError(f"params: {exc}") from exc
    try:
        geometry = SetupGeometry(R=params.R, **{k: cfg["geometry"][k] for k in GEOMETRY_KEYS})
    except (GeometryError, ValidationError) as exc:
        raise ConfigError(f"geometry: {exc}") from exc
    q = cfg["quadrature"]
    try:
        spec = QuadratureSpec(q["method"], q["radial_nodes"], q["angular_nodes"],
                              q["mc_samples"], q["seed"])
    except ValueError as exc:
        raise ConfigError(f"quadrature: {exc}") from exc
    return RunConfig(params, geometry, spec, cfg)


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
