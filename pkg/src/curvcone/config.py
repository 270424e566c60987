"""Experiment configuration: JSON schema version 1."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path

from .catalog import CATALOG, default_morse_function, linear_field, make_chart, polynomial_field, radial_field
from .cones import ConeSpec
from .errors import ConfigError, CurvconeError
from .geometry import FiniteDifferenceProvider, TAYLOR

SCHEMA_VERSION = 1
TASKS = ("curvature", "cone", "thm12", "thm13", "formula_check")
MANIFOLD_PARAMS = {
    "euclidean_box": (),
    "flat_shell": ("r_in", "r_out"),
    "sphere_band": ("r_in", "r_out"),
    "poincare_shell": ("r_in", "r_out"),
    "perturbed_flat": ("amplitude", "seed"),
}

DEFAULTS = {
    "grid_resolution": 9,
    "N_max": 1e4,
    "margin_req": 1e-6,
    "seed": 0,
    "provider": {"kind": "taylor"},
    "v_spec": {"kind": "auto", "normalize_band": 0.5},
    "sectional": {"points": 50, "planes": 100},
    "formula_check": {"fields": 20, "points": 50, "n_dim": 7.0},
    "output": {"dir": "curvcone-out"},
}


def _require(data: dict, key: str, where: str = "config"):
    if key not in data:
        raise ConfigError(f"missing key {key!r} in {where}")
    return data[key]


def _positive(value, name: str) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must be a number, got {value!r}") from exc
    if not value > 0:
        raise ConfigError(f"{name} must be positive, got {value}")
    return value


@dataclass
class ExperimentConfig:
    manifold: dict
    task: str
    v_spec: dict = field(default_factory=lambda: dict(DEFAULTS["v_spec"]))
    cone: dict | None = None
    ansatz: dict | None = None
    grid_resolution: int = 9
    N_max: float = 1e4
    margin_req: float = 1e-6
    provider: dict = field(default_factory=lambda: dict(DEFAULTS["provider"]))
    seed: int = 0
    sectional: dict = field(default_factory=lambda: dict(DEFAULTS["sectional"]))
    formula_check: dict = field(default_factory=lambda: dict(DEFAULTS["formula_check"]))
    output: dict = field(default_factory=lambda: dict(DEFAULTS["output"]))

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        version = data.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {version!r}; expected {SCHEMA_VERSION}")
        manifold = _require(data, "manifold")
        task = _require(data, "task")
        merged = copy.deepcopy(DEFAULTS)
        for key in ("v_spec", "provider", "sectional", "formula_check", "output"):
            if key in data:
                if not isinstance(data[key], dict):
                    raise ConfigError(f"{key} must be an object")
                merged[key].update(data[key])
        cfg = cls(
            manifold=dict(manifold) if isinstance(manifold, dict) else manifold,
            task=task,
            v_spec=merged["v_spec"],
            cone=data.get("cone"),
            ansatz=data.get("ansatz"),
            grid_resolution=data.get("grid_resolution", DEFAULTS["grid_resolution"]),
            N_max=data.get("N_max", DEFAULTS["N_max"]),
            margin_req=data.get("margin_req", DEFAULTS["margin_req"]),
            provider=merged["provider"],
            seed=data.get("seed", DEFAULTS["seed"]),
            sectional=merged["sectional"],
            formula_check=merged["formula_check"],
            output=merged["output"],
        )
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "manifold": self.manifold,
            "task": self.task,
            "v_spec": self.v_spec,
            "grid_resolution": self.grid_resolution,
            "N_max": self.N_max,
            "margin_req": self.margin_req,
            "provider": self.provider,
            "seed": self.seed,
            "sectional": self.sectional,
            "formula_check": self.formula_check,
            "output": self.output,
        }
        if self.cone is not None:
            out["cone"] = self.cone
        if self.ansatz is not None:
            out["ansatz"] = self.ansatz
        return copy.deepcopy(out)

    def validate(self) -> None:
        if not isinstance(self.manifold, dict):
            raise ConfigError("manifold must be an object with 'name' and 'dim'")
        name = _require(self.manifold, "name", "manifold")
        if name not in CATALOG:
            raise ConfigError(f"unknown manifold {name!r}; catalog: {', '.join(CATALOG)}")
        dim = _require(self.manifold, "dim", "manifold")
        if not isinstance(dim, int) or not 3 <= dim <= 6:
            raise ConfigError(f"manifold.dim must be an integer in [3, 6], got {dim!r}")
        unknown = set(self.manifold) - {"name", "dim"} - set(MANIFOLD_PARAMS[name])
        if unknown:
            raise ConfigError(f"unknown parameters for {name}: {sorted(unknown)}")
        if self.task not in TASKS:
            raise ConfigError(f"unknown task {self.task!r}; expected one of {TASKS}")
        if not isinstance(self.grid_resolution, int) or self.grid_resolution < 2:
            raise ConfigError("grid_resolution must be an integer >= 2")
        self.N_max = _positive(self.N_max, "N_max")
        self.margin_req = _positive(self.margin_req, "margin_req")
        if not isinstance(self.seed, int):
            raise ConfigError("seed must be an integer")
        kind = self.provider.get("kind")
        if kind not in ("taylor", "fd"):
            raise ConfigError(f"provider.kind must be 'taylor' or 'fd', got {kind!r}")
        if kind == "fd":
            if self.provider.get("order", 4) not in (2, 4):
                raise ConfigError("provider.order must be 2 or 4")
            _positive(self.provider.get("step", 1e-3), "provider.step")
        vkind = self.v_spec.get("kind")
        if vkind not in ("auto", "radial", "linear", "custom_polynomial"):
            raise ConfigError(f"v_spec.kind must be radial, linear, custom_polynomial or auto; got {vkind!r}")
        if vkind == "custom_polynomial":
            _require(self.v_spec, "terms", "v_spec")
        band = self.v_spec.get("normalize_band")
        if band is not None:
            _positive(band, "v_spec.normalize_band")
        if self.task == "cone":
            if self.cone is None:
                raise ConfigError("missing key 'cone' in config (required for task 'cone')")
            if self.ansatz is None:
                raise ConfigError("missing key 'ansatz' in config (required for task 'cone')")
            for key in ("form", "alpha", "beta"):
                _require(self.ansatz, key, "ansatz")
            try:
                self.cone_spec()
            except (CurvconeError, KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"invalid cone {self.cone!r}: {exc}") from exc
        for key in ("points", "planes"):
            if int(self.sectional.get(key, 1)) < 1:
                raise ConfigError(f"sectional.{key} must be >= 1")

    # -- builders --------------------------------------------------------

    @property
    def dim(self) -> int:
        return int(self.manifold["dim"])

    def chart(self):
        params = {k: v for k, v in self.manifold.items() if k not in ("name", "dim")}
        return make_chart(self.manifold["name"], self.dim, **params)

    def provider_obj(self):
        if self.provider["kind"] == "fd":
            return FiniteDifferenceProvider(int(self.provider.get("order", 4)), float(self.provider.get("step", 1e-3)))
        return TAYLOR

    def v_field(self, chart):
        spec = self.v_spec
        kind = spec.get("kind", "auto")
        if kind == "radial":
            return radial_field(spec.get("center", chart.center or [0.0] * chart.dim))
        if kind == "linear":
            direction = spec.get("direction", [1.0] + [0.0] * (chart.dim - 1))
            return linear_field(direction, float(spec.get("offset", 1.0)))
        if kind == "custom_polynomial":
            return polynomial_field(spec["terms"])
        return default_morse_function(chart)

    @property
    def normalize_band(self) -> float | None:
        band = self.v_spec.get("normalize_band", 0.5)
        return None if band is None else float(band)

    def cone_spec(self) -> ConeSpec:
        return ConeSpec.from_dict(self.cone, self.dim)
