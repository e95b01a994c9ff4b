"""Bundled reference scenarios for the verification harness.

Five desk-scale instances cover the representative regimes: the scalar
square-root diffusion (S1), a coupled two-factor diffusion (S2), a two-type
finite-activity jump instance (S3), a one-type jump instance with immigration
(S4) and a pure-jump instance without any diffusion part (S5). Each scenario
file pins every knob of its verification runs (paths, step, seeds) together
with the Delta-t bias constants calibrated by tools/calibrate_bias.py, so
verification outcomes are reproducible bit for bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .config import SchemaError, params_from_json, params_to_json
from .params import AdmissibleParams, DerivedParams, derive
from .simulate import SimConfig

BUNDLED_NAMES = ("S1", "S2", "S3", "S4", "S5")


@dataclass
class Scenario:
    name: str
    description: str
    params: AdmissibleParams
    x0: np.ndarray
    t: float
    dt: float
    n_paths: int
    seed: int
    eps_trunc: float
    bias_constant_mean: float
    bias_constant_laplace: float
    laplace_points: list          # [(t, lam array), ...]
    comparison: dict | None = None
    ratio_check: dict | None = None
    _derived: DerivedParams | None = field(default=None, repr=False)

    def sim_config(self) -> SimConfig:
        return SimConfig(T=self.t, dt=self.dt, eps_trunc=self.eps_trunc)

    def derived(self) -> DerivedParams:
        if self._derived is None:
            self._derived = derive(self.params, eps_trunc=self.eps_trunc)
        return self._derived


def scenario_from_json(obj) -> Scenario:
    try:
        params = params_from_json(obj["params"])
        points = [(float(pt["t"]), np.asarray(pt["lam"], dtype=float))
                  for pt in obj.get("laplace_points", [])]
        return Scenario(
            name=obj["name"],
            description=obj.get("description", ""),
            params=params,
            x0=np.asarray(obj["x0"], dtype=float),
            t=float(obj["t"]),
            dt=float(obj["dt"]),
            n_paths=int(obj["n_paths"]),
            seed=int(obj["seed"]),
            eps_trunc=float(obj.get("eps_trunc", 1e-3)),
            bias_constant_mean=float(obj["bias_constant_mean"]),
            bias_constant_laplace=float(obj["bias_constant_laplace"]),
            laplace_points=points,
            comparison=obj.get("comparison"),
            ratio_check=obj.get("ratio_check"),
        )
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad scenario file: {exc}") from exc


def scenario_to_json(s: Scenario) -> dict:
    blob = {
        "name": s.name,
        "description": s.description,
        "params": params_to_json(s.params),
        "x0": list(s.x0),
        "t": s.t,
        "dt": s.dt,
        "n_paths": s.n_paths,
        "seed": s.seed,
        "eps_trunc": s.eps_trunc,
        "bias_constant_mean": s.bias_constant_mean,
        "bias_constant_laplace": s.bias_constant_laplace,
        "laplace_points": [{"t": t, "lam": list(lam)} for t, lam in s.laplace_points],
    }
    if s.comparison is not None:
        blob["comparison"] = s.comparison
    if s.ratio_check is not None:
        blob["ratio_check"] = s.ratio_check
    return blob


def load_scenario(name_or_path: str) -> Scenario:
    """Load a bundled scenario by name (S1..S5) or any scenario file by path."""
    if name_or_path in BUNDLED_NAMES:
        ref = resources.files("cbi").joinpath(f"data/scenarios/{name_or_path}.json")
        text = ref.read_text()
    else:
        path = Path(name_or_path)
        if not path.exists():
            raise SchemaError(f"unknown scenario {name_or_path!r} "
                              f"(bundled: {', '.join(BUNDLED_NAMES)})")
        text = path.read_text()
    try:
        return scenario_from_json(json.loads(text))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"scenario file is not valid JSON: {exc}") from exc
