"""Experiment configuration for the command-line front end.

A configuration is a plain JSON document with a chart spec, an optional
curve spec, numeric parameters, output paths, and a random seed.  Fixed
seed and parameters give byte-identical CSV/JSON outputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import ConstructionError

DEFAULT_PARAMS = {
    "N": 2000,
    "p_list": [0.01, 0.02, 0.05],
    "p_ref": 0.05,
    "grid": 64,
    "tol": 1e-6,
    "trust_region": None,
}


@dataclass
class ExperimentConfig:
    """Chart, curve, numeric parameters, outputs, and the random seed."""

    chart: dict
    name: str = "experiment"
    curve: Optional[dict] = None
    params: dict = field(default_factory=dict)
    out: Optional[str] = None
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.chart, dict) or "builder" not in self.chart:
            raise ConstructionError("chart spec must contain a 'builder'")
        if not (isinstance(self.seed, int) and self.seed >= 0):
            raise ConstructionError("seed must be an unsigned integer")
        merged = dict(DEFAULT_PARAMS)
        merged.update(self.params)
        self.params = merged
        for key, val in self.params.items():
            if key.startswith("tol") or key.endswith("tol"):
                if not (isinstance(val, (int, float)) and val > 0):
                    raise ConstructionError(f"tolerance {key} must be positive")

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        with open(path) as fh:
            data = json.load(fh)
        return cls(
            chart=data["chart"],
            name=data.get("name", Path(path).stem),
            curve=data.get("curve"),
            params=data.get("params", {}),
            out=data.get("out"),
            seed=int(data.get("seed", 0)),
        )

    def to_dict(self) -> dict:
        return {"chart": self.chart, "name": self.name, "curve": self.curve,
                "params": self.params, "out": self.out, "seed": self.seed}
