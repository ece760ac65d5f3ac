"""Parameter samplers: uniform continuous, uniform discrete, and top-down grasps."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from ..scene import Pose

GRASP_XY = 0.02
GRASP_DEPTH = -0.005


@dataclass(frozen=True)
class SamplerSpec:
    kind: str  # "continuous" | "discrete" | "grasp"
    min: float = 0.0
    max: float = 1.0
    values: tuple = ()

    def __post_init__(self):
        if self.kind == "continuous":
            if not (math.isfinite(self.min) and math.isfinite(self.max)):
                raise ValueError("continuous bounds must be finite")
            if self.min > self.max:
                raise ValueError(f"continuous sampler has min {self.min} > max {self.max}")
        elif self.kind == "discrete":
            if not self.values:
                raise ValueError("discrete sampler needs at least one value")
        elif self.kind != "grasp":
            raise ValueError(f"unknown sampler kind {self.kind!r}")

    def to_json(self) -> dict:
        if self.kind == "continuous":
            return {"kind": "continuous", "min": self.min, "max": self.max}
        if self.kind == "discrete":
            return {"kind": "discrete", "values": list(self.values)}
        return {"kind": "grasp"}

    def __str__(self):
        if self.kind == "continuous":
            return f"continuous({self.min:g}, {self.max:g})"
        if self.kind == "discrete":
            return f"discrete({list(self.values)})"
        return "grasp()"


def continuous(lo: float, hi: float) -> SamplerSpec:
    return SamplerSpec("continuous", float(lo), float(hi))


def discrete(values) -> SamplerSpec:
    return SamplerSpec("discrete", values=tuple(values))


def grasp() -> SamplerSpec:
    return SamplerSpec("grasp")


def sample(spec: SamplerSpec, rng: np.random.Generator) -> Any:
    if spec.kind == "continuous":
        if spec.min == spec.max:
            return spec.min
        return float(rng.uniform(spec.min, spec.max))
    if spec.kind == "discrete":
        return spec.values[int(rng.integers(len(spec.values)))]
    x = float(rng.uniform(-GRASP_XY, GRASP_XY))
    y = float(rng.uniform(-GRASP_XY, GRASP_XY))
    yaw = float(rng.uniform(-math.pi, math.pi))
    return Pose(x=x, y=y, pitch=math.pi, yaw=yaw).multiply(Pose(z=GRASP_DEPTH))
