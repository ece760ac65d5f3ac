"""Environment constants and tolerances.

Everything the simulator, constraint classifiers and goal checkers treat as a
tunable number lives in :class:`EnvConstants`.  Defaults are loaded from the
bundled ``data/constants.json``; a user JSON file can override any subset of
fields.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any


def _interval_ok(iv) -> bool:
    return len(iv) == 2 and iv[0] <= iv[1]


@dataclass(frozen=True)
class EnvConstants:
    table_bounds: tuple = ((-0.3, 0.3), (-0.8, -0.2), (0.0, 0.0))
    table_center: tuple = (0.0, -0.5, 0.0)
    block_size: float = 0.04
    hover_offset: float = 0.1
    pen_height: float = 0.0
    gripper_max_opening: float = 0.085
    # reachability stand-in for IK
    z_cap: float = 0.5
    # 3-param pick: tolerance around a block's top-center
    grasp_tolerance_xy: float = 0.02
    grasp_tolerance_z: float = 0.02
    # settle / placement
    placement_threshold: float = 0.01
    support_margin: float = 0.0
    bowl_floor_height: float = 0.01
    gripper_radius: float = 0.02
    contact_eps: float = 1e-6
    # goal checker tolerances
    packing_radius: float = 0.06
    line_deviation: float = 0.01
    rest_height_tol: float = 1e-3
    endpoint_tol: float = 1e-3
    arrow_angle_range: tuple = (10.0, 80.0)
    pyramid_gap_factor: float = 1.5
    # initial-state generation
    obstacle_radius_range: tuple = (0.01, 0.05)
    obstacle_clearance: float = 0.01
    placement_attempts: int = 10000
    colors: tuple = ("blue", "green", "pink", "purple")

    def __post_init__(self):
        if len(self.table_bounds) != 3 or not all(_interval_ok(iv) for iv in self.table_bounds):
            raise ValueError(f"bad table_bounds: {self.table_bounds!r}")
        if self.block_size <= 0 or self.gripper_max_opening <= 0:
            raise ValueError("block_size and gripper_max_opening must be positive")

    @property
    def half_block(self) -> float:
        return self.block_size / 2

    def to_dict(self) -> dict[str, Any]:
        return _listify(dataclasses.asdict(self))

    def replace(self, **changes) -> "EnvConstants":
        return dataclasses.replace(self, **_tupleize(changes))


def _listify(obj):
    if isinstance(obj, (list, tuple)):
        return [_listify(o) for o in obj]
    if isinstance(obj, dict):
        return {k: _listify(v) for k, v in obj.items()}
    return obj


def _tupleize(obj):
    if isinstance(obj, (list, tuple)):
        return tuple(_tupleize(o) for o in obj)
    if isinstance(obj, dict):
        return {k: _tupleize(v) for k, v in obj.items()}
    return obj


_FIELDS = {f.name for f in dataclasses.fields(EnvConstants)}


def constants_from_dict(data: dict[str, Any], base: EnvConstants | None = None) -> EnvConstants:
    unknown = set(data) - _FIELDS
    if unknown:
        raise ValueError(f"unknown constant(s): {sorted(unknown)}")
    base = base or EnvConstants()
    return base.replace(**data)


def load_constants(path: str | Path | None = None) -> EnvConstants:
    """Bundled defaults, optionally overridden by the JSON file at ``path``."""
    text = resources.files("ccsplan").joinpath("data/constants.json").read_text()
    consts = constants_from_dict(json.loads(text))
    if path is not None:
        consts = constants_from_dict(json.loads(Path(path).read_text()), base=consts)
    return consts


DEFAULT = EnvConstants()
