"""Boundary condition descriptions shared by the transport and pressure stages.

Three kinds cover all benchmark configurations:

* VELOCITY - prescribed velocity (no-slip walls, moving lids, inflow).
  Transport sees the mirror ghost state v+ = 2 V - v-; the pressure stage
  drops the boundary pressure jump and adds the prescribed normal flux.
* SLIP     - free-slip wall: ghost state reflects the normal component,
  normal flux is zero.
* PRESSURE - prescribed exterior pressure (outflow, pressure-driven inflow).
  Transport uses a pass-through ghost; the pressure stage keeps the full
  boundary jump with the exterior value on the outside.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Callable

import numpy as np

from .mesh import PrimalMesh


class BCKind(IntEnum):
    VELOCITY = 0
    SLIP = 1
    PRESSURE = 2


@dataclass(frozen=True)
class BoundaryCondition:
    kind: BCKind
    velocity: Callable[[np.ndarray, float], np.ndarray] | None = None
    pressure: Callable[[np.ndarray, float], np.ndarray] | None = None

    def __post_init__(self):
        if self.kind == BCKind.PRESSURE and self.pressure is None:
            raise ValueError("PRESSURE condition needs a pressure callable")


def noslip() -> BoundaryCondition:
    return BoundaryCondition(BCKind.VELOCITY)


def moving_wall(vel: Callable[[np.ndarray, float], np.ndarray]) -> BoundaryCondition:
    return BoundaryCondition(BCKind.VELOCITY, velocity=vel)


def slip_wall() -> BoundaryCondition:
    return BoundaryCondition(BCKind.SLIP)


def pressure_outlet(pres: Callable[[np.ndarray, float], np.ndarray]) -> BoundaryCondition:
    return BoundaryCondition(BCKind.PRESSURE, pressure=pres)


@dataclass
class ResolvedBC:
    """Per-boundary-edge conditions in the ordering of geo.bnd_edges."""

    kinds: np.ndarray                       # (Eb,) BCKind codes
    conds: list = field(default_factory=list)  # (Eb,) BoundaryCondition

    @classmethod
    def from_tags(cls, mesh: PrimalMesh, bnd_edges: np.ndarray,
                  by_tag: dict[int, BoundaryCondition]) -> "ResolvedBC":
        conds = []
        for j in bnd_edges:
            tag = int(mesh.edge_tags[j])
            if tag not in by_tag:
                raise KeyError(f"no boundary condition for edge tag {tag}")
            conds.append(by_tag[tag])
        kinds = np.array([c.kind for c in conds], dtype=int)
        return cls(kinds=kinds, conds=conds)

    def velocity_at(self, pts: np.ndarray, t: float) -> np.ndarray:
        """Prescribed velocity at trace points (Eb, n, 2); zero where unset."""
        out = np.zeros_like(pts)
        for k, c in enumerate(self.conds):
            if c.velocity is not None:
                out[k] = c.velocity(pts[k], t)
        return out

    def pressure_at(self, pts: np.ndarray, t: float) -> np.ndarray:
        """Prescribed exterior pressure at trace points (Eb, n); zero where unset."""
        out = np.zeros(pts.shape[:-1])
        for k, c in enumerate(self.conds):
            if c.pressure is not None:
                out[k] = c.pressure(pts[k], t)
        return out
