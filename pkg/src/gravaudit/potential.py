"""Classical gravitational potential of the uniform spheres.

Convention: inside a sphere of mass M and radius R the potential is
(GM/2)(3/(2R) - r^2/(2R^3)); outside it is continued as GM/(2r). Sign is
positive (the factor multiplying the matter density in the coupling).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import PACKETS, PhysicalParams, SetupGeometry

SOURCINGS = ("single-source", "all-branches")


def sphere_potential(center, params: PhysicalParams, x) -> np.ndarray:
    """Potential at points ``x`` (shape (..., 3)) of one sphere at ``center``."""
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x - np.asarray(center, dtype=float), axis=-1)
    GM, R = params.G * params.M, params.R
    inside = 0.5 * GM * (1.5 / R - r**2 / (2 * R**3))
    with np.errstate(divide="ignore"):
        outside = 0.5 * GM / r
    return np.where(r <= R, inside, outside)


def radial_profile(params: PhysicalParams, r) -> np.ndarray:
    """Interior potential as a function of distance from the sphere center."""
    r = np.asarray(r, dtype=float)
    GM, R = params.G * params.M, params.R
    return 0.5 * GM * (1.5 / R - r**2 / (2 * R**3))


@dataclass(frozen=True)
class PotentialField:
    """Potential sourced either by one named sphere or by all four, weighted.

    ``branch_weights`` only matters in ``all-branches`` mode and must sum to 1.
    """

    geometry: SetupGeometry
    params: PhysicalParams
    sourcing: str = "single-source"
    branch_weights: dict = field(default_factory=lambda: {p: 0.25 for p in PACKETS})

    def __post_init__(self):
        if self.sourcing not in SOURCINGS:
            raise ValueError(f"sourcing must be one of {SOURCINGS}, got {self.sourcing!r}")
        w = dict(self.branch_weights)
        if set(w) != set(PACKETS):
            raise ValueError(f"branch_weights must have exactly the keys {PACKETS}")
        if any(v < 0 for v in w.values()):
            raise ValueError("branch_weights must be non-negative")
        if abs(sum(w.values()) - 1.0) > 1e-12:
            raise ValueError(f"branch_weights must sum to 1, got {sum(w.values())!r}")
        object.__setattr__(self, "branch_weights", w)

    def evaluate(self, x, target_branch: str | None = None) -> np.ndarray:
        if self.sourcing == "single-source":
            if target_branch is None:
                raise ValueError("single-source potential needs target_branch (one of 1L, 1R, 2L, 2R)")
            if target_branch not in PACKETS:
                raise ValueError(f"unknown branch {target_branch!r}")
            return sphere_potential(self.geometry.center(target_branch), self.params, x)
        total = 0.0
        for label in PACKETS:
            total = total + self.branch_weights[label] * sphere_potential(
                self.geometry.center(label), self.params, x)
        return total

    def restricted(self, label: str):
        """Integrand for the ball ``label``: the potential seen at its points."""
        return lambda x: self.evaluate(x, target_branch=label)


def evaluate(field: PotentialField, x, target_branch: str | None = None) -> np.ndarray:
    return field.evaluate(x, target_branch)
