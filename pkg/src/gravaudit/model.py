"""Physical parameters, setup geometry, derived constants and amplitude containers."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

BRANCHES = ("L", "R")
PACKETS = ("1L", "1R", "2L", "2R")
UNIT_SYSTEMS = ("SI", "natural")
SCALES = ("absolute", "kappa-units")
AMPLITUDE_MODES = (
    "diagonal",
    "full",
    "dominant",
    "farfield-analytic",
    "firstq-identical",
    "firstq-distinguishable",
)


class ValidationError(ValueError):
    """Invalid parameter value; ``field`` names the offending input."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class GeometryError(ValueError):
    """Sphere supports overlap or the geometry is otherwise unusable."""

    def __init__(self, message: str, pairs=()):
        super().__init__(message)
        self.pairs = tuple(pairs)


class NumericalError(ArithmeticError):
    """A computed quantity is non-finite or out of representable range."""


@dataclass(frozen=True)
class PhysicalParams:
    """Constants of one run. ``M`` and ``V`` are always derived, never set.

    ``t`` may be zero (the perturbative amplitudes then vanish); every other
    scalar must be strictly positive.
    """

    G: float
    hbar: float
    c: float
    m: float
    N: int
    R: float
    t: float
    unit_system: str = "SI"
    M: float = field(init=False)
    V: float = field(init=False)

    def __post_init__(self):
        for name in ("G", "hbar", "c", "m", "R"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValidationError(name, f"must be finite and > 0, got {value!r}")
        if not (math.isfinite(self.t) and self.t >= 0):
            raise ValidationError("t", f"must be finite and >= 0, got {self.t!r}")
        if isinstance(self.N, bool) or int(self.N) != self.N or self.N < 1:
            raise ValidationError("N", f"must be an integer >= 1, got {self.N!r}")
        if self.unit_system not in UNIT_SYSTEMS:
            raise ValidationError("unit_system", f"must be one of {UNIT_SYSTEMS}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "M", self.N * self.m)
        object.__setattr__(self, "V", 4.0 / 3.0 * math.pi * self.R**3)
        if not (math.isfinite(self.M) and self.M > 0):
            raise ValidationError("M", f"derived mass N*m is not representable: {self.M!r}")

    @property
    def gamma(self) -> float:
        """Inverse reduced Compton length m c / hbar."""
        return self.m * self.c / self.hbar

    def inputs(self) -> dict:
        return dict(G=self.G, hbar=self.hbar, c=self.c, m=self.m, N=self.N,
                    R=self.R, t=self.t, unit_system=self.unit_system)

    def replace(self, **changes) -> "PhysicalParams":
        return PhysicalParams(**{**self.inputs(), **changes})


def derive_params(G, hbar, c, m, N, R, t, unit_system="SI") -> PhysicalParams:
    return PhysicalParams(G=G, hbar=hbar, c=c, m=m, N=N, R=R, t=t, unit_system=unit_system)


def _vector(value, name) -> tuple:
    arr = np.asarray(value, dtype=float)
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise ValidationError(name, "must be a finite 3-vector")
    return tuple(float(v) for v in arr)


@dataclass(frozen=True)
class SetupGeometry:
    """Centers of the four branch locations and the common sphere radius."""

    X_1L: tuple
    X_1R: tuple
    X_2L: tuple
    X_2R: tuple
    R: float

    def __post_init__(self):
        for label in PACKETS:
            name = f"X_{label}"
            object.__setattr__(self, name, _vector(getattr(self, name), name))
        if not (math.isfinite(self.R) and self.R > 0):
            raise ValidationError("R", f"must be finite and > 0, got {self.R!r}")
        bad = []
        for a, b in itertools.combinations(PACKETS, 2):
            dist = float(np.linalg.norm(self.center(a) - self.center(b)))
            if dist <= 2 * self.R:
                bad.append((a, b, dist))
        if bad:
            listing = ", ".join(f"{a}-{b} (distance {d:.6g})" for a, b, d in bad)
            raise GeometryError(
                f"overlapping supports, center distance must exceed 2R={2 * self.R:.6g}: {listing}",
                pairs=[(a, b) for a, b, _ in bad],
            )

    def center(self, label: str) -> np.ndarray:
        return np.array(getattr(self, f"X_{label}"))

    @property
    def centers(self) -> np.ndarray:
        """(4, 3) array in packet order 1L, 1R, 2L, 2R."""
        return np.array([getattr(self, f"X_{p}") for p in PACKETS])

    @classmethod
    def from_array(cls, centers, R: float) -> "SetupGeometry":
        c = np.asarray(centers, dtype=float)
        return cls(X_1L=c[0], X_1R=c[1], X_2L=c[2], X_2R=c[3], R=R)

    def transformed(self, rotation=None, translation=None, scale=1.0) -> "SetupGeometry":
        c = self.centers
        if rotation is not None:
            c = c @ np.asarray(rotation, dtype=float).T
        if translation is not None:
            c = c + np.asarray(translation, dtype=float)
        return SetupGeometry.from_array(c * scale, self.R * scale)


def branch_distances(geometry: SetupGeometry) -> np.ndarray:
    """d[i, k] = |X_1i - X_2k| with i, k in (L, R)."""
    c = geometry.centers
    return np.linalg.norm(c[:2, None, :] - c[None, 2:, :], axis=-1)


def _exp_checked(log_value: float, what: str) -> float:
    if log_value == -math.inf:
        return 0.0
    if log_value > 709.0 or log_value < -745.0:
        raise NumericalError(f"{what} = exp({log_value:.4g}) is outside double range")
    return math.exp(log_value)


def log_interaction_prefactor(params: PhysicalParams) -> float:
    """Natural log of m^6 N^2 / (4 pi^2 V^2 hbar^6)."""
    p = params
    return (6 * math.log(p.m) + 2 * math.log(p.N) - math.log(4 * math.pi**2)
            - 2 * math.log(p.V) - 6 * math.log(p.hbar))


def interaction_prefactor(params: PhysicalParams) -> float:
    return _exp_checked(log_interaction_prefactor(params), "interaction prefactor")


def farfield_coupling(params: PhysicalParams) -> float:
    """16 pi^2 G^2 M^2 R^4 / 25: the ball-pair integral times the center distance."""
    p = params
    return 16 * math.pi**2 * p.G**2 * p.M**2 * p.R**4 / 25


def log10_abs_kappa(params: PhysicalParams) -> float:
    """log10 |kappa|; ``-inf`` when t = 0."""
    p = params
    if p.t == 0:
        return -math.inf
    return (math.log10(36 / 625) + 4 * math.log10(p.G) + 4 * math.log10(p.m)
            + 6 * math.log10(p.M) + 2 * math.log10(p.R) + 2 * math.log10(p.t)
            - 6 * math.log10(p.hbar))


def kappa(params: PhysicalParams) -> complex:
    """(6 i G^2 m^2 M^3 R t / (25 hbar^3))^2, a non-positive real number."""
    log10k = log10_abs_kappa(params)
    if log10k == -math.inf:
        return complex(-0.0, 0.0)
    return complex(-_exp_checked(log10k * math.log(10), "kappa"), 0.0)


def exchange_prefactor(params: PhysicalParams, scale: str) -> float:
    """Multiplier of V_ik V_mj in the fourth-order exchange tensor.

    In ``absolute`` scale this is Lambda t^2. In ``kappa-units`` the V entries
    are stored divided by ``farfield_coupling`` and the tensor divided by
    kappa, which leaves the constant -1 (or 0 when t = 0).
    """
    if scale == "absolute":
        return interaction_prefactor(params) * params.t**2
    if scale == "kappa-units":
        return 0.0 if params.t == 0 else -1.0
    raise ValueError(f"unknown scale {scale!r}; expected one of {SCALES}")


@dataclass(frozen=True, eq=False)
class AmplitudeMatrix:
    """2x2 coefficients beta[i, j] over branches (L, R) of objects 1 and 2."""

    entries: np.ndarray
    mode: str
    scale: str = "absolute"
    tie: bool = False

    def __post_init__(self):
        e = np.array(self.entries, dtype=complex)
        if e.shape != (2, 2):
            raise ValueError(f"entries must be 2x2, got shape {e.shape}")
        if not np.all(np.isfinite(e)):
            raise NumericalError(f"non-finite amplitude in {self.mode} matrix")
        if self.mode not in AMPLITUDE_MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.scale not in SCALES:
            raise ValueError(f"unknown scale {self.scale!r}")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    def log10_abs(self, params: PhysicalParams) -> np.ndarray:
        """log10 |beta| in absolute units, safe against underflow of kappa."""
        with np.errstate(divide="ignore"):
            logs = np.log10(np.abs(self.entries))
        if self.scale == "kappa-units":
            logs = logs + log10_abs_kappa(params)
        return logs


@dataclass(frozen=True, eq=False)
class ExchangeTensor:
    """entries[i, j, m, k] = <1i, 2j| U^(4) |1m, 2k> restricted to exchange terms."""

    entries: np.ndarray
    scale: str = "absolute"

    def __post_init__(self):
        e = np.array(self.entries, dtype=complex)
        if e.shape != (2, 2, 2, 2):
            raise ValueError(f"entries must be 2x2x2x2, got shape {e.shape}")
        if not np.all(np.isfinite(e)):
            raise NumericalError("non-finite exchange tensor entry")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    def pieces(self, i: int, j: int) -> np.ndarray:
        """The four contributions (indexed [m, k]) summed into beta[i, j]."""
        return self.entries[i, j]
