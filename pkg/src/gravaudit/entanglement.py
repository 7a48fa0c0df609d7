"""Two-branch pure states built from beta matrices, and their factorization verdicts."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import amplitudes, model
from .model import AmplitudeMatrix, PhysicalParams, SetupGeometry
from .potential import PotentialField
from .quadrature import QuadratureSpec

DEFAULT_TOLERANCE = 1e-8
SUITE_MODES = ("diagonal", "full", "dominant", "farfield-analytic")


class DegenerateStateError(ValueError):
    """Every coefficient is zero, so no normalized state exists."""


@dataclass(frozen=True, eq=False)
class PureState2x2:
    c: np.ndarray
    source_mode: str

    def __post_init__(self):
        c = np.array(self.c, dtype=complex)
        if c.shape != (2, 2):
            raise ValueError("state coefficients must be 2x2")
        norm = float(np.sum(np.abs(c) ** 2))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state is not normalized (|c|^2 = {norm!r})")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)


@dataclass(frozen=True)
class EntanglementReport:
    det: complex
    schmidt_values: tuple
    concurrence: float
    verdict: str
    tolerance: float
    source_mode: str

    def to_dict(self) -> dict:
        return {
            "det": [self.det.real, self.det.imag],
            "schmidt_values": list(self.schmidt_values),
            "concurrence": self.concurrence,
            "verdict": self.verdict,
            "tolerance": self.tolerance,
            "source_mode": self.source_mode,
        }


def state_from_beta(beta: AmplitudeMatrix) -> PureState2x2:
    e = beta.entries
    # rescale first so tiny (kappa ~ 1e-60) amplitudes do not underflow when squared
    peak = float(np.max(np.abs(e)))
    if peak == 0.0:
        raise DegenerateStateError(f"{beta.mode} beta matrix is identically zero")
    scaled = e / peak
    c = scaled / math.sqrt(float(np.sum(np.abs(scaled) ** 2)))
    return PureState2x2(c, beta.mode)


def schmidt_analysis(state: PureState2x2, tolerance: float = DEFAULT_TOLERANCE) -> EntanglementReport:
    c = state.c
    det = complex(c[0, 0] * c[1, 1] - c[0, 1] * c[1, 0])
    s = np.linalg.svd(c, compute_uv=False)
    concurrence = min(2.0 * abs(det), 1.0)
    verdict = "factorized" if concurrence <= tolerance else "entangled"
    return EntanglementReport(det, (float(s[0]), float(s[1])), concurrence, verdict,
                              tolerance, state.source_mode)


def analyze(beta: AmplitudeMatrix, tolerance: float = DEFAULT_TOLERANCE) -> EntanglementReport:
    return schmidt_analysis(state_from_beta(beta), tolerance)


@dataclass
class SuiteResult:
    """Per-mode reports plus the beta matrices they were computed from."""

    reports: dict = field(default_factory=dict)
    betas: dict = field(default_factory=dict)
    degenerate: list = field(default_factory=list)
    V: amplitudes.VMatrix | None = None
    tensor: model.ExchangeTensor | None = None
    dominant_tie: bool = False

    @property
    def conclusion_holds(self) -> bool:
        """Full and dominant assemblies factorize while the diagonal one does not."""
        r = self.reports
        if not {"diagonal", "full", "dominant"} <= set(r):
            return False
        return (r["full"].verdict == "factorized"
                and r["dominant"].verdict == "factorized"
                and r["diagonal"].verdict == "entangled")


def verdict_suite(geometry: SetupGeometry, params: PhysicalParams,
                  spec: QuadratureSpec | None = None, *, v_source: str = "farfield",
                  scale: str = "kappa-units", tolerance: float = DEFAULT_TOLERANCE,
                  field: PotentialField | None = None, modes=SUITE_MODES) -> SuiteResult:
    """Run every assembly end to end and report its verdict.

    ``v_source`` selects the far-field closed form or quadrature for V.
    Modes whose beta vanishes identically (t = 0) are listed in ``degenerate``.
    """
    if v_source == "farfield":
        V = amplitudes.vmatrix_farfield(geometry, params, scale)
    elif v_source == "quadrature":
        V = amplitudes.vmatrix_quadrature(geometry, params, field, spec, scale)
    else:
        raise ValueError(f"v_source must be 'farfield' or 'quadrature', got {v_source!r}")
    tensor = amplitudes.exchange_tensor(V, params)
    result = SuiteResult(V=V, tensor=tensor)
    for mode in modes:
        if mode == "farfield-analytic":
            beta = amplitudes.farfield_analytic_beta(geometry, params, scale)
        else:
            beta = amplitudes.beta_matrix(tensor, V, params, mode)
        result.betas[mode] = beta
        if mode == "dominant":
            result.dominant_tie = beta.tie
        try:
            result.reports[mode] = analyze(beta, tolerance)
        except DegenerateStateError:
            result.degenerate.append(mode)
    return result
