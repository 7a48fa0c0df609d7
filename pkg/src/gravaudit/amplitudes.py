"""Fourth-order exchange amplitudes and the beta-matrix assemblies.

The exchange tensor is entries[i, j, m, k] = P * V[i, k] * V[m, j] where P is
``model.exchange_prefactor``. The beta matrix is then assembled as

* ``diagonal``: beta[i, j] = entries[i, j, i, j] (only same-branch transitions),
* ``full``: beta[i, j] = P * (sum_k V[i, k]) * (sum_m V[m, j]),
* ``dominant``: beta[i, j] = the largest-magnitude of the four entries[i, j, :, :],
* ``farfield-analytic``: the ``full`` form evaluated from the closed-form
  1/d law without any V matrix.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import model
from .model import (AmplitudeMatrix, ExchangeTensor, PhysicalParams, SetupGeometry,
                    branch_distances)
from .potential import PotentialField
from .quadrature import QuadratureSpec, ball_pair_coulomb

PROVENANCES = ("quadrature", "farfield")
ASSEMBLY_MODES = ("diagonal", "full", "dominant")
TIE_RTOL = 1e-9
FARFIELD_MIN_RATIO = 5.0


class FarFieldWarning(UserWarning):
    """A branch distance is below 5R, where the closed form is not trusted."""


@dataclass(frozen=True, eq=False)
class VMatrix:
    """V[i, j] = i * int int Phi(x) Phi(y) theta_1i(x) theta_2j(y) / |x - y|.

    In ``kappa-units`` the entries are divided by ``model.farfield_coupling``
    so the far-field value is i / d_ij in the geometry's length unit.
    """

    entries: np.ndarray
    provenance: str
    scale: str = "absolute"

    def __post_init__(self):
        e = np.array(self.entries, dtype=complex)
        if e.shape != (2, 2) or not np.all(np.isfinite(e)):
            raise ValueError("V must be a finite 2x2 matrix")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"provenance must be one of {PROVENANCES}")
        if self.scale not in model.SCALES:
            raise ValueError(f"unknown scale {self.scale!r}")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)


def _scaled(integral: float, params: PhysicalParams, scale: str) -> complex:
    if scale == "kappa-units":
        integral = integral / model.farfield_coupling(params)
    elif scale != "absolute":
        raise ValueError(f"unknown scale {scale!r}")
    return 1j * integral


def coulomb_integral(geometry: SetupGeometry, params: PhysicalParams, a: str, b: str,
                     field: PotentialField | None = None,
                     spec: QuadratureSpec | None = None) -> float:
    """Real ball-pair integral of Phi*theta_a with Phi*theta_b for packets a != b."""
    field = field or PotentialField(geometry, params)
    return ball_pair_coulomb(field.restricted(a), field.restricted(b),
                             (geometry.center(a), geometry.R),
                             (geometry.center(b), geometry.R), spec)


def compute_Vij(geometry: SetupGeometry, params: PhysicalParams, i: int, j: int,
                field: PotentialField | None = None, spec: QuadratureSpec | None = None,
                scale: str = "absolute") -> complex:
    a, b = "1" + model.BRANCHES[i], "2" + model.BRANCHES[j]
    return _scaled(coulomb_integral(geometry, params, a, b, field, spec), params, scale)


def farfield_Vij(geometry: SetupGeometry, params: PhysicalParams, i: int, j: int,
                 scale: str = "absolute") -> complex:
    d = branch_distances(geometry)[i, j]
    if d < FARFIELD_MIN_RATIO * geometry.R:
        warnings.warn(
            f"d_{model.BRANCHES[i]}{model.BRANCHES[j]} = {d:.4g} is below "
            f"{FARFIELD_MIN_RATIO:g}R; far-field form used outside its stated regime",
            FarFieldWarning, stacklevel=2)
    if scale == "kappa-units":
        return 1j / d
    return _scaled(model.farfield_coupling(params) / d, params, scale)


def vmatrix_quadrature(geometry, params, field=None, spec=None, scale="absolute") -> VMatrix:
    field = field or PotentialField(geometry, params)
    entries = [[compute_Vij(geometry, params, i, j, field, spec, scale) for j in range(2)]
               for i in range(2)]
    return VMatrix(np.array(entries), "quadrature", scale)


def vmatrix_farfield(geometry, params, scale="absolute") -> VMatrix:
    entries = [[farfield_Vij(geometry, params, i, j, scale) for j in range(2)] for i in range(2)]
    return VMatrix(np.array(entries), "farfield", scale)


def vmatrix_from_integrals(integrals: np.ndarray, params, scale="absolute",
                           provenance="quadrature") -> VMatrix:
    """Build V from a 2x2 array of real ball-pair integrals I[1i, 2j]."""
    entries = [[_scaled(float(integrals[i, j]), params, scale) for j in range(2)] for i in range(2)]
    return VMatrix(np.array(entries), provenance, scale)


def exchange_tensor(V: VMatrix, params: PhysicalParams) -> ExchangeTensor:
    pref = model.exchange_prefactor(params, V.scale)
    v = V.entries
    # entries[i, j, m, k] = pref * V[i, k] * V[m, j]
    return ExchangeTensor(pref * np.einsum("ik,mj->ijmk", v, v), V.scale)


def _dominant(tensor: ExchangeTensor) -> tuple[np.ndarray, bool]:
    out = np.empty((2, 2), dtype=complex)
    tie = False
    for i in range(2):
        for j in range(2):
            pieces = tensor.pieces(i, j).ravel()
            mags = np.abs(pieces)
            order = np.argsort(-mags, kind="stable")
            top, second = mags[order[0]], mags[order[1]]
            if top > 0 and top - second <= TIE_RTOL * top:
                tie = True
            out[i, j] = pieces[order[0]]
    return out, tie


def beta_matrix(tensor: ExchangeTensor, V: VMatrix, params: PhysicalParams,
                mode: str) -> AmplitudeMatrix:
    if mode == "diagonal":
        e = tensor.entries
        entries = np.array([[e[i, j, i, j] for j in range(2)] for i in range(2)])
        return AmplitudeMatrix(entries, "diagonal", tensor.scale)
    if mode == "full":
        pref = model.exchange_prefactor(params, V.scale)
        rows = V.entries.sum(axis=1)
        cols = V.entries.sum(axis=0)
        return AmplitudeMatrix(pref * np.outer(rows, cols), "full", V.scale)
    if mode == "dominant":
        entries, tie = _dominant(tensor)
        return AmplitudeMatrix(entries, "dominant", tensor.scale, tie=tie)
    raise ValueError(f"mode must be one of {ASSEMBLY_MODES}, got {mode!r}")


def farfield_analytic_beta(geometry: SetupGeometry, params: PhysicalParams,
                           scale: str = "kappa-units") -> AmplitudeMatrix:
    """kappa * (sum_k 1/d_ik) * (sum_m 1/d_mj) straight from the distances."""
    inv = 1.0 / branch_distances(geometry)
    entries = np.outer(inv.sum(axis=1), inv.sum(axis=0)).astype(complex)
    if scale == "kappa-units":
        if params.t == 0:
            entries = entries * 0
    else:
        entries = entries * model.kappa(params)
    return AmplitudeMatrix(entries, "farfield-analytic", scale)
