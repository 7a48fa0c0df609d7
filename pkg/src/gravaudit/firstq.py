"""First-quantization reconstruction of the beta coefficients for two particles.

The single-particle propagator is kept on the four-packet subspace
(1L, 1R, 2L, 2R); ``U[a, b] = <a| U_s |b>``. Packets do not spread and never
overlap, so order 0 is the identity and order 1 is diagonal. Order 2 uses the
instantaneous Coulomb-kernel propagator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import model
from .amplitudes import vmatrix_from_integrals
from .model import AmplitudeMatrix, PhysicalParams, SetupGeometry
from .potential import PotentialField, radial_profile
from .quadrature import QuadratureSpec, ball_integral, ball_pair_coulomb, ball_self_coulomb

IDX = {label: n for n, label in enumerate(model.PACKETS)}
MAX_PROPAGATOR_ORDER = 2


@dataclass(frozen=True, eq=False)
class PacketPropagator:
    order: int
    U: np.ndarray

    def __post_init__(self):
        U = np.array(self.U, dtype=complex)
        if U.shape != (4, 4):
            raise ValueError("packet propagator must be 4x4")
        if self.order not in (0, 1, 2):
            raise ValueError("order must be 0, 1 or 2")
        if self.order == 1 and np.any(U[:2, 2:] != 0) | np.any(U[2:, :2] != 0):
            raise ValueError("order-1 entries between different objects must vanish")
        U.setflags(write=False)
        object.__setattr__(self, "U", U)


@dataclass(frozen=True, eq=False)
class PacketIntegrals:
    """Quadrature values shared by the first- and second-quantization pipelines.

    ``pair[a, b]`` is the ball-pair Coulomb integral of Phi*theta_a with
    Phi*theta_b (the self integral on the diagonal); ``single[a]`` is the
    integral of Phi over packet a.
    """

    pair: np.ndarray
    single: np.ndarray
    provenance: str = "quadrature"

    def cross_object(self) -> np.ndarray:
        """2x2 block I[1i, 2j]."""
        return self.pair[:2, 2:]


def packet_integrals(geometry: SetupGeometry, params: PhysicalParams,
                     field: PotentialField | None = None,
                     spec: QuadratureSpec | None = None,
                     v_source: str = "quadrature") -> PacketIntegrals:
    field = field or PotentialField(geometry, params)
    spec = spec or QuadratureSpec()
    pair = np.zeros((4, 4))
    single = np.zeros(4)
    self_term = ball_self_coulomb(lambda r: radial_profile(params, r), geometry.R)
    for a, la in enumerate(model.PACKETS):
        ball_a = (geometry.center(la), geometry.R)
        single[a] = ball_integral(field.restricted(la), ball_a, spec)
        pair[a, a] = self_term
        for b in range(a + 1, 4):
            lb = model.PACKETS[b]
            if v_source == "farfield":
                d = float(np.linalg.norm(geometry.center(la) - geometry.center(lb)))
                value = model.farfield_coupling(params) / d
            elif v_source == "quadrature":
                value = ball_pair_coulomb(field.restricted(la), field.restricted(lb), ball_a,
                                          (geometry.center(lb), geometry.R), spec)
            else:
                raise ValueError(f"v_source must be 'farfield' or 'quadrature', got {v_source!r}")
            pair[a, b] = pair[b, a] = value
    return PacketIntegrals(pair, single, v_source)


def first_order_factor(params: PhysicalParams) -> complex:
    """-i m t / (hbar V)."""
    return -1j * params.m * params.t / (params.hbar * params.V)


def second_order_factor(params: PhysicalParams) -> complex:
    """i m^3 t / (2 pi V hbar^3)."""
    p = params
    return 1j * p.m**3 * p.t / (2 * math.pi * p.V * p.hbar**3)


def packet_propagator(geometry: SetupGeometry, params: PhysicalParams, order: int,
                      field: PotentialField | None = None, spec: QuadratureSpec | None = None,
                      integrals: PacketIntegrals | None = None) -> PacketPropagator:
    if order == 0:
        return PacketPropagator(0, np.eye(4))
    if order not in (1, 2):
        raise ValueError(f"order must be 0, 1 or 2, got {order!r}")
    integrals = integrals or packet_integrals(geometry, params, field, spec)
    if order == 1:
        return PacketPropagator(1, np.diag(first_order_factor(params) * integrals.single))
    return PacketPropagator(2, second_order_factor(params) * integrals.pair)


def propagators_by_order(geometry, params, field=None, spec=None, integrals=None) -> dict:
    integrals = integrals or packet_integrals(geometry, params, field, spec)
    return {n: packet_propagator(geometry, params, n, integrals=integrals).U for n in range(3)}


def _check_orders(U_by_order: dict, max_order: int):
    available = max(U_by_order)
    if set(U_by_order) != set(range(available + 1)):
        raise ValueError(f"propagator orders must be contiguous from 0, got {sorted(U_by_order)}")
    if not 0 <= max_order <= 2 * available:
        raise ValueError(
            f"max_order={max_order} needs propagators through order {math.ceil(max_order / 2)}, "
            f"only {available} available")


def _order_pairs(U_by_order: dict, max_order: int, exact: bool):
    for p, Up in U_by_order.items():
        for q, Uq in U_by_order.items():
            if p + q == max_order or (not exact and p + q < max_order):
                yield Up, Uq


def _row_sums(U, obj: str) -> np.ndarray:
    """s[i] = sum_m U[obj i, obj' m] where obj' is taken from ``obj`` ('11', '21', ...)."""
    rows = [IDX[obj[0] + b] for b in model.BRANCHES]
    cols = [IDX[obj[1] + b] for b in model.BRANCHES]
    return U[np.ix_(rows, cols)].sum(axis=1)


@dataclass(frozen=True, eq=False)
class IdenticalResult:
    beta: AmplitudeMatrix
    diagonal_exchange: np.ndarray
    full_exchange: np.ndarray
    direct: np.ndarray


def beta_identical(U_by_order: dict, max_order: int, exact: bool = False) -> IdenticalResult:
    """Symmetrized two-particle coefficients, truncated at total order ``max_order``.

    beta[i, j] = sum_{m,k} U[1i,1m] U[2j,2k] + U[2j,1m] U[1i,2k]

    The first product is the direct term, the second the exchange term. The
    diagonal-approximation exchange keeps only m = i, k = j:
    U[2j,1i] U[1i,2j]. With ``exact=True`` only products of total order
    exactly ``max_order`` are kept.
    """
    _check_orders(U_by_order, max_order)
    direct = np.zeros((2, 2), dtype=complex)
    full_ex = np.zeros((2, 2), dtype=complex)
    diag_ex = np.zeros((2, 2), dtype=complex)
    for Up, Uq in _order_pairs(U_by_order, max_order, exact):
        direct += np.outer(_row_sums(Up, "11"), _row_sums(Uq, "22"))
        # sum_m U[2j,1m] = c_j ; sum_k U[1i,2k] = d_i
        full_ex += np.outer(_row_sums(Uq, "12"), _row_sums(Up, "21"))
        for i, bi in enumerate(model.BRANCHES):
            for j, bj in enumerate(model.BRANCHES):
                a, b = IDX["1" + bi], IDX["2" + bj]
                diag_ex[i, j] += Up[b, a] * Uq[a, b]
    beta = AmplitudeMatrix(direct + full_ex, "firstq-identical")
    return IdenticalResult(beta, diag_ex, full_ex, direct)


@dataclass(frozen=True, eq=False)
class DistinguishableResult:
    beta: AmplitudeMatrix
    exchange: np.ndarray
    row_factor: np.ndarray
    col_factor: np.ndarray

    @property
    def certificate_residual(self) -> float:
        """max |beta - row (x) col|; zero once every product order is included."""
        return float(np.max(np.abs(self.beta.entries - np.outer(self.row_factor, self.col_factor))))


def beta_distinguishable(U_by_order: dict, max_order: int, exact: bool = False) -> DistinguishableResult:
    """Coefficients for distinguishable particles: only same-particle products.

    Normalized like the identical case, beta[i, j] = 2 <1i, 2j | Psi(t)>, so
    order 0 gives beta = 1 everywhere. The exchange part is identically zero.
    """
    _check_orders(U_by_order, max_order)
    beta = np.zeros((2, 2), dtype=complex)
    for Up, Uq in _order_pairs(U_by_order, max_order, exact):
        beta += np.outer(_row_sums(Up, "11"), _row_sums(Uq, "22"))
    U_total = sum(U_by_order.values())
    return DistinguishableResult(
        AmplitudeMatrix(beta, "firstq-distinguishable"),
        np.zeros((2, 2), dtype=complex),
        _row_sums(U_total, "11"),
        _row_sums(U_total, "22"),
    )


@dataclass(frozen=True, eq=False)
class CrossFrameworkResult:
    q1_exchange: np.ndarray
    q2_diagonal_exchange: np.ndarray
    max_rel_dev: float


def cross_framework_check(geometry: SetupGeometry, params: PhysicalParams,
                          spec: QuadratureSpec | None = None, v_source: str = "quadrature",
                          field: PotentialField | None = None) -> CrossFrameworkResult:
    """Compare the first-quantization exchange with Lambda t^2 V_ij^2 at N = 1.

    Both sides consume the same ball-pair integrals.
    """
    if params.N != 1:
        raise ValueError(f"cross-framework comparison needs N = 1, got N = {params.N}")
    from .amplitudes import beta_matrix, exchange_tensor

    integrals = packet_integrals(geometry, params, field, spec, v_source)
    U = propagators_by_order(geometry, params, integrals=integrals)
    q1 = beta_identical(U, 4, exact=True).diagonal_exchange
    V = vmatrix_from_integrals(integrals.cross_object(), params, "absolute", v_source)
    q2 = beta_matrix(exchange_tensor(V, params), V, params, "diagonal").entries
    dev = float(np.max(np.abs(q1 - q2) / np.abs(q2)))
    return CrossFrameworkResult(q1, np.array(q2), dev)
