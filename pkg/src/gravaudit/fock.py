"""Truncated bosonic Fock space for a charged scalar on a discrete momentum grid.

Modes are ordered (a_1 .. a_D, b_1 .. b_D): particles then antiparticles.
Units are natural (hbar = c = 1) throughout this module.

The one-particle Hamiltonian is block diagonal, h1 = diag(Omega + A, Omega + B),
and its second quantization dGamma(h1) maps Hartree states to Hartree states.
The optional pair kernel C adds a^dag C b^dag + b C^dag a, which conserves the
charge Q = N_a - N_b but not the total number N = N_a + N_b.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp

MAX_BASIS = 10_000
HERMITIAN_RTOL = 1e-12


class InputConsistencyError(ValueError):
    """Kernels built from the supplied potential are not Hermitian."""


class TruncationError(ValueError):
    """The occupation cutoff is too small for the requested dynamics."""


class IntegrationError(ArithmeticError):
    """Evolution failed to preserve the norm."""


@dataclass(frozen=True, eq=False)
class ModeGrid:
    momenta: np.ndarray
    m: float = 1.0

    def __post_init__(self):
        p = np.array(self.momenta, dtype=float).ravel()
        if len(np.unique(p)) != len(p):
            raise ValueError("momenta must be distinct")
        if not self.m > 0:
            raise ValueError("mass must be > 0")
        p.setflags(write=False)
        object.__setattr__(self, "momenta", p)

    @property
    def D(self) -> int:
        return len(self.momenta)

    @property
    def energies(self) -> np.ndarray:
        return np.sqrt(self.momenta**2 + self.m**2)

    @classmethod
    def symmetric(cls, D: int, p_max: float, m: float = 1.0) -> "ModeGrid":
        return cls(np.linspace(-p_max, p_max, D), m)


@dataclass(frozen=True, eq=False)
class QuadHamiltonian:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    energies: np.ndarray
    E0: float = 0.0

    def __post_init__(self):
        for name in ("A", "B", "C"):
            object.__setattr__(self, name, np.array(getattr(self, name), dtype=complex))
        object.__setattr__(self, "energies", np.array(self.energies, dtype=float))
        D = len(self.energies)
        if any(getattr(self, n).shape != (D, D) for n in ("A", "B", "C")):
            raise ValueError(f"A, B and C must all be {D}x{D}")

    @property
    def D(self) -> int:
        return len(self.energies)

    @property
    def has_pairs(self) -> bool:
        return bool(np.any(self.C != 0))

    def one_particle(self) -> np.ndarray:
        """h1 = diag(Omega + A, Omega + B) on the 2D-dimensional one-particle space."""
        omega = np.diag(self.energies).astype(complex)
        return scipy.linalg.block_diag(omega + self.A, omega + self.B)

    def without_pairs(self) -> "QuadHamiltonian":
        return QuadHamiltonian(self.A, self.B, np.zeros_like(self.C), self.energies, self.E0)


def _hermitian_defect(M: np.ndarray) -> float:
    return float(np.max(np.abs(M - M.conj().T), initial=0.0))


def build_kernels(grid: ModeGrid, phi_hat: Callable, coupling: float = 1.0) -> QuadHamiltonian:
    """Kernels of a classical potential with Fourier transform ``phi_hat``.

    A(p, q) = phi_hat(p - q) (2 E_p E_q - m^2) / sqrt(E_p E_q) / (2 pi)^3
    B(p, q) = phi_hat(q - p) (2 E_p E_q - m^2) / sqrt(E_p E_q) / (2 pi)^3
    C(p, q) = -phi_hat(p + q) (2 E_p E_q + m^2) / sqrt(E_p E_q) / (2 pi)^3

    all at t = 0. ``phi_hat`` must satisfy phi_hat(-k) = conj(phi_hat(k)).
    """
    p, E, m = grid.momenta, grid.energies, grid.m
    EpEq = np.outer(E, E)
    root = np.sqrt(EpEq)
    norm = coupling / (2 * math.pi) ** 3
    diff = p[:, None] - p[None, :]
    phi = np.vectorize(phi_hat, otypes=[complex])
    A = norm * phi(diff) * (2 * EpEq - m**2) / root
    B = norm * phi(-diff) * (2 * EpEq - m**2) / root
    C = -norm * phi(p[:, None] + p[None, :]) * (2 * EpEq + m**2) / root
    scale = max(1.0, float(np.max(np.abs(A), initial=0.0)))
    for name, K in (("A", A), ("B", B)):
        if _hermitian_defect(K) > HERMITIAN_RTOL * scale:
            raise InputConsistencyError(
                f"kernel {name} is not Hermitian; phi_hat must satisfy phi_hat(-k) = conj(phi_hat(k))")
    return QuadHamiltonian(A, B, C, E, 0.0)


def gaussian_phi_hat(amplitude: float, width: float) -> Callable:
    """Fourier transform of a real, even Gaussian bump: amplitude * exp(-k^2 w^2 / 2)."""
    return lambda k: amplitude * math.exp(-0.5 * (k * width) ** 2)


def _occupations(n_modes: int, n_max: int):
    """All occupation tuples over ``n_modes`` with total <= n_max, lexicographic."""
    if n_modes == 0:
        yield ()
        return
    for first in range(n_max + 1):
        for rest in _occupations(n_modes - 1, n_max - first):
            yield (first,) + rest


@dataclass(frozen=True, eq=False)
class FockBasis:
    D: int
    N_max: int
    states: tuple = field(init=False)

    def __post_init__(self):
        if self.D < 1 or self.N_max < 0:
            raise ValueError("need D >= 1 and N_max >= 0")
        states = tuple(_occupations(2 * self.D, self.N_max))
        if len(states) > MAX_BASIS:
            raise TruncationError(f"basis size {len(states)} exceeds {MAX_BASIS}; lower D or N_max")
        object.__setattr__(self, "states", states)

    def __len__(self) -> int:
        return len(self.states)

    @cached_property
    def index(self) -> dict:
        return {s: n for n, s in enumerate(self.states)}

    @cached_property
    def occupation_array(self) -> np.ndarray:
        return np.array(self.states, dtype=int).reshape(len(self.states), 2 * self.D)

    @cached_property
    def raising(self) -> tuple:
        """Sparse c^dag_mode for every mode; states leaving the cutoff are dropped."""
        ops = []
        for mode in range(2 * self.D):
            rows, cols, vals = [], [], []
            for col, occ in enumerate(self.states):
                up = list(occ)
                up[mode] += 1
                row = self.index.get(tuple(up))
                if row is not None:
                    rows.append(row)
                    cols.append(col)
                    vals.append(math.sqrt(up[mode]))
            ops.append(sp.csr_matrix((vals, (rows, cols)), shape=(len(self), len(self))))
        return tuple(ops)

    def number_diagonal(self) -> np.ndarray:
        return self.occupation_array.sum(axis=1).astype(float)

    def charge_diagonal(self) -> np.ndarray:
        occ = self.occupation_array
        return (occ[:, :self.D].sum(axis=1) - occ[:, self.D:].sum(axis=1)).astype(float)

    def vacuum(self) -> "FockStateVector":
        psi = np.zeros(len(self), dtype=complex)
        psi[self.index[(0,) * (2 * self.D)]] = 1.0
        return FockStateVector(self, psi)

    def create(self, F, psi: np.ndarray) -> np.ndarray:
        """Apply A^dag(F) = sum_mode F[mode] c^dag_mode to a coefficient vector."""
        out = np.zeros(len(self), dtype=complex)
        for mode, amp in enumerate(np.asarray(F, dtype=complex)):
            if amp != 0:
                out += amp * (self.raising[mode] @ psi)
        return out


@dataclass(frozen=True, eq=False)
class FockStateVector:
    basis: FockBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        psi = np.array(self.amplitudes, dtype=complex)
        if psi.shape != (len(self.basis),):
            raise ValueError("amplitude vector does not match basis size")
        norm = np.linalg.norm(psi)
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"state is not normalized (norm {norm!r})")
        object.__setattr__(self, "amplitudes", psi)

    def expectation(self, diagonal: np.ndarray) -> float:
        return float(np.real(np.vdot(self.amplitudes, diagonal * self.amplitudes)))


def product_state(basis: FockBasis, vectors: Sequence) -> FockStateVector:
    """A^dag(F_1) ... A^dag(F_N) |0>, normalized at the end."""
    psi = basis.vacuum().amplitudes
    for F in vectors:
        if len(F) != 2 * basis.D:
            raise ValueError(f"one-particle vectors need length {2 * basis.D}")
        psi = basis.create(F, psi)
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise TruncationError("product state vanishes in this basis (N_max too small?)")
    return FockStateVector(basis, psi / norm)


def hartree_state(basis: FockBasis, F, N: int) -> FockStateVector:
    """A^dag(F)^N |0> / sqrt(N!), normalized (F normalized to 1 first)."""
    F = np.asarray(F, dtype=complex)
    return product_state(basis, [F / np.linalg.norm(F)] * N)


def second_quantize(H: QuadHamiltonian, basis: FockBasis, include_pairs: bool = True,
                    initial_number: int | None = None) -> np.ndarray:
    """Dense Fock matrix of dGamma(h1) + E0 (+ a^dag C b^dag + h.c.)."""
    if basis.D != H.D:
        raise ValueError(f"basis has D={basis.D} but Hamiltonian has D={H.D}")
    pairs = include_pairs and H.has_pairs
    if pairs and initial_number is not None and basis.N_max < initial_number + 2:
        raise TruncationError(
            f"N_max={basis.N_max} cannot hold one pair above the initial {initial_number}-quanta sector")
    h1 = H.one_particle()
    up = basis.raising
    n = len(basis)
    Hf = sp.csr_matrix((n, n), dtype=complex)
    for p in range(2 * H.D):
        for q in range(2 * H.D):
            if h1[p, q] != 0:
                Hf = Hf + h1[p, q] * (up[p] @ up[q].T)
    if pairs:
        D = H.D
        pair = sp.csr_matrix((n, n), dtype=complex)
        for p in range(D):
            for q in range(D):
                if H.C[p, q] != 0:
                    pair = pair + H.C[p, q] * (up[p] @ up[D + q])
        Hf = Hf + pair + pair.conj().T
    dense = Hf.toarray()
    dense += H.E0 * np.eye(n)
    return dense


def evolve_full(H_fock: np.ndarray, state: FockStateVector, duration: float) -> FockStateVector:
    """exp(-i H duration) |state> via the eigendecomposition of the Hermitian H."""
    scale = max(1.0, float(np.max(np.abs(H_fock), initial=0.0)))
    if _hermitian_defect(H_fock) > 1e-10 * scale:
        raise ValueError("Fock Hamiltonian is not Hermitian")
    w, v = np.linalg.eigh(H_fock)
    psi = v @ (np.exp(-1j * w * duration) * (v.conj().T @ state.amplitudes))
    drift = abs(np.linalg.norm(psi) - 1.0)
    if drift > 1e-6:
        raise IntegrationError(f"norm drift {drift:.3g} after evolution")
    return FockStateVector(state.basis, psi)


def theorem_check(H: QuadHamiltonian, F, N: int, duration: float) -> float:
    """Overlap between the evolved Hartree/product state and its one-particle prediction.

    ``F`` is one vector (Hartree state of N copies) or a sequence of N vectors
    (general symmetrized product). The many-body side uses the dense Fock
    exponential; the prediction rebuilds the state from expm(-i h1 t) F.
    """
    if H.has_pairs:
        raise ValueError("theorem_check requires C = 0 (number-conserving dynamics)")
    vectors = _as_vectors(F, N)
    basis = FockBasis(H.D, N)
    psi0 = product_state(basis, vectors)
    psi_t = evolve_full(second_quantize(H, basis), psi0, duration)
    U1 = scipy.linalg.expm(-1j * duration * H.one_particle())
    predicted = product_state(basis, [U1 @ v for v in vectors]).amplitudes
    a = psi_t.amplitudes
    # normalize inside the ratio so identical vectors give exactly 1
    return float(abs(np.vdot(predicted, a)) / math.sqrt(np.vdot(predicted, predicted).real * np.vdot(a, a).real))


def _as_vectors(F, N: int) -> list:
    F = np.asarray(F, dtype=complex)
    if F.ndim == 1:
        return [F / np.linalg.norm(F)] * N
    if F.shape[0] != N:
        raise ValueError(f"expected {N} one-particle vectors, got {F.shape[0]}")
    return [f for f in F]


def sector_split(state: FockStateVector) -> np.ndarray:
    """Coefficient matrix psi[particle configuration, antiparticle configuration]."""
    basis = state.basis
    D = basis.D
    occ = basis.occupation_array
    a_cfg = {c: n for n, c in enumerate(_occupations(D, basis.N_max))}
    M = np.zeros((len(a_cfg), len(a_cfg)), dtype=complex)
    for row, amp in zip(occ, state.amplitudes):
        M[a_cfg[tuple(row[:D])], a_cfg[tuple(row[D:])]] = amp
    return M


@dataclass(frozen=True)
class PairDemoResult:
    mean_total_number: float
    initial_total_number: float
    product_fidelity: float
    sector_entropy: float
    charge_drift: float
    top_sector_weight: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def pair_demo(H: QuadHamiltonian, duration: float, N_max: int, F=None, N: int = 0,
              top_sector_limit: float = 1e-6) -> PairDemoResult:
    """Evolve the vacuum (or the Hartree state of ``F``) with pair terms on."""
    if N_max < N + 4:
        raise TruncationError(f"N_max={N_max} must be at least N + 4 = {N + 4}")
    basis = FockBasis(H.D, N_max)
    psi0 = basis.vacuum() if N == 0 else hartree_state(basis, F, N)
    Hf = second_quantize(H, basis, initial_number=N)
    psi = evolve_full(Hf, psi0, duration)
    number, charge = basis.number_diagonal(), basis.charge_diagonal()
    top = float(np.sum(np.abs(psi.amplitudes[number == N_max]) ** 2))
    if top > top_sector_limit:
        raise TruncationError(f"weight {top:.3g} in the top sector N={N_max} exceeds {top_sector_limit:g}")
    s = np.linalg.svd(sector_split(psi), compute_uv=False)
    lam = s**2
    lam = lam[lam > 1e-300]
    entropy = float(-np.sum(lam * np.log(lam)))
    return PairDemoResult(
        mean_total_number=psi.expectation(number),
        initial_total_number=psi0.expectation(number),
        product_fidelity=float(lam.max()),
        sector_entropy=max(entropy, 0.0),
        charge_drift=abs(psi.expectation(charge) - psi0.expectation(charge)),
        top_sector_weight=top,
    )


def random_hermitian(D: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    X = rng.standard_normal((D, D)) + 1j * rng.standard_normal((D, D))
    return scale * (X + X.conj().T) / 2


def random_quad_hamiltonian(grid: ModeGrid, rng: np.random.Generator, scale: float = 1.0) -> QuadHamiltonian:
    """Random Hermitian particle block A with the antiparticle block B = A^T."""
    A = random_hermitian(grid.D, rng, scale)
    return QuadHamiltonian(A, A.T.copy(), np.zeros_like(A), grid.energies)
