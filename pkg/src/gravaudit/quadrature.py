"""Six-dimensional ball-pair Coulomb integrals.

    I = int_A int_B f(x) g(y) / |x - y| d^3x d^3y

for two non-overlapping balls, by a deterministic spherical product rule
(Gauss-Legendre in radius and cos(polar angle), trapezoid in azimuth) and by
an independent uniform-sampling Monte Carlo estimator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .model import NumericalError

METHODS = ("gauss-product", "monte-carlo")
_MC_CHUNK = 1 << 16
_ROW_BLOCK = 2048


class DomainError(ValueError):
    """Balls overlap, so the 1/|x - y| kernel is singular inside the domain."""


class Ball(NamedTuple):
    center: np.ndarray
    radius: float

    @property
    def volume(self) -> float:
        return 4.0 / 3.0 * math.pi * self.radius**3


@dataclass(frozen=True)
class QuadratureSpec:
    method: str = "gauss-product"
    radial_nodes: int = 12
    angular_nodes: int = 12
    mc_samples: int = 10**6
    rng_seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.radial_nodes < 2 or self.angular_nodes < 2:
            raise ValueError("radial_nodes and angular_nodes must be >= 2")
        if self.method == "monte-carlo" and self.mc_samples < 1000:
            raise ValueError("mc_samples must be >= 1000 for the monte-carlo method")
        if not 0 <= self.rng_seed < 2**64:
            raise ValueError("rng_seed must be a 64-bit unsigned integer")


def _as_ball(ball) -> Ball:
    center, radius = ball
    return Ball(np.asarray(center, dtype=float), float(radius))


def _check_disjoint(a: Ball, b: Ball) -> float:
    d = float(np.linalg.norm(a.center - b.center))
    if d <= a.radius + b.radius:
        raise DomainError(
            f"balls overlap: center distance {d:.6g} <= sum of radii {a.radius + b.radius:.6g}")
    return d


def _checked_values(func: Callable, points: np.ndarray, name: str) -> np.ndarray:
    values = np.broadcast_to(np.asarray(func(points), dtype=float), points.shape[:1])
    bad = ~np.isfinite(values)
    if bad.any():
        where = points[np.argmax(bad)]
        raise NumericalError(f"non-finite integrand {name} at x = {where.tolist()}")
    return values


def ball_nodes(ball, radial_nodes: int = 12, angular_nodes: int = 12):
    """Product-rule points (n, 3) and weights (n,) integrating over a ball."""
    ball = _as_ball(ball)
    R = ball.radius
    x, wx = np.polynomial.legendre.leggauss(radial_nodes)
    r, wr = 0.5 * R * (x + 1), 0.5 * R * wx * (0.5 * R * (x + 1)) ** 2
    u, wu = np.polynomial.legendre.leggauss(angular_nodes)
    phi = 2 * math.pi * np.arange(angular_nodes) / angular_nodes
    wphi = np.full(angular_nodes, 2 * math.pi / angular_nodes)

    rr, uu, pp = np.meshgrid(r, u, phi, indexing="ij")
    s = np.sqrt(1 - uu**2)
    pts = np.stack([rr * s * np.cos(pp), rr * s * np.sin(pp), rr * uu], axis=-1)
    w = wr[:, None, None] * wu[None, :, None] * wphi[None, None, :]
    return pts.reshape(-1, 3) + ball.center, w.ravel()


def ball_integral(f: Callable, ball, spec: QuadratureSpec | None = None) -> float:
    """int_ball f(x) d^3x with the same product rule."""
    spec = spec or QuadratureSpec()
    pts, w = ball_nodes(ball, spec.radial_nodes, spec.angular_nodes)
    return math.fsum(w * _checked_values(f, pts, "f"))


def ball_pair_coulomb(f: Callable, g: Callable, ballA, ballB,
                      spec: QuadratureSpec | None = None) -> float:
    """Coulomb interaction integral of ``f`` on ``ballA`` with ``g`` on ``ballB``.

    ``f`` and ``g`` take an (n, 3) array of points and return n values. With
    ``spec.method == "monte-carlo"`` this returns the Monte Carlo estimate.
    """
    spec = spec or QuadratureSpec()
    A, B = _as_ball(ballA), _as_ball(ballB)
    _check_disjoint(A, B)
    if spec.method == "monte-carlo":
        return mc_oracle(f, g, A, B, spec)[0]

    xa, wa = ball_nodes(A, spec.radial_nodes, spec.angular_nodes)
    xb, wb = ball_nodes(B, spec.radial_nodes, spec.angular_nodes)
    fa = wa * _checked_values(f, xa, "f")
    gb = wb * _checked_values(g, xb, "g")
    partial = []
    for start in range(0, len(xa), _ROW_BLOCK):
        block = xa[start:start + _ROW_BLOCK]
        dist = np.sqrt(((block[:, None, :] - xb[None, :, :]) ** 2).sum(axis=-1))
        partial.append(fa[start:start + _ROW_BLOCK] * ((1.0 / dist) @ gb))
    return math.fsum(np.concatenate(partial))


def _uniform_in_ball(rng: np.random.Generator, ball: Ball, n: int) -> np.ndarray:
    direction = rng.standard_normal((n, 3))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    radius = ball.radius * rng.random(n) ** (1.0 / 3.0)
    return ball.center + direction * radius[:, None]


def mc_oracle(f: Callable, g: Callable, ballA, ballB,
              spec: QuadratureSpec | None = None) -> tuple[float, float]:
    """Monte Carlo estimate and standard error of the ball-pair integral.

    Sample pairs (x, y) are uniform in A x B. Chunk ``k`` draws from a Philox
    stream keyed by (rng_seed, k), so the result does not depend on how
    chunks are scheduled.
    """
    spec = spec or QuadratureSpec(method="monte-carlo")
    A, B = _as_ball(ballA), _as_ball(ballB)
    _check_disjoint(A, B)
    n_total = int(spec.mc_samples)
    scale = A.volume * B.volume
    sums, squares = [], []
    for k, start in enumerate(range(0, n_total, _MC_CHUNK)):
        n = min(_MC_CHUNK, n_total - start)
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([spec.rng_seed, k])))
        x = _uniform_in_ball(rng, A, n)
        y = _uniform_in_ball(rng, B, n)
        sample = scale * _checked_values(f, x, "f") * _checked_values(g, y, "g")
        sample = sample / np.linalg.norm(x - y, axis=1)
        sums.append(math.fsum(sample))
        squares.append(math.fsum(sample * sample))
    mean = math.fsum(sums) / n_total
    var = max(math.fsum(squares) / n_total - mean * mean, 0.0) * n_total / (n_total - 1)
    return mean, math.sqrt(var / n_total)


def ball_self_coulomb(profile: Callable, radius: float, nodes: int = 24) -> float:
    """int_B int_B rho(|x|) rho(|y|) / |x - y| for a radial density on one ball.

    Uses the shell theorem: the potential of a radial density at radius r is
    4 pi [ (1/r) int_0^r rho s^2 ds + int_r^R rho s ds ], so the singular 6-D
    integral reduces to nested 1-D Gauss rules (exact for polynomial rho of
    modest degree).
    """
    x, w = np.polynomial.legendre.leggauss(nodes)

    def on(a, b):
        half = 0.5 * (b - a)
        return a + half * (x + 1), half * w

    outer_r, outer_w = on(0.0, radius)
    total = []
    for r, wr in zip(outer_r, outer_w):
        s_in, w_in = on(0.0, r)
        s_out, w_out = on(r, radius)
        inner = np.dot(w_in, profile(s_in) * s_in**2) / r
        shell = np.dot(w_out, profile(s_out) * s_out)
        psi = 4 * math.pi * (inner + shell)
        total.append(wr * 4 * math.pi * r**2 * float(profile(np.array([r]))[0]) * psi)
    return math.fsum(total)
