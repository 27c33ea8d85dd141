"""SL(2,R) elements, the diagonal and rotation subgroups, Cartan coordinates,
and Haar-distributed sampling on the compact cells D(T) = {r^theta d^t r^psi}.

In Cartan coordinates the restriction of Haar measure to D(T) has density
proportional to sinh(2t) dt with theta and psi uniform, so sampling reduces
to one inverse-CDF draw for t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DET_TOL = 1e-10
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class GroupElement:
    """A 2x2 real matrix with determinant one (row-major entries)."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if not math.isfinite(det) or abs(det - 1.0) > DET_TOL:
            raise ValueError(f"determinant {det!r} is not 1 within {DET_TOL}")

    @classmethod
    def from_matrix(cls, m) -> "GroupElement":
        m = np.asarray(m, dtype=float)
        return cls(float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1]))

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "GroupElement":
        return GroupElement(self.d, -self.b, -self.c, self.a)


IDENTITY = GroupElement(1.0, 0.0, 0.0, 1.0)


def diag_flow(t: float) -> GroupElement:
    """diag(e^t, e^-t)."""
    if not math.isfinite(t):
        raise ValueError(f"non-finite flow time {t!r}")
    return GroupElement(math.exp(t), 0.0, 0.0, math.exp(-t))


def rotation(theta: float) -> GroupElement:
    """Counterclockwise rotation by theta."""
    if not math.isfinite(theta):
        raise ValueError(f"non-finite angle {theta!r}")
    c, s = math.cos(theta), math.sin(theta)
    return GroupElement(c, -s, s, c)


def act_on_vector(g: GroupElement, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return np.array([g.a * v[0] + g.b * v[1], g.c * v[0] + g.d * v[1]])


def act_on_vectors(g: GroupElement, vs: np.ndarray) -> np.ndarray:
    return np.asarray(vs, dtype=float) @ g.matrix.T


@dataclass(frozen=True)
class CartanCoords:
    """g = r^theta d^t r^psi with t >= 0.

    Canonical form: theta in [0, pi) when t > 0 (the theta+pi/psi+pi
    ambiguity is resolved downward); t = 0 forces psi = 0 and theta is the
    full rotation angle in [0, 2*pi).
    """

    theta: float
    t: float
    psi: float


def kak_decompose(g: GroupElement, t_tol: float = 1e-12) -> CartanCoords:
    """Cartan coordinates via the singular value decomposition."""
    u_mat, sing, vh = np.linalg.svd(g.matrix)
    if np.linalg.det(u_mat) < 0.0:
        # Flip a reflection pair; the product is unchanged since the
        # singular-value matrix commutes with diag(1, -1).
        u_mat = u_mat @ np.diag([1.0, -1.0])
        vh = np.diag([1.0, -1.0]) @ vh
    t = math.log(float(sing[0]))
    if t <= t_tol:
        angle = math.atan2(g.c, g.a) % TWO_PI
        return CartanCoords(theta=angle, t=0.0, psi=0.0)
    theta = math.atan2(float(u_mat[1, 0]), float(u_mat[0, 0])) % TWO_PI
    psi = math.atan2(float(vh[1, 0]), float(vh[0, 0])) % TWO_PI
    if theta >= math.pi:
        theta -= math.pi
        psi = (psi + math.pi) % TWO_PI
    return CartanCoords(theta=theta, t=t, psi=psi)


def kak_compose(coords: CartanCoords) -> GroupElement:
    return rotation(coords.theta) @ diag_flow(coords.t) @ rotation(coords.psi)


def cartan_t_inverse_cdf(u: float, T: float) -> float:
    """Quantile of the density proportional to sinh(2t) on [0, T]."""
    return 0.5 * math.acosh(1.0 + u * (math.cosh(2.0 * T) - 1.0))


@dataclass(frozen=True)
class HaarSampler:
    """Deterministic Haar-distributed draws from D(T).

    Draw i depends only on (seed, i), so any partition of indices across
    workers reproduces the same elements.
    """

    T: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not self.T > 0.0:
            raise ValueError(f"need T > 0, got {self.T}")

    def _rng(self, index: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence((int(self.seed), int(index))))

    def coords(self, index: int) -> CartanCoords:
        rng = self._rng(index)
        theta = rng.uniform(0.0, TWO_PI)
        u = rng.uniform()
        psi = rng.uniform(0.0, TWO_PI)
        return CartanCoords(theta=theta, t=cartan_t_inverse_cdf(u, self.T), psi=psi)

    def sample(self, index: int) -> GroupElement:
        return kak_compose(self.coords(index))

    def sample_batch(self, n: int, start_index: int = 0) -> list[GroupElement]:
        return [self.sample(start_index + i) for i in range(n)]
