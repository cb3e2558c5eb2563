"""Ring lattice of coupled nonlinear Schrodinger sites.

Complex site amplitudes u_j are stored as adjacent (Re, Im) pairs in a flat
real vector of length 2n, sites indexed 0..n-1 with all neighbor sums mod n.
Multiplication by i corresponds to the symplectic matrix J; the pair
(J-convention, sign of the rotating-frame vector field) is pinned once here
and self-tested at import.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError

J2 = np.array([[0.0, -1.0], [1.0, 0.0]])
R2 = np.array([[1.0, 0.0], [0.0, -1.0]])
I2 = np.eye(2)


def rot(theta: float) -> np.ndarray:
    """Planar rotation e^{theta J}."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class LatticeConfig:
    """Ring of n sites with integer wavenumber m, normalized to 0 <= m <= n/2.

    Configurations with 4m = n are rejected: the quantities built from
    cos(m*zeta) degenerate there.
    """

    n: int
    m: int

    def __post_init__(self):
        if self.n < 3:
            raise ConfigError(f"need at least 3 sites, got n={self.n}")
        m = self.m % self.n
        if 2 * m > self.n:
            m = self.n - m
        object.__setattr__(self, "m", m)
        if 4 * m == self.n:
            raise ConfigError("m=n/4 excluded")

    @property
    def zeta(self) -> float:
        return 2.0 * np.pi / self.n


@dataclass(frozen=True)
class Potential:
    """On-site potential V(s) of the squared amplitude s = |u_j|^2.

    kinds:
        cubic       V(s) = c s^2 / 2          (c > 0 focusing, c < 0 defocusing)
        saturable   V(s) = c ln(1 + s), s > -1
        polynomial  V(s) = sum coeffs[i] s^i  (ascending powers)
    """

    kind: str
    params: tuple = field(default=())

    @classmethod
    def cubic(cls, c: float) -> "Potential":
        return cls("cubic", (float(c),))

    @classmethod
    def saturable(cls, c: float) -> "Potential":
        return cls("saturable", (float(c),))

    @classmethod
    def polynomial(cls, coeffs) -> "Potential":
        return cls("polynomial", tuple(float(c) for c in coeffs))

    def __call__(self, s, order: int = 0):
        """Evaluate V, V' or V'' at s (scalar or array)."""
        if order not in (0, 1, 2):
            raise ValueError(f"order must be 0, 1 or 2, got {order}")
        s = np.asarray(s, dtype=float)
        if self.kind == "cubic":
            c = self.params[0]
            if order == 0:
                out = 0.5 * c * s * s
            elif order == 1:
                out = c * s
            else:
                out = np.full_like(s, c)
        elif self.kind == "saturable":
            c = self.params[0]
            if np.any(s <= -1.0):
                raise DomainError("saturable potential requires s > -1")
            if order == 0:
                out = c * np.log1p(s)
            elif order == 1:
                out = c / (1.0 + s)
            else:
                out = -c / (1.0 + s) ** 2
        elif self.kind == "polynomial":
            coeffs = np.array(self.params, dtype=float)
            for _ in range(order):
                coeffs = np.polynomial.polynomial.polyder(coeffs)
            out = np.polynomial.polynomial.polyval(s, coeffs)
        else:
            raise ConfigError(f"unknown potential kind {self.kind!r}")
        return out if out.ndim else float(out)


def potential_derivatives(pot: Potential, s, order: int = 0):
    """Functional form of Potential.__call__ (V, V' or V'' at s)."""
    return pot(s, order)


@dataclass(frozen=True)
class StandingWave:
    """Plane-wave relative equilibrium: amplitude a, frequency omega, and the
    rotating-frame fixed point a_j = a e^{j m zeta J} e_1 stacked into 2n reals."""

    a: float
    omega: float
    equilibrium: np.ndarray


def make_standing_wave(cfg: LatticeConfig, pot: Potential, a: float) -> StandingWave:
    """Standing wave of amplitude a >= 0 with omega = 4 sin^2(m zeta/2) - V'(a^2)."""
    if a < 0:
        raise ConfigError(f"amplitude must be nonnegative, got {a}")
    omega = 4.0 * np.sin(cfg.m * cfg.zeta / 2.0) ** 2 - pot(a * a, 1)
    j = np.arange(cfg.n)
    ang = j * cfg.m * cfg.zeta
    eq = np.empty((cfg.n, 2))
    eq[:, 0] = a * np.cos(ang)
    eq[:, 1] = a * np.sin(ang)
    return StandingWave(a=float(a), omega=float(omega), equilibrium=eq.ravel())


def _sites(u: np.ndarray, n: int) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    return u.reshape(u.shape[:-1] + (n, 2))


def hamiltonian(cfg: LatticeConfig, pot: Potential, omega: float, u) -> float:
    """H(u) = (1/2) sum_j { V(|u_j|^2) + omega |u_j|^2 - |u_{j+1} - u_j|^2 }."""
    x = _sites(u, cfg.n)
    s = (x * x).sum(axis=-1)
    diff = np.roll(x, -1, axis=-2) - x
    val = 0.5 * (pot(s, 0) + omega * s - (diff * diff).sum(axis=-1)).sum(axis=-1)
    return float(val) if np.ndim(val) == 0 else val

def gradient(cfg: LatticeConfig, pot: Potential, omega: float, u) -> np.ndarray:
    """grad H(u); vanishes at every standing-wave equilibrium. Supports batched
    leading axes (shape (..., 2n))."""
    x = _sites(u, cfg.n)
    s = (x * x).sum(axis=-1)
    vp = np.asarray(pot(s, 1))
    lap = np.roll(x, -1, axis=-2) + np.roll(x, 1, axis=-2) - 2.0 * x
    g = (omega + vp)[..., None] * x + lap
    return g.reshape(np.shape(u))


def apply_symplectic(u, n: int) -> np.ndarray:
    """Blockwise J u: (x, y) -> (-y, x) per site, the real form of i*u."""
    x = _sites(u, n)
    out = np.empty_like(x)
    out[..., 0] = -x[..., 1]
    out[..., 1] = x[..., 0]
    return out.reshape(np.shape(u))


def rotating_rhs(cfg: LatticeConfig, pot: Potential, omega: float, u) -> np.ndarray:
    """udot with J udot = grad H(u), i.e. udot = -J grad H(u)."""
    return -apply_symplectic(gradient(cfg, pot, omega, u), cfg.n)


def hessian(cfg: LatticeConfig, pot: Potential, omega: float, u) -> np.ndarray:
    """D^2 H(u) as a dense symmetric 2n x 2n matrix (general state)."""
    n = cfg.n
    x = _sites(u, n)
    s = (x * x).sum(axis=-1)
    vp = np.asarray(pot(s, 1))
    vpp = np.asarray(pot(s, 2))
    H = np.zeros((2 * n, 2 * n))
    for j in range(n):
        blk = (omega - 2.0 + vp[j]) * I2 + 2.0 * vpp[j] * np.outer(x[j], x[j])
        H[2 * j:2 * j + 2, 2 * j:2 * j + 2] = blk
        jp, jm = (j + 1) % n, (j - 1) % n
        H[2 * j:2 * j + 2, 2 * jp:2 * jp + 2] += I2
        H[2 * j:2 * j + 2, 2 * jm:2 * jm + 2] += I2
    return H


def hessian_at_equilibrium(cfg: LatticeConfig, pot: Potential, a: float) -> np.ndarray:
    """D^2 H(a_m): block circulant, identity off-diagonal blocks and diagonal
    blocks -2 cos(m zeta) I + 2 a^2 V''(a^2) e^{jm zeta J} e1 e1^T e^{-jm zeta J}."""
    n, m, zeta = cfg.n, cfg.m, cfg.zeta
    d = 2.0 * a * a * pot(a * a, 2)
    e11 = np.diag([1.0, 0.0])
    H = np.zeros((2 * n, 2 * n))
    for j in range(n):
        Rj = rot(j * m * zeta)
        H[2 * j:2 * j + 2, 2 * j:2 * j + 2] = (
            -2.0 * np.cos(m * zeta) * I2 + d * (Rj @ e11 @ Rj.T)
        )
        jp, jm_ = (j + 1) % n, (j - 1) % n
        H[2 * j:2 * j + 2, 2 * jp:2 * jp + 2] += I2
        H[2 * j:2 * j + 2, 2 * jm_:2 * jm_ + 2] += I2
    return H


def symplectic_matrix(n: int) -> np.ndarray:
    """Block diagonal diag(J, ..., J) of size 2n."""
    return np.kron(np.eye(n), J2)


def phase_rotate(u, theta: float, n: int) -> np.ndarray:
    """Simultaneous phase rotation e^{theta J} applied to every site."""
    x = _sites(u, n)
    return (x @ rot(theta).T).reshape(np.shape(u))


def site_shift(u, s: int, n: int) -> np.ndarray:
    """Cyclic permutation of site blocks: site j takes the value of site j+s."""
    x = _sites(u, n)
    return np.roll(x, -s, axis=-2).reshape(np.shape(u))


def _startup_sign_check() -> None:
    # Pins the sign convention: the linearization of rotating_rhs at the
    # equilibrium must equal -J D^2H(a_m) (finite differences, tiny case).
    cfg = LatticeConfig(n=3, m=0)
    pot = Potential.cubic(1.0)
    sw = make_standing_wave(cfg, pot, 0.3)
    h = 1e-6
    dim = 2 * cfg.n
    fd = np.empty((dim, dim))
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = h
        fd[:, i] = (
            rotating_rhs(cfg, pot, sw.omega, sw.equilibrium + e)
            - rotating_rhs(cfg, pot, sw.omega, sw.equilibrium - e)
        ) / (2.0 * h)
    target = -symplectic_matrix(cfg.n) @ hessian_at_equilibrium(cfg, pot, sw.a)
    if np.abs(fd - target).max() > 1e-4:
        raise RuntimeError("sign convention self-test failed: Drhs(a_m) != -J D2H(a_m)")


_startup_sign_check()
