"""Independent verification of continued solutions by direct time
integration: implicit midpoint (symplectic, conserves the power P exactly up
to solver tolerance), periodicity closure and the traveling-wave norm
relation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .lattice import (LatticeConfig, Potential, StandingWave, hessian,
                      rotating_rhs, symplectic_matrix)


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray          # (nt, 2n)
    dt: float
    integrator: str = "implicit_midpoint"


def _midpoint_step(cfg, pot, omega, u, dt, Jbig, tol=1e-13, max_iter=50):
    # Newton on g(v) = v - u - dt f((u+v)/2), f = -J grad H.
    v = u + dt * rotating_rhs(cfg, pot, omega, u)
    I = np.eye(len(u))
    for _ in range(max_iter):
        mid = 0.5 * (u + v)
        g = v - u - dt * rotating_rhs(cfg, pot, omega, mid)
        if np.linalg.norm(g) <= tol:
            return v
        Jg = I + 0.5 * dt * (Jbig @ hessian(cfg, pot, omega, mid))
        v = v - np.linalg.solve(Jg, g)
    raise ConvergenceError("implicit midpoint solve did not converge")


def integrate(cfg: LatticeConfig, pot: Potential, omega: float,
              u0: np.ndarray, dt: float, T: float) -> Trajectory:
    """Implicit-midpoint trajectory of J udot = grad H(u) from u0 to time T.

    dt is adjusted to the nearest value dividing T evenly so the grid tiles
    the interval (required downstream for trigonometric interpolation).
    """
    if dt <= 0 or T < dt:
        raise ValueError("need dt > 0 and T >= dt")
    nsteps = max(1, int(round(T / dt)))
    dt_used = T / nsteps
    Jbig = symplectic_matrix(cfg.n)
    states = np.empty((nsteps + 1, len(u0)))
    states[0] = np.asarray(u0, dtype=float)
    for i in range(nsteps):
        states[i + 1] = _midpoint_step(cfg, pot, omega, states[i], dt_used, Jbig)
    times = dt_used * np.arange(nsteps + 1)
    return Trajectory(times=times, states=states, dt=dt_used)


def power(traj: Trajectory, n: int) -> np.ndarray:
    """P(t) = sum_j |u_j|^2 along the trajectory."""
    return (traj.states ** 2).sum(axis=1)


def invariant_drift(traj: Trajectory, cfg: LatticeConfig, pot: Potential,
                    omega: float) -> tuple:
    """Max deviation (dH, dP) of energy and power along the trajectory."""
    from .lattice import hamiltonian

    H = np.array([hamiltonian(cfg, pot, omega, u) for u in traj.states])
    P = power(traj, cfg.n)
    return float(np.abs(H - H[0]).max()), float(np.abs(P - P[0]).max())


def _norm_samples_one_period(traj: Trajectory, n: int, nu: float) -> np.ndarray:
    period = 2.0 * np.pi / nu
    npts = int(round(period / traj.dt))
    if abs(npts * traj.dt - period) > 1e-8 * period:
        raise ValueError("trajectory grid does not tile one period; "
                         "integrate with dt adjusted to the period")
    if len(traj.times) < npts + 1:
        raise ValueError("trajectory spans less than one period")
    x = traj.states[:npts].reshape(npts, n, 2)
    return np.sqrt((x * x).sum(axis=-1))       # (npts, n)


def traveling_wave_error(traj: Trajectory, sw: StandingWave, k: int,
                         nu: float) -> float:
    """sup over sites and times of | |u_{j+1}|(t) - |u_j|(t + k zeta / nu) |,
    the time shift evaluated by trigonometric interpolation. Zero for an
    exact traveling wave."""
    n = len(sw.equilibrium) // 2
    norms = _norm_samples_one_period(traj, n, nu)
    npts = norms.shape[0]
    # k zeta / nu is exactly k/n of the period, independent of nu.
    freqs = np.fft.fftfreq(npts, d=1.0 / npts)
    shift = np.exp(2j * np.pi * freqs * k / n)
    shifted = np.real(np.fft.ifft(np.fft.fft(norms, axis=0)
                                  * shift[:, None], axis=0))
    err = 0.0
    for j in range(n):
        jp = (j + 1) % n
        err = max(err, float(np.abs(norms[:, jp] - shifted[:, j]).max()))
    return err


def spatial_period_error(traj: Trajectory, cfg: LatticeConfig, k: int,
                         nu: float) -> float:
    """For k dividing n the norm pattern repeats every n/k sites; returns the
    max violation of |u_{j+n/k}|(t) = |u_j|(t)."""
    if cfg.n % k:
        raise ValueError(f"k={k} does not divide n={cfg.n}")
    norms = _norm_samples_one_period(traj, cfg.n, nu)
    p = cfg.n // k
    shifted = np.roll(norms, -p, axis=1)
    return float(np.abs(shifted - norms).max())


def closure_error(traj: Trajectory) -> float:
    """|u(T) - u(0)|: periodicity of the integrated orbit."""
    return float(np.linalg.norm(traj.states[-1] - traj.states[0]))
