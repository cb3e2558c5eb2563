"""Fourier-Galerkin residual in the dihedral fixed space and pseudo-arclength
continuation of traveling-wave branches from their onsets.

The reduced unknown is the site-0 profile (cos/sin coefficients up to the
harmonic cutoff) plus the frequency nu. Time-translation symmetry is fully
quotiented by the reversibility constraint built into the profile, so the
bordered and arclength systems are square. Jacobians are forward finite
differences on the coefficients; the linearization at the trivial branch is
assembled exactly from the equilibrium Hessian.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bifurcation import BifurcationPoint
from .errors import ConvergenceError, DomainError, ResonanceError
from .lattice import (LatticeConfig, Potential, StandingWave, apply_symplectic,
                      gradient, hessian_at_equilibrium, symplectic_matrix)
from .spectral import block_data
from .symmetry import LatticeLoop, ReducedProfile, embed_reduced, project_reduced


@dataclass
class ContinuationOptions:
    n_harmonics: int = 32
    newton_tol: float = 1e-10
    max_newton_iter: int = 25
    ds0: float = 1e-2
    ds_min: float = 1e-5
    ds_max: float = 1e-1
    max_steps: int = 500
    amplitude_cap: Optional[float] = None  # defaults to 10 * a at run time
    first_step_eps: float = 1e-3
    nu_min: float = 1e-6
    fd_step: float = 1e-7

    def __post_init__(self):
        if not (0 < self.ds_min <= self.ds0 <= self.ds_max):
            raise ValueError("need 0 < ds_min <= ds0 <= ds_max")


@dataclass
class BranchPoint:
    profile: ReducedProfile
    nu: float
    amplitude: float
    residual_norm: float


@dataclass
class Branch:
    onset: BifurcationPoint
    points: list = field(default_factory=list)
    termination: str = ""


class ReducedSystem:
    """Residual evaluation machinery for one (config, potential, standing
    wave, mode k, cutoff) tuple. Collocation grid of 4 nh + 1 equispaced
    times keeps harmonics |l| <= nh alias-free under a cubic nonlinearity."""

    def __init__(self, cfg: LatticeConfig, pot: Potential, sw: StandingWave,
                 k: int, n_harmonics: int):
        self.cfg = cfg
        self.pot = pot
        self.sw = sw
        self.k = k
        self.nh = n_harmonics
        self.M = 4 * n_harmonics + 1
        self.times = 2.0 * np.pi * np.arange(self.M) / self.M
        self.dim = 2 * n_harmonics + 1

    def profile(self, pvec: np.ndarray) -> ReducedProfile:
        return ReducedProfile.from_vector(self.k, pvec)

    def residual(self, pvec: np.ndarray, nu: float) -> np.ndarray:
        """f(x; nu) = J xdot - nu^{-1} grad H(a_m + x) evaluated on the
        collocation grid and projected back to the reduced coefficients."""
        if nu <= 0:
            raise ConvergenceError("frequency left the positive domain")
        cfg, n, M = self.cfg, self.cfg.n, self.M
        loop = embed_reduced(self.profile(pvec), cfg)
        X = loop.sample(self.times)
        Xd = loop.differentiated().sample(self.times)
        U = self.sw.equilibrium.reshape(1, 2 * n) + X.reshape(M, 2 * n)
        G = gradient(cfg, self.pot, self.sw.omega, U)
        F = (apply_symplectic(Xd.reshape(M, 2 * n), n) - G / nu).reshape(M, n, 2)
        floop = LatticeLoop.from_samples(F, self.nh)
        return project_reduced(floop, self.k, cfg).as_vector()

    def jacobian(self, pvec: np.ndarray, nu: float, r0: np.ndarray,
                 fd_step: float) -> np.ndarray:
        """Forward-difference Jacobian with respect to (p, nu): (dim, dim+1)."""
        Jm = np.empty((self.dim, self.dim + 1))
        for i in range(self.dim):
            h = fd_step * max(1.0, abs(pvec[i]))
            pp = pvec.copy()
            pp[i] += h
            Jm[:, i] = (self.residual(pp, nu) - r0) / h
        h = fd_step * max(1.0, abs(nu))
        Jm[:, self.dim] = (self.residual(pvec, nu + h) - r0) / h
        return Jm

    def linearization_at_origin(self, nu: float) -> np.ndarray:
        """Exact reduced linearization at the trivial branch: coefficientwise
        il J c_l - nu^{-1} D^2H(a_m) c_l, assembled column by column."""
        H = hessian_at_equilibrium(self.cfg, self.pot, self.sw.a)
        Jbig = symplectic_matrix(self.cfg.n)
        ls = np.arange(-self.nh, self.nh + 1)
        A = np.empty((self.dim, self.dim))
        for i in range(self.dim):
            e = np.zeros(self.dim)
            e[i] = 1.0
            c = embed_reduced(self.profile(e), self.cfg).coeffs
            out = np.empty_like(c)
            for li, l in enumerate(ls):
                v = c[:, li, :].ravel()
                out[:, li, :] = (1j * l * (Jbig @ v) - (H @ v) / nu).reshape(-1, 2)
            A[:, i] = project_reduced(LatticeLoop(out), self.k, self.cfg).as_vector()
        return A


def loop_vector_field(loop: LatticeLoop, nu: float, cfg: LatticeConfig,
                      pot: Potential, sw: StandingWave,
                      out_nh: Optional[int] = None,
                      oversample: int = 8) -> LatticeLoop:
    """Full-space vector field F(x) = J xdot - nu^{-1} grad H(a_m + x) as a
    loop, via time-domain collocation. With the default oversampling the
    output is alias-free for a cubic nonlinearity."""
    nh = loop.nh
    out_nh = nh if out_nh is None else out_nh
    M = max(oversample * nh + 1, 2 * out_nh + 1)
    times = 2.0 * np.pi * np.arange(M) / M
    n = cfg.n
    X = loop.sample(times)
    Xd = loop.differentiated().sample(times)
    U = sw.equilibrium.reshape(1, 2 * n) + X.reshape(M, 2 * n)
    G = gradient(cfg, pot, sw.omega, U)
    F = (apply_symplectic(Xd.reshape(M, 2 * n), n) - G / nu).reshape(M, n, 2)
    return LatticeLoop.from_samples(F, out_nh)


def onset_kernel(cfg: LatticeConfig, pot: Potential, sw: StandingWave,
                 k: int, sign: int, n_harmonics: int = 32,
                 kernel_rtol: float = 1e-8) -> tuple:
    """Normalized null direction of the reduced linearization at
    (0, nu_k^sign); refuses resonant onsets with a non-simple kernel."""
    bd = block_data(cfg, pot, sw.a, k)
    if bd.phi is None:
        raise ValueError(f"mode k={k} has no onset frequencies (k = n)")
    if abs(bd.phi - 1.0) < 1e-9:
        raise ResonanceError(
            f"double eigenvalue at 1:1 resonance: phi_{k}(a) = 1")
    nu = bd.nu_plus if sign > 0 else bd.nu_minus
    if abs(nu.imag) > 1e-12 or nu.real <= 0:
        raise ValueError(f"onset frequency nu_{k}^{'+' if sign > 0 else '-'} "
                         f"= {nu} is not a positive real")
    nu = float(nu.real)
    sys_ = ReducedSystem(cfg, pot, sw, k, n_harmonics)
    A = sys_.linearization_at_origin(nu)
    _, svals, Vt = np.linalg.svd(A)
    small = svals < kernel_rtol * svals[0]
    dim_kernel = int(small.sum())
    if dim_kernel == 0:
        raise ConvergenceError(f"no kernel at onset nu = {nu:.12g}")
    if dim_kernel > 1:
        raise ResonanceError(
            f"kernel dimension {dim_kernel} at onset nu = {nu:.12g}: "
            "resonant onset, refusing to continue")
    tangent = Vt[-1]
    tangent = tangent / np.linalg.norm(tangent)
    if tangent[np.argmax(np.abs(tangent))] < 0:
        tangent = -tangent
    return ReducedProfile.from_vector(k, tangent), nu


def _newton(sys_: ReducedSystem, y: np.ndarray, constraint, opts) -> tuple:
    """Solve {residual(p, nu) = 0, constraint(y) = 0}; constraint returns
    (value, gradient row of length dim+1)."""
    y = y.copy()
    for _ in range(opts.max_newton_iter):
        p, nu = y[:-1], y[-1]
        r = sys_.residual(p, nu)
        cval, cgrad = constraint(y)
        rnorm = float(np.linalg.norm(r))
        if rnorm <= opts.newton_tol and abs(cval) <= opts.newton_tol:
            return y, rnorm
        Jm = sys_.jacobian(p, nu, r, opts.fd_step)
        Jfull = np.vstack([Jm, cgrad])
        try:
            delta = np.linalg.solve(Jfull, -np.concatenate([r, [cval]]))
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(f"singular bordered system: {exc}") from exc
        y = y + delta
        if y[-1] <= 0:
            raise ConvergenceError("frequency left the positive domain")
    raise ConvergenceError(
        f"Newton did not converge in {opts.max_newton_iter} iterations")


def continue_branch(cfg: LatticeConfig, pot: Potential, sw: StandingWave,
                    onset: BifurcationPoint,
                    opts: Optional[ContinuationOptions] = None) -> Branch:
    """Follow the branch emanating from (0, nu_onset). The first point steps
    off the trivial branch via a bordered system; subsequent points use a
    pseudo-arclength predictor-corrector. Terminates with a recorded reason."""
    opts = opts or ContinuationOptions()
    if onset.suppressed:
        raise ResonanceError(
            f"onset (k={onset.k}, nu={onset.nu_onset:.9g}) is 1:l resonant with "
            "a bigger frequency and is suppressed")
    tangent, nu0 = onset_kernel(cfg, pot, sw, onset.k, onset.sign,
                                opts.n_harmonics)
    if abs(nu0 - onset.nu_onset) > 1e-6 * max(1.0, abs(nu0)):
        raise ValueError("onset frequency disagrees with block data")
    sys_ = ReducedSystem(cfg, pot, sw, onset.k, opts.n_harmonics)
    tvec = tangent.as_vector()
    eps = opts.first_step_eps
    cap = opts.amplitude_cap
    if cap is None:
        cap = 10.0 * sw.a if sw.a > 0 else 1.0

    branch = Branch(onset=onset)

    def first_constraint(y):
        grad = np.concatenate([tvec, [0.0]])
        return float(y[:-1] @ tvec - eps), grad

    y0 = np.concatenate([np.zeros(sys_.dim), [nu0]])
    try:
        y, rnorm = _newton(sys_, np.concatenate([eps * tvec, [nu0]]),
                           first_constraint, opts)
    except DomainError:
        branch.termination = "domain_violation"
        return branch
    branch.points.append(BranchPoint(sys_.profile(y[:-1]), float(y[-1]),
                                     float(np.linalg.norm(y[:-1])), rnorm))
    tau = y - y0
    tau /= np.linalg.norm(tau)
    ds = opts.ds0
    branch.termination = "max_steps"
    while len(branch.points) < opts.max_steps:
        pred = y + ds * tau

        def arclength_constraint(yy, pred=pred, tau=tau):
            return float(tau @ (yy - pred)), tau

        try:
            ynew, rnorm = _newton(sys_, pred, arclength_constraint, opts)
        except DomainError:
            branch.termination = "domain_violation"
            break
        except ConvergenceError:
            ds *= 0.5
            if ds < opts.ds_min:
                branch.termination = "newton_failure"
                break
            continue
        tau = ynew - y
        tau /= np.linalg.norm(tau)
        y = ynew
        branch.points.append(BranchPoint(sys_.profile(y[:-1]), float(y[-1]),
                                         float(np.linalg.norm(y[:-1])), rnorm))
        ds = min(ds * 1.3, opts.ds_max)
        if y[-1] <= opts.nu_min:
            branch.termination = "nu_bound"
            break
        if np.linalg.norm(y[:-1]) >= cap:
            branch.termination = "amplitude_cap"
            break
    return branch


def refine_point(cfg: LatticeConfig, pot: Potential, sw: StandingWave,
                 point: BranchPoint, n_harmonics: int,
                 opts: Optional[ContinuationOptions] = None) -> tuple:
    """Re-solve an accepted point at a finer harmonic cutoff with nu held
    fixed; returns (profile, residual_norm). Used for spectral-convergence
    checks."""
    opts = opts or ContinuationOptions()
    sys_ = ReducedSystem(cfg, pot, sw, point.profile.k, n_harmonics)
    p = point.profile.padded(n_harmonics).as_vector()
    nu = point.nu
    for _ in range(opts.max_newton_iter):
        r = sys_.residual(p, nu)
        rnorm = float(np.linalg.norm(r))
        if rnorm <= opts.newton_tol:
            return sys_.profile(p), rnorm
        Jm = sys_.jacobian(p, nu, r, opts.fd_step)[:, :-1]
        p = p + np.linalg.solve(Jm, -r)
    raise ConvergenceError("refinement Newton did not converge")


def extrapolate_onset(branch: Branch) -> float:
    """Onset frequency from the amplitude -> 0 limit: quadratic-in-amplitude
    extrapolation through the first two accepted points."""
    pts = branch.points
    if len(pts) < 2:
        return pts[0].nu
    a1, a2 = pts[0].amplitude, pts[1].amplitude
    n1, n2 = pts[0].nu, pts[1].nu
    return float(n1 - a1 * a1 * (n2 - n1) / (a2 * a2 - a1 * a1))
