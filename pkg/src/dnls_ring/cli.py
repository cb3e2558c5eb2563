"""Batch front door: JSON config in, CSV tables out.

Exit codes: 0 success, 2 invalid config (message names the violated
invariant), 3 numerical failure (message names the failing stage). Numbers
are serialized with 17 significant digits so reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .bifurcation import (amplitude_thresholds, check_nonresonant,
                          enumerate_bifurcations)
from .continuation import (Branch, ContinuationOptions, continue_branch,
                           extrapolate_onset)
from .errors import (ConfigError, ConvergenceError, DegenerateAmplitudeError,
                     DnlsRingError, DomainError, ResonanceError)
from .lattice import LatticeConfig, Potential, make_standing_wave
from .spectral import block_data, classify_stability, full_spectrum
from .symmetry import embed_reduced
from .verify import (closure_error, integrate, invariant_drift,
                     spatial_period_error, traveling_wave_error)

COMMANDS = ("spectrum", "stability", "thresholds", "bifurcations",
            "continue", "verify", "simulate")


@dataclass
class RunConfig:
    lattice: LatticeConfig
    potential: Potential
    amplitude: Optional[float]
    sweep: Optional[tuple]          # (a_min, a_max, steps)
    mode: int
    sign: int
    options: ContinuationOptions
    dt: float
    periods: float
    t_final: Optional[float]
    perturbation: Optional[dict]
    out_dir: Path
    verify_points: int
    snapshot_stride: int


def parse_config(doc: dict, out_override: Optional[str] = None) -> RunConfig:
    try:
        lat = doc["lattice"]
        cfg = LatticeConfig(n=int(lat["n"]), m=int(lat["m"]))
    except KeyError as exc:
        raise ConfigError(f"missing lattice key: {exc}") from exc

    pot_doc = doc.get("potential", {})
    kind = pot_doc.get("kind")
    if kind in ("cubic", "saturable"):
        if "c" not in pot_doc:
            raise ConfigError(f"{kind} potential requires coefficient 'c'")
        pot = Potential(kind, (float(pot_doc["c"]),))
    elif kind == "polynomial":
        if "coefficients" not in pot_doc:
            raise ConfigError("polynomial potential requires 'coefficients'")
        pot = Potential.polynomial(pot_doc["coefficients"])
    else:
        raise ConfigError(f"unknown potential kind {kind!r}")

    amplitude = doc.get("amplitude")
    sweep_doc = doc.get("sweep")
    sweep = None
    if sweep_doc is not None:
        sweep = (float(sweep_doc["a_min"]), float(sweep_doc["a_max"]),
                 int(sweep_doc["steps"]))
        if sweep[2] < 2 or sweep[0] < 0 or sweep[1] <= sweep[0]:
            raise ConfigError("sweep requires 0 <= a_min < a_max and steps >= 2")
    if amplitude is not None and amplitude < 0:
        raise ConfigError(f"amplitude must be nonnegative, got {amplitude}")

    sign_str = str(doc.get("sign", "+"))
    if sign_str not in ("+", "-"):
        raise ConfigError(f"sign must be '+' or '-', got {sign_str!r}")

    cont = doc.get("continuation", {})
    try:
        options = ContinuationOptions(**cont)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid continuation options: {exc}") from exc

    integ = doc.get("integration", {})
    out_dir = Path(out_override or doc.get("output_dir", "."))
    return RunConfig(
        lattice=cfg,
        potential=pot,
        amplitude=None if amplitude is None else float(amplitude),
        sweep=sweep,
        mode=int(doc.get("mode", 1)),
        sign=+1 if sign_str == "+" else -1,
        options=options,
        dt=float(integ.get("dt", 1e-3)),
        periods=float(integ.get("periods", 1.0)),
        t_final=None if integ.get("t_final") is None else float(integ["t_final"]),
        perturbation=doc.get("perturbation"),
        out_dir=out_dir,
        verify_points=int(doc.get("verify_points", 5)),
        snapshot_stride=int(doc.get("snapshot_stride", 10)),
    )


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return f"{float(x):.17g}"


def write_csv(path: Path, header: list, rows: list) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def read_csv(path) -> tuple:
    """(header, rows-of-strings) for any table emitted by this module."""
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        return header, list(r)


def _require_amplitude(config: RunConfig) -> float:
    if config.amplitude is None:
        raise ConfigError("this command requires a scalar 'amplitude'")
    return config.amplitude


def _amplitudes(config: RunConfig) -> np.ndarray:
    if config.sweep is not None:
        a0, a1, steps = config.sweep
        return np.linspace(a0, a1, steps)
    return np.array([_require_amplitude(config)])


def cmd_spectrum(config: RunConfig) -> None:
    cfg, pot = config.lattice, config.potential
    a = _require_amplitude(config)
    rows = []
    for k in range(1, cfg.n + 1):
        bd = block_data(cfg, pot, a, k)
        rows.append([k, bd.alpha, bd.beta, bd.phi, bd.gamma,
                     bd.nu_plus.real, bd.nu_plus.imag,
                     bd.nu_minus.real, bd.nu_minus.imag])
    write_csv(config.out_dir / "spectrum.csv",
              ["k", "alpha", "beta", "phi", "gamma",
               "nu_plus_re", "nu_plus_im", "nu_minus_re", "nu_minus_im"], rows)
    eig = full_spectrum(cfg, pot, a)
    order = np.lexsort((eig.imag, eig.real))
    write_csv(config.out_dir / "eigenvalues.csv", ["re", "im"],
              [[v.real, v.imag] for v in eig[order]])


def cmd_stability(config: RunConfig) -> None:
    cfg, pot = config.lattice, config.potential
    rows = []
    for a in _amplitudes(config):
        v = classify_stability(cfg, pot, float(a))
        rows.append([a, v.sigma, v.stable, v.covered, v.phi_1,
                     v.max_real_part, v.empirical_stable])
    write_csv(config.out_dir / "stability.csv",
              ["a", "sigma", "stable", "covered", "phi_1",
               "max_real_part", "empirical_stable"], rows)


def cmd_thresholds(config: RunConfig) -> None:
    cfg, pot = config.lattice, config.potential
    rows = []
    for k in range(1, cfg.n):
        th = amplitude_thresholds(cfg, pot, k)
        rows.append([k, th.a_hopf, th.a_gamma])
    write_csv(config.out_dir / "thresholds.csv", ["k", "a_hopf", "a_gamma"], rows)


def _flag_string(p) -> str:
    parts = [f"1:{r.l}_with_nu_{r.j}{'+' if r.jsign > 0 else '-'}"
             for r in p.resonances]
    return ";".join(parts)


def cmd_bifurcations(config: RunConfig) -> None:
    cfg, pot = config.lattice, config.potential
    a = _require_amplitude(config)
    points = enumerate_bifurcations(cfg, pot, a)
    res = check_nonresonant(cfg, pot, a)
    rows = [[p.k, "+" if p.sign > 0 else "-", p.nu_onset, p.regime,
             p.near_degenerate, p.suppressed, _flag_string(p)] for p in points]
    for k in res.one_to_one:
        rows.append([k, "", "", "hopf", "", "", "1:1"])
    write_csv(config.out_dir / "bifurcations.csv",
              ["k", "sign", "nu_onset", "regime", "near_degenerate",
               "suppressed", "flags"], rows)


def _run_branch(config: RunConfig) -> tuple:
    cfg, pot = config.lattice, config.potential
    a = _require_amplitude(config)
    sw = make_standing_wave(cfg, pot, a)
    points = enumerate_bifurcations(cfg, pot, a)
    match = [p for p in points if p.k == config.mode and p.sign == config.sign]
    if not match:
        raise ConfigError(
            f"no bifurcation onset for mode k={config.mode} "
            f"sign={'+' if config.sign > 0 else '-'} at a={a:g}")
    branch = continue_branch(cfg, pot, sw, match[0], config.options)
    return sw, branch


def _sign_char(sign: int) -> str:
    return "+" if sign > 0 else "-"


def cmd_continue(config: RunConfig) -> None:
    _, branch = _run_branch(config)
    k, sgn = config.mode, _sign_char(config.sign)
    rows = []
    for i, pt in enumerate(branch.points):
        rows.append([i, pt.nu, pt.amplitude, pt.residual_norm,
                     pt.profile.cos_a[0], pt.profile.cos_a[1],
                     pt.profile.sin_b[0]])
    write_csv(config.out_dir / f"branch_k{k}{sgn}.csv",
              ["step", "nu", "amplitude", "residual_norm", "a0", "a1", "b1"],
              rows)
    snaps = set(range(0, len(branch.points), config.snapshot_stride))
    snaps.add(len(branch.points) - 1)
    for i in sorted(snaps):
        prof = branch.points[i].profile
        prows = [[0, prof.cos_a[0], 0.0]]
        for l in range(1, prof.nh + 1):
            prows.append([l, prof.cos_a[l], prof.sin_b[l - 1]])
        write_csv(config.out_dir / f"profile_step{i}.csv",
                  ["l", "a_l", "b_l"], prows)
    print(f"branch k={k}{sgn}: {len(branch.points)} points, "
          f"termination={branch.termination}, "
          f"onset extrapolation={extrapolate_onset(branch):.9g}")


def cmd_verify(config: RunConfig) -> None:
    cfg, pot = config.lattice, config.potential
    sw, branch = _run_branch(config)
    k = config.mode
    rows = []
    for i, pt in enumerate(branch.points[: config.verify_points]):
        loop = embed_reduced(pt.profile, cfg)
        u0 = sw.equilibrium + loop.sample(0.0)[0].ravel()
        T = config.periods * 2.0 * np.pi / pt.nu
        traj = integrate(cfg, pot, sw.omega, u0, config.dt, T)
        dH, dP = invariant_drift(traj, cfg, pot, sw.omega)
        tw = traveling_wave_error(traj, sw, k, pt.nu)
        sp = spatial_period_error(traj, cfg, k, pt.nu) if cfg.n % k == 0 else None
        rows.append([i, pt.nu, closure_error(traj), dH, dP, tw, sp])
    write_csv(config.out_dir / "verify.csv",
              ["step", "nu", "closure", "dH", "dP",
               "traveling_wave_error", "spatial_period_error"], rows)


def cmd_simulate(config: RunConfig) -> None:
    cfg, pot = config.lattice, config.potential
    a = _require_amplitude(config)
    sw = make_standing_wave(cfg, pot, a)
    u0 = sw.equilibrium.copy()
    if config.perturbation:
        rng = np.random.default_rng(int(config.perturbation.get("seed", 0)))
        u0 = u0 + float(config.perturbation.get("scale", 0.0)) \
            * rng.standard_normal(len(u0))
    if config.t_final is None:
        raise ConfigError("simulate requires integration.t_final")
    traj = integrate(cfg, pot, sw.omega, u0, config.dt, config.t_final)
    header = ["t"]
    for j in range(cfg.n):
        header += [f"s{j}_re", f"s{j}_im"]
    rows = [[t, *u] for t, u in zip(traj.times, traj.states)]
    write_csv(config.out_dir / "trajectory.csv", header, rows)


def dispatch(command: str, config: RunConfig) -> int:
    """Run one subcommand against a parsed config; returns the exit code."""
    handlers = {
        "spectrum": cmd_spectrum,
        "stability": cmd_stability,
        "thresholds": cmd_thresholds,
        "bifurcations": cmd_bifurcations,
        "continue": cmd_continue,
        "verify": cmd_verify,
        "simulate": cmd_simulate,
    }
    try:
        handlers[command](config)
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, ResonanceError, DegenerateAmplitudeError,
            DomainError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure in '{command}': {exc}", file=sys.stderr)
        return 3
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dnls-ring",
        description="Standing-wave spectra, stability and traveling-wave "
                    "branches of the periodic discrete NLS lattice.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="JSON config document")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--k", type=int, default=None, help="mode override")
    parser.add_argument("--sign", choices=["+", "-"], default=None,
                        help="onset sign override")
    args = parser.parse_args(argv)
    try:
        with open(args.config) as fh:
            doc = json.load(fh)
        config = parse_config(doc, out_override=args.out)
        if args.k is not None:
            config = replace(config, mode=args.k)
        if args.sign is not None:
            config = replace(config, sign=+1 if args.sign == "+" else -1)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 2
    return dispatch(args.command, config)


if __name__ == "__main__":
    sys.exit(main())
