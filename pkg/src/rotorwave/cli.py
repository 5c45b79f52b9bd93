"""Command-line interface: optimize, design, propagate, sweep, angular.

Exit codes: 0 success, 2 usage error, 3 infeasible design, 4 basis
truncation, 5 file I/O.  Output files are deterministic: fixed float
formatting and no timestamps.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import magnus, observables, tdse
from .model import Molecule, RotationalBasis, builtin_molecule, load_molecule
from .optimizer import orientation_target
from .pulses import InfeasibleTargetError, PulseSequence, design_sequence, write_field_csv
from .units import UNITS

__all__ = ["main", "build_parser", "RunConfig"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_TRUNCATION = 4
EXIT_IO = 5

_OUTDIR_ENV = "ROTORWAVE_OUTDIR"


@dataclass
class RunConfig:
    """Resolved run parameters: CLI flags > config file > builtin defaults."""

    molecule: str = "LiH"
    j_max: int = 1
    t_sub_trot: float = 3.0
    spacing_factor: float = 5.0
    phi1: float | None = None  # None: realize the target phase ladder
    delta_phi: float = 0.0
    samples_per_cycle: int = 50
    sample_step_trot: float = 0.01
    extra_revivals: float = 4.0
    j_buffer: int = 8
    outdir: str | None = None
    method: str = "tdse"

    def __post_init__(self):
        if not (1 <= self.j_max <= 30):
            raise ValueError(f"j_max must lie in [1, 30], got {self.j_max}")
        for name in ("t_sub_trot", "spacing_factor", "sample_step_trot"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.samples_per_cycle < 1:
            raise ValueError("samples_per_cycle must be >= 1")
        if self.j_buffer < 0:
            raise ValueError("j_buffer must be >= 0")
        if self.method not in ("tdse", "analytic"):
            raise ValueError(f"method must be 'tdse' or 'analytic', got {self.method!r}")

    def resolve_molecule(self) -> Molecule:
        if self.molecule.endswith(".json") or os.path.sep in self.molecule:
            return load_molecule(self.molecule)
        return builtin_molecule(self.molecule)

    def resolve_outdir(self) -> Path:
        out = self.outdir or os.environ.get(_OUTDIR_ENV) or "."
        path = Path(out)
        path.mkdir(parents=True, exist_ok=True)
        return path


def _merge_config(args) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
        unknown = set(cfg) - {f.name for f in fields(RunConfig)}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        values.update(cfg)
    for f in fields(RunConfig):
        cli_val = getattr(args, f.name, None)
        if cli_val is not None:
            values[f.name] = cli_val
    return RunConfig(**values)


def _fmt(x) -> str:
    return "%.12g" % x


def _add_common(p):
    p.add_argument("--config", help="JSON file with RunConfig fields")
    p.add_argument("--molecule", help="builtin name (LiH) or molecule JSON path")
    p.add_argument("--outdir", help="output directory (env %s overrides default)" % _OUTDIR_ENV)


def _add_design_options(p):
    p.add_argument("--t-sub", dest="t_sub_trot", type=float,
                   help="subpulse duration in units of T_rot (default 3)")
    p.add_argument("--spacing", dest="spacing_factor", type=float,
                   help="center-time spacing in units of t_sub (default 5)")
    p.add_argument("--phi1", dest="phi1", type=float,
                   help="first carrier phase; default locks the target phase ladder")
    p.add_argument("--delta-phi", dest="delta_phi", type=float,
                   help="target phase-ladder increment (default 0)")


def _add_propagation_options(p):
    p.add_argument("--method", choices=("tdse", "analytic"),
                   help="propagator backend (default tdse)")
    p.add_argument("--samples-per-cycle", dest="samples_per_cycle", type=int,
                   help="time steps per fastest carrier cycle (default 50)")
    p.add_argument("--sample-step", dest="sample_step_trot", type=float,
                   help="observable sampling step in units of T_rot (default 0.01)")
    p.add_argument("--extra-revivals", dest="extra_revivals", type=float,
                   help="extra revival periods propagated past the last pulse (default 4)")
    p.add_argument("--j-buffer", dest="j_buffer", type=int,
                   help="buffer states above j_max (default 8)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rotorwave",
        description="Design and verify resonant pulse sequences for molecular orientation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_opt = sub.add_parser("optimize", help="maximum orientation and the optimal superposition")
    p_opt.add_argument("--jmax", dest="j_max", type=int, required=True)
    p_opt.add_argument("--delta-phi", dest="delta_phi", type=float)
    _add_common(p_opt)
    p_opt.set_defaults(func=cmd_optimize)

    p_des = sub.add_parser("design", help="design the resonant pulse sequence")
    p_des.add_argument("--jmax", dest="j_max", type=int, required=True)
    _add_design_options(p_des)
    _add_common(p_des)
    p_des.set_defaults(func=cmd_design)

    p_prop = sub.add_parser("propagate", help="propagate and write observable series")
    p_prop.add_argument("--pulse", help="pulse JSON produced by 'design'")
    p_prop.add_argument("--jmax", dest="j_max", type=int,
                        help="design on the fly instead of reading --pulse")
    _add_design_options(p_prop)
    _add_propagation_options(p_prop)
    _add_common(p_prop)
    p_prop.set_defaults(func=cmd_propagate)

    p_sweep = sub.add_parser("sweep", help="scan j_max values, one summary row each")
    p_sweep.add_argument("--jmax-list", required=True,
                         help="comma-separated j_max values, e.g. 1,2,5")
    _add_design_options(p_sweep)
    _add_propagation_options(p_sweep)
    _add_common(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_ang = sub.add_parser("angular", help="angular distribution of a saved state")
    p_ang.add_argument("--state", required=True, help="state JSON file")
    p_ang.add_argument("--grid", type=int, default=512, help="theta grid size (>= 64)")
    _add_common(p_ang)
    p_ang.set_defaults(func=cmd_angular)

    return parser


def cmd_optimize(args) -> int:
    cfg = _merge_config(args)
    target = orientation_target(cfg.j_max, cfg.delta_phi)
    out = cfg.resolve_outdir() / f"target_jmax{cfg.j_max}.json"
    target.save(out)
    print(f"j_max = {cfg.j_max}")
    print(f"lambda = {_fmt(target.lam)}")
    print(f"{'J':>3} {'c_J':>16} {'phi_J':>16}")
    for j, (c, phi) in enumerate(zip(target.amplitudes, target.phases)):
        print(f"{j:>3} {_fmt(c):>16} {_fmt(phi):>16}")
    print(f"target written to {out}")
    return EXIT_OK


def _design_from_config(cfg: RunConfig) -> PulseSequence:
    molecule = cfg.resolve_molecule()
    target = orientation_target(cfg.j_max, cfg.delta_phi)
    return design_sequence(
        target,
        molecule,
        t_sub=cfg.t_sub_trot * molecule.t_rot_au,
        spacing_factor=cfg.spacing_factor,
        phi_1=cfg.phi1,
    )


def cmd_design(args) -> int:
    cfg = _merge_config(args)
    seq = _design_from_config(cfg)
    outdir = cfg.resolve_outdir()
    pulse_path = outdir / f"pulse_jmax{cfg.j_max}.json"
    field_path = outdir / f"field_jmax{cfg.j_max}.csv"
    seq.save(pulse_path)
    write_field_csv(seq, field_path)
    t_rot = seq.molecule.t_rot_au
    print(f"subpulses = {len(seq)}")
    print(f"peak intensity = {_fmt(seq.peak_intensity_w_cm2)} W/cm^2")
    print(f"span: t_on = {_fmt(seq.t_on / t_rot)} T_rot, t_off = {_fmt(seq.t_off / t_rot)} T_rot")
    print(f"pulse written to {pulse_path}")
    print(f"field written to {field_path}")
    return EXIT_OK


def _propagate(cfg: RunConfig, seq: PulseSequence):
    schedule = tdse.PropagationSchedule.from_sequence(
        seq, sample_step_trot=cfg.sample_step_trot, extra_revivals=cfg.extra_revivals
    )
    if cfg.method == "analytic":
        return magnus.analytic_trajectory(seq, schedule.sample_times())
    basis = RotationalBasis(j_target=len(seq.subpulses), j_buffer=cfg.j_buffer)
    return tdse.run_experiment(
        seq, schedule, basis=basis, samples_per_cycle=cfg.samples_per_cycle
    )


def cmd_propagate(args) -> int:
    cfg = _merge_config(args)
    if args.pulse:
        seq = PulseSequence.load(args.pulse)
    elif args.j_max is not None:
        seq = _design_from_config(cfg)
    else:
        print("error: provide --pulse or --jmax", file=sys.stderr)
        return EXIT_USAGE
    traj = _propagate(cfg, seq)
    outdir = cfg.resolve_outdir()

    orient = observables.series(traj, "orientation")
    align = observables.series(traj, "alignment")
    norm = observables.series(traj, "norm")
    orient.to_csv(outdir / "orientation.csv")
    align.to_csv(outdir / "alignment.csv")
    norm.to_csv(outdir / "norm.csv")
    n_ladder = len(seq.subpulses) + 1
    for j in range(n_ladder):
        observables.series(traj, f"population:{j}").to_csv(outdir / f"population_J{j}.csv")

    peaks = observables.peak_statistics(orient, window=(seq.t_off, traj.times[-1]))
    peaks.save(outdir / "peaks.json")
    t_rot = seq.molecule.t_rot_au
    print(f"method = {cfg.method}")
    print(f"max orientation (post-pulse) = {_fmt(peaks.max_value)}")
    if peaks.spacings:
        print(
            "revival spacing = %s +/- %s T_rot"
            % (_fmt(peaks.mean_spacing / t_rot), _fmt(peaks.spacing_spread / t_rot))
        )
    print(f"series written to {outdir}")
    return EXIT_OK


def _sweep_row(cfg: RunConfig, j_max: int):
    row_cfg = RunConfig(**{**cfg.__dict__, "j_max": j_max})
    start = time.perf_counter()
    target = orientation_target(j_max, row_cfg.delta_phi)
    molecule = row_cfg.resolve_molecule()
    seq = design_sequence(
        target,
        molecule,
        t_sub=row_cfg.t_sub_trot * molecule.t_rot_au,
        spacing_factor=row_cfg.spacing_factor,
        phi_1=row_cfg.phi1,
    )
    traj = _propagate(row_cfg, seq)
    orient = observables.series(traj, "orientation")
    align = observables.series(traj, "alignment")
    post = (seq.t_off, traj.times[-1])
    peaks = observables.peak_statistics(orient, window=post)
    mask = (traj.times >= post[0]) & (traj.times <= post[1])
    out = {
        "j_max": j_max,
        "lambda_theory": target.lam,
        "max_orientation": peaks.max_value,
        "max_alignment": float(np.max(align.values[mask])),
        "peak_intensity_w_cm2": seq.peak_intensity_w_cm2,
    }
    return out, time.perf_counter() - start


def cmd_sweep(args) -> int:
    cfg = _merge_config(args)
    try:
        j_list = [int(x) for x in args.jmax_list.split(",") if x.strip()]
    except ValueError:
        print("error: --jmax-list must be comma-separated integers", file=sys.stderr)
        return EXIT_USAGE
    if not j_list:
        print("error: empty j_max list", file=sys.stderr)
        return EXIT_USAGE
    if any(not (1 <= j <= 30) for j in j_list):
        print("error: j_max values must lie in [1, 30]", file=sys.stderr)
        return EXIT_USAGE
    rows = {}
    failures = {}

    def run(j):
        try:
            rows[j], dt = _sweep_row(cfg, j)
            print(f"j_max={j}: done in {dt:.1f} s")
        except Exception as exc:  # keep partial results
            failures[j] = exc
            print(f"j_max={j}: FAILED ({exc})", file=sys.stderr)

    with ThreadPoolExecutor(max_workers=min(4, len(j_list))) as pool:
        list(pool.map(run, j_list))

    outdir = cfg.resolve_outdir()
    path = outdir / "sweep.csv"
    cols = ["j_max", "lambda_theory", "max_orientation", "max_alignment",
            "peak_intensity_w_cm2"]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(cols) + "\n")
        for j in sorted(rows):
            r = rows[j]
            fh.write(",".join("%d" % r[c] if c == "j_max" else _fmt(r[c]) for c in cols) + "\n")
    print(f"sweep written to {path}")
    if failures:
        return EXIT_TRUNCATION if any(
            isinstance(e, tdse.BasisTooSmallError) for e in failures.values()
        ) else EXIT_INFEASIBLE
    return EXIT_OK


def cmd_angular(args) -> int:
    cfg = _merge_config(args)
    coeffs, _, _ = magnus.load_state(args.state)
    dist = observables.angular_distribution(coeffs, n_grid=args.grid)
    outdir = cfg.resolve_outdir()
    path = outdir / "angular.csv"
    dist.to_csv(path)
    print(f"normalization = {_fmt(dist.normalization)}")
    print(f"forward fraction = {_fmt(dist.forward_fraction())}")
    print(f"density written to {path}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleTargetError as exc:
        print(f"error: infeasible design: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except tdse.BasisTooSmallError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: file I/O: {exc!r}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
