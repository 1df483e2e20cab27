"""Command-line front end.

    bcsgap {solve,sweep,tc,thermo,asympt,ratio,report} CONFIG [options]

Each run writes its outputs plus a verbatim copy of the config into the
output directory. Exit status: 0 success, 2 configuration error, 3 a solve
did not converge (outputs are still written, flagged converged=false),
4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import shutil
import sys
from pathlib import Path

import numpy as np

from . import asymptotics as asy
from .config import RunConfig, load_config
from .errors import BCSError, ConfigError, StepSizeError
from .gap_solver import GapSweep, gap_rhs
from .potential import ConstantKernel
from .tc_finder import find_tc
from .thermo import (d_omega_dT_formula, entropy, omega_normal, specific_heat,
                     specific_heat_from_entropy)

log = logging.getLogger("bcsgap")

EXIT_OK, EXIT_CONFIG, EXIT_NONCONVERGED, EXIT_NUMERICAL = 0, 2, 3, 4
COMMANDS = ("solve", "sweep", "tc", "thermo", "asympt", "ratio", "report")


def fmt(value) -> str:
    """Fixed text form for CSV cells: 17 significant digits for floats."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def write_csv(path: Path, header, rows) -> Path:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if np.isfinite(v) else None
    return obj


def write_json(path: Path, data: dict) -> Path:
    path.write_text(json.dumps(_jsonable(data), indent=2) + "\n")
    return path


class Run:
    """Shared state for one invocation: config, output directory, cached results."""

    def __init__(self, cfg: RunConfig, out: Path):
        self.cfg = cfg
        self.out = out
        self.sweep = GapSweep(cfg.kernel, cfg.grid, tol=cfg.tol, max_iter=cfg.max_iter,
                              damping=cfg.damping)
        self._tc = None
        self.written: list[Path] = []

    def wants(self, kind: str) -> bool:
        return kind in self.cfg.formats

    def csv(self, name, header, rows):
        if self.wants("csv"):
            self.written.append(write_csv(self.out / name, header, rows))

    def json(self, name, data):
        if self.wants("json"):
            self.written.append(write_json(self.out / name, data))

    @property
    def tc(self):
        if self._tc is None:
            self._tc = find_tc(self.cfg.kernel, self.cfg.grid, tol=min(self.cfg.tol, 1e-10))
        return self._tc

    @property
    def zero(self):
        return self.sweep.zero_T()

    @property
    def delta(self) -> float:
        return float(np.max(self.zero.values))

    def sweep_temperatures(self):
        units_tc = self.cfg.sweep.units == "tc"
        return self.cfg.sweep.temperatures(self.tc.tc if units_tc else None)

    @property
    def all_converged(self) -> bool:
        return all(s.converged for s in self.sweep.solutions)


def cmd_solve(run: Run, temperature: float):
    sol = run.sweep.solve(temperature)
    grid = run.cfg.grid
    resid = gap_rhs(run.cfg.kernel, grid, sol.temperature, sol.values, run.sweep.kmat) - sol.values
    run.csv("solution.csv", ["xi", "u0", "residual"],
            zip(grid.nodes, sol.values, resid))
    run.json("solution.json", {
        "temperature": sol.temperature,
        "converged": sol.converged,
        "trivial": sol.trivial,
        "iterations": sol.iterations,
        "residual_sup": sol.residual_sup,
        "damping": sol.damping,
        "gap_max": float(np.max(sol.values)),
    })
    state = "trivial" if sol.trivial else "nontrivial"
    print(f"T = {sol.temperature:.6g}: {state}, sup u = {sol.sup:.10g}, "
          f"residual {sol.residual_sup:.2e}, converged={sol.converged}")
    return sol.converged


def cmd_sweep(run: Run):
    grid = run.cfg.grid
    rows = []
    temps = run.sweep_temperatures()
    run.sweep.requested = [float(t) for t in temps]
    for T in temps:
        sol = run.sweep.solve(T)
        resid = gap_rhs(run.cfg.kernel, grid, sol.temperature, sol.values, run.sweep.kmat) - sol.values
        for x, u, r in zip(grid.nodes, sol.values, resid):
            rows.append((sol.temperature, x, u, r, sol.converged, sol.trivial))
    run.csv("gap_sweep.csv", ["T", "xi", "u0", "residual", "converged", "trivial"], rows)
    print(f"swept {len(temps)} temperatures in [{temps[0]:.6g}, {temps[-1]:.6g}]")
    return all(run.sweep.solve(T).converged for T in temps)


def cmd_tc(run: Run):
    res = run.tc
    run.json("tc.json", res.to_dict())
    print(f"T_c = {res.tc:.12g} (spectral radius {res.spectral_radius_at_tc:.12g})")
    return True


def thermo_rows(run: Run):
    spec, grid = run.cfg.material, run.cfg.grid
    rows, points = [], []
    for T in run.sweep_temperatures():
        p = entropy(spec, run.sweep, T)
        try:
            cv_omega = specific_heat(spec, run.sweep, T)
        except StepSizeError:
            cv_omega = float("nan")
        cv = specific_heat_from_entropy(spec, run.sweep, T)
        cvn = asy.cvn_tc(spec, T, grid)
        points.append((p, cv, cvn))
        rows.append((p.temperature, p.omega, omega_normal(spec, grid, T), p.entropy_formula,
                     p.entropy_fd, p.consistency_gap, cv, cv_omega, cvn,
                     run.sweep.solve(T).converged))
    return rows, points


def cmd_thermo(run: Run):
    rows, points = thermo_rows(run)
    run.csv("thermo_curve.csv",
            ["T", "omega", "omega_normal", "entropy_formula", "entropy_fd", "consistency_gap",
             "cv", "cv_omega", "cv_normal", "converged"], rows)
    worst = max(r[5] for r in rows)
    print(f"thermo curve at {len(rows)} temperatures; worst entropy consistency gap {worst:.2e}")
    return run.all_converged, points


def cmd_asympt(run: Run):
    spec, grid = run.cfg.material, run.cfg.grid
    delta = run.delta
    temps = sorted((f * delta for f in run.cfg.fractions), reverse=True)
    reports = asy.build_report(spec, run.sweep, run.zero, temps)
    const = isinstance(spec.kernel, ConstantKernel)
    header = ["T", "T_over_u0", "s_lowT", "s_full", "s_rel_err", "cv_lowT", "cv_full",
              "cv_rel_err", "gap_rel_err", "gap_correction_rel_err", "term6_over_term7",
              "du2_terms_over_leading"]
    if const:
        header += ["s_closed", "cv_closed", "gap_closed"]
    rows = []
    for r in reports:
        d = d_omega_dT_formula(spec, run.sweep, r.temperature)
        t7 = abs(d.terms[6])
        weighted = max(abs(t) for t in d.du2_weighted) / abs(d.term7_leading)
        e = r.relative_errors
        row = [r.temperature, r.temperature / delta, r.s_lowT, r.s_full, e["entropy"],
               r.cv_lowT, r.cv_full, e["cv"], e["gap"], r.gap_correction_error,
               abs(d.terms[5]) / t7 if t7 > 0 else float("nan"), weighted]
        if const:
            u_const = spec.kernel.value
            row += [asy.entropy_lowT_constant(spec.n0, delta, r.temperature),
                    asy.cv_lowT_constant(spec.n0, delta, r.temperature),
                    asy.gap_lowT_constant(u_const, delta, r.temperature)]
        rows.append(row)
    run.csv("asymptotics.csv", header, rows)
    for r in reports:
        e = r.relative_errors
        print(f"T/u0 = {r.temperature / delta:.4g}: rel. err S {e['entropy']:.3e}, "
              f"C_V {e['cv']:.3e}, gap {e['gap']:.3e}")
    return run.all_converged, reports


def cmd_ratio(run: Run):
    rep = asy.universal_ratio(run.cfg.material, run.zero, run.tc.tc, run.cfg.grid)
    run.json("ratio.json", rep.to_dict())
    print(f"H_c(0)^2 / (T_c C_V^N(T_c)) = {rep.ratio:.10g}; limit {rep.universal_limit:.10g}, "
          f"deviation {100 * rep.deviation:+.3f}%")
    return run.zero.converged, rep


def cmd_report(run: Run):
    ok = cmd_tc(run)
    ok &= cmd_sweep(run)
    ok_t, points = cmd_thermo(run)
    ok_a, reports = cmd_asympt(run)
    ok_r, ratio = cmd_ratio(run)
    delta = run.delta
    t0 = asy.measure_t0(run.cfg.material, run.sweep, run.zero, run.cfg.t0_threshold)
    summary = {
        "tc": run.tc.tc,
        "gap_max_zero_T": delta,
        "gap_over_tc": delta / run.tc.tc,
        "t0": t0,
        "t0_over_u0": t0 / delta,
        "t0_threshold": run.cfg.t0_threshold,
        "ratio": ratio.ratio,
        "ratio_deviation": ratio.deviation,
        "asymptotic_errors": [{"T_over_u0": r.temperature / delta, **r.relative_errors,
                               "gap_correction": r.gap_correction_error}
                              for r in reports],
        "all_converged": run.all_converged,
    }
    run.json("summary.json", summary)
    print(f"T0 = {t0:.6g} ({t0 / delta:.4g} u0(0)); ratio deviation {100 * ratio.deviation:+.3f}%")
    if run.wants("svg"):
        from . import plots

        temps = run.sweep.requested
        profiles = [run.sweep.solve(T).values for T in temps]
        run.written += [
            plots.plot_gap_profiles(run.cfg.grid, temps, profiles, run.out / "gap_profiles.svg"),
            plots.plot_entropy([p for p, _, _ in points], run.out / "entropy.svg"),
            plots.plot_specific_heat(
                [type(p)(p.temperature, p.omega, p.entropy_formula, p.entropy_fd, cv,
                         p.consistency_gap) for p, cv, _ in points],
                run.out / "specific_heat.svg", cv_normal=[c for _, _, c in points]),
            plots.plot_asymptotics(reports, delta, run.out / "asymptotics.svg"),
        ]
    return ok and ok_t and ok_a and ok_r


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bcsgap", description="Gap equation, thermodynamics and "
                                 "critical temperature for an arbitrary pairing kernel")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("config", help="INI run configuration")
    ap.add_argument("-o", "--output", help="output directory (overrides output.directory)")
    ap.add_argument("-T", "--temperature", type=float, default=0.0,
                    help="temperature for the solve command (energy units, default 0)")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def _copy_inputs(cfg: RunConfig, out: Path):
    shutil.copyfile(cfg.path, out / cfg.path.name)
    table = cfg.raw["material"].get("table")
    if table:
        src = Path(table) if Path(table).is_absolute() else cfg.path.parent / table
        shutil.copyfile(src, out / src.name)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
    except BCSError as exc:
        key = getattr(exc, "key", None)
        print(f"config error{f' [{key}]' if key else ''}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.output) if args.output else cfg.directory
    out.mkdir(parents=True, exist_ok=True)
    _copy_inputs(cfg, out)
    run = Run(cfg, out)

    try:
        if args.command == "solve":
            if args.temperature < 0:
                raise ConfigError("--temperature must be >= 0", "temperature")
            ok = cmd_solve(run, args.temperature)
        elif args.command == "sweep":
            ok = cmd_sweep(run)
        elif args.command == "tc":
            ok = cmd_tc(run)
        elif args.command == "thermo":
            ok, _ = cmd_thermo(run)
        elif args.command == "asympt":
            ok, _ = cmd_asympt(run)
        elif args.command == "ratio":
            ok, _ = cmd_ratio(run)
        else:
            ok = cmd_report(run)
    except ConfigError as exc:
        print(f"config error [{exc.key}]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BCSError as exc:
        print(f"numerical error ({exc.__class__.__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if not ok:
        print("warning: at least one gap solve did not converge (see converged columns)",
              file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
