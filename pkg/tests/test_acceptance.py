"""Acceptance suite: one summary line per criterion, at the stated tolerances.

Run alone with ``python tests/test_acceptance.py`` or ``pytest tests/test_acceptance.py``;
the PASS/FAIL lines are printed in the "acceptance criteria" section of the
pytest summary.
"""

import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from bcsgap import integrate_half_line, solve_gap, solve_gap_zero_T
from bcsgap.gap_solver import evaluate_profile
from bcsgap._special import sech2
from bcsgap.asymptotics import (build_report, cv_lowT, cv_lowT_constant, entropy_lowT,
                                entropy_lowT_constant, gap_lowT, gap_lowT_constant,
                                universal_ratio)
from bcsgap.tc_finder import linearized_radius
from bcsgap.thermo import d_omega_dT_formula, entropy, omega, omega_normal, specific_heat

ROOT = Path(__file__).resolve().parents[1]
if __package__ in (None, ""):
    sys.path.insert(0, str(ROOT))

from tests import frozen, oracles  # noqa: E402


def test_c01_quadrature_constants(acceptance):
    s = integrate_half_line(lambda e: e**2 * sech2(e))
    lg = integrate_half_line(lambda e: np.log(e) * sech2(e))
    e1, e2 = abs(s - math.pi**2 / 12), abs(lg - frozen.LOG_CONST)
    ok = e1 < 1e-10 and e2 < 1e-9
    assert acceptance(1, "half-line constants", ok,
                      f"|err pi^2/12| = {e1:.1e} (<1e-10), |err ln(pi/4)-gamma| = {e2:.1e} (<1e-9)")


def test_c02_gap_solver_oracle(acceptance, const_case):
    c = const_case
    sol = solve_gap_zero_T(c.kernel, c.grid)
    rel = float(np.max(np.abs(sol.values / frozen.GAP_CONST_03 - 1)))
    fine = solve_gap_zero_T(c.kernel, c.grid.refined())
    dbl = float(np.max(np.abs(evaluate_profile(c.kernel, fine, c.grid.nodes) - sol.values)))
    ok = rel < 1e-8 and sol.residual_sup <= 1e-10 and dbl <= 1e-8 and sol.converged
    assert acceptance(2, "T=0 constant-kernel gap", ok,
                      f"rel err {rel:.1e} (<1e-8), residual {sol.residual_sup:.1e} (<=1e-10), "
                      f"grid doubling {dbl:.1e} (<=1e-8)")


def test_c03_weak_coupling_gap_ratio(acceptance, weak_case):
    r = weak_case.delta / weak_case.tc
    dev = abs(r / frozen.GAP_RATIO - 1)
    assert acceptance(3, "u0(0)/T_c weak coupling", dev < 0.01,
                      f"{r:.6f} vs pi e^-gamma = {frozen.GAP_RATIO:.6f}, deviation {dev:.2e} (<1e-2)")


def test_c04_entropy_dual_path(acceptance, reference_cases):
    worst, where = 0.0, ""
    for c in reference_cases:
        for f in (0.3, 0.5, 0.7):
            p = entropy(c.spec, c.sweep, f * c.tc)
            if p.consistency_gap >= worst:
                worst, where = p.consistency_gap, f"{c.name} at {f} T_c"
    assert acceptance(4, "entropy formula vs -dOmega/dT", worst < 1e-4,
                      f"worst relative gap {worst:.1e} ({where}) (<1e-4)")


def test_c05_negligible_terms(acceptance, const_case):
    c = const_case
    t6_worst, du2_worst = 0.0, 0.0
    for f in (0.1, 0.05):
        d = d_omega_dT_formula(c.spec, c.sweep, f * c.delta)
        t6_worst = max(t6_worst, abs(d.terms[5]) / abs(d.terms[6]))
        du2_worst = max(du2_worst, max(abs(t) for t in d.du2_weighted) / abs(d.term7_leading))
    ok6, okd = t6_worst < 0.1, du2_worst < 1e-6
    assert acceptance(5, "negligible terms at T <= 0.1 u0(0)", ok6 and okd,
                      f"|t6|/|t7| = {t6_worst:.3f} (<0.1, {'ok' if ok6 else 'fails'}); "
                      f"du2-weighted/leading = {du2_worst:.3g} (<1e-6, {'ok' if okd else 'fails'})")


def test_c06_low_temperature_asymptotics(acceptance, const_case):
    c = const_case
    reps = build_report(c.spec, c.sweep, c.zero, [f * c.delta for f in (0.2, 0.1, 0.05)])
    parts, ok = [], True
    for key in ("entropy", "cv", "gap"):
        errs = [r.relative_errors[key] for r in reps]
        dec = all(b < a for a, b in zip(errs, errs[1:]))
        ok &= dec and errs[-1] < 0.1
        parts.append(f"{key} " + "/".join(f"{e:.1e}" for e in errs) + ("" if dec else " not decreasing"))
    assert acceptance(6, "low-T forms vs numerics (0.2/0.1/0.05 u0)", ok,
                      "; ".join(parts) + " (<0.1 at 0.05, strictly decreasing)")


def test_c07_constant_closed_forms(acceptance, const_case):
    c = const_case
    D, T = c.delta, 0.05 * c.delta
    s_rel = abs(entropy_lowT_constant(1.0, D, T) / entropy_lowT(c.spec, c.zero, T) - 1)
    c_rel = abs(cv_lowT_constant(1.0, D, T) / cv_lowT(c.spec, c.zero, T) - 1)
    corr_int = float(np.max(gap_lowT(c.spec, c.zero, T)) - D)
    corr_closed = gap_lowT_constant(c.kernel.value, D, T) - D
    g_rel = abs(corr_closed / corr_int - 1)
    ok = max(s_rel, c_rel, g_rel) < 0.05 and c.spec.epsilon < 0.1 * math.sqrt(T * D)
    assert acceptance(7, "constant-kernel closed forms at 0.05 u0", ok,
                      f"S {s_rel:.1e}, C_V {c_rel:.1e}, gap correction {g_rel:.1e} (<5e-2)")


def test_c08_critical_field(acceptance, weak_case):
    worst = 0.0
    for a in (0.5, 1.0, 2.0):
        val = integrate_half_line(lambda e: (np.hypot(e, a) - e) ** 2 / np.hypot(e, a), decay_scale=a)
        worst = max(worst, abs(val - a * a / 2))
    w = weak_case
    rep = universal_ratio(w.spec, w.zero, w.tc, w.grid)
    dev = abs(rep.ratio / frozen.UNIVERSAL_RATIO - 1)
    ok = worst < 1e-9 and dev < 0.01
    assert acceptance(8, "critical-field integral and universal ratio", ok,
                      f"a^2/2 err {worst:.1e} (<1e-9); ratio {rep.ratio:.5f} vs "
                      f"{frozen.UNIVERSAL_RATIO:.5f}, deviation {dev:.2e} (<1e-2)")


def test_c09_thermodynamic_properties(acceptance, reference_cases):
    problems = []
    for c in reference_cases:
        temps = np.linspace(0.05, 0.95, 10) * c.tc
        omegas = [omega(c.spec, c.sweep.solve(T)) for T in temps]
        for T, om in zip(temps, omegas):
            p = entropy(c.spec, c.sweep, T)
            if min(p.entropy_formula, p.entropy_fd) < 0:
                problems.append(f"{c.name}: S < 0 at {T:.3g}")
            if T >= 0.2 * c.tc and specific_heat(c.spec, c.sweep, T) < 0:
                problems.append(f"{c.name}: C_V < 0 at {T:.3g}")
            if om > omega_normal(c.spec, c.grid, T):
                problems.append(f"{c.name}: Omega_s > Omega_n at {T:.3g}")
        if any(b > a + 1e-12 for a, b in zip(omegas, omegas[1:])):
            problems.append(f"{c.name}: Omega increases")
        # the true value is ~exp(-100); the formula returns rounding noise of either sign
        s_low = -d_omega_dT_formula(c.spec, c.sweep, 0.01 * c.delta).total
        if not abs(s_low) < 1e-10 * c.spec.n0 * c.spec.omega_cut:
            problems.append(f"{c.name}: S(0.01 u0) = {s_low:.2e}")
    assert acceptance(9, "S, C_V >= 0, S -> 0, Omega monotone, condensation", not problems,
                      "; ".join(problems) if problems else "all checks hold on both kernels")


def test_c10_spectral_characterisation(acceptance, const_case, sep_case):
    issues = []
    for c in (const_case, sep_case):
        radii = [linearized_radius(c.kernel, c.grid, T) for T in np.geomspace(0.2, 5, 10) * c.tc]
        if not all(b < a for a, b in zip(radii, radii[1:])):
            issues.append(f"{c.name}: radius not strictly decreasing")
        above = solve_gap(c.kernel, c.grid, 1.01 * c.tc)
        below = solve_gap(c.kernel, c.grid, 0.99 * c.tc)
        if not (above.converged and above.trivial):
            issues.append(f"{c.name}: 1.01 T_c not trivial")
        if not (below.converged and not below.trivial):
            issues.append(f"{c.name}: 0.99 T_c not nontrivial")
    worst = 0.0
    g_const = oracles.const_g(0.3)
    for c, g, tc_ref in ((const_case, g_const, frozen.TC_CONST_03),
                         (sep_case, oracles.sep_g, frozen.TC_SEP)):
        for T in (0.5 * tc_ref, tc_ref, 2 * tc_ref):
            r = linearized_radius(c.kernel, c.grid, T)
            worst = max(worst, abs(r - oracles.radius_rank_one(g, T, 1e-3, 1.0)))
        worst = max(worst, abs(c.tc / tc_ref - 1))
    u = sep_case.zero.values
    worst = max(worst, float(np.max(np.abs(u / (frozen.C_SEP * oracles.sep_g(sep_case.grid.nodes)) - 1))))
    if worst >= 1e-10:
        issues.append(f"rank-one closed forms off by {worst:.1e}")
    assert acceptance(10, "spectral characterisation of T_c", not issues,
                      "; ".join(issues) if issues else
                      f"ladders decreasing, 1.01/0.99 T_c trivial/nontrivial, rank-one err {worst:.1e} (<1e-10)")


CLI_RUNS = [(cmd, "constant.ini") for cmd in ("solve", "sweep", "tc", "thermo", "asympt", "ratio", "report")]
CLI_RUNS += [("tc", "weak_coupling.ini"), ("ratio", "weak_coupling.ini")]


def _run_cli(cmd, cfg, out):
    args = [sys.executable, "-m", "bcsgap", cmd, str(ROOT / "configs" / cfg), "-o", str(out)]
    if cmd == "solve":
        args += ["-T", "0.02"]
    return subprocess.run(args, capture_output=True, text=True, timeout=600)


def test_c11_determinism(acceptance, tmp_path):
    diffs, failures, compared = [], [], 0
    for cmd, cfg in CLI_RUNS:
        dirs = [tmp_path / f"{cmd}-{cfg}-{k}" for k in (1, 2)]
        for d in dirs:
            proc = _run_cli(cmd, cfg, d)
            if proc.returncode != 0:
                failures.append(f"{cmd} {cfg} exit {proc.returncode}: {proc.stderr.strip()[-200:]}")
        files = sorted(p.name for p in dirs[0].iterdir() if p.suffix in (".csv", ".json", ".svg"))
        for name in files:
            compared += 1
            if (dirs[0] / name).read_bytes() != (dirs[1] / name).read_bytes():
                diffs.append(f"{cmd}:{name}")
    ok = not diffs and not failures and compared > 0
    detail = f"{compared} output files compared across {len(CLI_RUNS)} subcommand runs"
    if diffs:
        detail += "; differing: " + ", ".join(diffs)
    if failures:
        detail += "; " + "; ".join(failures)
    assert acceptance(11, "byte-identical CLI outputs", ok, detail)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
