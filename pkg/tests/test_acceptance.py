"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line with the measured quantity next to its tolerance."""

import math
import time

import numpy as np

from visco2d.config import ModelParams, RunConfig
from visco2d.constitutive import (
    conjugate_J_components,
    dissipation_xi,
    free_energy_values,
    stress_S_components,
)
from visco2d.diagnostics import energy_residual_window, eps_energy_audit
from visco2d.fields import State, SymTensorField
from visco2d.harness import (
    default_case,
    epsilon_sweep,
    positivity_fuzz,
    random_spd_tensor,
    random_velocity,
    spatial_convergence,
    taylor_green_state,
    twin_run,
)
from visco2d.io import (
    DiagnosticsWriter,
    checkpoint,
    read_diagnostics,
    restore,
    write_snapshot,
)
from visco2d.spectral import SpectralGrid
from visco2d.timeloop import StepperOptions, integrate

COUPLED = ModelParams(a=1.0, beta=0.3, delta1=1.0, delta2=0.5)


def announce(capsys, index, passed, detail):
    with capsys.disabled():
        status = "PASS" if passed else "FAIL"
        print(f"\nACCEPTANCE {index}: {status} - {detail}", flush=True)
    assert passed, detail


def smooth_coupled_state(grid, seed=11):
    """Smooth (single-band) data so trapezoid quadrature of the energy
    budget resolves the transient at the tested output cadence."""
    rng = np.random.default_rng(seed)
    return State(t=0.0, v=random_velocity(grid, rng, kmax=1, amplitude=0.5),
                 B=random_spd_tensor(grid, rng, kmax=1, amplitude=0.3))


def test_criterion_1_navier_stokes_limit(capsys):
    grid = SpectralGrid(64)
    state = taylor_green_state(grid)
    params = ModelParams(a=0.0, beta=0.3, delta1=1.0, delta2=0.0)
    t0 = time.perf_counter()
    result = integrate(state, None, 0.05,
                       StepperOptions(scheme="imex_midpoint", dt=2e-4),
                       params, output_every=10)
    elapsed = time.perf_counter() - t0
    expected = 0.25 * math.exp(-16 * math.pi**2 * 0.05)
    rel_err = abs(result.records[-1].kinetic - expected) / expected
    b_dev = max(
        np.abs(result.state.B.b11.values - 1.0).max(),
        np.abs(result.state.B.b12.values).max(),
        np.abs(result.state.B.b22.values - 1.0).max(),
    )
    ok = rel_err <= 1e-3 and b_dev <= 1e-12 and elapsed <= 10.0
    announce(capsys, 1, ok,
             f"kinetic rel err {rel_err:.3e} (<= 1e-3), "
             f"B deviation {b_dev:.3e} (<= 1e-12), runtime {elapsed:.2f}s (<= 10s)")


def test_criterion_2_energy_balance(capsys):
    grid = SpectralGrid(64)
    state = smooth_coupled_state(grid)
    t_end = 0.1

    def rel_residual(scheme, dt):
        result = integrate(state, None, t_end, StepperOptions(scheme=scheme, dt=dt),
                           COUPLED, output_every=1)
        _, rel = energy_residual_window(result.records)
        return abs(rel)

    rel_mid = rel_residual("imex_midpoint", 1e-4)
    rel_mid_half = rel_residual("imex_midpoint", 5e-5)
    rel_eul = rel_residual("imex_euler", 1e-4)
    rel_eul_half = rel_residual("imex_euler", 5e-5)

    per_time = rel_mid / t_end
    ratio_eul = rel_eul / rel_eul_half
    ratio_mid = rel_mid / rel_mid_half
    ok = (per_time <= 1e-3 and 1.7 <= ratio_eul <= 2.3 and 3.4 <= ratio_mid <= 4.6)
    announce(capsys, 2, ok,
             f"rel residual per unit time {per_time:.3e} (<= 1e-3), "
             f"euler ratio {ratio_eul:.2f} (in [1.7, 2.3]), "
             f"midpoint ratio {ratio_mid:.2f} (in [3.4, 4.6])")


def test_criterion_3_positivity(capsys):
    report = positivity_fuzz(20, ModelParams(), N=64, t_end=0.5, base_seed=100)
    retried = sum(c.retried for c in report.cases)
    announce(capsys, 3, report.passed,
             f"min eigenvalue floor over 20 cases: {report.floor:.4f} (> 0), "
             f"{retried} retried")


def test_criterion_4_twin_run_stability(capsys):
    run = RunConfig(grid_size=64, t_end=0.2, seed=7)
    perturbed = twin_run(COUPLED, run, 1e-6)
    silent = twin_run(COUPLED, run, 0.0, t_end=0.05)
    zero_sep = float(np.abs(silent.separation).max())
    ok = perturbed.hold_fraction >= 0.95 and zero_sep == 0.0
    announce(capsys, 4, ok,
             f"envelope holds at {100 * perturbed.hold_fraction:.1f}% of times "
             f"(>= 95%), zero-amplitude separation {zero_sep:.1e} (= 0)")


def test_criterion_5_regularization_consistency(capsys):
    run = RunConfig(grid_size=64, t_end=0.1, seed=5)
    sweep = epsilon_sweep(COUPLED, run, (1e-2, 1e-3, 1e-4))
    d = sweep.distances
    decreasing = d[0] > d[1] > d[2]

    grid = SpectralGrid(64)
    params = ModelParams(a=1.0, beta=0.3, delta1=1.0, delta2=0.5, epsilon=1e-3)
    state = smooth_coupled_state(grid, seed=5)
    result = integrate(state, None, 0.05, StepperOptions(dt=1e-4), params,
                       output_every=5)
    _, rels = eps_energy_audit(result.records, params)
    gap = float(np.abs(rels).max())
    ok = decreasing and gap <= 1e-3
    announce(capsys, 5, ok,
             f"distances {d[0]:.3e} > {d[1]:.3e} > {d[2]:.3e} (decreasing), "
             f"audit rel gap {gap:.3e} (<= 1e-3)")


def test_criterion_6_constitutive_identities(capsys):
    rng = np.random.default_rng(2024)
    n = 1000
    a = rng.uniform(-1.0, 1.0, (n, 2, 2))
    mats = a @ np.transpose(a, (0, 2, 1)) + 0.05 * np.eye(2)
    b11, b12, b22 = mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 1]
    beta = 0.3

    s11, s12, s22 = stress_S_components(b11, b12, b22, beta)
    j11, j12, j22 = conjugate_J_components(b11, b12, b22, beta)

    def as_mats(m11, m12, m22):
        out = np.empty((n, 2, 2))
        out[:, 0, 0] = m11
        out[:, 0, 1] = out[:, 1, 0] = m12
        out[:, 1, 1] = m22
        return out

    B, S, J = as_mats(b11, b12, b22), as_mats(s11, s12, s22), as_mats(j11, j12, j22)
    worst = max(np.abs(B @ J - S).max(), np.abs(J @ B - S).max(),
                np.abs(S @ B - B @ S).max())

    psi = free_energy_values(b11, b12, b22, beta)
    psi_eye = free_energy_values(np.ones(4), np.zeros(4), np.ones(4), beta)

    grid = SpectralGrid(32)  # 1024 >= 1000 samples as a field for xi
    m = grid.N * grid.N
    a2 = rng.uniform(-1.0, 1.0, (m, 2, 2))
    fm = a2 @ np.transpose(a2, (0, 2, 1)) + 0.05 * np.eye(2)
    Bf = SymTensorField.from_values(grid, fm[:, 0, 0].reshape(32, 32),
                                    fm[:, 0, 1].reshape(32, 32),
                                    fm[:, 1, 1].reshape(32, 32))
    v = random_velocity(grid, rng, amplitude=0.5)
    xi_field, _ = dissipation_xi(v, Bf, COUPLED)

    h = 1e-5
    e11, e12, e22 = (rng.uniform(-1, 1, n) for _ in range(3))
    fd = (free_energy_values(b11 + h * e11, b12 + h * e12, b22 + h * e22, beta)
          - free_energy_values(b11 - h * e11, b12 - h * e12, b22 - h * e22, beta)
          ) / (2 * h)
    pairing = j11 * e11 + 2 * j12 * e12 + j22 * e22
    grad_err = float(np.abs(fd - pairing).max() / max(np.abs(pairing).max(), 1.0))

    ok = (worst <= 1e-12 and psi.min() >= 0.0 and np.abs(psi_eye).max() <= 1e-12
          and xi_field.values.min() >= -1e-12 and grad_err <= 1e-6)
    announce(capsys, 6, ok,
             f"algebra defect {worst:.2e} (<= 1e-12), min psi {psi.min():.2e} (>= 0), "
             f"min xi {xi_field.values.min():.2e} (>= -1e-12), "
             f"grad-psi vs J {grad_err:.2e} (<= 1e-6)")


def test_criterion_7_spatial_spectral_accuracy(capsys):
    report = spatial_convergence(default_case(), Ns=(16, 32), dt=1e-5, t_end=0.01)
    e16 = report.rows[0].error_combined
    e32 = report.rows[1].error_combined
    drop = e16 / e32
    announce(capsys, 7, drop >= 1e2,
             f"L2 error {e16:.3e} (N=16) -> {e32:.3e} (N=32), drop {drop:.1f}x (>= 100x)")


def test_criterion_8_determinism_and_io(capsys, tmp_path):
    grid = SpectralGrid(32)
    state0 = smooth_coupled_state(grid, seed=9)
    options = StepperOptions(scheme="imex_midpoint", dt=1e-3)

    full = integrate(state0, None, 0.02, options, COUPLED, output_every=2)
    half = integrate(state0, None, 0.01, options, COUPLED, output_every=2)
    path = tmp_path / "mid.v2ds"
    checkpoint(half.state, path)
    resumed = integrate(restore(path, grid), None, 0.02, options, COUPLED,
                        output_every=2)
    bitwise = all(
        np.array_equal(a.values, b.values)
        for a, b in ((resumed.state.v.x, full.state.v.x),
                     (resumed.state.v.y, full.state.v.y),
                     (resumed.state.B.b11, full.state.B.b11),
                     (resumed.state.B.b12, full.state.B.b12),
                     (resumed.state.B.b22, full.state.B.b22))
    )

    csv_path = tmp_path / "diag.csv"
    with DiagnosticsWriter(csv_path) as sink:
        for rec in full.records:
            sink(rec, None)
    data = read_diagnostics(csv_path)
    from visco2d.diagnostics import CSV_COLUMNS

    roundtrip = all(
        data[name][i] == value
        for i, rec in enumerate(full.records)
        for name, value in zip(CSV_COLUMNS, rec.row())
    )

    snap_path = tmp_path / "full.v2ds"
    write_snapshot(full.state, snap_path)
    snap = restore(snap_path, grid)
    snap_ok = snap.t == full.state.t and np.array_equal(
        snap.B.b12.values, full.state.B.b12.values)

    ok = bitwise and roundtrip and snap_ok
    announce(capsys, 8, ok,
             f"resume bitwise {bitwise}, csv f64 roundtrip {roundtrip}, "
             f"snapshot roundtrip {snap_ok}")
