"""Acceptance suite: headline reproductions, oracles and invariants.

Each test is one acceptance criterion; ``pytest -v`` prints one pass/fail
line per criterion. Runs that several criteria share are module-scoped
fixtures. The long sweeps use a coarser (validated) integrator step than the
single-run default to keep the suite's wall clock sane on one CPU.
"""

import math
from pathlib import Path

import numpy as np
import pytest

from eosim.analytic import (
    SourceSpec,
    analytic_success_dispersive,
    coherent_leading_order,
    ideal_success_probability,
    source_fidelity_bound,
)
from eosim.dynamics import ModelParams, evolve, total_photon_number
from eosim.protocol import prepare_initial_state, run_protocol
from eosim.sweep import SweepSpec, gamma_from_normalized, run_sweep

from helpers import schrodinger_oracle, trace_distance


def headline_params():
    return ModelParams(delta=20.0, gamma_cav=1.0 / (20.0 * math.pi), lambda_deph=0.1)


@pytest.fixture(scope="module")
def headline_run():
    traj, summary = run_protocol(headline_params(), record_stride=256)
    return summary


@pytest.fixture(scope="module")
def headline_run_half_dt():
    params = headline_params()
    traj, summary = run_protocol(params, dt=params.default_dt() / 2.0,
                                 record_stride=256)
    return summary


def test_criterion_1_headline_single_photon_point(headline_run):
    assert headline_run.f_average == pytest.approx(0.998, abs=0.002), (
        f"F_average = {headline_run.f_average:.6f}, expected 0.998 +- 0.002"
    )
    assert headline_run.p_total == pytest.approx(0.178, abs=0.003), (
        f"P_total = {headline_run.p_total:.6f}, expected 0.178 +- 0.003"
    )


def test_criterion_2_headline_coherent_point():
    """Published coherent-input point, with the documented-deviation fallback.

    The published figure's quoted (F, P) cannot both be reproduced under this
    package's stated conventions (amplitude alpha/sqrt(2) per cavity after
    the input splitter, full integration horizon); the README section
    "Reproducing the published figures" records the measured values and their
    sensitivity to those conventions, as this criterion requires when the
    direct tolerance check fails. The fallback pins the measured values so
    regressions are still caught.
    """
    params = ModelParams(
        delta=7.0,
        gamma_cav=1.0 / (7.0 * math.pi),
        lambda_deph=0.5,
        input_kind="coherent",
        alpha=0.2,
        n_max=3,
    )
    _, summary = run_protocol(params, record_stride=256)
    f, p = summary.f_average, summary.p_total
    if abs(f - 0.939) <= 0.010 and abs(p - 0.0128) <= 0.0015:
        return

    readme = (Path(__file__).resolve().parents[1] / "README.md").read_text()
    assert "Reproducing the published figures" in readme, (
        "measured values outside published tolerance and no deviation "
        "documentation found in README.md"
    )
    assert "0.858" in readme and "0.0071" in readme, (
        "README deviation section does not record the measured values"
    )
    assert f == pytest.approx(0.858, abs=0.002), (
        f"F_average = {f:.6f} drifted from the documented value 0.858"
    )
    assert p == pytest.approx(0.00713, abs=0.0002), (
        f"P_total = {p:.6f} drifted from the documented value 0.00713"
    )


def test_criterion_3_sweep_shape():
    """Qualitative shape of the lambda = g sweep.

    The gamma=1 monotonicity clauses hold. The interior fidelity maximum
    near gamma = 3/2 reported by the source does not exist in this model:
    F_average rises monotonically over the grid (see README, 'Reproducing
    the published figures'), so that clause fails with the measured curves
    in the message.
    """
    deltas = (15.0, 20.0, 25.0, 30.0)
    rows = run_sweep(SweepSpec(deltas=deltas, lambda_deph=1.0, dt_scale=0.1))
    assert all(r.status == "ok" for r in rows)

    problems = []
    by_delta = {d: [r for r in rows if r.delta == d] for d in deltas}
    for d, drows in by_delta.items():
        gammas = [r.gamma_norm for r in drows]
        fids = [r.f_average for r in drows]
        best = gammas[int(np.argmax(fids))]
        if not 1.25 <= best <= 1.75:
            curve = ", ".join(f"{g:g}:{f:.4f}" for g, f in zip(gammas, fids))
            problems.append(
                f"argmax_gamma F_average = {best:g} at delta={d:g}, expected in "
                f"[1.25, 1.75]; F(gamma) = {curve}"
            )

    at_unit_gamma = sorted(
        (r for r in rows if r.gamma_norm == 1.0), key=lambda r: r.delta
    )
    p_vals = [r.p_total for r in at_unit_gamma]
    f_vals = [r.f_average for r in at_unit_gamma]
    if not all(a > b for a, b in zip(p_vals, p_vals[1:])):
        problems.append(f"P_total not strictly decreasing in delta at gamma=1: {p_vals}")
    if not all(a < b for a, b in zip(f_vals, f_vals[1:])):
        problems.append(f"F_average not strictly increasing in delta at gamma=1: {f_vals}")
    assert not problems, "; ".join(problems)


def test_criterion_4_dispersive_oracle_equivalence():
    rel_errors = {}
    for delta in (20.0, 30.0, 50.0):
        gamma = gamma_from_normalized(1.0, delta)
        params = ModelParams(delta=delta, gamma_cav=gamma, lambda_deph=0.0)
        _, summary = run_protocol(params, dt=0.1 / delta, record_stride=256)
        oracle = analytic_success_dispersive(delta, gamma)
        rel_errors[delta] = abs(summary.p_total - oracle) / oracle
    assert rel_errors[50.0] < 0.02, f"rel err at delta=50: {rel_errors[50.0]:.4f}"
    assert rel_errors[20.0] < 0.05, f"rel err at delta=20: {rel_errors[20.0]:.4f}"
    assert rel_errors[20.0] > rel_errors[30.0] > rel_errors[50.0], (
        f"rel err not decreasing in delta: {rel_errors}"
    )


def test_criterion_5_parity_null():
    """Even-parity inputs must never herald, across the stated (delta, lambda) span.

    In this master equation the null is exact for |00> at any dephasing (the
    atoms never couple) and for |11> at lambda = 0 (the photon stays in the
    symmetric mode). For |11> at lambda > 0 independent phase noise on the
    two atoms decoheres the L/R photon superposition and the symmetric mode
    leaks into the herald port, so the criterion's blanket null is violated
    by the model itself; the failure message reports every measured leak.
    """
    points = [
        (7.0, 0.0),
        (7.0, 1.0),
        (20.0, 0.5),
        (35.0, 0.1),
        (50.0, 1.0),
    ]
    leaks = []
    for delta, lam in points:
        for atoms in ("s00", "s11"):
            params = ModelParams(
                delta=delta,
                gamma_cav=gamma_from_normalized(1.0, delta),
                lambda_deph=lam,
                initial_atoms=atoms,
            )
            _, summary = run_protocol(
                params, dt=0.1 / delta, t_max=50.0, record_stride=256
            )
            if not summary.p_total < 1e-10:
                leaks.append(
                    f"{atoms} at delta={delta:g}, lambda={lam:g}: "
                    f"P = {summary.p_total:.3e}"
                )
    assert not leaks, (
        "even-parity inputs heralded (dephasing-induced symmetric-mode leak, "
        "see README 'Reproducing the published figures'): " + "; ".join(leaks)
    )


def test_criterion_6_trace_leak_balance():
    params = headline_params()
    space = params.space()
    rho0 = prepare_initial_state(params, space)
    n_tot = total_photon_number(space)
    dt = 5e-4
    res = evolve(rho0, params, 20.0, dt, observables={"n": n_tot})
    trace = res.trace
    n_exp = res.expectations["n"]
    # centered difference of the trace against the instantaneous leak rate
    dtrace = (trace[2:] - trace[:-2]) / (2.0 * dt)
    residual = np.abs(dtrace + 2.0 * params.gamma_cav * n_exp[1:-1])
    assert residual.max() < 1e-8, f"max trace-leak residual {residual.max():.3e}"


def test_criterion_7_pure_state_oracle():
    params = ModelParams(delta=12.0, gamma_cav=0.05, lambda_deph=0.0)
    space = params.space()
    rho0 = prepare_initial_state(params, space)

    # extract the pure state (lambda = 0 keeps the evolution rank-1)
    vals, vecs = np.linalg.eigh(rho0.data)
    psi0 = vecs[:, -1] * math.sqrt(vals[-1])

    times = np.linspace(0.0, 10.0, 21)
    oracle = schrodinger_oracle(params, psi0, times)
    dt = 1e-3
    worst = 0.0
    rho = rho0
    for i in range(1, len(times)):
        res = evolve(rho, params, times[i] - times[i - 1], dt)
        rho = res.final_state
        ref = np.outer(oracle[i], oracle[i].conj())
        worst = max(worst, trace_distance(rho.data, ref))
    assert worst < 1e-8, f"max trace distance vs state-vector oracle {worst:.3e}"


def test_criterion_8_step_halving_convergence(headline_run, headline_run_half_dt):
    df = abs(headline_run.f_average - headline_run_half_dt.f_average)
    dp = abs(headline_run.p_total - headline_run_half_dt.p_total)
    assert df < 1e-6, f"F_average changed by {df:.3e} on halving dt"
    assert dp < 1e-6, f"P_total changed by {dp:.3e} on halving dt"


def test_criterion_9_analytic_spot_values():
    assert ideal_success_probability(math.pi) == pytest.approx(0.5)
    source = SourceSpec(probabilities={0: 0.14, 2: 0.0008})
    assert source_fidelity_bound(source) == pytest.approx(0.9992)
    f, p = coherent_leading_order(0.2, math.pi)
    assert f == pytest.approx(0.98, abs=1e-12)
    assert p == pytest.approx(0.02, abs=1e-12)
