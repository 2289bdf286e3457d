"""Acceptance criteria, one test per criterion.

Each test records a ``[PASS]``/``[FAIL]`` line that is printed in the pytest
terminal summary (and echoed with ``-s``). Criteria 8 and 9 run a shared
n=4 sweep over 20 seeded instances and take a few minutes.

Run standalone with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import sys
import time

import numpy as np
import pytest
from scipy.linalg import expm

from conftest import dense_daqgo1_p0, dense_hz, ode_anneal
from daqgo.bench import ExperimentConfig, cli_dispatch, run_tau_sweep
from daqgo.circuits import MeasureSpec, marginal, measure_daqgo1, measure_daqgo2, measure_daqgo4, predict_circuit_fidelity
from daqgo.dynamics import AnnealParams, anneal, default_steps
from daqgo.export import export_daqgo1_circuit, parse_gates, run_gates
from daqgo.ising import IsingInstance, instance_seed, random_instance
from daqgo.shots import sample_size_wald, total_shots, wald_monte_carlo

TAUS = (0.1, 1.0, 5.0, 20.0)
SWEEP_SEED = 2024
SWEEP_INSTANCES = 20


def _probe_pair(n, rng, tau=None):
    """A greedy-style (test, reference) pair: reference fields partly fixed, one probed."""
    tau = rng.uniform(0.3, 3.0) if tau is None else tau
    ref = AnnealParams(tau, rng.uniform(0.3, 2.0), tuple(rng.choice([-1.5, 0.0, 1.5], n)))
    j = int(rng.integers(n))
    return ref.with_field(j, ref.c[j] + 1.5), ref


def test_1_circuit_identities(report):
    start = time.perf_counter()
    rng = np.random.default_rng(1)
    err4 = err_q0 = 0.0
    mirror = 0.0
    for k in range(50):
        n = (2, 3, 4)[k % 3]
        inst = random_instance(n, instance_seed(1, k))
        test, ref = _probe_pair(n, rng)
        T, R = anneal(inst, test), anneal(inst, ref)
        v4 = measure_daqgo4(inst, test, ref).value
        # the circuit algebra gives P0 - P1 = Im<psi_R|psi_T> = -Im<psi_T|psi_R> (see README)
        err4 = max(err4, abs(v4 - np.imag(np.vdot(R, T))))
        mirror = max(mirror, abs(abs(v4) - abs(np.imag(np.vdot(T, R)))))
        t = float(rng.uniform(0.05, 1.0))
        q0 = measure_daqgo2(inst, test, ref, MeasureSpec("DAQGO2", t)).raw["Q0"]
        oracle = 0.5 * np.imag(np.vdot(T + R, expm(1j * dense_hz(inst) * t) @ (T - R)))
        err_q0 = max(err_q0, abs(q0 - oracle))
    err1 = 0.0
    for k in range(10):
        n = (2, 3)[k % 2]
        inst = random_instance(n, instance_seed(11, k))
        test, ref = _probe_pair(n, rng)
        spec = MeasureSpec("DAQGO1", float(rng.uniform(0.1, 1.0)), float(rng.uniform(0.0, 2.0)))
        out = measure_daqgo1(inst, test, ref, spec)
        T, R = anneal(inst, test), anneal(inst, ref)
        err1 = max(err1, abs(out.raw["P0(eps)"] - dense_daqgo1_p0(inst, T, R, spec.t_sim, spec.epsilon)))
        err1 = max(err1, abs(out.raw["P0(0)"] - dense_daqgo1_p0(inst, T, R, spec.t_sim, 0.0)))
    elapsed = time.perf_counter() - start
    ok = err4 < 1e-10 and mirror < 1e-10 and err_q0 < 1e-10 and err1 < 1e-8 and elapsed < 60
    detail = f"DAQGO4 {err4:.1e}, Q0 {err_q0:.1e}, DAQGO1 P0 {err1:.1e}, {elapsed:.1f}s"
    assert report(1, "circuit identities", ok, detail)


def test_2_small_t_expansion(report):
    start = time.perf_counter()
    ts = np.array([0.2, 0.1, 0.05, 0.025])
    rng = np.random.default_rng(2)
    slopes = []
    for k in range(10):
        inst = random_instance(3, instance_seed(2, k))
        test, ref = _probe_pair(3, rng, tau=1.0)
        T, R = anneal(inst, test), anneal(inst, ref)
        E = inst.energies
        dE = float(np.abs(T) ** 2 @ E - np.abs(R) ** 2 @ E)
        errs = [abs(measure_daqgo2(inst, test, ref, MeasureSpec("DAQGO2", t)).value - dE) for t in ts]
        slopes.append(np.polyfit(np.log(ts), np.log(errs), 1)[0])
    elapsed = time.perf_counter() - start
    slopes = np.array(slopes)
    ok = bool(np.all(np.abs(slopes - 2) <= 0.2)) and elapsed < 60
    detail = f"slopes {slopes.min():.3f}..{slopes.max():.3f}, {elapsed:.1f}s"
    assert report(2, "small-t error of (Q0+Q1)/t scales as t^2", ok, detail)


def test_3_propagator(report):
    start = time.perf_counter()
    rng = np.random.default_rng(3)
    ode_err = drift = halving = 0.0
    for k, (n, tau) in enumerate([(2, 0.5), (2, 5.0), (3, 1.0), (3, 5.0), (3, 20.0)]):
        inst = random_instance(n, instance_seed(3, k))
        p = AnnealParams(tau, rng.uniform(0.3, 2.0), tuple(rng.uniform(-1.5, 1.5, n)))
        psi = anneal(inst, p)
        ode_err = max(ode_err, np.abs(psi - ode_anneal(inst, p)).max())
        drift = max(drift, abs(np.vdot(psi, psi).real - 1.0))
        halving = max(halving, np.abs(psi - anneal(inst, p, steps=2 * default_steps(tau))).max())
    elapsed = time.perf_counter() - start
    ok = ode_err < 1e-6 and drift < 1e-8 and halving < 1e-6 and elapsed < 60
    detail = f"ODE {ode_err:.1e}, norm drift {drift:.1e}, step halving {halving:.1e}, {elapsed:.1f}s"
    assert report(3, "propagator against dense ODE oracle", ok, detail)


def test_4_adiabatic_limit(report):
    inst = IsingInstance(2, {(0, 1): 1.0}, (1.0, 1.0))
    psi = anneal(inst, AnnealParams.plain(2, 50.0, 1.0))
    success = float(abs(psi[0]) ** 2)
    assert report(4, "adiabatic limit QA success > 0.99", success > 0.99, f"{success:.6f}")


def test_5_wald_sample_size(report):
    start = time.perf_counter()
    n_wald = sample_size_wald(0.5, 0.05, 2.58)
    n_mc, rate = wald_monte_carlo(0.5, 0.05, 2.58, trials=10_000, rng_seed=5)
    elapsed = time.perf_counter() - start
    ok = n_wald == 942 and n_mc == 942 and abs(rate - 0.99) <= 0.01 and elapsed < 60
    assert report(5, "Wald sample size and Monte Carlo plateau", ok, f"N={n_wald}, rate={rate:.4f}")


def test_6_fidelity_predictor(report):
    f = predict_circuit_fidelity(0.9974, 19, 0.9898, 24)
    assert report(6, "predicted circuit fidelity 0.744", abs(f - 0.744) <= 1e-3, f"{f:.4f}")


def test_7_shot_accounting(report):
    ok = True
    for n in range(2, 13):
        for sel, sign in ((100, 300), (700, 20), (1, 1)):
            tri = n * (n + 1) // 2
            ok &= total_shots("QGO", n, sel, sign) == max(sel, sign) * n * (n + 3) // 2
            ok &= total_shots("DAQGO1", n, sel, sign) == tri * sel + 2 * n * sign
            for alg in ("DAQGO2", "DAQGO3", "DAQGO4"):
                ok &= total_shots(alg, n, sel, sign) == max(sel, sign) * tri
    assert report(7, "total shot formulas for n = 2..12", bool(ok))


# -- criteria 8 and 9: shared desk-scale sweep ------------------------------------------


@pytest.fixture(scope="module")
def sweep():
    start = time.perf_counter()
    common = dict(n_list=(4,), tau_list=TAUS, instance_count=SWEEP_INSTANCES, rng_seed=SWEEP_SEED)
    rows = run_tau_sweep(ExperimentConfig(**common))
    long_t = run_tau_sweep(ExperimentConfig(algorithms=("DAQGO2",), t_sim=0.5, **common))
    table = {(r.algorithm, r.tau): r for r in rows}
    table.update({("DAQGO2@t=0.5", r.tau): r for r in long_t})
    return table, time.perf_counter() - start


def _at_least(table, better, worse, tau):
    """``better >= worse`` minus twice the combined standard error."""
    a, b = table[(better, tau)], table[(worse, tau)]
    margin = 2 * math.hypot(a.standard_error, b.standard_error)
    return a.success_probability >= b.success_probability - margin, a.success_probability, b.success_probability, margin


@pytest.mark.slow
def test_8_ordering_claims(report, sweep):
    table, elapsed = sweep
    checks = []
    for tau in TAUS:
        for alg in ("DAQGO3", "DAQGO4"):
            checks.append((f"{alg}>=QA@{tau:g}",) + _at_least(table, alg, "QA", tau))
    a, b = table[("QGO", 0.1)], table[("DAQGO2", 0.1)]
    margin = 2 * math.hypot(a.standard_error, b.standard_error)
    checks.append(("QGO~DAQGO2@0.1", abs(a.success_probability - b.success_probability) <= margin,
                   a.success_probability, b.success_probability, margin))
    for tau in (1.0, 5.0):
        ok, s4, s1, m = _at_least(table, "DAQGO4", "DAQGO1", tau)
        checks.append((f"DAQGO1<=DAQGO4@{tau:g}", ok, s1, s4, m))
    failed = [c[0] for c in checks if not c[1]]
    for name, ok, x, y, m in checks:
        print(f"    {name}: {x:.3f} vs {y:.3f} (allowance {m:.3f}) {'ok' if ok else 'VIOLATED'}")
    ok = not failed and elapsed < 1800
    detail = f"{len(checks) - len(failed)}/{len(checks)} comparisons hold, sweep {elapsed:.0f}s"
    if failed:
        detail += f"; failed: {', '.join(failed)}"
    assert report(8, "ordering claims at n=4 over 20 instances", ok, detail)


@pytest.mark.slow
def test_9_daqgo2_time_dependence(report, sweep):
    table, elapsed = sweep
    results = [_at_least(table, "DAQGO2", "DAQGO2@t=0.5", tau) for tau in TAUS]
    ok = all(r[0] for r in results) and elapsed < 1800
    detail = ", ".join(f"tau={tau:g}: {r[1]:.2f} vs {r[2]:.2f}" for tau, r in zip(TAUS, results))
    assert report(9, "DAQGO2 at t=0.05 is no worse than at t=0.5", ok, detail)


def test_10_export_round_trip(report):
    err = 0.0
    for k in range(10):
        inst = random_instance(2, instance_seed(10, k))
        ref = AnnealParams.plain(2, 0.6, 0.5)
        test = ref.with_field(k % 2, 1.5)
        spec = MeasureSpec("DAQGO1", 0.5, 1.2)
        psi = run_gates(parse_gates(export_daqgo1_circuit(inst, test, ref, spec)), 5)
        err = max(err, abs(marginal(psi, [0])[0] - measure_daqgo1(inst, test, ref, spec).raw["P0(eps)"]))
    assert report(10, "exported DAQGO1 gate list reproduces P0", err < 1e-8, f"max error {err:.1e}")


def test_11_cli_determinism(report, tmp_path):
    args = ["bench-tau", "--n", "3", "--tau", "0.5,2", "--instances", "4", "--seed", "11"]
    codes = [cli_dispatch(args + ["--out", str(tmp_path / f"run{i}.csv")]) for i in (1, 2)]
    same = (tmp_path / "run1.csv").read_bytes() == (tmp_path / "run2.csv").read_bytes()
    assert report(11, "bench-tau CSV is byte-identical across runs", codes == [0, 0] and same)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
