import math

import numpy as np
import pytest

from daqgo.circuits import MeasureKind, MeasureOutcome, MeasureSpec, measure
from daqgo.dynamics import AnnealParams
from daqgo.ising import IsingInstance, random_instance
from daqgo.qgo import SolveConfig, probe_round
from daqgo.shots import (
    estimate_shots_for_instance,
    sample_size_normal,
    sample_size_wald,
    sampled_measure,
    total_shots,
    wald_monte_carlo,
)


def test_wald_size_exact():
    # 2.58^2 * 0.25 / 0.0025 * sqrt(2) = 941.4...
    assert sample_size_wald(0.5, 0.05, 2.58) == 942
    assert sample_size_wald(0.3, 0.1) == math.ceil(2.58**2 * 0.21 / 0.01 * math.sqrt(2))


def test_normal_size_exact():
    assert sample_size_normal(0.1, 0.2, 0.2, 2.58) == 50
    assert sample_size_normal(0.0, 0.0, 1.0) == 1
    # exact products must not be bumped by round-off: 2^2 * 2 / 1 = 8
    assert sample_size_normal(1.0, 1.0, 1.0, 2.0) == 8


@pytest.mark.parametrize(
    "call",
    [
        lambda: sample_size_wald(0.0, 0.1),
        lambda: sample_size_wald(1.0, 0.1),
        lambda: sample_size_wald(0.5, 0.0),
        lambda: sample_size_normal(1.0, 1.0, 0.0),
        lambda: sample_size_normal(-1.0, 1.0, 0.5),
        lambda: wald_monte_carlo(0.5, 0.05, trials=10),
        lambda: wald_monte_carlo(0.99, 0.05),
    ],
)
def test_input_validation(call):
    with pytest.raises(ValueError):
        call()


def test_wald_monte_carlo_is_seeded():
    a = wald_monte_carlo(0.5, 0.05, trials=2000, rng_seed=3)
    assert a == wald_monte_carlo(0.5, 0.05, trials=2000, rng_seed=3)
    n_small, rate_small = wald_monte_carlo(0.5, 0.05, trials=2000, rng_seed=3, shots=50)
    assert n_small == 50 and rate_small < a[1]


@pytest.mark.parametrize("n", range(2, 13))
def test_total_shots_formulas(n):
    assert total_shots("QGO", n, 10, 30) == 30 * (n * (n + 1) // 2 + n)
    assert total_shots("DAQGO1", n, 10, 30) == 10 * n * (n + 1) // 2 + 30 * 2 * n
    for alg in ("DAQGO2", "DAQGO3", "DAQGO4"):
        assert total_shots(alg, n, 10, 30) == 30 * n * (n + 1) // 2
    with pytest.raises(ValueError):
        total_shots("QA", n, 1, 1)


def test_sampled_measure_converges_and_is_seeded():
    exact = MeasureOutcome.from_distributions(MeasureKind.DAQGO4, {"ancilla": np.array([0.8, 0.2])})
    a = sampled_measure(exact, 1000, rng_seed=1)
    assert a.value == sampled_measure(exact, 1000, rng_seed=1).value
    assert sampled_measure(exact, 10**7, rng_seed=2).value == pytest.approx(0.6, abs=2e-3)
    with pytest.raises(ValueError):
        sampled_measure(exact, 0)


def test_sampled_energy_measure():
    inst = random_instance(3, 0)
    p = AnnealParams.plain(3, 1.0, 1.0)
    exact = measure(inst, p, p, MeasureSpec("ENERGY_QGO"))
    noisy = sampled_measure(exact, 10**6, rng_seed=0)
    assert noisy.value == pytest.approx(exact.value, abs=5e-3)


@pytest.mark.parametrize(
    "algorithm,spec",
    [
        ("QGO", MeasureSpec("ENERGY_QGO")),
        ("DAQGO1", MeasureSpec("DAQGO1", 0.5, 1.2)),
        ("DAQGO2", MeasureSpec("DAQGO2", 0.05)),
        ("DAQGO3", MeasureSpec("DAQGO3", 0.5)),
        ("DAQGO4", MeasureSpec("DAQGO4")),
    ],
)
def test_shot_plan_consistency(algorithm, spec):
    inst = random_instance(3, 5)
    cfg = SolveConfig(spec, 0.5, 1.5, 1.0)
    plan = estimate_shots_for_instance(inst, cfg, algorithm)
    assert not plan.degenerate
    assert plan.total == total_shots(algorithm, 3, plan.per_eval_selection, plan.per_eval_sign)
    assert plan.per_eval_selection >= 1 and plan.per_eval_sign >= 1
    assert plan.d == plan.d_selection


def test_shot_plan_rejects_wrong_measure():
    cfg = SolveConfig(MeasureSpec("DAQGO4"), 0.5, 1.5, 1.0)
    with pytest.raises(ValueError):
        estimate_shots_for_instance(random_instance(3, 0), cfg, "QGO")


def test_symmetric_instance_is_degenerate():
    # two symmetric, field-free spins respond identically: no selection gap
    cfg = SolveConfig(MeasureSpec("DAQGO4"), 0.5, 1.5, 1.0)
    plan = estimate_shots_for_instance(IsingInstance(2, {(0, 1): 1.0}), cfg, "DAQGO4")
    assert plan.degenerate and plan.total == 0


def test_size_scaling_examples():
    assert sample_size_normal(1.0, 1.0, 0.5, 2.58) == 54
    big = sample_size_normal(3.0, 5.0, 0.01)
    assert sample_size_normal(3.0, 5.0, 0.02) == pytest.approx(big / 4, abs=1)
    assert sample_size_wald(0.2, 0.03) == sample_size_wald(0.8, 0.03)
    assert sample_size_wald(1e-12, 0.05) == 1


def test_monte_carlo_overpowered_with_doubled_gap():
    N = sample_size_wald(0.5, 0.05)
    _, rate = wald_monte_carlo(0.5, 0.1, trials=10_000, rng_seed=0, shots=N)
    assert rate > 0.99


def test_sampled_measure_limits():
    inst = random_instance(2, 3)
    ref = AnnealParams.plain(2, 0.6, 0.5)
    exact = measure(inst, ref.with_field(0, 1.5), ref, MeasureSpec("DAQGO4"))
    p = exact.raw["P0"]
    big = sampled_measure(exact, 10**6, rng_seed=4)
    assert abs(big.raw["P0"] - p) < 3 * math.sqrt(p * (1 - p) / 10**6)
    one = sampled_measure(exact, 1, rng_seed=4)
    assert one.raw["P0"] in (0.0, 1.0)


def test_separable_dominant_field_needs_few_shots():
    strong = IsingInstance(3, {}, (2.0, 0.2, -0.1))
    plan = estimate_shots_for_instance(strong, SolveConfig(MeasureSpec("ENERGY_QGO"), 0.5, 1.5, 1.0), "QGO")
    weak = estimate_shots_for_instance(random_instance(3, 5), SolveConfig(MeasureSpec("ENERGY_QGO"), 0.5, 1.5, 1.0), "QGO")
    assert plan.per_eval_selection < weak.per_eval_selection and plan.per_eval_selection < 100


def test_qgo_plan_uses_energy_variances():
    inst = random_instance(3, 6)
    cfg = SolveConfig(MeasureSpec("ENERGY_QGO"), 0.5, 1.5, 1.0)
    plan = estimate_shots_for_instance(inst, cfg, "QGO")
    outcomes, ref = probe_round(inst, cfg, [0.0] * 3)
    best, second = outcomes[plan.notes["best"]], outcomes[plan.notes["second"]]
    expected = sample_size_normal(best.raw["variance"], second.raw["variance"], plan.d_selection)
    assert plan.per_eval_selection == expected
    assert plan.per_eval_sign == sample_size_normal(best.raw["variance"], ref.raw["variance"], abs(best.value))


def test_total_shot_examples():
    assert total_shots("QGO", 9, 100, 100) == 5400
    assert total_shots("DAQGO2", 9, 100, 80) == 4500
    assert total_shots("DAQGO1", 2, 10, 20) == 110
