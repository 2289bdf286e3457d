# How many circuit repetitions does a greedy run need?
#
# Run with:  python demos/04_shot_budget.py
from daqgo.circuits import MeasureSpec
from daqgo.ising import random_instance
from daqgo.qgo import SolveConfig
from daqgo.shots import estimate_shots_for_instance, sample_size_wald, wald_monte_carlo

# %% the Wald size for a 0.05 gap around p=0.5, and a simulation of it
N = sample_size_wald(0.5, 0.05)
_, rate = wald_monte_carlo(0.5, 0.05, trials=20_000, rng_seed=0)
print(f"Wald N={N}, correct ordering in {rate:.1%} of simulated data sets")

# %% first-round shot plans on one instance
inst = random_instance(4, rng_seed=11)
for name, spec in [
    ("QGO", MeasureSpec("ENERGY_QGO")),
    ("DAQGO1", MeasureSpec("DAQGO1", 0.5, 1.2)),
    ("DAQGO3", MeasureSpec("DAQGO3", 0.5)),
    ("DAQGO4", MeasureSpec("DAQGO4")),
]:
    plan = estimate_shots_for_instance(inst, SolveConfig(spec, 0.5, 1.5, 1.0), name)
    print(f"{name:7s} selection={plan.per_eval_selection:>7d} sign={plan.per_eval_sign:>7d} total={plan.total:>9d}")
