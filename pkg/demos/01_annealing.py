# Plain annealing versus annealing with a y-field, on a small random instance.
#
# Run with:  python demos/01_annealing.py
import numpy as np

from daqgo.dynamics import AnnealParams, anneal
from daqgo.ising import brute_force_ground, random_instance, spectral_gap

# %% a seeded 4-spin instance and its exact answer
inst = random_instance(4, rng_seed=7)
ground = brute_force_ground(inst)
print("couplings:", {k: round(v, 3) for k, v in inst.couplings.items()})
print("fields:   ", np.round(inst.fields, 3))
print("ground energy", round(ground.energy, 4), "at", ground.configs, " gap", round(spectral_gap(inst), 4))

# %% success probability of plain annealing grows with the annealing time
for tau in (0.5, 2.0, 10.0, 40.0):
    psi = anneal(inst, AnnealParams.plain(inst.n, tau, b=1.0))
    p = np.sum(np.abs(psi[list(ground.indices)]) ** 2)
    print(f"tau={tau:5.1f}  P(ground)={p:.3f}")

# %% a y-field pointing at the right answer helps a lot at short times
spins = np.array(ground.configs[0])
for tau in (0.5, 2.0):
    c = tuple(1.5 * spins / tau)
    psi = anneal(inst, AnnealParams(tau, 1.0, c))
    p = np.sum(np.abs(psi[list(ground.indices)]) ** 2)
    print(f"tau={tau:5.1f}  y-field along the solution  P(ground)={p:.3f}")
