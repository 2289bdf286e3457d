# The four ancilla readouts compared against quantities computed directly
# from the two annealing outputs.
#
# Run with:  python demos/02_readout_circuits.py
import numpy as np

from daqgo.circuits import MeasureSpec, measure
from daqgo.dynamics import AnnealParams, anneal
from daqgo.ising import random_instance

inst = random_instance(3, rng_seed=1)
ref = AnnealParams.plain(3, tau=1.0, b=0.5)
test = ref.with_field(0, 1.5)
psi_T, psi_R = anneal(inst, test), anneal(inst, ref)

E = inst.energies
dE = np.abs(psi_T) ** 2 @ E - np.abs(psi_R) ** 2 @ E
overlap = np.vdot(psi_R, psi_T)
print(f"direct:  E_T - E_R = {dE:+.5f}   Im<R|T> = {overlap.imag:+.5f}")

# %% DAQGO2 approaches the energy difference as the simulation time shrinks
for t in (0.4, 0.1, 0.025):
    out = measure(inst, test, ref, MeasureSpec("DAQGO2", t))
    print(f"DAQGO2 t={t:<6} value={out.value:+.5f}  error={abs(out.value - dE):.2e}")

# %% DAQGO3 at t=0 and DAQGO4 both read the imaginary overlap
print("DAQGO3 t=0  ", f"{measure(inst, test, ref, MeasureSpec('DAQGO3', 0.0)).value:+.5f}")
print("DAQGO4      ", f"{measure(inst, test, ref, MeasureSpec('DAQGO4')).value:+.5f}")

# %% DAQGO1 works with populations only: P0(eps) - P0(0)
out = measure(inst, test, ref, MeasureSpec("DAQGO1", 0.5, 1.2))
print("DAQGO1      ", out.raw, f"value={out.value:+.5f}")
