# Export the DAQGO1 circuit as a flat gate list and check it by re-simulation.
#
# Run with:  python demos/05_export_circuit.py
from daqgo.circuits import MeasureSpec, marginal, measure_daqgo1
from daqgo.dynamics import AnnealParams
from daqgo.export import export_daqgo1_circuit, gate_counts, parse_gates, run_gates
from daqgo.ising import IsingInstance

inst = IsingInstance(2, {(0, 1): 0.4}, (0.3, -0.8))
ref = AnnealParams.plain(2, tau=0.6, b=0.5)
test = ref.with_field(0, 1.5)
spec = MeasureSpec("DAQGO1", t_sim=0.5, epsilon=1.2)

text = export_daqgo1_circuit(inst, test, ref, spec)
print(text)
gates = parse_gates(text)
print("single / two-qubit gates:", gate_counts(gates))

p0_gates = marginal(run_gates(gates, 5), [0])[0]
p0_exact = measure_daqgo1(inst, test, ref, spec).raw["P0(eps)"]
print(f"P0 from the gate list {p0_gates:.12f}, from the measure {p0_exact:.12f}")
