# Greedy fixing of the y-field signs, one variable per round.
#
# Run with:  python demos/03_greedy_solve.py
from daqgo.circuits import MeasureSpec
from daqgo.ising import brute_force_ground, random_instance
from daqgo.qgo import CalibrationCache, SolveConfig, is_success, solve

inst = random_instance(5, rng_seed=3)
ground = brute_force_ground(inst)
tau = 1.0

# b and |c_opt| are tuned once on the uniform ferromagnet of the same size
cal = CalibrationCache().get(inst.n, tau)
print("calibration:", cal)

for name, spec in [
    ("QGO", MeasureSpec("ENERGY_QGO")),
    ("DAQGO2", MeasureSpec("DAQGO2", 0.05)),
    ("DAQGO4", MeasureSpec("DAQGO4")),
]:
    trace = solve(inst, SolveConfig(spec, cal["b_opt"], cal["c_opt"], tau))
    order = [r.fixed_index for r in trace.iterations]
    print(f"{name:7s} solution={trace.solution} fix order={order} "
          f"evaluations={trace.evaluation_count} solved={is_success(inst, trace.solution, ground)}")
print("ground:", ground.configs)
