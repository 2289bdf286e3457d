"""Greedy y-field quantum annealing with digital-analog readout circuits.

Submodules: :mod:`~daqgo.ising` (instances, exhaustive ground states),
:mod:`~daqgo.dynamics` (RK4 state-vector propagation), :mod:`~daqgo.circuits`
(gates and the DAQGO measures), :mod:`~daqgo.export` (gate-list export),
:mod:`~daqgo.qgo` (greedy solver, calibration, parameter search),
:mod:`~daqgo.shots` (sample sizes, shot sampling) and :mod:`~daqgo.bench`
(experiment runners and CLI).
"""

from .circuits import MeasureKind, MeasureOutcome, MeasureSpec, measure, predict_circuit_fidelity
from .dynamics import AnnealParams, anneal, evolve, initial_plus_state
from .ising import IsingInstance, brute_force_ground, classical_energy, random_instance
from .qgo import SolveConfig, SolveTrace, calibrate_ferromagnet, qa_success_probability, solve
from .shots import ShotPlan, sample_size_normal, sample_size_wald, total_shots

__version__ = "0.1.0"

__all__ = [
    "AnnealParams",
    "IsingInstance",
    "MeasureKind",
    "MeasureOutcome",
    "MeasureSpec",
    "ShotPlan",
    "SolveConfig",
    "SolveTrace",
    "anneal",
    "brute_force_ground",
    "calibrate_ferromagnet",
    "classical_energy",
    "evolve",
    "initial_plus_state",
    "measure",
    "predict_circuit_fidelity",
    "qa_success_probability",
    "random_instance",
    "sample_size_normal",
    "sample_size_wald",
    "solve",
    "total_shots",
]
