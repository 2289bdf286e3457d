"""Gate layer and the ancilla-readout circuits that score two annealing runs.

Every measure compares a *test* annealing run (``params_test``) with a
*reference* run (``params_ref``) sharing the same annealing time:

ENERGY_QGO
    Energy expectation of a single annealing output (no ancilla).
DAQGO1
    Both outputs are prepared on separate registers; the ancilla interferes
    ``exp(-i Hz t)`` on one register with ``exp(+i Hz t)`` on the other and a
    phase ``exp(i eps t)``. Selection uses ``P0(0)``, the sign uses
    ``P0(eps) - P0(0)``.
DAQGO2 / DAQGO3
    Controlled annealing blocks in superposition, a CZ and a controlled
    ``exp(+i Hz t)``; branch-conditional probability differences ``Q0, Q1``.
    DAQGO2 scores ``(Q0 + Q1) / t``, DAQGO3 scores ``Q0``.
DAQGO4
    Hadamard-test style interference of the two outputs; scores ``P0 - P1``,
    which equals ``-Im<psi_T|psi_R>``.

All probabilities are exact; :func:`daqgo.shots.sampled_measure` draws finite
shots from the distributions stored on a :class:`MeasureOutcome`.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .dynamics import AnnealParams, anneal, controlled_evolve, diagonal_phase_evolve
from .ising import IsingInstance

__all__ = [
    "MeasureKind",
    "MeasureSpec",
    "MeasureOutcome",
    "apply_1q",
    "gate_h",
    "gate_x",
    "gate_rx_half_pi",
    "gate_ry",
    "gate_rz",
    "gate_zrot",
    "gate_cz",
    "gate_cx",
    "hadamard_all",
    "marginal",
    "measure",
    "measure_energy_qgo",
    "measure_daqgo1",
    "measure_daqgo2",
    "measure_daqgo3",
    "measure_daqgo4",
    "daqgo1_state",
    "daqgo2_state",
    "daqgo4_state",
    "predict_circuit_fidelity",
]

_SQRT1_2 = 1.0 / math.sqrt(2.0)
H_MATRIX = np.array([[1, 1], [1, -1]], dtype=np.complex128) * _SQRT1_2
RX_HALF_PI = np.array([[1, -1j], [-1j, 1]], dtype=np.complex128) * _SQRT1_2


class MeasureKind(str, enum.Enum):
    ENERGY_QGO = "ENERGY_QGO"
    DAQGO1 = "DAQGO1"
    DAQGO2 = "DAQGO2"
    DAQGO3 = "DAQGO3"
    DAQGO4 = "DAQGO4"


@dataclass(frozen=True)
class MeasureSpec:
    """Which measure to evaluate. ``t_sim`` is the Hz-simulation time, ``epsilon`` the DAQGO1 phase rate."""

    kind: MeasureKind
    t_sim: float = 0.0
    epsilon: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", MeasureKind(self.kind))
        if self.t_sim < 0 or self.epsilon < 0:
            raise ValueError("t_sim and epsilon must be non-negative")


@dataclass
class MeasureOutcome:
    """Score of one test/reference comparison.

    ``dists`` holds the measured-register distribution of every circuit run
    (DAQGO1 has two runs). ``value`` and ``raw`` are always derived from
    ``dists`` so a shot-sampled copy is reduced exactly like the exact one.
    """

    kind: MeasureKind
    value: float
    raw: dict[str, float]
    dists: dict[str, np.ndarray] = field(repr=False)
    t_sim: float = 0.0
    levels: np.ndarray | None = field(default=None, repr=False)

    @property
    def selection(self) -> float:
        """Score whose maximum picks the variable to fix (``-P0(0)`` for DAQGO1, ``|g|`` otherwise)."""
        if self.kind is MeasureKind.DAQGO1:
            return -self.raw["P0(0)"]
        return abs(self.value)

    @classmethod
    def from_distributions(
        cls,
        kind: MeasureKind,
        dists: Mapping[str, np.ndarray],
        t_sim: float = 0.0,
        levels: np.ndarray | None = None,
    ) -> "MeasureOutcome":
        kind = MeasureKind(kind)
        dists = {k: np.asarray(v, dtype=float) for k, v in dists.items()}
        if kind is MeasureKind.ENERGY_QGO:
            p = dists["z"]
            e1 = float(p @ levels)
            e2 = float(p @ levels**2)
            raw = {"energy": e1, "energy_sq": e2, "variance": max(e2 - e1 * e1, 0.0)}
            value = e1
        elif kind is MeasureKind.DAQGO1:
            p00, p0e = float(dists["eps=0"][0]), float(dists["eps"][0])
            raw = {"P0(0)": p00, "P0(eps)": p0e}
            value = p0e - p00
        elif kind is MeasureKind.DAQGO4:
            p0, p1 = (float(x) for x in dists["ancilla"])
            raw = {"P0": p0, "P1": p1}
            value = p0 - p1
        else:
            # joint distribution indexed by a1 + 2*a2, a1 the measured ancilla, a2 the branch selector
            p = dists["ancillas"]
            b0, b1 = p[0] + p[1], p[2] + p[3]
            q0 = (p[0] - p[1]) / b0 if b0 > 0 else 0.0
            q1 = (p[2] - p[3]) / b1 if b1 > 0 else 0.0
            raw = {
                "P(a2=0)": float(b0),
                "P0|0": float(p[0] / b0) if b0 > 0 else 0.0,
                "P0|1": float(p[2] / b1) if b1 > 0 else 0.0,
                "Q0": float(q0),
                "Q1": float(q1),
                "P(a1=0)": float(p[0] + p[2]),
            }
            if kind is MeasureKind.DAQGO2:
                if t_sim <= 0:
                    raise ZeroDivisionError("DAQGO2 needs t_sim > 0")
                value = float((q0 + q1) / t_sim)
            else:
                value = float(q0)
        return cls(kind, float(value), raw, dists, t_sim, levels)

    def to_json(self) -> str:
        return json.dumps({"kind": self.kind.value, "value": self.value, "raw": self.raw, "t_sim": self.t_sim})


# -- gates ---------------------------------------------------------------------


def _nqubits(psi: np.ndarray) -> int:
    n = psi.size.bit_length() - 1
    if psi.size != 1 << n:
        raise ValueError("state length must be a power of two")
    return n


def _check_qubit(n: int, *qs: int) -> None:
    for q in qs:
        if not 0 <= q < n:
            raise IndexError(f"qubit {q} out of range for a {n}-qubit state")
    if len(set(qs)) != len(qs):
        raise ValueError("qubit indices must be distinct")


def apply_1q(psi: np.ndarray, q: int, mat: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=np.complex128)
    n = _nqubits(psi)
    _check_qubit(n, q)
    view = psi.reshape(1 << (n - q - 1), 2, 1 << q)
    return np.einsum("ab,ibj->iaj", mat, view).reshape(-1)


def gate_h(psi, q):
    return apply_1q(psi, q, H_MATRIX)


def gate_x(psi, q):
    return apply_1q(psi, q, np.array([[0, 1], [1, 0]], dtype=np.complex128))


def gate_rx_half_pi(psi, q):
    return apply_1q(psi, q, RX_HALF_PI)


def gate_ry(psi, q, angle):
    """``exp(-i angle Y / 2)``."""
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return apply_1q(psi, q, np.array([[c, -s], [s, c]], dtype=np.complex128))


def gate_rz(psi, q, angle):
    """Phase shift ``diag(1, exp(i angle))`` on ``|1>`` (the ancilla phase gate)."""
    return apply_1q(psi, q, np.diag([1.0, np.exp(1j * angle)]))


def gate_zrot(psi, q, angle):
    """Symmetric rotation ``exp(-i angle Z / 2)`` (OpenQASM ``rz``)."""
    return apply_1q(psi, q, np.diag([np.exp(-0.5j * angle), np.exp(0.5j * angle)]))


def gate_cz(psi, qc, qt):
    psi = np.array(psi, dtype=np.complex128)
    n = _nqubits(psi)
    _check_qubit(n, qc, qt)
    idx = np.arange(psi.size)
    psi[((idx >> qc) & 1 & (idx >> qt)) == 1] *= -1
    return psi


def gate_cx(psi, qc, qt):
    psi = np.asarray(psi, dtype=np.complex128)
    n = _nqubits(psi)
    _check_qubit(n, qc, qt)
    idx = np.arange(psi.size)
    src = np.where((idx >> qc) & 1, idx ^ (1 << qt), idx)
    return psi[src]


def hadamard_all(psi, qubits):
    for q in qubits:
        psi = gate_h(psi, q)
    return psi


def marginal(psi: np.ndarray, qubits) -> np.ndarray:
    """Outcome distribution of ``qubits``; outcome index bit ``k`` is ``qubits[k]``."""
    probs = np.abs(np.asarray(psi)) ** 2
    idx = np.arange(probs.size)
    out_idx = np.zeros(probs.size, dtype=np.int64)
    for k, q in enumerate(qubits):
        out_idx |= ((idx >> q) & 1) << k
    return np.bincount(out_idx, weights=probs, minlength=1 << len(qubits))


def _basis0(nqubits: int) -> np.ndarray:
    psi = np.zeros(1 << nqubits, dtype=np.complex128)
    psi[0] = 1.0
    return psi


def _check_pair(inst: IsingInstance, params_test: AnnealParams, params_ref: AnnealParams) -> None:
    if params_test.tau != params_ref.tau:
        raise ValueError(f"test and reference blocks must share tau ({params_test.tau} != {params_ref.tau})")
    for p in (params_test, params_ref):
        if len(p.c) != inst.n:
            raise ValueError("y-field length does not match the instance")


# -- measures ------------------------------------------------------------------


def measure_energy_qgo(inst: IsingInstance, params: AnnealParams, steps: int | None = None) -> MeasureOutcome:
    psi = anneal(inst, params, steps)
    return MeasureOutcome.from_distributions(MeasureKind.ENERGY_QGO, {"z": np.abs(psi) ** 2}, levels=inst.energies)


def daqgo1_state(inst, params_test, params_ref, t_sim, steps=None, psi_T=None, psi_R=None) -> np.ndarray:
    """State of the 2n+1 qubit DAQGO1 circuit just before the ancilla phase shift.

    Register A (test) is qubits ``[0, n)``, register B (reference) ``[n, 2n)``,
    the ancilla is qubit ``2n``. Both annealing blocks act uncontrolled on
    ``|0...0>`` inputs, so their outputs are formed as a product state.
    """
    _check_pair(inst, params_test, params_ref)
    n = inst.n
    if psi_T is None:
        psi_T = anneal(inst, params_test, steps)
    if psi_R is None:
        psi_R = anneal(inst, params_ref, steps)
    psi = np.kron(_basis0(1), np.kron(psi_R, psi_T))
    anc = 2 * n
    psi = gate_h(psi, anc)
    psi = diagonal_phase_evolve(inst, t_sim, psi, control=anc, sign=1, polarity="closed", offset=0)
    psi = diagonal_phase_evolve(inst, t_sim, psi, control=anc, sign=-1, polarity="closed", offset=n)
    return psi


def _daqgo1_readout(psi: np.ndarray, anc: int, phase: float) -> np.ndarray:
    psi = gate_rz(psi, anc, phase)
    psi = gate_h(psi, anc)
    return marginal(psi, [anc])


def measure_daqgo1(inst, params_test, params_ref, spec: MeasureSpec, steps=None) -> MeasureOutcome:
    pre = daqgo1_state(inst, params_test, params_ref, spec.t_sim, steps)
    anc = 2 * inst.n
    dists = {
        "eps=0": _daqgo1_readout(pre, anc, 0.0),
        "eps": _daqgo1_readout(pre, anc, spec.epsilon * spec.t_sim),
    }
    return MeasureOutcome.from_distributions(MeasureKind.DAQGO1, dists, spec.t_sim)


def daqgo2_state(inst, params_test, params_ref, t_sim, steps=None) -> np.ndarray:
    """Final (pre-measurement) state of the n+2 qubit DAQGO2/3 circuit.

    System qubits ``[0, n)``, measured ancilla ``a1 = n``, branch ancilla ``a2 = n+1``.
    """
    _check_pair(inst, params_test, params_ref)
    n = inst.n
    a1, a2 = n, n + 1
    psi = hadamard_all(_basis0(n + 2), range(n))
    psi = gate_rx_half_pi(psi, a1)
    psi = gate_h(psi, a2)
    for pols, params in (
        (("open", "open"), params_test),
        (("open", "closed"), params_ref),
        (("closed", "open"), params_test),
        (("closed", "closed"), params_ref),
    ):
        psi = controlled_evolve(inst, params, psi, (a1, a2), pols, steps=steps)
    psi = gate_cz(psi, a1, a2)
    psi = diagonal_phase_evolve(inst, t_sim, psi, control=a1, sign=-1, polarity="closed")
    psi = gate_h(psi, a1)
    return gate_h(psi, a2)


def _measure_daqgo23(kind, inst, params_test, params_ref, spec, steps):
    psi = daqgo2_state(inst, params_test, params_ref, spec.t_sim, steps)
    dist = marginal(psi, [inst.n, inst.n + 1])
    return MeasureOutcome.from_distributions(kind, {"ancillas": dist}, spec.t_sim)


def measure_daqgo2(inst, params_test, params_ref, spec: MeasureSpec, steps=None) -> MeasureOutcome:
    if spec.t_sim <= 0:
        raise ZeroDivisionError("DAQGO2 divides by t_sim; it must be positive")
    return _measure_daqgo23(MeasureKind.DAQGO2, inst, params_test, params_ref, spec, steps)


def measure_daqgo3(inst, params_test, params_ref, spec: MeasureSpec, steps=None) -> MeasureOutcome:
    return _measure_daqgo23(MeasureKind.DAQGO3, inst, params_test, params_ref, spec, steps)


def daqgo4_state(inst, params_test, params_ref, steps=None) -> np.ndarray:
    """Final state of the n+1 qubit DAQGO4 circuit (ancilla is qubit ``n``)."""
    _check_pair(inst, params_test, params_ref)
    n = inst.n
    psi = hadamard_all(_basis0(n + 1), range(n))
    psi = gate_rx_half_pi(psi, n)
    psi = controlled_evolve(inst, params_ref, psi, n, "open", steps=steps)
    psi = controlled_evolve(inst, params_test, psi, n, "closed", steps=steps)
    return gate_h(psi, n)


def measure_daqgo4(inst, params_test, params_ref, spec: MeasureSpec | None = None, steps=None) -> MeasureOutcome:
    psi = daqgo4_state(inst, params_test, params_ref, steps)
    return MeasureOutcome.from_distributions(MeasureKind.DAQGO4, {"ancilla": marginal(psi, [inst.n])})


def measure(inst, params_test, params_ref, spec: MeasureSpec, steps=None) -> MeasureOutcome:
    """Dispatch on ``spec.kind``; the energy measure scores ``params_test`` alone."""
    kind = spec.kind
    if kind is MeasureKind.ENERGY_QGO:
        return measure_energy_qgo(inst, params_test, steps)
    fn = {
        MeasureKind.DAQGO1: measure_daqgo1,
        MeasureKind.DAQGO2: measure_daqgo2,
        MeasureKind.DAQGO3: measure_daqgo3,
        MeasureKind.DAQGO4: measure_daqgo4,
    }[kind]
    return fn(inst, params_test, params_ref, spec, steps=steps)


def predict_circuit_fidelity(f1: float, n1: int, f2: float, n2: int) -> float:
    """Product-of-gate-fidelities estimate ``f1**n1 * f2**n2``."""
    if not (0.0 <= f1 <= 1.0 and 0.0 <= f2 <= 1.0):
        raise ValueError("gate fidelities must lie in [0, 1]")
    return f1**n1 * f2**n2
