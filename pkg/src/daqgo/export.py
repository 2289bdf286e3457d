"""Gate-list export of the DAQGO1 circuit for gate-model hardware.

Qubit layout follows the hardware experiment: ``q0`` is the ancilla,
``q1..qn`` hold the test state and ``q(n+1)..q(2n)`` the reference state
(system qubit ``i`` of a register is its ``i``-th wire).

The annealing outputs are precomputed and loaded with a multiplexed-rotation
state preparation (uniformly controlled RY, then RZ cascades, each multiplexor
compiled with a Gray-code CX pattern). The controlled ``exp(-/+ i Hz t)``
blocks are split as ``V^(1/2) exp(i s t/2 Z_a Hz)``; the ancilla-coupled part
is compiled to parity rotations on the ancilla (one RZ per field and per
coupling, CX ladders between them) and the uncontrolled ``V^(1/2)`` is either
folded into the prepared state (``full_phase=True``) or dropped, since every
later operation on the system registers is diagonal and cannot reveal it.
For the same reason the default mode prepares only amplitude magnitudes.

Text format, one gate per line (``#`` starts a comment)::

    H 0
    RY 2,1.2309594173407747
    CX 2,1
    RZ 0,-0.25
    P 0,0.6

Gate semantics: ``H``; ``RY q,a`` = exp(-i a Y/2); ``RZ q,a`` = exp(-i a Z/2);
``P q,a`` = diag(1, exp(i a)); ``CX c,t``.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from . import circuits
from .circuits import MeasureSpec
from .dynamics import AnnealParams, anneal
from .ising import IsingInstance

__all__ = [
    "Gate",
    "MAX_EXPORT_QUBITS",
    "uniform_rotation",
    "state_preparation",
    "parity_phase_block",
    "daqgo1_gates",
    "export_daqgo1_circuit",
    "format_gates",
    "parse_gates",
    "to_qasm",
    "run_gates",
    "gate_counts",
]

MAX_EXPORT_QUBITS = 5
_ZERO = 1e-12
_ARITY = {"H": (1, False), "RY": (1, True), "RZ": (1, True), "P": (1, True), "CX": (2, False)}


class Gate(NamedTuple):
    name: str
    qubits: tuple[int, ...]
    angle: float | None = None


def _gray(i: int) -> int:
    return i ^ (i >> 1)


def uniform_rotation(axis: str, angles: Sequence[float], controls: Sequence[int], target: int) -> list[Gate]:
    """Multiplexed rotation: target gets ``R(angles[c])`` for control pattern ``c``.

    Bit ``k`` of ``c`` is the value of ``controls[k]``. Returns an empty list
    when every angle vanishes.
    """
    angles = np.asarray(angles, dtype=float)
    m = len(controls)
    if angles.shape != (1 << m,):
        raise ValueError(f"{m} controls need {1 << m} angles")
    if np.all(np.abs(angles) < _ZERO):
        return []
    if m == 0:
        return [Gate(axis, (target,), float(angles[0]))]
    size = 1 << m
    grays = [_gray(i) for i in range(size)]
    signs = np.array([[(-1) ** bin(c & g).count("1") for g in grays] for c in range(size)])
    theta = signs.T @ angles / size
    gates = []
    for i in range(size):
        if abs(theta[i]) >= _ZERO:
            gates.append(Gate(axis, (target,), float(theta[i])))
        flipped = grays[i] ^ grays[(i + 1) % size]
        gates.append(Gate("CX", (controls[flipped.bit_length() - 1], target)))
    return gates


def _cancel_cx_pairs(gates: list[Gate]) -> list[Gate]:
    out: list[Gate] = []
    for g in gates:
        if out and g.name == "CX" and out[-1] == g:
            out.pop()
        else:
            out.append(g)
    return out


def state_preparation(psi: np.ndarray, wires: Sequence[int], phases: bool = True) -> list[Gate]:
    """Gates taking ``|0...0>`` on ``wires`` to ``psi`` (up to a global phase).

    ``wires[i]`` carries bit ``i`` of the amplitude index. With
    ``phases=False`` only the magnitudes ``|psi|`` are prepared.
    """
    psi = np.asarray(psi, dtype=np.complex128)
    k = len(wires)
    if psi.shape != (1 << k,):
        raise ValueError(f"state of length {psi.size} does not match {k} wires")
    mags = np.abs(psi)
    gates: list[Gate] = []
    # magnitudes: top wire first, each lower wire conditioned on all higher ones
    for j in range(k - 1, -1, -1):
        controls = list(wires[j + 1:])
        weights = (mags**2).reshape(1 << (k - 1 - j), 2, 1 << j).sum(axis=2)
        angles = 2.0 * np.arctan2(np.sqrt(weights[:, 1]), np.sqrt(weights[:, 0]))
        gates += uniform_rotation("RY", angles, controls, wires[j])
    if phases:
        phi = np.where(mags > _ZERO, np.angle(psi), 0.0)
        # bottom wire first; each level passes the mean phase of its pair upward
        for j in range(k):
            pairs = phi.reshape(-1, 2)
            diff = pairs[:, 1] - pairs[:, 0]
            diff = (diff + np.pi) % (2 * np.pi) - np.pi
            mux = uniform_rotation("RZ", diff, list(wires[j + 1:]), wires[j])
            gates += mux[::-1]
            phi = pairs[:, 0] + diff / 2
    return _cancel_cx_pairs(gates)


def parity_phase_block(inst: IsingInstance, t: float, sign: int, ancilla: int, wires: Sequence[int]) -> list[Gate]:
    """Gates for ``exp(i sign (t/2) Z_a Hz)`` with Hz on ``wires``.

    Each Z-string term of Hz becomes one RZ on the ancilla after CXs have
    accumulated the string's parity onto it; consecutive terms share CXs.
    """
    terms = [(frozenset([i]), h) for i, h in enumerate(inst.fields) if h != 0.0]
    terms += [(frozenset(pair), J) for pair, J in inst.couplings.items() if J != 0.0]
    gates: list[Gate] = []
    current: frozenset = frozenset()
    remaining = list(terms)
    while remaining:
        nxt = min(range(len(remaining)), key=lambda r: (len(current ^ remaining[r][0]), r))
        support, coeff = remaining.pop(nxt)
        for q in sorted(current ^ support):
            gates.append(Gate("CX", (wires[q], ancilla)))
        # exp(-i sign (t/2) coeff Z_a Z_S) = RZ(sign t coeff) after parity accumulation
        gates.append(Gate("RZ", (ancilla,), float(sign * t * coeff)))
        current = support
    for q in sorted(current):
        gates.append(Gate("CX", (wires[q], ancilla)))
    return gates


def daqgo1_gates(
    inst: IsingInstance,
    spec: MeasureSpec,
    psi_T: np.ndarray,
    psi_R: np.ndarray,
    full_phase: bool = False,
) -> list[Gate]:
    n = inst.n
    if not 2 <= n <= MAX_EXPORT_QUBITS:
        raise ValueError(f"export supports 2 <= n <= {MAX_EXPORT_QUBITS}, got n={n}")
    t = spec.t_sim
    wires_T = [1 + i for i in range(n)]
    wires_R = [1 + n + i for i in range(n)]
    psi_T = np.asarray(psi_T, dtype=np.complex128)
    psi_R = np.asarray(psi_R, dtype=np.complex128)
    if full_phase:
        half = np.exp(-0.5j * t * inst.energies)
        psi_T = half * psi_T
        psi_R = half.conj() * psi_R
    gates = [Gate("H", (0,))]
    gates += state_preparation(psi_T, wires_T, phases=full_phase)
    gates += state_preparation(psi_R, wires_R, phases=full_phase)
    gates += parity_phase_block(inst, t, +1, 0, wires_T)
    gates += parity_phase_block(inst, t, -1, 0, wires_R)
    phase = spec.epsilon * t
    if abs(phase) >= _ZERO:
        gates.append(Gate("P", (0,), float(phase)))
    gates.append(Gate("H", (0,)))
    return gates


def export_daqgo1_circuit(
    inst: IsingInstance,
    params_test: AnnealParams,
    params_ref: AnnealParams,
    spec: MeasureSpec,
    psi_T: np.ndarray | None = None,
    psi_R: np.ndarray | None = None,
    full_phase: bool = False,
    fmt: str = "text",
) -> str:
    """Render the DAQGO1 circuit as gate-list text (``fmt="text"``) or OpenQASM 2.0 (``"qasm"``).

    ``psi_T``/``psi_R`` default to fresh annealing runs with the given params.
    """
    if params_test.tau != params_ref.tau:
        raise ValueError("test and reference blocks must share tau")
    if psi_T is None:
        psi_T = anneal(inst, params_test)
    if psi_R is None:
        psi_R = anneal(inst, params_ref)
    gates = daqgo1_gates(inst, spec, psi_T, psi_R, full_phase)
    nq = 2 * inst.n + 1
    if fmt == "qasm":
        return to_qasm(gates, nq)
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    header = (
        f"# DAQGO1 n={inst.n} qubits={nq} tau={params_test.tau!r} t={spec.t_sim!r} eps={spec.epsilon!r}\n"
        "# q0 ancilla; test register q1..q{0}; reference register q{1}..q{2}\n".format(inst.n, inst.n + 1, 2 * inst.n)
    )
    return header + format_gates(gates)


def format_gates(gates: Sequence[Gate]) -> str:
    lines = []
    for g in gates:
        fields = [str(q) for q in g.qubits]
        if g.angle is not None:
            fields.append(repr(float(g.angle)))
        lines.append(f"{g.name} {','.join(fields)}")
    return "\n".join(lines) + "\n"


def parse_gates(text: str) -> list[Gate]:
    gates = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        name, _, rest = line.partition(" ")
        if name not in _ARITY:
            raise ValueError(f"line {lineno}: unknown gate {name!r}")
        arity, has_angle = _ARITY[name]
        parts = [p for p in rest.replace(" ", "").split(",") if p]
        if len(parts) != arity + has_angle:
            raise ValueError(f"line {lineno}: {name} expects {arity} qubit(s){' and an angle' if has_angle else ''}")
        qubits = tuple(int(p) for p in parts[:arity])
        angle = float(parts[arity]) if has_angle else None
        gates.append(Gate(name, qubits, angle))
    return gates


def to_qasm(gates: Sequence[Gate], nqubits: int) -> str:
    names = {"H": "h", "RY": "ry", "RZ": "rz", "P": "u1", "CX": "cx"}
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{nqubits}];", "creg c[1];"]
    for g in gates:
        args = ",".join(f"q[{q}]" for q in g.qubits)
        param = f"({g.angle!r})" if g.angle is not None else ""
        lines.append(f"{names[g.name]}{param} {args};")
    lines.append("measure q[0] -> c[0];")
    return "\n".join(lines) + "\n"


def run_gates(gates: Sequence[Gate], nqubits: int, psi: np.ndarray | None = None) -> np.ndarray:
    """Simulate a gate list on ``|0...0>`` (or on ``psi``) with the package gate kernels."""
    if psi is None:
        psi = np.zeros(1 << nqubits, dtype=np.complex128)
        psi[0] = 1.0
    for g in gates:
        if g.name == "H":
            psi = circuits.gate_h(psi, g.qubits[0])
        elif g.name == "RY":
            psi = circuits.gate_ry(psi, g.qubits[0], g.angle)
        elif g.name == "RZ":
            psi = circuits.gate_zrot(psi, g.qubits[0], g.angle)
        elif g.name == "P":
            psi = circuits.gate_rz(psi, g.qubits[0], g.angle)
        elif g.name == "CX":
            psi = circuits.gate_cx(psi, *g.qubits)
        else:
            raise ValueError(f"unknown gate {g.name!r}")
    return psi


def gate_counts(gates: Sequence[Gate]) -> tuple[int, int]:
    """``(single-qubit, two-qubit)`` operation counts."""
    two = sum(1 for g in gates if len(g.qubits) == 2)
    return len(gates) - two, two
