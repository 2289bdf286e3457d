"""Schrodinger propagation of the annealing Hamiltonian with a local y-field.

    H(t) = A(t) Hz + B(t) Hx + sum_i C_i(t) Hy_i

    A(t) = a t / tau,  B(t) = b (1 - t / tau),  C_i(t) = c_i sin^2(pi t / tau)
    Hx = -sum_i X_i,   Hy_i = -Y_i

States are plain complex128 numpy arrays of length ``2**n_qubits``. The system
register occupies ``n`` consecutive qubits starting at ``offset`` (0 unless
several registers share one state); ancillas sit on the higher qubits.
Integration is fixed-step RK4 and the Hamiltonian is only ever applied through
bit-indexed amplitude updates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numba import njit

from .ising import IsingInstance

__all__ = [
    "AnnealParams",
    "Propagator",
    "IntegrationError",
    "MIN_STEPS",
    "NORM_TOL",
    "default_steps",
    "schedule",
    "initial_plus_state",
    "hamiltonian_apply",
    "evolve",
    "anneal",
    "controlled_evolve",
    "diagonal_phase_evolve",
    "dump_state",
]

MIN_STEPS = 100
NORM_TOL = 1e-8


class IntegrationError(RuntimeError):
    """Raised when the integrated state drifts off the unit sphere."""


@dataclass(frozen=True)
class AnnealParams:
    tau: float
    b: float
    c: tuple[float, ...]
    a: float = field(default=1.0)

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.a != 1.0:
            raise ValueError("the problem-Hamiltonian scale a is fixed to 1")
        object.__setattr__(self, "tau", float(self.tau))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "c", tuple(float(x) for x in self.c))

    @classmethod
    def plain(cls, n: int, tau: float, b: float) -> "AnnealParams":
        """Conventional annealing: no y-field."""
        return cls(tau, b, (0.0,) * n)

    def with_field(self, i: int, value: float) -> "AnnealParams":
        c = list(self.c)
        c[i] = value
        return AnnealParams(self.tau, self.b, tuple(c), self.a)


def default_steps(tau: float) -> int:
    return max(1000, math.ceil(1000 * tau))


def schedule(params: AnnealParams, t: float) -> tuple[float, float, np.ndarray]:
    """Return ``(A(t), B(t), C(t))``."""
    s = t / params.tau
    C = np.asarray(params.c) * math.sin(math.pi * s) ** 2
    return params.a * s, params.b * (1.0 - s), C


def _check_params(inst: IsingInstance, params: AnnealParams) -> None:
    if len(params.c) != inst.n:
        raise ValueError(f"y-field has {len(params.c)} entries, instance has n={inst.n}")


# -- kernels -----------------------------------------------------------------


@njit(cache=True, nogil=True)
def _apply(psi, out, energies, n, A, B, C):
    # psi, out: (rows, 2**n); out = H psi, H = A Hz - B sum X - sum C_i Y_i
    rows, dim = psi.shape
    for r in range(rows):
        for k in range(dim):
            acc = A * energies[k] * psi[r, k]
            for i in range(n):
                m = 1 << i
                if k & m:
                    acc += complex(-B, -C[i]) * psi[r, k ^ m]
                else:
                    acc += complex(-B, C[i]) * psi[r, k ^ m]
            out[r, k] = acc


@njit(cache=True, nogil=True)
def _rk4(psi, energies, n, a, b, c, tau, steps):
    rows, dim = psi.shape
    dt = tau / steps
    k1 = np.empty_like(psi)
    k2 = np.empty_like(psi)
    k3 = np.empty_like(psi)
    k4 = np.empty_like(psi)
    tmp = np.empty_like(psi)
    C = np.empty(n)
    ndt = -1j * dt
    for step in range(steps):
        t = step * dt
        for half in range(3):
            tt = t + 0.5 * dt * half
            s = tt / tau
            A = a * s
            B = b * (1.0 - s)
            w = math.sin(math.pi * s) ** 2
            for i in range(n):
                C[i] = c[i] * w
            if half == 0:
                _apply(psi, k1, energies, n, A, B, C)
            elif half == 1:
                for r in range(rows):
                    for k in range(dim):
                        tmp[r, k] = psi[r, k] + 0.5 * ndt * k1[r, k]
                _apply(tmp, k2, energies, n, A, B, C)
                for r in range(rows):
                    for k in range(dim):
                        tmp[r, k] = psi[r, k] + 0.5 * ndt * k2[r, k]
                _apply(tmp, k3, energies, n, A, B, C)
            else:
                for r in range(rows):
                    for k in range(dim):
                        tmp[r, k] = psi[r, k] + ndt * k3[r, k]
                _apply(tmp, k4, energies, n, A, B, C)
        for r in range(rows):
            for k in range(dim):
                psi[r, k] += ndt / 6.0 * (k1[r, k] + 2.0 * k2[r, k] + 2.0 * k3[r, k] + k4[r, k])
    return psi


# -- public operations -------------------------------------------------------


def initial_plus_state(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be >= 1")
    dim = 1 << n
    return np.full(dim, 1.0 / math.sqrt(dim), dtype=np.complex128)


def hamiltonian_apply(inst: IsingInstance, params: AnnealParams, t: float, psi: np.ndarray) -> np.ndarray:
    """``H(t) @ psi`` for an ``n``-qubit state (or a stack of them, shape ``(m, 2**n)``)."""
    _check_params(inst, params)
    if not 0.0 <= t <= params.tau:
        raise ValueError(f"t={t} outside [0, tau={params.tau}]")
    psi = np.asarray(psi, dtype=np.complex128)
    if psi.shape[-1] != 1 << inst.n:
        raise ValueError(f"state has {psi.shape[-1]} amplitudes, expected {1 << inst.n}")
    A, B, C = schedule(params, t)
    rows = np.ascontiguousarray(psi.reshape(-1, psi.shape[-1]))
    out = np.empty_like(rows)
    _apply(rows, out, inst.energies, inst.n, A, B, C)
    return out.reshape(psi.shape)


@dataclass(frozen=True)
class Propagator:
    """Time-ordered evolution operator from ``t=0`` to ``tau``, applied on demand."""

    inst: IsingInstance
    params: AnnealParams
    step_count: int | None = None

    def __post_init__(self):
        _check_params(self.inst, self.params)
        steps = default_steps(self.params.tau) if self.step_count is None else int(self.step_count)
        if steps < MIN_STEPS:
            raise ValueError(f"step_count={steps} is below the accuracy floor of {MIN_STEPS}")
        object.__setattr__(self, "step_count", steps)

    def __call__(self, psi: np.ndarray, check_norm: bool = True) -> np.ndarray:
        """Evolve one state or a stack of rows; rows need not be normalised individually."""
        psi = np.asarray(psi, dtype=np.complex128)
        rows = np.array(psi.reshape(-1, psi.shape[-1]), dtype=np.complex128, order="C")
        if rows.shape[1] != 1 << self.inst.n:
            raise ValueError(f"state has {rows.shape[1]} amplitudes, expected {1 << self.inst.n}")
        before = np.vdot(rows, rows).real
        p = self.params
        _rk4(rows, self.inst.energies, self.inst.n, p.a, p.b, np.asarray(p.c), p.tau, self.step_count)
        if check_norm:
            drift = abs(np.vdot(rows, rows).real - before)
            # written as "not <=" so that a NaN blow-up is caught as well
            if not drift <= NORM_TOL * max(1.0, before):
                raise IntegrationError(f"norm drifted by {drift:.3e}; increase step_count")
        return rows.reshape(psi.shape)


def evolve(inst: IsingInstance, params: AnnealParams, psi0: np.ndarray, steps: int | None = None) -> np.ndarray:
    """Integrate ``i d|psi>/dt = H(t)|psi>`` from 0 to ``tau`` for a normalised state."""
    psi0 = np.asarray(psi0, dtype=np.complex128)
    norm = np.vdot(psi0, psi0).real
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"initial state is not normalised (|psi|^2 = {norm:.12f})")
    return Propagator(inst, params, steps)(psi0)


def anneal(inst: IsingInstance, params: AnnealParams, steps: int | None = None) -> np.ndarray:
    """Final annealing state starting from ``|+...+>``."""
    return evolve(inst, params, initial_plus_state(inst.n), steps)


def _blocks(psi: np.ndarray, n: int, offset: int) -> tuple[np.ndarray, int]:
    total = psi.size.bit_length() - 1
    if psi.size != 1 << total:
        raise ValueError("state length must be a power of two")
    if offset < 0 or offset + n > total:
        raise ValueError(f"register [{offset}, {offset + n}) does not fit in {total} qubits")
    return psi.reshape(1 << (total - n - offset), 1 << n, 1 << offset), total


def _control_mask(total: int, n: int, offset: int, control, polarity) -> np.ndarray:
    """Boolean mask over the (high, low) outer indices selecting matching control values."""
    controls = [control] if np.isscalar(control) else list(control)
    polarities = [polarity] * len(controls) if isinstance(polarity, str) else list(polarity)
    if len(polarities) != len(controls):
        raise ValueError("one polarity per control qubit is required")
    high = np.arange(1 << (total - n - offset))[:, None]
    low = np.arange(1 << offset)[None, :]
    mask = np.ones((high.shape[0], low.shape[1]), dtype=bool)
    for q, pol in zip(controls, polarities):
        q = int(q)
        if not 0 <= q < total or offset <= q < offset + n:
            raise ValueError(f"control qubit {q} is out of range or inside the target register")
        if pol not in ("open", "closed"):
            raise ValueError(f"polarity must be 'open' or 'closed', got {pol!r}")
        want = 1 if pol == "closed" else 0
        bit = ((high >> (q - offset - n)) & 1) if q >= offset + n else ((low >> q) & 1)
        mask &= bit == want
    return mask


def controlled_evolve(
    inst: IsingInstance,
    params: AnnealParams,
    psi: np.ndarray,
    control,
    polarity="closed",
    offset: int = 0,
    steps: int | None = None,
) -> np.ndarray:
    """Apply the annealing evolution to the system register where the controls match.

    ``control`` is a qubit index or a sequence of them, ``polarity`` is
    ``"closed"`` (acts on |1>), ``"open"`` (acts on |0>) or one per control.
    Only the matching amplitude blocks are integrated.
    """
    psi = np.array(psi, dtype=np.complex128)
    view, total = _blocks(psi, inst.n, offset)
    mask = _control_mask(total, inst.n, offset, control, polarity)
    hi, lo = np.nonzero(mask)
    if len(hi):
        block = view[hi, :, lo]
        view[hi, :, lo] = Propagator(inst, params, steps)(block)
    return view.reshape(-1)


def diagonal_phase_evolve(
    inst: IsingInstance,
    t: float,
    psi: np.ndarray,
    control=None,
    sign: int = 1,
    polarity="closed",
    offset: int = 0,
) -> np.ndarray:
    """Multiply system amplitudes by ``exp(-i sign E(u) t)``, optionally controlled.

    ``sign=+1`` is ``exp(-i Hz t)`` and ``sign=-1`` its inverse.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    psi = np.array(psi, dtype=np.complex128)
    view, total = _blocks(psi, inst.n, offset)
    phase = np.exp(-1j * sign * t * inst.energies)[None, :, None]
    if control is None:
        view *= phase
    else:
        mask = _control_mask(total, inst.n, offset, control, polarity)
        view *= np.where(mask[:, None, :], phase, 1.0)
    return view.reshape(-1)


def dump_state(psi: Sequence[complex]) -> str:
    """One ``index re im`` line per amplitude."""
    return "".join(f"{k} {z.real:.17g} {z.imag:.17g}\n" for k, z in enumerate(np.asarray(psi)))
