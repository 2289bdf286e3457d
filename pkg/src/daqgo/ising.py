"""Ising problem instances, classical energies and exhaustive ground-state search.

Basis convention used throughout the package: bit ``i`` of a basis index is
qubit ``i`` (qubit 0 is the least significant bit), and a 0 bit is spin +1
(the +1 eigenstate of sigma^z) while a 1 bit is spin -1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "IsingInstance",
    "GroundStateSet",
    "MAX_ENUMERATION_QUBITS",
    "classical_energy",
    "brute_force_ground",
    "random_instance",
    "instance_seed",
    "instance_set",
    "ferromagnet",
    "spectral_gap",
    "spins_from_index",
    "index_from_spins",
    "energy_levels",
]

MAX_ENUMERATION_QUBITS = 24
_CHUNK = 1 << 18


@dataclass(frozen=True)
class IsingInstance:
    """Couplings ``J_ij`` (``i < j``) and longitudinal fields ``h_i``.

    The problem Hamiltonian is ``-sum_{i<j} J_ij s_i s_j - sum_i h_i s_i``.
    """

    n: int
    couplings: Mapping[tuple[int, int], float] = field(default_factory=dict)
    fields: Sequence[float] = ()

    def __post_init__(self):
        n = int(self.n)
        if n < 2:
            raise ValueError(f"an instance needs at least 2 spins, got n={n}")
        fields = tuple(float(h) for h in self.fields) if len(self.fields) else (0.0,) * n
        if len(fields) != n:
            raise ValueError(f"expected {n} fields, got {len(fields)}")
        couplings = {}
        for (i, j), value in dict(self.couplings).items():
            i, j = int(i), int(j)
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"coupling index ({i}, {j}) out of range for n={n}")
            if i >= j:
                raise ValueError(f"couplings must be keyed by (i, j) with i < j, got ({i}, {j})")
            couplings[(i, j)] = float(value)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "fields", fields)
        object.__setattr__(self, "couplings", dict(sorted(couplings.items())))

    @cached_property
    def coupling_matrix(self) -> np.ndarray:
        """Upper-triangular ``(n, n)`` array with ``J[i, j]`` for ``i < j``."""
        J = np.zeros((self.n, self.n))
        for (i, j), value in self.couplings.items():
            J[i, j] = value
        return J

    @cached_property
    def energies(self) -> np.ndarray:
        """Classical energy of every basis state, indexed by basis index.

        The array is read-only and shared between calls.
        """
        out = energy_levels(self)
        out.flags.writeable = False
        return out

    # -- serialisation -------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "couplings": [[i, j, J] for (i, j), J in self.couplings.items()],
            "fields": list(self.fields),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "IsingInstance":
        couplings = {}
        for i, j, J in data.get("couplings", []):
            key = (int(i), int(j))
            if key in couplings:
                raise ValueError(f"duplicate coupling {key}")
            couplings[key] = float(J)
        return cls(int(data["n"]), couplings, tuple(data.get("fields", ())))

    def to_json(self, path: str | Path | None = None) -> str:
        text = json.dumps(self.to_dict(), indent=2)
        if path is not None:
            Path(path).write_text(text + "\n")
        return text

    @classmethod
    def from_json(cls, source: str | Path) -> "IsingInstance":
        """Load from a JSON file path or a JSON string."""
        text = str(source)
        if not text.lstrip().startswith("{"):
            text = Path(source).read_text()
        return cls.from_dict(json.loads(text))

    def permuted(self, perm: Sequence[int]) -> "IsingInstance":
        """Relabel spins so that old spin ``i`` becomes spin ``perm[i]``."""
        perm = [int(p) for p in perm]
        if sorted(perm) != list(range(self.n)):
            raise ValueError("perm must be a permutation of range(n)")
        couplings = {}
        for (i, j), J in self.couplings.items():
            a, b = perm[i], perm[j]
            couplings[(min(a, b), max(a, b))] = J
        fields = [0.0] * self.n
        for i, h in enumerate(self.fields):
            fields[perm[i]] = h
        return IsingInstance(self.n, couplings, tuple(fields))


@dataclass(frozen=True)
class GroundStateSet:
    energy: float
    configs: tuple[tuple[int, ...], ...]
    indices: tuple[int, ...]

    def __contains__(self, spins) -> bool:
        return tuple(int(s) for s in spins) in self.configs


def spins_from_index(index: int, n: int) -> tuple[int, ...]:
    return tuple(1 - 2 * ((int(index) >> i) & 1) for i in range(n))


def index_from_spins(spins: Iterable[int]) -> int:
    index = 0
    for i, s in enumerate(spins):
        if s not in (1, -1):
            raise ValueError(f"spins must be +1 or -1, got {s}")
        if s == -1:
            index |= 1 << i
    return index


def classical_energy(inst: IsingInstance, spins: Sequence[int]) -> float:
    s = np.asarray(spins)
    if s.shape != (inst.n,):
        raise ValueError(f"expected {inst.n} spins, got shape {s.shape}")
    if not np.all(np.abs(s) == 1):
        raise ValueError("spins must be +1 or -1")
    s = s.astype(float)
    return float(-(s @ inst.coupling_matrix @ s) - np.dot(inst.fields, s))


def energy_levels(inst: IsingInstance) -> np.ndarray:
    """Energies of all ``2**n`` basis states (chunked to bound memory)."""
    n = inst.n
    if n > MAX_ENUMERATION_QUBITS:
        raise MemoryError(f"n={n} exceeds the enumeration limit of {MAX_ENUMERATION_QUBITS}")
    dim = 1 << n
    J = inst.coupling_matrix
    h = np.asarray(inst.fields)
    shifts = np.arange(n, dtype=np.int64)
    out = np.empty(dim)
    for start in range(0, dim, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, dim), dtype=np.int64)
        s = 1.0 - 2.0 * ((idx[:, None] >> shifts) & 1)
        out[start:start + len(idx)] = -np.einsum("ki,ij,kj->k", s, J, s) - s @ h
    return out


def brute_force_ground(inst: IsingInstance, rtol: float = 0.0) -> GroundStateSet:
    """Exact ground energy and every degenerate minimiser.

    With ``rtol=0`` energies are compared exactly; a positive ``rtol`` admits
    configurations within ``rtol * max(1, |E0|)`` of the minimum, which is
    useful for instances loaded from text with rounded coefficients.
    """
    energies = inst.energies
    e0 = float(energies.min())
    if rtol > 0:
        mask = energies <= e0 + rtol * max(1.0, abs(e0))
    else:
        mask = energies == e0
    indices = tuple(int(k) for k in np.flatnonzero(mask))
    configs = tuple(spins_from_index(k, inst.n) for k in indices)
    return GroundStateSet(e0, configs, indices)


def spectral_gap(inst: IsingInstance) -> float:
    """Distance between the two lowest distinct classical levels (inf if one level)."""
    levels = np.unique(inst.energies)
    if len(levels) < 2:
        return math.inf
    return float(levels[1] - levels[0])


def random_instance(n: int, rng_seed) -> IsingInstance:
    """Gaussian couplings and fields with zero mean and std ``1/(n-1)``.

    Draw order is fixed: couplings in lexicographic ``(i, j)`` order, then
    fields, all from one PCG64 stream seeded with ``rng_seed``.
    """
    n = int(n)
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    rng = np.random.Generator(np.random.PCG64(rng_seed))
    scale = 1.0 / (n - 1)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    J = rng.normal(0.0, scale, size=len(pairs))
    h = rng.normal(0.0, scale, size=n)
    return IsingInstance(n, dict(zip(pairs, J.tolist())), tuple(h.tolist()))


def instance_seed(base_seed: int, k: int) -> int:
    """Portable per-instance seed: first 64-bit word of ``SeedSequence([base, k])``."""
    return int(np.random.SeedSequence([int(base_seed), int(k)]).generate_state(1, np.uint64)[0])


def instance_set(n: int, count: int, base_seed: int) -> list[IsingInstance]:
    return [random_instance(n, instance_seed(base_seed, k)) for k in range(count)]


def ferromagnet(n: int) -> IsingInstance:
    """Uniform ferromagnet ``J_ij = 1/(n-1)``, no fields."""
    J = 1.0 / (n - 1)
    return IsingInstance(n, {(i, j): J for i in range(n) for j in range(i + 1, n)})
