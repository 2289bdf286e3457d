"""Shot-number estimation and finite-shot sampling.

Sample sizes follow the two z-test forms used for the greedy algorithms:

* energy readout (normal approximation)::

      N >= z*^2 (s1^2 + s2^2) / d^2

* single-ancilla readout (Wald, inflated by sqrt(2) for the two-sample case)::

      N >= z*^2 p (1 - p) / d^2 * sqrt(2)

All sizes are rounded up and floored at one shot.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .circuits import MeasureKind, MeasureOutcome
from .qgo import SolveConfig, measure_kind_for, probe_round

__all__ = [
    "Z_STAR",
    "ShotPlan",
    "sample_size_normal",
    "sample_size_wald",
    "wald_monte_carlo",
    "sampled_measure",
    "total_shots",
    "estimate_shots_for_instance",
]

Z_STAR = 2.58
_P_CLIP = 1e-12


@dataclass
class ShotPlan:
    algorithm: str
    n: int
    per_eval_selection: int
    per_eval_sign: int
    total: int
    d_selection: float
    d_sign: float
    z_star: float = Z_STAR
    degenerate: bool = False
    notes: dict = field(default_factory=dict)

    @property
    def d(self) -> float:
        return self.d_selection

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def _ceil(x: float) -> int:
    # guard against 53.99999999 style round-off before the ceiling
    return max(1, math.ceil(x - 1e-9))


def sample_size_normal(sigma1_sq: float, sigma2_sq: float, d: float, z_star: float = Z_STAR) -> int:
    if not d > 0:
        raise ValueError("detectable difference d must be positive")
    if sigma1_sq < 0 or sigma2_sq < 0:
        raise ValueError("variances must be non-negative")
    return _ceil(z_star**2 * (sigma1_sq + sigma2_sq) / d**2)


def sample_size_wald(p: float, d: float, z_star: float = Z_STAR) -> int:
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly between 0 and 1, got {p}")
    if not d > 0:
        raise ValueError("detectable difference d must be positive")
    return _ceil(z_star**2 * p * (1.0 - p) / d**2 * math.sqrt(2.0))


def wald_monte_carlo(
    p: float,
    d: float,
    z_star: float = Z_STAR,
    trials: int = 100_000,
    rng_seed=None,
    shots: int | None = None,
) -> tuple[int, float]:
    """Check the Wald size by simulation; returns ``(N, success_rate)``.

    Each trial draws ``N`` Bernoulli shots at ``p - d/2`` and at ``p + d/2``
    and forms the two-proportion z statistic. A trial succeeds when the
    statistic orders the groups correctly (``z > 0``), i.e. when the larger
    probability is identified, which is the decision the greedy sign test
    makes. ``shots`` overrides ``N``.
    """
    lo, hi = p - d / 2, p + d / 2
    if not (0.0 < lo and hi < 1.0):
        raise ValueError("p +/- d/2 must stay inside (0, 1)")
    if trials < 1000:
        raise ValueError("use at least 1000 trials")
    N = sample_size_wald(p, d, z_star) if shots is None else int(shots)
    rng = np.random.default_rng(rng_seed)
    x1 = rng.binomial(N, lo, size=trials) / N
    x2 = rng.binomial(N, hi, size=trials) / N
    se = np.sqrt((x1 * (1 - x1) + x2 * (1 - x2)) / N)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, (x2 - x1) / se, np.sign(x2 - x1) * np.inf)
    return N, float(np.mean(z > 0))


def sampled_measure(outcome: MeasureOutcome, shots: int, rng_seed=None) -> MeasureOutcome:
    """Replace every exact distribution of ``outcome`` by multinomial frequencies.

    Each circuit run (e.g. the two DAQGO1 runs) gets ``shots`` samples. For
    the energy measure the samples are basis states and the value becomes the
    mean sampled energy.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = np.random.default_rng(rng_seed)
    dists = {}
    for label in sorted(outcome.dists):
        p = np.clip(np.asarray(outcome.dists[label], dtype=float), 0.0, None)
        dists[label] = rng.multinomial(int(shots), p / p.sum()) / shots
    return MeasureOutcome.from_distributions(outcome.kind, dists, outcome.t_sim, outcome.levels)


def total_shots(algorithm: str, n: int, shots_selection: int, shots_sign: int) -> int:
    """Total shots of one greedy run from per-evaluation shot counts."""
    if n < 2:
        raise ValueError("n must be >= 2")
    algorithm = algorithm.upper()
    if algorithm == "QGO":
        return max(shots_selection, shots_sign) * n * (n + 3) // 2
    if algorithm == "DAQGO1":
        return n * (n + 1) // 2 * shots_selection + 2 * n * shots_sign
    if algorithm in ("DAQGO2", "DAQGO3", "DAQGO4"):
        return max(shots_selection, shots_sign) * n * (n + 1) // 2
    raise ValueError(f"unknown algorithm {algorithm!r}")


def _clip_p(p: float) -> float:
    return min(max(p, _P_CLIP), 1.0 - _P_CLIP)


def _statistic(outcome: MeasureOutcome) -> tuple[float, float]:
    """``(probability, scale)`` of the ancilla statistic behind ``outcome.value``.

    ``value`` moves by ``scale`` per unit of the measured probability, so a
    difference ``dv`` in value is ``dv / scale`` in probability.
    """
    kind, raw = outcome.kind, outcome.raw
    if kind is MeasureKind.DAQGO4:
        return raw["P0"], 2.0
    if kind is MeasureKind.DAQGO3:
        return raw["P0|0"], 2.0
    if kind is MeasureKind.DAQGO2:
        # P(a1 = 0) = 1/2 + (Q0 + Q1)/4 and value = (Q0 + Q1)/t
        return raw["P(a1=0)"], 4.0 / outcome.t_sim
    raise ValueError(f"no single ancilla statistic for {kind}")


def estimate_shots_for_instance(inst, config: SolveConfig, algorithm: str, z_star: float = Z_STAR) -> ShotPlan:
    """Shots needed in the first greedy round to separate the best variable
    from the runner-up and to resolve the sign of the best one.

    QGO uses the normal formula with the energy variances of the two states
    being compared. DAQGO variants use the Wald formula on the ancilla
    probability that carries the statistic (DAQGO1: ``P0(0)`` for selection,
    ``P0(eps)`` for the sign). A zero difference yields a ``degenerate`` plan
    with zero shot counts.
    """
    algorithm = algorithm.upper()
    if measure_kind_for(algorithm) is not config.measure.kind:
        raise ValueError(f"config measure {config.measure.kind} does not match {algorithm}")
    n = inst.n
    outcomes, ref = probe_round(inst, config, [0.0] * n)
    ranked = sorted(outcomes, key=lambda j: (-outcomes[j].selection, j))
    best, second = outcomes[ranked[0]], outcomes[ranked[1]]
    kind = config.measure.kind
    notes = {"best": ranked[0], "second": ranked[1]}

    if kind is MeasureKind.ENERGY_QGO:
        d_sel = abs(abs(best.value) - abs(second.value))
        d_sign = abs(best.value)
        var_best, var_second, var_ref = best.raw["variance"], second.raw["variance"], ref.raw["variance"]

        def size_sel():
            return sample_size_normal(var_best, var_second, d_sel, z_star)

        def size_sign():
            return sample_size_normal(var_best, var_ref, d_sign, z_star)

    elif kind is MeasureKind.DAQGO1:
        d_sel = abs(second.raw["P0(0)"] - best.raw["P0(0)"])
        d_sign = abs(best.value)
        p_sel, p_sign = _clip_p(best.raw["P0(0)"]), _clip_p(best.raw["P0(eps)"])
        notes.update(p_selection=p_sel, p_sign=p_sign)

        def size_sel():
            return sample_size_wald(p_sel, d_sel, z_star)

        def size_sign():
            return sample_size_wald(p_sign, d_sign, z_star)

    else:
        p, scale = _statistic(best)
        p = _clip_p(p)
        d_sel = abs(abs(best.value) - abs(second.value)) / scale
        d_sign = abs(best.value) / scale
        notes.update(p=p)

        def size_sel():
            return sample_size_wald(p, d_sel, z_star)

        def size_sign():
            return sample_size_wald(p, d_sign, z_star)

    if d_sel <= 0 or d_sign <= 0:
        return ShotPlan(algorithm, n, 0, 0, 0, d_sel, d_sign, z_star, degenerate=True, notes=notes)
    sel, sign = size_sel(), size_sign()
    return ShotPlan(algorithm, n, sel, sign, total_shots(algorithm, n, sel, sign), d_sel, d_sign, z_star, notes=notes)
