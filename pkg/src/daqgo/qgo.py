"""Greedy sequential fixing of y-field signs (QGO) under any goodness measure.

Each round probes every unfixed variable ``j`` by annealing with ``c_j = h``
(test) against the current fields (reference), picks the most sensitive
variable and commits ``c_k = -c_opt * sgn(g_k)``. The solution is ``sgn(c)``.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .circuits import MeasureKind, MeasureOutcome, MeasureSpec, measure, measure_energy_qgo
from .dynamics import AnnealParams, anneal
from .ising import GroundStateSet, IsingInstance, brute_force_ground, ferromagnet

__all__ = [
    "SolveConfig",
    "RoundRecord",
    "SolveTrace",
    "ALGORITHMS",
    "measure_kind_for",
    "sensitivity",
    "probe_round",
    "solve",
    "is_success",
    "qa_success_probability",
    "default_b_grid",
    "default_c_grid",
    "calibrate_ferromagnet",
    "CalibrationCache",
    "grid_search_params",
]

log = logging.getLogger(__name__)

ALGORITHMS = ("QA", "QGO", "DAQGO1", "DAQGO2", "DAQGO3", "DAQGO4")


def measure_kind_for(algorithm: str) -> MeasureKind:
    algorithm = algorithm.upper()
    if algorithm == "QGO":
        return MeasureKind.ENERGY_QGO
    if algorithm == "QA":
        raise ValueError("plain QA has no goodness measure")
    return MeasureKind(algorithm)


@dataclass(frozen=True)
class SolveConfig:
    measure: MeasureSpec
    b_opt: float
    c_opt_abs: float
    tau: float
    h_diff: float | None = None
    steps: int | None = None

    def __post_init__(self):
        if not self.c_opt_abs > 0:
            raise ValueError("c_opt_abs must be positive")
        if self.h_diff is None:
            object.__setattr__(self, "h_diff", float(self.c_opt_abs))
        if not self.h_diff > 0:
            raise ValueError("h_diff must be positive")

    def params(self, c: Sequence[float]) -> AnnealParams:
        return AnnealParams(self.tau, self.b_opt, tuple(c))


@dataclass
class RoundRecord:
    fixed_index: int
    sensitivities: dict[int, float]
    scores: dict[int, float]
    chosen_sign: int


@dataclass
class SolveTrace:
    iterations: list[RoundRecord]
    final_c: list[float]
    solution: tuple[int, ...]
    evaluation_count: int
    reference_count: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _probe(inst, config: SolveConfig, c_current, i, ref: MeasureOutcome | None) -> MeasureOutcome:
    c_test = list(c_current)
    c_test[i] = c_current[i] + config.h_diff
    p_test = config.params(c_test)
    if config.measure.kind is MeasureKind.ENERGY_QGO:
        test = measure_energy_qgo(inst, p_test, config.steps)
        g = test.value - ref.value
        return MeasureOutcome(test.kind, g, dict(test.raw, reference_energy=ref.value), test.dists, 0.0, test.levels)
    return measure(inst, p_test, config.params(c_current), config.measure, config.steps)


def sensitivity(inst: IsingInstance, config: SolveConfig, c_current: Sequence[float], i: int) -> float:
    """Finite-difference sensitivity ``g_i`` of the configured measure."""
    if c_current[i] != 0:
        raise ValueError(f"variable {i} is already fixed")
    ref = None
    if config.measure.kind is MeasureKind.ENERGY_QGO:
        ref = measure_energy_qgo(inst, config.params(c_current), config.steps)
    return _probe(inst, config, list(c_current), i, ref).value


def probe_round(inst: IsingInstance, config: SolveConfig, c_current: Sequence[float]) -> tuple[dict[int, MeasureOutcome], MeasureOutcome | None]:
    """Probe every unfixed variable once; the reference energy is measured once per round."""
    c_current = list(c_current)
    ref = None
    if config.measure.kind is MeasureKind.ENERGY_QGO:
        ref = measure_energy_qgo(inst, config.params(c_current), config.steps)
    outcomes = {j: _probe(inst, config, c_current, j, ref) for j in range(inst.n) if c_current[j] == 0}
    return outcomes, ref


def solve(inst: IsingInstance, config: SolveConfig, prober: Callable | None = None) -> SolveTrace:
    """Run the greedy loop until every y-field coefficient is non-zero.

    ``prober(inst, config, c_current)`` may replace :func:`probe_round`; it
    must return ``{index: MeasureOutcome}`` for the unfixed variables.
    """
    n = inst.n
    c = [0.0] * n
    rounds: list[RoundRecord] = []
    evaluations = references = 0
    while any(x == 0 for x in c):
        if prober is None:
            outcomes, ref = probe_round(inst, config, c)
            references += ref is not None
        else:
            outcomes = prober(inst, config, c)
        evaluations += len(outcomes)
        order = sorted(outcomes)
        scores = {j: outcomes[j].selection for j in order}
        k = max(order, key=lambda j: (scores[j], -j))
        g = outcomes[k].value
        if g == 0:
            log.warning("sensitivity of variable %d is exactly zero; fixing it to +1", k)
            sign = 1
        else:
            sign = -int(math.copysign(1, g))
        c[k] = sign * config.c_opt_abs
        rounds.append(RoundRecord(k, {j: outcomes[j].value for j in order}, scores, sign))
    solution = tuple(1 if x > 0 else -1 for x in c)
    return SolveTrace(rounds, c, solution, evaluations, references)


def is_success(inst: IsingInstance, solution: Sequence[int], ground: GroundStateSet | None = None) -> bool:
    ground = ground or brute_force_ground(inst)
    return tuple(solution) in ground


def qa_success_probability(inst: IsingInstance, tau: float, b: float, steps: int | None = None, ground: GroundStateSet | None = None) -> float:
    """Probability mass on the (possibly degenerate) ground manifold after plain annealing."""
    ground = ground or brute_force_ground(inst)
    psi = anneal(inst, AnnealParams.plain(inst.n, tau, b), steps)
    return float(np.sum(np.abs(psi[list(ground.indices)]) ** 2))


# -- calibration -------------------------------------------------------------------


def default_b_grid() -> tuple[float, ...]:
    return (0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0)


def default_c_grid(tau: float, points: int = 13) -> tuple[float, ...]:
    """y-field amplitudes whose integrated rotation ``c * tau`` spans ``[0, pi]``."""
    return tuple(float(x) for x in np.linspace(0.0, math.pi, points) / tau)


def calibrate_ferromagnet(
    n: int,
    tau: float,
    b_grid: Iterable[float],
    c_grid: Iterable[float],
    steps: int | None = None,
    return_table: bool = False,
):
    """Grid-maximise the all-up plus all-down probability of the uniform ferromagnet.

    All ``c_i`` share one value ``c``. Ties resolve to the smallest ``b``, then
    the smallest ``c``. With ``return_table=True`` the objective grid is
    returned as a third element, shaped ``(len(b_grid), len(c_grid))``.
    """
    b_grid = sorted(float(b) for b in b_grid)
    c_grid = sorted(float(c) for c in c_grid)
    if not b_grid or not c_grid:
        raise ValueError("calibration grids must be non-empty")
    inst = ferromagnet(n)
    ground = [0, (1 << n) - 1]
    table = np.empty((len(b_grid), len(c_grid)))
    best = (-1.0, None, None)
    for ib, b in enumerate(b_grid):
        for ic, c in enumerate(c_grid):
            psi = anneal(inst, AnnealParams(tau, b, (c,) * n), steps)
            table[ib, ic] = float(np.sum(np.abs(psi[ground]) ** 2))
            if table[ib, ic] > best[0]:
                best = (table[ib, ic], b, c)
    if return_table:
        return best[1], best[2], table
    return best[1], best[2]


class CalibrationCache:
    """JSON-backed cache of ferromagnet calibrations keyed by ``(n, tau)``.

    Each entry stores ``b_opt``/``c_opt`` (y-field grid) and ``b_qa`` (best
    ``b`` for plain annealing, i.e. the ``c = 0`` column).
    """

    def __init__(self, path: str | Path | None = None, b_grid=None, points: int = 13, steps: int | None = None):
        self.path = Path(path) if path else None
        self.b_grid = tuple(b_grid) if b_grid else default_b_grid()
        self.points = points
        self.steps = steps
        self.entries: dict[str, dict[str, float]] = {}
        if self.path and self.path.exists():
            self.entries = json.loads(self.path.read_text())

    @staticmethod
    def key(n: int, tau: float) -> str:
        return f"{int(n)}:{float(tau)!r}"

    def get(self, n: int, tau: float) -> dict[str, float]:
        key = self.key(n, tau)
        if key not in self.entries:
            c_grid = default_c_grid(tau, self.points)
            b_opt, c_opt, table = calibrate_ferromagnet(n, tau, self.b_grid, c_grid, self.steps, return_table=True)
            b_qa = sorted(self.b_grid)[int(np.argmax(table[:, 0]))]
            self.entries[key] = {"n": n, "tau": tau, "b_opt": b_opt, "c_opt": c_opt, "b_qa": b_qa}
            if self.path:
                self.path.write_text(json.dumps(self.entries, indent=2, sort_keys=True) + "\n")
        return self.entries[key]


def grid_search_params(
    inst_set: Sequence[IsingInstance],
    algorithm: str,
    tau_grid: Sequence[float],
    t_grid: Sequence[float],
    eps_grid: Sequence[float],
    c_grid: Sequence[float],
    b: float | None = None,
    steps: int | None = None,
) -> tuple[MeasureSpec, SolveConfig, float]:
    """Coordinate-wise greedy search over ``(tau, t, eps, |c_opt|)``.

    Starts from the first entry of every grid and sweeps each parameter once
    in that order, keeping a new value only on strict improvement of the mean
    success over ``inst_set``. Parameters the measure ignores are skipped.
    ``b=None`` calibrates ``b`` on the ferromagnet at each ``tau``.
    """
    kind = measure_kind_for(algorithm)
    grids = {"tau": list(tau_grid), "t": list(t_grid), "eps": list(eps_grid), "c": list(c_grid)}
    if any(not g for g in grids.values()):
        raise ValueError("grids must be non-empty")
    uses = {
        "tau": True,
        "t": kind in (MeasureKind.DAQGO1, MeasureKind.DAQGO2, MeasureKind.DAQGO3),
        "eps": kind is MeasureKind.DAQGO1,
        "c": True,
    }
    grounds = [brute_force_ground(inst) for inst in inst_set]
    b_cache: dict[tuple[int, float], float] = {}

    def b_for(n, tau):
        if b is not None:
            return float(b)
        if (n, tau) not in b_cache:
            b_cache[(n, tau)] = calibrate_ferromagnet(n, tau, default_b_grid(), c_grid, steps)[0]
        return b_cache[(n, tau)]

    def build(point):
        spec = MeasureSpec(kind, point["t"] if uses["t"] else 0.0, point["eps"] if uses["eps"] else 0.0)
        n = inst_set[0].n
        return spec, SolveConfig(spec, b_for(n, point["tau"]), point["c"], point["tau"], steps=steps)

    def objective(point):
        spec, cfg = build(point)
        wins = [is_success(inst, solve(inst, cfg).solution, g) for inst, g in zip(inst_set, grounds)]
        return float(np.mean(wins))

    point = {k: g[0] for k, g in grids.items()}
    best = objective(point)
    for name in ("tau", "t", "eps", "c"):
        if not uses[name]:
            continue
        for value in grids[name][1:] if point[name] == grids[name][0] else grids[name]:
            trial = dict(point, **{name: value})
            score = objective(trial)
            if score > best:
                best, point = score, trial
    spec, cfg = build(point)
    return spec, cfg, best
