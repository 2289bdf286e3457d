"""Seeded experiment runners and the ``daqgo`` command line.

Instance ``k`` of a set drawn with base seed ``s`` uses
``ising.instance_seed(s, k)``, so sets are reproducible and shared across
algorithms, annealing times and runs. Outputs are CSV (or JSON) plus an
optional per-instance JSON ledger from which every CSV row can be recomputed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .circuits import MeasureSpec
from .dynamics import AnnealParams
from .export import export_daqgo1_circuit
from .ising import IsingInstance, brute_force_ground, instance_seed, random_instance
from .qgo import (
    ALGORITHMS,
    CalibrationCache,
    SolveConfig,
    calibrate_ferromagnet,
    default_b_grid,
    default_c_grid,
    is_success,
    measure_kind_for,
    qa_success_probability,
    solve,
)
from .shots import Z_STAR, estimate_shots_for_instance, wald_monte_carlo

__all__ = [
    "ExperimentConfig",
    "ResultRow",
    "DEFAULT_T",
    "DEFAULT_EPS",
    "DEFAULT_TAUS",
    "run_tau_sweep",
    "run_size_sweep",
    "run_shot_report",
    "rows_to_csv",
    "cli_dispatch",
    "main",
]

log = logging.getLogger(__name__)

DEFAULT_T = {"DAQGO1": 0.5, "DAQGO2": 0.05, "DAQGO3": 0.5}
DEFAULT_EPS = 1.2
DEFAULT_TAUS = (0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0)
SWEEP_HEADER = ["algorithm", "n", "tau", "success", "instances", "seconds"]
SHOT_HEADER = ["algorithm", "n", "sel_shots", "sign_shots", "total", "degenerate"]


@dataclass
class ExperimentConfig:
    """One experiment grid.

    ``t_sim=None`` picks a per-algorithm default (:data:`DEFAULT_T`);
    ``b=None``/``c_opt_abs=None`` take the ferromagnet calibration at each
    ``(n, tau)``. Plain QA always uses the calibrated ``c = 0`` optimum for
    ``b`` unless ``b`` is given.
    """

    algorithms: Sequence[str] = ("QA", "QGO", "DAQGO1", "DAQGO2", "DAQGO3", "DAQGO4")
    n_list: Sequence[int] = (4,)
    tau_list: Sequence[float] = DEFAULT_TAUS
    t_sim: float | None = None
    epsilon: float = DEFAULT_EPS
    c_opt_abs: float | None = None
    b: float | None = None
    h_diff: float | None = None
    instance_count: int = 20
    rng_seed: int = 0
    steps: int | None = None
    workers: int = 1
    calibration_path: str | None = None
    timing: bool = False
    z_star: float = Z_STAR

    def __post_init__(self):
        self.algorithms = tuple(a.upper() for a in self.algorithms)
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise ValueError(f"unknown algorithms: {sorted(unknown)}")
        if not self.algorithms or not self.n_list or not self.tau_list:
            raise ValueError("algorithm, n and tau grids must be non-empty")
        if self.instance_count < 1:
            raise ValueError("instance_count must be >= 1")

    def t_for(self, algorithm: str) -> float:
        if self.t_sim is not None:
            return self.t_sim
        return DEFAULT_T.get(algorithm, 0.0)


@dataclass
class ResultRow:
    algorithm: str
    n: int
    tau: float
    success_probability: float
    instance_count: int
    wall_time: float = 0.0
    per_instance: list[float] = field(default_factory=list, repr=False)

    @property
    def standard_error(self) -> float:
        x = np.asarray(self.per_instance, dtype=float)
        if len(x) < 2:
            return 0.0
        return float(x.std(ddof=1) / math.sqrt(len(x)))

    def csv_fields(self, timing: bool) -> list[str]:
        seconds = f"{self.wall_time:.3f}" if timing else "0"
        return [self.algorithm, str(self.n), repr(float(self.tau)), repr(float(self.success_probability)), str(self.instance_count), seconds]


# -- workers -------------------------------------------------------------------


def _solve_config(cfg: ExperimentConfig, algorithm: str, tau: float, cal: dict) -> SolveConfig:
    kind = measure_kind_for(algorithm)
    spec = MeasureSpec(kind, cfg.t_for(algorithm), cfg.epsilon if algorithm == "DAQGO1" else 0.0)
    b = cal["b_opt"] if cfg.b is None else cfg.b
    c = cal["c_opt"] if cfg.c_opt_abs is None else cfg.c_opt_abs
    return SolveConfig(spec, b, c, tau, h_diff=cfg.h_diff, steps=cfg.steps)


def _instance_job(job) -> dict:
    algorithm, inst_dict, seed, index, tau, payload, steps = job
    inst = IsingInstance.from_dict(inst_dict)
    ground = brute_force_ground(inst)
    start = time.perf_counter()
    record = {"algorithm": algorithm, "n": inst.n, "tau": tau, "instance": index, "seed": seed}
    if algorithm == "QA":
        record["success"] = qa_success_probability(inst, tau, payload, steps=steps, ground=ground)
    else:
        trace = solve(inst, payload)
        record["solution"] = list(trace.solution)
        record["success"] = float(is_success(inst, trace.solution, ground))
        record["evaluations"] = trace.evaluation_count
    record["seconds"] = time.perf_counter() - start
    return record


def _map(fn, jobs, workers: int):
    if workers <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs, chunksize=1))


def _sweep(cfg: ExperimentConfig) -> tuple[list[ResultRow], list[dict]]:
    cache = CalibrationCache(cfg.calibration_path, steps=cfg.steps)
    rows, records = [], []
    for n in cfg.n_list:
        seeds = [instance_seed(cfg.rng_seed, k) for k in range(cfg.instance_count)]
        insts = [random_instance(n, s).to_dict() for s in seeds]
        for tau in cfg.tau_list:
            needs_cal = cfg.b is None or cfg.c_opt_abs is None
            cal = cache.get(n, tau) if needs_cal else {"b_opt": cfg.b, "c_opt": cfg.c_opt_abs, "b_qa": cfg.b}
            for algorithm in cfg.algorithms:
                if algorithm == "QA":
                    payload = cal["b_qa"] if cfg.b is None else cfg.b
                else:
                    payload = _solve_config(cfg, algorithm, tau, cal)
                jobs = [(algorithm, d, s, k, tau, payload, cfg.steps) for k, (d, s) in enumerate(zip(insts, seeds))]
                start = time.perf_counter()
                results = _map(_instance_job, jobs, cfg.workers)
                elapsed = time.perf_counter() - start
                successes = [r["success"] for r in results]
                rows.append(ResultRow(algorithm, n, tau, float(np.mean(successes)), len(successes), elapsed, successes))
                for r in results:
                    if not cfg.timing:
                        r.pop("seconds")
                records.extend(results)
                log.info("%s n=%d tau=%g success=%.3f (%.1fs)", algorithm, n, tau, rows[-1].success_probability, elapsed)
    return rows, records


def run_tau_sweep(cfg: ExperimentConfig, out: str | Path | None = None, fmt: str = "csv") -> list[ResultRow]:
    """Success probability of every algorithm over the annealing-time grid.

    QA rows average the ground-manifold probability over instances; greedy
    rows report the fraction of instances solved exactly.
    """
    rows, records = _sweep(cfg)
    if out is not None:
        _write(out, rows_to_text(rows, fmt, cfg.timing))
        _write(_ledger_path(out), json.dumps(records, indent=1, sort_keys=True) + "\n")
    return rows


def run_size_sweep(cfg: ExperimentConfig, out: str | Path | None = None, fmt: str = "csv") -> list[ResultRow]:
    """Same as :func:`run_tau_sweep`, read as a function of ``n`` at each ``tau``."""
    return run_tau_sweep(cfg, out, fmt)


def _shot_job(job):
    algorithm, inst_dict, config, z_star = job
    plan = estimate_shots_for_instance(IsingInstance.from_dict(inst_dict), config, algorithm, z_star)
    return asdict(plan)


def run_shot_report(cfg: ExperimentConfig, out: str | Path | None = None, fmt: str = "csv") -> list[dict]:
    """Median per-evaluation and total shot counts per algorithm and ``n``.

    Uses the first entry of ``tau_list``. Degenerate plans (zero detectable
    difference) are left out of the medians and counted in ``degenerate``.
    """
    cache = CalibrationCache(cfg.calibration_path, steps=cfg.steps)
    tau = cfg.tau_list[0]
    table = []
    for n in cfg.n_list:
        insts = [random_instance(n, instance_seed(cfg.rng_seed, k)).to_dict() for k in range(cfg.instance_count)]
        cal = cache.get(n, tau) if (cfg.b is None or cfg.c_opt_abs is None) else {"b_opt": cfg.b, "c_opt": cfg.c_opt_abs}
        for algorithm in cfg.algorithms:
            if algorithm == "QA":
                continue
            config = _solve_config(cfg, algorithm, tau, cal)
            plans = _map(_shot_job, [(algorithm, d, config, cfg.z_star) for d in insts], cfg.workers)
            good = [p for p in plans if not p["degenerate"]]

            def med(key):
                return int(math.ceil(np.median([p[key] for p in good]))) if good else 0

            table.append({
                "algorithm": algorithm,
                "n": n,
                "sel_shots": med("per_eval_selection"),
                "sign_shots": med("per_eval_sign"),
                "total": med("total"),
                "degenerate": len(plans) - len(good),
            })
    if out is not None:
        if fmt == "json":
            _write(out, json.dumps(table, indent=1) + "\n")
        else:
            _write(out, _csv([SHOT_HEADER] + [[str(r[k]) for k in SHOT_HEADER] for r in table]))
    return table


# -- output --------------------------------------------------------------------


def _csv(lines: list[list[str]]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(lines)
    return buf.getvalue()


def rows_to_csv(rows: Sequence[ResultRow], timing: bool = False) -> str:
    return _csv([SWEEP_HEADER] + [r.csv_fields(timing) for r in rows])


def rows_to_text(rows: Sequence[ResultRow], fmt: str, timing: bool = False) -> str:
    if fmt == "json":
        payload = [
            {"algorithm": r.algorithm, "n": r.n, "tau": r.tau, "success": r.success_probability,
             "instances": r.instance_count, "seconds": round(r.wall_time, 3) if timing else 0}
            for r in rows
        ]
        return json.dumps(payload, indent=1) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    return rows_to_csv(rows, timing)


def _ledger_path(out) -> Path:
    out = Path(out)
    return out.with_name(out.stem + ".instances.json")


def _write(path, text: str) -> None:
    if str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


# -- command line -----------------------------------------------------------------


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def _algos(text: str) -> list[str]:
    return [x.strip().upper() for x in text.split(",") if x.strip()]


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--algo", type=_algos, default=None, help="comma-separated: QA,QGO,DAQGO1..DAQGO4")
    common.add_argument("--n", type=_ints, default=None, help="system size(s), comma-separated")
    common.add_argument("--tau", type=_floats, default=None, help="annealing time(s), comma-separated")
    common.add_argument("--t", type=float, default=None, help="Hz simulation time of the circuits")
    common.add_argument("--eps", type=float, default=DEFAULT_EPS, help="DAQGO1 phase rate")
    common.add_argument("--copt", type=float, default=None, help="|c_opt|; default: ferromagnet calibration")
    common.add_argument("--b", type=float, default=None, help="transverse coefficient; default: calibration")
    common.add_argument("--h-diff", type=float, default=None, help="differentiation interval (default |c_opt|)")
    common.add_argument("--instances", type=int, default=20)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--steps", type=int, default=None, help="RK4 steps (default max(1000, 1000 tau))")
    common.add_argument("--out", default="-", help="output path, '-' for stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--calibration", default=None, help="JSON calibration cache file")
    common.add_argument("--timing", action="store_true", help="record wall time in the seconds column")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="daqgo", description="Greedy y-field annealing with digital-analog readout circuits.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("solve", parents=[common], help="solve one instance and print the trace")
    p.add_argument("instance", nargs="?", help="instance JSON; random from --n/--seed if omitted")
    sub.add_parser("bench-tau", parents=[common], help="success probability over annealing times")
    sub.add_parser("bench-size", parents=[common], help="success probability over system sizes")
    sub.add_parser("shots-report", parents=[common], help="median shot estimates per algorithm and n")
    p = sub.add_parser("calibrate", parents=[common], help="ferromagnet calibration of b and |c_opt|")
    p.add_argument("--points", type=int, default=13, help="c grid points spanning rotation angle [0, pi]")
    p = sub.add_parser("wald-mc", parents=[common], help="Monte Carlo check of the Wald sample size")
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--d", type=float, default=0.05)
    p.add_argument("--z", type=float, default=Z_STAR)
    p.add_argument("--trials", type=int, default=100_000)
    p = sub.add_parser("export-circuit", parents=[common], help="DAQGO1 gate list for one instance")
    p.add_argument("instance", nargs="?")
    p.add_argument("--qasm", action="store_true", help="emit OpenQASM 2.0 instead of the gate list")
    p.add_argument("--full-phase", action="store_true", help="prepare states with their phases")
    return parser


def _load_instance(args) -> IsingInstance:
    if getattr(args, "instance", None):
        return IsingInstance.from_json(Path(args.instance))
    n = (args.n or [2])[0]
    return random_instance(n, instance_seed(args.seed, 0))


def _experiment(args, algorithms=None) -> ExperimentConfig:
    return ExperimentConfig(
        algorithms=args.algo or algorithms or ExperimentConfig.algorithms,
        n_list=args.n or [4],
        tau_list=args.tau or list(DEFAULT_TAUS),
        t_sim=args.t,
        epsilon=args.eps,
        c_opt_abs=args.copt,
        b=args.b,
        h_diff=args.h_diff,
        instance_count=args.instances,
        rng_seed=args.seed,
        steps=args.steps,
        workers=args.workers,
        calibration_path=args.calibration,
        timing=args.timing,
    )


def _cmd_solve(args) -> int:
    inst = _load_instance(args)
    algorithm = (args.algo or ["DAQGO4"])[0]
    tau = (args.tau or [0.6])[0]
    cfg = _experiment(args, [algorithm])
    cal = {"b_opt": args.b, "c_opt": args.copt}
    if args.b is None or args.copt is None:
        full = CalibrationCache(args.calibration, steps=args.steps).get(inst.n, tau)
        cal = {k: (v if v is not None else full[k]) for k, v in cal.items()}
    ground = brute_force_ground(inst)
    if algorithm == "QA":
        prob = qa_success_probability(inst, tau, cal["b_opt"], args.steps, ground)
        result = {"algorithm": "QA", "tau": tau, "b": cal["b_opt"], "success_probability": prob}
    else:
        config = _solve_config(cfg, algorithm, tau, cal)
        trace = solve(inst, config)
        result = {
            "algorithm": algorithm,
            "tau": tau,
            "b": config.b_opt,
            "c_opt": config.c_opt_abs,
            "solution": list(trace.solution),
            "ground_truth_match": tuple(trace.solution) in ground,
            "trace": trace.to_dict(),
        }
    if args.format == "json":
        _write(args.out, json.dumps(result, indent=1, default=str) + "\n")
    else:
        lines = [" ".join(f"{s:+d}" for s in result.get("solution", []))] if "solution" in result else []
        for key, value in result.items():
            if key not in ("solution", "trace"):
                lines.append(f"{key}: {value}")
        if "trace" in result:
            for r in result["trace"]["iterations"]:
                lines.append(f"fix {r['fixed_index']} -> {r['chosen_sign']:+d}  g={r['sensitivities']}")
        _write(args.out, "\n".join(lines) + "\n")
    return 0


def _cmd_calibrate(args) -> int:
    out = []
    for n in args.n or [4]:
        for tau in args.tau or list(DEFAULT_TAUS):
            if args.calibration:
                entry = CalibrationCache(args.calibration, steps=args.steps, points=args.points).get(n, tau)
            else:
                c_grid = default_c_grid(tau, args.points)
                b_opt, c_opt, table = calibrate_ferromagnet(n, tau, default_b_grid(), c_grid, args.steps, return_table=True)
                b_qa = sorted(default_b_grid())[int(np.argmax(table[:, 0]))]
                entry = {"n": n, "tau": tau, "b_opt": b_opt, "c_opt": c_opt, "b_qa": b_qa}
            out.append(entry)
    if args.format == "json":
        _write(args.out, json.dumps(out, indent=1) + "\n")
    else:
        keys = ["n", "tau", "b_opt", "c_opt", "b_qa"]
        _write(args.out, _csv([keys] + [[repr(e[k]) for k in keys] for e in out]))
    return 0


def _cmd_wald(args) -> int:
    N, rate = wald_monte_carlo(args.p, args.d, args.z, args.trials, args.seed)
    if args.format == "json":
        _write(args.out, json.dumps({"p": args.p, "d": args.d, "z_star": args.z, "N": N, "success_rate": rate}) + "\n")
    else:
        _write(args.out, f"N={N}\nsuccess_rate={rate:.4f}\n")
    return 0


def _cmd_export(args) -> int:
    inst = _load_instance(args)
    tau = (args.tau or [0.6])[0]
    t = 0.5 if args.t is None else args.t
    cal = {"b_opt": args.b, "c_opt": args.copt}
    if args.b is None or args.copt is None:
        full = CalibrationCache(args.calibration, steps=args.steps).get(inst.n, tau)
        cal = {k: (v if v is not None else full[k]) for k, v in cal.items()}
    p_ref = AnnealParams.plain(inst.n, tau, cal["b_opt"])
    p_test = p_ref.with_field(0, cal["c_opt"] if args.h_diff is None else args.h_diff)
    spec = MeasureSpec("DAQGO1", t, args.eps)
    text = export_daqgo1_circuit(inst, p_test, p_ref, spec, full_phase=args.full_phase, fmt="qasm" if args.qasm else "text")
    _write(args.out, text)
    return 0


def cli_dispatch(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _parser()
    if not argv:
        parser.print_usage(sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command in ("bench-tau", "bench-size"):
            run_tau_sweep(_experiment(args), args.out, args.format)
            return 0
        if args.command == "shots-report":
            cfg = _experiment(args, [a for a in ALGORITHMS if a != "QA"])
            run_shot_report(cfg, args.out, args.format)
            return 0
        if args.command == "calibrate":
            return _cmd_calibrate(args)
        if args.command == "wald-mc":
            return _cmd_wald(args)
        if args.command == "export-circuit":
            return _cmd_export(args)
    except (ValueError, OSError, ArithmeticError, RuntimeError) as exc:
        print(f"daqgo: error: {exc}", file=sys.stderr)
        return 1
    return 2


def main() -> None:
    sys.exit(cli_dispatch())
