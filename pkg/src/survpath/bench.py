"""Benchmark harness: run solver ensembles over random instances, emit CSV.

One :class:`BenchRow` is produced per (algorithm, load cap W, trial); aggregate
mean/std rows per (algorithm, W) are recomputable from the raw rows (and tested
to be).  All seeding is derived deterministically from the experiment seed, so
a rerun with the same arguments reproduces the CSV byte for byte (timing
columns are zeroed unless explicitly requested).

The trial loop parallelizes across processes; the ``SURVPATH_THREADS``
environment variable caps the worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from hashlib import blake2b
from statistics import mean, pstdev

from .instances import RandomEnsembleConfig, gen_random_parallel
from .lp import solve_mfsp_relaxation
from .mfsp import (
    RoundingConfig,
    mfsp_acg,
    mfsp_epsnet,
    mfsp_exact,
    mfsp_nacg,
    mfsp_randomized_rounding,
    mfsp_rsg,
)
from .model import (
    Limits,
    RandomizedFailureError,
    SearchBudgetExceeded,
    SolveReport,
    SurvivalMatrix,
    ValidationError,
)
from .msp import msp_epsnet, msp_exact, msp_greedy

__all__ = [
    "BenchRow",
    "ExperimentResult",
    "run_experiment",
    "solve_named",
    "CSV_COLUMNS",
    "worker_count",
]

CSV_COLUMNS = (
    "alg",
    "problem",
    "W",
    "K",
    "trial",
    "seed",
    "objective",
    "survivable",
    "iterations",
    "elapsed_us",
)

MSP_ALGS = ("exact", "greedy", "epsnet")
MFSP_ALGS = ("exact", "acg", "nacg", "rsg", "rr", "epsnet")
RANDOMIZED_ALGS = ("epsnet", "rsg", "rr")


def solve_named(
    problem: str,
    alg: str,
    mat: SurvivalMatrix,
    limits: Limits | None,
    *,
    seed: int = 0,
    q: float = 0.9,
    c: float = 10.0,
    node_limit: int | None = None,
    repair: bool = False,
    relaxation=None,
) -> SolveReport:
    """Dispatch a short algorithm name to the matching solver."""
    if problem == "msp":
        if alg == "exact":
            return msp_exact(mat, limits, node_limit=node_limit)
        if alg == "greedy":
            return msp_greedy(mat)
        if alg == "epsnet":
            return msp_epsnet(mat, limits, seed, c=c)
    elif problem == "mfsp":
        if alg == "exact":
            return mfsp_exact(mat, limits, node_limit=node_limit)
        if alg == "acg":
            return mfsp_acg(mat)
        if alg == "nacg":
            return mfsp_nacg(mat)
        if alg == "rsg":
            return mfsp_rsg(mat, seed)
        if alg == "rr":
            return mfsp_randomized_rounding(
                mat,
                RoundingConfig(target_survivability=q, seed=seed),
                repair=repair,
                relaxation=relaxation,
            )
        if alg == "epsnet":
            return mfsp_epsnet(mat, limits if limits is not None else Limits(), seed, c=c)
    raise ValidationError(f"unknown algorithm {alg!r} for problem {problem!r}")


def derive_seed(text: str) -> int:
    """Stable 64-bit seed derived from a textual label."""
    return int.from_bytes(blake2b(text.encode(), digest_size=8).digest(), "big")


@dataclass(frozen=True)
class BenchRow:
    """One solver run.  ``objective``/``survivable``/``iterations`` are None
    when the run did not finish (exact over budget); a randomized run that
    exhausted its schedule keeps ``survivable=False`` with no objective."""

    alg: str
    problem: str
    w: int
    k: int | None
    trial: int
    seed: int | None
    objective: int | None
    survivable: bool | None
    iterations: int | None
    elapsed_us: int

    def csv_cells(self, *, include_timing: bool) -> list[str]:
        return [
            self.alg,
            self.problem,
            str(self.w),
            "" if self.k is None else str(self.k),
            str(self.trial),
            "" if self.seed is None else str(self.seed),
            "" if self.objective is None else str(self.objective),
            "" if self.survivable is None else str(int(self.survivable)),
            "" if self.iterations is None else str(self.iterations),
            str(self.elapsed_us if include_timing else 0),
        ]


@dataclass(frozen=True)
class ExperimentResult:
    """All rows of one experiment plus derivable aggregates."""

    problem: str
    rows: tuple[BenchRow, ...]

    def aggregates(self) -> list[list[str]]:
        """Mean/std rows per (alg, W): objective and iterations over completed
        runs, the completed-and-survivable rate in the mean row's survivable
        column."""
        groups: dict[tuple[str, int], list[BenchRow]] = {}
        for row in self.rows:
            groups.setdefault((row.alg, row.w), []).append(row)
        out: list[list[str]] = []
        for (alg, w), rows in sorted(groups.items()):
            k = rows[0].k
            done = [r for r in rows if r.objective is not None]
            objectives = [r.objective for r in done]
            iteration_counts = [r.iterations for r in done]
            success = [bool(r.survivable) for r in rows]
            out.append(
                [
                    alg,
                    self.problem,
                    str(w),
                    "" if k is None else str(k),
                    "mean",
                    "",
                    _fmt(mean(objectives)) if objectives else "",
                    _fmt(sum(success) / len(success)),
                    _fmt(mean(iteration_counts)) if iteration_counts else "",
                    "",
                ]
            )
            out.append(
                [
                    alg,
                    self.problem,
                    str(w),
                    "" if k is None else str(k),
                    "std",
                    "",
                    _fmt(pstdev(objectives)) if objectives else "",
                    "",
                    _fmt(pstdev(iteration_counts)) if iteration_counts else "",
                    "",
                ]
            )
        return out

    def mean_objective(self, alg: str, w: int) -> float:
        values = [
            r.objective
            for r in self.rows
            if r.alg == alg and r.w == w and r.objective is not None
        ]
        if not values:
            raise ValidationError(f"no completed runs for {alg} at W={w}")
        return mean(values)

    def to_csv(self, *, include_timing: bool = False) -> str:
        lines = [",".join(CSV_COLUMNS)]
        for row in self.rows:
            lines.append(",".join(row.csv_cells(include_timing=include_timing)))
        for cells in self.aggregates():
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"


def _fmt(value: float) -> str:
    return f"{value:.6f}"


def worker_count() -> int:
    """Worker cap: SURVPATH_THREADS when set, else up to 8 CPUs."""
    raw = os.environ.get("SURVPATH_THREADS")
    if raw is None:
        return max(1, min(os.cpu_count() or 1, 8))
    try:
        value = int(raw)
    except ValueError:
        raise ValidationError(
            f"SURVPATH_THREADS must be a positive integer, got {raw!r}"
        ) from None
    if value < 1:
        raise ValidationError("SURVPATH_THREADS must be >= 1")
    return value


def _run_cell(
    problem: str,
    alg: str,
    mat: SurvivalMatrix,
    limits: Limits,
    w: int,
    k: int | None,
    trial: int,
    experiment_seed: int,
    q: float,
    c: float,
    node_limit: int | None,
) -> BenchRow:
    seed = (
        derive_seed(f"{experiment_seed}:{problem}:{alg}:{w}:{trial}")
        if alg in RANDOMIZED_ALGS
        else None
    )
    try:
        report = solve_named(
            problem,
            alg,
            mat,
            limits,
            seed=seed if seed is not None else 0,
            q=q,
            c=c,
            node_limit=node_limit,
        )
    except SearchBudgetExceeded:
        return BenchRow(alg, problem, w, k, trial, seed, None, None, None, 0)
    except RandomizedFailureError:
        return BenchRow(alg, problem, w, k, trial, seed, None, False, None, 0)
    return BenchRow(
        alg,
        problem,
        w,
        k,
        trial,
        seed,
        report.objective,
        report.solution.survivable,
        report.iterations,
        int(report.elapsed * 1e6),
    )


def _run_trial(task) -> list[BenchRow]:
    (problem, algs, mat, w, k, trial, experiment_seed, q, c, node_limit) = task
    limits = Limits(max_fibers_per_path=k, max_paths_per_fiber=w)
    return [
        _run_cell(problem, alg, mat, limits, w, k, trial, experiment_seed, q, c, node_limit)
        for alg in algs
    ]


def run_experiment(
    *,
    problem: str = "mfsp",
    algs: tuple[str, ...] = ("acg", "nacg", "rsg"),
    num_paths: int,
    num_fibers: int,
    w_values: tuple[int, ...],
    max_fibers_per_path: int | None = None,
    trials: int,
    seed: int = 0,
    q: float = 0.9,
    c: float = 10.0,
    node_limit: int | None = None,
    workers: int | None = None,
) -> ExperimentResult:
    """Run every requested algorithm over ``trials`` fresh instances per W."""
    valid = MSP_ALGS if problem == "msp" else MFSP_ALGS
    if problem not in ("msp", "mfsp"):
        raise ValidationError(f"unknown problem {problem!r}")
    for alg in algs:
        if alg not in valid:
            raise ValidationError(f"algorithm {alg!r} is not a {problem} solver")
    tasks = []
    for w in w_values:
        cfg = RandomEnsembleConfig(
            num_paths=num_paths,
            num_fibers=num_fibers,
            max_paths_per_fiber=w,
            max_fibers_per_path=max_fibers_per_path,
            trials=trials,
            seed=derive_seed(f"{seed}:ensemble:{w}"),
        )
        for trial, mat in enumerate(gen_random_parallel(cfg), start=1):
            tasks.append(
                (
                    problem,
                    tuple(algs),
                    mat,
                    w,
                    max_fibers_per_path,
                    trial,
                    seed,
                    q,
                    c,
                    node_limit,
                )
            )
    limit = workers if workers is not None else worker_count()
    if limit <= 1 or len(tasks) <= 1:
        nested = [_run_trial(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(limit, len(tasks))) as pool:
            nested = list(pool.map(_run_trial, tasks))
    rows = [row for batch in nested for row in batch]
    rows.sort(key=lambda r: (r.alg, r.w, r.trial))
    return ExperimentResult(problem=problem, rows=tuple(rows))
