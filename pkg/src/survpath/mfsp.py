"""Minimum-fiber survivable path set (MFSP): select paths surviving every
single-fiber failure while touching the fewest distinct fibers.

Solvers:

* :func:`mfsp_exact` — branch-and-bound over bounded subset space; optimal in
  (fiber count, then path count, then lexicographic ids).
* :func:`mfsp_acg` / :func:`mfsp_nacg` — amortized-cost greedies.  Each step
  selects the path minimizing cost / newly-survived-fibers, where cost is the
  path's full fiber count (static, ACG) or only the fibers it would newly add
  to the selection's footprint (dynamic, NACG, rewarding fiber re-use).
* :func:`mfsp_rsg` — NACG plus a randomized substitution sweep that retires an
  earlier selection dominated by the union of the newest path and a randomly
  drawn previous one.
* :func:`mfsp_randomized_rounding` — rounds the fractional relaxation over
  enough independent rounds to reach a target survivability probability.
* :func:`mfsp_epsnet` — the epsilon-net sampler, scored by fiber footprint.

:func:`check_lemma7` verifies the load-cap accounting bound tying a selection's
summed path costs to its fiber footprint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from random import Random

from .lp import FractionalSolution, solve_mfsp_relaxation
from .model import (
    Limits,
    PathSet,
    PreconditionError,
    SearchBudgetExceeded,
    SolveReport,
    SurvivalMatrix,
    ValidationError,
    _Stopwatch,
    require_feasible,
)
from .msp import msp_epsnet

__all__ = [
    "GreedyState",
    "RoundingConfig",
    "mfsp_exact",
    "mfsp_acg",
    "mfsp_nacg",
    "mfsp_rsg",
    "mfsp_randomized_rounding",
    "mfsp_epsnet",
    "check_lemma7",
]


# ---------------------------------------------------------------------------
# Greedy family
# ---------------------------------------------------------------------------


@dataclass
class GreedyState:
    """Evolving state of an amortized-cost greedy run.

    ``covered_mask`` holds fibers whose failure the selection already survives;
    ``used_union`` holds fibers the selection is routed over.  The amortized
    cost of a candidate is cost/gain and is undefined (``None``, treated as
    +infinity) when the candidate survives no new fiber.
    """

    mat: SurvivalMatrix
    dynamic: bool
    selected: list[int] = field(default_factory=list)
    covered_mask: int = 0
    used_union: int = 0

    def gain(self, j: int) -> int:
        """Fibers newly survived if path j were selected now."""
        return (self.mat.survive_mask(j) & ~self.covered_mask).bit_count()

    def cost(self, j: int) -> int:
        """Static fiber count, or (dynamic mode) only the new fibers added."""
        used = self.mat.used_mask(j)
        if self.dynamic:
            used &= ~self.used_union
        return used.bit_count()

    def amortized(self, j: int) -> Fraction | None:
        g = self.gain(j)
        if g == 0:
            return None
        return Fraction(self.cost(j), g)

    @property
    def complete(self) -> bool:
        return self.covered_mask == self.mat.all_fibers_mask

    def best_candidate(self) -> int:
        """Unselected path with the least amortized cost.

        Ties break to the smaller cost, then the smaller path id (ascending
        scan with strict improvement gives both for free).
        """
        best_j = 0
        best_cost = 0
        best_gain = 0
        chosen = set(self.selected)
        for j in range(1, self.mat.num_paths + 1):
            if j in chosen:
                continue
            g = self.gain(j)
            if g == 0:
                continue
            c = self.cost(j)
            if best_j == 0:
                best_j, best_cost, best_gain = j, c, g
                continue
            # c/g < best_cost/best_gain, by cross-multiplication.
            lhs = c * best_gain
            rhs = best_cost * g
            if lhs < rhs or (lhs == rhs and c < best_cost):
                best_j, best_cost, best_gain = j, c, g
        assert best_j, "feasibility precheck guarantees an eligible candidate"
        return best_j

    def select(self, j: int) -> tuple[int, int]:
        """Add path j; returns its (cost, gain) as charged at selection time."""
        c, g = self.cost(j), self.gain(j)
        self.selected.append(j)
        self.covered_mask |= self.mat.survive_mask(j)
        self.used_union |= self.mat.used_mask(j)
        return c, g

    def remove(self, j: int) -> None:
        """Drop path j and rebuild the fiber footprint (coverage must hold)."""
        self.selected.remove(j)
        self.used_union = 0
        for k in self.selected:
            self.used_union |= self.mat.used_mask(k)


def _greedy_run(
    mat: SurvivalMatrix,
    *,
    dynamic: bool,
    algorithm: str,
    rng: Random | None = None,
    seed: int | None = None,
) -> SolveReport:
    clock = _Stopwatch()
    require_feasible(mat)
    state = GreedyState(mat=mat, dynamic=dynamic)
    trace: list[list[int]] = []
    removals: list[int] = []
    iterations = 0
    while not state.complete:
        j = state.best_candidate()
        c, g = state.select(j)
        iterations += 1
        trace.append([j, c, g])
        if rng is not None and iterations > 2 and len(state.selected) > 1:
            _substitution_sweep(state, j, rng, removals)
    solution = PathSet.from_ids(mat, state.selected)
    assert solution.survivable
    extra: dict = {"selections": trace}
    if rng is not None:
        extra["removed"] = removals
    return SolveReport(
        algorithm=algorithm,
        problem="mfsp",
        solution=solution,
        objective=solution.num_fibers_used,
        iterations=iterations,
        seed=seed,
        elapsed=clock.elapsed(),
        extra=extra,
    )


def _substitution_sweep(
    state: GreedyState, newest: int, rng: Random, removals: list[int]
) -> None:
    """Retire at most one earlier selection dominated by ``newest`` + a random peer.

    A previous selection k is dominated when every fiber it survives is already
    survived by the newest path together with the drawn peer; removing it keeps
    coverage identical (asserted) and can only shrink the fiber footprint.
    """
    previous = [k for k in state.selected if k != newest]
    peer = previous[rng.randrange(len(previous))]
    dominated_by = state.mat.survive_mask(newest) | state.mat.survive_mask(peer)
    victims = [
        k
        for k in previous
        if k != peer and state.mat.survive_mask(k) & ~dominated_by == 0
    ]
    if not victims:
        return
    victim = min(victims)
    before = state.covered_mask
    state.remove(victim)
    after = 0
    for k in state.selected:
        after |= state.mat.survive_mask(k)
    assert after == before, "substitution sweep must preserve coverage"
    removals.append(victim)


def mfsp_acg(mat: SurvivalMatrix) -> SolveReport:
    """Amortized-cost greedy with static costs (a path always charges its full
    fiber count, even for fibers the selection already uses)."""
    return _greedy_run(mat, dynamic=False, algorithm="mfsp_acg")


def mfsp_nacg(mat: SurvivalMatrix) -> SolveReport:
    """Amortized-cost greedy with dynamic costs: fibers already in the
    selection's footprint are free, so re-using lit fibers is rewarded."""
    return _greedy_run(mat, dynamic=True, algorithm="mfsp_nacg")


def mfsp_rsg(mat: SurvivalMatrix, seed: int = 0) -> SolveReport:
    """Randomized substitution greedy.

    Identical to :func:`mfsp_nacg` for the first two selections; afterwards
    each selection is followed by one substitution sweep (see
    :func:`_substitution_sweep`).  Removed paths may be selected again later;
    coverage grows monotonically, so the run terminates.
    """
    return _greedy_run(
        mat, dynamic=True, algorithm="mfsp_rsg", rng=Random(seed), seed=seed
    )


# ---------------------------------------------------------------------------
# Exact
# ---------------------------------------------------------------------------


def _mfsp_size_bound(mat: SurvivalMatrix, limits: Limits | None) -> int:
    """Search-depth bound: some optimal selection is inclusion-minimal, and a
    minimal survivable set has at most W+1 members under a load cap W (each
    member privately survives some fiber that all the others then use)."""
    if limits is not None and limits.max_paths_per_fiber is not None:
        return limits.max_paths_per_fiber + 1
    return min(mat.num_fibers, mat.num_paths) + 1


def mfsp_exact(
    mat: SurvivalMatrix,
    limits: Limits | None = None,
    *,
    node_limit: int | None = None,
) -> SolveReport:
    """Optimal MFSP via bounded branch-and-bound.

    Minimizes the distinct-fiber footprint; among minimum-footprint selections
    prefers the fewest paths, then the lexicographically smallest id tuple.
    ``node_limit`` caps search nodes
    (:class:`~survpath.model.SearchBudgetExceeded` beyond it).
    """
    clock = _Stopwatch()
    require_feasible(mat)
    limits = limits if limits is not None else Limits()
    limits.validate_against(mat)
    size_bound = _mfsp_size_bound(mat, limits)

    n = mat.num_paths
    full = mat.all_fibers_mask
    survive = [mat.survive_mask(j) for j in range(1, n + 1)]
    used = [mat.used_mask(j) for j in range(1, n + 1)]
    rows = [mat.survivor_row(i) for i in range(1, mat.num_fibers + 1)]

    seed_report = mfsp_nacg(mat)
    incumbent_ids = tuple(sorted(seed_report.solution.selected))
    best = [
        seed_report.solution.num_fibers_used,
        len(incumbent_ids),
        incumbent_ids,
    ]
    budget = [0, node_limit if node_limit is not None else math.inf]

    def descend(selected: list[int], covered: int, union: int, eligible: int) -> None:
        budget[0] += 1
        if budget[0] > budget[1]:
            raise SearchBudgetExceeded(budget[0])
        fibers_now = union.bit_count()
        if covered == full:
            candidate = (fibers_now, len(selected), tuple(sorted(selected)))
            if candidate < tuple(best):
                best[0], best[1], best[2] = candidate
            return
        if fibers_now > best[0]:
            return
        if len(selected) >= size_bound:
            return
        if fibers_now == best[0] and len(selected) + 1 > best[1]:
            return
        uncovered = full & ~covered
        branch_row = 0
        branch_count = n + 1
        remaining = uncovered
        while remaining:
            low = remaining & -remaining
            row = rows[low.bit_length() - 1] & eligible
            count = row.bit_count()
            if count < branch_count:
                branch_count = count
                branch_row = row
                if count == 0:
                    return
            remaining ^= low
        # Admissible bound: any extension adds at least the cheapest helpful
        # candidate's new fibers.
        min_new = None
        probe = eligible
        while probe:
            low = probe & -probe
            jz = low.bit_length() - 1
            if survive[jz] & uncovered:
                new = (used[jz] & ~union).bit_count()
                if min_new is None or new < min_new:
                    min_new = new
            probe ^= low
        if min_new is None or fibers_now + min_new > best[0]:
            return
        candidates = []
        probe = branch_row
        while probe:
            low = probe & -probe
            jz = low.bit_length() - 1
            candidates.append(((used[jz] & ~union).bit_count(), jz + 1))
            probe ^= low
        candidates.sort()
        siblings = eligible
        for _, j in candidates:
            siblings &= ~(1 << (j - 1))
            descend(
                selected + [j],
                covered | survive[j - 1],
                union | used[j - 1],
                siblings,
            )

    descend([], 0, 0, (1 << n) - 1)

    solution = PathSet.from_ids(mat, best[2])
    assert solution.survivable and solution.num_fibers_used == best[0]
    return SolveReport(
        algorithm="mfsp_exact",
        problem="mfsp",
        solution=solution,
        objective=best[0],
        iterations=budget[0],
        seed=None,
        elapsed=clock.elapsed(),
        extra={"size_bound": size_bound},
    )


# ---------------------------------------------------------------------------
# Randomized rounding
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RoundingConfig:
    """Randomized-rounding parameters.

    ``target_survivability`` is the desired probability q that the rounded
    selection is survivable; the round count for an m-fiber instance is
    ``ceil(ln(m / (1 - q)))`` (at least 1), which drives the per-fiber failure
    probability below ``(1 - q) / m``.
    """

    target_survivability: float
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.target_survivability < 1.0:
            raise ValidationError("target_survivability must lie strictly in (0, 1)")

    def rounds(self, num_fibers: int) -> int:
        if num_fibers <= 0:
            return 1
        raw = math.log(num_fibers / (1.0 - self.target_survivability))
        return max(1, math.ceil(raw))


def mfsp_randomized_rounding(
    mat: SurvivalMatrix,
    config: RoundingConfig,
    *,
    repair: bool = False,
    relaxation: FractionalSolution | None = None,
) -> SolveReport:
    """Round the fractional relaxation into a path selection.

    Runs ``config.rounds(m)`` independent rounds; each round admits path j with
    probability ``p*_j``.  The union may fail survivability (the 1-q event) —
    the report says so rather than hiding it.  With ``repair=True`` a greedy
    max-coverage completion is appended and reported separately under
    ``extra["repair_added"]``.  Pass ``relaxation`` to reuse an LP solution
    across seeds.
    """
    clock = _Stopwatch()
    require_feasible(mat)
    lp = relaxation if relaxation is not None else solve_mfsp_relaxation(mat)
    if len(lp.path_values) != mat.num_paths:
        raise ValidationError("relaxation does not match the matrix dimensions")
    rounds = config.rounds(mat.num_fibers)
    rng = Random(config.seed)
    chosen: set[int] = set()
    for _ in range(rounds):
        for j in range(1, mat.num_paths + 1):
            if rng.random() < lp.path_values[j - 1]:
                chosen.add(j)
    extra: dict = {
        "lp_objective": lp.objective,
        "rounds": rounds,
    }
    if repair and not mat.is_survivable(chosen):
        extra["objective_before_repair"] = len(mat.fibers_used_by(chosen))
        added: list[int] = []
        covered = mat.survived_fibers_mask(chosen)
        full = mat.all_fibers_mask
        while covered != full:
            best_j = 0
            best_gain = -1
            for j in range(1, mat.num_paths + 1):
                if j in chosen:
                    continue
                gain = (mat.survive_mask(j) & ~covered).bit_count()
                if gain > best_gain:
                    best_gain = gain
                    best_j = j
            assert best_gain > 0
            chosen.add(best_j)
            added.append(best_j)
            covered |= mat.survive_mask(best_j)
        extra["repair_added"] = added
    solution = PathSet.from_ids(mat, chosen)
    return SolveReport(
        algorithm="mfsp_rounding",
        problem="mfsp",
        solution=solution,
        objective=solution.num_fibers_used,
        iterations=rounds,
        seed=config.seed,
        elapsed=clock.elapsed(),
        extra=extra,
    )


# ---------------------------------------------------------------------------
# Epsilon-net wrapper
# ---------------------------------------------------------------------------


def mfsp_epsnet(
    mat: SurvivalMatrix,
    limits: Limits,
    seed: int = 0,
    *,
    c: float = 10.0,
) -> SolveReport:
    """Epsilon-net sampling scored by fiber footprint.

    Requires a declared per-fiber load cap (the W-restricted setting), which
    both bounds the sampler's dimension proxy and gives the footprint guarantee
    its meaning.  Raises the sampler's
    :class:`~survpath.model.RandomizedFailureError` on schedule exhaustion.
    """
    clock = _Stopwatch()
    if limits is None or limits.max_paths_per_fiber is None:
        raise PreconditionError(
            "mfsp_epsnet requires a declared per-fiber load cap (W)"
        )
    inner = msp_epsnet(mat, limits, seed, c=c)
    solution = inner.solution
    return SolveReport(
        algorithm="mfsp_epsnet",
        problem="mfsp",
        solution=solution,
        objective=solution.num_fibers_used,
        iterations=inner.iterations,
        seed=seed,
        elapsed=clock.elapsed(),
        extra=dict(inner.extra, msp_size=solution.size),
    )


# ---------------------------------------------------------------------------
# Accounting bound
# ---------------------------------------------------------------------------


def check_lemma7(mat: SurvivalMatrix, selected, limits: Limits) -> bool:
    """Verify the load-cap accounting bound for a selection.

    Under a per-fiber load cap W, summing each selected path's fiber count
    charges every fiber of the footprint at most W times, so
    ``sum(C_j) <= W * |footprint|``.  With W=1 the selection is fiber-disjoint
    and the bound is an equality.  Raises
    :class:`~survpath.model.PreconditionError` when no load cap is declared.
    """
    if limits is None or limits.max_paths_per_fiber is None:
        raise PreconditionError("check_lemma7 requires a declared per-fiber load cap")
    if isinstance(selected, PathSet):
        ids = selected.selected
    else:
        ids = tuple(selected)
    total_cost = sum(mat.path_cost(j) for j in ids)
    footprint = len(mat.fibers_used_by(ids))
    return total_cost <= limits.max_paths_per_fiber * footprint
