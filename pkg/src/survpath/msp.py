"""Minimum survivable path set (MSP): pick the fewest paths that survive every
single-fiber failure.

This is a set-cover problem over fiber rows: path ``j`` covers the fibers it
survives.  Three solvers are provided:

* :func:`msp_exact` — branch-and-bound over the bounded subset space.  With a
  per-path fiber cap K the optimum has at most K+1 paths; with a per-fiber load
  cap W, at most W+1 (any W+1 distinct paths already form a survivable set,
  since a fiber carried by at most W paths cannot be used by all of them).
* :func:`msp_greedy` — max-coverage greedy, ties to the smallest path id.
* :func:`msp_epsnet` — multiplicative-weight epsilon-net sampling: when the
  optimum has g paths, a random sample hitting every (1/2g)-heavy fiber row is
  likely survivable once the weights of surviving paths have been doubled a
  bounded number of rounds.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from itertools import accumulate
from random import Random

from .model import (
    Limits,
    PathSet,
    PreconditionError,
    RandomizedFailureError,
    SearchBudgetExceeded,
    SolveReport,
    SurvivalMatrix,
    _Stopwatch,
    require_feasible,
)

__all__ = ["EpsNetState", "msp_exact", "msp_greedy", "msp_epsnet"]


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------


def _size_bound(mat: SurvivalMatrix, limits: Limits | None) -> int:
    """Upper bound on the optimum's cardinality (and hence the search depth)."""
    bound = min(mat.num_fibers, mat.num_paths) + 1
    if limits is not None:
        if limits.max_fibers_per_path is not None:
            bound = min(bound, limits.max_fibers_per_path + 1)
        if limits.max_paths_per_fiber is not None:
            bound = min(bound, limits.max_paths_per_fiber + 1)
    return max(bound, 1)


def _validated_limits(mat: SurvivalMatrix, limits: Limits | None) -> Limits:
    limits = limits if limits is not None else Limits()
    limits.validate_against(mat)
    return limits


def effective_fiber_cap(mat: SurvivalMatrix, limits: Limits | None) -> int:
    """Declared per-path fiber cap, or the instance's max path cost (>= 1)."""
    if limits is not None and limits.max_fibers_per_path is not None:
        return limits.max_fibers_per_path
    return max(mat.max_path_cost(), 1)


# ---------------------------------------------------------------------------
# Greedy
# ---------------------------------------------------------------------------


def _greedy_selection(mat: SurvivalMatrix) -> tuple[list[int], list[tuple[int, int]]]:
    """Max-coverage greedy over fiber rows; returns (ids, per-step trace)."""
    full = mat.all_fibers_mask
    survive = [mat.survive_mask(j) for j in range(1, mat.num_paths + 1)]
    covered = 0
    chosen_mask = 0
    chosen: list[int] = []
    trace: list[tuple[int, int]] = []
    while covered != full:
        best_id = 0
        best_gain = -1
        for j in range(1, mat.num_paths + 1):
            if chosen_mask >> (j - 1) & 1:
                continue
            gain = (survive[j - 1] & ~covered).bit_count()
            if gain > best_gain:
                best_gain = gain
                best_id = j
        # Feasibility was checked up front, so progress is guaranteed.
        assert best_gain > 0
        chosen.append(best_id)
        chosen_mask |= 1 << (best_id - 1)
        covered |= survive[best_id - 1]
        trace.append((best_id, best_gain))
    return chosen, trace


def msp_greedy(mat: SurvivalMatrix) -> SolveReport:
    """Greedy MSP: repeatedly take the path surviving the most uncovered fibers.

    Ties break to the smallest path id.  On infeasible instances raises
    :class:`~survpath.model.InfeasibleInstanceError` naming an uncoverable
    fiber.  The per-step (path, gain) trace is reported under
    ``extra["selections"]`` so the greedy dominance property can be audited.
    """
    clock = _Stopwatch()
    require_feasible(mat)
    chosen, trace = _greedy_selection(mat)
    solution = PathSet.from_ids(mat, chosen)
    return SolveReport(
        algorithm="msp_greedy",
        problem="msp",
        solution=solution,
        objective=solution.size,
        iterations=len(chosen),
        seed=None,
        elapsed=clock.elapsed(),
        extra={"selections": [list(step) for step in trace]},
    )


# ---------------------------------------------------------------------------
# Exact
# ---------------------------------------------------------------------------


def _min_cover_size(
    mat: SurvivalMatrix, bound: int, incumbent: list[int], budget: list
) -> int:
    """Branch-and-bound for the minimum survivable-set size.

    Branches on an uncovered fiber with the fewest eligible survivors; each
    candidate is excluded from later siblings, which partitions the subset space
    and visits every survivable set at most once.
    """
    full = mat.all_fibers_mask
    n = mat.num_paths
    survive = [mat.survive_mask(j) for j in range(1, n + 1)]
    rows = [mat.survivor_row(i) for i in range(1, mat.num_fibers + 1)]
    best = min(len(incumbent), bound)

    def tick() -> None:
        budget[0] += 1
        if budget[0] > budget[1]:
            raise SearchBudgetExceeded(budget[0])

    def descend(depth: int, covered: int, eligible: int) -> None:
        nonlocal best
        tick()
        if covered == full:
            best = min(best, depth)
            return
        if depth + 1 >= best:
            return
        uncovered = full & ~covered
        # Pick the branch fiber with the fewest remaining survivors.
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
        # Admissible bound: each further path covers at most max_gain fibers.
        max_gain = 0
        probe = eligible
        while probe:
            low = probe & -probe
            gain = (survive[low.bit_length() - 1] & uncovered).bit_count()
            if gain > max_gain:
                max_gain = gain
            probe ^= low
        if max_gain == 0 or depth + -(-uncovered.bit_count() // max_gain) >= best:
            return
        siblings = eligible
        while branch_row:
            low = branch_row & -branch_row
            j = low.bit_length() - 1
            siblings &= ~low
            descend(depth + 1, covered | survive[j], siblings)
            branch_row ^= low
            if depth + 1 >= best:
                return

    descend(0, 0, (1 << n) - 1)
    return best


def _lex_smallest_cover(mat: SurvivalMatrix, size: int, budget: list) -> list[int]:
    """First survivable set of the given (optimal) size in ascending-id order.

    Depth-first over ascending ids returns the lexicographically smallest
    witness.  Skipping zero-gain candidates is sound at the optimal size: a
    minimum cover cannot contain a path contributing no new fiber row.
    """
    full = mat.all_fibers_mask
    n = mat.num_paths
    survive = [mat.survive_mask(j) for j in range(1, n + 1)]
    suffix_cover = [0] * (n + 2)
    for j in range(n, 0, -1):
        suffix_cover[j] = suffix_cover[j + 1] | survive[j - 1]

    def tick() -> None:
        budget[0] += 1
        if budget[0] > budget[1]:
            raise SearchBudgetExceeded(budget[0])

    def extend(start: int, chosen: list[int], covered: int) -> list[int] | None:
        tick()
        if covered == full:
            return list(chosen) if len(chosen) == size else None
        if len(chosen) == size:
            return None
        slots = size - len(chosen)
        for j in range(start, n + 1):
            if n - j + 1 < slots:
                return None
            gain = survive[j - 1] & ~covered
            if gain == 0:
                continue
            if (covered | suffix_cover[j]) != full:
                return None
            found = extend(j + 1, chosen + [j], covered | survive[j - 1])
            if found is not None:
                return found
        return None

    witness = extend(1, [], 0)
    assert witness is not None, "phase 1 proved a cover of this size exists"
    return witness


def msp_exact(
    mat: SurvivalMatrix,
    limits: Limits | None = None,
    *,
    node_limit: int | None = None,
) -> SolveReport:
    """Optimal MSP via bounded branch-and-bound.

    Returns the minimum-cardinality survivable set; among optima, the
    lexicographically smallest id tuple.  Declared limits must hold for the
    matrix (raising :class:`~survpath.model.PreconditionError` otherwise) and
    tighten the search-depth bound to K+1 / W+1.  ``node_limit`` caps search
    nodes, raising :class:`~survpath.model.SearchBudgetExceeded` beyond it.
    """
    clock = _Stopwatch()
    require_feasible(mat)
    limits = _validated_limits(mat, limits)
    bound = _size_bound(mat, limits)
    budget = [0, node_limit if node_limit is not None else math.inf]

    incumbent, _ = _greedy_selection(mat)
    best_size = _min_cover_size(mat, bound, incumbent, budget)
    witness = _lex_smallest_cover(mat, best_size, budget)

    solution = PathSet.from_ids(mat, witness)
    assert solution.survivable and solution.size == best_size
    return SolveReport(
        algorithm="msp_exact",
        problem="msp",
        solution=solution,
        objective=best_size,
        iterations=budget[0],
        seed=None,
        elapsed=clock.elapsed(),
        extra={"size_bound": bound},
    )


# ---------------------------------------------------------------------------
# Epsilon-net sampling
# ---------------------------------------------------------------------------


@dataclass
class EpsNetState:
    """Mutable state of one multiplicative-weight sampling run.

    ``weights[j-1]`` is the integer weight of path j (a power of two: weights
    start at 1 and only double).  ``unsurvived`` holds the fiber ids the last
    sample failed to cover.  The sampling distribution assigns path j
    probability ``weights[j-1] / sum(weights)``.
    """

    weights: list[int]
    epsilon: float
    sample_size: int
    c: float
    unsurvived: tuple[int, ...] = ()
    rounds: int = field(default=0)

    def total_weight(self) -> int:
        return sum(self.weights)

    def distribution(self) -> list[float]:
        total = self.total_weight()
        return [w / total for w in self.weights]

    def sample(self, rng: Random) -> list[int]:
        """Draw ``sample_size`` paths with replacement, deduplicated, ascending.

        Sampling uses exact integer arithmetic on the (arbitrarily large)
        weights: a uniform draw below the total weight is located in the
        cumulative-weight table.
        """
        cumulative = list(accumulate(self.weights))
        total = cumulative[-1]
        picked: set[int] = set()
        for _ in range(self.sample_size):
            r = rng.randrange(total)
            picked.add(bisect_right(cumulative, r) + 1)
        return sorted(picked)

    def double_survivors(self, mat: SurvivalMatrix, uncovered_mask: int) -> None:
        """Double the weight of every path surviving some uncovered fiber."""
        boost = 0
        remaining = uncovered_mask
        while remaining:
            low = remaining & -remaining
            boost |= mat.survivor_row(low.bit_length())
            remaining ^= low
        for j in range(len(self.weights)):
            if boost >> j & 1:
                self.weights[j] *= 2


def _prune_to_minimal(mat: SurvivalMatrix, ids: list[int]) -> list[int]:
    """Drop redundant paths while the set stays survivable.

    Candidates are tried costliest first (ties: smaller id) so that cheap
    paths — in particular zero-cost ones, which can never hurt — are the ones
    retained when either of two paths would be redundant.
    """
    kept = list(ids)
    for j in sorted(ids, key=lambda x: (-mat.path_cost(x), x)):
        if len(kept) == 1:
            break
        trial = [x for x in kept if x != j]
        if mat.is_survivable(trial):
            kept = trial
    return kept


def epsnet_round(state: EpsNetState, mat: SurvivalMatrix, rng: Random) -> list[int] | None:
    """Run one sampling round; return the pruned survivable set, or None.

    On failure the weights of all paths surviving some missed fiber are doubled
    and ``state.unsurvived`` records the missed fibers.
    """
    state.rounds += 1
    sample = state.sample(rng)
    covered = mat.survived_fibers_mask(sample)
    full = mat.all_fibers_mask
    if covered == full:
        state.unsurvived = ()
        return _prune_to_minimal(mat, sample)
    uncovered_mask = full & ~covered
    state.unsurvived = tuple(
        i + 1 for i in range(mat.num_fibers) if uncovered_mask >> i & 1
    )
    state.double_survivors(mat, uncovered_mask)
    return None


def _vc_dimension_proxy(mat: SurvivalMatrix, limits: Limits | None) -> float:
    """Sample-complexity driver D for the fiber-row range space.

    With a per-path fiber cap K every row is hit by all but at most K sampled
    paths, giving D = log2(K) + 1; with a per-fiber load cap W, D = W.  When
    both are declared the smaller bound applies; when neither is, the
    instance's own maximum path cost serves as its (trivially valid) cap.
    """
    candidates = []
    if limits is not None and limits.max_fibers_per_path is not None:
        candidates.append(math.log2(limits.max_fibers_per_path) + 1.0)
    if limits is not None and limits.max_paths_per_fiber is not None:
        candidates.append(float(limits.max_paths_per_fiber))
    if not candidates:
        candidates.append(math.log2(effective_fiber_cap(mat, None)) + 1.0)
    return max(min(candidates), 1.0)


def msp_epsnet(
    mat: SurvivalMatrix,
    limits: Limits | None = None,
    seed: int = 0,
    *,
    c: float = 10.0,
) -> SolveReport:
    """Randomized MSP via epsilon-net sampling with multiplicative weights.

    Doubles a guess g for the optimum size (1, 2, 4, ... up to n); for each
    guess runs up to ``ceil(4 g log2(m/g)) + 1`` rounds of weighted sampling
    with epsilon = 1/(2g) and sample size ``ceil(c (D/eps) log2(D/eps))``.
    A successful sample is pruned to a minimal survivable set.  Exhausting all
    guesses raises :class:`~survpath.model.RandomizedFailureError` carrying the
    seed.  Weights restart at 1 for every guess.
    """
    clock = _Stopwatch()
    require_feasible(mat)
    limits = _validated_limits(mat, limits)
    if c <= 0:
        raise PreconditionError("sampling constant c must be positive")
    rng = Random(seed)
    n = mat.num_paths
    m = mat.num_fibers
    if m == 0:
        solution = PathSet.from_ids(mat, ())
        return SolveReport(
            algorithm="msp_epsnet",
            problem="msp",
            solution=solution,
            objective=0,
            iterations=0,
            seed=seed,
            elapsed=clock.elapsed(),
            extra={},
        )
    dimension = _vc_dimension_proxy(mat, limits)

    total_rounds = 0
    guess = 1
    while guess <= n:
        epsilon = 1.0 / (2.0 * guess)
        ratio = dimension / epsilon
        sample_size = max(1, math.ceil(c * ratio * math.log2(max(ratio, 2.0))))
        if m > guess:
            round_cap = math.ceil(4.0 * guess * math.log2(m / guess)) + 1
        else:
            round_cap = 1
        state = EpsNetState(
            weights=[1] * n, epsilon=epsilon, sample_size=sample_size, c=c
        )
        for _ in range(round_cap):
            found = epsnet_round(state, mat, rng)
            if found is not None:
                total_rounds += state.rounds
                solution = PathSet.from_ids(mat, found)
                return SolveReport(
                    algorithm="msp_epsnet",
                    problem="msp",
                    solution=solution,
                    objective=solution.size,
                    iterations=total_rounds,
                    seed=seed,
                    elapsed=clock.elapsed(),
                    extra={
                        "guess": guess,
                        "epsilon": epsilon,
                        "sample_size": sample_size,
                        "rounds_in_final_guess": state.rounds,
                    },
                )
        total_rounds += state.rounds
        guess *= 2

    raise RandomizedFailureError(
        seed,
        f"no survivable sample after {total_rounds} rounds across all size guesses",
    )
