"""Independent brute-force oracles used to freeze expected values.

Everything here is deliberately naive: exhaustive subset enumeration with a
subset-DP for unions (still visits every subset), plain set arithmetic, and
none of the solvers' data structures or pruning.  Tests compare solver output
against these, never the other way around.
"""

from __future__ import annotations

from itertools import combinations
from random import Random

from survpath import SurvivalMatrix


def _ids_of(mask: int) -> tuple[int, ...]:
    return tuple(i + 1 for i in range(mask.bit_length()) if mask >> i & 1)


def _subset_tables(mat: SurvivalMatrix):
    """cover[mask], fibers[mask], addcost[mask] for every path subset."""
    n = mat.num_paths
    survive = [mat.survive_mask(j) for j in range(1, n + 1)]
    used = [mat.used_mask(j) for j in range(1, n + 1)]
    costs = [u.bit_count() for u in used]
    size = 1 << n
    cover = [0] * size
    union = [0] * size
    addcost = [0] * size
    for mask in range(1, size):
        low = mask & -mask
        prev = mask ^ low
        j = low.bit_length() - 1
        cover[mask] = cover[prev] | survive[j]
        union[mask] = union[prev] | used[j]
        addcost[mask] = addcost[prev] + costs[j]
    return cover, union, addcost


def brute_msp(mat: SurvivalMatrix) -> tuple[int, tuple[int, ...]] | None:
    """Minimum survivable set size with the lexicographically smallest witness.

    Iterates sizes ascending and id-combinations in lexicographic order, so
    the first hit is the canonical answer.  Returns None when infeasible.
    """
    n = mat.num_paths
    for r in range(0, n + 1):
        for combo in combinations(range(1, n + 1), r):
            if mat.is_survivable(combo):
                return r, combo
    return None


def brute_mfsp(mat: SurvivalMatrix) -> tuple[int, tuple[int, ...]] | None:
    """Minimum distinct-fiber survivable set; ties by set size then lex ids."""
    full = mat.all_fibers_mask
    cover, union, _ = _subset_tables(mat)
    best: tuple[int, int, tuple[int, ...]] | None = None
    for mask in range(1 << mat.num_paths):
        if cover[mask] == full:
            key = (union[mask].bit_count(), mask.bit_count(), _ids_of(mask))
            if best is None or key < best:
                best = key
    if best is None:
        return None
    return best[0], best[2]


def brute_min_additive(mat: SurvivalMatrix) -> tuple[int, tuple[int, ...]] | None:
    """Survivable set minimizing the *sum* of member fiber counts."""
    full = mat.all_fibers_mask
    cover, _, addcost = _subset_tables(mat)
    best: tuple[int, int, tuple[int, ...]] | None = None
    for mask in range(1 << mat.num_paths):
        if cover[mask] == full:
            key = (addcost[mask], mask.bit_count(), _ids_of(mask))
            if best is None or key < best:
                best = key
    if best is None:
        return None
    return best[0], best[2]


def brute_min_cover(ground_size: int, subsets) -> int | None:
    """Exhaustive minimum set-cover size."""
    universe = set(range(1, ground_size + 1))
    subsets = [set(s) for s in subsets]
    for r in range(0, len(subsets) + 1):
        for combo in combinations(range(len(subsets)), r):
            covered = set()
            for idx in combo:
                covered |= subsets[idx]
            if covered >= universe:
                return r
    return None


def random_feasible_matrix(
    rng: Random,
    *,
    max_paths: int = 12,
    max_fibers: int = 12,
    min_paths: int = 2,
    min_fibers: int = 1,
) -> SurvivalMatrix:
    """Uniform-ish random parallel instance, regenerated until feasible."""
    while True:
        n = rng.randint(min_paths, max_paths)
        m = rng.randint(min_fibers, max_fibers)
        sets = []
        for _ in range(n):
            size = rng.randint(1, m)
            sets.append(rng.sample(range(1, m + 1), size))
        mat = SurvivalMatrix.from_fiber_sets(m, sets)
        if not mat.infeasible_fibers():
            return mat


def random_parallel_layered(rng: Random):
    """Random layered network whose logical layer is parallel s-t links.

    The physical layer is a chain plus random chords; every logical link is
    routed over an independently drawn simple physical s-t path.  Because each
    logical path is a single link, matrix survivability and residual-graph
    survivability must agree exactly, which makes these nets a clean
    cross-check corpus.
    """
    from survpath import (
        LayeredNetwork,
        LightpathRouting,
        LogicalTopology,
        PhysicalTopology,
    )

    node_count = rng.randint(3, 6)
    nodes = tuple(f"n{i}" for i in range(node_count))
    s, t = nodes[0], nodes[-1]
    fibers = [(nodes[i], nodes[i + 1]) for i in range(node_count - 1)]
    for _ in range(rng.randint(0, 3)):
        u, v = rng.sample(range(node_count), 2)
        fibers.append((nodes[u], nodes[v]))

    adjacency: dict[str, list[tuple[int, str]]] = {}
    for fid, (u, v) in enumerate(fibers, start=1):
        adjacency.setdefault(u, []).append((fid, v))
        adjacency.setdefault(v, []).append((fid, u))

    def random_route() -> tuple[int, ...]:
        walk: list[int] = []

        def dfs(node: str, visited: frozenset[str]) -> bool:
            if node == t:
                return True
            neighbors = list(adjacency.get(node, []))
            rng.shuffle(neighbors)
            for fid, nxt in neighbors:
                if nxt in visited:
                    continue
                walk.append(fid)
                if dfs(nxt, visited | {nxt}):
                    return True
                walk.pop()
            return False

        assert dfs(s, frozenset({s}))
        return tuple(walk)

    num_links = rng.randint(1, 4)
    logical = LogicalTopology(
        nodes=(s, t),
        links=tuple((s, t) for _ in range(num_links)),
        source=s,
        sink=t,
    )
    routing = LightpathRouting(routes=tuple(random_route() for _ in range(num_links)))
    physical = PhysicalTopology(nodes=nodes, fibers=tuple(fibers))
    return LayeredNetwork(physical=physical, logical=logical, routing=routing)


def naive_is_survivable(mat: SurvivalMatrix, ids) -> bool:
    """Set-arithmetic survivability: every fiber avoided by some member."""
    ids = list(ids)
    return all(
        any(fiber not in mat.path_fibers(j) for j in ids)
        for fiber in range(1, mat.num_fibers + 1)
    )
