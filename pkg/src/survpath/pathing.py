"""Candidate-path generation: restricted enumeration and parallel-path catalogs.

Solvers consume a :class:`~survpath.model.SurvivalMatrix`; this module produces
the path universe behind that matrix.  Two sources exist:

* :func:`enumerate_paths_k_restricted` walks the logical layer of a layered
  network and lists every simple source-sink path whose fiber footprint stays
  within a per-path cap;
* :func:`load_parallel_paths` reads a ``.spn`` file in which each path is given
  directly as a fiber set (the parallel-link abstraction).
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    LayeredNetwork,
    Limits,
    LogicalPath,
    SurvivalMatrix,
    ValidationError,
)

__all__ = [
    "PathCatalog",
    "enumerate_paths_k_restricted",
    "enumerate_paths_unrestricted",
    "load_parallel_paths",
]


@dataclass(frozen=True)
class PathCatalog:
    """An ordered universe of candidate logical paths.

    ``complete`` is True when the catalog provably contains every admissible
    path (enumeration output); catalogs loaded from files are not assumed
    complete.  Path ids are dense and positional: ``paths[j-1].path_id == j``.
    """

    paths: tuple[LogicalPath, ...]
    limits: Limits
    complete: bool

    def __post_init__(self) -> None:
        seen_links: set[tuple[int, ...]] = set()
        for pos, path in enumerate(self.paths, start=1):
            if path.path_id != pos:
                raise ValidationError(
                    f"catalog path ids must be dense: position {pos} holds id {path.path_id}"
                )
            k = self.limits.max_fibers_per_path
            if k is not None and path.cost > k:
                raise ValidationError(
                    f"path {path.path_id} uses {path.cost} fibers, above the cap {k}"
                )
            if path.links in seen_links:
                raise ValidationError(
                    f"catalog contains duplicate link sequence for path {path.path_id}"
                )
            seen_links.add(path.links)

    def __len__(self) -> int:
        return len(self.paths)

    def fiber_sets(self) -> list[frozenset[int]]:
        return [p.fibers_used for p in self.paths]

    def matrix(self, num_fibers: int) -> SurvivalMatrix:
        """Expand the catalog into a survival matrix over ``num_fibers`` fibers."""
        return SurvivalMatrix.from_fiber_sets(num_fibers, self.fiber_sets())


def _enumerate(net: LayeredNetwork, cap: int | None) -> list[LogicalPath]:
    """All simple s-t paths of the logical layer, fiber footprint <= cap.

    Neighbors are explored in ascending link-id order, so the output is sorted
    by link-sequence lexicographic order, which fixes path ids deterministically.
    Pruning is sound because a simple path's fiber union only grows along a
    partial path.
    """
    adjacency: dict[str, list[tuple[int, str]]] = {n: [] for n in net.logical.nodes}
    for k, (u, v) in enumerate(net.logical.links, start=1):
        adjacency[u].append((k, v))
        if not net.logical.directed:
            adjacency[v].append((k, u))
    for entries in adjacency.values():
        entries.sort()

    source, sink = net.logical.source, net.logical.sink
    link_fibers = [0] * (net.logical.num_links + 1)
    for k in range(1, net.logical.num_links + 1):
        mask = 0
        for f in net.routing.routes[k - 1]:
            mask |= 1 << (f - 1)
        link_fibers[k] = mask

    found: list[tuple[int, ...]] = []

    def walk(node: str, visited: set[str], links: list[int], fibers: int) -> None:
        if node == sink:
            found.append(tuple(links))
            return
        for k, nxt in adjacency[node]:
            if nxt in visited:
                continue
            merged = fibers | link_fibers[k]
            if cap is not None and merged.bit_count() > cap:
                continue
            visited.add(nxt)
            links.append(k)
            walk(nxt, visited, links, merged)
            links.pop()
            visited.remove(nxt)

    walk(source, {source}, [], 0)
    found.sort()

    paths = []
    for pos, links in enumerate(found, start=1):
        paths.append(
            LogicalPath(
                path_id=pos, links=links, fibers_used=net.fibers_of_links(links)
            )
        )
    return paths


def enumerate_paths_k_restricted(net: LayeredNetwork, max_fibers: int) -> PathCatalog:
    """Enumerate every simple s-t logical path using at most ``max_fibers`` fibers.

    A disconnected logical layer yields an empty (still complete) catalog.  The
    catalog size is bounded by m^K for m fibers, which is asserted rather than
    assumed.
    """
    if max_fibers < 1:
        raise ValidationError("max_fibers must be >= 1")
    paths = _enumerate(net, max_fibers)
    assert len(paths) <= max(net.num_fibers, 1) ** max_fibers
    return PathCatalog(
        paths=tuple(paths),
        limits=Limits(max_fibers_per_path=max_fibers),
        complete=True,
    )


def enumerate_paths_unrestricted(net: LayeredNetwork) -> PathCatalog:
    """Enumerate every simple s-t logical path with no fiber cap."""
    return PathCatalog(paths=tuple(_enumerate(net, None)), limits=Limits(), complete=True)


def load_parallel_paths(path) -> PathCatalog:
    """Read a ``.spn`` parallel-path file and return its validated catalog.

    See :mod:`survpath.formats` for the grammar and the validation rules
    (declared caps respected, path count within the load-cap bound).
    """
    from . import formats  # local import: formats builds on this module's types

    return formats.read_spn(path).catalog
