"""Fractional relaxation of the minimum-fiber survivable path set problem.

The relaxation assigns each path an intensity ``p_j`` in [0, 1] and each fiber
a usage level ``f_i``, minimizing ``sum(f)`` subject to

* every fiber row keeps surviving mass at least 1: ``sum_{j survives i} p_j >= 1``;
* a fiber is at least as used as any path routed over it: ``f_i >= p_j``
  whenever path j uses fiber i.

The optimum lower-bounds the integral optimum (weak duality), and its ``p``
vector drives the randomized-rounding solver.

The solver is a deterministic two-phase dense-tableau simplex over exact
rationals (:class:`fractions.Fraction`) with Bland's rule, so results carry no
floating-point noise and never cycle.  It is intended for the desk-scale
instances this package targets, not industrial LPs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .model import SurvPathError, SurvivalMatrix, _Stopwatch, require_feasible

__all__ = ["FractionalSolution", "solve_mfsp_relaxation"]

FEASIBILITY_TOL = 1e-9
OBJECTIVE_RELATIVE_TOL = 1e-7


@dataclass(frozen=True)
class FractionalSolution:
    """Optimal basic feasible solution of the fiber relaxation.

    ``path_values`` and ``fiber_values`` are float views of the exact rational
    optimum kept in ``path_exact`` / ``fiber_exact``; ``objective`` is
    ``sum(fiber_values)``.
    """

    path_values: tuple[float, ...]
    fiber_values: tuple[float, ...]
    objective: float
    path_exact: tuple[Fraction, ...]
    fiber_exact: tuple[Fraction, ...]
    elapsed: float = 0.0

    @property
    def objective_exact(self) -> Fraction:
        return sum(self.fiber_exact, Fraction(0))


class _Tableau:
    """Dense simplex tableau over Fractions; rows carry rhs in the last cell."""

    def __init__(self, rows: list[list[Fraction]], basis: list[int], ncols: int):
        self.rows = rows
        self.basis = basis
        self.ncols = ncols

    def reduced_costs(self, cost: list[Fraction]) -> list[Fraction]:
        """z row for the given cost vector, rhs cell = -objective."""
        z = list(cost) + [Fraction(0)]
        for r, row in enumerate(self.rows):
            cb = cost[self.basis[r]]
            if cb:
                for j in range(self.ncols + 1):
                    z[j] -= cb * row[j]
        return z

    def pivot(self, r: int, col: int, z: list[Fraction]) -> None:
        row = self.rows[r]
        piv = row[col]
        if piv != 1:
            inv = 1 / piv
            self.rows[r] = row = [v * inv for v in row]
        for rr, other in enumerate(self.rows):
            if rr != r and other[col]:
                factor = other[col]
                self.rows[rr] = [a - factor * b for a, b in zip(other, row)]
        if z[col]:
            factor = z[col]
            z[:] = [a - factor * b for a, b in zip(z, row)]
        self.basis[r] = col

    def optimize(self, z: list[Fraction], allowed: int) -> None:
        """Bland's rule: smallest negative-reduced-cost column enters; the
        leaving row takes the min ratio, ties to the smallest basic index."""
        while True:
            enter = -1
            for j in range(allowed):
                if z[j] < 0:
                    enter = j
                    break
            if enter < 0:
                return
            leave = -1
            best: Fraction | None = None
            for r, row in enumerate(self.rows):
                coeff = row[enter]
                if coeff > 0:
                    ratio = row[-1] / coeff
                    if best is None or ratio < best or (
                        ratio == best and self.basis[r] < self.basis[leave]
                    ):
                        best = ratio
                        leave = r
            if leave < 0:
                raise SurvPathError(
                    "relaxation appears unbounded; the model guarantees a bounded "
                    "optimum, so the instance data is inconsistent"
                )
            self.pivot(leave, enter, z)


def solve_mfsp_relaxation(mat: SurvivalMatrix) -> FractionalSolution:
    """Solve the fiber relaxation to proven optimality.

    Raises :class:`~survpath.model.InfeasibleInstanceError` when some fiber is
    used by every path (the cover row would be empty).  The returned solution
    satisfies every constraint exactly; the float views are within 1e-9 of
    feasibility by construction.
    """
    clock = _Stopwatch()
    require_feasible(mat)
    n = mat.num_paths
    m = mat.num_fibers

    zero = Fraction(0)
    one = Fraction(1)

    links = [
        (i, j)
        for j in range(1, n + 1)
        for i in range(1, m + 1)
        if mat.uses(i, j)
    ]
    n_link = len(links)
    # Column layout: p (n) | f (m) | cover surplus (m) | link slack (n_link)
    #                | upper-bound slack (n) | artificial (m).
    col_f = n
    col_surp = col_f + m
    col_link = col_surp + m
    col_ub = col_link + n_link
    col_art = col_ub + n
    ncols = col_art + m

    rows: list[list[Fraction]] = []
    basis: list[int] = []

    for i in range(1, m + 1):
        row = [zero] * (ncols + 1)
        survivors = mat.survivor_row(i)
        for j in range(n):
            if survivors >> j & 1:
                row[j] = one
        row[col_surp + i - 1] = -one
        row[col_art + i - 1] = one
        row[-1] = one
        rows.append(row)
        basis.append(col_art + i - 1)

    for idx, (i, j) in enumerate(links):
        row = [zero] * (ncols + 1)
        row[j - 1] = one
        row[col_f + i - 1] = -one
        row[col_link + idx] = one
        rows.append(row)
        basis.append(col_link + idx)

    for j in range(1, n + 1):
        row = [zero] * (ncols + 1)
        row[j - 1] = one
        row[col_ub + j - 1] = one
        row[-1] = one
        rows.append(row)
        basis.append(col_ub + j - 1)

    tab = _Tableau(rows, basis, ncols)

    # Phase 1: drive the artificial variables to zero.
    cost1 = [zero] * ncols
    for c in range(col_art, ncols):
        cost1[c] = one
    z1 = tab.reduced_costs(cost1)
    tab.optimize(z1, allowed=col_art)
    if -z1[-1] != 0:
        raise SurvPathError(
            "relaxation phase 1 ended positive; feasibility precheck should have "
            "caught this instance"
        )
    # Pivot lingering zero-level artificials out of the basis (or drop their rows).
    for r in range(len(tab.rows) - 1, -1, -1):
        if tab.basis[r] >= col_art:
            target = next(
                (c for c in range(col_art) if tab.rows[r][c] != 0), None
            )
            if target is None:
                del tab.rows[r]
                del tab.basis[r]
            else:
                tab.pivot(r, target, z1)
    for row in tab.rows:
        del row[col_art:-1]
    tab.ncols = col_art

    # Phase 2: minimize total fiber usage.
    cost2 = [zero] * col_art
    for c in range(col_f, col_f + m):
        cost2[c] = one
    z2 = tab.reduced_costs(cost2)
    tab.optimize(z2, allowed=col_art)

    values = [zero] * col_art
    for r, b in enumerate(tab.basis):
        values[b] = tab.rows[r][-1]
    p_exact = tuple(values[:n])
    f_exact = tuple(values[col_f : col_f + m])

    for j, pj in enumerate(p_exact, start=1):
        assert 0 <= pj <= 1, f"path value p_{j} out of [0,1]"
    for i in range(1, m + 1):
        survivors = mat.survivor_row(i)
        mass = sum(p_exact[j] for j in range(n) if survivors >> j & 1)
        assert mass >= 1, f"cover row {i} violated at the claimed optimum"
    for i, j in links:
        assert f_exact[i - 1] >= p_exact[j - 1], f"link row f_{i} >= p_{j} violated"

    objective = float(sum(f_exact, zero))
    return FractionalSolution(
        path_values=tuple(float(v) for v in p_exact),
        fiber_values=tuple(float(v) for v in f_exact),
        objective=objective,
        path_exact=p_exact,
        fiber_exact=f_exact,
        elapsed=clock.elapsed(),
    )
