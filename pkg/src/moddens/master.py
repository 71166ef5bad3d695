"""Restricted master problem: column pool, packing-relaxed LP and restricted ILP.

The master LP has one row per vertex.  Rows start as <= 1 (set packing) and
are promoted to = 1 as the column generation run discovers vertices that the
packing optimum leaves uncovered.  Equality rows carry a big-M artificial
column so the LP stays feasible after branching removes columns; a positive
artificial at convergence signals a genuinely uncoverable vertex.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .graphs import Community, Graph, Partition, modularity_density
from .linprog import (
    EQ,
    LE,
    OPTIMAL,
    Basis,
    LinearProgram,
    LpSolution,
    SimplexEngine,
    remap_basis,
)
from .milp import (
    INFEASIBLE_STATUS,
    OPTIMAL_STATUS,
    TIMED_OUT,
    MixedIntegerProgram,
    ProveOptimal,
    milp_solve,
)

log = logging.getLogger(__name__)

COVERAGE_TOL = 1e-6
INT_TOL = 1e-6
ART_TOL = 1e-6


class ColumnPool:
    """Ordered, duplicate-free collection of candidate communities."""

    def __init__(self, columns: Iterable[Community] = ()) -> None:
        self.columns: list[Community] = []
        self._index: dict[frozenset, int] = {}
        for c in columns:
            self.add(c)

    def add(self, c: Community) -> bool:
        """Append a column; returns False (pool unchanged) on duplicates."""
        if c.members in self._index:
            return False
        self._index[c.members] = len(self.columns)
        self.columns.append(c)
        return True

    def __len__(self) -> int:
        return len(self.columns)

    def __iter__(self):
        return iter(self.columns)

    def __contains__(self, members: frozenset) -> bool:
        return members in self._index


def initial_pool(g: Graph) -> ColumnPool:
    """One singleton column per vertex, in vertex order."""
    return ColumnPool(Community.from_members(g, [i]) for i in range(g.n))


def big_m(g: Graph) -> float:
    # any contribution is at most n - 1 and any partition score at most 2m,
    # so this penalty dominates every legitimate objective
    return float(4 * g.m + g.n)


def filter_pool_for_branch(pool: ColumnPool, pair: tuple[int, int], side: str) -> ColumnPool:
    """Keep the columns compatible with one side of a branching pair.

    side="same": keep columns containing both endpoints or neither.
    side="differ": drop columns containing both endpoints.
    """
    i1, i2 = pair
    if i1 == i2:
        raise ValueError("branching pair must be two distinct vertices")
    out = ColumnPool()
    for c in pool:
        a, b = i1 in c.members, i2 in c.members
        if side == "same":
            if a == b:
                out.add(c)
        elif side == "differ":
            if not (a and b):
                out.add(c)
        else:
            raise ValueError(f"unknown branch side {side!r}")
    return out


@dataclass
class MasterSolution:
    """Primal/dual view of one solved master LP."""

    u: np.ndarray
    duals: np.ndarray
    objective: float
    integral: bool
    artificials_active: bool
    artificial_total: float


@dataclass
class MasterLpInfo:
    u_ids: list[int]
    art_ids: dict[int, int] = field(default_factory=dict)


def build_master_lp(
    g: Graph,
    pool: ColumnPool,
    eq: set[int],
    spr_enabled: bool = True,
) -> tuple[LinearProgram, MasterLpInfo]:
    """Assemble the vertex-row LP over the pool.

    With spr_enabled=False every row is an equality (plain set partitioning);
    otherwise only rows in ``eq`` are equalities.  Every equality row gets a
    big-M artificial column.
    """
    lp = LinearProgram()
    info = MasterLpInfo(u_ids=[])
    m_pen = big_m(g)
    for i in range(g.n):
        sense = EQ if (not spr_enabled or i in eq) else LE
        lp.add_row({}, sense, 1.0)
    for c in pool:
        j = lp.add_variable(obj=c.contribution, coeffs={i: 1.0 for i in c.members})
        info.u_ids.append(j)
    for i in range(g.n):
        if lp.senses[i] == EQ:
            info.art_ids[i] = lp.add_variable(obj=-m_pen, coeffs={i: 1.0})
    return lp, info


def _extract(lp: LinearProgram, info: MasterLpInfo, sol: LpSolution) -> MasterSolution:
    u = sol.x[info.u_ids] if info.u_ids else np.empty(0)
    art_total = float(sum(sol.x[j] for j in info.art_ids.values()))
    integral = bool(np.all(np.minimum(np.abs(u), np.abs(1.0 - u)) <= INT_TOL))
    return MasterSolution(
        u=u,
        duals=sol.duals.copy(),
        objective=sol.objective,
        integral=integral,
        artificials_active=art_total > ART_TOL,
        artificial_total=art_total,
    )


def solve_master(
    g: Graph,
    pool: ColumnPool,
    eq: set[int],
    spr_enabled: bool = True,
) -> MasterSolution:
    """Cold build-and-solve of the master LP (the loop uses MasterState)."""
    from .linprog import lp_solve

    lp, info = build_master_lp(g, pool, eq, spr_enabled)
    sol = lp_solve(lp)
    if sol.status != OPTIMAL:
        # rows are <=1/=1 with artificials, so this cannot happen on a
        # well-formed pool; surface it loudly
        raise RuntimeError(f"master LP ended {sol.status}")
    return _extract(lp, info, sol)


class MasterState:
    """Incrementally grown master LP with warm-started re-solves."""

    def __init__(self, g: Graph, pool: ColumnPool, eq: set[int], spr_enabled: bool) -> None:
        self.g = g
        self.pool = pool
        self.eq = set(eq)
        self.spr_enabled = spr_enabled
        self.lp, self.info = build_master_lp(g, pool, eq, spr_enabled)
        self._basis: Optional[Basis] = None
        self._basis_ns = 0

    def add_column(self, c: Community) -> bool:
        if not self.pool.add(c):
            return False
        j = self.lp.add_variable(obj=c.contribution, coeffs={i: 1.0 for i in c.members})
        self.info.u_ids.append(j)
        return True

    def promote(self, vertices: Iterable[int]) -> None:
        """Turn packing rows into partitioning rows (adds their artificials)."""
        m_pen = big_m(self.g)
        for i in vertices:
            if i in self.eq:
                continue
            self.eq.add(i)
            self.lp.senses[i] = EQ
            self.info.art_ids[i] = self.lp.add_variable(obj=-m_pen, coeffs={i: 1.0})
        # sense changes invalidate the warm basis wholesale
        self._basis = None

    def solve(self) -> MasterSolution:
        eng = SimplexEngine(self.lp)
        start = None
        if self._basis is not None:
            start = remap_basis(self._basis, self._basis_ns, self.lp.num_vars, self.lp.num_rows)
        status = eng.solve_primal(start=start)
        if status != OPTIMAL:
            raise RuntimeError(f"master LP ended {status}")
        self._basis = eng.snapshot()
        self._basis_ns = self.lp.num_vars
        x = eng.values()[: self.lp.num_vars]
        obj = float(np.asarray(self.lp.obj) @ x)
        sol = LpSolution(
            status=OPTIMAL,
            objective=obj,
            x=x,
            duals=eng.duals(),
            reduced_costs=None,
            basis=None,
        )
        return _extract(self.lp, self.info, sol)


def uncovered_vertices(
    sol: MasterSolution, pool: ColumnPool, eq: set[int], n: int
) -> set[int]:
    """Vertices outside the equality set whose packing coverage is below one."""
    cov = np.zeros(n)
    for k, c in enumerate(pool):
        uk = sol.u[k]
        if uk > 0.0:
            for i in c.members:
                cov[i] += uk
    return {i for i in range(n) if i not in eq and cov[i] < 1.0 - COVERAGE_TOL}


def solve_restricted_ilp(
    g: Graph,
    pool: ColumnPool,
    deadline: Optional[float] = None,
) -> tuple[Optional[Partition], float]:
    """Exact set-partitioning ILP over the pool columns.

    Returns (partition, value), or (None, -inf) when the pool cannot cover
    every vertex (or the search gave up without an incumbent).
    """
    lp = LinearProgram()
    for i in range(g.n):
        lp.add_row({}, EQ, 1.0)
    ids = []
    for c in pool:
        ids.append(lp.add_variable(obj=c.contribution, ub=1.0, coeffs={i: 1.0 for i in c.members}))
    mip = MixedIntegerProgram(lp, ids)
    sol = milp_solve(mip, ProveOptimal(), deadline=deadline)
    if sol.status == INFEASIBLE_STATUS:
        return None, -np.inf
    if sol.status == TIMED_OUT and sol.x is None:
        return None, -np.inf
    if sol.status == TIMED_OUT:
        log.warning("restricted ILP timed out; using best incumbent")
    chosen = [c for k, c in enumerate(pool) if sol.x[ids[k]] > 0.5]
    part = Partition(communities=tuple(chosen))
    value = modularity_density(g, part)
    return part, value
