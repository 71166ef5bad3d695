"""Branch-and-price driver: tree management, bounding, branching, timeouts.

The tree is processed depth-first, left (same-community) child first.  Each
node runs the packing-relaxed column-generation loop to convergence, which
yields the node's LP bound and a restricted-ILP lower bound.  Branching
follows the identical-restrictions-on-subsets rule on a vertex pair chosen
by a deterministic scan of the fractional master columns.

On hitting the time limit, every column generated anywhere in the tree is
pooled and one final set-partitioning ILP over that pool produces a feasible
partition, reported as a lower bound.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .graphs import Community, Graph, Partition, modularity_density
from .master import (
    ColumnPool,
    MasterSolution,
    MasterState,
    filter_pool_for_branch,
    initial_pool,
    solve_restricted_ilp,
    uncovered_vertices,
)
from .pricing import (
    FIRST_INCUMBENT,
    PROVE_OPTIMAL,
    BranchSet,
    PricingSession,
    PricingTimeout,
)

log = logging.getLogger(__name__)

BOUND_TOL = 1e-6

STATUS_OPTIMAL = "optimal"
STATUS_TIMEOUT = "timed_out_with_lower_bound"


class NoFractionalPair(RuntimeError):
    """No branching pair exists; signals an internal inconsistency."""


@dataclass
class SolverConfig:
    spr_enabled: bool = True
    mcp_enabled: bool = True
    time_limit: float = 3600.0
    pricing_mode: str = FIRST_INCUMBENT
    integrality_tol: float = 1e-6
    bound_tol: float = BOUND_TOL

    def __post_init__(self) -> None:
        if self.time_limit <= 0:
            raise ValueError("time_limit must be positive")
        if self.pricing_mode not in (FIRST_INCUMBENT, PROVE_OPTIMAL):
            raise ValueError(f"unknown pricing mode {self.pricing_mode!r}")


@dataclass(frozen=True)
class TreeNode:
    node_id: int
    branch_set: BranchSet
    pool: ColumnPool


@dataclass
class IterationEvent:
    node: int
    ell: int
    master_objective: float
    columns_added: int
    pricing_rounds: int
    promoted: int
    equality_size: int


@dataclass
class NodeRecord:
    node_id: int
    ub: float
    lb: float
    iterations: int
    pool_size: int
    pruned: bool = False
    branch_pair: Optional[tuple[int, int]] = None


@dataclass
class SolveReport:
    status: str
    partition: Optional[Partition]
    objective: float
    nodes_processed: int
    cg_iterations: int
    columns_total: int
    equality_set_size: int
    node_log: list[NodeRecord] = field(default_factory=list)
    events: list[IterationEvent] = field(default_factory=list)
    wall_time: float = 0.0


@dataclass
class CgResult:
    pool: ColumnPool
    upper_solution: MasterSolution
    ub: float
    lower_partition: Optional[Partition]
    lb: float
    equality_set: set[int]
    iterations: int


class _TimeLimit(Exception):
    pass


def column_generation_loop(
    g: Graph,
    node: TreeNode,
    eq: set[int],
    cfg: SolverConfig,
    archive: ColumnPool,
    events: list[IterationEvent],
    deadline: float,
) -> CgResult:
    """Column generation with set-packing relaxation at one tree node.

    Alternates pricing rounds with equality promotions until neither adds
    anything, then extracts the node bounds.  ``eq`` is the global equality
    set; it only grows.
    """
    if len(node.pool) == 0:
        raise ValueError("node pool must be non-empty")
    state = MasterState(g, node.pool, eq, cfg.spr_enabled)
    session = PricingSession(g, node.branch_set)
    ell = 0
    while True:
        ell += 1
        if time.monotonic() > deadline:
            raise _TimeLimit
        sol = state.solve()
        try:
            res = session.price(
                sol.duals,
                mcp_enabled=cfg.mcp_enabled,
                mode=cfg.pricing_mode,
                deadline=deadline,
            )
        except PricingTimeout:
            events.append(
                IterationEvent(node.node_id, ell, sol.objective, 0, 0, 0, len(state.eq))
            )
            raise _TimeLimit
        added = 0
        for c in res.columns:
            if state.add_column(c):
                archive.add(c)
                added += 1
        if res.columns and added == 0:
            log.warning(
                "node %d iteration %d: pricing returned only duplicate columns",
                node.node_id,
                ell,
            )
        events.append(
            IterationEvent(
                node.node_id,
                ell,
                sol.objective,
                added,
                len(res.columns) + (1 if res.exhausted else 0),
                0,
                len(state.eq),
            )
        )
        if added:
            continue
        if cfg.spr_enabled:
            vhat = uncovered_vertices(sol, state.pool, state.eq, g.n)
            if vhat:
                state.promote(vhat)
                events[-1].promoted = len(vhat)
                events[-1].equality_size = len(state.eq)
                continue
        break

    if sol.artificials_active:
        # equality rows held up only by artificials: the node is infeasible
        return CgResult(state.pool, sol, -np.inf, None, -np.inf, state.eq, ell)
    ub = sol.objective
    if sol.integral:
        chosen = [c for k, c in enumerate(state.pool) if sol.u[k] > 0.5]
        part = Partition(communities=tuple(chosen))
        lb = modularity_density(g, part)
        return CgResult(state.pool, sol, ub, part, lb, state.eq, ell)
    part, lb = solve_restricted_ilp(g, state.pool, deadline=deadline)
    return CgResult(state.pool, sol, ub, part, lb, state.eq, ell)


def select_branch_pair(sol: MasterSolution, pool: ColumnPool) -> tuple[int, int]:
    """First vertex pair split by two fractional columns, in scan order.

    Walks fractional columns in insertion order; for each ordered column
    pair, the shared vertex and the vertex owned only by the second column
    are taken in ascending id order.
    """
    tol = 1e-6
    fracs = [
        c.members for k, c in enumerate(pool) if tol < sol.u[k] < 1.0 - tol
    ]
    for ca in fracs:
        for cb in fracs:
            if ca is cb:
                continue
            both = ca & cb
            if not both:
                continue
            only_b = cb - ca
            if not only_b:
                continue
            return (min(both), min(only_b))
    raise NoFractionalPair("fractional master solution without a splittable pair")


def solve(g: Graph, cfg: Optional[SolverConfig] = None) -> SolveReport:
    """Exact maximization of the density score over all partitions of g."""
    if cfg is None:
        cfg = SolverConfig()
    t0 = time.monotonic()
    deadline = t0 + cfg.time_limit

    eq: set[int] = set() if cfg.spr_enabled else set(range(g.n))
    incumbent: Optional[Partition] = None
    lb_global = -np.inf
    events: list[IterationEvent] = []
    node_log: list[NodeRecord] = []
    archive = ColumnPool()
    root_pool = initial_pool(g)
    for c in root_pool:
        archive.add(c)

    stack: list[TreeNode] = [TreeNode(0, BranchSet(), root_pool)]
    nodes_processed = 0
    total_iterations = 0
    timed_out = False

    while stack:
        if time.monotonic() > deadline:
            timed_out = True
            break
        node = stack.pop()
        nodes_processed += 1
        try:
            res = column_generation_loop(g, node, eq, cfg, archive, events, deadline)
        except _TimeLimit:
            nodes_processed -= 1
            timed_out = True
            break
        eq = res.equality_set
        total_iterations += res.iterations
        rec = NodeRecord(
            node_id=node.node_id,
            ub=res.ub,
            lb=res.lb,
            iterations=res.iterations,
            pool_size=len(res.pool),
        )
        node_log.append(rec)
        if res.ub < lb_global - cfg.bound_tol:
            rec.pruned = True
            continue
        if res.lb > lb_global:
            lb_global = res.lb
            incumbent = res.lower_partition
        if res.ub > res.lb + cfg.bound_tol:
            pair = select_branch_pair(res.upper_solution, res.pool)
            rec.branch_pair = pair
            left = TreeNode(
                2 * node.node_id + 1,
                node.branch_set.with_same(pair),
                filter_pool_for_branch(res.pool, pair, "same"),
            )
            right = TreeNode(
                2 * node.node_id + 2,
                node.branch_set.with_differ(pair),
                filter_pool_for_branch(res.pool, pair, "differ"),
            )
            stack.append(right)
            stack.append(left)

    if timed_out:
        part, lb = solve_restricted_ilp(g, archive, deadline=time.monotonic() + 120.0)
        if part is None:
            # singleton columns are always in the archive, so this cannot
            # happen; guard for robustness
            blocks = [[i] for i in range(g.n)]
            part = Partition.from_blocks(g, blocks)
            lb = modularity_density(g, part)
        return SolveReport(
            status=STATUS_TIMEOUT,
            partition=part,
            objective=lb,
            nodes_processed=nodes_processed,
            cg_iterations=len(events),
            columns_total=len(archive),
            equality_set_size=len(eq) if cfg.spr_enabled else g.n,
            node_log=node_log,
            events=events,
            wall_time=time.monotonic() - t0,
        )

    assert incumbent is not None, "tree exhausted without an incumbent"
    return SolveReport(
        status=STATUS_OPTIMAL,
        partition=incumbent,
        objective=lb_global,
        nodes_processed=nodes_processed,
        cg_iterations=len(events),
        columns_total=len(archive),
        equality_set_size=len(eq) if cfg.spr_enabled else g.n,
        node_log=node_log,
        events=events,
        wall_time=time.monotonic() - t0,
    )
