"""Column-generation pricing: a MILP search for positive reduced-cost columns.

For dual prices lam the target quantity is

    (4*internal(C) - sum_{i in C} d_i) / |C|  -  sum_{i in C} lam_i

The fractional part is linearized with per-vertex weights y_i that are forced
to equal s*x_i (s the common reciprocal of the community size) and per-edge
variables w_ij capped by min(y_i, y_j).  Any integral x with positive
objective therefore identifies a column whose true reduced cost is positive.

The multiple-cutting-planes loop keeps re-pricing on the residual vertex set
so one master solve can harvest several pairwise-disjoint columns.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .graphs import Community, Graph
from .linprog import EQ, GE, LE, LinearProgram, SimplexEngine
from .milp import (
    FirstIncumbentAbove,
    INCUMBENT_FOUND,
    MixedIntegerProgram,
    NO_SOLUTION_ABOVE,
    OPTIMAL_STATUS,
    ProveOptimal,
    TIMED_OUT,
    milp_solve,
)

POSITIVE_EPS = 1e-6

FIRST_INCUMBENT = "first_incumbent"
PROVE_OPTIMAL = "prove_optimal"


class AllVerticesExcluded(ValueError):
    pass


class PricingTimeout(Exception):
    """The pricing MILP hit the caller's deadline."""


def _norm_pair(pair: Iterable[int]) -> tuple[int, int]:
    a, b = pair
    if a == b:
        raise ValueError(f"pair ({a},{b}) must have distinct vertices")
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class BranchSet:
    """Same-community and different-community vertex pair constraints."""

    same_pairs: frozenset[tuple[int, int]] = frozenset()
    differ_pairs: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self) -> None:
        same = frozenset(_norm_pair(p) for p in self.same_pairs)
        differ = frozenset(_norm_pair(p) for p in self.differ_pairs)
        if same & differ:
            raise ValueError("a pair cannot be both same-community and different-community")
        object.__setattr__(self, "same_pairs", same)
        object.__setattr__(self, "differ_pairs", differ)

    def with_same(self, pair: tuple[int, int]) -> "BranchSet":
        return BranchSet(self.same_pairs | {_norm_pair(pair)}, self.differ_pairs)

    def with_differ(self, pair: tuple[int, int]) -> "BranchSet":
        return BranchSet(self.same_pairs, self.differ_pairs | {_norm_pair(pair)})

    def allows(self, members: frozenset[int]) -> bool:
        for a, b in self.same_pairs:
            if (a in members) != (b in members):
                return False
        for a, b in self.differ_pairs:
            if a in members and b in members:
                return False
        return True


@dataclass
class PricingResult:
    columns: list[Community]
    exhausted: bool


@dataclass
class PricingModel:
    mip: MixedIntegerProgram
    x_ids: list[int]
    y_ids: list[int]
    w_ids: list[int]
    s_id: int


def build_pricing_milp(
    g: Graph,
    duals: np.ndarray,
    branch: BranchSet,
    excluded: set[int],
) -> PricingModel:
    """Assemble the pricing MILP for the residual vertex set V minus excluded.

    Excluded vertices keep their x variable, fixed to 0 by bounds, so ids are
    stable across the cutting-plane iterations.
    """
    duals = np.asarray(duals, dtype=float)
    if duals.shape != (g.n,) or not np.all(np.isfinite(duals)):
        raise ValueError("dual prices must be one finite value per vertex")
    if len(excluded) >= g.n:
        raise AllVerticesExcluded("no vertices left to price on")
    lp = LinearProgram()
    x_ids = [
        lp.add_variable(obj=-duals[i], lb=0.0, ub=0.0 if i in excluded else 1.0, name=f"x{i}")
        for i in range(g.n)
    ]
    y_ids = [lp.add_variable(obj=-float(g.degree[i]), name=f"y{i}") for i in range(g.n)]
    w_ids = [lp.add_variable(obj=4.0, name=f"w{k}") for k in range(g.m)]
    s_id = lp.add_variable(obj=0.0, name="s")

    lp.add_row({y_ids[i]: 1.0 for i in range(g.n)}, EQ, 1.0)
    for i in range(g.n):
        lp.add_row({s_id: 1.0, y_ids[i]: -1.0}, GE, 0.0)
        lp.add_row({s_id: 1.0, y_ids[i]: -1.0, x_ids[i]: 1.0}, LE, 1.0)
        lp.add_row({y_ids[i]: 1.0, x_ids[i]: -1.0}, LE, 0.0)
    for k, (i, j) in enumerate(g.edges):
        lp.add_row({w_ids[k]: 1.0, y_ids[i]: -1.0}, LE, 0.0)
        lp.add_row({w_ids[k]: 1.0, y_ids[j]: -1.0}, LE, 0.0)
    for a, b in sorted(branch.same_pairs):
        lp.add_row({x_ids[a]: 1.0, x_ids[b]: -1.0}, EQ, 0.0)
    for a, b in sorted(branch.differ_pairs):
        lp.add_row({x_ids[a]: 1.0, x_ids[b]: 1.0}, LE, 1.0)

    mip = MixedIntegerProgram(lp, x_ids)
    return PricingModel(mip=mip, x_ids=x_ids, y_ids=y_ids, w_ids=w_ids, s_id=s_id)


def _solve_model(
    model: PricingModel,
    g: Graph,
    duals: np.ndarray,
    branch: BranchSet,
    mode: str,
    deadline: Optional[float],
) -> Optional[Community]:
    if mode == PROVE_OPTIMAL:
        sol = milp_solve(model.mip, ProveOptimal(), deadline=deadline)
        found = sol.status == OPTIMAL_STATUS and sol.objective > POSITIVE_EPS
    else:
        sol = milp_solve(model.mip, FirstIncumbentAbove(POSITIVE_EPS), deadline=deadline)
        found = sol.status == INCUMBENT_FOUND
    if sol.status == TIMED_OUT:
        raise PricingTimeout
    if not found:
        return None
    members = frozenset(i for i in range(g.n) if sol.x[model.x_ids[i]] > 0.5)
    if not members:
        raise RuntimeError("pricing returned an empty column")
    if not branch.allows(members):
        raise RuntimeError("pricing returned a branch-infeasible column")
    return Community.from_members(g, members)


def find_column(
    g: Graph,
    duals: np.ndarray,
    branch: BranchSet,
    excluded: set[int],
    mode: str = FIRST_INCUMBENT,
    deadline: Optional[float] = None,
) -> Optional[Community]:
    """One pricing solve; None means no column prices out above the threshold."""
    model = build_pricing_milp(g, duals, branch, excluded)
    return _solve_model(model, g, duals, branch, mode, deadline)


def multiple_cutting_planes(
    g: Graph,
    duals: np.ndarray,
    branch: BranchSet,
    mcp_enabled: bool = True,
    mode: str = FIRST_INCUMBENT,
    deadline: Optional[float] = None,
) -> PricingResult:
    """Harvest disjoint positive columns by re-pricing on the residual graph.

    exhausted=True iff the last solve proved that nothing prices out on the
    remaining vertices (always the case when no column is returned at all).
    """
    return PricingSession(g, branch).price(
        duals, mcp_enabled=mcp_enabled, mode=mode, deadline=deadline
    )


class PricingSession:
    """Reusable pricing state for one branch-and-bound tree node.

    The constraint matrix is fixed by (graph, branch set), so one simplex
    engine serves every pricing solve at the node: new dual prices only
    change the objective (warm primal restart) and cutting-plane exclusions
    only change bounds (warm dual restart).
    """

    def __init__(self, g: Graph, branch: BranchSet) -> None:
        self.g = g
        self.branch = branch
        self.model = build_pricing_milp(g, np.zeros(g.n), branch, set())
        self.engine = SimplexEngine(self.model.mip.lp)
        self._root_basis = None

    def price(
        self,
        duals: np.ndarray,
        mcp_enabled: bool = True,
        mode: str = FIRST_INCUMBENT,
        deadline: Optional[float] = None,
    ) -> PricingResult:
        duals = np.asarray(duals, dtype=float)
        if duals.shape != (self.g.n,) or not np.all(np.isfinite(duals)):
            raise ValueError("dual prices must be one finite value per vertex")
        model = self.model
        lp = model.mip.lp
        for i in range(self.g.n):
            lp.obj[model.x_ids[i]] = -float(duals[i])
            lp.set_bounds(model.x_ids[i], 0.0, 1.0)
        excluded: set[int] = set()
        columns: list[Community] = []
        warm = self._root_basis
        while True:
            c, warm = self._solve_once(duals, mode, deadline, warm)
            if warm is not None and not columns:
                self._root_basis = warm
            if c is None:
                return PricingResult(columns=columns, exhausted=True)
            columns.append(c)
            if not mcp_enabled:
                return PricingResult(columns=columns, exhausted=False)
            excluded |= c.members
            if len(excluded) >= self.g.n:
                return PricingResult(columns=columns, exhausted=False)
            for i in c.members:
                lp.set_bounds(model.x_ids[i], 0.0, 0.0)

    def _solve_once(self, duals, mode, deadline, warm):
        model = self.model
        if mode == PROVE_OPTIMAL:
            sol = milp_solve(
                model.mip, ProveOptimal(), deadline=deadline,
                engine=self.engine, warm_root=warm,
            )
            found = sol.status == OPTIMAL_STATUS and sol.objective > POSITIVE_EPS
        else:
            sol = milp_solve(
                model.mip, FirstIncumbentAbove(POSITIVE_EPS), deadline=deadline,
                engine=self.engine, warm_root=warm,
            )
            found = sol.status == INCUMBENT_FOUND
        if sol.status == TIMED_OUT:
            raise PricingTimeout
        if not found:
            return None, sol.root_basis
        members = frozenset(i for i in range(self.g.n) if sol.x[model.x_ids[i]] > 0.5)
        if not members:
            raise RuntimeError("pricing returned an empty column")
        if not self.branch.allows(members):
            raise RuntimeError("pricing returned a branch-infeasible column")
        return Community.from_members(self.g, members), sol.root_basis
