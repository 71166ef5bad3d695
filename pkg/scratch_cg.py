"""Dev experiment: root-node column generation on Karate."""
import sys, time
import numpy as np
import networkx as nx
from moddens.graphs import graph_from_edges, modularity_density
from moddens.master import MasterState, initial_pool, uncovered_vertices, solve_restricted_ilp
from moddens.pricing import BranchSet, multiple_cutting_planes, PricingTimeout

spr = "--no-spr" not in sys.argv
mcp = "--no-mcp" not in sys.argv

k = nx.karate_club_graph()
g = graph_from_edges(34, list(k.edges()))
print("karate n m:", g.n, g.m)

t0 = time.time()
pool = initial_pool(g)
eq = set() if spr else set(range(g.n))
ms = MasterState(g, pool, eq, spr_enabled=spr)
bs = BranchSet()
ell = 0
t_master = t_pricing = 0.0
while True:
    ell += 1
    ta = time.time()
    sol = ms.solve()
    t_master += time.time() - ta
    ta = time.time()
    res = multiple_cutting_planes(g, sol.duals, bs, mcp_enabled=mcp)
    t_pricing += time.time() - ta
    new = [c for c in res.columns if c.members not in pool]
    if len(new) != len(res.columns):
        print("  dup columns dropped:", len(res.columns) - len(new))
    if new:
        for c in new:
            ms.add_column(c)
        continue
    if spr:
        vhat = uncovered_vertices(sol, pool, eq, g.n)
        if vhat:
            print(f"  ell={ell}: promoting {len(vhat)} vertices to equality")
            ms.promote(vhat)
            eq = ms.eq
            continue
    break

ub = sol.objective
print(f"converged: ell={ell} pool={len(pool)} UB={ub:.6f} |V=|={len(eq) if spr else 34}")
print(f"integral={sol.integral}")
if sol.integral:
    lb = ub
else:
    part, lb = solve_restricted_ilp(g, pool)
    print("ILP lb:", lb)
print(f"time total={time.time()-t0:.1f}s master={t_master:.1f}s pricing={t_pricing:.1f}s")
if sol.integral:
    chosen = [c for k2, c in enumerate(pool) if sol.u[k2] > 0.5]
    from moddens.graphs import Partition
    p = Partition(tuple(chosen))
    print("D =", modularity_density(g, p), "k =", len(chosen))
