import sys, time
import numpy as np
import networkx as nx
from moddens.graphs import graph_from_edges
from moddens.master import MasterState, initial_pool, uncovered_vertices
from moddens.pricing import BranchSet, PricingSession

k = nx.karate_club_graph()
g = graph_from_edges(34, list(k.edges()))
pool = initial_pool(g)
eq = set()
ms = MasterState(g, pool, eq, spr_enabled=True)
session = PricingSession(g, BranchSet())
t_start = time.time()
for ell in range(1, 1000):
    t0 = time.time()
    sol = ms.solve()
    t1 = time.time()
    res = session.price(sol.duals, mcp_enabled=True)
    t2 = time.time()
    new = [c for c in res.columns if c.members not in pool]
    print(f"ell={ell} obj={sol.objective:.5f} master={t1-t0:.2f}s pricing={t2-t1:.2f}s new={len(new)} pool={len(pool)} elapsed={time.time()-t_start:.0f}s", flush=True)
    if not new:
        vhat = uncovered_vertices(sol, pool, eq, g.n)
        print("  vhat:", len(vhat), flush=True)
        if not vhat:
            print(f"CONVERGED ell={ell} UB={sol.objective:.5f} integral={sol.integral}", flush=True)
            break
        ms.promote(vhat); eq = ms.eq
        continue
    for c in new: ms.add_column(c)
