import time
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
save = {}
for ell in range(1, 29):
    sol = ms.solve()
    save[ell] = sol.duals.copy()
    if ell == 28:
        np.savez("/tmp/hard_duals.npz", **{str(k2): v for k2, v in save.items()})
        print("saved up to ell=28", flush=True)
        break
    res = session.price(sol.duals, mcp_enabled=True)
    new = [c for c in res.columns if c.members not in pool]
    assert new, f"ell={ell}"
    for c in new: ms.add_column(c)
