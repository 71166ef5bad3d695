import sys, time
import networkx as nx
from moddens.graphs import graph_from_edges
from moddens.branchprice import solve, SolverConfig

mode = sys.argv[1] if len(sys.argv) > 1 else "first_incumbent"
spr = sys.argv[2] != "nospr" if len(sys.argv) > 2 else True
mcp = sys.argv[3] != "nomcp" if len(sys.argv) > 3 else True
k = nx.karate_club_graph()
g = graph_from_edges(34, list(k.edges()))
t0 = time.time()
rep = solve(g, SolverConfig(spr_enabled=spr, mcp_enabled=mcp, time_limit=900, pricing_mode=mode))
print(f"mode={mode} spr={spr} mcp={mcp}: status={rep.status} D={rep.objective:.5f} "
      f"k={len(rep.partition)} nodes={rep.nodes_processed} ell={rep.cg_iterations} "
      f"cols={rep.columns_total} veq={rep.equality_set_size} wall={rep.wall_time:.1f}s")
