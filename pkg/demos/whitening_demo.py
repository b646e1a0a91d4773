"""How much of a proper coloring is actually pinned down.

Colors a sparse random graph, then relaxes warnings starting from that
coloring. On loose graphs everything bleaches to WHITE in a few sweeps:
no single node is forced, the solution is one of exponentially many. A
frustrated core (an odd cycle at q=2) stays rigid by contrast.
"""
import numpy as np

from cavitykit import coloring, graphs, surveys


def bleach_profile(g, cols, q):
    warnings, run = coloring.whitening_from_coloring(g, cols, q,
                                                     track_history=True)
    for k, snap in enumerate(run.history):
        frac = float((snap == coloring.WHITE).mean())
        print(f"  sweep {k + 1}: {frac:.1%} of messages white")
    rigid = int((warnings != coloring.WHITE).sum())
    print(f"  rigid nodes at the fixed point: {rigid}/{g.n_nodes}")


def main():
    g = graphs.generate(graphs.GNP(z=3.0), 2_000, seed=5)
    res = surveys.decimate_solve(g, 3, seed=6)
    assert res.success
    print(f"random graph, {g.n_nodes} nodes, mean degree 3, colored with q=3")
    bleach_profile(g, res.coloring, 3)

    # a cycle with q=3 has slack everywhere, so it bleaches completely;
    # the same cycle with q=2 (even length) leaves no node any freedom
    ring = graphs.Graph(8, [(i, (i + 1) % 8) for i in range(8)])
    cols = [1, 2, 1, 2, 1, 2, 1, 2]
    print("\n8-cycle with q=3:")
    bleach_profile(ring, cols, 3)
    print("\n8-cycle with q=2:")
    bleach_profile(ring, cols, 2)


if __name__ == "__main__":
    main()
