#!/usr/bin/env python3
"""Random linear networks: sampled pipeline against the exact Schur path.

Draws random connected graphs with random positive linear conductances and
random boundary sets, reduces each both ways, and prints the worst support
and weight disagreements.
"""

import time

import numpy as np

import kronred as kr
from kronred.reduction import SamplingPlan


def random_linear_network(rng):
    n = int(rng.integers(3, 13))
    names = tuple(str(i) for i in range(n))
    edges = []
    for i in range(1, n):
        edges.append((names[int(rng.integers(0, i))], names[i]))
    for _ in range(int(rng.integers(0, 7))):
        i, k = rng.choice(n, size=2, replace=False)
        pair = (names[int(i)], names[int(k)])
        if pair in edges or (pair[1], pair[0]) in edges:
            continue
        edges.append(pair)
    graph = kr.DirectedGraph(names, tuple(edges))
    laws = [kr.edge_law(f"{rng.uniform(0.2, 3.0):.6f}*y") for _ in edges]
    n_b = int(rng.integers(2, n))
    boundary = [names[i] for i in sorted(rng.choice(n, size=n_b, replace=False))]
    return kr.build_network(graph, laws, boundary)


def main():
    rng = np.random.default_rng(2024)
    worst_weight = 0.0
    mismatches = 0
    start = time.perf_counter()
    trials = 50
    for trial in range(trials):
        net = random_linear_network(rng)
        exact = kr.reduce_linear(net)
        sampled_graph, cert = kr.infer_reduced_graph(net, SamplingPlan(count=4, seed=trial))
        if set(sampled_graph.edges) != set(exact.graph.edges):
            mismatches += 1
            continue
        exact_w = {tuple(sorted(e)): t.current[-1] / t.y[-1]
                   for e, t in zip(exact.graph.edges, exact.edge_tables)}
        h = kr.reduced_hessian(net, SamplingPlan(count=1, seed=trial).boundary_samples(
            len(sampled_graph.node_ids))[0])
        for (i, k) in cert.supports[0]:
            a, b = sampled_graph.node_ids[i], sampled_graph.node_ids[k]
            worst_weight = max(worst_weight, abs(-h[i, k] - exact_w[tuple(sorted((a, b)))]))
    elapsed = time.perf_counter() - start
    print(f"{trials} random linear networks in {elapsed:.1f}s")
    print(f"support mismatches: {mismatches}")
    print(f"worst |sampled weight - exact weight|: {worst_weight:.3e}")


if __name__ == "__main__":
    main()
