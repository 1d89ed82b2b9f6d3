"""Seeded random snapshot corpus for planner tests.

Snapshots are built directly (not through SituationalGraph) so they can
contain parallel directed edges between the same pair of nodes. Costs
are dyadic rationals (multiples of 1/8) so float path sums are exact and
cost ties are genuinely exact, making tie-break comparisons meaningful.
"""

import random

from sgraph.geometry import Pose2
from sgraph.graph import BehaviorKind, Edge, GraphSnapshot, Node, NodeKind, Situation


def random_snapshot(rng: random.Random, max_nodes: int = 10, max_parallel: int = 3,
                    frontier_fraction: float = 0.0) -> GraphSnapshot:
    n = rng.randint(2, max_nodes)
    specs: list[tuple[int, int, float]] = []
    for s in range(1, n + 1):
        for t in range(1, n + 1):
            if s == t:
                continue
            if rng.random() < 0.3:
                for _ in range(rng.randint(1, max_parallel)):
                    specs.append((s, t, rng.randint(2, 80) / 8.0))
    rng.shuffle(specs)
    edges = {
        eid: Edge(eid, s, t, BehaviorKind.GOTO, frozenset(), cost)
        for eid, (s, t, cost) in enumerate(specs, start=1)
    }
    frontier_count = round(n * frontier_fraction)
    frontiers = set(rng.sample(range(1, n + 1), k=frontier_count))
    nodes = {
        i: Node(i, Pose2(float(i), 0.0), Situation.empty(),
                NodeKind.FRONTIER if i in frontiers else NodeKind.WAYPOINT)
        for i in range(1, n + 1)
    }
    return GraphSnapshot(nodes=nodes, edges=edges, revision=0)


def edges_for_oracle(snapshot: GraphSnapshot) -> dict:
    return {eid: (e.source, e.target, e.cost) for eid, e in snapshot.edges.items()}
