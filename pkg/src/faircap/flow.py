"""Minimum-cost flow on small networks.

Successive shortest augmenting paths with node potentials (Dijkstra on
reduced costs). Capacities and supplies are integers, so the optimum flow is
integral; arc costs are nonnegative reals.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolationError, FlowInfeasibleError


@dataclass(frozen=True)
class Arc:
    tail: int
    head: int
    capacity: int
    cost: float


@dataclass(frozen=True)
class FlowNetwork:
    """Directed network with integer capacities/supplies and real arc costs.

    ``supplies[v]`` > 0 means node v must ship that many units, < 0 that it
    must absorb them; supplies sum to zero.
    """

    num_nodes: int
    arcs: tuple[Arc, ...]
    supplies: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "arcs", tuple(self.arcs))
        object.__setattr__(self, "supplies", tuple(int(s) for s in self.supplies))
        if len(self.supplies) != self.num_nodes:
            raise ContractViolationError("one supply value per node is required")
        if sum(self.supplies) != 0:
            raise ContractViolationError(
                f"supplies must sum to zero, got {sum(self.supplies)}"
            )
        for a in self.arcs:
            if not (0 <= a.tail < self.num_nodes and 0 <= a.head < self.num_nodes):
                raise ContractViolationError(f"arc {a} references an unknown node")
            if a.capacity < 0:
                raise ContractViolationError(f"arc {a} has negative capacity")
            if not math.isfinite(a.cost) or a.cost < 0:
                raise ContractViolationError(f"arc {a} must have finite cost >= 0")


def solve_min_cost_flow(net: FlowNetwork) -> np.ndarray:
    """Return an integral minimum-cost flow, one value per arc of ``net``.

    Raises :class:`FlowInfeasibleError` when the supplies cannot be routed
    within the capacities.
    """
    n = net.num_nodes + 2
    source, sink = net.num_nodes, net.num_nodes + 1

    # Residual arrays; each original arc i occupies slots 2i (forward) and
    # 2i+1 (reverse). Super source/sink arcs follow.
    heads: list[int] = []
    caps: list[int] = []
    costs: list[float] = []
    adj: list[list[int]] = [[] for _ in range(n)]

    def add_arc(u: int, v: int, cap: int, cost: float) -> None:
        adj[u].append(len(heads))
        heads.append(v)
        caps.append(cap)
        costs.append(cost)
        adj[v].append(len(heads))
        heads.append(u)
        caps.append(0)
        costs.append(-cost)

    for a in net.arcs:
        add_arc(a.tail, a.head, a.capacity, a.cost)
    total_supply = 0
    for v, s in enumerate(net.supplies):
        if s > 0:
            add_arc(source, v, s, 0.0)
            total_supply += s
        elif s < 0:
            add_arc(v, sink, -s, 0.0)

    potential = [0.0] * n
    dist = [math.inf] * n
    parent_arc = [-1] * n
    routed = 0
    while routed < total_supply:
        for v in range(n):
            dist[v] = math.inf
            parent_arc[v] = -1
        dist[source] = 0.0
        heap: list[tuple[float, int]] = [(0.0, source)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist[u]:
                continue
            for idx in adj[u]:
                if caps[idx] <= 0:
                    continue
                v = heads[idx]
                # Potentials keep reduced costs nonnegative up to float noise.
                reduced = max(0.0, costs[idx] + potential[u] - potential[v])
                nd = d + reduced
                if nd < dist[v]:
                    dist[v] = nd
                    parent_arc[v] = idx
                    heapq.heappush(heap, (nd, v))
        if not math.isfinite(dist[sink]):
            raise FlowInfeasibleError(
                f"network routes only {routed} of {total_supply} supply units"
            )
        for v in range(n):
            potential[v] += dist[v] if math.isfinite(dist[v]) else dist[sink]

        bottleneck = total_supply - routed
        v = sink
        while v != source:
            idx = parent_arc[v]
            bottleneck = min(bottleneck, caps[idx])
            v = heads[idx ^ 1]
        v = sink
        while v != source:
            idx = parent_arc[v]
            caps[idx] -= bottleneck
            caps[idx ^ 1] += bottleneck
            v = heads[idx ^ 1]
        routed += bottleneck

    flows = np.empty(len(net.arcs), dtype=np.int64)
    for i, a in enumerate(net.arcs):
        flows[i] = a.capacity - caps[2 * i]
    return flows


def flow_cost(net: FlowNetwork, flows: np.ndarray) -> float:
    """Total cost of a flow vector over the arcs of ``net``."""
    return float(sum(f * a.cost for f, a in zip(flows, net.arcs)))
