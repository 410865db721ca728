"""Optimal per-scenario recovery flows at fixed capacity.

With the capacity vector held fixed, the best recovery flow for one
scenario maximizes the boundary pay-off subject to the edge capacities, the
scenario's usable-edge mask, and boundary domination.  Jordan domination
pins the sign of the flow's boundary (non-positive at sources,
non-negative at targets, zero elsewhere), which turns the problem into a
min-cost flow on a small auxiliary network:

* a super-source arc into each source vertex, capacity = source mass,
  cost = -h(scenario, vertex);
* an arc from each target vertex into a super-sink, capacity = target
  mass, cost = -h(scenario, vertex);
* for each usable edge, zero-cost arcs with capacity theta_e -- both
  directions for the unoriented model, a single direction when the edge
  carries a committed orientation.

Successive shortest paths with node potentials solve it exactly: the
per-unit cost of augmenting paths is non-decreasing, so stopping at the
first non-profitable path (cost >= -1e-12) is globally optimal.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Sequence

from .model import Instance, SNAP_TOL, ValidationError

_MAX_AUGMENTATIONS = 100_000


@dataclass(frozen=True)
class RecoveryResult:
    """Optimal recovery flow for one scenario at fixed capacity.

    ``payoff`` is the raw boundary pay-off of the flow (scenario
    probability not applied)."""

    flow: tuple[float, ...]
    payoff: float
    augmentations: int


class _Network:
    """Residual network with paired arcs; arc k's reverse is k ^ 1."""

    def __init__(self, n_nodes: int) -> None:
        self.n_nodes = n_nodes
        self.to: list[int] = []
        self.cap: list[float] = []
        self.cost: list[float] = []
        self.out: list[list[int]] = [[] for _ in range(n_nodes)]

    def add_arc(self, u: int, v: int, cap: float, cost: float) -> int:
        k = len(self.to)
        self.to.append(v)
        self.cap.append(cap)
        self.cost.append(cost)
        self.out[u].append(k)
        self.to.append(u)
        self.cap.append(0.0)
        self.cost.append(-cost)
        self.out[v].append(k + 1)
        return k

    def tail(self, k: int) -> int:
        return self.to[k ^ 1]


def _initial_potentials(net: _Network, source: int) -> list[float]:
    """Bellman-Ford distances from the super-source over positive-capacity
    arcs.  Arc costs are non-positive but the initial network has no
    negative cycle (every negative arc leaves the source or enters the
    sink), so this converges.  Unreached nodes keep potential 0; no
    residual arc ever connects them to the reached part."""
    inf = math.inf
    dist = [inf] * net.n_nodes
    dist[source] = 0.0
    for _ in range(net.n_nodes):
        changed = False
        for k in range(0, len(net.to), 2):
            if net.cap[k] <= 0.0:
                continue
            u, v = net.tail(k), net.to[k]
            if dist[u] + net.cost[k] < dist[v] - 1e-15:
                dist[v] = dist[u] + net.cost[k]
                changed = True
        if not changed:
            break
    return [d if math.isfinite(d) else 0.0 for d in dist]


def max_payoff_flow(
    inst: Instance,
    scenario_index: int,
    theta: Sequence[float],
    sigma: Sequence[int] | None = None,
) -> RecoveryResult:
    """Best recovery flow for one scenario at fixed capacity.

    ``sigma`` commits each edge to one direction (+1 keeps the reference
    orientation u -> v, -1 the reverse, 0 leaves the single edge
    uncommitted); None leaves every edge unoriented.  Returned flow
    components are signed relative to the reference orientation and snapped
    below 1e-12.
    """
    graph = inst.graph
    if len(theta) != graph.n_edges:
        raise ValidationError(
            f"theta: expected {graph.n_edges} entries, got {len(theta)}"
        )
    if sigma is not None and len(sigma) != graph.n_edges:
        raise ValidationError(
            f"sigma: expected {graph.n_edges} entries, got {len(sigma)}"
        )
    scen = inst.scenarios[scenario_index]
    n = graph.n_vertices
    source, sink = n, n + 1
    net = _Network(n + 2)

    for u, m in sorted(inst.boundary.sources().items()):
        net.add_arc(source, u, m, -inst.payoff.at(scenario_index, u))
    for v, m in sorted(inst.boundary.targets().items()):
        net.add_arc(v, sink, m, -inst.payoff.at(scenario_index, v))

    fwd_arc: list[int | None] = [None] * graph.n_edges
    bwd_arc: list[int | None] = [None] * graph.n_edges
    for e in graph.edges:
        if scen.edge_mask is not None and not scen.edge_mask[e.id]:
            continue
        t = theta[e.id]
        if t <= 0.0:
            continue
        # sigma entry 0 leaves the edge uncommitted: both directions open.
        if sigma is None or sigma[e.id] >= 0:
            fwd_arc[e.id] = net.add_arc(e.u, e.v, t, 0.0)
        if sigma is None or sigma[e.id] <= 0:
            bwd_arc[e.id] = net.add_arc(e.v, e.u, t, 0.0)

    flow = [0.0] * len(net.to)
    pot = _initial_potentials(net, source)
    total_cost = 0.0
    rounds = 0
    inf = math.inf
    while rounds < _MAX_AUGMENTATIONS:
        # Dijkstra on reduced costs; heap keyed (distance, node) so ties
        # break on node id deterministically.
        dist = [inf] * net.n_nodes
        parent = [-1] * net.n_nodes
        dist[source] = 0.0
        heap: list[tuple[float, int]] = [(0.0, source)]
        done = [False] * net.n_nodes
        while heap:
            d, u = heapq.heappop(heap)
            if done[u]:
                continue
            done[u] = True
            for k in net.out[u]:
                if net.cap[k] - flow[k] <= 1e-15:
                    continue
                v = net.to[k]
                if done[v]:
                    continue
                nd = d + net.cost[k] + pot[u] - pot[v]
                if nd < dist[v] - 1e-15:
                    dist[v] = nd
                    parent[v] = k
                    heapq.heappush(heap, (nd, v))
        if not math.isfinite(dist[sink]):
            break
        path_cost = dist[sink] + pot[sink] - pot[source]
        if path_cost >= -1e-12:
            break
        # bottleneck along the parent chain
        bottleneck = inf
        v = sink
        while v != source:
            k = parent[v]
            bottleneck = min(bottleneck, net.cap[k] - flow[k])
            v = net.tail(k)
        v = sink
        while v != source:
            k = parent[v]
            flow[k] += bottleneck
            flow[k ^ 1] -= bottleneck
            v = net.tail(k)
        total_cost += bottleneck * path_cost
        d_sink = dist[sink]
        for v in range(net.n_nodes):
            pot[v] += dist[v] if math.isfinite(dist[v]) else d_sink
        rounds += 1
    else:
        raise AssertionError("recovery flow failed to converge")

    out = []
    for e in range(graph.n_edges):
        f = 0.0
        if fwd_arc[e] is not None:
            f += flow[fwd_arc[e]]
        if bwd_arc[e] is not None:
            f -= flow[bwd_arc[e]]
        out.append(0.0 if abs(f) < SNAP_TOL else f)
    payoff = -total_cost
    return RecoveryResult(
        flow=tuple(out),
        payoff=0.0 if abs(payoff) < SNAP_TOL else payoff,
        augmentations=rounds,
    )


def independent_optimum(inst: Instance, scenario_index: int) -> RecoveryResult:
    """Best recovery flow for one scenario with capacity out of the way
    (every edge opened at the full boundary mass).  Used to seed solver
    restarts and to locate contested edge orientations."""
    wide = (inst.boundary.total_variation,) * inst.graph.n_edges
    return max_payoff_flow(inst, scenario_index, wide)
