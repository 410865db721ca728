"""Cycle removal and path decomposition of signed edge flows.

A signed flow on a geometric graph induces an oriented support: edge e with
flow f > 0 is an arc u -> v, with f < 0 an arc v -> u.  ``remove_cycles``
cancels directed cycles in that support without changing the flow's
boundary; ``good_decomposition`` peels a cycle-free flow into weighted
oriented simple paths whose superposition reproduces the flow edgewise and
whose endpoints split the flow's boundary.

Peeling starts only at vertices with no incoming support arc, which is what
makes the decomposition "good": every path starts where the boundary is
purely negative (net outflow) and ends where it is purely positive, so path
weights are bounded by the boundary masses they consume.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .model import GeometricGraph, Path, SNAP_TOL, ValidationError
from .energy import boundary_of_flow


def _snap(x: float) -> float:
    return 0.0 if abs(x) < SNAP_TOL else x


def _support_arcs(
    graph: GeometricGraph, flow: Sequence[float]
) -> dict[int, list[tuple[int, int]]]:
    """Outgoing arcs of the sign-oriented support: vertex -> list of
    (edge id, head vertex), in edge-id order."""
    out: dict[int, list[tuple[int, int]]] = {v.id: [] for v in graph.vertices}
    for e, f in zip(graph.edges, flow):
        if f > 0.0:
            out[e.u].append((e.id, e.v))
        elif f < 0.0:
            out[e.v].append((e.id, e.u))
    return out


def _find_cycle(
    graph: GeometricGraph, flow: Sequence[float]
) -> list[int] | None:
    """A directed cycle in the support, as a list of edge ids, or None.

    Iterative DFS over support arcs.  Two opposed parallel edges form a
    2-cycle and are found like any other."""
    arcs = _support_arcs(graph, flow)
    color = {v.id: 0 for v in graph.vertices}  # 0 new, 1 on stack, 2 done
    for root in sorted(arcs):
        if color[root] != 0 or not arcs[root]:
            continue
        # stack holds (vertex, iterator index into arcs[vertex], entering edge)
        stack: list[list[int]] = [[root, 0, -1]]
        color[root] = 1
        on_stack = {root: 0}  # vertex -> position in stack
        while stack:
            frame = stack[-1]
            v, idx = frame[0], frame[1]
            if idx < len(arcs[v]):
                frame[1] += 1
                e_id, head = arcs[v][idx]
                if color[head] == 1:
                    # cycle: edges from head's frame down to here, plus e_id
                    pos = on_stack[head]
                    cycle = [stack[k][2] for k in range(pos + 1, len(stack))]
                    cycle.append(e_id)
                    return cycle
                if color[head] == 0:
                    color[head] = 1
                    on_stack[head] = len(stack)
                    stack.append([head, 0, e_id])
            else:
                color[v] = 2
                del on_stack[v]
                stack.pop()
    return None


def remove_cycles(
    graph: GeometricGraph, flow: Sequence[float]
) -> tuple[float, ...]:
    """Cancel directed cycles in the flow's support.

    Each found cycle is reduced by its bottleneck |flow|; since the
    bottleneck is subtracted from itself exactly, at least one edge leaves
    the support per round, so at most n_edges rounds run.  The boundary is
    unchanged and no |flow| value grows."""
    work = [0.0 if abs(f) < SNAP_TOL else f for f in flow]
    for _ in range(graph.n_edges + 1):
        cycle = _find_cycle(graph, work)
        if cycle is None:
            return tuple(work)
        bottleneck = min(abs(work[e]) for e in cycle)
        for e in cycle:
            if work[e] > 0.0:
                work[e] = _snap(work[e] - bottleneck)
            else:
                work[e] = _snap(work[e] + bottleneck)
    raise AssertionError("cycle cancellation failed to terminate")


@dataclass(frozen=True)
class Decomposition:
    """Weighted oriented simple paths equivalent to a cycle-free flow."""

    items: tuple[tuple[Path, float], ...]

    def superposition(self, graph: GeometricGraph) -> tuple[float, ...]:
        """Signed edge flow obtained by adding the paths back up."""
        out = [0.0] * graph.n_edges
        for path, w in self.items:
            for a, b, e_id in zip(path.vertices, path.vertices[1:], path.edges):
                edge = graph.edges[e_id]
                out[e_id] += w if (a, b) == (edge.u, edge.v) else -w
        return tuple(out)

    def total_length_mass(self, graph: GeometricGraph) -> float:
        return sum(w * path.length(graph) for path, w in self.items)

    def endpoint_mass(self) -> float:
        """Sum of path weights; each path moves this much boundary."""
        return sum(w for _, w in self.items)


def good_decomposition(
    graph: GeometricGraph, flow: Sequence[float]
) -> Decomposition:
    """Peel a cycle-free signed flow into weighted oriented simple paths.

    Repeatedly walks from the lexicographically smallest vertex that has
    outgoing support arcs but no incoming ones (such a vertex exists in any
    non-empty cycle-free support), always taking the smallest-id outgoing
    edge, until a vertex with no outgoing arc is reached; the walked path is
    subtracted with the bottleneck weight.  Each peel empties at least one
    edge, so at most n_edges paths come out.  Feeding a flow whose support
    still contains a directed cycle raises ValidationError.
    """
    work = [0.0 if abs(f) < SNAP_TOL else f for f in flow]
    items: list[tuple[Path, float]] = []
    for _round in range(graph.n_edges + 1):
        arcs = _support_arcs(graph, work)
        has_incoming = set()
        for v in arcs:
            for _, head in arcs[v]:
                has_incoming.add(head)
        start = None
        for v in sorted(arcs):
            if arcs[v] and v not in has_incoming:
                start = v
                break
        if start is None:
            if any(arcs[v] for v in arcs):
                raise ValidationError(
                    "good_decomposition: support contains a directed cycle; "
                    "run remove_cycles first"
                )
            return Decomposition(items=tuple(items))
        # walk: smallest-id outgoing edge until stuck
        verts = [start]
        edge_ids: list[int] = []
        seen = {start}
        v = start
        while arcs[v]:
            e_id, head = min(arcs[v])
            if head in seen:
                raise ValidationError(
                    "good_decomposition: support contains a directed cycle; "
                    "run remove_cycles first"
                )
            edge_ids.append(e_id)
            verts.append(head)
            seen.add(head)
            v = head
        bottleneck = min(abs(work[e]) for e in edge_ids)
        for e in edge_ids:
            if work[e] > 0.0:
                work[e] = _snap(work[e] - bottleneck)
            else:
                work[e] = _snap(work[e] + bottleneck)
        items.append((Path(vertices=tuple(verts), edges=tuple(edge_ids)), bottleneck))
    raise AssertionError("path peeling failed to terminate")


def check_decomposition_identities(
    graph: GeometricGraph,
    flow: Sequence[float],
    decomposition: Decomposition,
    tol: float = 1e-9,
) -> dict[str, float]:
    """Largest deviation in each of the three defining identities.

    (a) superposition reproduces the flow edgewise;
    (b) weighted path length equals the flow's length mass
        sum(length_e * |flow_e|);
    (c) twice the total path weight equals the total variation of the
        flow's boundary.

    Returns the deviations keyed ``superposition`` / ``length_mass`` /
    ``boundary_mass``; callers compare against ``tol``.  (b) and (c) force
    every peeled path to be as long as the flow allows and to start and end
    exactly where boundary mass sits, which is what downstream pay-off
    accounting relies on."""
    sup = decomposition.superposition(graph)
    dev_a = max(
        (abs(a - b) for a, b in zip(sup, flow)),
        default=0.0,
    )
    length_mass = sum(e.length * abs(f) for e, f in zip(graph.edges, flow))
    dev_b = abs(decomposition.total_length_mass(graph) - length_mass)
    net = boundary_of_flow(graph, flow)
    dev_c = abs(2.0 * decomposition.endpoint_mass() - sum(abs(m) for m in net))
    return {
        "superposition": dev_a,
        "length_mass": dev_b,
        "boundary_mass": dev_c,
        "ok": float(max(dev_a, dev_b, dev_c) <= tol),
    }
