"""Descent solvers and exhaustive oracles for both competitor models.

The capacity solver alternates three exact-improvement steps: re-derive
each scenario's recovery flow by min-cost flow at fixed capacity, shrink
the capacity onto the flows, and graft new capacity along a shortest path
whose modeled cost increase is outweighed by the pay-off of the extra
delivered mass.  The route solver runs coordinate descent over a fixed
dictionary of candidate routes (k-shortest per boundary pair, per scenario
and globally) with all weights on a dyadic grid.  Both run a deterministic
portfolio of restarts and return the best state found.

The oracles enumerate quantized competitors exhaustively on small
instances and are the ground truth the test-suite measures the solvers
against.  They refuse inputs beyond hard size guards instead of silently
taking forever.
"""

from __future__ import annotations

import heapq
import itertools
import math
import os
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Sequence

from .decomposition import remove_cycles
from .energy import EnergyBreakdown, eulerian_energy, lagrangian_energy
from .model import (
    AdmissibilityReport,
    EulerianCompetitor,
    GeometricGraph,
    Instance,
    LagrangianCompetitor,
    Path,
    SNAP_TOL,
    ValidationError,
    check_eulerian_admissible,
    check_lagrangian_admissible,
    competitor_to_json_dict,
    dumps_report,
)
from .recovery import independent_optimum, max_payoff_flow

#: A move must beat the incumbent by this much to be applied.
IMPROVE_TOL = 1e-9

_HARD_MOVE_CAP = 100_000


class SizeGuardError(RuntimeError):
    """Raised by the oracles when exhaustive enumeration would be too large."""


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("ROT_THREADS", "1")))
    except ValueError:
        return 1


def _quanta(x: float, delta: float) -> int:
    """Largest n with n * delta <= x (tolerant of dyadic rounding)."""
    if x <= 0.0:
        return 0
    return int(math.floor(x / delta + 1e-9))


@dataclass(frozen=True)
class SolveParams:
    """Knobs shared by both solvers.

    ``delta`` is the weight quantum of the route solver, the oracles, and
    the capacity solver's grafting step; dyadic values keep the arithmetic
    exact.  ``oriented`` switches the capacity solver to the variant where
    every edge commits to a single flow direction shared by all scenarios.
    """

    max_iters: int = 200
    restarts: int = 8
    delta: float = 0.125
    seed: int = 0
    k_paths: int = 16
    oriented: bool = False

    def __post_init__(self) -> None:
        if self.max_iters < 1:
            raise ValidationError(f"max_iters: must be >= 1, got {self.max_iters}")
        if self.restarts < 1:
            raise ValidationError(f"restarts: must be >= 1, got {self.restarts}")
        if not (0.0 < self.delta <= 1.0):
            raise ValidationError(f"delta: must lie in (0, 1], got {self.delta}")
        if self.k_paths < 1:
            raise ValidationError(f"k_paths: must be >= 1, got {self.k_paths}")


@dataclass(frozen=True)
class SolveReport:
    """Outcome of a solve.  ``wall_time_s`` is measured but deliberately
    kept out of the serialized form so reports are byte-stable."""

    mode: str
    oriented: bool
    params: SolveParams
    energy: EnergyBreakdown
    competitor: EulerianCompetitor | LagrangianCompetitor
    admissible: AdmissibilityReport
    trace: tuple[float, ...]
    restarts_run: int
    iterations: int
    converged: bool
    wall_time_s: float

    def to_json_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "format": 1,
            "mode": self.mode,
            "oriented": self.oriented,
            "seed": self.params.seed,
            "delta": self.params.delta,
            "restarts": self.restarts_run,
            "iterations": self.iterations,
            "converged": self.converged,
            "energy": self.energy.to_json_dict(),
            "competitor": competitor_to_json_dict(self.competitor),
            "admissible": self.admissible.to_json_dict(),
            "trace": list(self.trace),
        }
        if self.oriented and isinstance(self.competitor, EulerianCompetitor):
            out["oriented_consistent"] = oriented_consistent(self.competitor)
        return out

    def to_json(self) -> str:
        return dumps_report(self.to_json_dict())


@dataclass
class _Run:
    """Best state found by one restart."""

    energy: float
    breakdown: EnergyBreakdown
    competitor: EulerianCompetitor | LagrangianCompetitor
    trace: tuple[float, ...]
    iterations: int
    converged: bool


# ===========================================================================
# capacity-model solver
# ===========================================================================


def _flow_sign(x: float) -> int:
    if x > SNAP_TOL:
        return 1
    if x < -SNAP_TOL:
        return -1
    return 0


def _endpoint_usage(
    inst: Instance, flow: Sequence[float]
) -> tuple[dict[int, float], dict[int, float]]:
    """Injected mass per source and extracted mass per target of a flow."""
    net = [0.0] * inst.graph.n_vertices
    for e, f in zip(inst.graph.edges, flow):
        net[e.v] += f
        net[e.u] -= f
    injected = {u: max(-net[u], 0.0) for u in inst.boundary.sources()}
    extracted = {v: max(net[v], 0.0) for v in inst.boundary.targets()}
    return injected, extracted


def _eulerian_breakdown(
    inst: Instance, theta: Sequence[float], flows: Sequence[Sequence[float]]
) -> EnergyBreakdown:
    comp = EulerianCompetitor(
        theta=tuple(theta), flows=tuple(tuple(f) for f in flows)
    )
    return eulerian_energy(inst, comp)


def _best_graft(
    inst: Instance,
    theta: Sequence[float],
    flows: Sequence[Sequence[float]],
    delta: float,
    commit: dict[int, int] | None,
) -> tuple[float, int, Path, float] | None:
    """Most profitable capacity graft, or None.

    A graft adds mass ``m`` to scenario ``i`` along a path from a source
    with injection headroom to a target with extraction headroom, lifting
    the capacity to fit.  Edge weights price the capacity lift assuming the
    scenario's |flow| grows by the full ``m`` on every edge, which bounds
    the true cost increase from above; the pay-off of the extra delivered
    mass is exact, so a negative modeled delta guarantees strict descent.

    Returns ``(delta_energy, scenario, path, m)``.
    """
    graph = inst.graph
    sources = inst.boundary.sources()
    targets = inst.boundary.targets()
    if not sources or not targets:
        return None
    best: tuple[float, int, Path, float] | None = None
    for i, scen in enumerate(inst.scenarios):
        mask = scen.edge_mask
        injected, extracted = _endpoint_usage(inst, flows[i])
        head_src = {u: sources[u] - injected[u] for u in sorted(sources)}
        head_tgt = {v: targets[v] - extracted[v] for v in sorted(targets)}
        m_cap = min(
            max(head_src.values(), default=0.0),
            max(head_tgt.values(), default=0.0),
        )
        k_max = _quanta(m_cap, delta)
        for k in range(1, k_max + 1):
            m = k * delta
            # price of lifting capacity by m along each usable edge
            weight = []
            for e in graph.edges:
                if mask is not None and not mask[e.id]:
                    weight.append(math.inf)
                else:
                    lifted = max(theta[e.id], abs(flows[i][e.id]) + m)
                    weight.append(e.length * (inst.cost(lifted) - inst.cost(theta[e.id])))
            for u in sorted(head_src):
                if head_src[u] + 1e-12 < m:
                    continue
                dist, parent = _graft_dijkstra(graph, u, weight, commit)
                for v in sorted(head_tgt):
                    if head_tgt[v] + 1e-12 < m or not math.isfinite(dist[v]):
                        continue
                    gain = scen.prob * m * (
                        inst.payoff.at(i, u) + inst.payoff.at(i, v)
                    )
                    d_energy = dist[v] - gain
                    if d_energy < -IMPROVE_TOL and (best is None or d_energy < best[0]):
                        best = (d_energy, i, _trace_path(u, v, parent), m)
    return best


def _graft_dijkstra(
    graph: GeometricGraph,
    source: int,
    weight: Sequence[float],
    commit: dict[int, int] | None,
) -> tuple[list[float], list[tuple[int, int]]]:
    """Shortest paths under non-negative per-edge prices; ``commit``
    restricts committed edges to their assigned direction."""
    inf = math.inf
    dist = [inf] * graph.n_vertices
    parent: list[tuple[int, int]] = [(-1, -1)] * graph.n_vertices
    dist[source] = 0.0
    heap = [(0.0, source)]
    adj = graph.adjacency()
    done = [False] * graph.n_vertices
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for e_id, v in adj[u]:
            w = weight[e_id]
            if not math.isfinite(w):
                continue
            if commit is not None:
                s = commit.get(e_id, 0)
                edge = graph.edges[e_id]
                direction = 1 if u == edge.u else -1
                if s != 0 and s != direction:
                    continue
            nd = d + w
            if nd < dist[v] - 1e-15:
                dist[v] = nd
                parent[v] = (u, e_id)
                heapq.heappush(heap, (nd, v))
    return dist, parent


def _trace_path(source: int, target: int, parent: Sequence[tuple[int, int]]) -> Path:
    verts = [target]
    edges = []
    v = target
    while v != source:
        u, e_id = parent[v]
        edges.append(e_id)
        verts.append(u)
        v = u
    verts.reverse()
    edges.reverse()
    return Path(vertices=tuple(verts), edges=tuple(edges))


def _apply_graft(
    graph: GeometricGraph,
    theta: list[float],
    flow: list[float],
    path: Path,
    m: float,
) -> None:
    for a, b, e_id in zip(path.vertices, path.vertices[1:], path.edges):
        edge = graph.edges[e_id]
        flow[e_id] += m if (a, b) == (edge.u, edge.v) else -m
        if abs(flow[e_id]) < SNAP_TOL:
            flow[e_id] = 0.0
        theta[e_id] = max(theta[e_id], abs(flow[e_id]))


def _run_capacity_descent(
    inst: Instance,
    params: SolveParams,
    start: str,
    run_index: int,
    committed: dict[int, int] | None,
) -> _Run:
    """One restart of the capacity solver.

    ``committed`` is None for the unoriented model; for the oriented model
    it holds the pre-assigned directions of contested edges, and every
    other edge commits to the direction of its first use within each sweep
    (commitments reset between sweeps so scenarios can renegotiate).
    """
    graph = inst.graph
    n_e = graph.n_edges
    n_s = inst.n_scenarios
    oriented = committed is not None

    theta = [0.0] * n_e
    flows = [[0.0] * n_e for _ in range(n_s)]
    if start == "independent":
        for i in range(n_s):
            sigma = [committed.get(e, 0) for e in range(n_e)] if oriented else None
            res = max_payoff_flow(
                inst, i, (inst.boundary.total_variation,) * n_e, sigma
            )
            flows[i] = list(remove_cycles(graph, res.flow))
        theta = [max(abs(flows[i][e]) for i in range(n_s)) for e in range(n_e)]
    elif start == "random":
        rng = random.Random(params.seed * 1_000_003 + run_index)
        cap = _quanta(inst.beta, params.delta)
        theta = [rng.randint(0, cap) * params.delta for _ in range(n_e)]

    best_energy = math.inf
    best_state: tuple[list[float], list[list[float]]] | None = None
    best_breakdown: EnergyBreakdown | None = None
    trace: list[float] = []
    no_improve = 0
    sweeps = 0
    converged = False
    for _sweep in range(params.max_iters):
        sweeps += 1
        commit = dict(committed) if oriented else None
        # (a) optimal recovery flows at current capacity
        for i in range(n_s):
            sigma = [commit.get(e, 0) for e in range(n_e)] if oriented else None
            res = max_payoff_flow(inst, i, theta, sigma)
            flows[i] = list(remove_cycles(graph, res.flow))
            if oriented:
                for e in range(n_e):
                    s = _flow_sign(flows[i][e])
                    if s and e not in commit:
                        commit[e] = s
        # (b) shrink capacity onto the flows
        theta = [max(abs(flows[i][e]) for i in range(n_s)) for e in range(n_e)]
        # (c) graft new capacity where the pay-off justifies it
        graft = _best_graft(inst, theta, flows, params.delta, commit)
        if graft is not None:
            _, i, path, m = graft
            _apply_graft(graph, theta, flows[i], path, m)
            if oriented:
                for e in path.edges:
                    s = _flow_sign(flows[i][e])
                    if s and e not in commit:
                        commit[e] = s
        breakdown = _eulerian_breakdown(inst, theta, flows)
        if breakdown.energy < best_energy - IMPROVE_TOL:
            best_energy = breakdown.energy
            best_breakdown = breakdown
            best_state = ([*theta], [list(f) for f in flows])
            no_improve = 0
        else:
            no_improve += 1
        trace.append(best_energy if best_breakdown is not None else breakdown.energy)
        if graft is None and no_improve >= (2 if oriented else 1):
            converged = True
            break
    if best_breakdown is None or best_state is None:
        best_breakdown = _eulerian_breakdown(inst, theta, flows)
        best_state = (theta, flows)
        best_energy = best_breakdown.energy
        trace.append(best_energy)
    comp = EulerianCompetitor(
        theta=tuple(best_state[0]), flows=tuple(tuple(f) for f in best_state[1])
    )
    return _Run(
        energy=best_energy,
        breakdown=best_breakdown,
        competitor=comp,
        trace=tuple(trace),
        iterations=sweeps,
        converged=converged,
    )


def _contested_edges(inst: Instance) -> list[int]:
    """Edges that scenario-by-scenario unconstrained optima traverse in
    both directions; only their orientation is genuinely in dispute."""
    signs: list[set[int]] = [set() for _ in range(inst.graph.n_edges)]
    for i in range(inst.n_scenarios):
        flow = independent_optimum(inst, i).flow
        for e, f in enumerate(flow):
            s = _flow_sign(f)
            if s:
                signs[e].add(s)
    return [e for e, s in enumerate(signs) if len(s) == 2]


def _start_kinds(n: int) -> list[str]:
    kinds = ["empty", "independent"]
    kinds.extend("random" for _ in range(n - 2))
    return kinds[:n]


def solve_eulerian(inst: Instance, params: SolveParams | None = None) -> SolveReport:
    """Best capacity competitor found by multi-restart alternating descent.

    In oriented mode the solver identifies contested edges from the
    scenarios' unconstrained optima and enumerates their direction
    assignments exhaustively while that stays below 4096 combinations
    (falling back to greedy first-use commitment beyond); uncontested
    edges always commit greedily inside each sweep.
    """
    params = params or SolveParams()
    t0 = time.perf_counter()
    specs: list[tuple[dict[int, int] | None, str, int]] = []
    if params.oriented:
        contested = _contested_edges(inst)
        if contested and 2 ** len(contested) <= 4096:
            assignments: list[dict[int, int]] = [
                dict(zip(contested, bits))
                for bits in itertools.product((1, -1), repeat=len(contested))
            ]
        else:
            assignments = [{}]
        per = params.restarts if len(assignments) <= 16 else min(2, params.restarts)
        idx = 0
        for a in assignments:
            for kind in _start_kinds(per):
                specs.append((a, kind, idx))
                idx += 1
    else:
        specs = [(None, kind, i) for i, kind in enumerate(_start_kinds(params.restarts))]

    def run(spec: tuple[dict[int, int] | None, str, int]) -> _Run:
        committed, kind, idx = spec
        return _run_capacity_descent(inst, params, kind, idx, committed)

    runs = _map_runs(run, specs)
    best = min(range(len(runs)), key=lambda k: (runs[k].energy, k))
    chosen = runs[best]
    report = SolveReport(
        mode="eulerian",
        oriented=params.oriented,
        params=params,
        energy=chosen.breakdown,
        competitor=chosen.competitor,
        admissible=check_eulerian_admissible(inst, chosen.competitor),  # type: ignore[arg-type]
        trace=chosen.trace,
        restarts_run=len(specs),
        iterations=sum(r.iterations for r in runs),
        converged=chosen.converged,
        wall_time_s=time.perf_counter() - t0,
    )
    return report


def _map_runs(fn: Callable[[Any], _Run], specs: Sequence[Any]) -> list[_Run]:
    """Run restarts, optionally on a thread pool (ROT_THREADS > 1); results
    come back in spec order either way, so the pick is deterministic."""
    n = _threads()
    if n <= 1 or len(specs) <= 1:
        return [fn(s) for s in specs]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, specs))


def oriented_consistent(comp: EulerianCompetitor) -> bool:
    """True when no edge carries flow in both directions across scenarios."""
    for e in range(len(comp.theta)):
        signs = {_flow_sign(row[e]) for row in comp.flows} - {0}
        if len(signs) > 1:
            return False
    return True


# ===========================================================================
# route-model solver
# ===========================================================================


def _dijkstra_restricted(
    graph: GeometricGraph,
    source: int,
    target: int,
    edge_ok: Sequence[bool],
    banned_edges: frozenset[int] | set[int],
    banned_vertices: set[int],
) -> Path | None:
    inf = math.inf
    dist = [inf] * graph.n_vertices
    parent: list[tuple[int, int]] = [(-1, -1)] * graph.n_vertices
    dist[source] = 0.0
    heap = [(0.0, source)]
    adj = graph.adjacency()
    done = [False] * graph.n_vertices
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        if u == target:
            break
        for e_id, v in adj[u]:
            if not edge_ok[e_id] or e_id in banned_edges or v in banned_vertices:
                continue
            nd = d + graph.edges[e_id].length
            if nd < dist[v] - 1e-15:
                dist[v] = nd
                parent[v] = (u, e_id)
                heapq.heappush(heap, (nd, v))
    if not math.isfinite(dist[target]):
        return None
    return _trace_path(source, target, parent)


def k_shortest_paths(
    graph: GeometricGraph,
    source: int,
    target: int,
    k: int,
    edge_ok: Sequence[bool],
) -> list[Path]:
    """Up to ``k`` shortest simple paths (Yen's deviation scheme), ties
    broken by vertex then edge sequence so the order is reproducible."""
    if source == target:
        return []
    first = _dijkstra_restricted(graph, source, target, edge_ok, frozenset(), set())
    if first is None:
        return []
    found = [first]
    seen = {(first.vertices, first.edges)}
    candidates: list[tuple[float, tuple[int, ...], tuple[int, ...]]] = []
    while len(found) < k:
        prev = found[-1]
        for j in range(len(prev.vertices) - 1):
            root_v = prev.vertices[: j + 1]
            root_e = prev.edges[:j]
            banned_edges = {
                p.edges[j]
                for p in found
                if len(p.edges) > j and p.vertices[: j + 1] == root_v and p.edges[:j] == root_e
            }
            banned_vertices = set(root_v[:-1])
            spur = _dijkstra_restricted(
                graph, root_v[-1], target, edge_ok, banned_edges, banned_vertices
            )
            if spur is None:
                continue
            verts = root_v + spur.vertices[1:]
            edges = root_e + spur.edges
            if len(set(verts)) != len(verts):
                continue
            key = (verts, edges)
            if key in seen:
                continue
            seen.add(key)
            length = sum(graph.edges[e].length for e in edges)
            heapq.heappush(candidates, (length, verts, edges))
        if not candidates:
            break
        _, verts, edges = heapq.heappop(candidates)
        found.append(Path(vertices=verts, edges=edges))
    return found


def _usable_edges(inst: Instance, scenario_index: int) -> list[bool]:
    scen = inst.scenarios[scenario_index]
    veff = scen.vertex_efficiencies(inst.graph.n_vertices)
    eeff = scen.edge_efficiencies(inst.graph)
    return [
        eeff[e.id] > 0.0 and veff[e.u] > 0.0 and veff[e.v] > 0.0
        for e in inst.graph.edges
    ]


def path_dictionary(inst: Instance, params: SolveParams | None = None) -> list[Path]:
    """Candidate routes for the route solver: k-shortest simple paths per
    (source, target) pair, first inside each scenario's usable subgraph and
    then in the full graph, deduplicated in that order."""
    params = params or SolveParams()
    sources = sorted(inst.boundary.sources())
    targets = sorted(inst.boundary.targets())
    out: list[Path] = []
    seen: set[tuple[tuple[int, ...], tuple[int, ...]]] = set()

    def add_all(edge_ok: Sequence[bool]) -> None:
        for u in sources:
            for v in targets:
                for p in k_shortest_paths(inst.graph, u, v, params.k_paths, edge_ok):
                    key = (p.vertices, p.edges)
                    if key not in seen:
                        seen.add(key)
                        out.append(p)

    for i in range(inst.n_scenarios):
        add_all(_usable_edges(inst, i))
    add_all([True] * inst.graph.n_edges)
    return out


def _payoff_coefs(inst: Instance, paths: Sequence[Path]) -> list[list[float]]:
    """coef[i][p]: pay-off per unit sub-plan weight of path p in scenario i
    (probability, worst efficiency along the route, and endpoint rewards
    multiplied in)."""
    coefs = []
    for i, scen in enumerate(inst.scenarios):
        veff = scen.vertex_efficiencies(inst.graph.n_vertices)
        eeff = scen.edge_efficiencies(inst.graph)
        row = []
        for p in paths:
            eff = min(
                min(veff[v] for v in p.vertices),
                min(eeff[e] for e in p.edges),
            )
            h = inst.payoff.at(i, p.start) + inst.payoff.at(i, p.end)
            row.append(scen.prob * eff * h)
        coefs.append(row)
    return coefs


class _RouteState:
    """Mutable plan/sub-plan weights with incremental bookkeeping."""

    def __init__(self, inst: Instance, paths: Sequence[Path], delta: float) -> None:
        self.inst = inst
        self.paths = list(paths)
        self.delta = delta
        self.coefs = _payoff_coefs(inst, paths)
        self.wp = [0.0] * len(paths)
        self.ws = [[0.0] * len(paths) for _ in range(inst.n_scenarios)]
        self.mult = [0.0] * inst.graph.n_edges
        sources = inst.boundary.sources()
        targets = inst.boundary.targets()
        self.cap = [
            min(sources.get(p.start, 0.0), targets.get(p.end, 0.0)) for p in paths
        ]
        # per-scenario endpoint budgets actually used
        self.used_src = [
            {u: 0.0 for u in sources} for _ in range(inst.n_scenarios)
        ]
        self.used_tgt = [
            {v: 0.0 for v in targets} for _ in range(inst.n_scenarios)
        ]
        self.src_budget = sources
        self.tgt_budget = targets

    # -- marginals ---------------------------------------------------------

    def lift_cost(self, p: int, dm: float) -> float:
        """phi-mass change of moving path p's plan weight by dm."""
        total = 0.0
        for e_id in self.paths[p].edges:
            edge = self.inst.graph.edges[e_id]
            m = self.mult[e_id]
            total += edge.length * (self.inst.cost(max(m + dm, 0.0)) - self.inst.cost(m))
        return total

    def sub_headroom(self, i: int, p: int) -> float:
        path = self.paths[p]
        room_s = self.src_budget.get(path.start, 0.0) - self.used_src[i].get(
            path.start, 0.0
        )
        room_t = self.tgt_budget.get(path.end, 0.0) - self.used_tgt[i].get(
            path.end, 0.0
        )
        return min(room_s, room_t)

    # -- state changes -----------------------------------------------------

    def bump_plan(self, p: int, dm: float) -> None:
        self.wp[p] += dm
        if abs(self.wp[p]) < SNAP_TOL:
            self.wp[p] = 0.0
        for e_id in self.paths[p].edges:
            self.mult[e_id] += dm
            if abs(self.mult[e_id]) < SNAP_TOL:
                self.mult[e_id] = 0.0

    def bump_sub(self, i: int, p: int, dm: float) -> None:
        self.ws[i][p] += dm
        if abs(self.ws[i][p]) < SNAP_TOL:
            self.ws[i][p] = 0.0
        path = self.paths[p]
        if path.start in self.used_src[i]:
            self.used_src[i][path.start] += dm
        if path.end in self.used_tgt[i]:
            self.used_tgt[i][path.end] += dm

    # -- energy ------------------------------------------------------------

    def energy(self) -> float:
        phi = 0.0
        for e, m in zip(self.inst.graph.edges, self.mult):
            if m > 0.0:
                phi += e.length * self.inst.cost(m)
        pay = 0.0
        for i in range(self.inst.n_scenarios):
            row = self.ws[i]
            crow = self.coefs[i]
            pay += sum(w * c for w, c in zip(row, crow) if w)
        return phi - pay

    def competitor(self) -> LagrangianCompetitor:
        plan = tuple((path, w) for path, w in zip(self.paths, self.wp))
        subs = tuple(tuple(row) for row in self.ws)
        return LagrangianCompetitor(plan=plan, subplans=subs)


def _best_route_move(state: _RouteState) -> tuple[float, Callable[[], None]] | None:
    """Most improving single move, or None.  Moves, in tie-break order:
    drop surplus plan weight; add/drop one sub-plan quantum; add one plan
    quantum together with a sub-plan quantum for one scenario; the same for
    every scenario that profits; drop one plan quantum together with the
    sub-plan quanta pinned to it."""
    d = state.delta
    n_s = state.inst.n_scenarios
    best: tuple[float, Callable[[], None]] | None = None

    def consider(delta_e: float, apply: Callable[[], None]) -> None:
        nonlocal best
        if delta_e < -IMPROVE_TOL and (best is None or delta_e < best[0]):
            best = (delta_e, apply)

    for p in range(len(state.paths)):
        wp = state.wp[p]
        top_sub = max((state.ws[i][p] for i in range(n_s)), default=0.0)
        # drop surplus plan weight
        if wp >= d - 1e-12 and wp - d >= top_sub - 1e-12:
            consider(state.lift_cost(p, -d), lambda p=p: state.bump_plan(p, -d))
        for i in range(n_s):
            coef = state.coefs[i][p]
            w = state.ws[i][p]
            if coef > 0.0:
                room = state.sub_headroom(i, p)
                # raise a sub-plan weight inside existing plan weight
                if w + d <= wp + 1e-12 and room + 1e-12 >= d:
                    consider(-d * coef, lambda i=i, p=p: state.bump_sub(i, p, d))
                # raise plan and sub-plan weight together
                if wp + d <= state.cap[p] + 1e-12 and room + 1e-12 >= d:
                    cost = state.lift_cost(p, d)
                    consider(
                        cost - d * coef,
                        lambda i=i, p=p: (state.bump_plan(p, d), state.bump_sub(i, p, d)),
                    )
                # lower a sub-plan weight (frees budget for other routes)
                if w >= d - 1e-12:
                    consider(d * coef, lambda i=i, p=p: state.bump_sub(i, p, -d))
        # raise plan weight with sub-plan weight for every profitable scenario
        if wp + d <= state.cap[p] + 1e-12:
            gain = 0.0
            who = []
            for i in range(n_s):
                if (
                    state.coefs[i][p] > 0.0
                    and state.ws[i][p] + d <= state.wp[p] + d + 1e-12
                    and state.sub_headroom(i, p) + 1e-12 >= d
                ):
                    gain += d * state.coefs[i][p]
                    who.append(i)
            if len(who) > 1:
                cost = state.lift_cost(p, d)

                def apply_all(p: int = p, who: tuple[int, ...] = tuple(who)) -> None:
                    state.bump_plan(p, d)
                    for i in who:
                        state.bump_sub(i, p, d)

                consider(cost - gain, apply_all)
        # drop plan weight together with sub-plan weights pinned at it
        if wp >= d - 1e-12:
            give_back = 0.0
            pinned = []
            for i in range(n_s):
                if state.ws[i][p] > wp - d + 1e-12:
                    give_back += (state.ws[i][p] - (wp - d)) * state.coefs[i][p]
                    pinned.append(i)
            if pinned:
                cost = state.lift_cost(p, -d)

                def apply_drop(p: int = p, pinned: tuple[int, ...] = tuple(pinned)) -> None:
                    target = state.wp[p] - d
                    for i in pinned:
                        state.bump_sub(i, p, target - state.ws[i][p])
                    state.bump_plan(p, -d)

                consider(cost + give_back, apply_drop)
    return best


def _seed_route_state(
    state: _RouteState, kind: str, params: SolveParams, run_index: int
) -> None:
    d = state.delta
    n_s = state.inst.n_scenarios
    if kind == "empty":
        return
    if kind == "greedy":
        for p in range(len(state.paths)):
            if all(state.coefs[i][p] <= 0.0 for i in range(n_s)):
                continue
            assign = []
            for i in range(n_s):
                if state.coefs[i][p] <= 0.0:
                    assign.append(0.0)
                    continue
                room = min(state.sub_headroom(i, p), state.cap[p])
                assign.append(_quanta(room, d) * d)
            w = max(assign)
            if w <= 0.0:
                continue
            state.bump_plan(p, w)
            for i, a in enumerate(assign):
                if a > 0.0:
                    state.bump_sub(i, p, a)
        return
    rng = random.Random(params.seed * 1_000_003 + run_index)
    for p in range(len(state.paths)):
        if rng.random() < 0.5:
            continue
        n_cap = _quanta(state.cap[p], d)
        if n_cap == 0:
            continue
        w = rng.randint(0, n_cap) * d
        if w <= 0.0:
            continue
        state.bump_plan(p, w)
        for i in range(n_s):
            if state.coefs[i][p] <= 0.0:
                continue
            room = min(state.sub_headroom(i, p), w)
            n_room = _quanta(room, d)
            if n_room == 0:
                continue
            a = rng.randint(0, n_room) * d
            if a > 0.0:
                state.bump_sub(i, p, a)


def _run_route_descent(
    inst: Instance,
    paths: Sequence[Path],
    params: SolveParams,
    kind: str,
    run_index: int,
) -> _Run:
    state = _RouteState(inst, paths, params.delta)
    _seed_route_state(state, kind, params, run_index)
    energy = state.energy()
    trace = [energy]
    moves = 0
    converged = False
    cap = min(_HARD_MOVE_CAP, params.max_iters * 200)
    while moves < cap:
        mv = _best_route_move(state)
        if mv is None:
            converged = True
            break
        delta_e, apply = mv
        apply()
        energy = state.energy()
        trace.append(energy)
        moves += 1
    comp = state.competitor()
    breakdown = lagrangian_energy(inst, comp)
    return _Run(
        energy=breakdown.energy,
        breakdown=breakdown,
        competitor=comp,
        trace=tuple(trace),
        iterations=moves,
        converged=converged,
    )


def solve_lagrangian(inst: Instance, params: SolveParams | None = None) -> SolveReport:
    """Best route competitor found by coordinate descent on a fixed route
    dictionary, over a deterministic portfolio of restarts."""
    params = params or SolveParams()
    t0 = time.perf_counter()
    paths = path_dictionary(inst, params)
    kinds = ["empty", "greedy"]
    kinds.extend("random" for _ in range(params.restarts - 2))
    kinds = kinds[: params.restarts]
    specs = list(enumerate(kinds))

    def run(spec: tuple[int, str]) -> _Run:
        idx, kind = spec
        return _run_route_descent(inst, paths, params, kind, idx)

    runs = _map_runs(run, specs)
    best = min(range(len(runs)), key=lambda k: (runs[k].energy, k))
    chosen = runs[best]
    return SolveReport(
        mode="lagrangian",
        oriented=False,
        params=params,
        energy=chosen.breakdown,
        competitor=chosen.competitor,
        admissible=check_lagrangian_admissible(inst, chosen.competitor),  # type: ignore[arg-type]
        trace=chosen.trace,
        restarts_run=len(specs),
        iterations=sum(r.iterations for r in runs),
        converged=chosen.converged,
        wall_time_s=time.perf_counter() - t0,
    )


def solve(inst: Instance, mode: str, params: SolveParams | None = None) -> SolveReport:
    if mode == "eulerian":
        return solve_eulerian(inst, params)
    if mode == "lagrangian":
        return solve_lagrangian(inst, params)
    raise ValidationError(f"mode: expected 'eulerian' or 'lagrangian', got {mode!r}")


# ===========================================================================
# exhaustive oracles
# ===========================================================================

_ORACLE_MAX_EDGES = 8
_ORACLE_MAX_PATHS = 64
_ORACLE_MAX_COMBOS = 5_000_000
_ORACLE_MAX_COMPONENT = 6


@dataclass(frozen=True)
class OracleResult:
    energy: float
    breakdown: EnergyBreakdown
    competitor: EulerianCompetitor | LagrangianCompetitor
    combos: int


def _simple_paths(
    graph: GeometricGraph,
    source: int,
    target: int,
    edge_ok: Sequence[bool],
    cap: int,
) -> list[Path]:
    """All vertex-simple paths source -> target over allowed edges, DFS in
    edge-id order."""
    out: list[Path] = []
    adj = graph.adjacency()

    def walk(v: int, verts: list[int], edges: list[int], used: set[int]) -> None:
        if v == target:
            out.append(Path(vertices=tuple(verts), edges=tuple(edges)))
            if len(out) > cap:
                raise SizeGuardError(
                    f"more than {cap} simple paths between vertices "
                    f"{source} and {target}"
                )
            return
        for e_id, w in adj[v]:
            if not edge_ok[e_id] or w in used:
                continue
            used.add(w)
            verts.append(w)
            edges.append(e_id)
            walk(w, verts, edges, used)
            used.discard(w)
            verts.pop()
            edges.pop()

    walk(source, [source], [], {source})
    return out


def _scenario_allocations(
    inst: Instance,
    scenario_index: int,
    paths: Sequence[Path],
    delta: float,
    cap: int,
) -> list[tuple[tuple[float, ...], float]]:
    """Every quantized assignment of path weights compatible with the
    endpoint budgets, as (edge flow, raw scenario pay-off * probability)."""
    graph = inst.graph
    scen = inst.scenarios[scenario_index]
    sources = dict(inst.boundary.sources())
    targets = dict(inst.boundary.targets())
    out: list[tuple[tuple[float, ...], float]] = []
    flow = [0.0] * graph.n_edges
    signs = []
    for p in paths:
        s = []
        for a, b, e_id in zip(p.vertices, p.vertices[1:], p.edges):
            edge = graph.edges[e_id]
            s.append((e_id, 1.0 if (a, b) == (edge.u, edge.v) else -1.0))
        signs.append(s)

    def rec(k: int, payoff: float) -> None:
        if k == len(paths):
            out.append((tuple(flow), payoff))
            if len(out) > cap:
                raise SizeGuardError(
                    f"scenario {scenario_index}: more than {cap} quantized recovery flows"
                )
            return
        p = paths[k]
        room = min(sources.get(p.start, 0.0), targets.get(p.end, 0.0))
        n_max = _quanta(room, delta)
        h = scen.prob * (
            inst.payoff.at(scenario_index, p.start)
            + inst.payoff.at(scenario_index, p.end)
        )
        for n in range(n_max + 1):
            w = n * delta
            if n:
                sources[p.start] -= delta
                targets[p.end] -= delta
                for e_id, s in signs[k]:
                    flow[e_id] += s * delta
            rec(k + 1, payoff + w * h)
        # restore
        if n_max:
            sources[p.start] += n_max * delta
            targets[p.end] += n_max * delta
            for e_id, s in signs[k]:
                flow[e_id] -= s * n_max * delta
                if abs(flow[e_id]) < SNAP_TOL:
                    flow[e_id] = 0.0

    rec(0, 0.0)
    return out


def brute_force_eulerian(
    inst: Instance,
    delta: float = 0.125,
    oriented: bool = False,
    max_edges: int = _ORACLE_MAX_EDGES,
    max_paths: int = _ORACLE_MAX_PATHS,
    max_combos: int = _ORACLE_MAX_COMBOS,
) -> OracleResult:
    """Exhaustive optimum over capacity competitors whose recovery flows
    are quantized superpositions of simple source-to-target paths.  The
    capacity is the pointwise max of the flows (anything more only costs).
    In oriented mode, joint choices where an edge is traversed in both
    directions are filtered out."""
    graph = inst.graph
    if graph.n_edges > max_edges:
        raise SizeGuardError(
            f"instance has {graph.n_edges} edges; oracle accepts at most {max_edges}"
        )
    sources = sorted(inst.boundary.sources())
    targets = sorted(inst.boundary.targets())
    per_scenario: list[list[tuple[tuple[float, ...], float]]] = []
    for i, scen in enumerate(inst.scenarios):
        if scen.edge_mask is not None:
            edge_ok: Sequence[bool] = scen.edge_mask
        else:
            edge_ok = [True] * graph.n_edges
        paths: list[Path] = []
        for u in sources:
            for v in targets:
                paths.extend(_simple_paths(graph, u, v, edge_ok, max_paths))
        if len(paths) > max_paths:
            raise SizeGuardError(
                f"scenario {i}: {len(paths)} candidate paths exceed the "
                f"oracle bound {max_paths}"
            )
        per_scenario.append(
            _scenario_allocations(inst, i, paths, delta, max_combos)
        )
    combos = 1
    for allocs in per_scenario:
        combos *= len(allocs)
        if combos > max_combos:
            raise SizeGuardError(
                f"joint enumeration would need {combos}+ combinations "
                f"(bound {max_combos})"
            )
    lengths = [e.length for e in graph.edges]
    cost = inst.cost
    n_e = graph.n_edges
    best_energy = math.inf
    best_choice: tuple[tuple[tuple[float, ...], float], ...] | None = None
    for choice in itertools.product(*per_scenario):
        if oriented:
            conflict = False
            for e in range(n_e):
                pos = neg = False
                for flow, _ in choice:
                    f = flow[e]
                    if f > SNAP_TOL:
                        pos = True
                    elif f < -SNAP_TOL:
                        neg = True
                if pos and neg:
                    conflict = True
                    break
            if conflict:
                continue
        phi = 0.0
        for e in range(n_e):
            t = max(abs(flow[e]) for flow, _ in choice)
            if t > 0.0:
                phi += lengths[e] * cost(t)
        energy = phi - sum(pay for _, pay in choice)
        if energy < best_energy - 1e-15:
            best_energy = energy
            best_choice = choice
    assert best_choice is not None
    theta = tuple(
        max(abs(flow[e]) for flow, _ in best_choice) for e in range(n_e)
    )
    comp = EulerianCompetitor(
        theta=theta, flows=tuple(flow for flow, _ in best_choice)
    )
    breakdown = eulerian_energy(inst, comp)
    return OracleResult(
        energy=breakdown.energy, breakdown=breakdown, competitor=comp, combos=combos
    )


class _UnionFind:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _best_suballocation(
    paths_idx: Sequence[int],
    wp: Sequence[float],
    coefs_row: Sequence[float],
    starts: Sequence[int],
    ends: Sequence[int],
    src_budget: dict[int, float],
    tgt_budget: dict[int, float],
    delta: float,
    budget: list[int],
) -> float:
    """Maximum scenario pay-off over quantized sub-plan weights bounded by
    the plan weights and the endpoint budgets.  ``budget`` is a one-cell
    countdown shared across the whole component enumeration."""
    order = [k for k in range(len(paths_idx)) if coefs_row[k] > 0.0 and wp[k] > 0.0]
    if not order:
        return 0.0
    src = dict(src_budget)
    tgt = dict(tgt_budget)
    best = 0.0

    def rec(j: int, acc: float) -> None:
        nonlocal best
        budget[0] -= 1
        if budget[0] <= 0:
            raise SizeGuardError("oracle sub-plan enumeration exceeded its budget")
        if j == len(order):
            if acc > best:
                best = acc
            return
        k = order[j]
        room = min(wp[k], src[starts[k]], tgt[ends[k]])
        n_max = _quanta(room, delta)
        for n in range(n_max, -1, -1):
            w = n * delta
            src[starts[k]] -= w
            tgt[ends[k]] -= w
            rec(j + 1, acc + w * coefs_row[k])
            src[starts[k]] += w
            tgt[ends[k]] += w

    rec(0, 0.0)
    return best


def brute_force_lagrangian(
    inst: Instance,
    delta: float = 0.125,
    max_paths: int = _ORACLE_MAX_PATHS,
    max_component: int = _ORACLE_MAX_COMPONENT,
    max_combos: int = _ORACLE_MAX_COMBOS,
) -> OracleResult:
    """Exhaustive optimum over route competitors with quantized weights on
    simple source-to-target routes.

    Routes that can never earn pay-off are dropped (exact: plan weight only
    adds cost).  The remainder splits into components that share no edge
    and no endpoint budget usable in a common scenario; components are
    enumerated independently, which is what keeps the search tractable, so
    the guards are on route counts rather than on raw graph size."""
    graph = inst.graph
    sources = sorted(inst.boundary.sources())
    targets = sorted(inst.boundary.targets())
    all_ok = [True] * graph.n_edges
    paths: list[Path] = []
    for u in sources:
        for v in targets:
            paths.extend(_simple_paths(graph, u, v, all_ok, max_paths))
    if len(paths) > max_paths:
        raise SizeGuardError(
            f"{len(paths)} candidate routes exceed the oracle bound {max_paths}"
        )
    coefs = _payoff_coefs(inst, paths)
    keep = [p for p in range(len(paths)) if any(row[p] > 0.0 for row in coefs)]
    paths = [paths[p] for p in keep]
    coefs = [[row[p] for p in keep] for row in coefs]
    n_p = len(paths)
    n_s = inst.n_scenarios
    src_budget = inst.boundary.sources()
    tgt_budget = inst.boundary.targets()

    uf = _UnionFind(n_p)
    edge_users: dict[int, list[int]] = {}
    for p, path in enumerate(paths):
        for e in path.edges:
            edge_users.setdefault(e, []).append(p)
    for users in edge_users.values():
        for a, b in zip(users, users[1:]):
            uf.union(a, b)
    for i in range(n_s):
        by_src: dict[int, list[int]] = {}
        by_tgt: dict[int, list[int]] = {}
        for p, path in enumerate(paths):
            if coefs[i][p] <= 0.0:
                continue
            by_src.setdefault(path.start, []).append(p)
            by_tgt.setdefault(path.end, []).append(p)
        for group in list(by_src.values()) + list(by_tgt.values()):
            for a, b in zip(group, group[1:]):
                uf.union(a, b)

    components: dict[int, list[int]] = {}
    for p in range(n_p):
        components.setdefault(uf.find(p), []).append(p)

    total_energy = 0.0
    best_wp = [0.0] * n_p
    best_ws = [[0.0] * n_p for _ in range(n_s)]
    combos_total = 0
    for root in sorted(components):
        comp_paths = components[root]
        if len(comp_paths) > max_component:
            raise SizeGuardError(
                f"a route component has {len(comp_paths)} routes; oracle "
                f"accepts at most {max_component} per component"
            )
        starts = [paths[p].start for p in comp_paths]
        ends = [paths[p].end for p in comp_paths]
        caps = [
            _quanta(min(src_budget.get(s, 0.0), tgt_budget.get(t, 0.0)), delta)
            for s, t in zip(starts, ends)
        ]
        grid = 1
        for c in caps:
            grid *= c + 1
        if grid > max_combos:
            raise SizeGuardError(
                f"a route component needs {grid} plan combinations (bound {max_combos})"
            )
        edge_set = sorted({e for p in comp_paths for e in paths[p].edges})
        best_comp = 0.0
        best_comp_wp: list[float] | None = None
        best_comp_ws: list[list[float]] | None = None
        budget = [max_combos]
        for mix in itertools.product(*(range(c + 1) for c in caps)):
            wp = [n * delta for n in mix]
            mult = {e: 0.0 for e in edge_set}
            for k, p in enumerate(comp_paths):
                if wp[k]:
                    for e in paths[p].edges:
                        mult[e] += wp[k]
            phi = sum(
                graph.edges[e].length * inst.cost(m) for e, m in mult.items() if m > 0.0
            )
            pay = 0.0
            for i in range(n_s):
                row = [coefs[i][p] for p in comp_paths]
                pay += _best_suballocation(
                    comp_paths, wp, row, starts, ends,
                    src_budget, tgt_budget, delta, budget,
                )
            energy = phi - pay
            if energy < best_comp - 1e-15:
                best_comp = energy
                best_comp_wp = wp
                best_comp_ws = _recover_suballocations(
                    inst, comp_paths, paths, wp, coefs, starts, ends,
                    src_budget, tgt_budget, delta, budget,
                )
            combos_total += 1
        total_energy += best_comp
        if best_comp_wp is not None and best_comp_ws is not None:
            for k, p in enumerate(comp_paths):
                best_wp[p] = best_comp_wp[k]
                for i in range(n_s):
                    best_ws[i][p] = best_comp_ws[i][k]

    comp = LagrangianCompetitor(
        plan=tuple((paths[p], best_wp[p]) for p in range(n_p)),
        subplans=tuple(tuple(best_ws[i]) for i in range(n_s)),
    )
    breakdown = lagrangian_energy(inst, comp)
    return OracleResult(
        energy=breakdown.energy,
        breakdown=breakdown,
        competitor=comp,
        combos=combos_total,
    )


def _recover_suballocations(
    inst: Instance,
    comp_paths: Sequence[int],
    paths: Sequence[Path],
    wp: Sequence[float],
    coefs: Sequence[Sequence[float]],
    starts: Sequence[int],
    ends: Sequence[int],
    src_budget: dict[int, float],
    tgt_budget: dict[int, float],
    delta: float,
    budget: list[int],
) -> list[list[float]]:
    """Re-run the per-scenario sub-plan search, also recording the argmax."""
    out = []
    for i in range(inst.n_scenarios):
        row = [coefs[i][p] for p in comp_paths]
        order = [k for k in range(len(comp_paths)) if row[k] > 0.0 and wp[k] > 0.0]
        best_val = 0.0
        best_assign = [0.0] * len(comp_paths)
        src = dict(src_budget)
        tgt = dict(tgt_budget)
        assign = [0.0] * len(comp_paths)

        def rec(j: int, acc: float) -> None:
            nonlocal best_val, best_assign
            budget[0] -= 1
            if budget[0] <= 0:
                raise SizeGuardError("oracle sub-plan enumeration exceeded its budget")
            if j == len(order):
                if acc > best_val + 1e-15:
                    best_val = acc
                    best_assign = list(assign)
                return
            k = order[j]
            room = min(wp[k], src[starts[k]], tgt[ends[k]])
            n_max = _quanta(room, delta)
            for n in range(n_max, -1, -1):
                w = n * delta
                src[starts[k]] -= w
                tgt[ends[k]] -= w
                assign[k] = w
                rec(j + 1, acc + w * row[k])
                src[starts[k]] += w
                tgt[ends[k]] += w
                assign[k] = 0.0

        rec(0, 0.0)
        out.append(best_assign)
    return out
