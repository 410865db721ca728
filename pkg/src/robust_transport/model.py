"""Domain model for damage-aware network design instances.

An instance couples a geometric graph with a signed boundary measure
(negative atoms are sources, positive atoms are targets), a subadditive
construction cost, a finite list of probabilistic damage scenarios, and a
pay-off specification rewarding delivered boundary mass.  This module owns
the instance JSON format, the Jordan-part domination order on signed vertex
measures, and the admissibility checks for both competitor kinds:

* capacity competitors: an unoriented per-edge capacity ``theta`` plus one
  signed recovery flow per scenario, constrained by capacity, by the
  scenario's usable-edge mask, and by boundary domination;
* route competitors: a weighted list of oriented paths (the plan) plus one
  per-scenario sub-assignment of weights, constrained pathwise by the plan
  weight and in aggregate by boundary domination.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

#: Absolute tolerance for the domination order and capacity checks.
PRECEQ_TOL = 1e-9
#: Absolute tolerance for sub-plan weight domination.
SUBPLAN_TOL = 1e-12
#: Values below this are treated as structural zeros.
SNAP_TOL = 1e-12

FORMAT_VERSION = 1


class ModelError(ValueError):
    """Base class for all instance and competitor validation failures."""


class ParseError(ModelError):
    """Malformed instance JSON; the message names the offending field."""


class ValidationError(ModelError):
    """Structurally well-formed input that violates a model invariant."""


# ---------------------------------------------------------------------------
# graph


@dataclass(frozen=True)
class Vertex:
    id: int
    pos: tuple[float, ...]


@dataclass(frozen=True)
class Edge:
    id: int
    u: int
    v: int
    length: float


@dataclass(frozen=True)
class GeometricGraph:
    """Finite embedded multigraph.

    Vertex and edge ids are required to be contiguous from 0 so that masks,
    efficiencies, capacities and flows can be stored as plain per-id arrays.
    Parallel edges between the same endpoints are allowed (they model
    geometrically distinct routes, e.g. a detour arc alongside a straight
    segment) and are told apart by edge id everywhere.
    """

    dimension: int
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise ValidationError(f"dimension: must be >= 1, got {self.dimension}")
        for idx, vert in enumerate(self.vertices):
            if vert.id != idx:
                raise ValidationError(
                    f"vertices[{idx}].id: ids must be contiguous from 0, got {vert.id}"
                )
            if len(vert.pos) != self.dimension:
                raise ValidationError(
                    f"vertices[{idx}].pos: expected {self.dimension} coordinates, "
                    f"got {len(vert.pos)}"
                )
            if not all(math.isfinite(c) for c in vert.pos):
                raise ValidationError(f"vertices[{idx}].pos: coordinates must be finite")
        n = len(self.vertices)
        for idx, edge in enumerate(self.edges):
            if edge.id != idx:
                raise ValidationError(
                    f"edges[{idx}].id: ids must be contiguous from 0, got {edge.id}"
                )
            if not (0 <= edge.u < n):
                raise ValidationError(f"edges[{idx}].u: dangling vertex id {edge.u}")
            if not (0 <= edge.v < n):
                raise ValidationError(f"edges[{idx}].v: dangling vertex id {edge.v}")
            if edge.u == edge.v:
                raise ValidationError(f"edges[{idx}]: self-loop at vertex {edge.u}")
            if not (math.isfinite(edge.length) and edge.length > 0.0):
                raise ValidationError(
                    f"edges[{idx}].length: must be a positive real, got {edge.length}"
                )

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def position(self, vertex_id: int) -> tuple[float, ...]:
        return self.vertices[vertex_id].pos

    def adjacency(self) -> dict[int, list[tuple[int, int]]]:
        """Per-vertex list of (edge id, opposite endpoint), in edge-id order."""
        adj: dict[int, list[tuple[int, int]]] = {v.id: [] for v in self.vertices}
        for e in self.edges:
            adj[e.u].append((e.id, e.v))
            adj[e.v].append((e.id, e.u))
        return adj

    def edges_between(self, u: int, v: int) -> list[Edge]:
        return [e for e in self.edges if {e.u, e.v} == {u, v}]


def euclidean(p: Sequence[float], q: Sequence[float]) -> float:
    return math.sqrt(sum((a - b) ** 2 for a, b in zip(p, q)))


# ---------------------------------------------------------------------------
# boundary measure


@dataclass(frozen=True)
class BoundaryMeasure:
    """Signed atomic measure on vertices; one signed mass per vertex.

    Negative atoms form the source part, positive atoms the target part, so
    a vertex can never carry both signs.  ``atoms`` maps vertex id to signed
    mass and is kept sorted by vertex id for deterministic serialization.
    """

    atoms: Mapping[int, float]

    def __post_init__(self) -> None:
        ordered: dict[int, float] = {}
        for v in sorted(self.atoms):
            m = float(self.atoms[v])
            if not math.isfinite(m):
                raise ValidationError(f"boundary[vertex {v}].mass: must be finite")
            if m == 0.0:
                continue
            ordered[v] = m
        object.__setattr__(self, "atoms", ordered)

    def plus(self, vertex_id: int) -> float:
        """Target-part mass at a vertex (non-negative)."""
        return max(self.atoms.get(vertex_id, 0.0), 0.0)

    def minus(self, vertex_id: int) -> float:
        """Source-part mass at a vertex (non-negative)."""
        return max(-self.atoms.get(vertex_id, 0.0), 0.0)

    def sources(self) -> dict[int, float]:
        return {v: -m for v, m in self.atoms.items() if m < 0.0}

    def targets(self) -> dict[int, float]:
        return {v: m for v, m in self.atoms.items() if m > 0.0}

    @property
    def total_variation(self) -> float:
        return sum(abs(m) for m in self.atoms.values())


# ---------------------------------------------------------------------------
# construction cost


_COST_KINDS = ("power", "bounded_step", "table")


@dataclass(frozen=True)
class CostSpec:
    """Subadditive per-unit-length construction cost ``phi``.

    Kinds:

    * ``power``: ``phi(t) = t ** alpha`` with ``alpha`` in (0, 1); unbounded.
    * ``bounded_step``: ``phi(t) = value`` for ``t > 0``, ``phi(0) = 0``.
    * ``table``: piecewise-linear interpolation of breakpoints
      ``(t, phi(t))`` starting at (0, 0) with non-decreasing values;
      evaluation is clamped to the last breakpoint value beyond it, so a
      table cost is always bounded.
    """

    kind: str
    alpha: float | None = None
    value: float | None = None
    points: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in _COST_KINDS:
            raise ValidationError(f"phi.kind: unknown kind {self.kind!r}")
        if self.kind == "power":
            if self.alpha is None or not (0.0 < self.alpha < 1.0):
                raise ValidationError(
                    f"phi.alpha: power cost needs alpha in (0, 1), got {self.alpha}"
                )
        elif self.kind == "bounded_step":
            if self.value is None or not (
                math.isfinite(self.value) and self.value > 0.0
            ):
                raise ValidationError(
                    f"phi.value: bounded_step cost needs a positive value, got {self.value}"
                )
        else:
            pts = self.points
            if not pts:
                raise ValidationError("phi.points: table cost needs breakpoints")
            pts = tuple((float(t), float(y)) for t, y in pts)
            object.__setattr__(self, "points", pts)
            if pts[0] != (0.0, 0.0):
                raise ValidationError("phi.points[0]: table must start at (0, 0)")
            for i in range(1, len(pts)):
                if pts[i][0] <= pts[i - 1][0]:
                    raise ValidationError(
                        f"phi.points[{i}]: abscissae must be strictly increasing"
                    )
                if pts[i][1] < pts[i - 1][1]:
                    raise ValidationError(
                        f"phi.points[{i}]: values must be non-decreasing"
                    )

    @classmethod
    def power(cls, alpha: float) -> "CostSpec":
        return cls(kind="power", alpha=float(alpha))

    @classmethod
    def bounded_step(cls, value: float) -> "CostSpec":
        return cls(kind="bounded_step", value=float(value))

    @classmethod
    def table(cls, points: Iterable[tuple[float, float]]) -> "CostSpec":
        return cls(kind="table", points=tuple(points))

    @property
    def unbounded(self) -> bool:
        return self.kind == "power"

    def __call__(self, t: float) -> float:
        if t < 0.0:
            raise ValidationError(f"phi: multiplicity must be >= 0, got {t}")
        if t == 0.0:
            return 0.0
        if self.kind == "power":
            return t ** self.alpha  # type: ignore[operator]
        if self.kind == "bounded_step":
            return self.value  # type: ignore[return-value]
        pts = self.points  # type: ignore[assignment]
        if t >= pts[-1][0]:
            return pts[-1][1]
        lo = 0
        for i in range(1, len(pts)):
            if t <= pts[i][0]:
                lo = i - 1
                break
        t0, y0 = pts[lo]
        t1, y1 = pts[lo + 1]
        return y0 + (y1 - y0) * (t - t0) / (t1 - t0)


# ---------------------------------------------------------------------------
# damage scenarios


@dataclass(frozen=True)
class DamageScenario:
    """One probabilistic damage event.

    ``edge_mask[e]`` is True when edge ``e`` survives and may carry recovery
    flow.  Efficiencies are reals in [0, 1]; they degrade the transported
    mass of any route passing through the vertex or edge.  Capacity-model
    solves need the mask; route-model solves accept any of the three fields
    (a mask translates to 0/1 edge efficiencies).
    """

    id: int
    prob: float
    edge_mask: tuple[bool, ...] | None = None
    vertex_efficiency: tuple[float, ...] | None = None
    edge_efficiency: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.prob) and 0.0 < self.prob <= 1.0):
            raise ValidationError(
                f"scenarios[{self.id}].prob: must lie in (0, 1], got {self.prob}"
            )
        for name in ("vertex_efficiency", "edge_efficiency"):
            values = getattr(self, name)
            if values is None:
                continue
            for k, x in enumerate(values):
                if not (math.isfinite(x) and 0.0 <= x <= 1.0):
                    raise ValidationError(
                        f"scenarios[{self.id}].{name}[{k}]: must lie in [0, 1], got {x}"
                    )

    @property
    def has_mask(self) -> bool:
        return self.edge_mask is not None

    @property
    def has_damage_data(self) -> bool:
        return (
            self.edge_mask is not None
            or self.vertex_efficiency is not None
            or self.edge_efficiency is not None
        )

    def vertex_efficiencies(self, n_vertices: int) -> tuple[float, ...]:
        if self.vertex_efficiency is not None:
            return self.vertex_efficiency
        return (1.0,) * n_vertices

    def edge_efficiencies(self, graph: GeometricGraph) -> tuple[float, ...]:
        """Effective per-edge efficiency, combining all present damage data.
        A scenario with no damage data leaves everything fully efficient."""
        if self.edge_efficiency is not None:
            base = list(self.edge_efficiency)
        elif self.vertex_efficiency is not None:
            veff = self.vertex_efficiency
            base = [min(veff[e.u], veff[e.v]) for e in graph.edges]
        else:
            base = [1.0] * graph.n_edges
        if self.edge_mask is not None:
            base = [x if ok else 0.0 for x, ok in zip(base, self.edge_mask)]
        return tuple(base)


# ---------------------------------------------------------------------------
# pay-off


_PAYOFF_KINDS = ("constant", "table")


@dataclass(frozen=True)
class PayoffSpec:
    """Reward density ``h(scenario, vertex)`` for delivered boundary mass."""

    kind: str
    value: float | None = None
    values: tuple[tuple[float, ...], ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in _PAYOFF_KINDS:
            raise ValidationError(f"payoff.kind: unknown kind {self.kind!r}")
        if self.kind == "constant":
            if self.value is None or not (math.isfinite(self.value) and self.value >= 0.0):
                raise ValidationError(
                    f"payoff.value: must be a finite real >= 0, got {self.value}"
                )
        else:
            if not self.values:
                raise ValidationError("payoff.values: table pay-off needs values")
            for i, row in enumerate(self.values):
                for v, x in enumerate(row):
                    if not (math.isfinite(x) and x >= 0.0):
                        raise ValidationError(
                            f"payoff.values[{i}][{v}]: must be a finite real >= 0, got {x}"
                        )

    @classmethod
    def constant(cls, value: float) -> "PayoffSpec":
        return cls(kind="constant", value=float(value))

    @classmethod
    def table(cls, values: Iterable[Iterable[float]]) -> "PayoffSpec":
        return cls(kind="table", values=tuple(tuple(float(x) for x in row) for row in values))

    def at(self, scenario_index: int, vertex_id: int) -> float:
        if self.kind == "constant":
            return self.value  # type: ignore[return-value]
        return self.values[scenario_index][vertex_id]  # type: ignore[index]

    def max_value(self) -> float:
        if self.kind == "constant":
            return self.value  # type: ignore[return-value]
        return max((x for row in self.values for x in row), default=0.0)  # type: ignore[union-attr]


# ---------------------------------------------------------------------------
# instance


@dataclass(frozen=True)
class Instance:
    graph: GeometricGraph
    boundary: BoundaryMeasure
    cost: CostSpec
    scenarios: tuple[DamageScenario, ...]
    payoff: PayoffSpec

    def __post_init__(self) -> None:
        n_v, n_e = self.graph.n_vertices, self.graph.n_edges
        for v in self.boundary.atoms:
            if not (0 <= v < n_v):
                raise ValidationError(f"boundary: dangling vertex id {v}")
        if not self.scenarios:
            raise ValidationError("scenarios: scenario list must be non-empty")
        total = 0.0
        for idx, scen in enumerate(self.scenarios):
            if scen.id != idx:
                raise ValidationError(
                    f"scenarios[{idx}].id: ids must be contiguous from 0, got {scen.id}"
                )
            total += scen.prob
            if scen.edge_mask is not None and len(scen.edge_mask) != n_e:
                raise ValidationError(
                    f"scenarios[{idx}].edge_mask: expected {n_e} entries, "
                    f"got {len(scen.edge_mask)}"
                )
            if scen.vertex_efficiency is not None and len(scen.vertex_efficiency) != n_v:
                raise ValidationError(
                    f"scenarios[{idx}].vertex_efficiency: expected {n_v} entries, "
                    f"got {len(scen.vertex_efficiency)}"
                )
            if scen.edge_efficiency is not None and len(scen.edge_efficiency) != n_e:
                raise ValidationError(
                    f"scenarios[{idx}].edge_efficiency: expected {n_e} entries, "
                    f"got {len(scen.edge_efficiency)}"
                )
        if abs(total - 1.0) > PRECEQ_TOL:
            raise ValidationError(
                f"scenarios[*].prob: probabilities must sum to 1 within {PRECEQ_TOL}, "
                f"got {total!r}"
            )
        if self.payoff.kind == "table":
            rows = self.payoff.values or ()
            if len(rows) != len(self.scenarios):
                raise ValidationError(
                    f"payoff.values: expected {len(self.scenarios)} scenario rows, "
                    f"got {len(rows)}"
                )
            for i, row in enumerate(rows):
                if len(row) != n_v:
                    raise ValidationError(
                        f"payoff.values[{i}]: expected {n_v} vertex entries, got {len(row)}"
                    )

    @property
    def n_scenarios(self) -> int:
        return len(self.scenarios)

    @property
    def beta(self) -> float:
        """Density bound ``|boundary|(X) / 2`` for cycle-free admissible flows."""
        return self.boundary.total_variation / 2.0


# ---------------------------------------------------------------------------
# competitors


@dataclass(frozen=True)
class Path:
    """Oriented walk given by its vertex sequence and the edge ids joining
    consecutive vertices.  Edge ids disambiguate parallel edges; vertex and
    edge sequences must agree in the underlying graph."""

    vertices: tuple[int, ...]
    edges: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.vertices) < 2:
            raise ValidationError("path: needs at least two vertices")
        if len(self.edges) != len(self.vertices) - 1:
            raise ValidationError(
                f"path: {len(self.vertices)} vertices need {len(self.vertices) - 1} "
                f"edges, got {len(self.edges)}"
            )

    @property
    def start(self) -> int:
        return self.vertices[0]

    @property
    def end(self) -> int:
        return self.vertices[-1]

    def validate(self, graph: GeometricGraph) -> None:
        for k, e_id in enumerate(self.edges):
            if not (0 <= e_id < graph.n_edges):
                raise ValidationError(f"path.edges[{k}]: unknown edge id {e_id}")
            edge = graph.edges[e_id]
            a, b = self.vertices[k], self.vertices[k + 1]
            if {edge.u, edge.v} != {a, b}:
                raise ValidationError(
                    f"path.edges[{k}]: edge {e_id} does not join vertices {a} and {b}"
                )

    def length(self, graph: GeometricGraph) -> float:
        return sum(graph.edges[e].length for e in self.edges)

    def is_simple(self) -> bool:
        return len(set(self.vertices)) == len(self.vertices)

    @classmethod
    def from_vertices(cls, graph: GeometricGraph, vertices: Sequence[int]) -> "Path":
        """Build a path from a vertex sequence, choosing for each hop the
        shortest (then smallest-id) edge between consecutive vertices."""
        edge_ids: list[int] = []
        for a, b in zip(vertices, vertices[1:]):
            candidates = sorted(
                (e for e in graph.edges if {e.u, e.v} == {a, b}),
                key=lambda e: (e.length, e.id),
            )
            if not candidates:
                raise ValidationError(f"path: no edge joins vertices {a} and {b}")
            edge_ids.append(candidates[0].id)
        return cls(vertices=tuple(vertices), edges=tuple(edge_ids))


@dataclass(frozen=True)
class EulerianCompetitor:
    """Capacity vector plus one signed per-edge recovery flow per scenario.

    Flow signs are relative to each edge's reference orientation (from
    ``edge.u`` to ``edge.v``)."""

    theta: tuple[float, ...]
    flows: tuple[tuple[float, ...], ...]


@dataclass(frozen=True)
class LagrangianCompetitor:
    """Weighted oriented paths plus per-scenario sub-weights.

    ``subplans[i][p]`` is scenario ``i``'s weight on plan path ``p`` and must
    not exceed the plan weight.  Paths with non-positive plan weight are
    dropped on construction (their sub-weight columns with them)."""

    plan: tuple[tuple[Path, float], ...]
    subplans: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        keep = [k for k, (_, w) in enumerate(self.plan) if w > 0.0]
        if len(keep) != len(self.plan):
            plan = tuple(self.plan[k] for k in keep)
            subplans = tuple(tuple(row[k] for k in keep) for row in self.subplans)
            object.__setattr__(self, "plan", plan)
            object.__setattr__(self, "subplans", subplans)
        for i, row in enumerate(self.subplans):
            if len(row) != len(self.plan):
                raise ValidationError(
                    f"subplans[{i}]: expected {len(self.plan)} weights, got {len(row)}"
                )

    @property
    def n_paths(self) -> int:
        return len(self.plan)

    def total_mass(self) -> float:
        return sum(w for _, w in self.plan)


def empty_eulerian(inst: Instance) -> EulerianCompetitor:
    zero_edges = (0.0,) * inst.graph.n_edges
    return EulerianCompetitor(
        theta=zero_edges, flows=tuple(zero_edges for _ in inst.scenarios)
    )


def empty_lagrangian(inst: Instance) -> LagrangianCompetitor:
    return LagrangianCompetitor(plan=(), subplans=tuple(() for _ in inst.scenarios))


# ---------------------------------------------------------------------------
# domination order and admissibility


def preceq(
    measure: Sequence[float] | Mapping[int, float],
    boundary: BoundaryMeasure,
    tol: float = PRECEQ_TOL,
) -> bool:
    """Jordan-part domination: positive part of ``measure`` bounded by the
    boundary's target part, negative part by its source part, vertexwise
    within ``tol``."""
    if isinstance(measure, Mapping):
        items: Iterable[tuple[int, float]] = measure.items()
    else:
        items = enumerate(measure)
    for v, m in items:
        if m > boundary.plus(v) + tol:
            return False
        if -m > boundary.minus(v) + tol:
            return False
    return True


@dataclass(frozen=True)
class AdmissibilityReport:
    """Outcome of per-scenario admissibility checks.

    ``scenario_checks[i]`` maps check name to pass/fail for scenario ``i``;
    ``first_violation`` describes the first failing (scenario, check, item)
    or is None when everything passes."""

    ok: bool
    scenario_checks: tuple[dict[str, bool], ...]
    first_violation: str | None

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "ok": self.ok,
            "scenarios": [dict(c) for c in self.scenario_checks],
            "first_violation": self.first_violation,
        }


def _flow_boundary(graph: GeometricGraph, flow: Sequence[float]) -> list[float]:
    out = [0.0] * graph.n_vertices
    for e, f in zip(graph.edges, flow):
        out[e.v] += f
        out[e.u] -= f
    return out


def check_eulerian_admissible(
    inst: Instance, competitor: EulerianCompetitor
) -> AdmissibilityReport:
    """Capacity (|flow| <= theta), support (zero flow on masked-off edges)
    and boundary domination, per scenario."""
    graph = inst.graph
    if len(competitor.theta) != graph.n_edges:
        raise ValidationError(
            f"theta: expected {graph.n_edges} entries, got {len(competitor.theta)}"
        )
    if len(competitor.flows) != inst.n_scenarios:
        raise ValidationError(
            f"flows: expected {inst.n_scenarios} scenario rows, got {len(competitor.flows)}"
        )
    checks: list[dict[str, bool]] = []
    first: str | None = None
    for i, (scen, flow) in enumerate(zip(inst.scenarios, competitor.flows)):
        if len(flow) != graph.n_edges:
            raise ValidationError(
                f"flows[{i}]: expected {graph.n_edges} entries, got {len(flow)}"
            )
        capacity_ok, support_ok = True, True
        for e in range(graph.n_edges):
            if abs(flow[e]) > competitor.theta[e] + PRECEQ_TOL:
                capacity_ok = False
                if first is None:
                    first = f"scenario {i}: capacity violated on edge {e}"
                break
        if scen.edge_mask is not None:
            for e, usable in enumerate(scen.edge_mask):
                if not usable and abs(flow[e]) > PRECEQ_TOL:
                    support_ok = False
                    if first is None:
                        first = f"scenario {i}: flow on damaged edge {e}"
                    break
        boundary_ok = preceq(_flow_boundary(graph, flow), inst.boundary)
        if not boundary_ok and first is None:
            first = f"scenario {i}: boundary not dominated"
        checks.append(
            {"capacity": capacity_ok, "support": support_ok, "boundary": boundary_ok}
        )
    ok = all(all(c.values()) for c in checks)
    return AdmissibilityReport(ok=ok, scenario_checks=tuple(checks), first_violation=first)


def check_lagrangian_admissible(
    inst: Instance, competitor: LagrangianCompetitor
) -> AdmissibilityReport:
    """Sub-plan domination (sub-weight <= plan weight) and boundary
    domination of each scenario's net endpoint measure."""
    graph = inst.graph
    for path, _ in competitor.plan:
        path.validate(graph)
    if len(competitor.subplans) != inst.n_scenarios:
        raise ValidationError(
            f"subplans: expected {inst.n_scenarios} scenario rows, "
            f"got {len(competitor.subplans)}"
        )
    checks = []
    first: str | None = None
    for i, row in enumerate(competitor.subplans):
        subplan_ok = True
        for p, ((path, w_plan), w_sub) in enumerate(zip(competitor.plan, row)):
            if w_sub < -SUBPLAN_TOL or w_sub > w_plan + SUBPLAN_TOL:
                subplan_ok = False
                if first is None:
                    first = (
                        f"scenario {i}: sub-weight {w_sub!r} outside [0, plan weight] "
                        f"on path {p}"
                    )
                break
        net = [0.0] * graph.n_vertices
        for (path, _), w_sub in zip(competitor.plan, row):
            net[path.end] += w_sub
            net[path.start] -= w_sub
        boundary_ok = preceq(net, inst.boundary)
        if not boundary_ok and first is None:
            first = f"scenario {i}: endpoint measure not dominated by boundary"
        checks.append({"subplan": subplan_ok, "boundary": boundary_ok})
    ok = all(all(c.values()) for c in checks)
    return AdmissibilityReport(ok=ok, scenario_checks=tuple(checks), first_violation=first)


# ---------------------------------------------------------------------------
# instance-level validation report


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    findings: tuple[str, ...]
    source_target_distance: float
    distance_positive: bool
    phi_unbounded: bool

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "ok": self.ok,
            "findings": list(self.findings),
            "source_target_distance": self.source_target_distance,
            "distance_positive": self.distance_positive,
            "phi_unbounded": self.phi_unbounded,
        }


def validate_instance(inst: Instance) -> ValidationReport:
    """Aggregate invariant checks plus the two well-posedness hypotheses for
    route-model solves: positive source/target separation and unbounded
    cost.  Construction already enforces the hard invariants, so findings
    here are advisory."""
    findings: list[str] = []
    sources = inst.boundary.sources()
    targets = inst.boundary.targets()
    if inst.boundary.total_variation == 0.0:
        findings.append("boundary: trivial (zero total variation)")
    if sources and targets:
        dist = min(
            euclidean(inst.graph.position(u), inst.graph.position(v))
            for u in sources
            for v in targets
        )
    else:
        dist = math.inf
        findings.append("boundary: sources or targets absent")
    if dist <= 0.0:
        findings.append("boundary: a source and a target share a position")
    # subadditivity spot check on a small grid
    samples = (0.125, 0.25, 0.5, 1.0, 2.0)
    for s in samples:
        for t in samples:
            if inst.cost(s + t) > inst.cost(s) + inst.cost(t) + PRECEQ_TOL:
                findings.append(f"phi: subadditivity fails at ({s}, {t})")
    usable = False
    for scen in inst.scenarios:
        if any(x > 0.0 for x in scen.edge_efficiencies(inst.graph)):
            usable = True
            break
    if not usable:
        findings.append("scenarios: no scenario leaves any usable edge")
    return ValidationReport(
        ok=not findings,
        findings=tuple(findings),
        source_target_distance=dist,
        distance_positive=dist > 0.0,
        phi_unbounded=inst.cost.unbounded,
    )


# ---------------------------------------------------------------------------
# JSON I/O


def _require(obj: Mapping[str, Any], key: str, where: str) -> Any:
    if key not in obj:
        raise ParseError(f"{where}.{key}: missing required field")
    return obj[key]


def _check_keys(obj: Mapping[str, Any], allowed: set[str], where: str) -> None:
    for key in obj:
        if key not in allowed:
            raise ParseError(f"{where}.{key}: unknown field")


def _as_number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{where}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ParseError(f"{where}: must be finite, got {value!r}")
    return float(value)


def _as_int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{where}: expected an integer, got {value!r}")
    return value


def load_instance(text: str) -> Instance:
    """Parse instance JSON.  Inverse of :func:`serialize_instance`."""
    try:
        raw = json.loads(
            text, parse_constant=lambda c: (_ for _ in ()).throw(ParseError(f"non-finite number {c}"))
        )
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ParseError("top level: expected a JSON object")
    _check_keys(
        raw,
        {"format", "dimension", "vertices", "edges", "boundary", "phi", "scenarios", "payoff"},
        "top level",
    )
    if "format" in raw and raw["format"] != FORMAT_VERSION:
        raise ParseError(f"format: unsupported version {raw['format']!r}")

    dimension = _as_int(_require(raw, "dimension", "top level"), "dimension")
    verts_raw = _require(raw, "vertices", "top level")
    if not isinstance(verts_raw, list):
        raise ParseError("vertices: expected a list")
    vertices = []
    for k, v in enumerate(verts_raw):
        where = f"vertices[{k}]"
        if not isinstance(v, dict):
            raise ParseError(f"{where}: expected an object")
        _check_keys(v, {"id", "pos"}, where)
        pos = _require(v, "pos", where)
        if not isinstance(pos, list):
            raise ParseError(f"{where}.pos: expected a list")
        vertices.append(
            Vertex(
                id=_as_int(_require(v, "id", where), f"{where}.id"),
                pos=tuple(_as_number(c, f"{where}.pos[{j}]") for j, c in enumerate(pos)),
            )
        )

    edges_raw = _require(raw, "edges", "top level")
    if not isinstance(edges_raw, list):
        raise ParseError("edges: expected a list")
    positions = {v.id: v.pos for v in vertices}
    edges = []
    for k, e in enumerate(edges_raw):
        where = f"edges[{k}]"
        if not isinstance(e, dict):
            raise ParseError(f"{where}: expected an object")
        _check_keys(e, {"id", "u", "v", "length"}, where)
        u = _as_int(_require(e, "u", where), f"{where}.u")
        v = _as_int(_require(e, "v", where), f"{where}.v")
        if "length" in e:
            length = _as_number(e["length"], f"{where}.length")
        else:
            if u not in positions or v not in positions:
                raise ParseError(f"{where}: dangling endpoint, cannot derive length")
            length = euclidean(positions[u], positions[v])
        edges.append(
            Edge(id=_as_int(_require(e, "id", where), f"{where}.id"), u=u, v=v, length=length)
        )

    boundary_raw = _require(raw, "boundary", "top level")
    if not isinstance(boundary_raw, list):
        raise ParseError("boundary: expected a list")
    atoms: dict[int, float] = {}
    for k, b in enumerate(boundary_raw):
        where = f"boundary[{k}]"
        if not isinstance(b, dict):
            raise ParseError(f"{where}: expected an object")
        _check_keys(b, {"vertex", "mass"}, where)
        vertex = _as_int(_require(b, "vertex", where), f"{where}.vertex")
        mass = _as_number(_require(b, "mass", where), f"{where}.mass")
        if vertex in atoms:
            if atoms[vertex] * mass < 0.0:
                raise ParseError(f"{where}.vertex: vertex {vertex} carries both signs")
            raise ParseError(f"{where}.vertex: vertex {vertex} listed twice")
        atoms[vertex] = mass

    phi_raw = _require(raw, "phi", "top level")
    if not isinstance(phi_raw, dict):
        raise ParseError("phi: expected an object")
    kind = _require(phi_raw, "kind", "phi")
    if kind == "power":
        _check_keys(phi_raw, {"kind", "alpha"}, "phi")
        cost = CostSpec.power(_as_number(_require(phi_raw, "alpha", "phi"), "phi.alpha"))
    elif kind == "bounded_step":
        _check_keys(phi_raw, {"kind", "value"}, "phi")
        cost = CostSpec.bounded_step(_as_number(_require(phi_raw, "value", "phi"), "phi.value"))
    elif kind == "table":
        _check_keys(phi_raw, {"kind", "points"}, "phi")
        pts_raw = _require(phi_raw, "points", "phi")
        if not isinstance(pts_raw, list):
            raise ParseError("phi.points: expected a list")
        pts = []
        for j, p in enumerate(pts_raw):
            if not (isinstance(p, list) and len(p) == 2):
                raise ParseError(f"phi.points[{j}]: expected a [t, value] pair")
            pts.append(
                (
                    _as_number(p[0], f"phi.points[{j}][0]"),
                    _as_number(p[1], f"phi.points[{j}][1]"),
                )
            )
        cost = CostSpec.table(pts)
    else:
        raise ParseError(f"phi.kind: unknown kind {kind!r}")

    scen_raw = _require(raw, "scenarios", "top level")
    if not isinstance(scen_raw, list):
        raise ParseError("scenarios: expected a list")
    scenarios = []
    for k, s in enumerate(scen_raw):
        where = f"scenarios[{k}]"
        if not isinstance(s, dict):
            raise ParseError(f"{where}: expected an object")
        _check_keys(s, {"id", "prob", "edge_mask", "vertex_efficiency", "edge_efficiency"}, where)
        mask = None
        if s.get("edge_mask") is not None:
            mask_raw = s["edge_mask"]
            if not isinstance(mask_raw, list) or not all(isinstance(x, bool) for x in mask_raw):
                raise ParseError(f"{where}.edge_mask: expected a list of booleans")
            mask = tuple(mask_raw)
        veff = None
        if s.get("vertex_efficiency") is not None:
            veff = tuple(
                _as_number(x, f"{where}.vertex_efficiency[{j}]")
                for j, x in enumerate(s["vertex_efficiency"])
            )
        eeff = None
        if s.get("edge_efficiency") is not None:
            eeff = tuple(
                _as_number(x, f"{where}.edge_efficiency[{j}]")
                for j, x in enumerate(s["edge_efficiency"])
            )
        scenarios.append(
            DamageScenario(
                id=_as_int(_require(s, "id", where), f"{where}.id"),
                prob=_as_number(_require(s, "prob", where), f"{where}.prob"),
                edge_mask=mask,
                vertex_efficiency=veff,
                edge_efficiency=eeff,
            )
        )

    payoff_raw = _require(raw, "payoff", "top level")
    if not isinstance(payoff_raw, dict):
        raise ParseError("payoff: expected an object")
    pkind = _require(payoff_raw, "kind", "payoff")
    if pkind == "constant":
        _check_keys(payoff_raw, {"kind", "value"}, "payoff")
        payoff = PayoffSpec.constant(
            _as_number(_require(payoff_raw, "value", "payoff"), "payoff.value")
        )
    elif pkind == "table":
        _check_keys(payoff_raw, {"kind", "values"}, "payoff")
        values_raw = _require(payoff_raw, "values", "payoff")
        if not isinstance(values_raw, list):
            raise ParseError("payoff.values: expected a list of per-scenario rows")
        payoff = PayoffSpec.table(
            [
                [_as_number(x, f"payoff.values[{i}][{j}]") for j, x in enumerate(row)]
                for i, row in enumerate(values_raw)
            ]
        )
    else:
        raise ParseError(f"payoff.kind: unknown kind {pkind!r}")

    return Instance(
        graph=GeometricGraph(dimension=dimension, vertices=tuple(vertices), edges=tuple(edges)),
        boundary=BoundaryMeasure(atoms=atoms),
        cost=cost,
        scenarios=tuple(scenarios),
        payoff=payoff,
    )


def _instance_to_json_dict(inst: Instance) -> dict[str, Any]:
    phi: dict[str, Any] = {"kind": inst.cost.kind}
    if inst.cost.kind == "power":
        phi["alpha"] = inst.cost.alpha
    elif inst.cost.kind == "bounded_step":
        phi["value"] = inst.cost.value
    else:
        phi["points"] = [[t, y] for t, y in inst.cost.points]  # type: ignore[union-attr]
    scenarios = []
    for s in inst.scenarios:
        row: dict[str, Any] = {"id": s.id, "prob": s.prob}
        if s.edge_mask is not None:
            row["edge_mask"] = list(s.edge_mask)
        if s.vertex_efficiency is not None:
            row["vertex_efficiency"] = list(s.vertex_efficiency)
        if s.edge_efficiency is not None:
            row["edge_efficiency"] = list(s.edge_efficiency)
        scenarios.append(row)
    payoff: dict[str, Any] = {"kind": inst.payoff.kind}
    if inst.payoff.kind == "constant":
        payoff["value"] = inst.payoff.value
    else:
        payoff["values"] = [list(row) for row in inst.payoff.values]  # type: ignore[union-attr]
    return {
        "format": FORMAT_VERSION,
        "dimension": inst.graph.dimension,
        "vertices": [{"id": v.id, "pos": list(v.pos)} for v in inst.graph.vertices],
        "edges": [
            {"id": e.id, "u": e.u, "v": e.v, "length": e.length} for e in inst.graph.edges
        ],
        "boundary": [
            {"vertex": v, "mass": m} for v, m in sorted(inst.boundary.atoms.items())
        ],
        "phi": phi,
        "scenarios": scenarios,
        "payoff": payoff,
    }


def serialize_instance(inst: Instance) -> str:
    """Canonical instance JSON: fixed key order, shortest round-trip floats,
    trailing newline.  ``load_instance(serialize_instance(x))`` equals ``x``."""
    return json.dumps(_instance_to_json_dict(inst), indent=2) + "\n"


# ---------------------------------------------------------------------------
# competitor JSON I/O


def competitor_to_json_dict(
    comp: EulerianCompetitor | LagrangianCompetitor,
) -> dict[str, Any]:
    """Plain-dict form of a competitor.  Route competitors serialize paths
    by vertex sequence only; on multigraphs the smallest-length (then
    smallest-id) parallel edge is recovered on load."""
    if isinstance(comp, EulerianCompetitor):
        return {
            "format": FORMAT_VERSION,
            "kind": "eulerian",
            "theta": list(comp.theta),
            "flows": [list(row) for row in comp.flows],
        }
    return {
        "format": FORMAT_VERSION,
        "kind": "lagrangian",
        "plan": [
            {"vertices": list(path.vertices), "weight": w} for path, w in comp.plan
        ],
        "subplans": [list(row) for row in comp.subplans],
    }


def serialize_competitor(comp: EulerianCompetitor | LagrangianCompetitor) -> str:
    return json.dumps(competitor_to_json_dict(comp), indent=2) + "\n"


def load_competitor(
    text: str, inst: Instance
) -> EulerianCompetitor | LagrangianCompetitor:
    """Parse competitor JSON against an instance (shape checks only; run
    the admissibility checks separately)."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ParseError("top level: expected a JSON object")
    kind = _require(raw, "kind", "top level")
    if kind == "eulerian":
        _check_keys(raw, {"format", "kind", "theta", "flows"}, "top level")
        theta_raw = _require(raw, "theta", "top level")
        flows_raw = _require(raw, "flows", "top level")
        if not isinstance(theta_raw, list) or not isinstance(flows_raw, list):
            raise ParseError("theta/flows: expected lists")
        theta = tuple(_as_number(x, f"theta[{k}]") for k, x in enumerate(theta_raw))
        if len(theta) != inst.graph.n_edges:
            raise ParseError(
                f"theta: expected {inst.graph.n_edges} entries, got {len(theta)}"
            )
        if len(flows_raw) != inst.n_scenarios:
            raise ParseError(
                f"flows: expected {inst.n_scenarios} rows, got {len(flows_raw)}"
            )
        flows = []
        for i, row in enumerate(flows_raw):
            if not isinstance(row, list) or len(row) != inst.graph.n_edges:
                raise ParseError(f"flows[{i}]: expected {inst.graph.n_edges} entries")
            flows.append(
                tuple(_as_number(x, f"flows[{i}][{k}]") for k, x in enumerate(row))
            )
        return EulerianCompetitor(theta=theta, flows=tuple(flows))
    if kind == "lagrangian":
        _check_keys(raw, {"format", "kind", "plan", "subplans"}, "top level")
        plan_raw = _require(raw, "plan", "top level")
        subs_raw = _require(raw, "subplans", "top level")
        if not isinstance(plan_raw, list) or not isinstance(subs_raw, list):
            raise ParseError("plan/subplans: expected lists")
        plan = []
        for k, item in enumerate(plan_raw):
            where = f"plan[{k}]"
            if not isinstance(item, dict):
                raise ParseError(f"{where}: expected an object")
            _check_keys(item, {"vertices", "weight", "edges"}, where)
            verts_raw = _require(item, "vertices", where)
            if not isinstance(verts_raw, list):
                raise ParseError(f"{where}.vertices: expected a list")
            verts = [_as_int(v, f"{where}.vertices[{j}]") for j, v in enumerate(verts_raw)]
            if "edges" in item:
                edges = tuple(
                    _as_int(e, f"{where}.edges[{j}]") for j, e in enumerate(item["edges"])
                )
                path = Path(vertices=tuple(verts), edges=edges)
            else:
                path = Path.from_vertices(inst.graph, verts)
            path.validate(inst.graph)
            plan.append((path, _as_number(_require(item, "weight", where), f"{where}.weight")))
        if len(subs_raw) != inst.n_scenarios:
            raise ParseError(
                f"subplans: expected {inst.n_scenarios} rows, got {len(subs_raw)}"
            )
        subplans = []
        for i, row in enumerate(subs_raw):
            if not isinstance(row, list) or len(row) != len(plan):
                raise ParseError(f"subplans[{i}]: expected {len(plan)} entries")
            subplans.append(
                tuple(_as_number(x, f"subplans[{i}][{k}]") for k, x in enumerate(row))
            )
        return LagrangianCompetitor(plan=tuple(plan), subplans=tuple(subplans))
    raise ParseError(f"kind: unknown competitor kind {kind!r}")


# ---------------------------------------------------------------------------
# deterministic JSON for reports (17 significant digits)


def _dump_json(value: Any, indent: int, level: int) -> str:
    pad = " " * (indent * level)
    pad_in = " " * (indent * (level + 1))
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValidationError(f"report JSON: non-finite number {value!r}")
        return format(value, ".17g")
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = [_dump_json(x, indent, level + 1) for x in value]
        return "[\n" + ",\n".join(pad_in + s for s in items) + "\n" + pad + "]"
    if isinstance(value, Mapping):
        if not value:
            return "{}"
        items = [
            f"{json.dumps(str(k))}: {_dump_json(v, indent, level + 1)}"
            for k, v in value.items()
        ]
        return "{\n" + ",\n".join(pad_in + s for s in items) + "\n" + pad + "}"
    raise ValidationError(f"report JSON: unsupported value {value!r}")


def dumps_report(obj: Mapping[str, Any]) -> str:
    """Deterministic report JSON: insertion key order, floats with 17
    significant digits (exact double round-trip), trailing newline."""
    return _dump_json(obj, 2, 0) + "\n"
