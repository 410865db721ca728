"""Canonical instance families exhibiting the model's edge-case phenomena.

Four builders, each a small parametric family:

* ``non_existence``: two damage scenarios want the same corridor in
  opposite directions.  Unoriented capacity serves both at once; committing
  an orientation forces a strictly longer parallel detour, and the penalty
  never vanishes as the detour shrinks -- the oriented problem has no
  minimizer in the limit family.
* ``non_continuous``: a single scenario whose efficiency landscape has a
  sharp wall; the optimal routes hug discontinuity lines, and the value
  responds discontinuously to the wall parameter.
* ``distance``: a cascade of shrinking levels, each with combinatorially
  disjoint overlapping curves; optimal recovery concentrates distinct
  scenarios on distinct curves at the exact per-level boundary mass.
* ``limit``: a mass-divergence family: each extra scenario justifies one
  more near-duplicate route, so the optimal plan mass grows without bound
  while the energy keeps strictly decreasing.

``verify_phenomenon`` runs solver and oracle over a sweep of each family
and returns pass/fail claims with the measured series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Any, Callable

from .model import (
    BoundaryMeasure,
    CostSpec,
    DamageScenario,
    Edge,
    GeometricGraph,
    Instance,
    PayoffSpec,
    ValidationError,
    Vertex,
    euclidean,
)
from .solver import (
    SolveParams,
    SolveReport,
    brute_force_eulerian,
    brute_force_lagrangian,
    solve_eulerian,
    solve_lagrangian,
)


@dataclass(frozen=True)
class ExampleParams:
    """Shared knob set for the example families; each builder reads the
    fields it needs and ignores the rest."""

    levels: int = 3        # cascade depth of the distance family
    epsilon: float = 0.125  # wall offset of the non_continuous family
    beta: float = 1.0       # wall profile exponent
    loops: int = 4          # number of routes in the limit family
    payoff: float = 10.0    # constant reward density h
    detour: float = 0.25    # extra length of the parallel detour edge
    alpha: float = 0.5      # exponent of the power construction cost

    def __post_init__(self) -> None:
        if not (1 <= self.levels <= 8):
            raise ValidationError(f"levels: must lie in 1..8, got {self.levels}")
        if not (0.0 < self.epsilon < 1.0 / 6.0):
            raise ValidationError(
                f"epsilon: must lie in (0, 1/6), got {self.epsilon}"
            )
        if self.beta <= 0.0:
            raise ValidationError(f"beta: must be > 0, got {self.beta}")
        if not (1 <= self.loops <= 20):
            raise ValidationError(f"loops: must lie in 1..20, got {self.loops}")
        if self.payoff < 0.0:
            raise ValidationError(f"payoff: must be >= 0, got {self.payoff}")
        if self.detour <= 0.0:
            raise ValidationError(f"detour: must be > 0, got {self.detour}")
        if not (0.0 < self.alpha < 1.0):
            raise ValidationError(f"alpha: must lie in (0, 1), got {self.alpha}")


# ---------------------------------------------------------------------------
# non_existence: opposed corridors and the cost of committing a direction


def non_existence(params: ExampleParams | None = None) -> Instance:
    """Two scenarios ship opposite ways through a shared corridor.

    Scenario 0 can only serve the far-left source toward the far-right
    target, scenario 1 the reverse pair, and both must cross the central
    corridor, which exists twice: a straight edge and a parallel detour
    longer by ``params.detour``.  With unoriented capacity one straight
    corridor serves both; with per-edge orientation one scenario is forced
    onto the detour, and the extra cost stays bounded away from zero while
    the detour parameter shrinks."""
    p = params or ExampleParams()
    pos = [
        (-3.0, 0.0),   # 0 source
        (-2.0, 0.0),   # 1 target
        (2.0, 0.0),    # 2 source
        (3.0, 0.0),    # 3 target
        (-2.0, -1.0),  # 4
        (-1.0, -1.0),  # 5
        (1.0, -1.0),   # 6
        (2.0, -1.0),   # 7
    ]
    vertices = tuple(Vertex(id=i, pos=q) for i, q in enumerate(pos))
    hops = [
        (0, 4, None),            # e0
        (4, 5, None),            # e1
        (1, 5, None),            # e2
        (5, 6, None),            # e3 straight corridor
        (5, 6, 2.0 + p.detour),  # e4 parallel detour
        (6, 7, None),            # e5
        (2, 6, None),            # e6
        (7, 3, None),            # e7
    ]
    edges = tuple(
        Edge(id=k, u=u, v=v, length=length if length else euclidean(pos[u], pos[v]))
        for k, (u, v, length) in enumerate(hops)
    )
    n_e = len(edges)

    def mask(blocked: set[int]) -> tuple[bool, ...]:
        return tuple(e not in blocked for e in range(n_e))

    scenarios = (
        DamageScenario(id=0, prob=0.5, edge_mask=mask({2, 6})),
        DamageScenario(id=1, prob=0.5, edge_mask=mask({0, 7})),
    )
    return Instance(
        graph=GeometricGraph(dimension=2, vertices=vertices, edges=edges),
        boundary=BoundaryMeasure(atoms={0: -0.5, 1: 0.5, 2: -0.5, 3: 0.5}),
        cost=CostSpec.power(p.alpha),
        scenarios=scenarios,
        payoff=PayoffSpec.constant(p.payoff),
    )


# ---------------------------------------------------------------------------
# non_continuous: routes hugging an efficiency wall


def wall_profile(x: float, y: float, epsilon: float, beta: float) -> float:
    """Efficiency landscape of the non_continuous family.

    Priority order: full efficiency exactly on the two steep diagonals;
    ``y ** beta`` inside the central band; one half on the top line;
    full efficiency under the tent spanned by the diagonals; zero
    elsewhere.  The order matters where regions meet and is part of the
    construction."""
    if x <= 1.0 / 3.0 + 1e-12 and abs(y - 3.0 * x) <= 1e-9:
        return 1.0
    if x >= 2.0 / 3.0 - 1e-12 and abs(y - (3.0 - 3.0 * x)) <= 1e-9:
        return 1.0
    if 3.0 / 8.0 - 1e-12 <= x <= 5.0 / 8.0 + 1e-12:
        return max(y, 0.0) ** beta
    if abs(y - 1.0) <= 1e-12:
        return 0.5
    if y / 3.0 - 1e-12 <= x <= 1.0 - y / 3.0 + 1e-12 and 0.0 <= y <= 1.0:
        return 1.0
    return 0.0


def _non_continuous_with_meta(p: ExampleParams) -> tuple[Instance, dict[str, Any]]:
    eps, beta = p.epsilon, p.beta
    pos = [
        (0.0, 0.0),                          # 0 target
        (1.0, 0.0),                          # 1 source
        (0.0, 1.0),                          # 2 source
        (1.0, 1.0),                          # 3 target
        (1.0 / 3.0 - eps, 1.0 - 3.0 * eps),  # 4
        (3.0 / 8.0, 1.0 - 3.0 * eps),        # 5
        (5.0 / 8.0, 1.0 - 3.0 * eps),        # 6
        (2.0 / 3.0 + eps, 1.0 - 3.0 * eps),  # 7
        (1.0 / 6.0, 1.0),                    # 8
        (3.0 / 8.0, 1.0),                    # 9
        (5.0 / 8.0, 1.0),                    # 10
        (5.0 / 6.0, 1.0),                    # 11
    ]
    vertices = tuple(Vertex(id=i, pos=q) for i, q in enumerate(pos))
    hops = [
        (0, 4), (4, 5), (5, 6), (6, 7), (7, 1),      # corridor chain
        (2, 8), (8, 9), (9, 10), (10, 11), (11, 3),  # top chain
        (5, 9), (6, 10),                             # wall connectors
    ]
    edges = tuple(
        Edge(id=k, u=u, v=v, length=euclidean(pos[u], pos[v]))
        for k, (u, v) in enumerate(hops)
    )
    veff = tuple(wall_profile(q[0], q[1], eps, beta) for q in pos)
    eeff = []
    for e in edges:
        mid = (
            (pos[e.u][0] + pos[e.v][0]) / 2.0,
            (pos[e.u][1] + pos[e.v][1]) / 2.0,
        )
        eeff.append(
            min(veff[e.u], veff[e.v], wall_profile(mid[0], mid[1], eps, beta))
        )
    inst = Instance(
        graph=GeometricGraph(dimension=2, vertices=vertices, edges=edges),
        boundary=BoundaryMeasure(atoms={0: 0.5, 1: -0.5, 2: -0.5, 3: 0.5}),
        cost=CostSpec.power(p.alpha),
        scenarios=(
            DamageScenario(
                id=0, prob=1.0, vertex_efficiency=veff, edge_efficiency=tuple(eeff)
            ),
        ),
        payoff=PayoffSpec.constant(p.payoff),
    )
    meta = {
        "corridor_pair": (1, 0),
        "top_pair": (2, 3),
        "corridor_efficiency": (1.0 - 3.0 * eps) ** beta,
        "top_efficiency": 0.5,
    }
    return inst, meta


def non_continuous(params: ExampleParams | None = None) -> Instance:
    """One scenario, an efficiency wall, and two designated optimal routes:
    a corridor skimming just under the wall (efficiency
    ``(1 - 3 eps) ** beta``) and a top route along the half-efficient
    ceiling.  Decoy connectors through the wall are strictly worse, so the
    optimum jumps rather than interpolates as ``epsilon`` moves."""
    return _non_continuous_with_meta(params or ExampleParams())[0]


# ---------------------------------------------------------------------------
# distance: cascade of levels with combinatorially disjoint curves


def _distance_with_meta(p: ExampleParams) -> tuple[Instance, dict[str, Any]]:
    vertices: list[Vertex] = []
    edges: list[Edge] = []
    atoms: dict[int, float] = {}
    curves: list[dict[str, Any]] = []

    def add_vertex(q: tuple[float, float]) -> int:
        vertices.append(Vertex(id=len(vertices), pos=q))
        return len(vertices) - 1

    for j in range(1, p.levels + 1):
        base = 2.0 ** (-3 * j)
        x_id = add_vertex((base, 0.0))
        y_id = add_vertex((base, base))
        atoms[x_id] = -(2.0 ** (-j))
        atoms[y_id] = 2.0 ** (-j)
        n_curves = 2 ** (j - 1)
        for k in range(n_curves):
            frac = (k + 1) / (n_curves + 1)
            len_lower = base * frac
            len_upper = base - len_lower  # exact complement
            m_id = add_vertex((base, len_lower))
            e_lo = len(edges)
            edges.append(Edge(id=e_lo, u=x_id, v=m_id, length=len_lower))
            e_hi = len(edges)
            edges.append(Edge(id=e_hi, u=m_id, v=y_id, length=len_upper))
            curves.append(
                {
                    "level": j,
                    "verts": (x_id, m_id, y_id),
                    "edges": (e_lo, e_hi),
                    "mass": 2.0 ** (-j),
                }
            )

    n_v, n_e = len(vertices), len(edges)
    scenarios: list[DamageScenario] = []
    for idx, curve in enumerate(curves):
        j = curve["level"]
        veff = [0.0] * n_v
        for v in curve["verts"]:
            veff[v] = 1.0
        eeff = [0.0] * n_e
        for e in curve["edges"]:
            eeff[e] = 1.0
        scenarios.append(
            DamageScenario(
                id=idx,
                prob=2.0 ** (1 - 2 * j),
                edge_mask=tuple(x > 0.0 for x in eeff),
                vertex_efficiency=tuple(veff),
                edge_efficiency=tuple(eeff),
            )
        )
    scenarios.append(
        DamageScenario(
            id=len(curves),
            prob=2.0 ** (-p.levels),
            edge_mask=(False,) * n_e,
            vertex_efficiency=(0.0,) * n_v,
            edge_efficiency=(0.0,) * n_e,
        )
    )
    inst = Instance(
        graph=GeometricGraph(dimension=2, vertices=tuple(vertices), edges=tuple(edges)),
        boundary=BoundaryMeasure(atoms=atoms),
        cost=CostSpec.power(p.alpha),
        scenarios=tuple(scenarios),
        payoff=PayoffSpec.constant(1.0),
    )
    return inst, {"curves": curves}


def distance(params: ExampleParams | None = None) -> Instance:
    """Levels j = 1..levels, level j a vertical segment of length 2^-3j
    carrying 2^(j-1) curves that overlap geometrically but are
    combinatorially disjoint (distinct interior vertices on the same
    segment).  One scenario per curve survives exactly on it, weighted so
    each level contributes probability 2^-j; a final blackout scenario
    absorbs the remaining 2^-levels.  The boundary moves mass 2^-j across
    level j, and the reward density is the constant 1."""
    return _distance_with_meta(params or ExampleParams())[0]


# ---------------------------------------------------------------------------
# limit: unbounded optimal mass under a bounded construction cost


def _limit_with_meta(p: ExampleParams) -> tuple[Instance, dict[str, Any]]:
    vertices: list[Vertex] = [Vertex(id=0, pos=(0.0, 0.0)), Vertex(id=1, pos=(1.0, 0.0))]
    edges: list[Edge] = []
    curves: list[dict[str, Any]] = []

    def add_vertex(q: tuple[float, float]) -> int:
        vertices.append(Vertex(id=len(vertices), pos=q))
        return len(vertices) - 1

    def add_chain(points: list[tuple[float, float]]) -> dict[str, Any]:
        ids = [0] + [add_vertex(q) for q in points] + [1]
        e_ids = []
        for a, b in zip(ids, ids[1:]):
            e_ids.append(len(edges))
            edges.append(
                Edge(
                    id=len(edges), u=a, v=b,
                    length=euclidean(vertices[a].pos, vertices[b].pos),
                )
            )
        return {"verts": tuple(ids), "edges": tuple(e_ids)}

    # route 1: the straight segment, subdivided at its midpoint
    curves.append(add_chain([(0.5, 0.0)]))
    # routes i >= 2: straight runs with a polyline semicircle bump of
    # radius 2^-i replacing the central stretch
    arc_segments = 8
    for i in range(2, p.loops + 1):
        r = 2.0 ** (-i)
        points: list[tuple[float, float]] = [(0.5 - r, 0.0)]
        for t in range(1, arc_segments):
            angle = math.pi * (1.0 - t / arc_segments)
            points.append((0.5 + r * math.cos(angle), r * math.sin(angle)))
        points.append((0.5 + r, 0.0))
        curves.append(add_chain(points))

    n_v, n_e = len(vertices), len(edges)
    scenarios: list[DamageScenario] = []
    for idx, curve in enumerate(curves):
        veff = [0.0] * n_v
        for v in curve["verts"]:
            veff[v] = 1.0
        eeff = [0.0] * n_e
        for e in curve["edges"]:
            eeff[e] = 1.0
        scenarios.append(
            DamageScenario(
                id=idx,
                prob=2.0 ** (-(idx + 1)),
                edge_mask=tuple(x > 0.0 for x in eeff),
                vertex_efficiency=tuple(veff),
                edge_efficiency=tuple(eeff),
            )
        )
    scenarios.append(
        DamageScenario(
            id=len(curves),
            prob=2.0 ** (-p.loops),
            edge_mask=(False,) * n_e,
            vertex_efficiency=(0.0,) * n_v,
            edge_efficiency=(0.0,) * n_e,
        )
    )
    inst = Instance(
        graph=GeometricGraph(dimension=2, vertices=tuple(vertices), edges=tuple(edges)),
        boundary=BoundaryMeasure(atoms={0: -1.0, 1: 1.0}),
        cost=CostSpec.bounded_step(1.0),
        scenarios=tuple(scenarios),
        payoff=PayoffSpec.constant(p.payoff),
    )
    return inst, {"curves": curves}


def limit(params: ExampleParams | None = None) -> Instance:
    """One unit of boundary mass, a bounded (flat) construction cost, and
    ``loops`` nearly identical routes: the straight segment and ever
    flatter semicircular bumps, each usable in exactly one scenario.  Every
    extra route is worth building for its scenario alone, so the optimal
    plan carries total mass equal to the number of routes -- unbounded in
    the family -- while the energy strictly decreases."""
    return _limit_with_meta(params or ExampleParams())[0]


EXAMPLES: dict[str, Callable[[ExampleParams | None], Instance]] = {
    "non_existence": non_existence,
    "non_continuous": non_continuous,
    "distance": distance,
    "limit": limit,
}


def build_example(name: str, params: ExampleParams | None = None) -> Instance:
    if name not in EXAMPLES:
        raise ValidationError(
            f"example: unknown name {name!r}; choose from {sorted(EXAMPLES)}"
        )
    return EXAMPLES[name](params)


# ---------------------------------------------------------------------------
# phenomenon verification


@dataclass(frozen=True)
class Claim:
    name: str
    ok: bool
    details: dict[str, Any]

    def to_json_dict(self) -> dict[str, Any]:
        return {"name": self.name, "ok": self.ok, "details": dict(self.details)}


@dataclass(frozen=True)
class PhenomenonReport:
    example: str
    ok: bool
    claims: tuple[Claim, ...]
    series: dict[str, tuple[float, ...]]

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "format": 1,
            "example": self.example,
            "ok": self.ok,
            "claims": [c.to_json_dict() for c in self.claims],
            "series": {k: list(v) for k, v in self.series.items()},
        }


def _plan_mass(report: SolveReport) -> float:
    comp = report.competitor
    return sum(w for _, w in comp.plan)  # type: ignore[union-attr]


def _verify_non_existence(p: ExampleParams, seed: int) -> PhenomenonReport:
    detours = (0.5, 0.25, 0.125)
    # Serving only one of the two opposed pairs costs a single short corridor
    # and earns half the reward; that competitor ignores the detour entirely
    # and beats the two-corridor build whenever the reward density is below
    # sqrt(2)*(2*sqrt(2)+4+detour) ~ 10.4.  The detour sweep therefore pins
    # the reward above that threshold so the quantity it tracks (cost of the
    # second corridor) is what the optimum actually pays for; the headline
    # orientation-gap claim below still uses the caller's parameters.
    sweep = replace(p, payoff=max(p.payoff, 12.0))
    oracle_u, oracle_o, solver_u, solver_o = [], [], [], []
    claims: list[Claim] = []
    sp = SolveParams(restarts=4, delta=0.5, seed=seed)
    sp_o = SolveParams(restarts=4, delta=0.5, seed=seed, oriented=True)
    base = non_existence(p)
    base_u = brute_force_eulerian(base, delta=0.5, oriented=False)
    base_o = brute_force_eulerian(base, delta=0.5, oriented=True)
    claims.append(
        Claim(
            name="orientation penalty exceeds 0.5 at the given parameters",
            ok=base_o.energy - base_u.energy >= 0.5,
            details={"unoriented": base_u.energy, "oriented": base_o.energy},
        )
    )
    for d in detours:
        inst = non_existence(replace(sweep, detour=d))
        ou = brute_force_eulerian(inst, delta=0.5, oriented=False)
        oo = brute_force_eulerian(inst, delta=0.5, oriented=True)
        su = solve_eulerian(inst, sp)
        so = solve_eulerian(inst, sp_o)
        oracle_u.append(ou.energy)
        oracle_o.append(oo.energy)
        solver_u.append(su.energy.energy)
        solver_o.append(so.energy.energy)
        tag = format(d, "g")
        claims.append(
            Claim(
                name=f"solver matches oracle (unoriented) at detour={tag}",
                ok=abs(su.energy.energy - ou.energy) <= 1e-6,
                details={"solver": su.energy.energy, "oracle": ou.energy},
            )
        )
        claims.append(
            Claim(
                name=f"solver matches oracle (oriented) at detour={tag}",
                ok=abs(so.energy.energy - oo.energy) <= 1e-6,
                details={"solver": so.energy.energy, "oracle": oo.energy},
            )
        )
    claims.append(
        Claim(
            name="oriented value strictly decreases as the detour shrinks",
            ok=all(a > b + 1e-12 for a, b in zip(oracle_o, oracle_o[1:])),
            details={"values": list(oracle_o)},
        )
    )
    claims.append(
        Claim(
            name="unoriented value does not depend on the detour",
            ok=max(oracle_u) - min(oracle_u) <= 1e-9,
            details={"values": list(oracle_u)},
        )
    )
    return PhenomenonReport(
        example="non_existence",
        ok=all(c.ok for c in claims),
        claims=tuple(claims),
        series={
            "detour": tuple(detours),
            "oracle_unoriented": tuple(oracle_u),
            "oracle_oriented": tuple(oracle_o),
            "solver_unoriented": tuple(solver_u),
            "solver_oriented": tuple(solver_o),
        },
    )


def _verify_non_continuous(p: ExampleParams, seed: int) -> PhenomenonReport:
    eps_values = (p.epsilon, p.epsilon / 2.0)
    claims: list[Claim] = []
    energies, corr_eff, top_eff = [], [], []
    for eps in eps_values:
        inst, meta = _non_continuous_with_meta(replace(p, epsilon=eps))
        rep = solve_lagrangian(inst, SolveParams(restarts=4, delta=0.125, seed=seed))
        comp = rep.competitor
        scen = inst.scenarios[0]
        veff = scen.vertex_efficiencies(inst.graph.n_vertices)
        eeff = scen.edge_efficiencies(inst.graph)
        groups: dict[tuple[int, int], list[tuple[float, float]]] = {}
        for (path, w), w_sub in zip(comp.plan, comp.subplans[0]):  # type: ignore[union-attr]
            if w <= 1e-9:
                continue
            eff = min(
                min(veff[v] for v in path.vertices),
                min(eeff[e] for e in path.edges),
            )
            groups.setdefault((path.start, path.end), []).append((w_sub, eff))
        tag = format(eps, "g")
        for label, pair, expect in (
            ("corridor", meta["corridor_pair"], (1.0 - 3.0 * eps) ** p.beta),
            ("top", meta["top_pair"], 0.5),
        ):
            items = groups.get(pair, [])
            mass = sum(w for w, _ in items)
            effs = sorted({eff for _, eff in items})
            eff_ok = len(effs) == 1 and abs(effs[0] - expect) <= 1e-6
            claims.append(
                Claim(
                    name=f"{label} route at efficiency {expect:.6f} (eps={tag})",
                    ok=eff_ok and abs(mass - 0.5) <= 1e-9,
                    details={"mass": mass, "efficiencies": effs, "expected": expect},
                )
            )
            if label == "corridor":
                corr_eff.append(effs[0] if effs else math.nan)
            else:
                top_eff.append(effs[0] if effs else math.nan)
        extra = set(groups) - {meta["corridor_pair"], meta["top_pair"]}
        claims.append(
            Claim(
                name=f"no mass on decoy routes (eps={tag})",
                ok=not extra,
                details={"extra_pairs": sorted(extra)},
            )
        )
        energies.append(rep.energy.energy)
    return PhenomenonReport(
        example="non_continuous",
        ok=all(c.ok for c in claims),
        claims=tuple(claims),
        series={
            "epsilon": tuple(eps_values),
            "energy": tuple(energies),
            "corridor_efficiency": tuple(corr_eff),
            "top_efficiency": tuple(top_eff),
        },
    )


def _verify_distance(p: ExampleParams, seed: int) -> PhenomenonReport:
    claims: list[Claim] = []
    energies, masses = [], []
    for depth in range(1, p.levels + 1):
        inst, meta = _distance_with_meta(replace(p, levels=depth))
        delta = 2.0 ** (-depth)
        rep = solve_lagrangian(inst, SolveParams(restarts=4, delta=delta, seed=seed))
        oracle = brute_force_lagrangian(inst, delta=delta)
        comp = rep.competitor
        per_scenario_ok = True
        for idx, curve in enumerate(meta["curves"]):
            delivered = sum(comp.subplans[idx])  # type: ignore[union-attr]
            if delivered != curve["mass"]:
                per_scenario_ok = False
        mass = _plan_mass(rep)
        claims.append(
            Claim(
                name=f"each scenario ships its exact level mass (levels={depth})",
                ok=per_scenario_ok,
                details={"curves": len(meta["curves"])},
            )
        )
        claims.append(
            Claim(
                name=f"total plan mass equals levels/2 exactly (levels={depth})",
                ok=mass == depth / 2.0,
                details={"mass": mass, "expected": depth / 2.0},
            )
        )
        claims.append(
            Claim(
                name=f"solver matches oracle (levels={depth})",
                ok=abs(rep.energy.energy - oracle.energy) <= 1e-6,
                details={"solver": rep.energy.energy, "oracle": oracle.energy},
            )
        )
        claims.append(
            Claim(
                name=f"energy is negative (levels={depth})",
                ok=rep.energy.energy < 0.0,
                details={"energy": rep.energy.energy},
            )
        )
        energies.append(rep.energy.energy)
        masses.append(mass)
    claims.append(
        Claim(
            name="energy strictly decreases with depth",
            ok=all(a > b + 1e-12 for a, b in zip(energies, energies[1:])),
            details={"values": list(energies)},
        )
    )
    return PhenomenonReport(
        example="distance",
        ok=all(c.ok for c in claims),
        claims=tuple(claims),
        series={
            "levels": tuple(float(j) for j in range(1, p.levels + 1)),
            "energy": tuple(energies),
            "plan_mass": tuple(masses),
        },
    )


def _verify_limit(p: ExampleParams, seed: int) -> PhenomenonReport:
    claims: list[Claim] = []
    energies, masses = [], []
    for loops in range(1, p.loops + 1):
        inst, _meta = _limit_with_meta(replace(p, loops=loops))
        rep = solve_lagrangian(inst, SolveParams(restarts=4, delta=1.0, seed=seed))
        mass = _plan_mass(rep)
        claims.append(
            Claim(
                name=f"plan mass equals the route count (loops={loops})",
                ok=mass == float(loops),
                details={"mass": mass},
            )
        )
        if loops <= 3:
            oracle = brute_force_lagrangian(inst, delta=1.0)
            claims.append(
                Claim(
                    name=f"solver matches oracle (loops={loops})",
                    ok=abs(rep.energy.energy - oracle.energy) <= 1e-6,
                    details={"solver": rep.energy.energy, "oracle": oracle.energy},
                )
            )
        energies.append(rep.energy.energy)
        masses.append(mass)
    claims.append(
        Claim(
            name="energy strictly decreases while mass grows",
            ok=all(a > b + 1e-12 for a, b in zip(energies, energies[1:])),
            details={"values": list(energies)},
        )
    )
    return PhenomenonReport(
        example="limit",
        ok=all(c.ok for c in claims),
        claims=tuple(claims),
        series={
            "loops": tuple(float(k) for k in range(1, p.loops + 1)),
            "energy": tuple(energies),
            "plan_mass": tuple(masses),
        },
    )


_VERIFIERS = {
    "non_existence": _verify_non_existence,
    "non_continuous": _verify_non_continuous,
    "distance": _verify_distance,
    "limit": _verify_limit,
}


def verify_phenomenon(
    name: str, params: ExampleParams | None = None, seed: int = 0
) -> PhenomenonReport:
    """Check the defining claims of one example family with solver and
    oracle sweeps; returns per-claim pass/fail plus the measured series."""
    if name not in _VERIFIERS:
        raise ValidationError(
            f"example: unknown name {name!r}; choose from {sorted(_VERIFIERS)}"
        )
    return _VERIFIERS[name](params or ExampleParams(), seed)
