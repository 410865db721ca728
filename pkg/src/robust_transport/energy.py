"""Energy functionals for both competitor kinds.

The objective balances a construction cost against an expected recovery
pay-off.  For a capacity competitor the cost is the phi-mass of the capacity
vector and each scenario's recovery flow earns its pay-off through the
boundary measure it induces.  For a route competitor the cost is the
phi-mass of the multiplicity landscape of the plan, and each scenario's
sub-plan earns pay-off on its surviving (efficiency-penalized) weight at
both endpoints of every route.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .model import (
    GeometricGraph,
    Instance,
    LagrangianCompetitor,
    EulerianCompetitor,
    Path,
    ValidationError,
)


@dataclass(frozen=True)
class EnergyBreakdown:
    """Value of the objective split into its two halves.

    ``payoff_per_scenario[i]`` already includes the scenario probability
    factor, so ``payoff_total`` is their plain sum and
    ``energy = phi_mass - payoff_total``."""

    phi_mass: float
    payoff_per_scenario: tuple[float, ...]

    @property
    def payoff_total(self) -> float:
        return sum(self.payoff_per_scenario)

    @property
    def energy(self) -> float:
        return self.phi_mass - self.payoff_total

    def to_json_dict(self) -> dict:
        return {
            "energy": self.energy,
            "phi_mass": self.phi_mass,
            "payoff_total": self.payoff_total,
            "payoff_per_scenario": list(self.payoff_per_scenario),
        }


# ---------------------------------------------------------------------------
# capacity model


def phi_mass_eulerian(inst: Instance, theta: Sequence[float]) -> float:
    """Construction cost sum(length_e * phi(theta_e))."""
    if len(theta) != inst.graph.n_edges:
        raise ValidationError(
            f"theta: expected {inst.graph.n_edges} entries, got {len(theta)}"
        )
    total = 0.0
    for e, t in zip(inst.graph.edges, theta):
        if t < 0.0:
            raise ValidationError(f"theta[{e.id}]: must be >= 0, got {t}")
        total += e.length * inst.cost(t)
    return total


def boundary_of_flow(graph: GeometricGraph, flow: Sequence[float]) -> tuple[float, ...]:
    """Net divergence of a signed edge flow: a unit of flow along edge
    (u, v) contributes -1 at u and +1 at v."""
    out = [0.0] * graph.n_vertices
    for e, f in zip(graph.edges, flow):
        out[e.v] += f
        out[e.u] -= f
    return tuple(out)


def scenario_payoff_eulerian(
    inst: Instance, scenario_index: int, flow: Sequence[float]
) -> float:
    """Pay-off of one recovery flow: every unit moved from u to v is
    rewarded h(i, u) + h(i, v), i.e. the pay-off density integrated against
    the total variation of the flow's boundary.  The scenario probability is
    applied here."""
    scen = inst.scenarios[scenario_index]
    net = boundary_of_flow(inst.graph, flow)
    reward = 0.0
    for v, m in enumerate(net):
        reward += inst.payoff.at(scenario_index, v) * abs(m)
    return scen.prob * reward


def eulerian_energy(inst: Instance, competitor: EulerianCompetitor) -> EnergyBreakdown:
    payoffs = tuple(
        scenario_payoff_eulerian(inst, i, flow)
        for i, flow in enumerate(competitor.flows)
    )
    return EnergyBreakdown(
        phi_mass=phi_mass_eulerian(inst, competitor.theta),
        payoff_per_scenario=payoffs,
    )


# ---------------------------------------------------------------------------
# route model


def multiplicity(plan: Sequence[tuple[Path, float]], edge_id: int) -> float:
    """Total weight of routes through an edge, counted with the number of
    traversals: a route crossing the edge twice contributes twice its
    weight."""
    total = 0.0
    for path, w in plan:
        crossings = sum(1 for e in path.edges if e == edge_id)
        if crossings:
            total += crossings * w
    return total


def phi_mass_traffic(
    inst: Instance, plan: Sequence[tuple[Path, float]]
) -> float:
    """Construction cost of a weighted route family.

    Each traversal of an edge with multiplicity m pays
    ``length * phi(m) / m`` per unit of weight, so an edge crossed by total
    weight m (counted with traversals) pays ``length * phi(m)`` overall --
    the concave economy of scale shared by everyone on the edge."""
    mult = [0.0] * inst.graph.n_edges
    for path, w in plan:
        for e in path.edges:
            mult[e] += w
    total = 0.0
    for e, m in zip(inst.graph.edges, mult):
        if m > 0.0:
            total += e.length * inst.cost(m)
    return total


def penalized_weights(
    inst: Instance,
    plan: Sequence[tuple[Path, float]],
    scenario_index: int,
    weights: Sequence[float],
) -> tuple[float, ...]:
    """Surviving weight of each route under a scenario: the sub-plan weight
    times the worst efficiency along the route (over vertices and edges)."""
    scen = inst.scenarios[scenario_index]
    veff = scen.vertex_efficiencies(inst.graph.n_vertices)
    eeff = scen.edge_efficiencies(inst.graph)
    out = []
    for (path, _), w in zip(plan, weights):
        eff = min(
            min(veff[v] for v in path.vertices),
            min(eeff[e] for e in path.edges),
        )
        out.append(w * eff)
    return tuple(out)


def scenario_payoff_lagrangian(
    inst: Instance,
    plan: Sequence[tuple[Path, float]],
    scenario_index: int,
    weights: Sequence[float],
) -> float:
    """Pay-off of one sub-plan: surviving weight of each route rewarded at
    both endpoints, times the scenario probability."""
    scen = inst.scenarios[scenario_index]
    pen = penalized_weights(inst, plan, scenario_index, weights)
    reward = 0.0
    for (path, _), pw in zip(plan, pen):
        reward += pw * (
            inst.payoff.at(scenario_index, path.start)
            + inst.payoff.at(scenario_index, path.end)
        )
    return scen.prob * reward


def lagrangian_energy(
    inst: Instance, competitor: LagrangianCompetitor
) -> EnergyBreakdown:
    payoffs = tuple(
        scenario_payoff_lagrangian(inst, competitor.plan, i, row)
        for i, row in enumerate(competitor.subplans)
    )
    return EnergyBreakdown(
        phi_mass=phi_mass_traffic(inst, competitor.plan),
        payoff_per_scenario=payoffs,
    )


def payoff_upper_bound(inst: Instance) -> float:
    """Coarse a-priori bound: no scenario can deliver more than the full
    boundary mass, each unit rewarded at most twice the largest pay-off
    density.  Used as a sanity rail by tests and the solver."""
    h_max = inst.payoff.max_value()
    tv = inst.boundary.total_variation
    return sum(s.prob for s in inst.scenarios) * h_max * tv
