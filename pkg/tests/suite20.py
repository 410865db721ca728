"""Twenty hand-built instances small enough for the exhaustive oracles.

Every instance keeps at most 8 edges and 2 scenarios, and all boundary
masses are dyadic so a mass quantum of 1/8 hits every optimum exactly.
The suite deliberately mixes textures: parallel edges, cycles, masks,
fractional efficiencies, table costs and rewards, unbalanced boundaries,
and instances whose optimum is the empty network.
"""

from __future__ import annotations

from robust_transport import (
    BoundaryMeasure,
    CostSpec,
    DamageScenario,
    Edge,
    GeometricGraph,
    Instance,
    PayoffSpec,
    Vertex,
)


def _graph(pos, hops):
    vertices = tuple(Vertex(id=i, pos=tuple(map(float, p))) for i, p in enumerate(pos))
    edges = []
    for k, hop in enumerate(hops):
        u, v = hop[0], hop[1]
        if len(hop) == 3 and hop[2] is not None:
            length = float(hop[2])
        else:
            length = sum((a - b) ** 2 for a, b in zip(pos[u], pos[v])) ** 0.5
        edges.append(Edge(id=k, u=u, v=v, length=length))
    return GeometricGraph(dimension=2, vertices=vertices, edges=tuple(edges))


def _mask(n_edges, blocked):
    return tuple(e not in blocked for e in range(n_edges))


def _plain(n_edges):
    return (DamageScenario(id=0, prob=1.0, edge_mask=_mask(n_edges, set())),)


def single_edge():
    """One profitable edge; the smallest nontrivial optimum."""
    g = _graph([(0, 0), (1, 0)], [(0, 1)])
    return Instance(
        graph=g,
        boundary=BoundaryMeasure(atoms={0: -0.5, 1: 0.5}),
        cost=CostSpec.power(0.5),
        scenarios=_plain(1),
        payoff=PayoffSpec.constant(2.0),
    )


def two_hop_line():
    """A through vertex that carries flow but no boundary mass."""
    g = _graph([(0, 0), (1, 0), (2, 0)], [(0, 1), (1, 2)])
    return Instance(
        graph=g,
        boundary=BoundaryMeasure(atoms={0: -0.5, 2: 0.5}),
        cost=CostSpec.power(0.5),
        scenarios=_plain(2),
        payoff=PayoffSpec.constant(3.0),
    )


def parallel_cheap_dear():
    """Two parallel edges; everything should consolidate onto the short one."""
    g = _graph([(0, 0), (1, 0)], [(0, 1, 1.0), (0, 1, 1.5)])
    return Instance(
        graph=g,
        boundary=BoundaryMeasure(atoms={0: -1.0, 1: 1.0}),
        cost=CostSpec.power(0.5),
        scenarios=_plain(2),
        payoff=PayoffSpec.constant(2.0),
    )


def diamond_routes():
    """Two routes of different lengths between the same pair."""
    g = _graph(
        [(0, 0), (1, 1), (1, -1), (2, 0)],
        [(0, 1), (1, 3), (0, 2, 1.25), (2, 3, 1.25)],
    )
    return Instance(
        graph=g,
        boundary=BoundaryMeasure(atoms={0: -0.5, 3: 0.5}),
        cost=CostSpec.power(0.5),
        scenarios=_plain(4),
        payoff=PayoffSpec.constant(4.0),
    )


def diamond_mask_split():
    """Each scenario kills one branch of the diamond."""
    g = _graph(
        [(0, 0), (1, 1), (1, -1), (2, 0)],
        [(0, 1), (1, 3), (0, 2), (2, 3)],
    )
    return Instance(
        graph=g,
        boundary=BoundaryMeasure(atoms={0: -0.5, 3: 0.5}),
        cost=CostSpec.power(0.5),
        scenarios=(
            DamageScenario(id=0, prob=0.5, edge_mask=_mask(4, {2, 3})),
            DamageScenario(id=1, prob=0.5, edge_mask=_mask(4, {0, 1})),
        ),
        payoff=PayoffSpec.constant(5.0),
    )


def opposed_corridor():
    """Two pairs shipping opposite ways through one shared middle edge."""
    g = _graph(
        [(0, 0), (1, 0), (2, 0), (3, 0)],
        [(0, 1), (1, 2), (2, 3)],
    )
    return Instance(
        graph=g,
        boundary=BoundaryMeasure(atoms={0: -0.25, 3: 0.25, 2: -0.25, 1: 0.25}),
        cost=CostSpec.power(0.5),
        scenarios=(
            DamageScenario(id=0, prob=0.5, edge_mask=_mask(3, set())),
            DamageScenario(id=1, prob=0.5, edge_mask=_mask(3, set())),
        ),
        payoff=PayoffSpec.constant(5.0),
    )


def unprofitable():
    """Reward too small to pay for any construction; optimum is empty."""
    g = _graph([(0, 0), (4, 0)], [(0, 1)])
    return Instance(
        graph=g,
        boundary=BoundaryMeasure(atoms={0: -0.5, 1: 0.5}),
        cost=CostSpec.power(0.5),
        scenarios=_plain(1),
        payoff=PayoffSpec.constant(0.25),
    )


def partial_profit():
    """Two pairs, only the short one worth serving."""
    g = _graph(
        [(0, 0), (1, 0), (0, 3), (1, 3)],
        [(0, 1), (2, 3), (0, 2)],
    )
    return Instance(
        graph=g,
        boundary=BoundaryMeasure(atoms={0: -0.25, 1: 0.25, 2: -0.25, 3: 0.25}),
        cost=CostSpec.power(0.5),
        scenarios=(
            DamageScenario(id=0, prob=1.0, edge_mask=_mask(3, {2})),
        ),
        payoff=PayoffSpec.constant(2.0),
    )


def table_cost_steps():
    """Piecewise-linear cost with a sharp initial rise."""
    g = _graph([(0, 0), (1, 0), (2, 0)], [(0, 1), (1, 2)])
    return Instance(
        graph=g,
        boundary=BoundaryMeasure(atoms={0: -0.75, 2: 0.75}),
        cost=CostSpec.table([(0.0, 0.0), (0.25, 0.5), (1.0, 0.9)]),
        scenarios=_plain(2),
        payoff=PayoffSpec.constant(2.0),
    )


def flat_cost():
    """Bounded step cost: price depends on support, not on load."""
    g = _graph(
        [(0, 0), (1, 1), (1, -1), (2, 0)],
        [(0, 1), (1, 3), (0, 2), (2, 3)],
    )
    return Instance(
        graph=g,
        boundary=BoundaryMeasure(atoms={0: -1.0, 3: 1.0}),
        cost=CostSpec.bounded_step(1.0),
        scenarios=_plain(4),
        payoff=PayoffSpec.constant(3.0),
    )


def reward_one_target():
    """Table reward pays at a single target vertex only."""
    g = _graph(
        [(0, 0), (1, 0), (1, 1)],
        [(0, 1), (0, 2)],
    )
    return Instance(
        graph=g,
        boundary=BoundaryMeasure(atoms={0: -0.5, 1: 0.25, 2: 0.25}),
        cost=CostSpec.power(0.5),
        scenarios=_plain(2),
        payoff=PayoffSpec.table([[3.0, 3.0, 0.0]]),
    )


def lopsided_probs():
    """Unequal scenario weights steer the build toward the likely damage."""
    g = _graph(
        [(0, 0), (1, 1), (1, -1), (2, 0)],
        [(0, 1), (1, 3), (0, 2), (2, 3)],
    )
    return Instance(
        graph=g,
        boundary=BoundaryMeasure(atoms={0: -0.5, 3: 0.5}),
        cost=CostSpec.power(0.5),
        scenarios=(
            DamageScenario(id=0, prob=0.75, edge_mask=_mask(4, {2, 3})),
            DamageScenario(id=1, prob=0.25, edge_mask=_mask(4, {0, 1})),
        ),
        payoff=PayoffSpec.constant(3.0),
    )


def two_sources():
    """Star with two sources feeding one target."""
    g = _graph(
        [(0, 0), (0, 2), (1, 1), (2, 1)],
        [(0, 2), (1, 2), (2, 3)],
    )
    return Instance(
        graph=g,
        boundary=BoundaryMeasure(atoms={0: -0.25, 1: -0.25, 3: 0.5}),
        cost=CostSpec.power(0.5),
        scenarios=_plain(3),
        payoff=PayoffSpec.constant(3.0),
    )


def two_targets():
    """One source splitting toward two targets."""
    g = _graph(
        [(0, 0), (1, 0), (2, 1), (2, -1)],
        [(0, 1), (1, 2), (1, 3)],
    )
    return Instance(
        graph=g,
        boundary=BoundaryMeasure(atoms={0: -0.5, 2: 0.25, 3: 0.25}),
        cost=CostSpec.power(0.5),
        scenarios=_plain(3),
        payoff=PayoffSpec.constant(3.0),
    )


def dead_scenario():
    """Second scenario destroys everything; only the first can earn."""
    g = _graph([(0, 0), (1, 0)], [(0, 1)])
    return Instance(
        graph=g,
        boundary=BoundaryMeasure(atoms={0: -0.5, 1: 0.5}),
        cost=CostSpec.power(0.5),
        scenarios=(
            DamageScenario(id=0, prob=0.5, edge_mask=_mask(1, set())),
            DamageScenario(id=1, prob=0.5, edge_mask=_mask(1, {0})),
        ),
        payoff=PayoffSpec.constant(3.0),
    )


def efficiency_wall():
    """Fractional vertex efficiency halves what the long route delivers."""
    g = _graph(
        [(0, 0), (1, 1), (1, -1), (2, 0)],
        [(0, 1), (1, 3), (0, 2, 1.25), (2, 3, 1.25)],
    )
    return Instance(
        graph=g,
        boundary=BoundaryMeasure(atoms={0: -0.5, 3: 0.5}),
        cost=CostSpec.power(0.5),
        scenarios=(
            DamageScenario(
                id=0,
                prob=1.0,
                vertex_efficiency=(1.0, 0.5, 1.0, 1.0),
            ),
        ),
        payoff=PayoffSpec.constant(4.0),
    )


def edge_efficiency_mix():
    """Explicit per-edge efficiencies with one nearly dead edge."""
    g = _graph([(0, 0), (1, 0), (2, 0)], [(0, 1), (1, 2), (0, 1, 1.5)])
    return Instance(
        graph=g,
        boundary=BoundaryMeasure(atoms={0: -0.5, 2: 0.5}),
        cost=CostSpec.power(0.5),
        scenarios=(
            DamageScenario(id=0, prob=1.0, edge_efficiency=(0.25, 1.0, 1.0)),
        ),
        payoff=PayoffSpec.constant(4.0),
    )


def triangle_chord():
    """Cycle in the support graph; optima must not pay for loops."""
    g = _graph(
        [(0, 0), (1, 1), (2, 0), (1, 0)],
        [(0, 1), (1, 2), (0, 3), (3, 2), (1, 3)],
    )
    return Instance(
        graph=g,
        boundary=BoundaryMeasure(atoms={0: -0.5, 2: 0.5}),
        cost=CostSpec.power(0.5),
        scenarios=_plain(5),
        payoff=PayoffSpec.constant(3.0),
    )


def opposed_parallel():
    """Scenarios ship opposite directions; parallel edges let them split."""
    g = _graph([(0, 0), (1, 0)], [(0, 1, 1.0), (0, 1, 1.0)])
    return Instance(
        graph=g,
        boundary=BoundaryMeasure(atoms={0: -0.25, 1: 0.25}),
        cost=CostSpec.power(0.5),
        scenarios=(
            DamageScenario(id=0, prob=0.5, edge_mask=_mask(2, {1})),
            DamageScenario(id=1, prob=0.5, edge_mask=_mask(2, {0})),
        ),
        payoff=PayoffSpec.constant(4.0),
    )


def unbalanced_boundary():
    """More supply than demand; only part of the sources can be used."""
    g = _graph(
        [(0, 0), (2, 0), (1, 1)],
        [(0, 2), (2, 1), (0, 1)],
    )
    return Instance(
        graph=g,
        boundary=BoundaryMeasure(atoms={0: -0.5, 1: 0.375}),
        cost=CostSpec.power(0.5),
        scenarios=_plain(3),
        payoff=PayoffSpec.constant(2.0),
    )


SUITE = (
    ("single_edge", single_edge),
    ("two_hop_line", two_hop_line),
    ("parallel_cheap_dear", parallel_cheap_dear),
    ("diamond_routes", diamond_routes),
    ("diamond_mask_split", diamond_mask_split),
    ("opposed_corridor", opposed_corridor),
    ("unprofitable", unprofitable),
    ("partial_profit", partial_profit),
    ("table_cost_steps", table_cost_steps),
    ("flat_cost", flat_cost),
    ("reward_one_target", reward_one_target),
    ("lopsided_probs", lopsided_probs),
    ("two_sources", two_sources),
    ("two_targets", two_targets),
    ("dead_scenario", dead_scenario),
    ("efficiency_wall", efficiency_wall),
    ("edge_efficiency_mix", edge_efficiency_mix),
    ("triangle_chord", triangle_chord),
    ("opposed_parallel", opposed_parallel),
    ("unbalanced_boundary", unbalanced_boundary),
)


def build_suite():
    return [(name, make()) for name, make in SUITE]
