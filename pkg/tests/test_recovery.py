"""Per-scenario recovery flows: optimality, feasibility, orientation."""

import random

import pytest

from randgen import random_admissible_flow, random_instance
from robust_transport import (
    BoundaryMeasure,
    CostSpec,
    DamageScenario,
    Edge,
    GeometricGraph,
    Instance,
    PayoffSpec,
    Vertex,
    independent_optimum,
    max_payoff_flow,
    preceq,
)
from robust_transport.energy import boundary_of_flow, scenario_payoff_eulerian


def line(payoffs=None, mask=None):
    g = GeometricGraph(
        dimension=2,
        vertices=(
            Vertex(id=0, pos=(0.0, 0.0)),
            Vertex(id=1, pos=(1.0, 0.0)),
            Vertex(id=2, pos=(2.0, 0.0)),
        ),
        edges=(
            Edge(id=0, u=0, v=1, length=1.0),
            Edge(id=1, u=1, v=2, length=1.0),
        ),
    )
    payoff = (
        PayoffSpec.table([payoffs]) if payoffs is not None else PayoffSpec.constant(2.0)
    )
    return Instance(
        graph=g,
        boundary=BoundaryMeasure(atoms={0: -0.5, 2: 0.5}),
        cost=CostSpec.power(0.5),
        scenarios=(DamageScenario(id=0, prob=1.0, edge_mask=mask),),
        payoff=payoff,
    )


def test_recovery_ships_when_capacity_allows():
    inst = line()
    res = max_payoff_flow(inst, 0, (0.5, 0.5))
    assert res.flow == (0.5, 0.5)
    assert res.payoff == pytest.approx(2.0)
    assert res.augmentations == 1


def test_recovery_respects_capacity_bottleneck():
    inst = line()
    res = max_payoff_flow(inst, 0, (0.25, 0.5))
    assert res.flow == (0.25, 0.25)
    assert res.payoff == pytest.approx(1.0)


def test_recovery_idles_with_zero_reward():
    inst = line(payoffs=[0.0, 0.0, 0.0])
    res = max_payoff_flow(inst, 0, (0.5, 0.5))
    assert res.flow == (0.0, 0.0)
    assert res.payoff == 0.0
    assert res.augmentations == 0


def test_recovery_avoids_masked_edges():
    inst = line(mask=(True, False))
    res = max_payoff_flow(inst, 0, (0.5, 0.5))
    # edge 1 is dead, so nothing can reach the target; a unit moved only to
    # the middle vertex earns h(0) + h(1) > 0 -- but the middle vertex
    # carries no boundary mass, so domination forbids parking it there
    assert res.flow == (0.0, 0.0)


def test_stalled_delivery_needs_boundary_mass_at_the_stop():
    # middle vertex owns target mass: shipping only the first hop is legal
    g = line().graph
    inst = Instance(
        graph=g,
        boundary=BoundaryMeasure(atoms={0: -0.5, 1: 0.25, 2: 0.25}),
        cost=CostSpec.power(0.5),
        scenarios=(DamageScenario(id=0, prob=1.0, edge_mask=(True, False)),),
        payoff=PayoffSpec.constant(2.0),
    )
    res = max_payoff_flow(inst, 0, (0.5, 0.5))
    assert res.flow == (0.25, 0.0)
    assert res.payoff == pytest.approx(1.0)


def test_oriented_commitment_blocks_reverse_use():
    inst = line()
    # committing both edges against the only profitable direction
    res = max_payoff_flow(inst, 0, (0.5, 0.5), sigma=(-1, -1))
    assert res.flow == (0.0, 0.0)
    # committing with the grain changes nothing
    res = max_payoff_flow(inst, 0, (0.5, 0.5), sigma=(1, 1))
    assert res.flow == (0.5, 0.5)
    # sigma 0 leaves the edge free both ways
    res = max_payoff_flow(inst, 0, (0.5, 0.5), sigma=(0, 0))
    assert res.flow == (0.5, 0.5)


def test_recovery_feasible_and_dominant_random(seed=51):
    """On random instances the recovery flow is admissible and beats every
    randomly generated admissible flow at the same capacity."""
    rng = random.Random(seed)
    for k in range(120):
        inst = random_instance(rng)
        i = rng.randrange(inst.n_scenarios)
        rival = random_admissible_flow(rng, inst, i)
        theta = [abs(f) for f in rival]
        res = max_payoff_flow(inst, i, theta)

        scen = inst.scenarios[i]
        alive = scen.edge_mask or (True,) * inst.graph.n_edges
        for e in range(inst.graph.n_edges):
            assert abs(res.flow[e]) <= theta[e] + 1e-9, (seed, k)
            if not alive[e]:
                assert res.flow[e] == 0.0, (seed, k)
        assert preceq(
            dict(enumerate(boundary_of_flow(inst.graph, res.flow))),
            inst.boundary,
        ), (seed, k)

        best = scenario_payoff_eulerian(inst, i, res.flow)
        have = scenario_payoff_eulerian(inst, i, rival)
        assert best >= have - 1e-9, (seed, k, best, have)


def test_independent_optimum_dominates_capped_solves(seed=52):
    """Unlimited capacity can only help."""
    rng = random.Random(seed)
    for k in range(60):
        inst = random_instance(rng)
        i = rng.randrange(inst.n_scenarios)
        wide = independent_optimum(inst, i)
        tight = max_payoff_flow(
            inst, i, [0.125] * inst.graph.n_edges
        )
        assert wide.payoff >= tight.payoff - 1e-9, (seed, k)
