"""Cycle removal and path decomposition of signed edge flows."""

import random

import pytest

from randgen import random_admissible_flow, random_instance
from robust_transport import (
    Edge,
    GeometricGraph,
    ValidationError,
    Vertex,
    good_decomposition,
    remove_cycles,
)
from robust_transport.decomposition import check_decomposition_identities
from robust_transport.energy import boundary_of_flow


def square_graph():
    return GeometricGraph(
        dimension=2,
        vertices=tuple(
            Vertex(id=i, pos=p)
            for i, p in enumerate([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
        ),
        edges=(
            Edge(id=0, u=0, v=1, length=1.0),
            Edge(id=1, u=1, v=2, length=1.0),
            Edge(id=2, u=2, v=3, length=1.0),
            Edge(id=3, u=3, v=0, length=1.0),
            Edge(id=4, u=0, v=2, length=1.5),
        ),
    )


def test_remove_cycles_kills_a_rotation():
    g = square_graph()
    # pure rotation around the square plus a genuine 0 -> 2 shipment
    flow = [1.0, 1.0, 1.0, 1.0, 0.5]
    cleaned = remove_cycles(g, flow)
    assert boundary_of_flow(g, cleaned) == boundary_of_flow(g, flow)
    assert sum(abs(f) for f in cleaned) < sum(abs(f) for f in flow)
    # nothing left to peel: a second pass changes nothing
    assert tuple(remove_cycles(g, cleaned)) == tuple(cleaned)


def test_remove_cycles_handles_two_cycles():
    g = GeometricGraph(
        dimension=2,
        vertices=(Vertex(id=0, pos=(0.0, 0.0)), Vertex(id=1, pos=(1.0, 0.0))),
        edges=(
            Edge(id=0, u=0, v=1, length=1.0),
            Edge(id=1, u=0, v=1, length=1.0),
        ),
    )
    # +1 on one parallel edge, -1 on the other: a closed loop
    cleaned = remove_cycles(g, [1.0, -1.0])
    assert cleaned == (0.0, 0.0)


def test_remove_cycles_preserves_acyclic_flows():
    g = square_graph()
    flow = [0.5, 0.5, 0.0, 0.0, 0.25]
    assert tuple(remove_cycles(g, flow)) == tuple(flow)


def test_good_decomposition_hand_case():
    g = square_graph()
    flow = [0.5, 0.5, 0.0, 0.0, 0.25]
    dec = good_decomposition(g, flow)
    devs = check_decomposition_identities(g, flow, dec)
    assert devs["ok"]
    total = sum(w for _, w in dec.items)
    assert total == pytest.approx(0.75)
    for path, w in dec.items:
        assert w > 0.0
        assert path.is_simple()


def test_good_decomposition_rejects_cycles():
    g = square_graph()
    with pytest.raises(ValidationError, match="remove_cycles"):
        good_decomposition(g, [1.0, 1.0, 1.0, 1.0, 0.0])


def test_decomposition_identities_random(seed=41):
    rng = random.Random(seed)
    for k in range(150):
        inst = random_instance(rng)
        i = rng.randrange(inst.n_scenarios)
        flow = remove_cycles(inst.graph, random_admissible_flow(rng, inst, i))
        dec = good_decomposition(inst.graph, flow)
        devs = check_decomposition_identities(inst.graph, flow, dec)
        assert devs["ok"], (seed, k, devs)


def test_density_bound_random(seed=42):
    """Acyclic flows dominated by the boundary never exceed half its mass
    on any single edge."""
    rng = random.Random(seed)
    for k in range(150):
        inst = random_instance(rng)
        i = rng.randrange(inst.n_scenarios)
        flow = remove_cycles(inst.graph, random_admissible_flow(rng, inst, i))
        peak = max((abs(f) for f in flow), default=0.0)
        assert peak <= inst.beta + 1e-9, (seed, k, peak, inst.beta)
