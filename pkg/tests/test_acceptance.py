"""Acceptance gate: ten checks, one printed verdict line each.

Run with ``pytest tests/test_acceptance.py -s`` to watch the lines appear;
without ``-s`` they land in captured stdout.  Every check carries a wall
clock budget that is part of the verdict.
"""

import random
import time
from contextlib import contextmanager

import pytest

import randgen
from suite20 import build_suite
from robust_transport import (
    EulerianCompetitor,
    ExampleParams,
    LagrangianCompetitor,
    SolveParams,
    brute_force_eulerian,
    brute_force_lagrangian,
    build_example,
    eulerian_energy,
    good_decomposition,
    lagrangian_energy,
    load_instance,
    render_svg,
    serialize_instance,
    solve_eulerian,
    solve_lagrangian,
    verify_phenomenon,
)
from robust_transport.energy import scenario_payoff_eulerian


@contextmanager
def criterion(num, label, budget_s):
    t0 = time.perf_counter()
    try:
        yield
    except BaseException:
        dt = time.perf_counter() - t0
        print(f"[FAIL] {num:02d} {label} ({dt:.2f}s, budget {budget_s:.0f}s)")
        raise
    dt = time.perf_counter() - t0
    verdict = "PASS" if dt < budget_s else "FAIL"
    print(f"[{verdict}] {num:02d} {label} ({dt:.2f}s, budget {budget_s:.0f}s)")
    assert dt < budget_s, f"check {num} blew its {budget_s:.0f}s budget: {dt:.2f}s"


def _random_flows(seed, count):
    """Deterministic stream of (instance, scenario, cycle-free flow)."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        inst = randgen.random_instance(rng)
        assert inst.graph.n_edges <= 20
        i = rng.randrange(inst.n_scenarios)
        flow = randgen.random_acyclic_flow(rng, inst, i)
        if any(flow):
            out.append((inst, i, flow))
    return out


def test_c01_decomposition_identities():
    with criterion(1, "path decomposition reproduces 1000 cycle-free flows", 10):
        for inst, _, flow in _random_flows(9001, 1000):
            dec = good_decomposition(inst.graph, flow)
            back = dec.superposition(inst.graph)
            for e in range(inst.graph.n_edges):
                assert abs(back[e] - flow[e]) <= 1e-9
            for path, w in dec.items:
                assert w > 0.0
                assert path.is_simple()
                # every traversal agrees with the flow's direction
                for a, b, e_id in zip(path.vertices, path.vertices[1:], path.edges):
                    edge = inst.graph.edges[e_id]
                    sign = 1.0 if (a, b) == (edge.u, edge.v) else -1.0
                    assert sign * flow[e_id] > 0.0
            total = sum(
                w * path.length(inst.graph) for path, w in dec.items
            )
            direct = sum(
                abs(f) * inst.graph.edges[e].length for e, f in enumerate(flow)
            )
            assert abs(total - direct) <= 1e-9


def test_c02_decomposition_density_bound():
    with criterion(2, "edge load of every decomposition is at most |nu|/2", 10):
        for inst, _, flow in _random_flows(9001, 1000):
            dec = good_decomposition(inst.graph, flow)
            bound = inst.boundary.total_variation / 2.0
            load = [0.0] * inst.graph.n_edges
            for path, w in dec.items:
                for e_id in path.edges:
                    load[e_id] += w
            assert max(load) <= bound + 1e-9


def test_c03_payoff_upper_bound():
    with criterion(3, "scenario pay-off never beats prob * h_max * |nu|", 10):
        for inst, i, flow in _random_flows(42, 400):
            got = scenario_payoff_eulerian(inst, i, flow)
            cap = (
                inst.scenarios[i].prob
                * inst.payoff.max_value()
                * inst.boundary.total_variation
            )
            assert got <= cap + 1e-9


def test_c04_hand_suite_matches_oracles():
    with criterion(4, "20 hand instances: both solvers hit the brute-force optimum", 60):
        params = SolveParams(restarts=8, delta=0.125, seed=0)
        for name, inst in build_suite():
            ora_e = brute_force_eulerian(inst, delta=0.125)
            rep_e = solve_eulerian(inst, params)
            assert rep_e.admissible.ok, name
            assert rep_e.energy.energy == pytest.approx(ora_e.energy, abs=1e-6), name

            ora_l = brute_force_lagrangian(inst, delta=0.125)
            rep_l = solve_lagrangian(inst, params)
            assert rep_l.admissible.ok, name
            assert rep_l.energy.energy == pytest.approx(ora_l.energy, abs=1e-6), name


def test_c05_orientation_gap():
    with criterion(5, "orientation costs >= 0.5 energy; gap grows as the detour shrinks", 30):
        free = brute_force_eulerian(build_example("non_existence"), oriented=False)
        tied = brute_force_eulerian(build_example("non_existence"), oriented=True)
        assert tied.energy - free.energy >= 0.5
        # richer reward keeps both corridors worth building, exposing the
        # detour dependence of the committed variant
        sweep = []
        for d in (0.5, 0.25, 0.125):
            p = ExampleParams(detour=d, payoff=12.0)
            sweep.append(brute_force_eulerian(build_example("non_existence", p),
                                              oriented=True).energy)
        assert sweep[0] > sweep[1] > sweep[2]


def test_c06_shrinking_cascade():
    with criterion(6, "cascade families: negative energy falls, plan mass is J/2", 30):
        energies = []
        for levels in (1, 2, 3):
            inst = build_example("distance", ExampleParams(levels=levels))
            rep = solve_lagrangian(inst, SolveParams(restarts=4, seed=0))
            assert rep.admissible.ok
            mass = sum(w for _, w in rep.competitor.plan)
            assert mass == levels / 2.0
            energies.append(rep.energy.energy)
        assert all(e < 0.0 for e in energies)
        assert energies[0] > energies[1] > energies[2]


def test_c07_unbounded_optimal_mass():
    with criterion(7, "flat-cost loops: optimal mass equals the route count", 10):
        energies = []
        for loops in (1, 2, 3, 4):
            inst = build_example("limit", ExampleParams(loops=loops))
            rep = solve_lagrangian(inst, SolveParams(restarts=4, seed=0))
            assert rep.admissible.ok
            mass = sum(w for _, w in rep.competitor.plan)
            assert mass == float(loops)
            energies.append(rep.energy.energy)
        assert energies[0] > energies[1] > energies[2] > energies[3]


def test_c08_efficiency_wall_routes():
    with criterion(8, "wall families pick the corridor at (1-3e)^beta and the half-rate top", 60):
        rep = verify_phenomenon("non_continuous", ExampleParams(epsilon=0.125, beta=1.0))
        assert rep.ok, [c.name for c in rep.claims if not c.ok]
        assert rep.series["epsilon"] == (0.125, 0.0625)
        for got, eps in zip(rep.series["corridor_efficiency"], (0.125, 0.0625)):
            assert got == pytest.approx(1.0 - 3.0 * eps, abs=1e-6)
        for got in rep.series["top_efficiency"]:
            assert got == pytest.approx(0.5, abs=1e-6)


def test_c09_null_energy_and_scaling():
    with criterion(9, "empty competitors score zero; power costs scale exactly", 10):
        rng = random.Random(4242)
        done = 0
        while done < 100:
            inst = randgen.random_instance(rng)
            n = inst.graph.n_edges
            null_e = EulerianCompetitor(
                theta=(0.0,) * n,
                flows=tuple((0.0,) * n for _ in range(inst.n_scenarios)),
            )
            assert eulerian_energy(inst, null_e).energy == 0.0
            null_l = LagrangianCompetitor(
                plan=(), subplans=tuple(() for _ in range(inst.n_scenarios))
            )
            assert lagrangian_energy(inst, null_l).energy == 0.0

            if inst.cost.kind != "power":
                continue
            alpha = inst.cost.alpha
            lam = rng.choice((0.25, 0.5, 0.75))
            if done % 2 == 0:
                base = randgen.random_eulerian(rng, inst)
                if not any(base.theta):
                    continue
                scaled = EulerianCompetitor(
                    theta=tuple(lam * t for t in base.theta),
                    flows=tuple(tuple(lam * f for f in row) for row in base.flows),
                )
                b0 = eulerian_energy(inst, base)
                b1 = eulerian_energy(inst, scaled)
            else:
                base = randgen.random_lagrangian(rng, inst)
                if not base.plan:
                    continue
                scaled = LagrangianCompetitor(
                    plan=tuple((p, lam * w) for p, w in base.plan),
                    subplans=tuple(
                        tuple(lam * w for w in row) for row in base.subplans
                    ),
                )
                b0 = lagrangian_energy(inst, base)
                b1 = lagrangian_energy(inst, scaled)
            assert b1.phi_mass == pytest.approx(
                lam**alpha * b0.phi_mass, abs=1e-12, rel=1e-12
            )
            assert b1.payoff_total == pytest.approx(
                lam * b0.payoff_total, abs=1e-12, rel=1e-12
            )
            done += 1


def test_c10_reports_and_drawings_are_reproducible():
    with criterion(10, "fixed seeds give byte-identical reports and drawings", 60):
        for name, inst in build_suite():
            clone = load_instance(serialize_instance(inst))
            for solver in (solve_eulerian, solve_lagrangian):
                a = solver(inst, SolveParams(seed=13))
                b = solver(clone, SolveParams(seed=13))
                assert a.to_json() == b.to_json(), name
                assert render_svg(inst, a.competitor) == render_svg(
                    clone, b.competitor
                ), name
