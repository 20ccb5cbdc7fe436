import itertools
import random
from fractions import Fraction

import pytest

from oracles import brute_best_permutation_cost
from shiftopt.duality import build_duality_report
from shiftopt.errors import PreconditionError
from shiftopt.genericity import perturb_to_unique
from shiftopt.potentials import LocallyConstantPotential, canonical_a2
from shiftopt.transport import (OrbitMeasure, dual_value,
                                graph_property_check,
                                maximizing_orbit_measures, plan_csv,
                                slackness_check, solve_transport,
                                _transport_simplex)
from shiftopt.twist import optimal_pair_map
from shiftopt.words import EventuallyPeriodicPoint

F = Fraction


def _report(rng, k, d=2):
    pot = LocallyConstantPotential(d, k, tuple(
        F(rng.randrange(-8, 9), rng.choice((1, 2, 4)))
        for _ in range(d ** k)))
    return build_duality_report(perturb_to_unique(pot, F(1, 16)))


# -- canonical case, frozen ----------------------------------------------------

def test_a2_transport():
    rep = build_duality_report(canonical_a2())
    mu_x, mu_w = maximizing_orbit_measures(rep)
    assert [str(a) for a in mu_x.atoms] == ["(01)", "(10)"]
    assert mu_x.weight == F(1, 2)
    plan = solve_transport(mu_x, mu_w, rep.kernel)
    assert plan.cost == F(-1, 2)
    assert plan.permutation == (1, 0)
    assert not plan.lp_only
    assert dual_value(plan, rep) == plan.cost
    assert slackness_check(plan, rep).ok
    assert graph_property_check(plan)


def test_a2_identity_plan_breaks_slackness():
    rep = build_duality_report(canonical_a2())
    mu_x, mu_w = maximizing_orbit_measures(rep)
    plan = solve_transport(mu_x, mu_w, rep.kernel)
    bad = type(plan)(plan.atoms_x, plan.atoms_w,
                     ((F(1, 2), F(0)), (F(0), F(1, 2))),
                     F(0), (0, 1), False)
    chk = slackness_check(bad, rep)
    assert not chk
    # the misplaced mass sits where the pairing defect is exactly 1
    assert chk.violations == (
        (0, 0, F(1), "slackness"),
        (1, 1, F(1), "slackness"),
    )


def test_a2_plan_csv():
    rep = build_duality_report(canonical_a2())
    plan = solve_transport(*maximizing_orbit_measures(rep), rep.kernel)
    lines = plan_csv(plan).splitlines()
    assert lines[0] == "x\\w,(01),(10)"
    assert lines[1] == "(01),0,1/2"
    assert lines[2] == "(10),1/2,0"


def test_depth_one_single_atom():
    rep = build_duality_report(LocallyConstantPotential(2, 1, (F(0), F(-1))))
    mu_x, mu_w = maximizing_orbit_measures(rep)
    assert len(mu_x.atoms) == 1
    plan = solve_transport(mu_x, mu_w, rep.kernel)
    assert plan.permutation == (0,)
    assert dual_value(plan, rep) == plan.cost


# -- exact simplex against brute force ----------------------------------------

def test_simplex_matches_permutation_brute_force():
    rng = random.Random(401)
    for _ in range(120):
        p = rng.randrange(1, 7)
        cost = tuple(tuple(F(rng.randrange(-12, 13), rng.choice((1, 2, 3)))
                           for _ in range(p)) for _ in range(p))
        total, matrix = _transport_simplex(cost, F(1, p))
        assert total == brute_best_permutation_cost(cost)
        assert all(sum(row) == F(1, p) for row in matrix)
        cols = [sum(matrix[i][j] for i in range(p)) for j in range(p)]
        assert all(c == F(1, p) for c in cols)


def test_simplex_survives_massive_ties():
    # all-{0,1} tables are maximally degenerate for the pivoting rule
    rng = random.Random(403)
    for _ in range(60):
        p = rng.randrange(2, 7)
        cost = tuple(tuple(F(rng.randrange(0, 2)) for _ in range(p))
                     for _ in range(p))
        total, _ = _transport_simplex(cost, F(1, p))
        assert total == brute_best_permutation_cost(cost)


# -- invariants on natural data -------------------------------------------------

def test_transport_sweep():
    rng = random.Random(409)
    done = 0
    while done < 25:
        try:
            rep = _report(rng, rng.randrange(2, 5))
            mu_x, mu_w = maximizing_orbit_measures(rep)
        except PreconditionError:
            continue
        plan = solve_transport(mu_x, mu_w, rep.kernel)
        # strong duality in exact arithmetic
        assert plan.cost == dual_value(plan, rep)
        assert slackness_check(plan, rep).ok
        assert graph_property_check(plan)
        # support sits inside the zero set of the pairing defect
        depth = rep.potential.depth
        xn = mu_x.node_indices(depth)
        wn = mu_w.node_indices(depth)
        for i, j in plan.support():
            assert rep.b_table[xn[i]][wn[j]] == 0
        # any feasible permutation is at least as costly
        p = len(mu_x.atoms)
        perm = list(range(p))
        rng.shuffle(perm)
        other = sum(-rep.kernel.value(wn[perm[i]], xn[i]) * F(1, p)
                    for i in range(p))
        assert other >= plan.cost
        done += 1


def test_pairing_agrees_with_optimal_map():
    # on two letters the plan's support must match the x -> w buckets
    rng = random.Random(419)
    done = 0
    while done < 12:
        try:
            rep = _report(rng, rng.randrange(2, 4))
            mu_x, mu_w = maximizing_orbit_measures(rep)
        except PreconditionError:
            continue
        plan = solve_transport(mu_x, mu_w, rep.kernel)
        pmap = optimal_pair_map(rep)
        depth = rep.potential.depth
        xn = mu_x.node_indices(depth)
        wn = mu_w.node_indices(depth)
        for i, j in plan.support():
            assert wn[j] in {ow.w_node for ow in pmap.per_x[xn[i]]}
        done += 1


def test_long_orbit_goes_lp_only():
    # the ten cyclic 4-windows of this word are pairwise distinct, so at
    # depth 5 its orbit is a simple cycle on ten nodes and permutation
    # search is skipped
    word = (0, 0, 0, 0, 1, 0, 0, 1, 1, 1)
    nodes = {tuple(word[(i + t) % 10] for t in range(4)) for i in range(10)}
    assert len(nodes) == 10
    edges = {tuple(word[(i + t) % 10] for t in range(5)) for i in range(10)}
    values = tuple(F(0) if w in edges else F(-1)
                   for w in itertools.product((0, 1), repeat=5))
    rep = build_duality_report(LocallyConstantPotential(2, 5, values))
    mu_x, mu_w = maximizing_orbit_measures(rep)
    assert len(mu_x.atoms) == 10
    plan = solve_transport(mu_x, mu_w, rep.kernel)
    assert plan.lp_only
    assert graph_property_check(plan)
    assert plan.cost == dual_value(plan, rep)   # certifies optimality
    assert slackness_check(plan, rep).ok


def test_non_unique_refused():
    # two maximizing fixed points tie, so no single orbit pair exists
    with pytest.raises(PreconditionError):
        rep = build_duality_report(
            LocallyConstantPotential(2, 2, (F(0), F(-1), F(-1), F(0))))
        maximizing_orbit_measures(rep)


def test_orbit_measure_parses_back_to_itself():
    atoms = tuple(EventuallyPeriodicPoint.parse(s, 2)
                  for s in ("(001)", "(010)", "(100)"))
    mu = OrbitMeasure(atoms)
    assert mu.weight == F(1, 3)
    # depth-2 atoms sit at the node given by their first symbol
    assert mu.node_indices(2) == (0, 0, 1)
