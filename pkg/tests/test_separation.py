import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sfbound import separation
from sfbound.driver import solve_relaxation
from sfbound.formulations import Kind, build
from sfbound.graph import Graph
from sfbound.instance import canonicalize, fixture, shortest_distances

import bruteforce as bf
from points import FAMILIES, check_points, row_violation, small_instances

# fixture A is the 4-cycle a-b-c-d with a as root
A, B, C, D = 0, 1, 2, 3


def _arcs(inst, values: dict) -> np.ndarray:
    return np.array([values.get((i, j), 0.0) for i, j, _ in inst.graph.arcs()])


def _pairs(inst, cuts):
    return {c.index[:2] for c in cuts}


# -- undirected cuts ----------------------------------------------------------


def test_uc_half_cycle_is_feasible():
    assert separation.separate_uc(fixture("A"), np.full(4, 0.5)) == []


def test_uc_zero_point_cuts_every_terminal():
    cuts = separation.separate_uc(fixture("A"), np.zeros(4))
    assert _pairs(fixture("A"), cuts) == {(0, B), (0, C), (0, D)}
    assert all(c.violation == pytest.approx(1.0) for c in cuts)


def test_uc_single_edge_leaves_d_cut_off():
    inst = fixture("A")
    x = np.zeros(4)
    x[[e for e, (u, v, _) in enumerate(inst.graph.edges) if {u, v} == {A, B}]] = 1.0
    cuts = separation.separate_uc(inst, x)
    hits = [c for c in cuts if A in c.side and D not in c.side]
    assert hits and max(c.violation for c in hits) == pytest.approx(1.0)


# -- directed cuts --------------------------------------------------------------


def test_dc_one_way_orientation_misses_cut_around_d():
    inst = fixture("A")
    y = _arcs(inst, {(A, D): 0.5, (D, C): 0.5, (A, B): 0.5, (B, C): 0.5})
    cuts = separation.separate_dc(inst, [y])
    sides = {c.side for c in cuts}
    assert frozenset({A, B, C}) in sides
    # (d,c) and (b,c) together cover the set {a,b,d}
    assert frozenset({A, B, D}) not in sides
    assert bf.dc_violated(inst, [y])


def test_dc_orientation_with_reverse_capacity_still_starves_b():
    # adding (c,d) and (b,a) covers {a,b,c}, but {a,c,d} still only has (a,b) leaving it
    inst = fixture("A")
    y = _arcs(inst, {(A, D): 0.5, (D, C): 0.5, (A, B): 0.5, (B, C): 0.5, (C, D): 0.5, (B, A): 0.5})
    cuts = separation.separate_dc(inst, [y])
    assert bf.dc_violated(inst, [y])
    assert {c.side for c in cuts} == {frozenset({A, C, D})}
    assert cuts[0].violation == pytest.approx(0.5)


def test_dc_zero_point_cuts_every_pair():
    inst = fixture("C")
    zero = [np.zeros(2 * inst.graph.edge_count)] * inst.K
    cuts = separation.separate_dc(inst, zero)
    assert _pairs(inst, cuts) == {(k, t) for k in range(inst.K) for t in inst.non_root(k)}


def test_dc_equals_uc_verdict_on_two_terminal_sets():
    # with two terminals per set a symmetric orientation loses nothing
    inst = fixture("C")
    rng = np.random.default_rng(5)
    for _ in range(20):
        x = rng.choice([0.0, 0.5, 1.0], inst.graph.edge_count)
        y = np.repeat(x, 2)
        assert bool(separation.separate_uc(inst, x)) == bool(separation.separate_dc(inst, [y] * inst.K))


# -- lifted cuts ----------------------------------------------------------------


def test_klsvz_accepts_half_cycle_with_zero_pair_variables():
    inst = fixture("A")
    pairs = shortest_distances(inst)
    assert separation.separate_klsvz(inst, pairs, np.full(4, 0.5), [0.0] * pairs.L, [0.0] * pairs.L) == []


def test_klsvz_accepts_uc_optimum_on_c():
    inst = fixture("C")
    rep = solve_relaxation(inst, Kind.UC, backend="simplex", keep=True)
    x = rep.model.x_values(rep.point)
    pairs = shortest_distances(inst)
    assert separation.separate_klsvz(inst, pairs, x, [0.0] * pairs.L, [0.0] * pairs.L) == []


def test_klsvz_zero_point_violates_first_family_for_every_pair():
    inst = fixture("C")
    pairs = shortest_distances(inst)
    zero = [0.0] * pairs.L
    cuts = separation.separate_klsvz(inst, pairs, np.zeros(inst.graph.edge_count), zero, zero)
    assert {c.index[0] for c in cuts if c.family == "klsvz-1"} == set(range(pairs.L))


def test_klsvz_refuses_disconnected_pair():
    inst = canonicalize(Graph(3, ((0, 1, 1.0),)), [[0, 2]])
    with pytest.raises(ValueError):
        separation.separate_klsvz(inst, shortest_distances(inst), [1.0], [0.0], [0.0])


# -- subtour elimination ----------------------------------------------------------


def test_sec_finds_triangle():
    inst = canonicalize(Graph(3, ((0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0))), [[0, 1]])
    cuts = separation.separate_sec(inst, np.ones(3), np.ones(3))
    assert cuts and all(c.side == frozenset({0, 1, 2}) for c in cuts)
    assert max(c.violation for c in cuts) == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(range(8)), st.randoms(use_true_random=False))
def test_sec_accepts_integer_forests(which, rnd):
    inst = small_instances()[which]
    edges = list(range(inst.graph.edge_count))
    rnd.shuffle(edges)
    forest = [e for e in edges if rnd.random() < 0.6]
    forest = [e for i, e in enumerate(forest) if bf.acyclic(inst, forest[: i + 1])]
    x = np.zeros(inst.graph.edge_count)
    x[forest] = 1.0
    assert bf.acyclic(inst, forest)
    y = np.ones(inst.n)
    assert separation.separate_sec(inst, x, y) == []
    assert separation.separate_sec(inst, x, y, layer=1) == []


def test_et_optimum_on_b_is_clean():
    rep = solve_relaxation(fixture("B"), Kind.ET, backend="simplex", keep=True)
    assert rep.bound == pytest.approx(8 / 3, abs=0.005)
    assert all(fam.separate(rep.model, rep.point) == [] for fam in rep.model.lazy)


# -- extended directed cuts ------------------------------------------------------


def test_edc_own_root_and_no_arcs_cuts_every_pair():
    inst = fixture("C")
    z = {(l, k): float(l == k) for k in range(inst.K) for l in range(k + 1)}
    cuts = separation.separate_edc(inst, np.zeros(2 * inst.graph.edge_count), z)
    assert _pairs(inst, cuts) == {(k, t) for k in range(inst.K) for t in inst.non_root(k)}


def test_sedc_zero_parent_values_need_nothing():
    inst = fixture("C")
    z = {(k, l): 0.0 for k in range(inst.K) for l in range(k, inst.K)}
    zero = [np.zeros(2 * inst.graph.edge_count)] * inst.K
    assert separation.separate_sedc(inst, zero, z) == []


@pytest.mark.parametrize(
    "label,kind,value,tol",
    [("B", Kind.EDC, 2.5, 1e-6), ("C", Kind.EDC, 5.14, 0.005), ("B", Kind.SEDC, 3.0, 1e-6), ("C", Kind.SEDC, 6.0, 1e-6)],
)
def test_extended_optima_are_clean(label, kind, value, tol):
    rep = solve_relaxation(fixture(label), kind, backend="simplex", keep=True)
    assert rep.bound == pytest.approx(value, abs=tol)
    assert all(fam.separate(rep.model, rep.point) == [] for fam in rep.model.lazy)


# -- properties over every family ----------------------------------------------


@pytest.mark.parametrize("family", sorted(FAMILIES))
def test_oracle_verdict_matches_enumeration(family):
    for seed, inst in enumerate(small_instances()):
        for point, cuts, violated in check_points(inst, family, 20, seed):
            assert bool(cuts) == violated, inst.name


@pytest.mark.parametrize("family", sorted(FAMILIES))
def test_reported_violation_is_exact_and_rows_are_unique(family):
    for seed, inst in enumerate(small_instances()):
        for point, cuts, _ in check_points(inst, family, 10, 100 + seed):
            keys = [tuple(sorted(c.terms.items())) for c in cuts]
            assert len(keys) == len(set(keys))
            for cut in cuts:
                assert cut.violation > separation.TOL
                assert row_violation(cut, point) == pytest.approx(cut.violation, abs=1e-9)


def test_uc_cut_value_is_the_enumerated_minimum():
    inst = fixture("C")
    for point, cuts, _ in check_points(inst, "uc", 20, 9):
        for cut in cuts:
            k, t = cut.index[:2]
            r = inst.roots[k]
            best = min(bf.cut_value_undirected(inst, point["x"], S) for S in bf.subsets(inst.n) if r in S and t not in S)
            assert cut.violation == pytest.approx(1.0 - best, abs=1e-9)


@pytest.mark.parametrize("kind", [Kind.UC, Kind.DC, Kind.KLSVZ, Kind.LT, Kind.ET, Kind.EDC, Kind.SEDC])
def test_model_rows_match_symbolic_terms(kind):
    inst = fixture("C")
    model = build(inst, kind)
    rng = np.random.default_rng(11)
    point = rng.choice([0.0, 0.25, 0.5], model.program.num_columns)
    for fam in model.lazy:
        cuts = fam.separate(model, point)
        for cut in cuts:
            assert cut.rhs - cut.row.activity(point) == pytest.approx(cut.violation, abs=1e-9)


@pytest.mark.parametrize("kind", [Kind.UC, Kind.DC, Kind.KLSVZ, Kind.LT, Kind.ET, Kind.EDC, Kind.SEDC])
def test_cutting_loop_never_repeats_a_row(kind):
    rep = solve_relaxation(fixture("C"), kind, backend="simplex", keep=True)
    keys = [r.key() for r in rep.model.program.rows]
    assert len(keys) == len(set(keys))
