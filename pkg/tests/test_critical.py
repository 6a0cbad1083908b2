"""Support theorems, homological critical grades, and local map checks."""

import pytest

import morsebetti as mb
from morsebetti.algebra import PrimeField
from morsebetti.complexes import simplicial_complex
from morsebetti.critical import (
    homological_critical_grades,
    verify_bifiltration_bounds,
    verify_local_maps,
    verify_ses_dims,
    verify_support_theorem,
)
from morsebetti.filtration import OneCriticalFiltration, box_grades
from morsebetti.koszul import ModuleSlice, betti_tables
from morsebetti.morse import DiscreteVectorField, build_matching, morse_complex

from conftest import make_triangle_fixture

F2 = PrimeField(2)


def claims_by_id(report):
    out = {}
    for c in report.claims:
        out.setdefault(c.id, []).append(c)
    return out


def random_bifil(seed, p=2):
    return mb.generate_random(
        mb.GeneratorParams(n=2, vertices=8, seed=seed, grade_range=3), p=p
    ).filtration


# -- homological critical grades ----------------------------------------------


def test_critical_grades_of_single_vertex():
    X = simplicial_complex([("a",)], F2)
    F = OneCriticalFiltration(X, {"a": (0, 0)}, 2)
    assert homological_critical_grades(F, 0) == {(0, 0)}
    assert homological_critical_grades(F, 1) == frozenset()


def test_critical_grades_of_triangle_fixture():
    F = make_triangle_fixture(2).filtration
    assert homological_critical_grades(F, 0) == {(0, 0)}
    assert homological_critical_grades(F, 1) == {(1, 1)}
    # oracle: relative homology at all four grades; at (1,1) the quotient
    # is the single edge v2.v3 with zero differential
    A = F.sublevel((0, 1)) | F.sublevel((1, 0))
    assert mb.relative_homology_dim(F.complex, A, 1) == 1


def test_critical_grades_of_cone_over_triangle():
    simplices = [("a", "v1", "v2"), ("a", "v1", "v3"), ("a", "v2", "v3")]
    doc = mb.lower_star(simplices, {v: (0, 0) for v in ("a", "v1", "v2", "v3")}, n=2)
    F = doc.filtration
    assert homological_critical_grades(F, 0) == {(0, 0)}
    for q in (1, 2):
        assert homological_critical_grades(F, q) == frozenset()


def test_critical_grades_require_two_parameters():
    X = simplicial_complex([("a",)], F2)
    F = OneCriticalFiltration(X, {"a": (0,)}, 1)
    with pytest.raises(ValueError, match="n=2"):
        homological_critical_grades(F, 0)


# -- support theorem -----------------------------------------------------------


def test_support_theorem_on_triangle_fixture():
    F = make_triangle_fixture(2).filtration
    V = build_matching(F)
    report = verify_support_theorem(F, V)
    assert report.ok
    assert report.grade_sets["entrance"]["0"] == ["0,0"]
    assert report.grade_sets["entrance"]["1"] == ["1,1"]
    assert report.supports["0"]["0"] == ["0,0"]
    assert report.supports["1"]["0"] == ["1,1"]


def test_support_theorem_with_trivial_matching():
    F = make_triangle_fixture(2).filtration
    report = verify_support_theorem(F, DiscreteVectorField(()))
    assert report.ok
    # with V empty the grade sets are the entrance grades of all q-cells
    assert report.grade_sets["entrance"]["0"] == ["0,0", "0,1", "1,0"]
    assert report.grade_sets["entrance"]["1"] == ["0,1", "1,0", "1,1"]


def test_support_theorem_random_smoke():
    for seed in range(10):
        F = random_bifil(1300 + seed)
        V = build_matching(F)
        for field in (V, DiscreteVectorField(())):
            report = verify_support_theorem(F, field)
            assert report.ok, (seed, report.failures())


def test_support_report_grades_actually_carry_nonzero_values():
    F = random_bifil(1404)
    table = betti_tables(F)
    report = verify_support_theorem(F, build_matching(F), table=table)
    for q_str, by_i in report.supports.items():
        for i_str, grades in by_i.items():
            for text in grades:
                grade = tuple(int(c) for c in text.split(","))
                assert table.xi_value(int(q_str), grade, int(i_str)) != 0


# -- local maps -----------------------------------------------------------------


def test_local_maps_on_triangle_fixture():
    F = make_triangle_fixture(2).filtration
    V = build_matching(F)
    report = verify_local_maps(F, V, 0, (1, 0))
    by_id = claims_by_id(report)
    assert by_id["local.surjection"][0].holds is True
    assert by_id["local.injection"][0].holds is True
    assert by_id["local.surjection"][0].detail == "direction 1"
    # oracle: the map H_0(X^(0,0)) -> H_0(X^(1,0)) is rank 1 between lines
    s = ModuleSlice(F, 0)
    assert s.map((0, 0), (1, 0)).rank() == 1 == s.dim((1, 0))


def test_local_maps_skip_inside_closure():
    F = make_triangle_fixture(2).filtration
    V = build_matching(F)
    report = verify_local_maps(F, V, 0, (0, 0))
    assert len(report.claims) == 1
    claim = report.claims[0]
    assert claim.id == "local.hypothesis" and claim.holds is None
    assert not report.failures()


def test_local_maps_random_fixtures():
    for seed in range(6):
        F = random_bifil(1500 + seed)
        V = build_matching(F)
        morse = morse_complex(F, V)
        slices = {}
        for q in range(max(F.complex.top_dim, 0) + 1):
            for u in box_grades(F.umax, margin=1)[::2]:
                report = verify_local_maps(F, V, q, u, morse=morse, slices=slices)
                assert not report.failures(), (seed, q, u, report.failures())


# -- bifiltration bounds ---------------------------------------------------------


def test_bounds_on_triangle_fixture():
    F = make_triangle_fixture(2).filtration
    report = verify_bifiltration_bounds(F)
    assert report.ok
    by_id = claims_by_id(report)
    # sandwich at q=1, u=(1,1):  1 <= 1 <= 1
    table = betti_tables(F)
    xi0_1 = table.xi_value(1, (1, 1), 0)
    xi1_0 = table.xi_value(0, (1, 1), 1)
    xi2_0 = table.xi_value(0, (1, 1), 2)
    A = F.sublevel((0, 1)) | F.sublevel((1, 0))
    mid = mb.relative_homology_dim(F.complex, A, 1)
    assert xi0_1 + xi1_0 - xi2_0 == 1 and mid == 1
    assert xi0_1 + xi1_0 + table.xi_value(-1, (1, 1), 2) == 1
    assert all(c.holds for c in by_id["bounds.sandwich"])


def test_bounds_on_single_vertex():
    X = simplicial_complex([("a",)], F2)
    F = OneCriticalFiltration(X, {"a": (0, 0)}, 2)
    report = verify_bifiltration_bounds(F)
    assert report.ok
    assert report.grade_sets["critical"]["0"] == ["0,0"]
    assert report.supports["0"]["0"] == ["0,0"]


def test_bounds_random_smoke():
    for seed in range(10):
        F = random_bifil(1600 + seed, p=3)
        report = verify_bifiltration_bounds(F)
        assert report.ok, (seed, [c.to_json_dict() for c in report.failures()])


def test_bounds_require_two_parameters():
    doc = mb.generate_random(mb.GeneratorParams(n=3, vertices=5, seed=1, grade_range=2))
    with pytest.raises(ValueError, match="n=2"):
        verify_bifiltration_bounds(doc.filtration)


def test_xi2_support_claim_is_reported_standalone():
    F = random_bifil(1700)
    report = verify_bifiltration_bounds(F)
    assert any(c.id == "bounds.xi2" for c in report.claims)
    assert any(c.id == "bounds.critical_in_entrance" for c in report.claims)
    assert any(c.id == "bounds.coro.lower" for c in report.claims)
    assert any(c.id == "bounds.coro.upper" for c in report.claims)


# -- short exact sequence bookkeeping ---------------------------------------------


def test_ses_dims_below_all_grades():
    X = simplicial_complex([("a", "b")], F2)
    F = OneCriticalFiltration(X, {c: (2, 2) for c in X.dim_of}, 2)
    report = verify_ses_dims(F, (1, 1), 0)
    assert report.ok
    assert all(c.holds for c in report.claims)


def test_ses_dims_on_triangle_fixture_counts():
    F = make_triangle_fixture(2).filtration
    # j=1, l=2 at v=(1,1), q=1: C_1(X^(0,1), X^(0,0)) has one edge (v1.v3),
    # the union quotient has one edge (v2.v3), C_1(X^(1,1), X^(0,1)) has two
    sub_l = F.sublevel((0, 1)) - F.sublevel((0, 0))
    union_rest = F.sublevel((1, 1)) - (F.sublevel((1, 0)) | F.sublevel((0, 1)))
    rest_j = F.sublevel((1, 1)) - F.sublevel((1, 0))
    count = lambda cells: len(F.complex.cells_of_dim(1, frozenset(cells)))
    assert count(sub_l) == 1 and count(union_rest) == 1 and count(rest_j) == 2
    report = verify_ses_dims(F, (1, 1), 1)
    assert report.ok


def test_ses_dims_random_property():
    for seed in range(6):
        F = random_bifil(1800 + seed)
        for v in box_grades(F.umax)[:: 2]:
            for q in range(max(F.complex.top_dim, 0) + 2):
                report = verify_ses_dims(F, v, q)
                assert report.ok, (seed, v, q)


def test_ses_dims_require_two_parameters():
    doc = mb.generate_random(mb.GeneratorParams(n=1, vertices=4, seed=2, grade_range=2))
    with pytest.raises(ValueError, match="n=2"):
        verify_ses_dims(doc.filtration, (0,), 0)
