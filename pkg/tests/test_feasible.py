"""Polytope assembly, exact LP and convex decomposition tests."""

import random
from fractions import Fraction

import pytest

from sympovm.extremal import catalog_extrema
from sympovm.feasible import (
    LinearProgram,
    Polytope,
    SymPovm,
    UnboundedLpError,
    build_feasible_polytope,
    convex_decompose,
    is_feasible,
    lp_solve,
    povm_from_coords,
)
from sympovm.symmetry import CoeffVector, kind

ZERO, ONE = Fraction(0), Fraction(1)


def bell_povm(*cols):
    k = kind("bell", 2)
    return SymPovm(k, tuple(CoeffVector(k, c) for c in cols))


def test_two_outcome_polytope_is_eliminated():
    poly = build_feasible_polytope(kind("oo", 3), 2)
    assert poly.ambient_dim == 3
    assert len(poly.inequalities) == 12
    assert not poly.equalities


def test_full_polytope_shape():
    poly = build_feasible_polytope(kind("bell", 2), 4)
    assert poly.ambient_dim == 16
    assert len(poly.inequalities) == 32
    assert len(poly.equalities) == 4


def test_is_feasible_identity_povm():
    k = kind("oo", 4)
    p = SymPovm(k, (CoeffVector(k, (1, 1, 1)),))
    assert is_feasible(p).feasible


def test_is_feasible_reports_bell_pt_violation():
    p = bell_povm((1, 0, 0, 0), (0, 1, 1, 1))
    report = is_feasible(p)
    assert not report.feasible
    labels = [l for l, _ in report.violations]
    assert all(l[0] == "ppt" and l[1] == 0 for l in labels)


def test_is_feasible_isotropic_sepcon():
    for d in (2, 3, 4):
        k = kind("isotropic", d)
        bad = SymPovm(k, (CoeffVector(k, (1, Fraction(1, d + 2))),
                          CoeffVector(k, (0, Fraction(d + 1, d + 2)))))
        report = is_feasible(bad)
        assert not report.feasible
        assert any(l[0] == "ppt" for l, _ in report.violations)
        good = SymPovm(k, (CoeffVector(k, (1, Fraction(1, d + 1))),
                           CoeffVector(k, (0, Fraction(d, d + 1)))))
        assert is_feasible(good).feasible


def test_is_feasible_flags_incompleteness():
    k = kind("isotropic", 2)
    p = SymPovm(k, (CoeffVector(k, (1, 1)), CoeffVector(k, (1, 0))))
    report = is_feasible(p)
    assert not report.feasible
    assert any(l[0] == "complete" for l, _ in report.violations)


def test_feasible_bell_four_outcome_cycle():
    half = Fraction(1, 2)
    p = bell_povm((half, half, 0, 0), (0, half, half, 0),
                  (0, 0, half, half), (half, 0, 0, half))
    assert is_feasible(p).feasible


def test_lp_maximise_isotropic_weight():
    poly = build_feasible_polytope(kind("isotropic", 2), 2)
    res = lp_solve(LinearProgram(poly, (ONE, ZERO), sense="max"))
    assert res.status == "optimal"
    assert res.value == 1
    assert not poly.check_point(res.point)
    assert res.active_labels  # a vertex certificate is attached


def test_lp_bell_guessing_value():
    poly = build_feasible_polytope(kind("bell", 2), 4)
    quarter = Fraction(1, 4)
    objective = [ZERO] * 16
    for out in range(4):
        objective[out * 4 + out] = quarter
    res = lp_solve(LinearProgram(poly, tuple(objective), sense="max"))
    assert res.value == Fraction(1, 2)


def test_lp_infeasible_certificate_is_valid():
    toy = Polytope(1, (((ONE,), ONE, ("a", None, 0)),
                       ((-ONE,), ZERO, ("b", None, 0))), ())
    res = lp_solve(LinearProgram(toy, (ZERO,), sense="max"))
    assert res.status == "infeasible"
    # the combination of rows with these coefficients proves 0 >= positive
    rows = {("a", None, 0): ((ONE,), ONE), ("b", None, 0): ((-ONE,), ZERO)}
    combo = ZERO
    bound = ZERO
    for label, coeff in res.certificate:
        assert coeff >= 0
        row, rhs = rows[label]
        combo += coeff * row[0]
        bound += coeff * rhs
    assert combo == 0 and bound > 0


def test_lp_unbounded_raises():
    ray = Polytope(1, (((ONE,), ZERO, ("lo", None, 0)),), ())
    with pytest.raises(UnboundedLpError):
        lp_solve(LinearProgram(ray, (ONE,), sense="max"))


def test_lp_minimise_matches_negated_maximise():
    poly = build_feasible_polytope(kind("werner", 3), 2)
    res_min = lp_solve(LinearProgram(poly, (ONE, -ONE), sense="min"))
    res_max = lp_solve(LinearProgram(poly, (-ONE, ONE), sense="max"))
    assert res_min.value == -res_max.value


def test_convex_decompose_vertex_is_itself():
    k = kind("oo", 3)
    catalog = catalog_extrema(k, 2)
    vertex = catalog.ordered_povms()[3]
    res = convex_decompose(vertex, catalog)
    assert res.decomposed
    assert sum(w for _, w in res.weights) == 1
    nonzero = [(p, w) for p, w in res.weights if w]
    assert len(nonzero) == 1 and nonzero[0][0].coords() == vertex.coords()


def test_convex_decompose_random_feasible():
    rng = random.Random(23)
    k = kind("bell", 2)
    catalog = catalog_extrema(k, 4)
    povms = catalog.ordered_povms()
    for _ in range(25):
        weights = [Fraction(rng.randint(0, 10)) for _ in povms]
        weights[rng.randrange(len(povms))] += 1
        total = sum(weights)
        coords = [ZERO] * 16
        for w, p in zip(weights, povms):
            for i, c in enumerate(p.coords()):
                coords[i] += (w / total) * c
        target = povm_from_coords(k, 4, coords)
        res = convex_decompose(target, catalog)
        assert res.decomposed
        rebuilt = [ZERO] * 16
        for p, w in res.weights:
            for i, c in enumerate(p.coords()):
                rebuilt[i] += w * c
        assert tuple(rebuilt) == target.coords()


def test_convex_decompose_infeasible_point_has_certificate():
    k = kind("isotropic", 2)
    catalog = catalog_extrema(k, 2)
    outside = SymPovm(k, (CoeffVector(k, (1, Fraction(1, 4))),
                          CoeffVector(k, (0, Fraction(3, 4)))))
    assert not is_feasible(outside).feasible
    res = convex_decompose(outside, catalog)
    assert not res.decomposed
    assert res.certificate


@pytest.mark.parametrize("fam,d", [("isotropic", 2), ("werner", 3),
                                   ("bell", 2), ("oo", 3)])
def test_is_feasible_matches_operator_level_check(fam, d):
    from sympovm.operators import is_psd, partial_transpose
    from sympovm.symmetry import coeff_to_operator

    rng = random.Random(59)
    k = kind(fam, d)
    n = k.n_coeffs
    seen = {True: 0, False: 0}
    for _ in range(40):
        first = CoeffVector(k, tuple(Fraction(rng.randint(-2, 12), 12)
                                     for _ in range(n)))
        second = CoeffVector(k, tuple(1 - c for c in first.coeffs))
        p = SymPovm(k, (first, second))
        op_ok = all(is_psd(coeff_to_operator(e)) and
                    is_psd(partial_transpose(coeff_to_operator(e)))
                    for e in p.elements)
        assert is_feasible(p).feasible == op_ok
        seen[op_ok] += 1
    assert seen[True] and seen[False]


def test_lp_optimum_equals_vertex_sweep():
    from sympovm.extremal import enumerate_vertices

    rng = random.Random(53)
    plans = [("isotropic", 2, 2), ("werner", 3, 2), ("oo", 3, 2),
             ("oo", 3, 3), ("bell", 2, 3)]
    for fam, d, n in plans:
        poly = build_feasible_polytope(kind(fam, d), n)
        verts = [coords for coords, _ in enumerate_vertices(poly).points]
        for _ in range(6):
            objective = tuple(Fraction(rng.randint(-5, 5), 3)
                              for _ in range(poly.ambient_dim))
            res = lp_solve(LinearProgram(poly, objective, sense="max"))
            best = max(sum(c * v for c, v in zip(objective, vert))
                       for vert in verts)
            assert res.value == best


def test_polytope_and_lp_result_json():
    import json

    poly = build_feasible_polytope(kind("oo", 3), 2)
    blob = poly.to_json()
    assert blob["ambient_dim"] == 3 and len(blob["inequalities"]) == 12
    json.dumps(blob)  # serialisable
    res = lp_solve(LinearProgram(poly, (ONE, ZERO, ZERO), sense="max"))
    out = res.to_json()
    assert out["status"] == "optimal" and out["value"] == "1"
    assert out["vertex_certificate"]
    json.dumps(out)


def test_povm_json_round_trip():
    p = bell_povm((1, 1, 0, 0), (0, 0, 1, 1), (0, 0, 0, 0), (0, 0, 0, 0))
    blob = p.to_json()
    assert SymPovm.from_json(blob) == p
    assert SymPovm.from_json(blob).to_json() == blob
