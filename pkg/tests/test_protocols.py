"""Protocol synthesis and exact verification tests."""

import json
import random
from fractions import Fraction

import pytest

from sympovm.extremal import catalog_extrema, oo_three_outcome_elements, oo_two_outcome_elements
from sympovm.feasible import SymPovm
from sympovm.operators import (
    BipartiteOperator,
    is_psd,
    ketbra,
    kraus_from_separable_form,
    mat_eye,
    tensor,
)
from sympovm.protocols import (
    InfeasibleTargetError,
    LocalProtocol,
    ProductTerm,
    bell_protocol,
    build_pure_state_set,
    cube_rotation_group,
    isotropic_protocol,
    oo_protocol,
    protocol_for_vertex,
    verify_protocol,
    werner_protocol,
)
from sympovm.symmetry import CoeffVector, kind, twirl_coefficients
from sympovm._acceptance import random_feasible_target


def iso_povm(d, *cols):
    k = kind("isotropic", d)
    return SymPovm(k, tuple(CoeffVector(k, c) for c in cols))


def test_isotropic_protocol_boundary_element():
    third = Fraction(1, 3)
    target = iso_povm(2, (1, third), (0, 2 * third))
    proto = isotropic_protocol(target)
    # x = 1, y = 0 puts the first outcome on sum_i |ii><ii|
    want = tensor(ketbra(0, 0, 2), ketbra(0, 0, 2)) + \
        tensor(ketbra(1, 1, 2), ketbra(1, 1, 2))
    assert proto.outcome_operator(0) == want
    assert twirl_coefficients(want, target.kind).coeffs == (1, third)
    assert verify_protocol(proto, target).ok


def test_isotropic_protocol_identity_and_complement():
    target = iso_povm(3, (1, 1))
    proto = isotropic_protocol(target)
    assert proto.outcome_operator(0) == BipartiteOperator.identity(3)
    d = 4
    target = iso_povm(d, (0, Fraction(d, d + 1)), (1, Fraction(1, d + 1)))
    proto = isotropic_protocol(target)
    # first outcome has x = 0, y = 1
    want = BipartiteOperator.zeros(d)
    for i in range(d):
        comp = [[(1 if (r == c and r != i) else 0) for c in range(d)]
                for r in range(d)]
        want = want + tensor(ketbra(i, i, d), comp)
    assert proto.outcome_operator(0) == want
    assert verify_protocol(proto, target).ok


def test_isotropic_protocol_refuses_infeasible():
    d = 3
    target = iso_povm(d, (1, Fraction(1, d + 2)), (0, Fraction(d + 1, d + 2)))
    with pytest.raises(InfeasibleTargetError) as err:
        isotropic_protocol(target)
    assert err.value.outcome == 0
    assert err.value.coefficient < 0


def test_werner_protocol_examples():
    k = kind("werner", 2)
    third = Fraction(1, 3)
    target = SymPovm(k, (CoeffVector(k, (1, third)), CoeffVector(k, (0, 2 * third))))
    proto = werner_protocol(target)
    assert verify_protocol(proto, target).ok
    # boundary x = 0 at b = a (d-1)/(d+1)
    d = 5
    kb = kind("werner", d)
    bound = SymPovm(kb, (CoeffVector(kb, (1, Fraction(d - 1, d + 1))),
                         CoeffVector(kb, (0, Fraction(2, d + 1)))))
    assert verify_protocol(werner_protocol(bound), bound).ok
    bad = SymPovm(kb, (CoeffVector(kb, (1, Fraction(1, d + 1))),
                       CoeffVector(kb, (0, Fraction(d, d + 1)))))
    with pytest.raises(InfeasibleTargetError):
        werner_protocol(bad)


@pytest.mark.parametrize("fam,synth", [("isotropic", isotropic_protocol),
                                       ("werner", werner_protocol)])
def test_random_feasible_targets_verify(fam, synth):
    rng = random.Random(31)
    for d in (2, 3, 4):
        k = kind(fam, d)
        for _ in range(25):
            target = random_feasible_target(rng, k, rng.randint(1, 4))
            assert verify_protocol(synth(target), target).ok


def test_bell_protocol_computational_split():
    k = kind("bell", 2)
    target = SymPovm(k, (CoeffVector(k, (0, 0, 1, 1)), CoeffVector(k, (1, 1, 0, 0))))
    proto = bell_protocol(target)
    got = twirl_coefficients(proto.outcome_operator(0), k)
    assert got.coeffs == (0, 0, 1, 1)
    assert verify_protocol(proto, target).ok


def test_bell_protocol_identity_is_do_nothing():
    k = kind("bell", 2)
    target = SymPovm(k, (CoeffVector(k, (1, 1, 1, 1)), CoeffVector(k, (0, 0, 0, 0))))
    proto = bell_protocol(target)
    assert len(proto.outcomes[0]) == 1
    assert proto.outcomes[1] == ()
    assert verify_protocol(proto, target).ok


def test_bell_protocol_all_catalog_entries():
    k = kind("bell", 2)
    for n in (2, 3):
        for povm in catalog_extrema(k, n).ordered_povms():
            assert verify_protocol(bell_protocol(povm), povm).ok


def test_bell_protocol_by_index_and_unknown():
    proto = bell_protocol(0)
    assert isinstance(proto, LocalProtocol)
    with pytest.raises(ValueError):
        bell_protocol(99)
    k = kind("bell", 2)
    with pytest.raises(ValueError):
        bell_protocol(SymPovm(k, (CoeffVector(k, (Fraction(1, 2), 0, 0, Fraction(1, 2))),
                                  CoeffVector(k, (Fraction(1, 2), 1, 1, Fraction(1, 2))))))


def test_cube_rotation_group_is_the_24_proper_rotations():
    mats = cube_rotation_group()
    assert len(mats) == 24
    assert len(set(mats)) == 24
    ident = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    assert ident in mats


def test_pure_state_set_shapes():
    assert len(build_pure_state_set(2).states) == 2
    s3 = build_pure_state_set(3)
    assert len(s3.states) == 24
    assert all(st.weight == Fraction(1, 8) for st in s3.states)
    s5 = build_pure_state_set(5)
    assert len(s5.states) == 26
    weights = sorted({st.weight for st in s5.states})
    assert weights == [Fraction(1, 8), Fraction(1)]


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_oo_protocol_d_outcome(d):
    k = kind("oo", d)
    named = oo_two_outcome_elements(d)
    proto = oo_protocol("D", d)
    got = twirl_coefficients(proto.outcome_operator(0), k)
    assert got.coeffs == (1, 0, Fraction(2, d + 2)) == named["D1"]
    target = SymPovm(k, (CoeffVector(k, named["D1"]), CoeffVector(k, named["D2"])))
    assert verify_protocol(proto, target).ok


def test_oo_protocol_b_and_triple_d3():
    k = kind("oo", 3)
    named = oo_two_outcome_elements(3)
    states = build_pure_state_set(3)
    proto = oo_protocol("B", 3, states)
    assert twirl_coefficients(proto.outcome_operator(0), k).coeffs == \
        (0, 0, Fraction(3, 5)) == named["B1"]
    triple = oo_protocol("triple", 3, states)
    target = SymPovm(k, tuple(CoeffVector(k, c) for c in oo_three_outcome_elements(3)))
    assert verify_protocol(triple, target).ok


def test_oo_protocol_bad_ids():
    with pytest.raises(ValueError):
        oo_protocol("E", 3)
    with pytest.raises(ValueError):
        oo_protocol("B", 4, build_pure_state_set(3))


@pytest.mark.parametrize("d", [3, 4])
def test_oo_all_catalog_entries_verify(d):
    k = kind("oo", d)
    states = build_pure_state_set(d)
    for n in (2, 3):
        for povm in catalog_extrema(k, n).ordered_povms():
            proto = protocol_for_vertex(povm, states)
            assert verify_protocol(proto, povm).ok


def test_verify_protocol_detects_corruption():
    third = Fraction(1, 3)
    target = iso_povm(2, (1, third), (0, 2 * third))
    proto = isotropic_protocol(target)
    terms = list(proto.outcomes[1])
    bad = ProductTerm(Fraction(1, 2), terms[0].a_factor, terms[0].b_factor)
    corrupted = LocalProtocol(proto.kind, (proto.outcomes[0], (bad,) + tuple(terms[1:])))
    report = verify_protocol(corrupted, target)
    assert not report.ok
    assert report.outcomes_ok == (True, False)
    assert report.diffs[1] is not None


def test_verify_protocol_outcome_count_mismatch():
    third = Fraction(1, 3)
    target = iso_povm(2, (1, third), (0, 2 * third))
    proto = isotropic_protocol(target)
    with pytest.raises(ValueError):
        verify_protocol(proto, iso_povm(2, (1, 1)))


def test_protocol_outcomes_sum_to_identity_before_twirl():
    rng = random.Random(37)
    k = kind("werner", 3)
    target = random_feasible_target(rng, k, 3)
    proto = werner_protocol(target)
    total = BipartiteOperator.zeros(3)
    for i in range(3):
        total = total + proto.outcome_operator(i)
    assert total == BipartiteOperator.identity(3)


def test_kraus_reconstructs_protocol_outcomes():
    rng = random.Random(41)
    k = kind("isotropic", 3)
    target = random_feasible_target(rng, k, 2)
    proto = isotropic_protocol(target)
    for i in range(2):
        terms = [(t.weight, t.a_factor, t.b_factor) for t in proto.outcomes[i]]
        pairs = kraus_from_separable_form(terms)
        total = BipartiteOperator.zeros(3)
        for p in pairs:
            total = total + p.element()
        assert total == proto.outcome_operator(i)


def test_oo_triple_outcome_factors_are_psd():
    # the leftover Bob factor 1 - |q><q| - (|q><q|)^T is PSD exactly because
    # the states are orthogonal to their own transposes
    from sympovm.operators import mat_is_hermitian, psd_exact

    proto = oo_protocol("triple", 5)
    for terms in proto.outcomes:
        for t in terms:
            assert mat_is_hermitian(t.b_factor) and psd_exact(t.b_factor)
    k = kind("oo", 5)
    target = SymPovm(k, tuple(CoeffVector(k, c) for c in oo_three_outcome_elements(5)))
    report = verify_protocol(proto, target)
    assert report.ok and report.factors_psd


def test_protocol_json_round_trip():
    third = Fraction(1, 3)
    target = iso_povm(2, (1, third), (0, 2 * third))
    proto = isotropic_protocol(target)
    blob = proto.to_json()
    again = LocalProtocol.from_json(json.loads(json.dumps(blob)))
    assert again.to_json() == blob
    assert verify_protocol(again, target).ok


def test_pure_state_set_json_round_trip():
    from sympovm.protocols import PureStateSet

    s = build_pure_state_set(5)
    blob = s.to_json()
    again = PureStateSet.from_json(json.loads(json.dumps(blob)))
    assert again.to_json() == blob
    # the reader re-validates; corrupting a weight must be rejected
    bad = json.loads(json.dumps(blob))
    bad["states"][0]["weight"] = "1/2"
    with pytest.raises(AssertionError):
        PureStateSet.from_json(bad)


def test_float_protocol_verifies_within_eps():
    third = Fraction(1, 3)
    target = iso_povm(2, (1, third), (0, 2 * third))
    proto = isotropic_protocol(target)
    blob = proto.to_json()
    for outcome in blob["outcomes"]:
        for term in outcome:
            for key in ("a", "b"):
                ent = term[key]["entries"]
                term[key]["entries"] = [[[float(Fraction(p[0])), float(Fraction(p[1]))]
                                         for p in row] for row in ent]
    floaty = LocalProtocol.from_json(blob)
    assert not floaty.exact
    assert verify_protocol(floaty, target, eps=1e-9).ok
