from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncsg.algebra import Platform, SubsetSpec, centralizer_elements, commute, sample
from ncsg.braid import standard_commuting_subgroups
from ncsg.conditions import (
    CONDITION_A,
    CONDITION_B,
    ConditionError,
    ZIsIdentity,
    ZNotIdentity,
    check_condition_a,
    check_condition_b,
    platform_report,
    select_method2,
    select_method3,
    subsets_commute,
)
from ncsg.presets import preset
from ncsg.protocols import ProtocolParams

S6 = Platform.permutation(6)
c = S6.cycles


def _one(label, *gens):
    return SubsetSpec(tuple(gens), label)


def _params(z, la, ra, lb, rb, variant="a"):
    return ProtocolParams(S6, z, _one("L_A", *la), _one("R_A", *ra), _one("L_B", *lb),
                          _one("R_B", *rb), condition_variant=variant, check=False)


def _sdg_subgroups(n, z):
    lb, ub = standard_commuting_subgroups(n)
    return ProtocolParams(Platform.braid(n), z, lb.relabel("L_A"), lb.relabel("R_A"),
                          ub.relabel("L_B"), ub.relabel("R_B"),
                          condition_variant="b" if z.is_identity() else "a", check=False)


def test_clause_tables_have_the_expected_shape():
    assert len(CONDITION_A) == 8 and len(CONDITION_B) == 6


def test_identity_sets_commute():
    e = SubsetSpec((S6.identity(),))
    assert subsets_commute(e, e) == (True, None)


def test_lb_and_ub_commute():
    lb, ub = standard_commuting_subgroups(6)
    assert subsets_commute(lb, ub)[0]


def test_adjacent_generators_do_not_commute_and_give_a_witness():
    b3 = Platform.braid(3)
    ok, witness = subsets_commute(SubsetSpec((b3.word(1),)), SubsetSpec((b3.word(2),)))
    assert not ok
    assert witness == (b3.word(1), b3.word(2))


def test_condition_a_on_six_point_transpositions():
    p = _params(c((2, 4), (5, 6)), [c((1, 2))], [c((1, 5))], [c((3, 4))], [c((3, 6))])
    report = check_condition_a(p)
    assert report.all_hold
    assert [cl.label for cl in report.clauses] == [
        "[L_A,L_B]=1", "[R_A,R_B]=1", "[L_B,Z]!=1", "[L_A,Z]!=1",
        "[R_B,Z]!=1", "[R_A,Z]!=1", "[L_A,R_A]!=1", "[L_B,R_B]!=1",
    ]


def test_condition_a_on_sdg_subgroups_with_mixed_z():
    z = Platform.braid(6).word(1, 2, 3, 4, 5, 3)
    assert check_condition_a(_sdg_subgroups(6, z)).all_hold


def test_condition_a_pinpoints_the_failing_clause():
    b = Platform.braid(6)
    s1 = SubsetSpec((b.word(1),))
    p = ProtocolParams(b, b.word(1, 2, 3, 4, 5, 3), s1.relabel("L_A"), s1.relabel("R_A"),
                       s1.relabel("L_B"), SubsetSpec((b.word(4),), "R_B"), check=False)
    report = check_condition_a(p)
    failing = {cl.label for cl in report.failing()}
    assert "[L_A,R_A]!=1" in failing
    assert "[L_A,L_B]=1" not in failing
    assert report.clause("[L_A,R_A]!=1").witness is None


def test_condition_b_fails_for_sdg_subgroups_with_trivial_z():
    report = check_condition_b(_sdg_subgroups(6, Platform.braid(6).identity()))
    assert not report.all_hold
    failing = {cl.label for cl in report.failing()}
    assert failing == {"[L_B,R_A]!=1", "[L_A,R_B]!=1"}


def test_documented_condition_b_example_is_computed_faithfully():
    # (1 2)/(3 5) and (3 4)/(1 6) have disjoint supports, so two clauses fail
    p = _params(S6.identity(), [c((1, 2))], [c((3, 5))], [c((3, 4))], [c((1, 6))], "b")
    report = check_condition_b(p)
    assert not report.all_hold
    assert {cl.label for cl in report.failing()} == {"[L_A,R_A]!=1", "[L_B,R_B]!=1"}


def test_condition_b_holds_on_the_corrected_example():
    p = _params(S6.identity(), [c((1, 2))], [c((2, 3))], [c((3, 4))], [c((1, 4))], "b")
    assert check_condition_b(p).all_hold


def test_equal_abelian_subsets_fail_every_non_commutation_clause():
    s = [c((1, 2))]
    report = check_condition_b(_params(S6.identity(), s, s, s, s, "b"))
    assert {cl.label for cl in report.failing()} == {
        cl.label for cl in report.clauses if cl.required == "not-commute"}


def test_z_decides_which_condition_applies():
    p = preset("perm6")
    with pytest.raises(ZNotIdentity):
        check_condition_b(p)
    with pytest.raises(ZIsIdentity):
        check_condition_a(preset("perm6-b"))


def test_report_table_mentions_every_clause():
    text = preset("perm6").report().table()
    assert "all clauses hold" in text
    assert text.count("\n") == 9


# --- selection methods ---------------------------------------------------------------


def test_method2_with_three_cycle_anchor():
    s3 = Platform.permutation(3)
    r = s3.cycles((1, 2, 3))
    out = select_method2(s3, random.Random(1), anchors=(r, s3.identity()))
    cent = {s3.identity(), r, s3.cycles((1, 3, 2))}
    assert set(out.subsets["L_B"].generators) <= cent
    assert out.invariants_hold()


def test_method2_with_identity_anchors_may_publish_all_of_g():
    s3 = Platform.permutation(3)
    out = select_method2(s3, random.Random(0), anchors=(s3.identity(), s3.identity()),
                         max_generators=10)
    assert len(out.subsets["L_B"].generators) == 5


def test_method2_matrix_anchor_draws_from_the_centralizer():
    g = Platform.matrix(2, 3)
    u = g.matrix_of([[1, 1], [0, 1]])
    out = select_method2(g, random.Random(3), anchors=(u, u))
    cent = set(centralizer_elements(g, [u]))
    assert set(out.subsets["L_B"].generators) <= cent
    assert set(out.subsets["R_B"].generators) <= cent


def test_method3_with_three_cycle_anchors():
    s3 = Platform.permutation(3)
    r = s3.cycles((1, 2, 3))
    out = select_method3(s3, random.Random(2), anchors=(r, r))
    cent = {s3.identity(), r, s3.cycles((1, 3, 2))}
    assert set(out.subsets["L_B"].generators) <= cent
    assert set(out.subsets["R_A"].generators) <= cent


def test_supplied_family_must_commute_with_its_anchor():
    s3 = Platform.permutation(3)
    with pytest.raises(ConditionError):
        select_method2(s3, random.Random(0), anchors=(s3.cycles((1, 2, 3)), s3.identity()),
                       families=([s3.cycles((1, 2))], None))


def test_braid_selection_needs_supplied_families():
    b = Platform.braid(6)
    out = select_method3(b, random.Random(0), anchors=(b.word(1, 2), b.word(4, 5)),
                         families=([b.word(4), b.word(5)], [b.word(1), b.word(2)]))
    assert out.invariants_hold()
    with pytest.raises(Exception):
        select_method3(b, random.Random(0), anchors=(b.word(1), b.word(4)))


@pytest.mark.parametrize("platform", [Platform.permutation(5), Platform.matrix(2, 3)],
                         ids=["perm5", "mat23"])
@pytest.mark.parametrize("select", [select_method2, select_method3], ids=["m2", "m3"])
def test_selection_invariants_over_seeds(platform, select):
    for seed in range(100):
        out = select(platform, random.Random(seed))
        assert out.invariants_hold()
        a1 = out.private_anchors["a1"]
        assert all(commute(g, a1) for g in out.subsets["L_B"].generators)


def test_secret_subsets_pin_the_anchors():
    s4 = Platform.permutation(4)
    out = select_method2(s4, random.Random(9))
    secret = out.secret_subsets()
    assert secret["L_A"].generators == (out.private_anchors["a1"],)
    assert secret["R_A"].generators == (out.private_anchors["a2"],)
    assert len(out.subsets["L_A"].generators) > 1


@given(st.integers(0, 2**32))
def test_commutation_propagates_from_generators_to_products(seed):
    rng = random.Random(seed)
    p = preset("perm6")
    x, y = sample(p.L_A, rng), sample(p.L_B, rng)
    assert commute(x, y)


def test_platform_report_distinguishes_finite_and_braid_platforms():
    braid = {r.name: r for r in platform_report(Platform.braid(4), growth_length=3)}
    assert braid["P1"].status is True and braid["P5"].status is None
    finite = {r.name: r for r in platform_report(Platform.permutation(4), growth_length=3)}
    assert finite["P1"].status is False and finite["P6"].status is False
