import pytest

from qpcox.classify import (
    ClassReport,
    check_w0_translation,
    class_report,
    iota,
    is_perfect,
    structure_check,
    survey,
    survey_cross_checks,
    twisted_classes,
    universal_qp_check,
)
from qpcox.coxeter import ExtElement, build_system
from qpcox.errors import NotInvolutionClass
from qpcox.qpsets import check_quasiparabolic, conjugacy_set


def ext(system, word, theta=None):
    theta = theta or system.identity_aut()
    return ExtElement(system.element_from_word(word), theta)


def nontrivial_involution(system):
    return next(
        a
        for a in system.diagram_automorphisms()
        if not a.is_identity() and (a * a).is_identity()
    )


def test_twisted_classes_a3_involutions():
    a3 = build_system("A3")
    classes = twisted_classes(a3, a3.identity_aut(), involutions_only=True)
    sizes = sorted(len(K) for K in classes)
    assert sizes == [1, 3, 6]  # {1}, fixed-point-free, transpositions


def test_twisted_classes_i24():
    i4 = build_system("I2(4)")
    id_classes = twisted_classes(i4, i4.identity_aut())
    by_seed = {K.payloads[0].x.word(): len(K) for K in id_classes}
    assert by_seed[(0,)] == 2 and by_seed[(1,)] == 2  # disjoint of size m = 2
    swap = nontrivial_involution(i4)
    K = iota(i4, swap)
    assert len(K) == 4  # size 2m


def test_iota_is_class_of_one():
    a2 = build_system("A2")
    swap = nontrivial_involution(a2)
    K = iota(a2, swap)
    assert any(p.x.is_identity() for p in K.payloads)


def test_is_perfect():
    a3 = build_system("A3")
    fpf = conjugacy_set(a3, ext(a3, (0, 2)))
    assert is_perfect(fpf)
    i8 = build_system("I2(8)")
    K = conjugacy_set(i8, ext(i8, (0,)))
    assert not is_perfect(K)  # m = 4 is not in {1, 2}
    a1 = build_system("A1")
    assert is_perfect(iota(a1, a1.identity_aut()))
    with pytest.raises(NotInvolutionClass):
        b2 = build_system("B2")
        is_perfect(conjugacy_set(b2, ext(b2, (0, 1))))  # rotation class


def test_i2_2m_perfectness_pattern():
    for m in (1, 2, 3, 4):
        sys = build_system(f"I2({2 * m})")
        gen_class = conjugacy_set(sys, ext(sys, (0,)))
        assert len(gen_class) == m
        assert is_perfect(gen_class) == (m in (1, 2))
        swap = nontrivial_involution(sys)
        aut_class = iota(sys, swap)
        assert len(aut_class) == 2 * m
        assert is_perfect(aut_class) == (m == 1)
        assert check_quasiparabolic(gen_class).is_qp
        assert check_quasiparabolic(aut_class).is_qp


def test_structure_check_fpf():
    a3 = build_system("A3")
    flags = structure_check(conjugacy_set(a3, ext(a3, (0, 2))))
    assert flags.all_ok()


def test_structure_check_trivial_class():
    a2 = build_system("A2")
    swap = nontrivial_involution(a2)
    flags = structure_check(iota(a2, swap))
    assert flags.all_ok()


def test_survey_a3():
    a3 = build_system("A3")
    reports = survey(a3, thetas=[a3.identity_aut()])
    assert not survey_cross_checks(reports)
    qp_inv = [r for r in reports if r.qp.is_qp]
    seeds = sorted(r.seed_word for r in qp_inv)
    assert seeds == [(), (0, 2)]  # {1} and the fpf class only
    s1_class = next(r for r in reports if r.seed_word == (0,))
    assert not s1_class.qp.is_qp and s1_class.qp.axiom == "QP1"


def test_survey_a2_class_of_s1_witness():
    a2 = build_system("A2")
    reports = survey(a2, thetas=[a2.identity_aut()])
    assert not survey_cross_checks(reports)
    s1_class = next(r for r in reports if r.seed_word == (0,))
    assert not s1_class.qp.is_qp
    assert s1_class.qp.witness()["axiom"] == "QP1"


def test_survey_d4_triality():
    d4 = build_system("D4")
    rot = next(a for a in d4.diagram_automorphisms() if a.order() == 3)
    reports = survey(d4, thetas=[rot])
    assert not survey_cross_checks(reports)
    unique_min = [r for r in reports if r.n_min_length == 1]
    assert sorted(r.seed_word for r in unique_min) == [(), (1,)]
    for r in unique_min:
        assert not r.qp.is_qp
        assert r.qp.axiom == "QP1"
    # no class in this twisted part is quasiparabolic (theta is not an involution)
    assert not any(r.qp.is_qp for r in reports)


def test_survey_exhaustive_small_types():
    for t in ("A2", "B2", "I2(6)"):
        sys = build_system(t)
        reports = survey(sys)
        assert not survey_cross_checks(reports)
        for r in reports:
            if r.qp.is_qp:
                assert r.is_twisted_involution_class
            if r.perfect:
                assert r.qp.is_qp


def test_w0_translation_reverses_orders():
    assert check_w0_translation(build_system("A3"))
    assert check_w0_translation(build_system("B2"))


def test_odd_dihedral_automorphism_class_is_not_qp():
    # A2 = I2(3): the twisted identities of the diagram flip have a unique
    # minimal element but still violate QP1; the singleton (w0, flip) is QP
    a2 = build_system("A2")
    swap = nontrivial_involution(a2)
    K = iota(a2, swap)
    assert len(K) == 3 and K.height2 == [0, 2, 2]
    verdict = check_quasiparabolic(K)
    assert not verdict.is_qp and verdict.axiom == "QP1"
    w0_class = conjugacy_set(a2, ExtElement(a2.longest_element(), swap))
    assert len(w0_class) == 1
    assert check_quasiparabolic(w0_class).is_qp


def test_qp_classes_have_unique_w_minimal_point():
    for t in ("A3", "B2", "I2(6)", "D4"):
        sys = build_system(t)
        for rep in survey(sys):
            if rep.qp.is_qp:
                assert rep.n_w_minimal == 1
                assert rep.n_min_length == 1


def test_universal_qp_check():
    u3 = build_system("U3")
    rot = next(a for a in u3.diagram_automorphisms() if a.order() == 3)
    verdict = universal_qp_check(u3, ExtElement(u3.identity, rot))
    assert verdict.is_qp and not verdict.in_iplus  # theta^2 != 1

    u2 = build_system("U2")
    v2 = universal_qp_check(u2, ext(u2, (0,)))
    assert v2.is_qp and v2.in_iplus

    v3 = universal_qp_check(u3, ext(u3, (0, 1)))
    assert not v3.is_qp
    assert v3.stuck_length == 2


def test_universal_truncated_brute_force_agrees():
    u3 = build_system("U3")
    rot = next(a for a in u3.diagram_automorphisms() if a.order() == 3)
    cases = [
        ExtElement(u3.identity, rot),
        ext(u3, (0,)),
        ext(u3, (0, 1)),
    ]
    for seed in cases:
        criterion = universal_qp_check(u3, seed)
        K = conjugacy_set(u3, seed, cutoff=6)
        brute = check_quasiparabolic(K)
        assert brute.is_qp == criterion.is_qp


def test_report_rows_and_json():
    a2 = build_system("A2")
    reports = survey(a2, thetas=[a2.identity_aut()])
    for r in reports:
        row = r.row()
        assert row[0] == "A2" and isinstance(row[2], int)
        d = r.to_json()
        assert d["qp"] == r.qp.is_qp


def test_diagnostics_fields():
    a3 = build_system("A3")
    rep = class_report(conjugacy_set(a3, ext(a3, (0, 2))), diagnostics=True)
    assert rep.order_agrees is True
    assert rep.strong_exchange_ok is True
