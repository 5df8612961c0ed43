import pytest

from cohh.fields import QQ, GF, ShapeMismatch
from cohh.linalg import Matrix
from cohh.dg import (
    GradedCoalgebra, GradedBicomodule, Complex,
    DifferentialNotSquareZero, NotChainMap, NotSimplyConnected, CutoffTooSmall,
    trivial_graded_coalgebra, exterior_coalgebra, acyclic_two_stage_coalgebra,
    opposite_graded, tensor_graded_coalgebra, graded_tau,
    regular_graded_bicomodule, cofree_graded_bicomodule,
    unit_left_graded, unit_right_graded, envelope_bicomodules,
    conormalized_cobar, cotor, dg_cohh, cohh_envelope,
    derived_shadow_theta, cobar_associator_check,
)


def s2(field=QQ):
    return exterior_coalgebra(field, 2)


def s3(field=QQ):
    return exterior_coalgebra(field, 3)


# -- validation -----------------------------------------------------------------


def test_exterior_valid_and_simply_connected():
    c = s2()
    assert c.simply_connected
    assert s3().simply_connected
    assert not exterior_coalgebra(QQ, 1).simply_connected


def test_degree_dropping_differential_rejected():
    f = QQ
    one = f.one()
    comul = Matrix(f, 4, 2, {(0, 0): one, (1 * 2 + 0, 1): one, (0 * 2 + 1, 1): one})
    counit = Matrix(f, 1, 2, {(0, 0): one})
    bad = Matrix(f, 2, 2, {(0, 1): one})  # d(x) = 1 drops degree by 2
    with pytest.raises(ShapeMismatch):
        GradedCoalgebra(f, ["1", "x"], [0, 2], comul, counit, bad)


def test_d_squared_enforced():
    f = QQ
    one = f.one()
    n = 3
    comul = Matrix(f, 9, 3, {(0, 0): one,
                             (1 * n + 0, 1): one, (0 * n + 1, 1): one,
                             (2 * n + 0, 2): one, (0 * n + 2, 2): one})
    counit = Matrix(f, 1, 3, {(0, 0): one})
    # d(z) = y, d(y) = ... cannot square to zero unless d(y) = 0; force a
    # degree-compatible violation with degrees 0,1,2 -- but degree 1 content
    # also breaks simple connectivity, not validity
    diff = Matrix(f, 3, 3, {(1, 2): one, (0, 1): one})
    with pytest.raises((DifferentialNotSquareZero, NotChainMap)):
        GradedCoalgebra(f, ["1", "y", "z"], [0, 1, 2], comul, counit, diff)


def test_chain_map_violation_detected():
    f = QQ
    one = f.one()
    n = 3
    # Delta(z) = z (x) 1 + 1 (x) z + y (x) y would break the chain rule with
    # d(z) = y (degrees 0,2,3: y (x) y sits in degree 4 != 3, so instead make
    # the counit fail the chain rule via d landing in degree 0)
    comul = Matrix(f, 9, 2, {(0, 0): one, (1 * 2 + 0, 1): one, (0 * 2 + 1, 1): one})
    with pytest.raises(ShapeMismatch):
        GradedCoalgebra(f, ["1", "x"], [0, 1, 9], comul, Matrix(f, 1, 2, {(0, 0): one}))


def test_acyclic_coalgebra_valid():
    c = acyclic_two_stage_coalgebra(QQ)
    assert c.simply_connected
    assert not (c.diff.is_zero())


def test_opposite_and_tensor_graded():
    c = s3()
    op = opposite_graded(c)
    # x odd: tau introduces no sign against 1, and x (x) x does not occur
    assert op.comul == c.comul
    t = tensor_graded_coalgebra(s2(), s3())
    assert t.dims_by_degree() == {0: 1, 2: 1, 3: 1, 5: 1}
    assert t.simply_connected


def test_graded_tau_signs():
    t = graded_tau(QQ, [1], [1])
    assert t == Matrix(QQ, 1, 1, {(0, 0): QQ.of(-1)})
    t2 = graded_tau(QQ, [2], [3])
    assert t2 == Matrix.identity(QQ, 1)


def test_envelope_bicomodules_validate():
    for c in (s2(), s3(), acyclic_two_stage_coalgebra(QQ)):
        ce, m_right, m_left = envelope_bicomodules(c)
        assert ce.simply_connected


# -- cobar and CoTor -------------------------------------------------------------


def test_cobar_word_counts_s2():
    c = s2()
    cx = conormalized_cobar(unit_right_graded(c), c, unit_left_graded(c), cutoff=8)
    # one word of every length: T(s^{-1}x) with |s^{-1}x| = 1
    assert cx.dims() == {t: 1 for t in range(9)}
    for t in range(9):
        assert cx.boundary(t).is_zero()


def test_cobar_word_counts_s3():
    c = s3()
    cx = conormalized_cobar(unit_right_graded(c), c, unit_left_graded(c), cutoff=8)
    assert cx.dims() == {0: 1, 1: 0, 2: 1, 3: 0, 4: 1, 5: 0, 6: 1, 7: 0, 8: 1}


def test_cotor_s2_tensor_algebra():
    c = s2()
    r = cotor(unit_right_graded(c), c, unit_left_graded(c), cutoff=8)
    assert r["homology"] == {t: 1 for t in range(9)}
    assert r["bigraded"] == {(q, q): 1 for q in range(9)}


def test_cotor_s3_polynomial():
    c = s3()
    r = cotor(unit_right_graded(c), c, unit_left_graded(c), cutoff=8)
    assert r["homology"] == {0: 1, 1: 0, 2: 1, 3: 0, 4: 1, 5: 0, 6: 1, 7: 0, 8: 1}
    assert r["bigraded"] == {(q, 2 * q): 1 for q in range(5)}


def test_cotor_acyclic_is_unit():
    c = acyclic_two_stage_coalgebra(QQ)
    r = cotor(unit_right_graded(c), c, unit_left_graded(c), cutoff=7)
    assert r["homology"] == {0: 1, 1: 0, 2: 0, 3: 0, 4: 0, 5: 0, 6: 0, 7: 0}
    assert r["bigraded"] is None  # nonzero internal differential


def test_cotor_regular_against_corner():
    # CoTor(C, C, k) = k in degree 0: the cobar resolution collapses
    c = s2()
    r = cotor(regular_graded_bicomodule(c), c, unit_left_graded(c), cutoff=6)
    assert r["homology"] == {0: 1, 1: 0, 2: 0, 3: 0, 4: 0, 5: 0, 6: 0}


def test_cobar_rejects_non_simply_connected():
    c = exterior_coalgebra(QQ, 1)
    with pytest.raises(NotSimplyConnected):
        conormalized_cobar(unit_right_graded(c), c, unit_left_graded(c), cutoff=4)


def test_cutoff_guard():
    c = s2()
    with pytest.raises(CutoffTooSmall):
        conormalized_cobar(unit_right_graded(c), c, unit_left_graded(c), cutoff=-1)


# -- dg coHH vs the envelope oracle ---------------------------------------------------


def test_dg_cohh_trivial_coalgebra():
    k = trivial_graded_coalgebra(QQ)
    r = dg_cohh(regular_graded_bicomodule(k), k, cutoff=5)
    assert r["homology"] == {0: 1, 1: 0, 2: 0, 3: 0, 4: 0, 5: 0}


def test_dg_cohh_degree_zero_is_unit():
    for c in (s2(), s3(), acyclic_two_stage_coalgebra(QQ)):
        r = dg_cohh(regular_graded_bicomodule(c), c, cutoff=3)
        assert r["homology"][0] == 1


@pytest.mark.parametrize("builder", [s2, s3])
def test_envelope_oracle_agreement(builder):
    c = builder()
    h1 = dg_cohh(regular_graded_bicomodule(c), c, cutoff=6)
    h2 = cohh_envelope(c, cutoff=6)
    assert h1["homology"] == h2["homology"]


def test_envelope_oracle_agreement_fp():
    c = s2(GF(7))
    h1 = dg_cohh(regular_graded_bicomodule(c), c, cutoff=6)
    h2 = cohh_envelope(c, cutoff=6)
    assert h1["homology"] == h2["homology"]


def test_euler_audit_runs_everywhere():
    c = s3()
    r = dg_cohh(regular_graded_bicomodule(c), c, cutoff=6)
    assert r["complex"].euler_audit()


# -- derived shadow ------------------------------------------------------------------


def test_derived_shadow_s2():
    reg = regular_graded_bicomodule(s2())
    rep = derived_shadow_theta(reg, reg, cutoff=6)
    assert rep.ok()
    assert rep.side_a.complex.homology_dims() == rep.side_b.complex.homology_dims()


def test_derived_shadow_mixed_cofree():
    m = cofree_graded_bicomodule(s2(), s3())
    n = cofree_graded_bicomodule(s3(), s2())
    rep = derived_shadow_theta(m, n, cutoff=6)
    assert rep.ok()


def test_derived_shadow_with_differential():
    ac = acyclic_two_stage_coalgebra(QQ)
    m = cofree_graded_bicomodule(ac, s3())
    n = cofree_graded_bicomodule(s3(), ac)
    rep = derived_shadow_theta(m, n, cutoff=5)
    assert rep.ok()


def test_derived_shadow_sign_on_odd_blocks():
    # on a word m | d-bar | n | c-bar whose two blocks both have odd
    # desuspended degree, theta carries the Koszul sign -1
    reg = regular_graded_bicomodule(s2())
    rep = derived_shadow_theta(reg, reg, cutoff=3)
    sa = rep.side_a
    found = False
    for col, (i, dw, j, cw) in enumerate(sa.basis[2]):
        if len(dw) == 1 and len(cw) == 1 and sa.m.degrees[i] == 0 and sa.n.degrees[j] == 0:
            row = rep.side_b.basis[2].index((j, cw, i, dw))
            assert rep.theta[2][(row, col)] == QQ.of(-1)
            found = True
    assert found


def test_derived_shadow_trivial_coalgebra_matches_plain_swap():
    # for C = D = k the complex is concentrated in the carrier degrees and
    # theta is the plain swap, matching the discrete shadow
    k = trivial_graded_coalgebra(QQ)
    m = cofree_graded_bicomodule(k, k)
    rep = derived_shadow_theta(m, m, cutoff=2)
    assert rep.ok()
    assert rep.side_a.complex.dims()[0] == 1


def test_derived_shadow_requires_simply_connected():
    c = exterior_coalgebra(QQ, 1)
    m = regular_graded_bicomodule(c)
    with pytest.raises(NotSimplyConnected):
        derived_shadow_theta(m, m, cutoff=3)


# -- iterated cobar associativity ------------------------------------------------------


def test_associator_all_s2():
    c = s2()
    reg = regular_graded_bicomodule(c)
    rep = cobar_associator_check(reg, c, reg, c, reg, cutoff=5)
    assert rep.ok()
    assert rep.total_complex.euler_audit()


def test_associator_mixed_with_differential():
    ac = acyclic_two_stage_coalgebra(QQ)
    c3 = s3()
    m = unit_right_graded(ac)
    n = cofree_graded_bicomodule(ac, c3)
    p = unit_left_graded(c3)
    rep = cobar_associator_check(m, ac, n, c3, p, cutoff=5)
    assert rep.ok()


def test_associator_degenerate_reduces_to_plain_cobar():
    # with E = k and P = k the trigraded total differential must coincide
    # with the two-sided conormalized cobar over D
    c = s2()
    k = trivial_graded_coalgebra(QQ)
    m = regular_graded_bicomodule(c)
    n_bi = GradedBicomodule(c, k, c.labels, c.degrees, c.comul,
                            Matrix.identity(QQ, c.dim), c.diff)
    p = GradedBicomodule(k, k, ["p"], [0],
                         Matrix.identity(QQ, 1), Matrix.identity(QQ, 1))
    rep = cobar_associator_check(m, c, n_bi, k, p, cutoff=5)
    assert rep.ok()
    plain = conormalized_cobar(m, c, n_bi, cutoff=5)
    for t in range(6):
        tri_words = rep.total_complex.basis[t]
        plain_words = plain.basis[t]
        assert [(i, dw, j) for (i, dw, j, ew, kk) in tri_words] == plain_words
        assert rep.total_complex.boundary(t).entries == plain.boundary(t).entries


def test_iterated_dims_agree_per_tridegree():
    c = s2()
    reg = regular_graded_bicomodule(c)
    rep = cobar_associator_check(reg, c, reg, c, reg, cutoff=4)
    # (i, j, t) table is a single shared carrier: spot-check a few entries
    assert rep.dims_by_tri_degree[(0, 0, 0)] == 1
    assert (1, 0, 1) in rep.dims_by_tri_degree
    assert (0, 1, 1) in rep.dims_by_tri_degree
