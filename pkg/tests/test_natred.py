import numpy as np
import pytest

from flagcurv.errors import DimensionError
from flagcurv.lie import LieAlgebraSpec
from flagcurv.metrics import AlphaBetaMetric
from flagcurv.natred import (berwald_bracket_residual, levi_civita, natred_check_finsler,
                             natred_check_riemannian, parallel_X_check, theorem4_equivalence_harness)
from flagcurv.space import bundled_space, perturbed_space

from conftest import SU2, structure, su2, u2


def test_biinvariant_su2_is_naturally_reductive():
    rep = natred_check_riemannian(su2(), structure(3))
    assert rep.passed and rep.max_residual < 1e-15
    assert rep.samples == 27


@pytest.mark.parametrize("lam", [2.0, 0.5, 3.0])
def test_berger_fails_with_worst_triple(lam):
    rep = natred_check_riemannian(su2(), structure(3, np.diag([lam, 1.0, 1.0])))
    assert not rep.passed
    assert rep.max_residual == pytest.approx(abs(lam - 1.0), rel=1e-14)
    assert set(rep.worst) == {"e1", "e2", "e3"}


def test_sphere_quotient_passes():
    s2 = bundled_space("sphere_s2")
    assert natred_check_riemannian(s2.algebra, s2.structure).passed


def test_riemannian_check_is_basis_order_independent():
    perm = [2, 0, 1]  # new index of each old basis vector
    inv = np.argsort(perm)
    brackets = [(perm[i], perm[j], perm[k], c) for i, j, k, c in SU2]
    labels = [None] * 3
    for old, new in enumerate(perm):
        labels[new] = f"e{old + 1}"
    alg = LieAlgebraSpec(3, brackets, labels)
    psi = np.diag([2.0, 1.0, 1.0])[np.ix_(inv, inv)]
    a = natred_check_riemannian(su2(), structure(3, np.diag([2.0, 1.0, 1.0])))
    b = natred_check_riemannian(alg, structure(3, psi))
    assert a.max_residual == pytest.approx(b.max_residual, rel=1e-14)
    assert set(a.worst) == set(b.worst)


def test_levi_civita_is_metric_and_torsion_free(rng):
    alg, ms = su2(), structure(3, np.diag([1.7, 0.8, 1.2]))
    X, Y, Z = rng.normal(size=(3, 3))
    # torsion free on a Lie group: nabla_X Y - nabla_Y X = [X, Y]
    np.testing.assert_allclose(levi_civita(alg, ms, X, Y) - levi_civita(alg, ms, Y, X),
                               alg.bracket(X, Y), atol=1e-13)
    # left-invariant fields have constant inner products: <nabla_X Y, Z> + <Y, nabla_X Z> = 0
    val = ms.inner(levi_civita(alg, ms, X, Y), Z) + ms.inner(Y, levi_civita(alg, ms, X, Z))
    assert abs(val) < 1e-13


def test_parallel_X_examples():
    assert parallel_X_check(u2(), structure(4, np.diag([1, 1, 1, 2.0])), [0, 0, 0, 0.5]).passed
    assert parallel_X_check(LieAlgebraSpec(3, []), structure(3), [0.3, 0.2, 0.1]).passed
    rep = parallel_X_check(su2(), structure(3), [0, 0, 0.5])
    assert not rep.passed and rep.max_residual == pytest.approx(0.25, rel=1e-12)


def test_parallel_X_requires_X_in_m():
    s2 = bundled_space("sphere_s2")
    with pytest.raises(DimensionError):
        parallel_X_check(s2.algebra, s2.structure, [0, 0, 1.0])


def test_bracket_residual():
    assert berwald_bracket_residual(u2(), structure(4), [0, 0, 0, 1.0]) == 0.0
    assert berwald_bracket_residual(su2(), structure(3), [0, 0, 1.0]) == pytest.approx(1.0)


@pytest.mark.parametrize("name, passes", [("su2_biinvariant", True), ("u2_central", True),
                                          ("abelian_r3", True), ("su2_berger", False)])
def test_finsler_check_on_bundled_spaces(name, passes):
    desc = bundled_space(name)
    rep = natred_check_finsler(desc.metric(), desc.algebra, desc.structure, sample_count=60)
    assert rep.passed is passes
    assert rep.samples + len(rep.skipped) == 60
    assert rep.name == f"natred-finsler[{desc.family.value}]"


def test_finsler_check_is_seed_deterministic():
    desc = bundled_space("su2_berger")
    a = natred_check_finsler(desc.metric(), desc.algebra, sample_count=20, seed=3)
    b = natred_check_finsler(desc.metric(), desc.algebra, sample_count=20, seed=3)
    assert a.max_residual == b.max_residual and a.worst == b.worst


def test_harness_pass_fail_pass():
    spaces = [bundled_space(n) for n in ("su2_biinvariant", "su2_berger", "u2_central")]
    rep = theorem4_equivalence_harness("exponential", spaces, sample_count=60)
    verdicts = [(e.riemannian.passed, e.finsler.passed) for e in rep.entries]
    assert verdicts == [(True, True), (False, False), (True, True)]
    assert rep.all_agree and not rep.flagged
    assert all(e.in_scope for e in rep.entries)


def test_harness_marks_non_berwald_out_of_scope():
    desc = bundled_space("su2_biinvariant")
    tilted = type("S", (), {"name": "tilted", "algebra": desc.algebra, "structure": desc.structure,
                            "X": [0.0, 0.0, 0.4], "berwald": None})()
    rep = theorem4_equivalence_harness("exponential", [tilted], sample_count=30)
    e = rep.entries[0]
    assert not e.berwald and not e.in_scope and not e.flagged
    assert "not parallel" in e.reason


def test_harness_infinite_series_needs_X():
    rep = theorem4_equivalence_harness("infinite-series", [bundled_space("su2_biinvariant")])
    assert rep.entries[0].finsler is None and not rep.entries[0].in_scope


def test_harness_empty_list():
    rep = theorem4_equivalence_harness("exponential", [])
    assert rep.entries == [] and rep.all_agree


def test_harness_on_perturbations_of_u2(rng):
    desc = bundled_space("u2_central")
    spaces = [perturbed_space(desc, rng, name=f"u2~{i}") for i in range(3)]
    rep = theorem4_equivalence_harness("infinite-series", spaces, sample_count=60)
    assert all(e.berwald for e in rep.entries)
    assert rep.all_agree


def test_harness_bundled_suite_with_abelian():
    spaces = [bundled_space(n) for n in ("su2_biinvariant", "su2_berger", "abelian_r3")]
    for fam in ("exponential", "infinite-series"):
        rep = theorem4_equivalence_harness(fam, spaces, sample_count=60)
        assert [e.riemannian.passed for e in rep.entries] == [True, False, True]
        assert rep.all_agree
