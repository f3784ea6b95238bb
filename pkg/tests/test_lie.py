import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flagcurv.errors import DimensionError
from flagcurv.lie import LieAlgebraSpec, MetricStructure, jacobi_tensor, validate_spec

from conftest import SU2, random_spd, structure, su2


def test_su2_brackets():
    g = su2()
    e = np.eye(3)
    assert np.allclose(g.bracket(e[0], e[1]), e[2])
    assert np.allclose(g.bracket(e[1], e[0]), -e[2])
    assert np.allclose(g.bracket(e[2], e[0]), e[1])


def test_unlisted_pairs_filled_by_antisymmetry():
    g = LieAlgebraSpec(2, [(0, 1, 1, 1.0)])
    assert g.constants[1, 0, 1] == -1.0


def test_projections_split_vector():
    g = su2(h=(2,))
    v = np.array([1.0, 2.0, 3.0])
    assert np.allclose(g.project_m(v), [1, 2, 0])
    assert np.allclose(g.project_h(v), [0, 0, 3])
    assert g.m_indices == (0, 1)


def test_bad_dimensions():
    with pytest.raises(DimensionError):
        LieAlgebraSpec(0, [])
    with pytest.raises(DimensionError):
        LieAlgebraSpec(2, [(0, 2, 1, 1.0)])
    with pytest.raises(DimensionError):
        su2().bracket(np.zeros(2), np.zeros(3))


def test_psi_inverse_roundtrip(rng):
    P = random_spd(rng, 4)
    ms = MetricStructure(np.eye(4), P)
    v = rng.normal(size=4)
    assert np.allclose(ms.psi_apply(ms.psi_inverse_apply(v)), v, atol=1e-13)
    assert np.allclose(ms.gram, P)


def test_clean_su2_passes_all_checks():
    rep = validate_spec(su2(), structure(3))
    assert rep.ok and not rep.hypothesis_violated


def test_jacobi_violation_is_detected():
    # [e1,e2] = e3, [e1,e3] = e1 is not a Lie algebra
    g = LieAlgebraSpec(3, [(0, 1, 2, 1.0), (0, 2, 0, 1.0)])
    rep = validate_spec(g, structure(3))
    assert "jacobi" in [it.name for it in rep.errors]
    assert rep.get("jacobi").residual == pytest.approx(1.0)


def test_non_bi_invariant_product_is_a_warning():
    rep = validate_spec(su2(), MetricStructure(np.diag([2.0, 1, 1])))
    assert rep.ok
    assert rep.hypothesis_violated
    assert [w.name for w in rep.warnings] == ["bi-invariance"]


def test_x_outside_m_rejected():
    rep = validate_spec(su2(h=(2,)), structure(3), X=[0, 0, 1.0])
    assert "X in m" in [it.name for it in rep.errors]


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=9, max_size=9))
def test_jacobi_tensor_vanishes_on_su2(vals):
    J = jacobi_tensor(su2().constants)
    assert np.max(np.abs(J)) < 1e-14
    a, b, c = np.reshape(vals, (3, 3))
    g = su2()
    cyc = g.bracket(g.bracket(a, b), c) + g.bracket(g.bracket(b, c), a) + g.bracket(g.bracket(c, a), b)
    assert np.max(np.abs(cyc)) < 1e-9 * (1 + np.max(np.abs(vals)) ** 3)


def test_sign_flipped_su2_constants_satisfy_jacobi():
    # [e1,e2]=e3, [e2,e3]=e1, [e3,e1]=-e2 is a real form of sl(2), not a Jacobi failure
    alg = LieAlgebraSpec(3, [(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, -1.0)])
    assert validate_spec(alg, MetricStructure(np.eye(3))).get("jacobi").passed
