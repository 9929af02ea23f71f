"""Forms layer: evaluation conventions, twists, families, sufficiency."""

import numpy as np
import pytest

from qstarlab import (EmptyFamily, FormFamily, IpsForm, NotInA0, NotIps,
                      ParseError, check_sufficiency, form_equal,
                      form_proportional, invariance_residual, is_dense,
                      load_bundle, twist, validate_family, validate_ips_form)


@pytest.fixture(scope="module")
def m2():
    return load_bundle("m2_diag")["instance"]


@pytest.fixture(scope="module")
def good(m2):
    return load_bundle("m2_diag")["families"]["good"]


@pytest.fixture(scope="module")
def bad():
    return load_bundle("m2_diag")["families"]["bad"]


def _rand_elem(alg, seed):
    rng = np.random.default_rng(seed)
    return alg.element(rng.normal(size=alg.dim) + 1j * rng.normal(size=alg.dim))


# -- evaluation ------------------------------------------------------------

def test_vector_state_eval_is_trace(m2):
    S = np.array([[2.0, 0.5], [0.5, 1.0]], dtype=complex)
    phi = IpsForm("vector_state", S)
    a, b = _rand_elem(m2, 1), _rand_elem(m2, 2)
    direct = np.trace(b.matrix.conj().T @ a.matrix @ S)
    assert abs(phi.eval(a, b) - direct) < 1e-12


def test_gram_matrix_matches_eval_on_basis(m2, good):
    phi = good.seeds[0]
    G = phi.gram(m2)
    for i in range(m2.dim):
        for j in range(m2.dim):
            v = phi.eval(m2.basis_element(j), m2.basis_element(i))
            assert abs(G[i, j] - v) < 1e-12


def test_gram_kind_eval(m2):
    G = np.diag([1.0, 2.0, 3.0, 4.0]).astype(complex)
    phi = IpsForm("gram", G)
    a, b = _rand_elem(m2, 3), _rand_elem(m2, 4)
    assert abs(phi.eval(a, b) - b.coeffs.conj() @ G @ a.coeffs) < 1e-12


def test_sesquilinearity(m2, good):
    phi = good.seeds[0]
    a, b = _rand_elem(m2, 5), _rand_elem(m2, 6)
    z = 0.7 - 1.3j
    assert abs(phi.eval(a * z, b) - z * phi.eval(a, b)) < 1e-10
    assert abs(phi.eval(a, b * z) - np.conj(z) * phi.eval(a, b)) < 1e-10
    # conjugate symmetry comes from positivity of the payload
    assert abs(phi.eval(a, b) - np.conj(phi.eval(b, a))) < 1e-10


def test_form_equal_across_kinds(m2, good):
    phi = good.seeds[0]
    psi = IpsForm("gram", phi.gram(m2))
    assert form_equal(phi, psi, m2)
    assert not form_equal(phi, IpsForm("gram", 3.0 * phi.gram(m2)), m2)
    assert form_proportional(phi, IpsForm("gram", 3.0 * phi.gram(m2)), m2)


def test_form_payload_validation():
    with pytest.raises(ParseError):
        IpsForm("unknown", np.eye(2))
    with pytest.raises(ParseError):
        IpsForm("gram", np.ones((2, 3)))


def test_gram_payload_must_match_instance(m2):
    phi = IpsForm("gram", np.eye(3, dtype=complex))
    with pytest.raises(ParseError):
        phi.gram(m2)


# -- twisting --------------------------------------------------------------

def test_twist_matches_definition_vector_state(m2, good):
    phi = good.seeds[0]
    x = m2.a0_basis_element(1)
    tw = twist(phi, x)
    a, b = _rand_elem(m2, 8), _rand_elem(m2, 9)
    ax = m2.element_from_matrix(a.matrix @ x.matrix)
    bx = m2.element_from_matrix(b.matrix @ x.matrix)
    assert abs(tw.eval(a, b) - phi.eval(ax, bx)) < 1e-10
    assert tw.label.endswith("^tw")


def test_twist_matches_definition_gram(m2, good):
    phi = IpsForm("gram", good.seeds[0].gram(m2))
    x = m2.a0_basis_element(1)
    tw = twist(phi, x)
    a, b = _rand_elem(m2, 10), _rand_elem(m2, 11)
    ax = m2.element_from_matrix(a.matrix @ x.matrix)
    bx = m2.element_from_matrix(b.matrix @ x.matrix)
    assert abs(tw.eval(a, b) - phi.eval(ax, bx)) < 1e-10


def test_twist_requires_subalgebra_element(m2, good):
    with pytest.raises(NotInA0):
        twist(good.seeds[0], m2.basis_element(1))


def test_twist_composition_order(m2, good):
    # twisting by x then y equals one twist by the product y.x
    phi = good.seeds[0]
    x = m2.a0_basis_element(1)
    y = m2.unit + m2.a0_basis_element(1) * 0.5
    yx = m2.element_from_matrix(y.matrix @ x.matrix)
    lhs = twist(twist(phi, x), y)
    rhs = twist(phi, yx)
    assert form_equal(lhs, rhs, m2)


# -- validation ------------------------------------------------------------

def test_seed_forms_validate(m2, good):
    for phi in good.seeds:
        rep = validate_ips_form(phi, m2)
        assert rep.accepted, [c.name for c in rep.checks if not c.passed]
        assert rep.rank_sub == rep.rank_full


def test_density_failure_detected(m2):
    # the normalized trace sees all four directions but the diagonal
    # subalgebra only reaches two of them
    halftrace = IpsForm("vector_state", np.eye(2, dtype=complex) / 2.0)
    assert not is_dense(halftrace, m2)
    rep = validate_ips_form(halftrace, m2)
    assert not rep.accepted
    assert rep.rank_sub < rep.rank_full
    rep2 = validate_ips_form(halftrace, m2, require_density=False)
    assert rep2.accepted


def test_invariance_failure_detected(m2):
    phi = IpsForm("gram", np.diag([1.0, 2.0, 3.0, 4.0]).astype(complex))
    res, scale = invariance_residual(phi, m2)
    assert res > 1e-3 * scale
    rep = validate_ips_form(phi, m2, require_density=False)
    assert any(c.name == "module-invariance" and not c.passed for c in rep.checks)


def test_invariance_holds_on_bundle_seeds(m2, good):
    for phi in good.seeds:
        res, scale = invariance_residual(phi, m2)
        assert res <= 1e-10 * scale


def test_negative_payload_rejected(m2):
    phi = IpsForm("gram", np.diag([1.0, -1.0, 1.0, 1.0]).astype(complex))
    rep = validate_ips_form(phi, m2, require_density=False)
    assert any(c.name == "payload-positive" and not c.passed for c in rep.checks)


# -- families and closure --------------------------------------------------

def test_unbalanced_family_is_seeds_exactly(m2, bad):
    assert bad.forms(m2) == bad.seeds


def test_balanced_closure_size(m2, good):
    forms = good.forms(m2)
    assert len(forms) == 2  # seed plus one genuinely new twist direction


def test_closure_drops_proportional_duplicates(m2, good):
    phi = good.seeds[0]
    fam = FormFamily([phi, IpsForm("gram", 3.0 * phi.gram(m2), label="scaled")],
                     balanced=True)
    assert len(fam.forms(m2)) == len(good.forms(m2))


def test_closure_drops_zero_twists(m2, bad):
    # the point state at the first coordinate dies under the twist by the
    # diagonal unit at the second; the closure must not keep a zero form
    fam = FormFamily(list(bad.seeds), balanced=True)
    forms = fam.forms(m2)
    assert len(forms) == 1
    assert all(np.linalg.norm(phi.gram(m2), 2) > 1e-12 for phi in forms)


def test_validate_family_bundles():
    for name in ("m2_diag", "m2_full", "m3_pattern", "m2_flip", "lp_k2_p4"):
        b = load_bundle(name)
        for fam in b["families"].values():
            rep = validate_family(fam, b["instance"])
            assert rep.accepted, (name, fam.label,
                                  [c.name for c in rep.checks if not c.passed])


def test_family_json_round_trip(m2, good):
    fam = FormFamily.from_json(good.as_jsonable())
    assert fam.balanced == good.balanced
    assert fam.twist_depth == good.twist_depth
    assert len(fam.seeds) == len(good.seeds)
    for a, b in zip(fam.seeds, good.seeds):
        assert form_equal(a, b, m2)


def test_family_json_default_labels():
    G = np.eye(2).tolist()
    fam = FormFamily.from_json(
        {"generators": [{"kind": "gram", "G": G}, {"kind": "gram", "G": G}]})
    assert [f.label for f in fam.seeds] == ["phi0", "phi1"]


# -- sufficiency -----------------------------------------------------------

def test_sufficient_family(m2, good):
    rep = check_sufficiency(good, m2)
    assert rep.sufficient
    assert rep.dim_null == 0
    assert rep.margin > 1e-6
    assert all(c.passed for c in rep.checks)


def test_insufficient_family_has_witness(m2, bad):
    rep = check_sufficiency(bad, m2)
    assert not rep.sufficient
    assert rep.dim_null == 2
    w = m2.element(np.array([complex(re, im) for re, im in
                             np.column_stack([np.real(rep.witness_coeffs),
                                              np.imag(rep.witness_coeffs)])]))
    assert abs(w.norm_frobenius() - 1.0) < 1e-9
    # the witness is annihilated by every stored form
    assert rep.max_witness_value <= 1e-10
    assert all(v <= 1e-10 for v in rep.witness_values.values())


def test_degeneracy_equivalence_checks_pass(m2, good, bad):
    for fam in (good, bad):
        rep = check_sufficiency(fam, m2)
        assert all(c.passed for c in rep.checks)


def test_empty_family_rejected(m2):
    with pytest.raises(EmptyFamily):
        check_sufficiency(FormFamily([]), m2)


def test_no_dense_generator_raises(m2, bad):
    with pytest.raises(NotIps):
        bad.dense_forms(m2)
