import pytest
from fractions import Fraction as Q

from hfps.graded import Algebra
from hfps.cdga import (
    Cdga,
    CdgaMorphism,
    InvalidCdga,
    compose,
    identity_morphism,
    quasi_iso_check,
    tensor,
)
from hfps import catalog
from hfps.sections import build_section_model, component_model, enumerate_components


def even_sphere_pair(e_deg=4, cutoff=20):
    alg = Algebra([("e", e_deg), ("e'", 2 * e_deg - 1)])
    return Cdga(alg, {"e'": alg.gen("e") ** 2}, cutoff, label="sphere")


def test_validate_free_pair_ok():
    # d e' = e^2 with |e| = 4k: d^2 e' = 2 e de = 0
    assert even_sphere_pair(8).validate() == []


def test_validate_total_algebra_of_twisted_sphere():
    f = catalog.sphere_4k_s3(1, 1)
    assert f.total.validate() == []


def test_validate_reports_inhomogeneous_differential():
    alg = Algebra([("x", 4), ("e", 4), ("e'", 7)], {"x": 3})
    broken = Cdga(alg, {"e'": alg.gen("e") ** 2 + alg.gen("x")}, 16)
    problems = broken.validate()
    assert problems and "e'" in problems[0]


def test_validate_reports_d_squared_failure():
    alg = Algebra([("u", 2), ("v", 3), ("w", 4)])
    bad = Cdga(alg, {"v": alg.gen("u") ** 2, "w": alg.gen("v") * alg.gen("u")}, 12)
    problems = bad.validate()
    assert problems and "d^2" in problems[0]


def test_cohomology_of_even_sphere_model():
    bt = even_sphere_pair(4, cutoff=9).cohomology(8)
    assert [bt[k] for k in range(9)] == [1, 0, 0, 0, 1, 0, 0, 0, 0]


def test_cohomology_of_truncated_polynomial_base():
    for k in (1, 2, 4):
        alg = Algebra([("x", 4)], {"x": k})
        bt = Cdga(alg, {}, 4 * k + 4).cohomology()
        assert bt.nonzero() == {4 * i: 1 for i in range(k)}


def test_cohomology_derived_s4_example():
    # frozen from the by-hand kernel/image count: H(Lambda(x4, y7), dy = x^2)
    alg = Algebra([("x1", 4), ("y2", 7)])
    c = Cdga(alg, {"y2": alg.gen("x1") ** 2}, 20)
    assert c.cohomology(20).nonzero() == {0: 1, 4: 1}


def test_cohomology_cutoff_guard():
    c = even_sphere_pair(4, cutoff=8)
    with pytest.raises(ValueError):
        c.cohomology(9)


def test_euler_characteristic_consistency():
    # finite-dimensional instances: alternating sums of basis sizes and Betti
    # numbers agree over a window containing the whole algebra
    alg = Algebra([("x", 4), ("y", 7)], {"x": 3})
    c = Cdga(alg, {"y": alg.gen("x") ** 2}, 20)
    top = 8 + 7
    chi_basis = sum((-1) ** k * len(c.basis(k)) for k in range(top + 2))
    bt = c.cohomology(top + 1)
    chi_betti = sum((-1) ** k * v for k, v in bt.dims.items())
    assert chi_basis == chi_betti

    alg2 = Algebra([("a", 3), ("b", 5), ("c", 7)])
    c2 = Cdga(alg2, {"c": alg2.gen("a") * alg2.gen("b")}, 20)
    chi_basis = sum((-1) ** k * len(c2.basis(k)) for k in range(17))
    chi_betti = sum((-1) ** k * v for k, v in c2.cohomology(16).dims.items())
    assert chi_basis == chi_betti


def test_cohomology_invariant_under_generator_renaming():
    a1 = Algebra([("e", 4), ("y", 7)])
    c1 = Cdga(a1, {"y": a1.gen("e") ** 2}, 16)
    a2 = Algebra([("y", 7), ("e", 4)])  # permuted ids
    c2 = Cdga(a2, {"y": a2.gen("e") ** 2}, 16)
    assert c1.cohomology().nonzero() == c2.cohomology().nonzero()


# -- morphisms ---------------------------------------------------------------


def test_apply_retraction_kills_twisting_polynomial():
    f = catalog.sphere_4k_s3(1, 1)
    rets = enumerate_components(f)
    zero = [r for r in rets if not r.values["e"]][0]
    de = f.total.d_of("e'")
    assert zero.morphism.apply(de) == 0


def test_apply_second_root_also_kills():
    # phi(e) = -lambda x^k solves c^2 + lambda c = 0
    lam = Q(3)
    f = catalog.sphere_4k_s3(1, lam)
    phi = CdgaMorphism(f.total, f.base, {
        "x": f.base.algebra.gen("x"),
        "e": f.base.algebra.gen("x").scale(-lam),
        "e'": f.base.algebra.zero(),
    })
    assert phi.validate() == []
    assert phi.apply(f.total.d_of("e'")) == 0


def test_identity_morphism_is_identity():
    c = even_sphere_pair(6)
    ident = identity_morphism(c)
    p = c.algebra.gen("e") ** 2 + c.algebra.gen("e'").scale(Q(2, 3))
    assert ident.apply(p) == p


def test_morphism_degree_violation_reported():
    src = even_sphere_pair(4)
    tgt = even_sphere_pair(6)
    phi = CdgaMorphism(src, tgt, {"e": tgt.algebra.gen("e")})
    assert any("degree" in p for p in phi.validate())


# -- quasi-isomorphism checking ------------------------------------------------


def test_quasi_iso_identity():
    c = even_sphere_pair(4)
    assert quasi_iso_check(identity_morphism(c), 16)


def test_quasi_iso_inclusion_into_eta_component():
    k = 2
    f = catalog.eilenberg_product_s1(2 * k)
    s = build_section_model(f)
    comp = component_model(s, enumerate_components(f)[0]).cdga
    alg = Algebra([("y", 2 * k + 1)])
    sphere = Cdga(alg, {}, comp.cutoff)
    top_y = f"y({'1'})"
    incl = CdgaMorphism(sphere, comp, {"y": comp.algebra.gen("y(1)")})
    assert incl.validate() == []
    assert quasi_iso_check(incl, 2 * k + 4)


def test_quasi_iso_rejects_zero_map_to_point():
    c = even_sphere_pair(4)
    point = Cdga(Algebra([]), {}, c.cutoff)
    zero_map = CdgaMorphism(c, point, {})
    assert zero_map.validate() == []
    assert not quasi_iso_check(zero_map, 4)


def test_quasi_iso_closed_under_composition():
    k = 1
    f = catalog.eilenberg_product_s1(2 * k)
    s = build_section_model(f)
    comp = component_model(s, enumerate_components(f)[0]).cdga
    alg = Algebra([("y", 2 * k + 1)])
    sphere = Cdga(alg, {}, comp.cutoff)
    incl = CdgaMorphism(sphere, comp, {"y": comp.algebra.gen("y(1)")})
    both = compose(identity_morphism(comp), incl)
    assert quasi_iso_check(incl, 8) and quasi_iso_check(both, 8)


def test_tensor_combines_models():
    s3 = Cdga(Algebra([("e", 3)]), {}, 12)
    s4 = even_sphere_pair(4, cutoff=12)
    prod = tensor(s3, s4, cutoff=12)
    assert prod.validate() == []
    assert prod.cohomology(12).nonzero() == {0: 1, 3: 1, 4: 1, 7: 1}
