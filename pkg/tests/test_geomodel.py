import random
from fractions import Fraction

import pytest

from ainfsign import signs
from ainfsign.geomodel import (
    CorrespondenceModel,
    CubeTorusSpace,
    Form,
    MockModuli,
    POINT,
    Poly,
    apply_correspondence,
    boundary_faces,
    boundary_pushforward,
    bundle_orientation_sign,
    check_pushpull_identities,
    compose_projection,
    derived_node_parity,
    exterior_derivative,
    fiber_product,
    integrate,
    mock_operation,
    projection,
    pullback,
    pushforward,
    random_form,
    random_mock_instance,
    run_all_checks,
    smooth_map,
    space,
    verify_composition,
    verify_pushpull,
    verify_stokes,
    wedge,
)

I_T = space(("t", "interval"))
S_TH = space(("th", "circle"))
M_TT = space(("t", "interval"), ("th", "circle"))
I_2 = space(("t1", "interval"), ("t2", "interval"))


def test_wedge_nilpotence():
    dt = Form.generator(I_T, "t")
    assert wedge(dt, dt).is_zero()


def test_exterior_derivative_of_polynomial():
    f = Form.function(I_T, Poly.var("t", 2))
    assert exterior_derivative(f) == Form(I_T, {("t",): Poly.var("t").scale(2)})


def test_d_squared_is_zero():
    rng = random.Random(0)
    for _ in range(50):
        sp = space(("a", "interval"), ("b", "interval"), ("c", "circle"))
        form = random_form(rng, sp, 3)
        assert exterior_derivative(exterior_derivative(form)).is_zero()


def test_wedge_associative():
    rng = random.Random(19)
    sp = space(("a", "interval"), ("b", "interval"), ("c", "circle"), ("e", "circle"))
    for _ in range(40):
        x = random_form(rng, sp, 2)
        y = random_form(rng, sp, 2)
        z = random_form(rng, sp, 2)
        assert wedge(wedge(x, y), z) == wedge(x, wedge(y, z))


def test_wedge_graded_commutative():
    rng = random.Random(1)
    sp = space(("a", "interval"), ("b", "interval"), ("c", "circle"))
    for _ in range(50):
        p = rng.randrange(0, 4)
        q = rng.randrange(0, 4)
        alpha = random_form(rng, sp, 2, degree=p)
        beta = random_form(rng, sp, 2, degree=q)
        lhs = wedge(alpha, beta)
        rhs = wedge(beta, alpha).scale((-1) ** (p * q))
        assert lhs == rhs


def test_pullback_is_ring_map_commuting_with_d():
    rng = random.Random(2)
    src = space(("u", "interval"), ("v", "interval"), ("c", "circle"))
    tgt = space(("x", "interval"), ("y", "circle"))
    f = smooth_map(
        src, tgt,
        {"x": ("poly", Poly.var("u") * Poly.var("v")), "y": ("circle", "c", -1)},
    )
    for _ in range(40):
        a = random_form(rng, tgt, 2)
        b = random_form(rng, tgt, 2)
        assert pullback(f, wedge(a, b)) == wedge(pullback(f, a), pullback(f, b))
        assert pullback(f, exterior_derivative(a)) == exterior_derivative(pullback(f, a))


def test_interval_assignment_range_checked():
    with pytest.raises(ValueError):
        smooth_map(I_T, I_T, {"t": ("poly", Poly.var("t").scale(2))})
    with pytest.raises(ValueError):
        smooth_map(I_T, I_T, {"t": ("poly", Poly.var("t") - Poly.const(1))})


def test_pullback_diagonal():
    diag = smooth_map(I_T, I_2, {"t1": ("poly", Poly.var("t")), "t2": ("poly", Poly.var("t"))})
    form = Form(I_2, {("t2",): Poly.var("t1")})
    assert pullback(diag, form) == Form(I_T, {("t",): Poly.var("t")})


def test_pushforward_unit_fiber_volume():
    p = projection(I_T, POINT, {})
    assert pushforward(p, Form.generator(I_T, "t")) == Form.one(POINT)


def test_pushforward_reorder_sign():
    p = projection(M_TT, S_TH, {"th": "th"})
    beta = Form(M_TT, {("t", "th"): Poly.var("t")})
    assert pushforward(p, beta) == Form(S_TH, {("th",): Poly.const(Fraction(-1, 2))})


def test_pushforward_degree_obstruction():
    p = projection(I_T, POINT, {})
    assert pushforward(p, Form.function(I_T, Poly.var("t"))).is_zero()


def test_pushforward_lowers_degree_by_reldim():
    rng = random.Random(3)
    for _ in range(30):
        from ainfsign.geomodel.checks import random_bundle

        p = random_bundle(rng, 4)
        deg = rng.randrange(p.reldim, p.source.dimension + 1)
        beta = random_form(rng, p.source, 2, degree=deg)
        out = pushforward(p, beta)
        if not out.is_zero():
            assert out.degree() == deg - p.reldim


def test_boundary_of_interval_and_circle():
    faces = boundary_faces(I_T)
    assert [(f[1].table()["t"][1].constant_value(), f[2]) for f in faces] == [
        (Fraction(1), 1), (Fraction(0), -1),
    ]
    assert boundary_faces(S_TH) == []


def test_stokes_worked_example():
    # projection of the interval to the point applied to the coordinate
    # function: interior and boundary contributions cancel
    p = projection(I_T, POINT, {})
    beta = Form.function(I_T, Poly.var("t"))
    lhs = exterior_derivative(pushforward(p, beta))
    boundary = boundary_pushforward(p, beta)
    assert integrate(boundary) == 1  # value at 1 minus value at 0
    sign = (-1) ** ((I_T.dimension + 0) % 2)
    assert lhs == pushforward(p, exterior_derivative(beta)) + boundary.scale(sign)


def test_identity_correspondence():
    ident = projection(M_TT, M_TT, {"t": "t", "th": "th"})
    corr = CorrespondenceModel(M_TT, ident, ident.as_smooth())
    rng = random.Random(4)
    for _ in range(10):
        xi = random_form(rng, M_TT, 2)
        assert apply_correspondence(corr, xi) == xi


def test_correspondence_collapse_example():
    f1 = projection(M_TT, S_TH, {"th": "th"})
    f2 = smooth_map(M_TT, I_T, {"t": ("poly", Poly.var("t"))})
    corr = CorrespondenceModel(M_TT, f1, f2)
    assert apply_correspondence(corr, Form.generator(I_T, "t")) == Form.one(S_TH)


def test_fiber_product_identity_factors():
    ident = projection(M_TT, M_TT, {"t": "t", "th": "th"})
    c = CorrespondenceModel(M_TT, ident, ident.as_smooth())
    glued = fiber_product(c, c)
    rng = random.Random(5)
    for _ in range(10):
        xi = random_form(rng, M_TT, 2)
        assert apply_correspondence(glued, xi) == xi


def test_composition_formula_randomized():
    result = verify_composition(trials=150, seed=21)
    assert result.passed, result.failures
    assert result.stats["odd_degree_inputs"] > 20


def test_all_identities_randomized():
    for result in run_all_checks(trials=120, seed=17):
        assert result.passed, (result.name, result.failures)


def test_stokes_boundary_coverage():
    result = verify_stokes(trials=120, seed=9)
    assert result.passed
    assert result.stats["with_boundary"] >= 60


def test_composite_projection_functorial_orientation():
    p = projection(M_TT, S_TH, {"th": "th"})
    q = projection(S_TH, POINT, {})
    qp = compose_projection(q, p)
    assert qp.fiber == ("th", "t")  # outer fiber first
    beta = Form(M_TT, {("t", "th"): Poly.var("t")})
    assert pushforward(qp, beta) == pushforward(q, pushforward(p, beta))


def test_bundle_orientation_sign():
    p = projection(M_TT, S_TH, {"th": "th"})
    # listed (t, th) vs bundle (th, t): one transposition
    assert bundle_orientation_sign(p) == -1
    assert bundle_orientation_sign(projection(I_T, POINT, {})) == 1


# --- mock moduli -----------------------------------------------------------


def test_constant_map_mock_is_signed_wedge():
    ident = projection(M_TT, M_TT, {"t": "t", "th": "th"})
    mock = MockModuli(M_TT, ident, (ident.as_smooth(), ident.as_smooth()))
    rng = random.Random(6)
    for _ in range(20):
        d1 = rng.randrange(0, 3)
        d2 = rng.randrange(0, 3)
        x1 = random_form(rng, M_TT, 2, degree=d1)
        x2 = random_form(rng, M_TT, 2, degree=d2)
        assert mock_operation(mock, (0, 0), (x1, x2)) == wedge(x1, x2).scale((-1) ** d1)


def test_unary_identity_mock():
    ident = projection(I_2, I_2, {"t1": "t1", "t2": "t2"})
    mock = MockModuli(I_2, ident, (ident.as_smooth(),))
    rng = random.Random(7)
    for _ in range(10):
        deg = rng.randrange(0, 3)
        xi = random_form(rng, I_2, 2, degree=deg)
        assert mock_operation(mock, (0,), (xi,)) == xi.scale((-1) ** deg)


def test_mock_output_degree_matches_parity_contract():
    rng = random.Random(8)
    found = 0
    while found < 15:
        outer, inner, j, xis, mus = random_mock_instance(rng)
        out = mock_operation(inner, mus[j - 1 : j - 1 + inner.k], xis[j - 1 : j - 1 + inner.k])
        if out.is_zero():
            continue
        found += 1
        mu_node = derived_node_parity(inner, mus[j - 1 : j - 1 + inner.k])
        expected = signs.output_degree_parity(
            [x.degree() for x in xis[j - 1 : j - 1 + inner.k]],
            mus[j - 1 : j - 1 + inner.k],
            mu_node,
        )
        assert out.degree() % 2 == expected


def test_pushpull_identity_suite():
    result = verify_pushpull(trials=60, seed=13)
    assert result.passed, result.failures
    assert result.stats["nontrivial"] >= 20


def test_pushpull_trivial_mock_case():
    node = space(("n", "interval"))
    ident = projection(node, node, {"n": "n"})
    inner = MockModuli(node, ident, (ident.as_smooth(),))
    outer = MockModuli(node, ident, (ident.as_smooth(),))
    xi = Form.generator(node, "n")
    report = check_pushpull_identities(outer, inner, 1, (xi,), (0,))
    assert report.passed


def test_reorder_sign_mutation_detected():
    rng = random.Random(14)
    detected = attempts = 0
    while detected < 2 and attempts < 400:
        attempts += 1
        outer, inner, j, xis, mus = random_mock_instance(rng)
        report = check_pushpull_identities(outer, inner, j, xis, mus, mutate_reorder_sign=1)
        if report.nontrivial:
            assert not report.nested_vs_glued
            detected += 1
    assert detected == 2
