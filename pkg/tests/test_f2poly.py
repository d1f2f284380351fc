import itertools
import random

import pytest

from ainfsign.f2poly import (
    BinOp,
    F2Poly,
    IndexedSum,
    IntLit,
    Name,
    SignExprError,
    anf_equivalent,
    eval_int,
    parse_sign_expr,
    print_sign_expr,
    to_anf,
)


def test_parse_ast_shape():
    expr = parse_sign_expr("(k2-1)*(k1-j)")
    assert expr == BinOp(
        "*", BinOp("-", Name("k2"), IntLit(1)), BinOp("-", Name("k1"), Name("j"))
    )


def test_parse_sum_node():
    expr = parse_sign_expr("Sum(p=1..3, mu_p)")
    assert isinstance(expr, IndexedSum)
    assert expr.var == "p" and expr.lower == IntLit(1) and expr.upper == IntLit(3)


def test_parse_error_offset():
    with pytest.raises(SignExprError) as err:
        parse_sign_expr("x*(y")
    assert err.value.position == 4


def test_parse_trailing_garbage():
    with pytest.raises(SignExprError):
        parse_sign_expr("x + y )")


def test_anf_cancellation():
    poly = to_anf(parse_sign_expr("d1*(d2+1) + d1"), symbolic=True)
    assert poly == F2Poly.var("d1") * F2Poly.var("d2")


def test_anf_idempotence():
    assert to_anf(parse_sign_expr("x*x + x"), symbolic=True) == F2Poly.zero()


def test_anf_mod2_literal():
    assert to_anf(parse_sign_expr("3"), {}) == F2Poly.one()


def test_anf_subtraction_is_addition():
    assert to_anf(parse_sign_expr("x - y"), symbolic=True) == to_anf(
        parse_sign_expr("x + y"), symbolic=True
    )


def test_sum_elaboration_with_bound_names():
    expr = parse_sign_expr("Sum(p=1..j-1, mu_p)")
    poly = to_anf(expr, {"j": 3}, symbolic=True)
    assert poly == F2Poly.var("mu_1") + F2Poly.var("mu_2")
    assert to_anf(expr, {"j": 1}, symbolic=True) == F2Poly.zero()


def test_sum_bound_must_be_concrete():
    with pytest.raises(SignExprError):
        to_anf(parse_sign_expr("Sum(p=1..j, p)"), {}, symbolic=True)


def test_unbound_variable_error():
    with pytest.raises(SignExprError):
        to_anf(parse_sign_expr("x + y"), {"x": 1})


def test_equivalence_trivial():
    p = F2Poly.var("d1") * F2Poly.var("d2")
    q = to_anf(parse_sign_expr("d1*d2 + 0"), symbolic=True)
    ok, witness = anf_equivalent(p, q)
    assert ok and witness is None


def test_equivalence_witness_is_minimal():
    ok, witness = anf_equivalent(F2Poly.var("d1"), F2Poly.var("d2"))
    assert not ok
    assert witness == {"d1": 1, "d2": 0}


def test_equivalence_refuses_huge_search():
    p = F2Poly.zero()
    for i in range(25):
        p = p + F2Poly.var(f"v{i}")
    with pytest.raises(ValueError):
        anf_equivalent(p, F2Poly.one(), max_variables=20)


def test_print_parse_print_fixed_point():
    samples = [
        "(k2-1)*(k1-j)",
        "Sum(p=1..3, mu_p) + 2*x",
        "-x*(y+z) - 4",
        "Sum(p=1..k, Sum(q=1..p, d_q))",
    ]
    for text in samples:
        printed = print_sign_expr(parse_sign_expr(text))
        assert print_sign_expr(parse_sign_expr(printed)) == printed


def _random_expr(rng, names, depth=3):
    roll = rng.random()
    if depth == 0 or roll < 0.3:
        if rng.random() < 0.5:
            return IntLit(rng.randrange(-3, 4))
        return Name(rng.choice(names))
    if roll < 0.8:
        op = rng.choice("+-*")
        return BinOp(op, _random_expr(rng, names, depth - 1), _random_expr(rng, names, depth - 1))
    return BinOp("*", _random_expr(rng, names, depth - 1), IntLit(rng.randrange(-2, 3)))


def test_elaboration_sound_against_integer_evaluation():
    """The GF(2) elaboration agrees with plain integer arithmetic mod 2,
    including at assignments far outside {0, 1}."""
    rng = random.Random(11)
    names = ["a", "b", "c"]
    for _ in range(300):
        expr = _random_expr(rng, names)
        poly = to_anf(expr, symbolic=True)
        env = {n: rng.randrange(-6, 7) for n in names}
        assert poly.evaluate({n: v % 2 for n, v in env.items()}) == eval_int(expr, env) % 2


def _anf_from_truth_table(names, table):
    """Moebius transform over the subset lattice; the independent
    reconstruction used to certify canonicity."""
    monomials = set()
    for subset in itertools.product((0, 1), repeat=len(names)):
        coeff = 0
        for point in itertools.product((0, 1), repeat=len(names)):
            if all(p <= s for p, s in zip(point, subset)):
                coeff ^= table[point]
        if coeff:
            monomials.add(frozenset(n for n, s in zip(names, subset) if s))
    return F2Poly(frozenset(monomials))


def test_anf_canonicity_via_moebius_reconstruction():
    rng = random.Random(23)
    names = ("a", "b", "c", "d")
    for _ in range(100):
        expr = _random_expr(rng, list(names), depth=4)
        poly = to_anf(expr, symbolic=True)
        table = {
            point: eval_int(expr, dict(zip(names, point))) % 2
            for point in itertools.product((0, 1), repeat=len(names))
        }
        assert _anf_from_truth_table(names, table) == poly


def test_evaluate_requires_all_variables():
    with pytest.raises(KeyError):
        (F2Poly.var("x") * F2Poly.var("y")).evaluate({"x": 1})


def test_evaluate_constants():
    assert F2Poly.one().evaluate({}) == 1
    assert F2Poly.zero().evaluate({"anything": 1}) == 0
    assert (F2Poly.var("d1") * F2Poly.var("d2")).evaluate({"d1": 1, "d2": 1}) == 1
