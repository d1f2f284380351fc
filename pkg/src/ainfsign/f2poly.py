"""Zhegalkin (algebraic normal form) polynomials over GF(2), plus a small
expression DSL for mod-2 sign formulas.

An :class:`F2Poly` is a canonical XOR-set of monomials; each monomial is a
set of variable names (the empty monomial is the constant 1, the empty set
of monomials is 0).  Idempotence ``x*x = x`` is built into the
representation, which is sound here because every variable denotes an
integer parity and ``n*n = n mod 2``.

DSL grammar (also in ``docs/sign_expr.ebnf``)::

    expr   = ["-"] term { ("+" | "-") term }
    term   = factor { "*" factor }
    factor = integer | name | "(" expr ")" | "-" factor | sum
    sum    = "Sum" "(" name "=" expr ".." expr "," expr ")"
    name   = (letter | "_") { letter | digit | "_" }

Sum bounds must elaborate to concrete integers.  Inside ``Sum(p=a..b, body)``
a bare ``p`` evaluates to the running index and a name of the form
``base_p`` elaborates to ``base_<value>``; an empty range (a > b) is 0.
Subtraction coincides with addition mod 2 but is kept distinct in the AST so
printing round-trips.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Union

Monomial = frozenset
ScalarOrPoly = Union[int, "F2Poly"]


class F2Poly:
    """Multivariate polynomial over GF(2) in algebraic normal form."""

    __slots__ = ("monomials",)

    def __init__(self, monomials: frozenset = frozenset()):
        self.monomials = monomials

    @staticmethod
    def zero() -> "F2Poly":
        return F2Poly()

    @staticmethod
    def one() -> "F2Poly":
        return F2Poly(frozenset([frozenset()]))

    @staticmethod
    def const(n: int) -> "F2Poly":
        return F2Poly.one() if n % 2 else F2Poly.zero()

    @staticmethod
    def var(name: str) -> "F2Poly":
        return F2Poly(frozenset([frozenset([name])]))

    @staticmethod
    def _coerce(x: ScalarOrPoly) -> "F2Poly":
        if isinstance(x, F2Poly):
            return x
        if isinstance(x, int):
            return F2Poly.const(x)
        return NotImplemented

    def is_zero(self) -> bool:
        return not self.monomials

    def variables(self) -> frozenset:
        out = set()
        for m in self.monomials:
            out.update(m)
        return frozenset(out)

    def __add__(self, other: ScalarOrPoly) -> "F2Poly":
        other = F2Poly._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return F2Poly(self.monomials ^ other.monomials)

    __radd__ = __add__
    __sub__ = __add__
    __rsub__ = __add__

    def __neg__(self) -> "F2Poly":
        return self

    def __mul__(self, other: ScalarOrPoly) -> "F2Poly":
        other = F2Poly._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        acc = set()
        for m1 in self.monomials:
            for m2 in other.monomials:
                m = m1 | m2
                if m in acc:
                    acc.discard(m)
                else:
                    acc.add(m)
        return F2Poly(frozenset(acc))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = F2Poly.const(other)
        if not isinstance(other, F2Poly):
            return NotImplemented
        return self.monomials == other.monomials

    def __hash__(self) -> int:
        return hash(self.monomials)

    def evaluate(self, assignment: Mapping[str, int]) -> int:
        """GF(2) evaluation; every variable must be assigned."""
        total = 0
        for m in self.monomials:
            prod = 1
            for v in m:
                if v not in assignment:
                    raise KeyError(f"unassigned variable {v!r}")
                prod &= assignment[v] & 1
                if not prod:
                    break
            total ^= prod
        return total

    def __str__(self) -> str:
        if not self.monomials:
            return "0"
        keys = sorted(self.monomials, key=lambda m: (len(m), tuple(sorted(m))))
        return " + ".join("1" if not m else "*".join(sorted(m)) for m in keys)

    def __repr__(self) -> str:
        return f"<F2Poly {self}>"


def anf_equivalent(
    p: F2Poly, q: F2Poly, max_variables: int = 20
) -> tuple[bool, dict | None]:
    """Decide p == q over GF(2); on failure return a witness assignment.

    The witness sets the fewest possible variables to 1 and, among those,
    is lexicographically smallest in the names that are set; it is the
    deterministic counterexample contract used throughout the provers.
    """
    diff = p + q
    if diff.is_zero():
        return True, None
    names = sorted(diff.variables())
    if len(names) > max_variables:
        raise ValueError(
            f"refusing exhaustive search over {len(names)} > {max_variables} variables"
        )
    for weight in range(len(names) + 1):
        for ones in itertools.combinations(names, weight):
            assignment = {n: 0 for n in names}
            for n in ones:
                assignment[n] = 1
            if diff.evaluate(assignment):
                return False, assignment
    raise AssertionError("nonzero ANF with no satisfying assignment")


# --- sign-expression DSL -----------------------------------------------------


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class Name:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "SignExpr"


@dataclass(frozen=True)
class BinOp:
    op: str  # '+', '-' or '*'
    left: "SignExpr"
    right: "SignExpr"


@dataclass(frozen=True)
class IndexedSum:
    var: str
    lower: "SignExpr"
    upper: "SignExpr"
    body: "SignExpr"


SignExpr = Union[IntLit, Name, Neg, BinOp, IndexedSum]


class SignExprError(ValueError):
    """Parse or elaboration failure, with a 0-based text offset when parsing."""

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)
        self.position = position


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _skip(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t\n":
            self.pos += 1

    def peek(self) -> tuple[str, str, int]:
        """Return (kind, value, position) without consuming."""
        self._skip()
        i = self.pos
        text = self.text
        if i >= len(text):
            return ("eof", "", i)
        ch = text[i]
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            return ("int", text[i:j], i)
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            return ("name", text[i:j], i)
        if text.startswith("..", i):
            return ("..", "..", i)
        if ch in "+-*()=,":
            return (ch, ch, i)
        raise SignExprError(f"unexpected character {ch!r}", i)

    def take(self, kind: str | None = None) -> tuple[str, str, int]:
        tok = self.peek()
        if kind is not None and tok[0] != kind:
            raise SignExprError(f"expected {kind!r}, found {tok[1] or 'end of input'!r}", tok[2])
        self.pos = tok[2] + len(tok[1])
        return tok


def parse_sign_expr(text: str) -> SignExpr:
    toks = _Tokens(text)
    expr = _parse_sum_expr(toks)
    kind, value, pos = toks.peek()
    if kind != "eof":
        raise SignExprError(f"trailing input {value!r}", pos)
    return expr


def _parse_sum_expr(toks: _Tokens) -> SignExpr:
    if toks.peek()[0] == "-":
        toks.take()
        expr: SignExpr = Neg(_parse_product(toks))
    else:
        expr = _parse_product(toks)
    while toks.peek()[0] in ("+", "-"):
        op = toks.take()[0]
        expr = BinOp(op, expr, _parse_product(toks))
    return expr


def _parse_product(toks: _Tokens) -> SignExpr:
    expr = _parse_atom(toks)
    while toks.peek()[0] == "*":
        toks.take()
        expr = BinOp("*", expr, _parse_atom(toks))
    return expr


def _parse_atom(toks: _Tokens) -> SignExpr:
    kind, value, pos = toks.peek()
    if kind == "int":
        toks.take()
        return IntLit(int(value))
    if kind == "name":
        toks.take()
        if value == "Sum" and toks.peek()[0] == "(":
            toks.take("(")
            var = toks.take("name")[1]
            toks.take("=")
            lower = _parse_sum_expr(toks)
            toks.take("..")
            upper = _parse_sum_expr(toks)
            toks.take(",")
            body = _parse_sum_expr(toks)
            toks.take(")")
            return IndexedSum(var, lower, upper, body)
        return Name(value)
    if kind == "(":
        toks.take()
        expr = _parse_sum_expr(toks)
        toks.take(")")
        return expr
    if kind == "-":
        toks.take()
        return Neg(_parse_atom(toks))
    raise SignExprError(
        f"expected integer, name or '(', found {value or 'end of input'!r}", pos
    )


def print_sign_expr(expr: SignExpr) -> str:
    """Fully parenthesized rendering; print(parse(print(e))) == print(e)."""
    if isinstance(expr, IntLit):
        return str(expr.value)
    if isinstance(expr, Name):
        return expr.name
    if isinstance(expr, Neg):
        return f"(-{print_sign_expr(expr.operand)})"
    if isinstance(expr, BinOp):
        return f"({print_sign_expr(expr.left)} {expr.op} {print_sign_expr(expr.right)})"
    if isinstance(expr, IndexedSum):
        return (
            f"Sum({expr.var} = {print_sign_expr(expr.lower)}"
            f" .. {print_sign_expr(expr.upper)}, {print_sign_expr(expr.body)})"
        )
    raise TypeError(f"not a sign expression: {expr!r}")


def _resolve_name(name: str, env: Mapping[str, int]) -> str:
    """Rewrite a trailing ``_<loopvar>`` subscript to its current value."""
    if "_" in name:
        base, _, suffix = name.rpartition("_")
        if suffix in env:
            return f"{base}_{env[suffix]}"
    return name


def to_anf(
    expr: SignExpr,
    bindings: Mapping[str, ScalarOrPoly] | None = None,
    symbolic: bool = False,
) -> F2Poly:
    """Elaborate an expression to canonical ANF.

    ``bindings`` maps names to integers (reduced mod 2) or F2Poly values.
    Unbound names raise unless ``symbolic`` is set, in which case they become
    variables of the result.
    """
    bindings = bindings or {}
    return _elaborate(expr, bindings, {}, symbolic)


def _elaborate(
    expr: SignExpr,
    bindings: Mapping[str, ScalarOrPoly],
    env: dict[str, int],
    symbolic: bool,
) -> F2Poly:
    if isinstance(expr, IntLit):
        return F2Poly.const(expr.value)
    if isinstance(expr, Name):
        if expr.name in env:
            return F2Poly.const(env[expr.name])
        name = _resolve_name(expr.name, env)
        if name in bindings:
            value = bindings[name]
            return value if isinstance(value, F2Poly) else F2Poly.const(value)
        if symbolic:
            return F2Poly.var(name)
        raise SignExprError(f"unbound variable {name!r}")
    if isinstance(expr, Neg):
        return _elaborate(expr.operand, bindings, env, symbolic)
    if isinstance(expr, BinOp):
        left = _elaborate(expr.left, bindings, env, symbolic)
        right = _elaborate(expr.right, bindings, env, symbolic)
        return left * right if expr.op == "*" else left + right
    if isinstance(expr, IndexedSum):
        lo = _int_bound(expr.lower, bindings, env)
        hi = _int_bound(expr.upper, bindings, env)
        total = F2Poly.zero()
        for value in range(lo, hi + 1):
            inner = dict(env)
            inner[expr.var] = value
            total = total + _elaborate(expr.body, bindings, inner, symbolic)
        return total
    raise TypeError(f"not a sign expression: {expr!r}")


def _int_bound(
    expr: SignExpr, bindings: Mapping[str, ScalarOrPoly], env: dict[str, int]
) -> int:
    try:
        return eval_int(expr, {**{k: v for k, v in bindings.items() if isinstance(v, int)}, **env})
    except SignExprError as exc:
        raise SignExprError(f"sum bound is not a concrete integer: {exc}") from exc


def eval_int(expr: SignExpr, env: Mapping[str, int]) -> int:
    """Plain integer evaluation; the independent oracle for mod-2 elaboration."""
    if isinstance(expr, IntLit):
        return expr.value
    if isinstance(expr, Name):
        name = _resolve_name(expr.name, env)
        if name in env:
            return int(env[name])
        raise SignExprError(f"unbound variable {name!r}")
    if isinstance(expr, Neg):
        return -eval_int(expr.operand, env)
    if isinstance(expr, BinOp):
        left, right = eval_int(expr.left, env), eval_int(expr.right, env)
        return left * right if expr.op == "*" else (left + right if expr.op == "+" else left - right)
    if isinstance(expr, IndexedSum):
        lo, hi = eval_int(expr.lower, env), eval_int(expr.upper, env)
        total = 0
        for value in range(lo, hi + 1):
            inner = dict(env)
            inner[expr.var] = value
            total += eval_int(expr.body, inner)
        return total
    raise TypeError(f"not a sign expression: {expr!r}")
