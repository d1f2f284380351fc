"""Exact arithmetic in the truncated Novikov ring.

Elements are finite formal sums ``c1*T^(e1) + c2*T^(e2) + ...`` with rational
coefficients and non-negative rational exponents, kept in canonical form
(strictly increasing exponents, no zero coefficients, empty sum = 0).  All
arithmetic is exact; truncation below an energy cutoff is a ring quotient.

Textual element grammar, accepted by :func:`parse` and emitted canonically
by ``str``::

    expr     = ["-"] term { ("+" | "-") term }
    term     = factor { "*" factor }
    factor   = rational | tpower | "(" expr ")"
    tpower   = "T" [ "^" exponent ]
    exponent = integer | "(" rational ")"
    rational = integer [ "/" positive-integer ]

Canonical output sorts terms by exponent, elides unit coefficients and the
exponent 1 (``T`` rather than ``1*T^1``), writes integer exponents as
``T^n`` and fractional ones as ``T^(p/q)``.  ``parse(str(x)) == x`` and
``str(parse(s)) == s`` on canonical strings.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Union

Rational = Union[int, Fraction]

INFINITY = math.inf


class NovikovParseError(ValueError):
    """Raised on malformed element text; carries the 0-based offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


def _frac(x: Rational) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class NovikovElement:
    """A finite sum of monomials ``coeff * T^exponent`` in canonical form.

    ``terms`` is a tuple of ``(exponent, coefficient)`` pairs with strictly
    increasing non-negative exponents and nonzero coefficients.
    """

    terms: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        last = None
        for exponent, coefficient in self.terms:
            if exponent < 0:
                raise ValueError(f"negative exponent {exponent}")
            if coefficient == 0:
                raise ValueError("zero coefficient stored")
            if last is not None and exponent <= last:
                raise ValueError("exponents not strictly increasing")
            last = exponent

    @staticmethod
    def zero() -> "NovikovElement":
        return NovikovElement(())

    @staticmethod
    def one() -> "NovikovElement":
        return NovikovElement.monomial(1, 0)

    @staticmethod
    def monomial(coefficient: Rational, exponent: Rational) -> "NovikovElement":
        c, e = _frac(coefficient), _frac(exponent)
        if c == 0:
            return NovikovElement(())
        return NovikovElement(((e, c),))

    @staticmethod
    def from_terms(pairs: Iterable[tuple[Rational, Rational]]) -> "NovikovElement":
        """Build from (exponent, coefficient) pairs, merging and normalizing."""
        acc: dict[Fraction, Fraction] = {}
        for exponent, coefficient in pairs:
            e, c = _frac(exponent), _frac(coefficient)
            acc[e] = acc.get(e, Fraction(0)) + c
        return NovikovElement(
            tuple((e, c) for e, c in sorted(acc.items()) if c != 0)
        )

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other: "NovikovElement") -> "NovikovElement":
        if not isinstance(other, NovikovElement):
            return NotImplemented
        return NovikovElement.from_terms(
            itertools.chain(self.terms, other.terms)
        )

    def __neg__(self) -> "NovikovElement":
        return NovikovElement(tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other: "NovikovElement") -> "NovikovElement":
        return self + (-other)

    def __mul__(self, other: "NovikovElement") -> "NovikovElement":
        if not isinstance(other, NovikovElement):
            return NotImplemented
        return NovikovElement.from_terms(
            (e1 + e2, c1 * c2)
            for e1, c1 in self.terms
            for e2, c2 in other.terms
        )

    def scale(self, coefficient: Rational) -> "NovikovElement":
        c = _frac(coefficient)
        if c == 0:
            return NovikovElement.zero()
        return NovikovElement(tuple((e, k * c) for e, k in self.terms))

    def shift(self, delta: Rational) -> "NovikovElement":
        """Multiply by T^delta; delta may be negative if all exponents stay >= 0."""
        d = _frac(delta)
        return NovikovElement(tuple((e + d, c) for e, c in self.terms))

    def truncate(self, cutoff: Union[Rational, "EnergyCutoff"]) -> "NovikovElement":
        """Drop every term whose exponent is >= cutoff (strict-below kept)."""
        e_max = cutoff.value if isinstance(cutoff, EnergyCutoff) else _frac(cutoff)
        return NovikovElement(tuple((e, c) for e, c in self.terms if e < e_max))

    def valuation(self):
        """Smallest exponent, or +inf for the zero element."""
        if not self.terms:
            return INFINITY
        return self.terms[0][0]

    def coefficient(self, exponent: Rational) -> Fraction:
        e = _frac(exponent)
        for exp, c in self.terms:
            if exp == e:
                return c
        return Fraction(0)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for i, (e, c) in enumerate(self.terms):
            body = _format_monomial(abs(c), e)
            if i == 0:
                parts.append(body if c > 0 else "-" + body)
            else:
                parts.append((" + " if c > 0 else " - ") + body)
        return "".join(parts)

    def __repr__(self) -> str:
        return f"NovikovElement.parse({str(self)!r})"


def _format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _format_monomial(coefficient: Fraction, exponent: Fraction) -> str:
    if exponent == 0:
        return _format_rational(coefficient)
    if exponent == 1:
        t = "T"
    elif exponent.denominator == 1:
        t = f"T^{exponent.numerator}"
    else:
        t = f"T^({_format_rational(exponent)})"
    if coefficient == 1:
        return t
    return f"{_format_rational(coefficient)}*{t}"


T = NovikovElement.monomial(1, 1)
ZERO = NovikovElement.zero()
ONE = NovikovElement.one()


@dataclass(frozen=True)
class EnergyCutoff:
    """A positive rational energy bound; truncation keeps exponents < value."""

    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", _frac(self.value))
        if self.value <= 0:
            raise ValueError(f"cutoff must be positive, got {self.value}")


@dataclass(frozen=True)
class GappedSpectrum:
    """A finite additively closed set of energies below a cutoff.

    ``closure`` holds every sum of generators (with repetition) that stays
    strictly below ``cutoff``, always including 0, in increasing order.
    """

    generators: tuple[Fraction, ...]
    cutoff: Fraction
    closure: tuple[Fraction, ...]

    def __contains__(self, energy: Rational) -> bool:
        return _frac(energy) in set(self.closure)

    def levels(self) -> Iterator[Fraction]:
        return iter(self.closure)

    def splits(self, energy: Rational) -> list[tuple[Fraction, Fraction]]:
        """All ordered pairs (e1, e2) in the closure with e1 + e2 == energy."""
        e = _frac(energy)
        members = set(self.closure)
        return [(a, e - a) for a in self.closure if (e - a) in members and a <= e]


def spectrum_closure(
    generators: Iterable[Rational], cutoff: Union[Rational, EnergyCutoff]
) -> GappedSpectrum:
    """Close a finite set of positive energies under addition below cutoff."""
    e_max = cutoff.value if isinstance(cutoff, EnergyCutoff) else _frac(cutoff)
    if e_max <= 0:
        raise ValueError("cutoff must be positive")
    gens = sorted({_frac(g) for g in generators})
    for g in gens:
        if g <= 0:
            raise ValueError(f"generators must be positive, got {g}")
    reached = {Fraction(0)}
    frontier = [Fraction(0)]
    while frontier:
        base = frontier.pop()
        for g in gens:
            e = base + g
            if e < e_max and e not in reached:
                reached.add(e)
                frontier.append(e)
    return GappedSpectrum(tuple(gens), e_max, tuple(sorted(reached)))


# --- parser -----------------------------------------------------------------

_WS = " \t"


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in _WS:
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            raise NovikovParseError(f"expected {ch!r}", self.pos)
        self.pos += 1

    def integer(self) -> int:
        self.skip_ws()
        start = self.pos
        if self.pos < len(self.text) and self.text[self.pos] == "-":
            self.pos += 1
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start or self.text[start:self.pos] == "-":
            raise NovikovParseError("expected integer", start)
        return int(self.text[start:self.pos])

    def rational(self) -> Fraction:
        num = self.integer()
        if self.peek() == "/":
            self.pos += 1
            den = self.integer()
            if den <= 0:
                raise NovikovParseError("denominator must be positive", self.pos)
            return Fraction(num, den)
        return Fraction(num)


def parse(text: str) -> NovikovElement:
    """Parse an element expression; raises :class:`NovikovParseError`."""
    sc = _Scanner(text)
    value = _parse_expr(sc)
    sc.skip_ws()
    if sc.pos != len(text):
        raise NovikovParseError("trailing input", sc.pos)
    return value


def _parse_expr(sc: _Scanner) -> NovikovElement:
    negate = False
    if sc.peek() == "-":
        sc.pos += 1
        negate = True
    value = _parse_term(sc)
    if negate:
        value = -value
    while sc.peek() in ("+", "-"):
        op = sc.peek()
        sc.pos += 1
        rhs = _parse_term(sc)
        value = value + rhs if op == "+" else value - rhs
    return value


def _parse_term(sc: _Scanner) -> NovikovElement:
    value = _parse_factor(sc)
    while sc.peek() == "*":
        sc.pos += 1
        value = value * _parse_factor(sc)
    return value


def _parse_factor(sc: _Scanner) -> NovikovElement:
    ch = sc.peek()
    if ch == "(":
        sc.pos += 1
        value = _parse_expr(sc)
        sc.expect(")")
        return value
    if ch == "T":
        sc.pos += 1
        if sc.peek() == "^":
            sc.pos += 1
            if sc.peek() == "(":
                sc.pos += 1
                exponent = sc.rational()
                sc.expect(")")
            else:
                exponent = Fraction(sc.integer())
            if exponent < 0:
                raise NovikovParseError("negative exponent", sc.pos)
            return NovikovElement.monomial(1, exponent)
        return T
    if ch.isdigit() or ch == "-":
        return NovikovElement.monomial(sc.rational(), 0)
    raise NovikovParseError("expected rational, 'T' or '('", sc.pos)


def random_element(
    rng, max_terms: int = 4, max_num: int = 6, max_den: int = 4
) -> NovikovElement:
    """Seeded random element; used by property tests and the CLI self-checks."""
    pairs = []
    for _ in range(rng.randrange(max_terms + 1)):
        exponent = Fraction(rng.randrange(0, max_num), rng.randrange(1, max_den))
        coefficient = Fraction(
            rng.choice([c for c in range(-max_num, max_num + 1) if c]),
            rng.randrange(1, max_den),
        )
        pairs.append((exponent, coefficient))
    return NovikovElement.from_terms(pairs)
