"""Exact de Rham model on products of unit intervals and circles.

Forms have polynomial coefficients (rational, in the interval coordinates
only; circle coordinates carry constants) and are stored canonically, so
every operation -- wedge, exterior derivative, pullback along the admitted
smooth maps, and integration along the fibers of coordinate projections --
is exact and equality is literal.

Orientation bookkeeping: a space is oriented by the wedge of its coordinate
1-forms in listed order.  A projection is oriented base-first fiber-last;
its pushforward reorders each monomial to (base generators in target order,
fiber generators in the projection's fiber order), keeps the Koszul sign,
drops terms missing any fiber generator, and integrates the coefficient
over the fiber (unit intervals exactly, circles with total measure 1).
Composite projections carry the induced fiber order (outer fiber first),
which is what makes pushforward functorial on the nose.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

Rational = Union[int, Fraction]

INTERVAL = "interval"
CIRCLE = "circle"


def _frac(x: Rational) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class CubeTorusSpace:
    """An ordered product of unit intervals and circles."""

    coords: tuple[tuple[str, str], ...]  # (name, INTERVAL | CIRCLE)

    def __post_init__(self):
        names = [n for n, _ in self.coords]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate coordinate names in {names}")
        for _, kind in self.coords:
            if kind not in (INTERVAL, CIRCLE):
                raise ValueError(f"unknown coordinate kind {kind!r}")

    @property
    def dimension(self) -> int:
        return len(self.coords)

    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.coords)

    def kind(self, name: str) -> str:
        for n, kind in self.coords:
            if n == name:
                return kind
        raise KeyError(f"no coordinate {name!r}")

    def has(self, name: str) -> bool:
        return any(n == name for n, _ in self.coords)

    def position(self, name: str) -> int:
        for i, (n, _) in enumerate(self.coords):
            if n == name:
                return i
        raise KeyError(f"no coordinate {name!r}")

    def interval_names(self) -> tuple[str, ...]:
        return tuple(n for n, kind in self.coords if kind == INTERVAL)


def space(*coords: tuple[str, str]) -> CubeTorusSpace:
    return CubeTorusSpace(tuple(coords))


POINT = CubeTorusSpace(())


# --- polynomials --------------------------------------------------------------

Monomial = tuple[tuple[str, int], ...]  # sorted variable/power pairs


class Poly:
    """Polynomial with rational coefficients in named variables."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        clean: dict[Monomial, Fraction] = {}
        for mono, c in (terms or {}).items():
            if c:
                clean[mono] = c
        self.terms = clean

    @staticmethod
    def const(c: Rational) -> "Poly":
        return Poly({(): _frac(c)})

    @staticmethod
    def var(name: str, power: int = 1) -> "Poly":
        if power < 0:
            raise ValueError("negative power")
        if power == 0:
            return Poly.const(1)
        return Poly({((name, power),): Fraction(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def constant_value(self) -> Fraction:
        if any(m for m in self.terms):
            raise ValueError("polynomial is not constant")
        return self.terms.get((), Fraction(0))

    def variables(self) -> frozenset[str]:
        return frozenset(v for m in self.terms for v, _ in m)

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                powers: dict[str, int] = dict(m1)
                for v, p in m2:
                    powers[v] = powers.get(v, 0) + p
                key = tuple(sorted(powers.items()))
                out[key] = out.get(key, Fraction(0)) + c1 * c2
        return Poly(out)

    def scale(self, c: Rational) -> "Poly":
        c = _frac(c)
        return Poly({m: c * k for m, k in self.terms.items()})

    def partial(self, name: str) -> "Poly":
        out: dict[Monomial, Fraction] = {}
        for mono, c in self.terms.items():
            powers = dict(mono)
            p = powers.get(name, 0)
            if not p:
                continue
            if p == 1:
                del powers[name]
            else:
                powers[name] = p - 1
            key = tuple(sorted(powers.items()))
            out[key] = out.get(key, Fraction(0)) + c * p
        return Poly(out)

    def integrate_unit(self, name: str) -> "Poly":
        """Definite integral over [0, 1] in one variable."""
        out: dict[Monomial, Fraction] = {}
        for mono, c in self.terms.items():
            powers = dict(mono)
            p = powers.pop(name, 0)
            key = tuple(sorted(powers.items()))
            out[key] = out.get(key, Fraction(0)) + c / (p + 1)
        return Poly(out)

    def subst(self, replacements: Mapping[str, "Poly"]) -> "Poly":
        out = Poly()
        for mono, c in self.terms.items():
            piece = Poly.const(c)
            for v, p in mono:
                base = replacements.get(v, Poly.var(v))
                for _ in range(p):
                    piece = piece * base
            out = out + piece
        return out

    def eval(self, point: Mapping[str, Rational]) -> Fraction:
        total = Fraction(0)
        for mono, c in self.terms.items():
            val = c
            for v, p in mono:
                val *= _frac(point[v]) ** p
            total += val
        return total

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono, c in sorted(self.terms.items()):
            factors = [str(c)] if (c != 1 or not mono) else []
            factors += [f"{v}^{p}" if p > 1 else v for v, p in mono]
            parts.append("*".join(factors))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"<Poly {self}>"


ZERO_POLY = Poly()
ONE_POLY = Poly.const(1)


def _merge_sign(letters: Sequence[str], order: Mapping[str, int]) -> tuple[int, tuple[str, ...]]:
    """Sort 1-form letters by the given total order, returning the Koszul
    sign (inversion parity) and the sorted tuple; sign 0 on repeats."""
    keyed = [order[x] for x in letters]
    if len(set(keyed)) != len(keyed):
        return 0, ()
    inversions = sum(
        1
        for i in range(len(keyed))
        for m in range(i + 1, len(keyed))
        if keyed[i] > keyed[m]
    )
    sorted_letters = tuple(x for _, x in sorted(zip(keyed, letters)))
    return (-1) ** inversions, sorted_letters


class Form:
    """An exterior form on a cube-torus space, in canonical shape: monomial
    wedges sorted by coordinate order, nonzero polynomial coefficients that
    involve interval coordinates only."""

    __slots__ = ("space", "terms")

    def __init__(self, space: CubeTorusSpace, terms: Mapping[tuple[str, ...], Poly] | None = None):
        self.space = space
        clean: dict[tuple[str, ...], Poly] = {}
        interval = set(space.interval_names())
        order = {n: i for i, n in enumerate(space.names())}
        for wedge, poly in (terms or {}).items():
            if poly.is_zero():
                continue
            for v in poly.variables():
                if v not in interval:
                    raise ValueError(
                        f"coefficient uses {v!r}, not an interval coordinate of the space"
                    )
            for x in wedge:
                if x not in order:
                    raise ValueError(f"wedge letter {x!r} not a coordinate")
            if tuple(sorted(wedge, key=order.__getitem__)) != tuple(wedge):
                raise ValueError(f"wedge {wedge} not in coordinate order")
            if len(set(wedge)) != len(wedge):
                raise ValueError(f"repeated letter in wedge {wedge}")
            clean[tuple(wedge)] = poly
        self.terms = clean

    @staticmethod
    def zero(space: CubeTorusSpace) -> "Form":
        return Form(space)

    @staticmethod
    def one(space: CubeTorusSpace) -> "Form":
        return Form(space, {(): ONE_POLY})

    @staticmethod
    def function(space: CubeTorusSpace, poly: Poly) -> "Form":
        return Form(space, {(): poly})

    @staticmethod
    def generator(space: CubeTorusSpace, name: str) -> "Form":
        """The coordinate 1-form d<name>."""
        if not space.has(name):
            raise KeyError(f"no coordinate {name!r}")
        return Form(space, {(name,): ONE_POLY})

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set[int]:
        return {len(w) for w in self.terms}

    def degree(self) -> int:
        degs = self.degrees()
        if not degs:
            return 0
        if len(degs) > 1:
            raise ValueError(f"form is not homogeneous: degrees {sorted(degs)}")
        return degs.pop()

    def homogeneous_part(self, degree: int) -> "Form":
        return Form(
            self.space, {w: p for w, p in self.terms.items() if len(w) == degree}
        )

    def __add__(self, other: "Form") -> "Form":
        self._same_space(other)
        out = dict(self.terms)
        for w, p in other.terms.items():
            out[w] = out.get(w, ZERO_POLY) + p
        return Form(self.space, out)

    def __neg__(self) -> "Form":
        return Form(self.space, {w: -p for w, p in self.terms.items()})

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def scale(self, c: Rational) -> "Form":
        return Form(self.space, {w: p.scale(c) for w, p in self.terms.items()})

    def scale_poly(self, poly: Poly) -> "Form":
        return Form(self.space, {w: p * poly for w, p in self.terms.items()})

    def _same_space(self, other: "Form"):
        if self.space != other.space:
            raise ValueError("forms live on different spaces")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Form)
            and self.space == other.space
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.space, frozenset(self.terms.items())))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for wedge, poly in sorted(self.terms.items(), key=lambda t: (len(t[0]), t[0])):
            dx = "^".join(f"d{x}" for x in wedge)
            coeff = str(poly)
            if " + " in coeff:
                coeff = f"({coeff})"
            parts.append(f"{coeff}*{dx}" if dx else coeff)
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"<Form on {self.space.names()}: {self}>"


def wedge(a: Form, b: Form) -> Form:
    a._same_space(b)
    order = {n: i for i, n in enumerate(a.space.names())}
    out: dict[tuple[str, ...], Poly] = {}
    for w1, p1 in a.terms.items():
        for w2, p2 in b.terms.items():
            sign, merged = _merge_sign(list(w1) + list(w2), order)
            if sign == 0:
                continue
            poly = (p1 * p2).scale(sign)
            out[merged] = out.get(merged, ZERO_POLY) + poly
    return Form(a.space, out)


def wedge_all(space_: CubeTorusSpace, forms: Iterable[Form]) -> Form:
    acc = Form.one(space_)
    for f in forms:
        acc = wedge(acc, f)
    return acc


def exterior_derivative(form: Form) -> Form:
    sp = form.space
    order = {n: i for i, n in enumerate(sp.names())}
    out = Form.zero(sp)
    for wedgekey, poly in form.terms.items():
        for v in sp.interval_names():
            pd = poly.partial(v)
            if pd.is_zero() or v in wedgekey:
                continue
            sign, merged = _merge_sign([v] + list(wedgekey), order)
            if sign == 0:
                continue
            out = out + Form(sp, {merged: pd.scale(sign)})
    return out


d = exterior_derivative


# --- maps ---------------------------------------------------------------------

PolyAssignment = tuple[str, Poly]  # ("poly", P) for interval targets
CircleAssignment = tuple[str, str, int]  # ("circle", source name, +1/-1)
ConstCircle = tuple[str]  # ("const-circle",)


@dataclass(frozen=True)
class SmoothMapModel:
    """A map between cube-torus spaces given coordinatewise.

    Interval target coordinates are assigned polynomials in the source's
    interval coordinates (declared to land in [0, 1]; checked at the corner
    and midpoint lattice).  Circle target coordinates are assigned a source
    circle coordinate with an orientation sign, or are constant.
    """

    source: CubeTorusSpace
    target: CubeTorusSpace
    assignments: tuple[tuple[str, tuple], ...]  # (target coord, assignment)

    def __post_init__(self):
        table = dict(self.assignments)
        if set(table) != set(self.target.names()):
            raise ValueError("assignments must cover exactly the target coordinates")
        for name, assignment in table.items():
            kind = self.target.kind(name)
            if kind == INTERVAL:
                if assignment[0] != "poly":
                    raise ValueError(f"interval coordinate {name!r} needs a polynomial")
                poly: Poly = assignment[1]
                unknown = poly.variables() - set(self.source.interval_names())
                if unknown:
                    raise ValueError(f"assignment for {name!r} uses {sorted(unknown)}")
                _check_unit_range(poly, self.source, name)
            elif assignment[0] == "circle":
                _, src, sign = assignment
                if not self.source.has(src) or self.source.kind(src) != CIRCLE:
                    raise ValueError(f"{src!r} is not a source circle coordinate")
                if sign not in (1, -1):
                    raise ValueError("circle orientation sign must be +1 or -1")
            elif assignment[0] != "const-circle":
                raise ValueError(f"bad assignment for circle coordinate {name!r}")

    def table(self) -> dict[str, tuple]:
        return dict(self.assignments)

    def is_projection(self) -> bool:
        seen = set()
        for name, assignment in self.assignments:
            if assignment[0] == "circle":
                if assignment[2] != 1:
                    return False
                src = assignment[1]
            elif assignment[0] == "poly":
                mono = list(assignment[1].terms.items())
                if len(mono) != 1:
                    return False
                (key, c), = mono
                if c != 1 or len(key) != 1 or key[0][1] != 1:
                    return False
                src = key[0][0]
            else:
                return False
            if src in seen:
                return False
            seen.add(src)
        return True

    def to_projection(self) -> "ProjectionMap":
        if not self.is_projection():
            raise ValueError("map is not a coordinate projection")
        injection = {}
        for name, assignment in self.assignments:
            if assignment[0] == "circle":
                injection[name] = assignment[1]
            else:
                injection[name] = next(iter(assignment[1].terms))[0][0]
        return projection(self.source, self.target, injection)


def _check_unit_range(poly: Poly, source: CubeTorusSpace, name: str):
    vars_ = sorted(poly.variables())
    if len(vars_) > 6:
        return  # sampling lattice too large; trust the declaration
    lattice = [Fraction(0), Fraction(1, 2), Fraction(1)]
    points = [{}]
    for v in vars_:
        points = [dict(pt, **{v: x}) for pt in points for x in lattice]
    for pt in points:
        val = poly.eval(pt)
        if not 0 <= val <= 1:
            raise ValueError(
                f"assignment for {name!r} leaves [0,1] at {pt} (value {val})"
            )


def smooth_map(
    source: CubeTorusSpace, target: CubeTorusSpace, table: Mapping[str, tuple]
) -> SmoothMapModel:
    return SmoothMapModel(source, target, tuple(sorted(table.items())))


def identity_map(sp: CubeTorusSpace) -> SmoothMapModel:
    table: dict[str, tuple] = {}
    for name, kind in sp.coords:
        table[name] = ("poly", Poly.var(name)) if kind == INTERVAL else ("circle", name, 1)
    return smooth_map(sp, sp, table)


def constant_map(source: CubeTorusSpace, target: CubeTorusSpace, point: Mapping[str, Rational] | None = None) -> SmoothMapModel:
    point = point or {}
    table: dict[str, tuple] = {}
    for name, kind in target.coords:
        if kind == INTERVAL:
            table[name] = ("poly", Poly.const(point.get(name, 0)))
        else:
            table[name] = ("const-circle",)
    return smooth_map(source, target, table)


def compose_smooth(outer: SmoothMapModel, inner: SmoothMapModel) -> SmoothMapModel:
    """outer after inner (inner.source -> outer.target)."""
    if inner.target != outer.source:
        raise ValueError("maps do not compose")
    inner_table = inner.table()
    subs = {
        name: assignment[1]
        for name, assignment in inner_table.items()
        if assignment[0] == "poly"
    }
    table: dict[str, tuple] = {}
    for name, assignment in outer.assignments:
        if assignment[0] == "poly":
            table[name] = ("poly", assignment[1].subst(subs))
        elif assignment[0] == "circle":
            _, src, sign = assignment
            via = inner_table[src]
            if via[0] == "circle":
                table[name] = ("circle", via[1], sign * via[2])
            else:
                table[name] = ("const-circle",)
        else:
            table[name] = ("const-circle",)
    return SmoothMapModel(inner.source, outer.target, tuple(sorted(table.items())))


@dataclass(frozen=True)
class ProjectionMap:
    """A coordinate projection, oriented base-first fiber-last.

    ``injection`` embeds target coordinates into source coordinates
    (type-preserving); ``fiber`` lists the remaining source coordinates in
    the order that orients the fiber.  Plain constructions use source order;
    composites carry the induced order (outer fiber first).
    """

    source: CubeTorusSpace
    target: CubeTorusSpace
    injection: tuple[tuple[str, str], ...]  # (target coord, source coord)
    fiber: tuple[str, ...]

    def __post_init__(self):
        table = dict(self.injection)
        if set(table) != set(self.target.names()):
            raise ValueError("injection must cover exactly the target coordinates")
        used = list(table.values())
        if len(set(used)) != len(used):
            raise ValueError("injection is not injective")
        for tname, sname in table.items():
            if not self.source.has(sname):
                raise KeyError(f"no source coordinate {sname!r}")
            if self.source.kind(sname) != self.target.kind(tname):
                raise ValueError(f"injection {tname!r}->{sname!r} changes coordinate kind")
        expected_fiber = set(self.source.names()) - set(used)
        if set(self.fiber) != expected_fiber or len(self.fiber) != len(expected_fiber):
            raise ValueError("fiber must list exactly the non-base source coordinates")

    @property
    def reldim(self) -> int:
        return len(self.fiber)

    def base_of(self, source_name: str) -> str | None:
        for tname, sname in self.injection:
            if sname == source_name:
                return tname
        return None

    def as_smooth(self) -> SmoothMapModel:
        table: dict[str, tuple] = {}
        for tname, sname in self.injection:
            if self.target.kind(tname) == INTERVAL:
                table[tname] = ("poly", Poly.var(sname))
            else:
                table[tname] = ("circle", sname, 1)
        return smooth_map(self.source, self.target, table)


def projection(
    source: CubeTorusSpace,
    target: CubeTorusSpace,
    injection: Mapping[str, str],
    fiber: Sequence[str] | None = None,
) -> ProjectionMap:
    if fiber is None:
        used = set(injection.values())
        fiber = tuple(n for n in source.names() if n not in used)
    return ProjectionMap(source, target, tuple(sorted(injection.items())), tuple(fiber))


def compose_projection(outer: ProjectionMap, inner: ProjectionMap) -> ProjectionMap:
    """outer after inner (inner.source -> outer.target), with the induced
    fiber orientation: outer fiber (lifted through inner) first, then inner
    fiber."""
    if inner.target != outer.source:
        raise ValueError("projections do not compose")
    inner_table = dict(inner.injection)
    injection = {t: inner_table[s] for t, s in outer.injection}
    fiber = tuple(inner_table[c] for c in outer.fiber) + inner.fiber
    return ProjectionMap(
        inner.source, outer.target, tuple(sorted(injection.items())), fiber
    )


def pullback(f: SmoothMapModel, form: Form) -> Form:
    if form.space != f.target:
        raise ValueError("form does not live on the map's target")
    table = f.table()
    subs = {
        name: assignment[1]
        for name, assignment in table.items()
        if assignment[0] == "poly"
    }
    out = Form.zero(f.source)
    for wedgekey, poly in form.terms.items():
        acc = Form.function(f.source, poly.subst(subs))
        dead = False
        for letter in wedgekey:
            assignment = table[letter]
            if assignment[0] == "poly":
                pulled = exterior_derivative(
                    Form.function(f.source, assignment[1])
                )
            elif assignment[0] == "circle":
                pulled = Form.generator(f.source, assignment[1]).scale(assignment[2])
            else:  # constant circle
                pulled = Form.zero(f.source)
            if pulled.is_zero():
                dead = True
                break
            acc = wedge(acc, pulled)
        if not dead:
            out = out + acc
    return out


def pushforward(p: ProjectionMap, form: Form) -> Form:
    """Integration along the fibers of a coordinate projection."""
    if form.space != p.source:
        raise ValueError("form does not live on the projection's source")
    fiber_set = set(p.fiber)
    fiber_rank = {name: i for i, name in enumerate(p.fiber)}
    target_order = {n: i for i, n in enumerate(p.target.names())}
    src_to_target = {s: t for t, s in p.injection}
    out = Form.zero(p.target)
    for wedgekey, poly in form.terms.items():
        letters_fiber = [x for x in wedgekey if x in fiber_set]
        if len(letters_fiber) != len(p.fiber):
            continue
        letters_base = [x for x in wedgekey if x not in fiber_set]
        # Koszul sign of reordering (stored order) -> (base in target order,
        # fiber in fiber order); computed as the inversion parity of the
        # combined rank sequence.
        ranks = [
            (0, target_order[src_to_target[x]]) if x not in fiber_set else (1, fiber_rank[x])
            for x in wedgekey
        ]
        inversions = sum(
            1
            for i in range(len(ranks))
            for m in range(i + 1, len(ranks))
            if ranks[i] > ranks[m]
        )
        sign = (-1) ** inversions
        coeff = poly
        for v in p.fiber:
            if p.source.kind(v) == INTERVAL:
                coeff = coeff.integrate_unit(v)
            # circle fibers: coefficients are constant there; total measure 1
        renamed = coeff.subst(
            {s: Poly.var(src_to_target[s]) for s in src_to_target if p.source.kind(s) == INTERVAL}
        )
        target_wedge = tuple(
            sorted((src_to_target[x] for x in letters_base), key=target_order.__getitem__)
        )
        out = out + Form(p.target, {target_wedge: renamed.scale(sign)})
    return out


def integrate(form: Form) -> Fraction:
    """Integral of the top-degree part over the listed orientation."""
    sp = form.space
    full = sp.names()
    total = Fraction(0)
    for wedgekey, poly in form.terms.items():
        if tuple(wedgekey) != full:
            continue
        acc = poly
        for v in sp.interval_names():
            acc = acc.integrate_unit(v)
        total += acc.constant_value()
    return total


def bundle_orientation_sign(p: ProjectionMap) -> int:
    """Sign between the source's listed orientation and the bundle
    orientation (base in target order, then fiber in fiber order)."""
    target_order = {n: i for i, n in enumerate(p.target.names())}
    fiber_rank = {name: i for i, name in enumerate(p.fiber)}
    src_to_target = {s: t for t, s in p.injection}
    ranks = [
        (0, target_order[src_to_target[x]]) if x in src_to_target else (1, fiber_rank[x])
        for x in p.source.names()
    ]
    inversions = sum(
        1
        for i in range(len(ranks))
        for m in range(i + 1, len(ranks))
        if ranks[i] > ranks[m]
    )
    return (-1) ** inversions


def interval_face(
    sp: CubeTorusSpace, name: str, value: Rational
) -> tuple[CubeTorusSpace, SmoothMapModel]:
    """The codimension-1 face at an interval coordinate's endpoint, with its
    inclusion into the space."""
    if sp.kind(name) != INTERVAL:
        raise ValueError(f"{name!r} is not an interval coordinate")
    face_space = CubeTorusSpace(tuple(c for c in sp.coords if c[0] != name))
    table: dict[str, tuple] = {}
    for n, k in sp.coords:
        if n == name:
            table[n] = ("poly", Poly.const(value))
        elif k == INTERVAL:
            table[n] = ("poly", Poly.var(n))
        else:
            table[n] = ("circle", n, 1)
    return face_space, smooth_map(face_space, sp, table)


def boundary_faces(sp: CubeTorusSpace) -> list[tuple[CubeTorusSpace, SmoothMapModel, int]]:
    """Codimension-1 faces with outward-normal-first orientation signs
    relative to the listed orientation.

    Each interval coordinate contributes its value-1 face with sign
    (-1)^position and its value-0 face with the opposite sign; circles
    contribute nothing.
    """
    faces = []
    for idx, (name, kind) in enumerate(sp.coords):
        if kind != INTERVAL:
            continue
        for value, orient in ((Fraction(1), 1), (Fraction(0), -1)):
            face_space, inclusion = interval_face(sp, name, value)
            faces.append((face_space, inclusion, orient * (-1) ** idx))
    return faces


def boundary_pushforward(p: ProjectionMap, form: Form) -> Form:
    """Pushforward along the restriction of p to the fiber boundary.

    Only faces of fiber interval coordinates enter the fiberwise Stokes
    formula; base-type faces contribute nothing over interior base points.
    The face sign is taken relative to the bundle orientation (base first,
    fiber last): the value-1 face of the fiber coordinate at fiber-order
    index i carries (-1)^(dim source + reldim + i), the value-0 face the
    opposite.
    """
    out = Form.zero(p.target)
    for i, v in enumerate(p.fiber):
        if p.source.kind(v) != INTERVAL:
            continue
        top = (-1) ** ((p.source.dimension + p.reldim + i) % 2)
        restricted_fiber = tuple(x for x in p.fiber if x != v)
        for value, orient in ((Fraction(1), top), (Fraction(0), -top)):
            face_space, inclusion = interval_face(p.source, v, value)
            restricted = projection(
                face_space, p.target, dict(p.injection), fiber=restricted_fiber
            )
            out = out + pushforward(restricted, pullback(inclusion, form)).scale(orient)
    return out


# --- correspondences ----------------------------------------------------------


@dataclass(frozen=True)
class CorrespondenceModel:
    """A span acting on forms by pull-push: pull back along ``f2``, integrate
    along the fibers of ``f1``."""

    space: CubeTorusSpace
    f1: ProjectionMap
    f2: SmoothMapModel

    def __post_init__(self):
        if self.f1.source != self.space or self.f2.source != self.space:
            raise ValueError("both legs must start on the correspondence space")

    @property
    def reldim(self) -> int:
        return self.f1.reldim


def apply_correspondence(corr: CorrespondenceModel, form: Form) -> Form:
    return pushforward(corr.f1, pullback(corr.f2, form))


def boundary_correspondence_apply(corr: CorrespondenceModel, form: Form) -> Form:
    """Pull-push restricted to the fiber boundary of the output leg."""
    return boundary_pushforward(corr.f1, pullback(corr.f2, form))


def fiber_product(
    c12: CorrespondenceModel, c23: CorrespondenceModel
) -> CorrespondenceModel:
    """Compose two correspondences over the shared middle space.

    Requires c12's input leg to be a coordinate projection (c23's output leg
    is one by type).  The glued space is ordered (c12-only, shared middle in
    middle order, c23-only), and the legs are composed through the two
    projections of the glued space.
    """
    if c12.f2.target != c23.f1.target:
        raise ValueError("middle spaces do not match")
    middle = c12.f2.target
    left_inj = c12.f2.to_projection()  # middle coord -> X12 coord
    right_inj = dict(c23.f1.injection)  # middle coord -> X23 coord

    left_shared = {s: t for t, s in left_inj.injection}  # X12 coord -> middle coord
    right_shared = {s: t for t, s in right_inj.items()}  # X23 coord -> middle coord

    x12_only = [c for c in c12.space.coords if c[0] not in left_shared]
    shared = [(m, middle.kind(m)) for m in middle.names()]
    x23_only = [c for c in c23.space.coords if c[0] not in right_shared]
    names = [n for n, _ in x12_only + shared + x23_only]
    if len(set(names)) != len(names):
        raise ValueError("coordinate name collision in fiber product")
    glued = CubeTorusSpace(tuple(x12_only + shared + x23_only))

    to_x12 = projection(
        glued,
        c12.space,
        {n: left_shared.get(n, n) for n in c12.space.names()},
    )
    to_x23 = projection(
        glued,
        c23.space,
        {n: right_shared.get(n, n) for n in c23.space.names()},
    )
    out_leg = compose_projection(c12.f1, to_x12)
    in_leg = compose_smooth(c23.f2, to_x23.as_smooth())
    return CorrespondenceModel(glued, out_leg, in_leg)


def pullback_bundle(
    p: ProjectionMap, f: SmoothMapModel, rename_prefix: str = ""
) -> tuple[CubeTorusSpace, ProjectionMap, SmoothMapModel]:
    """Base change: pull the bundle p back along f.

    Returns (pulled space, pulled projection to f's source, bundle map to
    p's source).  The pulled space is ordered (f's source, then p's fiber in
    fiber order); fiber coordinates are renamed when they would collide.
    """
    if f.target != p.target:
        raise ValueError("base-change legs must share the base space")
    taken = set(f.source.names())
    fiber_names = {}
    for name in p.fiber:
        fresh = name
        while fresh in taken:
            fresh = f"{rename_prefix}{fresh}_"
        fiber_names[name] = fresh
        taken.add(fresh)
    pulled_coords = tuple(f.source.coords) + tuple(
        (fiber_names[n], p.source.kind(n)) for n in p.fiber
    )
    pulled = CubeTorusSpace(pulled_coords)
    p_bar = projection(
        pulled,
        f.source,
        {n: n for n in f.source.names()},
        fiber=tuple(fiber_names[n] for n in p.fiber),
    )
    f_table = f.table()
    table: dict[str, tuple] = {}
    for tname, sname in p.injection:
        assignment = f_table[tname]
        table[sname] = assignment
    for name in p.fiber:
        fresh = fiber_names[name]
        if p.source.kind(name) == INTERVAL:
            table[name] = ("poly", Poly.var(fresh))
        else:
            table[name] = ("circle", fresh, 1)
    f_tilde = smooth_map(pulled, p.source, table)
    return pulled, p_bar, f_tilde
