"""Combinatorics of moduli descriptors and their codimension-1 boundary
strata: enumeration of splittings (slot, outer arity, outer energy, inner
arity, inner energy, node component) with their orientation parities, and
the matching against the terms of the composition double-sum.

The reserved pair (arity 1, energy 0) is the differential; it is never
enumerated as a stratum factor.  Inner factors of arity 0 and energy 0 are
enumerated but flagged vanishing, since the corresponding operation is zero
by definition.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import signs
from .novikov import GappedSpectrum, _frac


@dataclass(frozen=True)
class ComponentData:
    """A clean-intersection component: its dimension, Maslov parity and a
    flag recording that its orientation twist is trivialized in examples."""

    name: str
    dimension: int
    maslov_parity: int
    twist_trivialized: bool = True

    def __post_init__(self):
        if self.dimension < 0:
            raise ValueError(f"dimension must be >= 0, got {self.dimension}")
        if self.maslov_parity not in (0, 1):
            raise ValueError(f"maslov_parity must be 0 or 1, got {self.maslov_parity}")


@dataclass(frozen=True)
class BClass:
    """A curve class surrogate: an energy plus an opaque tag, so distinct
    classes of equal energy can coexist."""

    energy: Fraction
    tag: str = ""

    def __post_init__(self):
        object.__setattr__(self, "energy", _frac(self.energy))
        if self.energy < 0:
            raise ValueError(f"energy must be >= 0, got {self.energy}")

    def is_differential_slot(self, k: int) -> bool:
        return k == 1 and self.energy == 0


@dataclass(frozen=True)
class ModuliDescriptor:
    """k-input moduli datum: arity, class, output component, input components."""

    k: int
    b: BClass
    output: ComponentData
    inputs: tuple[ComponentData, ...]

    def __post_init__(self):
        if self.k < 0:
            raise ValueError(f"k must be >= 0, got {self.k}")
        if len(self.inputs) != self.k:
            raise ValueError(f"expected {self.k} input components, got {len(self.inputs)}")

    def dim_parity(self) -> int:
        return signs.moduli_dim_parity(
            self.output.dimension,
            self.output.maslov_parity,
            [c.maslov_parity for c in self.inputs],
            self.k,
        )

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "energy": str(self.b.energy),
            "tag": self.b.tag,
            "output": self.output.name,
            "inputs": [c.name for c in self.inputs],
        }


@dataclass(frozen=True)
class BoundaryStratum:
    """One codimension-1 splitting: outer factor, inner factor glued in at
    slot j through the node component, and its orientation parity."""

    j: int
    outer: ModuliDescriptor
    inner: ModuliDescriptor
    node: ComponentData
    sign: int

    def __post_init__(self):
        if not 1 <= self.j <= self.outer.k:
            raise ValueError(f"slot {self.j} outside 1..{self.outer.k}")
        if self.inner.output != self.node or self.outer.inputs[self.j - 1] != self.node:
            raise ValueError("node component must join inner output to outer slot j")
        if self.outer.b.is_differential_slot(self.outer.k):
            raise ValueError("outer factor is the reserved differential pair")
        if self.inner.b.is_differential_slot(self.inner.k):
            raise ValueError("inner factor is the reserved differential pair")

    def parent_k(self) -> int:
        return self.outer.k + self.inner.k - 1

    @property
    def vanishes(self) -> bool:
        """True when the inner factor is the zero operation (arity 0, energy 0)."""
        return self.inner.k == 0 and self.inner.b.energy == 0

    def index(self) -> tuple:
        return (
            self.j,
            self.outer.k,
            self.outer.b.energy,
            self.inner.k,
            self.inner.b.energy,
            self.node.name,
        )

    def to_json(self) -> dict:
        return {
            "j": self.j,
            "outer": self.outer.to_json(),
            "inner": self.inner.to_json(),
            "node": self.node.name,
            "sign": self.sign,
            "vanishes": self.vanishes,
        }


def stratum_context(
    parent: ModuliDescriptor, j: int, k_inner: int, node: ComponentData
) -> signs.SignContext:
    return signs.SignContext(
        k=parent.k,
        j=j,
        k_outer=parent.k + 1 - k_inner,
        k_inner=k_inner,
        degs=tuple(0 for _ in range(parent.k)),
        mus=tuple(c.maslov_parity for c in parent.inputs),
        mu_node=node.maslov_parity,
        mu_out=parent.output.maslov_parity,
        dim_out=parent.output.dimension,
    )


def stratum_sign(stratum: BoundaryStratum) -> int:
    """Orientation parity of a stratum, recomputed from its own data."""
    parent_inputs = (
        stratum.outer.inputs[: stratum.j - 1]
        + stratum.inner.inputs
        + stratum.outer.inputs[stratum.j :]
    )
    parent = ModuliDescriptor(
        k=stratum.parent_k(),
        b=BClass(stratum.outer.b.energy + stratum.inner.b.energy, "parent"),
        output=stratum.outer.output,
        inputs=parent_inputs,
    )
    ctx = stratum_context(parent, stratum.j, stratum.inner.k, stratum.node)
    return signs.boundary_sign(ctx)


def enumerate_strata(
    parent: ModuliDescriptor,
    spectrum: GappedSpectrum,
    node_components: Sequence[ComponentData],
) -> list[BoundaryStratum]:
    """All codimension-1 strata of the parent descriptor, in deterministic
    order (slot, then inner arity, then inner energy, then node name)."""
    if parent.b.energy not in spectrum:
        raise ValueError(
            f"parent energy {parent.b.energy} is not in the spectrum closure"
        )
    if parent.k < 1:
        raise ValueError("strata are enumerated for parents with k >= 1")
    out: list[BoundaryStratum] = []
    nodes = sorted(node_components, key=lambda c: c.name)
    for j in range(1, parent.k + 2):
        for k_inner in range(0, parent.k + 1):
            k_outer = parent.k + 1 - k_inner
            if j > k_outer:
                continue
            for e_inner in spectrum.levels():
                e_outer = parent.b.energy - e_inner
                if e_outer < 0 or e_outer not in spectrum:
                    continue
                if k_outer == 1 and e_outer == 0:
                    continue
                if k_inner == 1 and e_inner == 0:
                    continue
                for node in nodes:
                    ctx = stratum_context(parent, j, k_inner, node)
                    outer = ModuliDescriptor(
                        k=k_outer,
                        b=BClass(e_outer, f"{parent.b.tag}'"),
                        output=parent.output,
                        inputs=parent.inputs[: j - 1]
                        + (node,)
                        + parent.inputs[j - 1 + k_inner :],
                    )
                    inner = ModuliDescriptor(
                        k=k_inner,
                        b=BClass(e_inner, f"{parent.b.tag}''"),
                        output=node,
                        inputs=parent.inputs[j - 1 : j - 1 + k_inner],
                    )
                    out.append(
                        BoundaryStratum(
                            j=j,
                            outer=outer,
                            inner=inner,
                            node=node,
                            sign=signs.boundary_sign(ctx),
                        )
                    )
    return out


def codim1_parity_consistent(stratum: BoundaryStratum) -> bool:
    """The fiber product's dimension parity (outer + inner - node) must sit
    one below the parent's."""
    fiber_product_parity = (
        stratum.outer.dim_parity()
        + stratum.inner.dim_parity()
        - stratum.node.dimension
    ) % 2
    parent_inputs = (
        stratum.outer.inputs[: stratum.j - 1]
        + stratum.inner.inputs
        + stratum.outer.inputs[stratum.j :]
    )
    parent_parity = signs.moduli_dim_parity(
        stratum.outer.output.dimension,
        stratum.outer.output.maslov_parity,
        [c.maslov_parity for c in parent_inputs],
        stratum.parent_k(),
    )
    return fiber_product_parity == (parent_parity - 1) % 2


@dataclass
class MatchReport:
    """Outcome of matching strata against composition double-sum terms."""

    matched: list[tuple]
    unmatched_strata: list[tuple]
    unmatched_terms: list[tuple]

    @property
    def perfect(self) -> bool:
        return not self.unmatched_strata and not self.unmatched_terms


def composition_terms(
    parent: ModuliDescriptor,
    spectrum: GappedSpectrum,
    node_components: Sequence[ComponentData],
) -> list[tuple]:
    """Index tuples of the double sum over outer-after-inner composites,
    enumerated independently of the stratum walk (arity split first, then
    energy split, then insertion slot)."""
    terms: list[tuple] = []
    for k_inner in range(parent.k, -1, -1):
        k_outer = parent.k + 1 - k_inner
        for e_outer, e_inner in spectrum.splits(parent.b.energy):
            if (k_outer == 1 and e_outer == 0) or (k_inner == 1 and e_inner == 0):
                continue
            for node in sorted(node_components, key=lambda c: c.name):
                for j in range(1, k_outer + 1):
                    terms.append(
                        (j, k_outer, e_outer, k_inner, e_inner, node.name)
                    )
    return terms


def match_composition_terms(
    parent: ModuliDescriptor,
    spectrum: GappedSpectrum,
    node_components: Sequence[ComponentData],
    drop_strata: int = 0,
) -> MatchReport:
    """Match stratum indices against composition-term indices as multisets.

    ``drop_strata`` removes that many strata before matching; used by
    falsification tests to confirm mismatches are detected.
    """
    strata = enumerate_strata(parent, spectrum, node_components)
    if drop_strata:
        strata = strata[drop_strata:]
    stratum_index = Counter(s.index() for s in strata)
    term_index = Counter(composition_terms(parent, spectrum, node_components))
    matched = sorted((stratum_index & term_index).elements())
    return MatchReport(
        matched=matched,
        unmatched_strata=sorted((stratum_index - term_index).elements()),
        unmatched_terms=sorted((term_index - stratum_index).elements()),
    )
