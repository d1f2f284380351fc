"""Parity evaluation of every sign quantity in the Bott-Morse filtered
A-infinity convention: the operation sign, the boundary-orientation sign and
its proof decomposition, the composition sign and its decomposition, the
Stokes boundary sign, Koszul prefixes, and moduli dimension parities.

Every function reduces mod 2 internally and accepts arbitrary integers; the
same formulas also run verbatim on :class:`~ainfsign.f2poly.F2Poly` values,
which is how the prover obtains symbolic ANF certificates.  For integer
inputs the return value is 0 or 1.

Index conventions: a k-ary operation splits at slot ``j`` (1-based) into an
outer operation of arity ``k_outer`` and an inner one of arity ``k_inner``
with ``k_outer + k_inner == k + 1`` and ``1 <= j <= k_outer``; the inner
factor consumes inputs ``j .. j+k_inner-1``.  ``mus`` are the Maslov
parities of the k input components, ``mu_node`` that of the new node
component created by the splitting, and ``mu_out``/``dim_out`` describe the
output component.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from .f2poly import F2Poly

Parity = Union[int, F2Poly]


def _par(x: Parity) -> Parity:
    return x % 2 if isinstance(x, int) else x


def _total(values: Sequence[Parity]) -> Parity:
    acc: Parity = 0
    for v in values:
        acc = acc + v
    return acc


def shifted_degree(deg: int, mu: int) -> int:
    """Degree in the shift that makes the relations sign-uniform: deg + mu - 1."""
    return deg + mu - 1


def operation_sign(degs: Sequence[Parity], mus: Sequence[Parity]) -> Parity:
    """Sign exponent of the k-ary operation on inputs of the given degrees.

    Parity of ``sum_i (i + mu_1 + ... + mu_{i-1}) * (deg_i - 1) + 1`` with
    1-based i; the last Maslov parity never enters.
    """
    if len(degs) != len(mus):
        raise ValueError(f"length mismatch: {len(degs)} degrees, {len(mus)} parities")
    acc: Parity = 1
    prefix: Parity = 0
    for i, d in enumerate(degs, start=1):
        acc = acc + (i + prefix) * (d - 1)
        if i <= len(mus):
            prefix = prefix + mus[i - 1]
    return _par(acc)


def koszul_prefix(degs: Sequence[Parity], mus: Sequence[Parity], j: int) -> Parity:
    """Parity of the shifted degrees of the first j-1 inputs."""
    if not 1 <= j <= len(degs) + 1:
        raise ValueError(f"slot {j} out of range for {len(degs)} inputs")
    return _par(_total([degs[i] + mus[i] - 1 for i in range(j - 1)]))


def moduli_dim_parity(
    dim_out: Parity, mu_out: Parity, mus: Sequence[Parity], k: int
) -> Parity:
    """Dimension parity of the k-input moduli space:
    dim_out + mu_out - sum(mus) + k - 2."""
    return _par(dim_out + mu_out - _total(mus) + k - 2)


def output_degree_parity(
    degs: Sequence[Parity], mus: Sequence[Parity], mu_out: Parity
) -> Parity:
    """Parity of the output's unshifted degree: the output shifted degree is
    ``sum |xi_i|' + 1`` and unshifting subtracts ``mu_out - 1``."""
    shifted = _total([d + m - 1 for d, m in zip(degs, mus)]) + 1
    return _par(shifted + 1 - mu_out)


def stokes_sign(dim_parity: Parity, degs: Sequence[Parity]) -> Parity:
    """Boundary-term sign in the fiberwise Stokes formula:
    moduli dimension plus the total input degree."""
    return _par(dim_parity + _total(list(degs)))


@dataclass(frozen=True)
class SignContext:
    """Everything a boundary splitting's sign formulas consume.

    ``degs``/``mus`` may hold integers or symbolic GF(2) polynomials; the
    arity data ``k``, ``j``, ``k_outer``, ``k_inner`` are always concrete.
    """

    k: int
    j: int
    k_outer: int
    k_inner: int
    degs: tuple = ()
    mus: tuple = ()
    mu_node: Parity = 0
    mu_out: Parity = 0
    dim_out: Parity = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.k_outer + self.k_inner != self.k + 1:
            raise ValueError(
                f"k_outer + k_inner = {self.k_outer}+{self.k_inner} != k+1 = {self.k + 1}"
            )
        if self.k_inner < 0 or self.k_outer < 1:
            raise ValueError("arities must satisfy k_inner >= 0, k_outer >= 1")
        if not 1 <= self.j <= self.k_outer:
            raise ValueError(f"slot j={self.j} outside 1..{self.k_outer}")
        if self.degs and len(self.degs) != self.k:
            raise ValueError(f"expected {self.k} degrees, got {len(self.degs)}")
        if self.mus and len(self.mus) != self.k:
            raise ValueError(f"expected {self.k} parities, got {len(self.mus)}")

    # Input slices relative to the splitting (1-based slot arithmetic).
    def prefix_mus(self) -> tuple:
        return self.mus[: self.j - 1]

    def inner_mus(self) -> tuple:
        return self.mus[self.j - 1 : self.j - 1 + self.k_inner]

    def suffix_mus(self) -> tuple:
        return self.mus[self.j - 1 + self.k_inner :]

    def inner_degs(self, degs=None) -> tuple:
        degs = self.degs if degs is None else tuple(degs)
        return degs[self.j - 1 : self.j - 1 + self.k_inner]

    def suffix_degs(self, degs=None) -> tuple:
        degs = self.degs if degs is None else tuple(degs)
        return degs[self.j - 1 + self.k_inner :]

    def outer_mus(self) -> tuple:
        return self.prefix_mus() + (self.mu_node,) + self.suffix_mus()

    def node_defect(self) -> Parity:
        """mu_node minus the inner Maslov parities; recurs in every formula."""
        return self.mu_node - _total(self.inner_mus())

    def to_json(self) -> dict:
        """Integer contexts only; the instance shape shared with proof reports."""
        return {
            "k": self.k, "j": self.j,
            "k_outer": self.k_outer, "k_inner": self.k_inner,
            "degs": list(self.degs), "mus": list(self.mus),
            "mu_node": self.mu_node, "mu_out": self.mu_out,
            "dim_out": self.dim_out,
        }

    @staticmethod
    def from_json(data: dict) -> "SignContext":
        return SignContext(
            k=int(data["k"]), j=int(data["j"]),
            k_outer=int(data["k_outer"]), k_inner=int(data["k_inner"]),
            degs=tuple(data.get("degs", ())), mus=tuple(data.get("mus", ())),
            mu_node=data.get("mu_node", 0), mu_out=data.get("mu_out", 0),
            dim_out=data.get("dim_out", 0),
        )


def boundary_sign(ctx: SignContext) -> Parity:
    """Orientation sign of a codimension-1 boundary stratum relative to the
    moduli boundary, as a function of the splitting data alone."""
    nd = ctx.node_defect()
    pre = _total(ctx.prefix_mus())
    acc = (
        (ctx.k_inner - 1) * (ctx.k_outer - ctx.j)
        + (ctx.k_outer - 1) * nd
        + pre * nd
        + ctx.dim_out
        + ctx.mu_out
        - (pre + ctx.mu_node + _total(ctx.suffix_mus()))
        + ctx.k_outer
    )
    return _par(acc)


def composition_sign(ctx: SignContext, degs: Sequence[Parity] | None = None) -> Parity:
    """Closed-form sign relating the outer-after-inner composite at slot j to
    the push-pull over the glued correspondence."""
    degs = tuple(ctx.degs if degs is None else degs)
    nd = ctx.node_defect()
    acc = (
        operation_sign(degs, ctx.mus)
        + _total(degs)
        - ctx.k
        - 1
        + ctx.j
        + ctx.k_outer * nd
        + _total(ctx.prefix_mus()) * nd
        + (ctx.k_outer - ctx.j) * ctx.k_inner
    )
    return _par(acc)


# --- proof decomposition of the boundary sign --------------------------------


def local_system_swap_sign(ctx: SignContext, dim_node: Parity = 0) -> Parity:
    """Weighted sign of exchanging the leading twist factors with the inner
    correspondence's relative orientation; the node dimension cancels."""
    inner_moduli = moduli_dim_parity(
        dim_node, ctx.mu_node, ctx.inner_mus(), ctx.k_inner
    )
    return _par(
        _total(ctx.prefix_mus()) * (inner_moduli - dim_node - (ctx.k_inner - 2))
    )


def marked_point_shuffle_sign(ctx: SignContext, dim_node: Parity = 0) -> Parity:
    """Sign of regrouping marked-point factors around the splitting: the
    marked-point block swap plus the relative-dimension crossing."""
    inner_moduli = moduli_dim_parity(
        dim_node, ctx.mu_node, ctx.inner_mus(), ctx.k_inner
    )
    inner_rel = inner_moduli - (ctx.k_inner - 2) - dim_node
    return _par(
        (ctx.k_inner - 1) * (ctx.k_outer - ctx.j) + (ctx.k_outer - 1) * inner_rel
    )


def outer_moduli_dim_parity(ctx: SignContext) -> Parity:
    """Dimension parity of the outer factor (node component inserted at j)."""
    return moduli_dim_parity(ctx.dim_out, ctx.mu_out, ctx.outer_mus(), ctx.k_outer)


# --- proof decomposition of the composition sign ------------------------------


def coderivation_sign(ctx: SignContext, degs: Sequence[Parity] | None = None) -> Parity:
    """Koszul prefix of the insertion slot plus the operation signs of the
    outer tuple (with the inner output at slot j) and of the inner tuple."""
    degs = tuple(ctx.degs if degs is None else degs)
    inner_degs = ctx.inner_degs(degs)
    inner_mus = ctx.inner_mus()
    node_deg = output_degree_parity(inner_degs, inner_mus, ctx.mu_node)
    outer_degs = degs[: ctx.j - 1] + (node_deg,) + ctx.suffix_degs(degs)
    return _par(
        koszul_prefix(degs, ctx.mus, ctx.j)
        + operation_sign(outer_degs, ctx.outer_mus())
        + operation_sign(inner_degs, inner_mus)
    )


def nested_move_sign(ctx: SignContext, degs: Sequence[Parity] | None = None) -> Parity:
    """Sign of moving the inner push-pull output past the tail inputs
    (its degree is the inner total degree minus the relative dimension)."""
    degs = tuple(ctx.degs if degs is None else degs)
    inner_total = _total(ctx.inner_degs(degs))
    return _par(
        (inner_total + ctx.node_defect() + ctx.k_inner - 2)
        * _total(ctx.suffix_degs(degs))
    )


def block_swap_sign(ctx: SignContext, degs: Sequence[Parity] | None = None) -> Parity:
    """Koszul sign of swapping the inner input block past the tail block."""
    degs = tuple(ctx.degs if degs is None else degs)
    return _par(_total(ctx.inner_degs(degs)) * _total(ctx.suffix_degs(degs)))


def pushpull_reorder_sign(
    ctx: SignContext, degs: Sequence[Parity] | None = None
) -> Parity:
    """Net reorder sign in the nested-vs-glued push-pull comparison; the two
    moves share a common factor that cancels mod 2, leaving
    ``(mu_node - inner mus + k_inner - 2) * (tail degree)``."""
    degs = tuple(ctx.degs if degs is None else degs)
    return _par(
        (ctx.node_defect() + ctx.k_inner - 2) * _total(ctx.suffix_degs(degs))
    )


def parent_dim_parity(ctx: SignContext) -> Parity:
    """Dimension parity of the unsplit k-input moduli space."""
    return moduli_dim_parity(ctx.dim_out, ctx.mu_out, ctx.mus, ctx.k)


def master_sum(ctx: SignContext) -> Parity:
    """The master congruence combination: boundary sign + composition sign
    + operation sign + 1 + Stokes sign.  Identically zero."""
    nu = stokes_sign(parent_dim_parity(ctx), ctx.degs)
    return _par(
        boundary_sign(ctx)
        + composition_sign(ctx)
        + operation_sign(ctx.degs, ctx.mus)
        + 1
        + nu
    )
