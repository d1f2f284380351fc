"""Symbolic proofs of the sign identities and the formal cancellation of the
filtered relations, per fixed arity instance.

Degrees and Maslov parities are GF(2) variables (``d1..dk``, ``m1..mk``,
``m0`` and ``r0`` for the output component, ``ma`` for the node); arities
and slots are concrete integers.  Each proof normalizes a combination of
sign formulas to algebraic normal form and demands the zero polynomial; a
failure report carries the minimal witness assignment instead of raising.

The formal replay of the relations emits one term per route for every
payload symbol (an interior differential insertion per slot, or a boundary
stratum) and checks that each pair of routes cancels: two terms with sign
exponents p and q cancel exactly when p + q + 1 normalizes to zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from . import signs
from .f2poly import F2Poly, anf_equivalent
from .novikov import GappedSpectrum
from .signs import SignContext

D_PUSH = "differential-after-pushpull"
PUSH_D = "pushpull-after-differential"
BDRY = "boundary-stratum"


def symbolic_context(k: int, j: int, k_inner: int) -> SignContext:
    """SignContext with fresh GF(2) variables for all parity inputs."""
    var = F2Poly.var
    return SignContext(
        k=k,
        j=j,
        k_outer=k + 1 - k_inner,
        k_inner=k_inner,
        degs=tuple(var(f"d{i}") for i in range(1, k + 1)),
        mus=tuple(var(f"m{i}") for i in range(1, k + 1)),
        mu_node=var("ma"),
        mu_out=var("m0"),
        dim_out=var("r0"),
    )


@dataclass
class ProofReport:
    instance: dict
    status: str  # "proved" | "refuted"
    witness: dict | None = None

    @property
    def proved(self) -> bool:
        return self.status == "proved"

    def to_json(self) -> dict:
        out = {"instance": self.instance, "status": self.status}
        if self.witness is not None:
            out["witness"] = dict(sorted(self.witness.items()))
        return out


def _prove_zero(poly: F2Poly, instance: dict) -> ProofReport:
    ok, witness = anf_equivalent(poly, F2Poly.zero())
    return ProofReport(instance, "proved" if ok else "refuted", witness)


def prove_master_identity(
    k: int, j: int, k_inner: int, truth_table: bool = False
) -> ProofReport:
    """Prove boundary + composition + operation + 1 + Stokes == 0 at this
    instance; optionally cross-check by exhaustive integer truth table."""
    ctx = symbolic_context(k, j, k_inner)
    report = _prove_zero(
        signs.master_sum(ctx), {"identity": "master", "k": k, "j": j, "k_inner": k_inner}
    )
    if truth_table and report.proved:
        bad = _truth_table_master(k, j, k_inner)
        if bad is not None:
            return ProofReport(report.instance, "refuted", bad)
    return report


def _truth_table_master(k: int, j: int, k_inner: int) -> dict | None:
    """Integer-arithmetic exhaustive check, independent of the ANF engine."""
    n = 2 * k + 3
    for bits in range(1 << n):
        vals = [(bits >> i) & 1 for i in range(n)]
        degs = tuple(vals[:k])
        mus = tuple(vals[k : 2 * k])
        ma, m0, r0 = vals[2 * k], vals[2 * k + 1], vals[2 * k + 2]
        ctx = SignContext(
            k=k, j=j, k_outer=k + 1 - k_inner, k_inner=k_inner,
            degs=degs, mus=mus, mu_node=ma, mu_out=m0, dim_out=r0,
        )
        if signs.master_sum(ctx) != 0:
            names = (
                {f"d{i+1}": degs[i] for i in range(k)}
                | {f"m{i+1}": mus[i] for i in range(k)}
                | {"ma": ma, "m0": m0, "r0": r0}
            )
            return names
    return None


def prove_boundary_decomposition(k: int, j: int, k_inner: int) -> ProofReport:
    """Boundary sign equals the sum of its three proof pieces, with a
    symbolic node dimension that must cancel."""
    ctx = symbolic_context(k, j, k_inner)
    dim_node = F2Poly.var("ra")
    total = (
        signs.boundary_sign(ctx)
        + signs.local_system_swap_sign(ctx, dim_node)
        + signs.marked_point_shuffle_sign(ctx, dim_node)
        + signs.outer_moduli_dim_parity(ctx)
    )
    return _prove_zero(
        total, {"identity": "boundary-decomposition", "k": k, "j": j, "k_inner": k_inner}
    )


def prove_composition_decomposition(k: int, j: int, k_inner: int) -> ProofReport:
    """Composition sign equals Koszul-insertion piece plus reorder piece."""
    ctx = symbolic_context(k, j, k_inner)
    total = (
        signs.composition_sign(ctx)
        + signs.coderivation_sign(ctx)
        + signs.pushpull_reorder_sign(ctx)
    )
    return _prove_zero(
        total,
        {"identity": "composition-decomposition", "k": k, "j": j, "k_inner": k_inner},
    )


def prove_reorder_collapse(k: int, j: int, k_inner: int) -> ProofReport:
    """The two reorder moves collapse: nested-move + block-swap equals the
    net reorder sign (their common factor cancels mod 2)."""
    ctx = symbolic_context(k, j, k_inner)
    total = (
        signs.nested_move_sign(ctx)
        + signs.block_swap_sign(ctx)
        + signs.pushpull_reorder_sign(ctx)
    )
    return _prove_zero(
        total, {"identity": "reorder-collapse", "k": k, "j": j, "k_inner": k_inner}
    )


def prove_differential_insertion(k: int, j: int) -> ProofReport:
    """Inserting the differential at slot j: Koszul prefix plus the operation
    sign at the bumped degree equals the Leibniz prefix plus the operation
    sign plus one."""
    if not 1 <= j <= k:
        raise ValueError(f"slot {j} outside 1..{k}")
    var = F2Poly.var
    degs = tuple(var(f"d{i}") for i in range(1, k + 1))
    mus = tuple(var(f"m{i}") for i in range(1, k + 1))
    bumped = degs[: j - 1] + (degs[j - 1] + 1,) + degs[j:]
    lhs = signs.koszul_prefix(degs, mus, j) + signs.operation_sign(bumped, mus)
    rhs = sum(degs[: j - 1], F2Poly.zero()) + signs.operation_sign(degs, mus) + 1
    return _prove_zero(
        lhs + rhs, {"identity": "differential-insertion", "k": k, "j": j}
    )


def instances(k_max: int) -> Iterable[tuple[int, int, int]]:
    """All (k, j, k_inner) with 1 <= k <= k_max, k_inner >= 0, valid slot."""
    for k in range(1, k_max + 1):
        for k_inner in range(0, k + 1):
            for j in range(1, k + 1 - k_inner + 1):
                yield k, j, k_inner


def prove_all(k_max: int, truth_table_k_max: int = 0) -> list[ProofReport]:
    """Master identity, both decompositions, the reorder collapse and the
    differential-insertion congruence for every instance up to k_max."""
    reports = []
    for k, j, k_inner in instances(k_max):
        reports.append(
            prove_master_identity(k, j, k_inner, truth_table=k <= truth_table_k_max)
        )
        reports.append(prove_boundary_decomposition(k, j, k_inner))
        reports.append(prove_composition_decomposition(k, j, k_inner))
        reports.append(prove_reorder_collapse(k, j, k_inner))
    for k in range(1, k_max + 1):
        for j in range(1, k + 1):
            reports.append(prove_differential_insertion(k, j))
    return reports


# --- formal replay of the relation cancellation -------------------------------


@dataclass(frozen=True)
class FormalTerm:
    """A signed symbol in the formal expansion of the relations.

    ``kind`` says how the symbol arose, ``payload`` identifies it (slot for
    differential insertions; (j, k_outer, e_outer, k_inner, e_inner) for
    boundary strata), ``sign`` is the exponent polynomial and ``route``
    names which side of the expansion produced the term.
    """

    kind: str
    payload: tuple
    sign: F2Poly
    route: str


@dataclass
class CancellationReport:
    k: int
    energy: Fraction
    pairs: list[tuple] = field(default_factory=list)
    residual: list[dict] = field(default_factory=list)

    @property
    def cancels(self) -> bool:
        return not self.residual

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "energy": str(self.energy),
            "pairs": [list(map(str, p)) for p in self.pairs],
            "residual": self.residual,
            "status": "proved" if self.cancels else "refuted",
        }


def _stratum_payloads(
    k: int, energy: Fraction, spectrum: GappedSpectrum
) -> list[tuple]:
    out = []
    for k_inner in range(0, k + 1):
        k_outer = k + 1 - k_inner
        for e_outer, e_inner in spectrum.splits(energy):
            if (k_outer == 1 and e_outer == 0) or (k_inner == 1 and e_inner == 0):
                continue
            for j in range(1, k_outer + 1):
                out.append((j, k_outer, e_outer, k_inner, e_inner))
    return out


def expand_relation(
    k: int, energy: Fraction, spectrum: GappedSpectrum
) -> list[FormalTerm]:
    """Emit the full signed term multiset for one (arity, energy) relation.

    Interior terms: the differential applied after the push-pull is rewritten
    through the fiberwise Stokes formula into per-slot differential
    insertions plus signed boundary strata; the coderivation route produces
    the same insertion symbols with independently computed signs.  Boundary
    terms: the Stokes route tags each stratum with operation + Stokes +
    boundary signs, the composition route with its insertion + reorder signs.
    """
    var = F2Poly.var
    degs = tuple(var(f"d{i}") for i in range(1, k + 1))
    mus = tuple(var(f"m{i}") for i in range(1, k + 1))
    eps = signs.operation_sign(degs, mus)
    dim_par = signs.moduli_dim_parity(var("r0"), var("m0"), mus, k)
    nu = signs.stokes_sign(dim_par, degs)

    terms: list[FormalTerm] = []
    for j in range(1, k + 1):
        leibniz = eps + sum(degs[: j - 1], F2Poly.zero())
        terms.append(FormalTerm(PUSH_D, (j,), leibniz, "stokes-rewrite"))
        bumped = degs[: j - 1] + (degs[j - 1] + 1,) + degs[j:]
        coder = signs.koszul_prefix(degs, mus, j) + signs.operation_sign(bumped, mus)
        terms.append(FormalTerm(PUSH_D, (j,), coder, "coderivation"))

    for payload in _stratum_payloads(k, energy, spectrum):
        j, k_outer, _, k_inner, _ = payload
        ctx = SignContext(
            k=k, j=j, k_outer=k_outer, k_inner=k_inner,
            degs=degs, mus=mus, mu_node=var("ma"), mu_out=var("m0"), dim_out=var("r0"),
        )
        stokes_route = eps + nu + signs.boundary_sign(ctx)
        terms.append(FormalTerm(BDRY, payload, stokes_route, "stokes-rewrite"))
        comp_route = signs.coderivation_sign(ctx) + signs.pushpull_reorder_sign(ctx)
        terms.append(FormalTerm(BDRY, payload, comp_route, "composition"))
    return terms


def prove_relation_cancellation(
    k: int,
    spectrum: GappedSpectrum,
    mutate: tuple | None = None,
) -> list[CancellationReport]:
    """Check that the formal multiset cancels pairwise for every energy level.

    ``mutate`` flips the sign of the Stokes-route term with the given
    (kind, payload); used to confirm single-sign corruption is caught and
    named.  Prerequisite identities are proven first and abort on failure.
    """
    for k_, j_, ki_ in instances(k):
        pre = prove_master_identity(k_, j_, ki_)
        if not pre.proved:
            raise RuntimeError(
                f"prerequisite master identity failed at {pre.instance}: {pre.witness}"
            )
    reports = []
    for energy in spectrum.levels():
        if k == 1 and energy == 0:
            # the differential squares to zero; nothing to expand
            reports.append(CancellationReport(k=k, energy=energy))
            continue
        terms = expand_relation(k, energy, spectrum)
        if mutate is not None:
            terms = [
                FormalTerm(t.kind, t.payload, t.sign + 1, t.route)
                if (t.kind, t.payload) == tuple(mutate) and t.route == "stokes-rewrite"
                else t
                for t in terms
            ]
        report = CancellationReport(k=k, energy=energy)
        groups: dict[tuple, list[FormalTerm]] = {}
        for t in terms:
            groups.setdefault((t.kind, t.payload), []).append(t)
        for key in sorted(groups, key=lambda kp: (kp[0], kp[1])):
            group = groups[key]
            if len(group) != 2:
                report.residual.append(
                    {"term": key, "reason": f"{len(group)} routes, expected 2"}
                )
                continue
            ok, witness = anf_equivalent(group[0].sign + group[1].sign, F2Poly.one())
            if ok:
                report.pairs.append(key)
            else:
                report.residual.append(
                    {
                        "term": key,
                        "reason": "routes do not cancel",
                        "witness": witness,
                    }
                )
        reports.append(report)
    return reports
