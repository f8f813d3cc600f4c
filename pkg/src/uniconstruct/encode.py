"""Encoding group towers as multi-sorted structures.

A tower G1 <- G2 <- G3 of surjections becomes a 3-sorted structure whose
sorts are the element sets, with one unary symbol per connecting map and one
right-translation symbol per group element.  Right translations make left
translations the automorphisms, and the automorphism group of the encoded
structure is exactly G3 acting by left translation on every level; the
verification report re-checks that exhaustively.  The same trick attaches a
fresh top group to an arbitrary two-sorted structure through evaluation
symbols.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import GroupError, StructureError
from .groups import AutomorphismGroup, FiniteGroup, GroupHom, aut_group, is_surjective
from .structures import SortedMap, SortedSignature, SortedStructure, reduct
from .ucp import TripleDerivation, derive_triple, fused23_blocks_to_pair

__all__ = [
    "GroupTriple",
    "encode_three_sorted",
    "theta",
    "theta_sort12",
    "theta_sort1",
    "ThetaReport",
    "verify_theta_iso",
    "Attachment",
    "attach_skew",
]


@dataclass
class GroupTriple:
    """G1, G2, G3 with surjections phi12: G2->G1 and phi23: G3->G2.

    phi13 is the composite; supplying it explicitly is allowed but it must
    agree pointwise.
    """

    g1: FiniteGroup
    g2: FiniteGroup
    g3: FiniteGroup
    phi12: GroupHom
    phi23: GroupHom
    phi13: GroupHom = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.phi12.domain != self.g2 or self.phi12.codomain != self.g1:
            raise GroupError("phi12 must map G2 onto G1")
        if self.phi23.domain != self.g3 or self.phi23.codomain != self.g2:
            raise GroupError("phi23 must map G3 onto G2")
        if not is_surjective(self.phi12) or not is_surjective(self.phi23):
            raise GroupError("both connecting maps must be surjective")
        composite = self.phi12.compose(self.phi23)
        if self.phi13 is None:
            object.__setattr__(self, "phi13", composite)
        elif self.phi13.map != composite.map:
            raise GroupError("phi13 does not equal phi12 composed with phi23")


def encode_three_sorted(t: GroupTriple) -> SortedStructure:
    """The 3-sorted structure with connecting maps and right translations.

    Sorts are the element sets of G1, G2, G3; F1 and F2 realize phi12 and
    phi23; T{level}_{a} sends b to b*a within its level.
    """
    groups = (t.g1, t.g2, t.g3)
    fn_syms = [("F1", (1,), 0), ("F2", (2,), 1)]
    fns = [
        {(b,): t.phi12(b) for b in t.g2.elements()},
        {(b,): t.phi23(b) for b in t.g3.elements()},
    ]
    for level, g in enumerate(groups, start=1):
        for a in g.elements():
            fn_syms.append((f"T{level}_{a}", (level - 1,), level - 1))
            fns.append({(b,): g.mul(b, a) for b in g.elements()})
    sig = SortedSignature(("g1", "g2", "g3"), (), tuple(fn_syms), ())
    return SortedStructure(sig, (t.g1.order, t.g2.order, t.g3.order), (), fns, ())


def theta(t: GroupTriple, structure: SortedStructure, c: int) -> SortedMap:
    """Left translation by c on sort 3 and by its projections below."""
    c2 = t.phi23(c)
    c1 = t.phi13(c)
    maps = (
        tuple(t.g1.mul(c1, b) for b in t.g1.elements()),
        tuple(t.g2.mul(c2, b) for b in t.g2.elements()),
        tuple(t.g3.mul(c, b) for b in t.g3.elements()),
    )
    return SortedMap(structure, structure, maps)


def theta_sort12(t: GroupTriple, structure12: SortedStructure, d: int) -> SortedMap:
    """The sort-{1,2} analogue: left translation by d in G2 and its projection."""
    d1 = t.phi12(d)
    maps = (
        tuple(t.g1.mul(d1, b) for b in t.g1.elements()),
        tuple(t.g2.mul(d, b) for b in t.g2.elements()),
    )
    return SortedMap(structure12, structure12, maps)


def theta_sort1(t: GroupTriple, structure1: SortedStructure, e: int) -> SortedMap:
    return SortedMap(structure1, structure1, (tuple(t.g1.mul(e, b) for b in t.g1.elements()),))


@dataclass
class ThetaReport:
    entries: list[tuple[str, bool, str]] = field(default_factory=list)

    def add(self, name: str, ok: bool, detail: str = ""):
        self.entries.append((name, bool(ok), detail))

    @property
    def all_pass(self) -> bool:
        return all(ok for _, ok, _ in self.entries)

    def to_json(self) -> list[dict]:
        return [{"check": n, "ok": ok, "detail": d} for n, ok, d in self.entries]


def verify_theta_iso(
    t: GroupTriple, *, max_elements: int | None = None, check_ucps: bool = True
) -> ThetaReport:
    """Exhaustively verify that left translation realizes G3 as Aut of the
    encoded structure, and that the derived restriction maps are the
    connecting maps in disguise."""
    report = ThetaReport()
    structure = encode_three_sorted(t)
    bound = max_elements if max_elements is not None else max(12, structure.total_elements)
    aut = aut_group(structure, max_elements=bound)

    report.add(
        "aut_order",
        aut.group.order == t.g3.order,
        f"|Aut|={aut.group.order}, |G3|={t.g3.order}",
    )

    images = []
    in_aut = True
    for c in t.g3.elements():
        m = theta(t, structure, c)
        if m.key() not in aut.index:
            in_aut = False
            break
        images.append(aut.index_of(m))
    report.add("theta_in_aut", in_aut, "every translation map is an automorphism")
    if not in_aut:
        return report

    report.add("theta_injective", len(set(images)) == t.g3.order)
    report.add("theta_surjective", set(images) == set(range(aut.group.order)))
    hom_ok = all(
        images[t.g3.mul(c1, c2)] == aut.group.mul(images[c1], images[c2])
        for c1 in t.g3.elements()
        for c2 in t.g3.elements()
    )
    report.add("theta_hom", hom_ok, "theta(c1*c2) = theta(c1) o theta(c2)")

    recovered = all(
        aut.maps[i] == theta(t, structure, aut.maps[i].maps[2][0])
        for i in range(aut.group.order)
    )
    report.add(
        "theta_recovers_all",
        recovered,
        "every automorphism is translation by its value at the sort-3 identity",
    )

    if check_ucps:
        derivation = derive_triple(structure, max_elements=bound)
        report.add(
            "derived_weak_ucps",
            derivation.all_weak,
            "all three derived restriction problems satisfy clauses (a)-(e)",
        )
        report.add("derived_composition", derivation.composition_ok)
        report.add(
            "restriction_matches_phi23",
            _restriction_matches_23(t, structure, derivation),
        )
        report.add(
            "restriction_matches_phi12",
            _restriction_matches_12(t, derivation),
        )
        report.add(
            "restriction_matches_phi13",
            _restriction_matches_13(t, structure, derivation),
        )
    return report


def _restriction_matches_23(
    t: GroupTriple, structure: SortedStructure, d: TripleDerivation
) -> bool:
    s12 = reduct(structure, (0, 1))
    for c in t.g3.elements():
        m = theta(t, structure, c)
        fused = d.fused23.fuse_map(m.maps)
        i = d.c23.H.index_of(fused)
        g_val = d.c23.G.maps[d.c23.phi.map[i]]
        pair = fused23_blocks_to_pair(d.fused23, g_val)
        if SortedMap(s12, s12, pair) != theta_sort12(t, s12, t.phi23(c)):
            return False
    return True


def _restriction_matches_12(t: GroupTriple, d: TripleDerivation) -> bool:
    B12 = d.c12.B
    s1 = d.c12.A
    for e in t.g2.elements():
        m = theta_sort12(t, B12, e)
        i = d.c12.H.index_of(m)
        val = d.c12.G.maps[d.c12.phi.map[i]]
        if val != theta_sort1(t, s1, t.phi12(e)):
            return False
    return True


def _restriction_matches_13(
    t: GroupTriple, structure: SortedStructure, d: TripleDerivation
) -> bool:
    s1 = d.c13.A
    for c in t.g3.elements():
        m = theta(t, structure, c)
        fused = d.fused13.fuse_map(m.maps)
        i = d.c13.H.index_of(fused)
        val = d.c13.G.maps[d.c13.phi.map[i]]
        if val != theta_sort1(t, s1, t.phi13(c)):
            return False
    return True


# ---------------------------------------------------------------------------
# Attaching a top group to an arbitrary 2-sorted structure

@dataclass
class Attachment:
    structure: SortedStructure
    base: SortedStructure
    g3: FiniteGroup
    phi23: GroupHom
    phi13: GroupHom
    autB: AutomorphismGroup
    autA: AutomorphismGroup


def attach_skew(
    B: SortedStructure,
    g3: FiniteGroup,
    phi23: GroupHom,
    phi13: GroupHom | None = None,
    *,
    max_elements: int | None = None,
) -> Attachment:
    """Extend B by a third sort of G3 elements acting through evaluations.

    phi23 must land in the automorphism group of B (as computed by
    ``aut_group``); phi13 defaults to its composition with the restriction
    map.  Evaluation symbols F2_{i} record where phi23(b) sends the i-th
    element of B, F1_{i} likewise on the first-sort reduct, and T3_{c} are
    right translations of the new sort.
    """
    if len(B.sort_sizes) != 2:
        raise StructureError("attach_skew requires a 2-sorted structure")
    B.check_valid()
    autB = aut_group(B, max_elements=max_elements)
    A = reduct(B, (0,))
    autA = aut_group(A, max_elements=max_elements)

    if phi23.domain != g3 or phi23.codomain != autB.group:
        raise GroupError("phi23 must map G3 into the automorphism group of B")

    if phi13 is None:
        restriction = []
        for i in range(autB.group.order):
            restricted = SortedMap(A, A, (autB.maps[i].maps[0],))
            restriction.append(autA.index_of(restricted))
        phi13 = GroupHom(autB.group, autA.group, restriction).compose(phi23)
    elif phi13.domain != g3 or phi13.codomain != autA.group:
        raise GroupError("phi13 must map G3 into the automorphism group of the reduct")

    fn_syms = []
    fns = []
    for alpha, (sort, e) in enumerate(B.elements()):
        if sort == 0:
            fn_syms.append((f"F1_{alpha}", (2,), 0))
            fns.append({(b,): autA.maps[phi13(b)].maps[0][e] for b in g3.elements()})
    for alpha, (sort, e) in enumerate(B.elements()):
        fn_syms.append((f"F2_{alpha}", (2,), sort))
        fns.append({(b,): autB.maps[phi23(b)].maps[sort][e] for b in g3.elements()})
    for c in g3.elements():
        fn_syms.append((f"T3_{c}", (2,), 2))
        fns.append({(b,): g3.mul(b, c) for b in g3.elements()})

    sig = SortedSignature(
        B.signature.sort_names + ("g3",),
        B.signature.relations,
        B.signature.functions + tuple(fn_syms),
        B.signature.constants,
    )
    structure = SortedStructure(
        sig,
        B.sort_sizes + (g3.order,),
        B.relations,
        list(B.functions) + fns,
        B.constants,
    )
    return Attachment(
        structure=structure,
        base=B,
        g3=g3,
        phi23=phi23,
        phi13=phi13,
        autB=autB,
        autA=autA,
    )
