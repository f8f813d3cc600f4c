"""Uniform reconstruction of a two-sorted structure over its first sort.

Given a family of lifted copies (pairwise isomorphic two-sorted relational
structures, each with a weak splitting of its restriction map) and a target
first-sort structure A, the pipeline enumerates matched triples (an iso
tuple onto A, a coherent family of structure isomorphisms extending the
induced first-sort maps, and a compatible element thread), quotients them by
the lifting-twisted equivalence, and reads off a copy of the original
structure whose first sort is A itself, element for element.

Every intermediate fact the construction leans on is re-checked on the
instance by :func:`verify_claims`; a failure there is reported honestly (it
can genuinely happen when the restriction map has a nontrivial kernel and
the family has two or more members, because the isomorphism families are
then underdetermined).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import config
from .errors import (
    BoundExceededError,
    GroupError,
    StructureError,
    VerificationError,
)
from .groups import AutomorphismGroup, GroupHom, Section, aut_group, classify_section
from .structures import (
    SortedMap,
    SortedStructure,
    canonical_copies,
    identity_map,
    isomorphisms,
    reduct,
    relabel,
    relabel_map,
)
from .ucp import restriction_hom

__all__ = [
    "LiftedCopy",
    "Family",
    "make_lifted_copy",
    "build_family",
    "MatchedTriple",
    "TripleSpace",
    "matched_triples",
    "e_equiv",
    "k_class",
    "QuotientResult",
    "build_quotient",
    "UniformResult",
    "uniform_F",
    "ClaimsReport",
    "verify_claims",
]


@dataclass
class LiftedCopy:
    """One family member: a structure, its reduct, and a weak splitting."""

    tag: int
    B: SortedStructure
    A: SortedStructure
    autB: AutomorphismGroup
    autA: AutomorphismGroup
    phi: GroupHom
    psi: Section

    def psi_map(self, autA_index: int) -> SortedMap:
        """The lifted automorphism of B for an automorphism index of A."""
        return self.autB.maps[self.psi.map[autA_index]]


@dataclass
class Family:
    members: tuple[LiftedCopy, ...]
    _spaces: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not self.members:
            raise StructureError("family must be nonempty")

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def make_lifted_copy(
    B: SortedStructure,
    psi: Sequence[int] | Section,
    tag: int = 0,
    *,
    max_elements: int | None = None,
) -> LiftedCopy:
    if len(B.sort_sizes) != 2:
        raise StructureError("lifted copies must be 2-sorted")
    if B.signature.functions or B.signature.constants:
        raise StructureError("lifted copies must be relational")
    B.check_valid()
    A = reduct(B, (0,))
    autB = aut_group(B, max_elements=max_elements)
    autA = aut_group(A, max_elements=max_elements)
    phi = restriction_hom(autB, autA)
    sec_map = psi.map if isinstance(psi, Section) else tuple(int(v) for v in psi)
    try:
        section = classify_section(phi, sec_map)
    except GroupError as exc:
        raise StructureError(f"supplied map is not a weak splitting: {exc}") from exc
    if not section.is_weak_splitting():
        raise StructureError("supplied section is not a weak splitting")
    return LiftedCopy(tag=tag, B=B, A=A, autB=autB, autA=autA, phi=phi, psi=section)


def build_family(
    B: SortedStructure,
    psi: Sequence[int] | Section,
    n: int,
    *,
    max_elements: int | None = None,
) -> Family:
    """n lifted copies: the original pair plus transported relabelings.

    Copy i > 0 relabels B along the i-th non-identity per-sort bijection
    family (lexicographic), conjugating the weak splitting along the
    relabeling; every copy is re-verified from scratch.
    """
    if n < 1:
        raise StructureError("family size must be at least 1")
    base = make_lifted_copy(B, psi, tag=0, max_elements=max_elements)
    members = [base]

    perm_iter = itertools.product(
        *(itertools.permutations(range(size)) for size in B.sort_sizes)
    )
    next(perm_iter)  # identity family
    for tag in range(1, n):
        try:
            perms = next(perm_iter)
        except StopIteration:
            raise StructureError(
                f"structure admits fewer than {n} distinct relabeling maps"
            ) from None
        f = relabel_map(B, perms)
        copy_b = f.codomain
        f_inv = f.inverse()
        f_a = SortedMap(base.A, reduct(copy_b, (0,)), (f.maps[0],))
        f_a_inv = f_a.inverse()

        aut_a_i = aut_group(reduct(copy_b, (0,)), max_elements=max_elements)
        transported = [0] * aut_a_i.group.order
        for j, g_prime in enumerate(aut_a_i.maps):
            inner = f_a_inv.compose(g_prime.compose(f_a))
            lifted = base.psi_map(base.autA.index_of(inner))
            transported_map = f.compose(lifted.compose(f_inv))
            transported[j] = transported_map.key()
        copy = make_lifted_copy(
            copy_b,
            _index_section(copy_b, transported, max_elements=max_elements),
            tag=tag,
            max_elements=max_elements,
        )
        members.append(copy)

    fam = Family(tuple(members))
    for member in members[1:]:
        if not isomorphisms(members[0].B, member.B, max_elements=max_elements):
            raise StructureError("family members are not pairwise isomorphic")
    return fam


def _index_section(copy_b: SortedStructure, transported_keys, *, max_elements):
    """Turn transported map keys into a section over the copy's aut indices."""
    autB = aut_group(copy_b, max_elements=max_elements)
    return tuple(autB.index[k] for k in transported_keys)


@dataclass(frozen=True)
class MatchedTriple:
    """(pi, g, b): indices into the owning TripleSpace's iso caches.

    ``pi_idx[s]`` picks the isomorphism A_s -> A; ``g_idx[t]`` picks the
    base-row structure isomorphism B_0 -> B_t (entry 0 is -1, the identity);
    ``b[s]`` is the (sort, element) thread entry in B_s.  The owning space is
    carried along so triples are self-contained; it does not enter equality.
    """

    pi_idx: tuple[int, ...]
    g_idx: tuple[int, ...]
    b: tuple[tuple[int, int], ...]
    space: "TripleSpace" = field(compare=False, repr=False)


class TripleSpace:
    """Enumeration context for matched triples over a family and target."""

    def __init__(
        self,
        A: SortedStructure,
        fam: Family,
        *,
        limit: int | None = None,
        max_elements: int | None = None,
    ):
        A.check_valid()
        self.A = A
        self.fam = fam
        self.max_elements = max_elements
        self.iso = [
            isomorphisms(member.A, A, max_elements=max_elements) for member in fam
        ]
        self.iso_inv = [[m.inverse() for m in lst] for lst in self.iso]
        # isomorphisms B_0 -> B_t grouped by their first-sort component
        self.biso: list[dict[tuple[int, ...], list[SortedMap]]] = []
        base = fam.members[0]
        for t, member in enumerate(fam.members):
            grouped: dict[tuple[int, ...], list[SortedMap]] = {}
            if t != 0:
                for m in isomorphisms(base.B, member.B, max_elements=max_elements):
                    grouped.setdefault(m.maps[0], []).append(m)
            self.biso.append(grouped)
        self._psi_tilde_cache: dict[tuple[int, int, int], SortedMap] = {}
        self.triples = self._enumerate(limit)
        self._classes: tuple[list[int], list[list[int]]] | None = None

    # -- enumeration ------------------------------------------------------

    def _enumerate(self, limit: int | None) -> list[MatchedTriple]:
        bound = limit if limit is not None else config.DEFAULT.matched_triples
        fam = self.fam
        if any(not lst for lst in self.iso):
            return []
        base = fam.members[0]
        b_elements = base.B.elements()
        out: list[MatchedTriple] = []
        n = len(fam.members)

        for pi_idx in itertools.product(*(range(len(lst)) for lst in self.iso)):
            ext_choices: list[list[tuple[int, SortedMap]]] = [[(-1, identity_map(base.B))]]
            feasible = True
            pi0 = self.iso[0][pi_idx[0]]
            for t in range(1, n):
                h0t = self.iso_inv[t][pi_idx[t]].compose(pi0)
                group = self.biso[t].get(h0t.maps[0])
                if not group:
                    feasible = False
                    break
                all_t = self.biso[t]
                indexed = []
                counter = 0
                for key in sorted(all_t):
                    for m in all_t[key]:
                        if key == h0t.maps[0]:
                            indexed.append((counter, m))
                        counter += 1
                ext_choices.append(indexed)
            if not feasible:
                continue
            for combo in itertools.product(*ext_choices):
                g_idx = tuple(c[0] for c in combo)
                g_maps = [c[1] for c in combo]
                for b0 in b_elements:
                    b = tuple(g_maps[t].apply_pair(b0) for t in range(n))
                    out.append(MatchedTriple(pi_idx, g_idx, b, self))
                    if len(out) > bound:
                        raise BoundExceededError(
                            f"matched-triple enumeration exceeds bound {bound}"
                        )
        return out

    def g_map(self, x: MatchedTriple, t: int) -> SortedMap:
        """The base-row isomorphism B_0 -> B_t chosen by the triple."""
        if t == 0 or x.g_idx[t] == -1:
            return identity_map(self.fam.members[0].B)
        counter = 0
        grouped = self.biso[t]
        for key in sorted(grouped):
            for m in grouped[key]:
                if counter == x.g_idx[t]:
                    return m
                counter += 1
        raise IndexError("stale triple for this space")

    # -- equivalence ------------------------------------------------------

    def psi_tilde(self, s: int, i: int, j: int) -> SortedMap:
        """psi_s applied to the inverse of pi_i^-1 . pi_j, as a map on B_s."""
        key = (s, i, j)
        cached = self._psi_tilde_cache.get(key)
        if cached is None:
            member = self.fam.members[s]
            tilde = self.iso_inv[s][i].compose(self.iso[s][j])
            idx = member.autA.index_of(tilde.inverse())
            cached = member.psi_map(idx)
            self._psi_tilde_cache[key] = cached
        return cached

    def e_equiv(self, x1: MatchedTriple, x2: MatchedTriple) -> bool:
        for s in range(len(self.fam.members)):
            h = self.psi_tilde(s, x1.pi_idx[s], x2.pi_idx[s])
            s1, e1 = x1.b[s]
            if x2.b[s] != (s1, h.maps[s1][e1]):
                return False
        return True

    def classes(self) -> tuple[list[int], list[list[int]]]:
        """Equivalence classes of e_equiv (pairwise union-find), canonical ids."""
        if self._classes is not None:
            return self._classes
        n = len(self.triples)
        if n > config.DEFAULT.x_pairwise:
            raise BoundExceededError(
                f"|X|={n} exceeds pairwise class bound {config.DEFAULT.x_pairwise}"
            )
        parent = list(range(n))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for i in range(n):
            for j in range(i + 1, n):
                if find(i) != find(j) and self.e_equiv(self.triples[i], self.triples[j]):
                    parent[find(j)] = find(i)

        roots: dict[int, int] = {}
        class_of = [0] * n
        members: list[list[int]] = []
        for i in range(n):
            r = find(i)
            if r not in roots:
                roots[r] = len(members)
                members.append([])
            class_of[i] = roots[r]
            members[roots[r]].append(i)
        self._classes = (class_of, members)
        return self._classes

    def k_indices(self, a: int) -> list[int]:
        """Indices of triples whose thread is the first-sort thread of a."""
        out = []
        for idx, x in enumerate(self.triples):
            ok = True
            for s in range(len(self.fam.members)):
                want = (0, self.iso_inv[s][x.pi_idx[s]].maps[0][a])
                if x.b[s] != want:
                    ok = False
                    break
            if ok:
                out.append(idx)
        return out


def _space_for(
    A: SortedStructure,
    fam: Family,
    *,
    limit: int | None = None,
    max_elements: int | None = None,
) -> TripleSpace:
    """Cache one enumeration per (family, target) pair on the family."""
    key = A.canonical_key()
    if limit is not None:
        return TripleSpace(A, fam, limit=limit, max_elements=max_elements)
    space = fam._spaces.get(key)
    if space is None:
        space = TripleSpace(A, fam, max_elements=max_elements)
        fam._spaces[key] = space
    return space


def matched_triples(
    A: SortedStructure,
    fam: Family,
    *,
    limit: int | None = None,
    max_elements: int | None = None,
) -> list[MatchedTriple]:
    """Every matched triple over the family and target, canonically ordered."""
    return _space_for(A, fam, limit=limit, max_elements=max_elements).triples


def e_equiv(x1: MatchedTriple, x2: MatchedTriple) -> bool:
    """The lifting-twisted equivalence on matched triples of one space."""
    if x1.space is not x2.space:
        raise StructureError("triples come from different enumerations")
    return x1.space.e_equiv(x1, x2)


def k_class(
    a: int, A: SortedStructure, fam: Family, *, max_elements: int | None = None
) -> list[MatchedTriple]:
    """The triples threading a; verified to be exactly one equivalence class."""
    space = _space_for(A, fam, max_elements=max_elements)
    indices = set(space.k_indices(a))
    if not indices:
        raise VerificationError(f"no matched triple threads element {a}")
    class_of, members = space.classes()
    cids = {class_of[i] for i in indices}
    if len(cids) != 1 or set(members[next(iter(cids))]) != indices:
        raise VerificationError(
            f"thread set of element {a} is not a single equivalence class"
        )
    return [space.triples[i] for i in sorted(indices)]


# ---------------------------------------------------------------------------
# Quotient and the uniform construction

@dataclass
class QuotientResult:
    structure: SortedStructure
    mode: str
    member: int
    phi_index: int
    space: TripleSpace | None = None
    class_of: list[int] | None = None
    class_label: list[tuple[int, int]] | None = None  # class id -> (sort, element)


def _frame_threads(space: TripleSpace) -> tuple[list[tuple[int, ...]], list[dict[int, tuple]]]:
    """Per isomorphism-tuple frame, the unique thread of every class.

    Relations on the quotient are evaluated with all coordinates in one
    frame; descending from triples to classes is sound exactly because a
    class meets every frame in a single thread (the equivalence twist between
    two frames is one automorphism per member, the same for every class).
    """
    class_of, members = space.classes()
    frames = list(itertools.product(*(range(len(lst)) for lst in space.iso)))
    by_frame: list[dict[int, tuple]] = []
    for frame in frames:
        threads: dict[int, tuple] = {}
        for i, x in enumerate(space.triples):
            if x.pi_idx != frame:
                continue
            cid = class_of[i]
            if cid in threads and threads[cid] != x.b:
                raise VerificationError(
                    "a class carries two different threads in one frame"
                )
            threads[cid] = x.b
        if len(threads) != len(members):
            raise VerificationError("a class misses a frame entirely")
        by_frame.append(threads)
    return frames, by_frame


def _frame_membership(space: TripleSpace, threads: dict[int, tuple], ri: int, ct, rsig):
    """(exists-member, forall-members) verdicts for one class tuple."""
    n_members = len(space.fam.members)
    verdicts = []
    for s in range(n_members):
        tup = tuple(threads[c][s][1] for c in ct)
        verdicts.append(tup in space.fam.members[s].B.relations[ri])
    return any(verdicts), all(verdicts)


def _quotient_full(space: TripleSpace) -> QuotientResult:
    """Quotient on explicit equivalence classes, with agreement checks.

    Verifies, exhaustively: every class has one thread per frame, the
    exists/forall agreement across family members within the reference
    frame, and frame-independence of relation membership (the congruence
    content).  Failures raise, since they are theorems for coherent
    families.
    """
    if not space.triples:
        raise StructureError("no matched triples: target is not isomorphic to the family")
    class_of, members = space.classes()
    base = space.fam.members[0]

    sort_of_class: list[int] = []
    for group in members:
        sorts = {space.triples[i].b[s][0] for i in group for s in range(len(space.fam.members))}
        if len(sorts) != 1:
            raise VerificationError("equivalence class mixes sorts")
        sort_of_class.append(sorts.pop())

    frames, by_frame = _frame_threads(space)
    ref = by_frame[0]
    n_classes = len(members)

    memberships: list[dict[tuple[int, ...], bool]] = []
    for ri, (name, rsig) in enumerate(base.B.signature.relations):
        arity = len(rsig)
        if n_classes**arity > 10**6:
            raise BoundExceededError(f"relation {name!r}: congruence check too large")
        table: dict[tuple[int, ...], bool] = {}
        for ct in itertools.product(*(
            [c for c in range(n_classes) if sort_of_class[c] == rsig[pos]]
            for pos in range(arity)
        )):
            exists, forall = _frame_membership(space, ref, ri, ct, rsig)
            if exists != forall:
                raise VerificationError(
                    f"relation {name!r}: exists/forall agreement fails across members"
                )
            table[ct] = exists
        memberships.append(table)

    # frame-independence: recompute membership in every other frame
    for fi in range(1, len(frames)):
        threads = by_frame[fi]
        for ri, (name, rsig) in enumerate(base.B.signature.relations):
            for ct, holds in memberships[ri].items():
                exists, _ = _frame_membership(space, threads, ri, ct, rsig)
                if exists != holds:
                    raise VerificationError(
                        f"relation {name!r}: membership is not constant across frames"
                    )

    # canonical labels per sort
    labels: list[tuple[int, int]] = [(-1, -1)] * n_classes
    counters = [0, 0]
    for cid in range(n_classes):
        s = sort_of_class[cid]
        labels[cid] = (s, counters[s])
        counters[s] += 1

    quot_rels = []
    for ri, (name, rsig) in enumerate(base.B.signature.relations):
        tuples = set()
        for ct, holds in memberships[ri].items():
            if holds:
                tuples.add(tuple(labels[c][1] for c in ct))
        quot_rels.append(tuples)

    structure = SortedStructure(
        base.B.signature, tuple(counters), quot_rels, (), ()
    )
    return QuotientResult(
        structure=structure,
        mode="full",
        member=0,
        phi_index=0,
        space=space,
        class_of=class_of,
        class_label=labels,
    )


def build_quotient(
    A: SortedStructure,
    fam: Family,
    *,
    mode: str = "representative",
    max_elements: int | None = None,
    space: TripleSpace | None = None,
) -> QuotientResult:
    """The quotient structure of matched triples by the twist equivalence.

    Representative mode realizes classes through the members with a fixed
    first isomorphism, which is just the base member itself; full mode
    enumerates everything and re-verifies the agreement and congruence
    claims (hard error on failure).
    """
    if mode == "representative":
        base = fam.members[0]
        iso = isomorphisms(base.A, A, max_elements=max_elements)
        if not iso:
            raise StructureError("target is not isomorphic to the family members")
        # classes realized through the fixed-isomorphism slice are the base
        # member's own elements
        labels = [(s, e) for s in range(2) for e in range(base.B.sort_sizes[s])]
        return QuotientResult(
            structure=base.B,
            mode="representative",
            member=0,
            phi_index=0,
            class_label=labels,
        )
    if mode != "full":
        raise ValueError("mode must be 'representative' or 'full'")
    if space is None:
        space = _space_for(A, fam, max_elements=max_elements)
    return _quotient_full(space)


@dataclass
class UniformResult:
    structure: SortedStructure
    mode: str
    quotient: QuotientResult

    def to_json(self):
        from .structures import structure_to_json

        return structure_to_json(self.structure)


def uniform_F(
    A: SortedStructure,
    fam: Family,
    *,
    mode: str = "representative",
    max_elements: int | None = None,
    space: TripleSpace | None = None,
) -> UniformResult:
    """The uniform construction: a copy of the family structure over A itself.

    Postconditions are always re-checked: the first-sort reduct must equal A
    element for element, and the result must be isomorphic to the family
    members.
    """
    base = fam.members[0]
    if mode == "representative":
        iso = isomorphisms(base.A, A, max_elements=max_elements)
        if not iso:
            raise StructureError("target is not isomorphic to the family members")
        phi = iso[0]
        ident = tuple(range(base.B.sort_sizes[1]))
        structure = relabel(base.B, (phi.maps[0], ident))
        result = UniformResult(
            structure=structure,
            mode=mode,
            quotient=QuotientResult(
                structure=base.B, mode="representative", member=0, phi_index=0
            ),
        )
    elif mode == "full":
        if space is None:
            space = _space_for(A, fam, max_elements=max_elements)
        quot = _quotient_full(space)
        class_of, members = space.classes()
        labels = quot.class_label
        assert labels is not None and class_of is not None

        n_sort0_classes = sum(1 for s, _ in labels if s == 0)
        if n_sort0_classes != A.sort_sizes[0]:
            raise VerificationError(
                "first-sort classes do not match the target element count"
            )
        a_of_class: dict[int, int] = {}
        for a in range(A.sort_sizes[0]):
            idxs = space.k_indices(a)
            cids = {class_of[i] for i in idxs}
            if len(cids) != 1:
                raise VerificationError(f"thread classes of element {a} are not unique")
            a_of_class[cids.pop()] = a

        relabeled: list[tuple[int, int]] = [(-1, -1)] * len(members)
        for cid, (s, lbl) in enumerate(labels):
            if s == 0:
                if cid not in a_of_class:
                    raise VerificationError(
                        "a first-sort class is not the thread class of any element"
                    )
                relabeled[cid] = (0, a_of_class[cid])
            else:
                relabeled[cid] = (1, lbl)

        cid_of_label = {labels[c]: c for c in range(len(labels))}
        rels = []
        for ri, (name, rsig) in enumerate(base.B.signature.relations):
            out = set()
            for t in quot.structure.relations[ri]:
                mapped = tuple(
                    relabeled[cid_of_label[(rsig[pos], lbl)]][1]
                    for pos, lbl in enumerate(t)
                )
                out.add(mapped)
            rels.append(out)
        structure = SortedStructure(
            base.B.signature,
            (A.sort_sizes[0], quot.structure.sort_sizes[1]),
            rels,
            (),
            (),
        )
        result = UniformResult(structure=structure, mode=mode, quotient=quot)
    else:
        raise ValueError("mode must be 'representative' or 'full'")

    if reduct(result.structure, (0,)) != A:
        raise VerificationError("first-sort reduct of the result does not equal the target")
    if not isomorphisms(result.structure, base.B, max_elements=max_elements):
        raise VerificationError("result is not isomorphic to the family structure")
    return result


# ---------------------------------------------------------------------------
# Claims verification

@dataclass
class ClaimsReport:
    entries: list[tuple[str, bool, str]] = field(default_factory=list)

    def add(self, name: str, ok: bool, detail: str = ""):
        self.entries.append((name, bool(ok), detail))

    @property
    def all_pass(self) -> bool:
        return all(ok for _, ok, _ in self.entries)

    def to_json(self) -> list[dict]:
        return [{"claim": n, "ok": ok, "detail": d} for n, ok, d in self.entries]


def verify_claims(
    A: SortedStructure,
    fam: Family,
    *,
    max_elements: int | None = None,
    copy_cap: int | None = None,
) -> ClaimsReport:
    """Re-check every intermediate fact of the uniform construction by full
    enumeration over the matched-triple space."""
    report = ClaimsReport()
    report.add(
        "family_nonempty_weak_liftings",
        all(member.psi.is_weak_splitting() for member in fam),
        f"{len(fam)} members",
    )

    copies0 = {c.canonical_key() for c in canonical_copies(fam.members[0].B, copy_cap)}
    same = all(
        {c.canonical_key() for c in canonical_copies(m.B, copy_cap)} == copies0
        for m in fam.members[1:]
    )
    report.add(
        "copy_set_definable_from_family",
        same,
        f"{len(copies0)} canonical copies shared by all members",
    )

    space = _space_for(A, fam, max_elements=max_elements)
    xs = space.triples
    n = len(xs)
    report.add("triple_space_nonempty", n > 0, f"|X|={n}")
    if n == 0:
        return report
    if n > config.DEFAULT.x_pairwise:
        raise BoundExceededError(
            f"|X|={n} exceeds pairwise class bound {config.DEFAULT.x_pairwise}"
        )

    mat = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(n):
            mat[i, j] = space.e_equiv(xs[i], xs[j])
    report.add("E_reflexive", bool(mat.diagonal().all()))
    report.add("E_symmetric", bool((mat == mat.T).all()))
    closure = (mat.astype(np.uint8) @ mat.astype(np.uint8)) > 0
    report.add("E_transitive", bool((closure <= mat).all()))

    if not (mat.diagonal().all() and (mat == mat.T).all() and (closure <= mat).all()):
        return report

    class_of, members = space.classes()
    base = fam.members[0]

    frames_ok = True
    frames_detail = ""
    frames: list = []
    by_frame: list = []
    try:
        frames, by_frame = _frame_threads(space)
        frames_detail = f"{len(frames)} frames, one thread per class in each"
    except VerificationError as exc:
        frames_ok = False
        frames_detail = str(exc)
    report.add("classes_have_unique_frame_threads", frames_ok, frames_detail)

    ok_agree = True
    detail_agree = []
    ok_frames_const = True
    detail_const = []
    if frames_ok:
        sort_of_class = [space.triples[members[c][0]].b[0][0] for c in range(len(members))]
        for ri, (name, rsig) in enumerate(base.B.signature.relations):
            arity = len(rsig)
            if len(members) ** arity > 10**6:
                raise BoundExceededError(f"relation {name!r}: claim check too large")
            for ct in itertools.product(*(
                [c for c in range(len(members)) if sort_of_class[c] == rsig[pos]]
                for pos in range(arity)
            )):
                verdicts = [
                    _frame_membership(space, threads, ri, ct, rsig)
                    for threads in by_frame
                ]
                if any(ex != fa for ex, fa in verdicts):
                    ok_agree = False
                    detail_agree.append(f"{name}{ct}")
                if len({ex for ex, _ in verdicts}) > 1:
                    ok_frames_const = False
                    detail_const.append(f"{name}{ct}")
    report.add(
        "cla3_exists_forall_agreement",
        frames_ok and ok_agree,
        "; ".join(detail_agree[:4]),
    )
    report.add(
        "cla4_congruence_frame_independent",
        frames_ok and ok_frames_const,
        "; ".join(detail_const[:4]),
    )

    quot = None
    detail_cong = ""
    if frames_ok and ok_agree and ok_frames_const:
        try:
            quot = _quotient_full(space)
        except VerificationError as exc:  # pragma: no cover - guarded above
            detail_cong = str(exc)
    report.add("quotient_constructible", quot is not None, detail_cong)

    k_ok = True
    k_detail = []
    seen_classes = set()
    for a in range(A.sort_sizes[0]):
        idxs = set(space.k_indices(a))
        if not idxs:
            k_ok = False
            k_detail.append(f"element {a}: empty thread set")
            continue
        cids = {class_of[i] for i in idxs}
        if len(cids) != 1:
            k_ok = False
            k_detail.append(f"element {a}: spans {len(cids)} classes")
            continue
        cid = cids.pop()
        if set(members[cid]) != idxs:
            k_ok = False
            k_detail.append(f"element {a}: thread set is a strict part of its class")
        if cid in seen_classes:
            k_ok = False
            k_detail.append(f"element {a}: class collides with another element")
        seen_classes.add(cid)
    report.add("cla5_k_classes", k_ok, "; ".join(k_detail))

    n_sort2 = sum(
        1 for cid in range(len(members)) if xs[members[cid][0]].b[0][0] == 1
    )
    report.add(
        "cla5_class_count",
        len(members) == A.sort_sizes[0] + n_sort2,
        f"{len(members)} classes = {A.sort_sizes[0]} first-sort + {n_sort2} second-sort",
    )

    # Y_{s, phi}: base member, first isomorphism
    y_set = {i for i, x in enumerate(xs) if x.pi_idx[0] == 0}
    rho_const = True
    meets_all = True
    rho_values: dict[int, tuple[int, int]] = {}
    for cid, group in enumerate(members):
        inter = [i for i in group if i in y_set]
        if not inter:
            meets_all = False
            continue
        values = {xs[i].b[0] for i in inter}
        if len(values) != 1:
            rho_const = False
        rho_values[cid] = values.pop()
    report.add("cla6_rho_constant_on_classes", rho_const)
    report.add("cla6_y_meets_every_class", meets_all)
    rho_injective = len(set(rho_values.values())) == len(rho_values)
    report.add(
        "cla6_rho_injective_across_classes",
        rho_injective and len(rho_values) == len(members),
    )

    if quot is not None:
        iso_found = bool(
            isomorphisms(quot.structure, base.B, max_elements=max_elements)
        )
        report.add(
            "cla6_quotient_isomorphic_to_member",
            iso_found and quot.structure.sort_sizes == base.B.sort_sizes,
            f"quotient sorts {quot.structure.sort_sizes} vs member {base.B.sort_sizes}",
        )
        witness_ok = rho_const and meets_all and rho_injective
        if witness_ok and quot.class_label is not None:
            witness_ok = _rho_witness_is_isomorphism(
                quot.structure, quot.class_label, rho_values, base.B
            )
        report.add(
            "cla6_explicit_rho_witness",
            witness_ok,
            "class -> slice-representative thread value is an isomorphism",
        )
    else:
        report.add("cla6_quotient_isomorphic_to_member", False, "congruence failed")
        report.add("cla6_explicit_rho_witness", False, "congruence failed")
    return report


def _rho_witness_is_isomorphism(quot_structure, class_label, rho_values, target) -> bool:
    """Check the explicit map (quotient label -> thread value) directly."""
    if quot_structure.sort_sizes != target.sort_sizes:
        return False
    n_classes = len(class_label)
    maps = [
        [-1] * quot_structure.sort_sizes[0],
        [-1] * quot_structure.sort_sizes[1],
    ]
    for cid in range(n_classes):
        s, label = class_label[cid]
        rs, re_ = rho_values[cid]
        if rs != s:
            return False
        maps[s][label] = re_
    if any(v < 0 for m in maps for v in m):
        return False
    if any(sorted(m) != list(range(len(m))) for m in maps):
        return False
    for ri, (_, rsig) in enumerate(quot_structure.signature.relations):
        image = {
            tuple(maps[rsig[i]][t[i]] for i in range(len(t)))
            for t in quot_structure.relations[ri]
        }
        if image != target.relations[ri]:
            return False
    return True
