"""Finite groups as Cayley tables, homomorphisms, and splitting search.

Identity is always element 0.  Group multiplication for automorphism groups
is map composition (apply the right factor first).  Everything is exact and
deterministic: section enumeration is lexicographic by fiber-representative
choice, so the first witness found is reproducible.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import config
from .errors import BoundExceededError, GroupError
from .structures import SortedMap, SortedStructure, automorphisms

__all__ = [
    "FiniteGroup",
    "GroupHom",
    "Section",
    "SectionSearch",
    "center",
    "quotient_by_subgroup",
    "quotient_by_center",
    "is_hom",
    "is_surjective",
    "classify_section",
    "classify_sections",
    "cyclic",
    "dihedral",
    "dicyclic",
    "symmetric",
    "alternating",
    "direct_product",
    "catalog",
    "catalog_search_weak_not_strong",
    "find_isomorphism",
    "subgroups",
    "normal_subgroups",
    "surjective_homs",
    "AutomorphismGroup",
    "aut_group",
    "group_to_json",
    "group_from_json",
    "hom_to_json",
    "hom_from_json",
]

_ASSOC_EXHAUSTIVE_MAX = 64
_ASSOC_SAMPLES = 2000


class FiniteGroup:
    """A finite group given by its full multiplication table.

    The table is validated at construction: row/column 0 must be the identity
    row, every row and column must be a permutation, and associativity is
    checked exhaustively up to order 64 (sampled above that).
    """

    __slots__ = ("order", "table", "names", "name", "_np", "_inv")

    def __init__(
        self,
        table: Sequence[Sequence[int]],
        names: Sequence[str] | None = None,
        name: str | None = None,
    ):
        tab = tuple(tuple(int(v) for v in row) for row in table)
        n = len(tab)
        if n == 0:
            raise GroupError("group order must be at least 1")
        if any(len(row) != n for row in tab):
            raise GroupError("multiplication table is not square")
        arr = np.array(tab, dtype=np.int64)
        if arr.min() < 0 or arr.max() >= n:
            raise GroupError("table entries out of range")
        if not (np.array_equal(arr[0], np.arange(n)) and np.array_equal(arr[:, 0], np.arange(n))):
            raise GroupError("element 0 is not an identity")
        ident = np.arange(n)
        for i in range(n):
            if not np.array_equal(np.sort(arr[i]), ident) or not np.array_equal(
                np.sort(arr[:, i]), ident
            ):
                raise GroupError(f"row/column {i} is not a permutation")
        if n <= _ASSOC_EXHAUSTIVE_MAX:
            if not np.array_equal(arr[arr], arr[:, arr]):
                raise GroupError("multiplication table is not associative")
        else:
            rng = random.Random(0)
            for _ in range(_ASSOC_SAMPLES):
                a, b, c = (rng.randrange(n) for _ in range(3))
                if tab[tab[a][b]][c] != tab[a][tab[b][c]]:
                    raise GroupError("multiplication table is not associative")
        inv = [0] * n
        for a in range(n):
            row = tab[a]
            inv[a] = row.index(0)
        object.__setattr__(self, "order", n)
        object.__setattr__(self, "table", tab)
        object.__setattr__(self, "names", tuple(names) if names is not None else None)
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_np", arr)
        object.__setattr__(self, "_inv", tuple(inv))

    def __setattr__(self, key, value):  # pragma: no cover
        raise AttributeError("FiniteGroup is immutable")

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self._inv[a]

    def elements(self) -> range:
        return range(self.order)

    def element_order(self, a: int) -> int:
        x, k = a, 1
        while x != 0:
            x = self.table[x][a]
            k += 1
        return k

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self._np, self._np.T))

    def element_name(self, a: int) -> str:
        return self.names[a] if self.names else str(a)

    def label(self) -> str:
        return self.name or f"group_of_order_{self.order}"

    def __eq__(self, other):
        if not isinstance(other, FiniteGroup):
            return NotImplemented
        return self.table == other.table

    def __hash__(self):
        return hash(self.table)

    def __repr__(self):
        return f"FiniteGroup({self.label()}, order={self.order})"


class GroupHom:
    """Total map between groups satisfying the homomorphism law everywhere."""

    __slots__ = ("domain", "codomain", "map")

    def __init__(self, domain: FiniteGroup, codomain: FiniteGroup, mapping: Sequence[int]):
        m = tuple(int(v) for v in mapping)
        if len(m) != domain.order:
            raise GroupError("hom map is not total")
        if any(v < 0 or v >= codomain.order for v in m):
            raise GroupError("hom map has out-of-range values")
        if m[0] != 0:
            raise GroupError("hom does not fix the identity")
        arr = np.array(m, dtype=np.int64)
        lhs = arr[domain._np]
        rhs = codomain._np[arr[:, None], arr[None, :]]
        if not np.array_equal(lhs, rhs):
            raise GroupError("map violates the homomorphism law")
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "codomain", codomain)
        object.__setattr__(self, "map", m)

    def __setattr__(self, key, value):  # pragma: no cover
        raise AttributeError("GroupHom is immutable")

    def __call__(self, a: int) -> int:
        return self.map[a]

    def compose(self, first: "GroupHom") -> "GroupHom":
        """self after first."""
        if first.codomain != self.domain:
            raise GroupError("hom composition domains do not match")
        return GroupHom(first.domain, self.codomain, tuple(self.map[v] for v in first.map))

    def kernel(self) -> tuple[int, ...]:
        return tuple(a for a, v in enumerate(self.map) if v == 0)

    def image(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.map)))

    def __eq__(self, other):
        if not isinstance(other, GroupHom):
            return NotImplemented
        return (
            self.map == other.map
            and self.domain == other.domain
            and self.codomain == other.codomain
        )

    def __hash__(self):
        return hash(self.map)


def is_hom(mapping: Sequence[int], domain: FiniteGroup, codomain: FiniteGroup) -> bool:
    """Exhaustive check of the homomorphism law for a candidate map."""
    m = tuple(int(v) for v in mapping)
    if len(m) != domain.order or any(v < 0 or v >= codomain.order for v in m):
        return False
    for a in domain.elements():
        rowa = domain.table[a]
        for b in domain.elements():
            if m[rowa[b]] != codomain.table[m[a]][m[b]]:
                return False
    return True


def is_surjective(h: GroupHom) -> bool:
    return len(set(h.map)) == h.codomain.order


_center_cache: dict[tuple, tuple[int, ...]] = {}


def center(g: FiniteGroup) -> list[int]:
    """All elements commuting with the whole group; always contains 0."""
    cached = _center_cache.get(g.table)
    if cached is None:
        arr = g._np
        cached = tuple(int(z) for z in range(g.order) if np.array_equal(arr[z], arr[:, z]))
        _center_cache[g.table] = cached
    return list(cached)


def quotient_by_subgroup(g: FiniteGroup, sub: Iterable[int]) -> tuple[FiniteGroup, GroupHom]:
    """Quotient by a normal subgroup, with the natural projection.

    Cosets are numbered by their minimal element, so the identity coset is
    element 0 of the quotient.
    """
    n_set = set(int(x) for x in sub)
    if 0 not in n_set:
        raise GroupError("subgroup must contain the identity")
    for a in n_set:
        for b in n_set:
            if g.mul(a, b) not in n_set:
                raise GroupError("subset is not closed under multiplication")
    for x in g.elements():
        for a in n_set:
            if g.mul(g.mul(x, a), g.inv(x)) not in n_set:
                raise GroupError("subgroup is not normal")

    coset_of = [-1] * g.order
    reps: list[int] = []
    for x in g.elements():
        if coset_of[x] >= 0:
            continue
        members = sorted(g.mul(x, a) for a in n_set)
        ci = len(reps)
        reps.append(members[0])
        for m in members:
            coset_of[m] = ci
    k = len(reps)
    table = [[coset_of[g.mul(reps[i], reps[j])] for j in range(k)] for i in range(k)]
    q = FiniteGroup(table, name=f"{g.label()}/N")
    return q, GroupHom(g, q, coset_of)


def quotient_by_center(g: FiniteGroup) -> tuple[FiniteGroup, GroupHom]:
    return quotient_by_subgroup(g, center(g))


# ---------------------------------------------------------------------------
# Sections of a surjection and their classification

SPLITTING = "splitting"
WEAK_SPLITTING = "weak-splitting"
SECTION_ONLY = "section-only"


@dataclass(frozen=True)
class Section:
    """A set-theoretic section of a surjection, with its classification.

    classification is the strongest label that applies:
    ``splitting`` (the section is a homomorphism), ``weak-splitting``
    (identity/inverse preservation plus homomorphism modulo the center of the
    big group), else ``section-only``.
    """

    of: GroupHom
    map: tuple[int, ...]
    classification: str

    def is_splitting(self) -> bool:
        return self.classification == SPLITTING

    def is_weak_splitting(self) -> bool:
        return self.classification in (SPLITTING, WEAK_SPLITTING)


def _section_checks(phi: GroupHom, sec: Sequence[int]) -> dict[str, bool]:
    h, g = phi.domain, phi.codomain
    m = tuple(int(v) for v in sec)
    if len(m) != g.order or any(v < 0 or v >= h.order for v in m):
        return {
            "section": False,
            "identity": False,
            "inverses": False,
            "center_hom": False,
            "hom": False,
        }
    checks = {
        "section": all(phi.map[m[x]] == x for x in g.elements()),
        "identity": m[0] == 0,
        "inverses": all(m[g.inv(x)] == h.inv(m[x]) for x in g.elements()),
    }
    z = set(center(h))
    ok = True
    for x in g.elements():
        for y in g.elements():
            defect = h.mul(h.mul(m[x], m[y]), h.inv(m[g.mul(x, y)]))
            if defect not in z:
                ok = False
                break
        if not ok:
            break
    checks["center_hom"] = ok
    checks["hom"] = is_hom(m, g, h)
    return checks


def classify_section(phi: GroupHom, sec: Sequence[int]) -> Section:
    """Classify a candidate section; raises if it is not a section at all."""
    checks = _section_checks(phi, sec)
    if not checks["section"]:
        raise GroupError("map is not a section of the given surjection")
    if checks["hom"]:
        label = SPLITTING
    elif checks["identity"] and checks["inverses"] and checks["center_hom"]:
        label = WEAK_SPLITTING
    else:
        label = SECTION_ONLY
    return Section(phi, tuple(int(v) for v in sec), label)


@dataclass
class SectionSearch:
    """Result of classify_sections.

    In exhaustive mode ``sections`` holds every section, classified.  In
    backtracking mode only candidates satisfying the identity/inverse
    condition are enumerated (with center-defect pruning), which still finds
    every weak splitting and every splitting.
    """

    phi: GroupHom
    mode: str
    n_candidates: int
    sections: list[Section] = field(default_factory=list)
    splittings: list[Section] = field(default_factory=list)
    weak_splittings: list[Section] = field(default_factory=list)

    @property
    def has_splitting(self) -> bool:
        return bool(self.splittings)

    @property
    def has_weak_splitting(self) -> bool:
        return bool(self.weak_splittings) or bool(self.splittings)

    def summary(self) -> str:
        parts = [
            f"{self.n_candidates} candidates ({self.mode})",
            "splitting: " + ("yes" if self.has_splitting else "no"),
            "weak splitting: " + ("yes" if self.has_weak_splitting else "no"),
        ]
        return "; ".join(parts)


def _fibers(phi: GroupHom) -> list[list[int]]:
    fibers: list[list[int]] = [[] for _ in range(phi.codomain.order)]
    for a, v in enumerate(phi.map):
        fibers[v].append(a)
    return fibers


def classify_sections(
    phi: GroupHom, *, max_candidates: int | None = None, mode: str = "auto"
) -> SectionSearch:
    """Enumerate and classify the sections of a surjective homomorphism.

    Exhaustive mode walks the full fiber product (lexicographic by fiber
    representative).  If that exceeds the candidate bound, a backtracking
    mode enumerates only maps with psi(1)=1 and psi(x^-1)=psi(x)^-1, pruning
    on the center-defect condition; that loses the section-only census but
    still decides splitting/weak-splitting existence exactly.
    """
    if not is_surjective(phi):
        raise GroupError("classify_sections requires a surjective homomorphism")
    bound = max_candidates if max_candidates is not None else config.DEFAULT.section_candidates
    fibers = _fibers(phi)
    total = 1
    for f in fibers:
        total *= len(f)

    g, h = phi.codomain, phi.domain
    if mode == "auto":
        mode = "exhaustive" if total <= bound else "backtracking"
    if mode == "exhaustive" and total > bound:
        raise BoundExceededError(f"{total} sections exceed candidate bound {bound}")

    result = SectionSearch(phi=phi, mode=mode, n_candidates=total)

    if mode == "exhaustive":
        for combo in itertools.product(*fibers):
            sec = classify_section(phi, combo)
            result.sections.append(sec)
            if sec.classification == SPLITTING:
                result.splittings.append(sec)
            elif sec.classification == WEAK_SPLITTING:
                result.weak_splittings.append(sec)
        return result

    # Backtracking over inverse-closed assignments.
    z = set(center(h))
    order_g = g.order
    pairs: list[tuple[int, int]] = []
    seen = {0}
    for x in g.elements():
        if x in seen:
            continue
        xi = g.inv(x)
        seen.add(x)
        seen.add(xi)
        pairs.append((x, xi))

    assign = [-1] * order_g
    assign[0] = 0

    def defect_ok() -> bool:
        assigned = [x for x in g.elements() if assign[x] >= 0]
        for x in assigned:
            for y in assigned:
                xy = g.mul(x, y)
                if assign[xy] < 0:
                    continue
                defect = h.mul(h.mul(assign[x], assign[y]), h.inv(assign[xy]))
                if defect not in z:
                    return False
        return True

    def extend(i: int):
        if i == len(pairs):
            sec = classify_section(phi, assign)
            if sec.classification == SPLITTING:
                result.splittings.append(sec)
            elif sec.classification == WEAK_SPLITTING:
                result.weak_splittings.append(sec)
            return
        x, xi = pairs[i]
        for v in fibers[x]:
            vi = h.inv(v)
            if x == xi and v != vi:
                continue
            assign[x] = v
            assign[xi] = vi
            if defect_ok():
                extend(i + 1)
            assign[x] = -1
            assign[xi] = -1

    extend(0)
    return result


# ---------------------------------------------------------------------------
# Named families and the small-group catalog

def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise GroupError("cyclic group order must be positive")
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    return FiniteGroup(table, name=f"C{n}")


def dihedral(n: int) -> FiniteGroup:
    """Dihedral group of order 2n, elements encoded as j*n + k for r^k s^j."""
    if n < 1:
        raise GroupError("dihedral parameter must be positive")

    def mul(a, b):
        k1, j1 = a % n, a // n
        k2, j2 = b % n, b // n
        if j1 == 0:
            return ((k1 + k2) % n) + n * j2
        return ((k1 - k2) % n) + n * ((j1 + j2) % 2)

    table = [[mul(a, b) for b in range(2 * n)] for a in range(2 * n)]
    return FiniteGroup(table, name=f"D{n}")


def dicyclic(n: int) -> FiniteGroup:
    """Dicyclic (generalized quaternion) group of order 4n; Q8 is n=2."""
    if n < 1:
        raise GroupError("dicyclic parameter must be positive")
    m = 2 * n

    def mul(x, y):
        k1, j1 = x % m, x // m
        k2, j2 = y % m, y // m
        if j1 == 0:
            return ((k1 + k2) % m) + m * j2
        if j2 == 0:
            return ((k1 - k2) % m) + m
        return (k1 - k2 + n) % m

    table = [[mul(a, b) for b in range(4 * n)] for a in range(4 * n)]
    return FiniteGroup(table, name=f"Q{4 * n}" if n >= 2 else "C4")


def _perm_group(perms: list[tuple[int, ...]], name: str) -> FiniteGroup:
    index = {p: i for i, p in enumerate(perms)}
    table = [
        [index[tuple(p[q[i]] for i in range(len(q)))] for q in perms] for p in perms
    ]
    return FiniteGroup(table, names=[str(list(p)) for p in perms], name=name)


def symmetric(n: int) -> FiniteGroup:
    perms = [tuple(p) for p in itertools.permutations(range(n))]
    return _perm_group(perms, f"S{n}")


def _parity(p: tuple[int, ...]) -> int:
    seen = [False] * len(p)
    sign = 0
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        sign ^= (length - 1) & 1
    return sign


def alternating(n: int) -> FiniteGroup:
    perms = [tuple(p) for p in itertools.permutations(range(n)) if _parity(tuple(p)) == 0]
    return _perm_group(perms, f"A{n}")


def direct_product(g1: FiniteGroup, g2: FiniteGroup, name: str | None = None) -> FiniteGroup:
    n2 = g2.order

    def enc(a, b):
        return a * n2 + b

    table = [
        [
            enc(g1.mul(x // n2, y // n2), g2.mul(x % n2, y % n2))
            for y in range(g1.order * n2)
        ]
        for x in range(g1.order * n2)
    ]
    return FiniteGroup(table, name=name or f"{g1.label()}x{g2.label()}")


def _invariant_key(g: FiniteGroup):
    orders = sorted(g.element_order(a) for a in g.elements())
    return (g.order, tuple(orders), g.is_abelian(), len(center(g)))


def _generating_set(g: FiniteGroup) -> list[int]:
    gens: list[int] = []
    closure = {0}
    while len(closure) < g.order:
        x = min(a for a in g.elements() if a not in closure)
        gens.append(x)
        current = set(closure)
        current.add(x)
        changed = True
        while changed:
            changed = False
            items = list(current)
            for a in items:
                for b in items:
                    c = g.mul(a, b)
                    if c not in current:
                        current.add(c)
                        changed = True
        closure = current
    return gens


def find_isomorphism(g1: FiniteGroup, g2: FiniteGroup) -> tuple[int, ...] | None:
    """First group isomorphism g1 -> g2 found, or None.

    Backtracks over images of a small generating set, extending each partial
    choice to the generated subgroup and pruning on conflicts.
    """
    if _invariant_key(g1) != _invariant_key(g2):
        return None
    gens = _generating_set(g1)
    orders2: dict[int, list[int]] = {}
    for a in g2.elements():
        orders2.setdefault(g2.element_order(a), []).append(a)

    def close(mapping: dict[int, int]) -> dict[int, int] | None:
        m = dict(mapping)
        frontier = list(m)
        while frontier:
            nxt = []
            for a in list(m):
                for b in frontier:
                    for x, y in ((a, b), (b, a)):
                        c = g1.mul(x, y)
                        w = g2.mul(m[x], m[y])
                        if c in m:
                            if m[c] != w:
                                return None
                        else:
                            m[c] = w
                            nxt.append(c)
            frontier = nxt
        if len(set(m.values())) != len(m):
            return None
        return m

    def extend(i: int, mapping: dict[int, int]) -> dict[int, int] | None:
        if i == len(gens):
            if len(mapping) == g1.order:
                return mapping
            return None
        gen = gens[i]
        if gen in mapping:
            return extend(i + 1, mapping)
        for img in orders2[g1.element_order(gen)]:
            if img in mapping.values():
                continue
            trial = dict(mapping)
            trial[gen] = img
            closed = close(trial)
            if closed is None:
                continue
            found = extend(i + 1, closed)
            if found is not None:
                return found
        return None

    result = extend(0, {0: 0})
    if result is None:
        return None
    return tuple(result[a] for a in g1.elements())


def catalog(max_order: int) -> list[FiniteGroup]:
    """Named small groups up to isomorphism: cyclic, symmetric, alternating,
    dihedral, quaternion (dicyclic) families plus the closure under binary
    direct products, deduplicated by exhaustive isomorphism search."""
    if max_order > 32:
        raise BoundExceededError("catalog supports max_order <= 32")
    raw: list[FiniteGroup] = []
    raw.extend(cyclic(n) for n in range(1, max_order + 1))
    n = 3
    while _factorial(n) <= max_order:
        raw.append(symmetric(n))
        n += 1
    n = 3
    while _factorial(n) // 2 <= max_order:
        raw.append(alternating(n))
        n += 1
    raw.extend(dihedral(k) for k in range(3, max_order // 2 + 1))
    raw.extend(dicyclic(k) for k in range(2, max_order // 4 + 1))

    kept: list[FiniteGroup] = []

    def known(g: FiniteGroup) -> bool:
        return any(find_isomorphism(g, other) is not None for other in kept if other.order == g.order)

    for g in raw:
        if not known(g):
            kept.append(g)

    # close under binary direct products
    changed = True
    while changed:
        changed = False
        current = list(kept)
        for g1 in current:
            for g2 in current:
                if g1.order * g2.order > max_order or g1.order == 1 or g2.order == 1:
                    continue
                prod_name = "x".join(sorted([g1.label(), g2.label()]))
                prod = direct_product(g1, g2, name=prod_name)
                if not known(prod):
                    kept.append(prod)
                    changed = True
    kept.sort(key=lambda g: (g.order, g.label()))
    return kept


def _factorial(n: int) -> int:
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


def subgroups(g: FiniteGroup) -> list[frozenset[int]]:
    """All subgroups, discovered by closing generator sets."""

    def close(seed: frozenset[int]) -> frozenset[int]:
        current = set(seed)
        changed = True
        while changed:
            changed = False
            items = list(current)
            for a in items:
                for b in items:
                    c = g.mul(a, b)
                    if c not in current:
                        current.add(c)
                        changed = True
        return frozenset(current)

    trivial = frozenset({0})
    found = {trivial}
    queue = [trivial]
    while queue:
        h = queue.pop()
        for x in g.elements():
            if x in h:
                continue
            bigger = close(h | {x})
            if bigger not in found:
                found.add(bigger)
                queue.append(bigger)
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def normal_subgroups(g: FiniteGroup) -> list[frozenset[int]]:
    out = []
    for h in subgroups(g):
        if all(g.mul(g.mul(x, a), g.inv(x)) in h for x in g.elements() for a in h):
            out.append(h)
    return out


@dataclass
class WeakNotStrongWitness:
    group: FiniteGroup
    normal: tuple[int, ...]
    phi: GroupHom
    search: SectionSearch


def catalog_search_weak_not_strong(
    max_order: int, *, max_candidates: int | None = None
) -> list[WeakNotStrongWitness]:
    """Search every quotient surjection of every catalog group for a weak
    splitting without a splitting.  An empty list is a valid outcome."""
    witnesses = []
    for g in catalog(max_order):
        for nsub in normal_subgroups(g):
            _, phi = quotient_by_subgroup(g, nsub)
            search = classify_sections(phi, max_candidates=max_candidates)
            if search.has_weak_splitting and not search.has_splitting:
                witnesses.append(
                    WeakNotStrongWitness(g, tuple(sorted(nsub)), phi, search)
                )
    return witnesses


def surjective_homs(
    domain: FiniteGroup, codomain: FiniteGroup, limit: int | None = None
) -> list[GroupHom]:
    """All surjective homomorphisms domain -> codomain (deterministic order)."""
    if codomain.order > domain.order or domain.order % codomain.order != 0:
        return []
    gens = _generating_set(domain)
    out: list[GroupHom] = []

    def close(mapping: dict[int, int]) -> dict[int, int] | None:
        m = dict(mapping)
        frontier = list(m)
        while frontier:
            nxt = []
            for a in list(m):
                for b in frontier:
                    for x, y in ((a, b), (b, a)):
                        c = domain.mul(x, y)
                        w = codomain.mul(m[x], m[y])
                        if c in m:
                            if m[c] != w:
                                return None
                        else:
                            m[c] = w
                            nxt.append(c)
            frontier = nxt
        return m

    def extend(i: int, mapping: dict[int, int]):
        if limit is not None and len(out) >= limit:
            return
        if i == len(gens):
            if len(mapping) == domain.order and len(set(mapping.values())) == codomain.order:
                out.append(GroupHom(domain, codomain, tuple(mapping[a] for a in domain.elements())))
            return
        gen = gens[i]
        if gen in mapping:
            extend(i + 1, mapping)
            return
        gen_order = domain.element_order(gen)
        for img in codomain.elements():
            if gen_order % codomain.element_order(img) != 0:
                continue
            trial = dict(mapping)
            trial[gen] = img
            closed = close(trial)
            if closed is not None:
                extend(i + 1, closed)

    extend(0, {0: 0})
    return out


# ---------------------------------------------------------------------------
# Automorphism groups of structures

@dataclass
class AutomorphismGroup:
    """Automorphism list of a structure together with its Cayley table.

    ``maps[i]`` realizes group element i; multiplication is composition
    (apply the right factor first); element 0 is the identity map.
    """

    structure: SortedStructure
    group: FiniteGroup
    maps: list[SortedMap]
    index: dict[tuple[tuple[int, ...], ...], int]

    def action(self, element: int) -> SortedMap:
        return self.maps[element]

    def index_of(self, m: SortedMap) -> int:
        try:
            return self.index[m.key()]
        except KeyError:
            raise GroupError("map is not an automorphism of the structure") from None


def aut_group(s: SortedStructure, *, max_elements: int | None = None) -> AutomorphismGroup:
    maps = automorphisms(s, max_elements=max_elements)
    index = {m.key(): i for i, m in enumerate(maps)}
    ident = tuple(tuple(range(n)) for n in s.sort_sizes)
    if maps[0].key() != ident:
        raise GroupError("canonical order does not start with the identity")
    n = len(maps)
    table = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            table[i][j] = index[maps[i].compose(maps[j]).key()]
    group = FiniteGroup(table, name=f"Aut({len(s.sort_sizes)}-sorted,{s.total_elements}el)")
    return AutomorphismGroup(s, group, maps, index)


# ---------------------------------------------------------------------------
# JSON serialization

def group_to_json(g: FiniteGroup) -> dict:
    doc = {"order": g.order, "table": [list(row) for row in g.table]}
    if g.names is not None:
        doc["names"] = list(g.names)
    return doc


def group_from_json(doc: Mapping) -> FiniteGroup:
    try:
        table = doc["table"]
        names = doc.get("names")
        g = FiniteGroup(table, names=names)
        if g.order != int(doc["order"]):
            raise GroupError("declared order does not match table size")
    except (KeyError, TypeError, ValueError) as exc:
        raise GroupError(f"malformed group document: {exc}") from exc
    return g


def hom_to_json(h: GroupHom) -> dict:
    return {
        "domain": group_to_json(h.domain),
        "codomain": group_to_json(h.codomain),
        "map": list(h.map),
    }


def hom_from_json(doc: Mapping) -> GroupHom:
    try:
        return GroupHom(
            group_from_json(doc["domain"]),
            group_from_json(doc["codomain"]),
            doc["map"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise GroupError(f"malformed hom document: {exc}") from exc


def dumps_group(g: FiniteGroup) -> str:
    return json.dumps(group_to_json(g), indent=2) + "\n"
