"""Exact finite-group arithmetic on permutation encodings.

Every group is stored as a faithful permutation group acting on
{0, ..., degree-1}.  Element equality is exact tuple equality, products of
groups act on disjoint blocks, and all derived structure (subgroups, cosets,
conjugacy classes of subgroups) is integer bookkeeping on a precomputed
multiplication table.  Elements are kept sorted lexicographically by their
permutation tuples, which places the identity at index 0 and makes every
downstream ordering (coset representatives, null-space bases) reproducible.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import GroupMismatchError, SizeCapError

ORDER_CAP = 5040


@dataclass(frozen=True, order=True)
class GroupElement:
    """A permutation of {0..d-1} stored as its image tuple i -> perm[i]."""

    perm: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.perm))):
            raise ValueError(f"not a permutation of 0..{len(self.perm) - 1}: {self.perm}")

    @property
    def degree(self) -> int:
        return len(self.perm)

    def compose(self, other: "GroupElement") -> "GroupElement":
        """self applied after other: (self*other)[i] = self[other[i]]."""
        return GroupElement(tuple(self.perm[j] for j in other.perm))

    def inverse(self) -> "GroupElement":
        inv = [0] * len(self.perm)
        for i, j in enumerate(self.perm):
            inv[j] = i
        return GroupElement(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.perm))


class FiniteGroup:
    """Finite permutation group with precomputed product and inverse tables.

    Identity/hash semantics are object identity; two independently constructed
    groups with identical specs have byte-identical element orderings and
    tables but compare unequal, which keeps subgroup provenance unambiguous.
    """

    def __init__(self, elements, generator_perms, name: str):
        elems = sorted(set(elements))
        if not elems:
            raise ValueError("a group needs at least the identity element")
        degree = elems[0].degree
        if any(e.degree != degree for e in elems):
            raise ValueError("mixed permutation degrees")
        self.degree = degree
        self.elements: tuple[GroupElement, ...] = tuple(elems)
        self.name = name
        self._index = {e.perm: i for i, e in enumerate(self.elements)}

        n = len(self.elements)
        if n > ORDER_CAP:
            raise SizeCapError(f"group order {n} exceeds cap {ORDER_CAP}")
        if not self.elements[0].is_identity():
            raise ValueError("identity permutation missing from element set")

        perms = np.array([e.perm for e in self.elements], dtype=np.int32)
        lookup = {perms[i].tobytes(): i for i in range(n)}
        mult = np.empty((n, n), dtype=np.int32)
        for i in range(n):
            composed = np.ascontiguousarray(perms[i][perms])  # row j = elem_i after elem_j
            for j in range(n):
                k = lookup.get(composed[j].tobytes())
                if k is None:
                    raise ValueError(
                        f"element set not closed: {self.elements[i].perm} * {self.elements[j].perm}"
                    )
                mult[i, j] = k
        self.mult_table = mult
        self.mult_table.setflags(write=False)

        inv = np.empty(n, dtype=np.int32)
        for i in range(n):
            j = lookup.get(np.ascontiguousarray(np.argsort(perms[i]).astype(np.int32)).tobytes())
            if j is None or mult[i, j] != 0 or mult[j, i] != 0:
                raise ValueError(f"inverse of {self.elements[i].perm} missing or inconsistent")
            inv[i] = j
        self.inv_table = inv
        self.inv_table.setflags(write=False)

        gens = tuple(self._index[g.perm] for g in generator_perms)
        self.generators: tuple[int, ...] = gens
        if len(_closure(self.mult_table, self.inv_table, gens)) != n:
            raise ValueError("declared generators do not generate the group")

    @property
    def order(self) -> int:
        return len(self.elements)

    def mult(self, i: int, j: int) -> int:
        return int(self.mult_table[i, j])

    def inv(self, i: int) -> int:
        return int(self.inv_table[i])

    def conjugate(self, g: int, h: int) -> int:
        """Index of g h g^-1."""
        return self.mult(self.mult(g, h), self.inv(g))

    def index_of(self, perm) -> int:
        key = perm.perm if isinstance(perm, GroupElement) else tuple(perm)
        try:
            return self._index[key]
        except KeyError:
            raise KeyError(f"{key} is not an element of {self.name}") from None

    def __len__(self) -> int:
        return len(self.elements)

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name}, order={self.order}, degree={self.degree})"


class Subgroup:
    """A subgroup given as a sorted tuple of element indices of its parent."""

    def __init__(self, parent: FiniteGroup, member_indices):
        members = tuple(sorted(set(int(i) for i in member_indices)))
        if not members or members[0] != 0:
            raise ValueError("a subgroup must contain the identity (index 0)")
        idx = np.array(members, dtype=np.int32)
        if not np.isin(parent.mult_table[np.ix_(idx, idx)], idx).all():
            raise ValueError("member set not closed under multiplication")
        if not np.isin(parent.inv_table[idx], idx).all():
            raise ValueError("member set not closed under inverse")
        self.parent = parent
        self.member_indices = members
        self._members = set(members)

    @property
    def order(self) -> int:
        return len(self.member_indices)

    def contains(self, i: int) -> bool:
        return i in self._members

    def issubset(self, other: "Subgroup") -> bool:
        return self._members <= other._members

    def generating_set(self) -> tuple[int, ...]:
        """Greedy deterministic generating set (small, not necessarily minimal)."""
        gens: list[int] = []
        reached = {0}
        for idx in self.member_indices:
            if idx not in reached:
                gens.append(idx)
                reached = _closure(self.parent.mult_table, self.parent.inv_table, gens)
        return tuple(gens)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subgroup)
            and self.parent is other.parent
            and self.member_indices == other.member_indices
        )

    def __hash__(self) -> int:
        return hash((id(self.parent), self.member_indices))

    def __repr__(self) -> str:
        return f"Subgroup(order={self.order}, members={self.member_indices})"


@dataclass(frozen=True)
class CosetDecomposition:
    """Left cosets of a subgroup, identity coset first.

    representatives[i] is the lexicographically smallest member of cosets[i]
    (element order is lexicographic, so smallest index = smallest perm).
    """

    subgroup: Subgroup
    cosets: tuple[tuple[int, ...], ...]
    representatives: tuple[int, ...]


def _closure(mult_table, inv_table, gens) -> set[int]:
    reached = {0}
    frontier = [0]
    gen_set = set(int(g) for g in gens)
    for g in gen_set:
        if g not in reached:
            reached.add(g)
            frontier.append(g)
    while frontier:
        nxt = []
        for a in frontier:
            for g in gen_set:
                p = int(mult_table[a, g])
                for c in (p, int(inv_table[p])):
                    if c not in reached:
                        reached.add(c)
                        nxt.append(c)
        frontier = nxt
    return reached


def _identity(degree: int) -> GroupElement:
    return GroupElement(tuple(range(degree)))


def _cyclic_elements(n: int):
    rots = [GroupElement(tuple((i + k) % n for i in range(n))) for k in range(n)]
    gens = [rots[1]] if n > 1 else []
    return rots, gens


def _dihedral_elements(n: int):
    if n == 2:
        # Order 4 needs 4 distinct permutations; the 2-point action is not
        # faithful, so act on digon vertices {0,1} plus edge midpoints {2,3}.
        e = _identity(4)
        rot = GroupElement((1, 0, 3, 2))
        refl_v = GroupElement((0, 1, 3, 2))
        refl_e = GroupElement((1, 0, 2, 3))
        return [e, rot, refl_v, refl_e], [rot, refl_v]
    rots = [GroupElement(tuple((i + k) % n for i in range(n))) for k in range(n)]
    refls = [GroupElement(tuple((k - i) % n for i in range(n))) for k in range(n)]
    return rots + refls, [rots[1], refls[0]]


def _symmetric_elements(n: int):
    elems = [GroupElement(p) for p in itertools.permutations(range(n))]
    if n == 1:
        gens = []
    elif n == 2:
        gens = [GroupElement((1, 0))]
    else:
        swap = GroupElement((1, 0) + tuple(range(2, n)))
        cycle = GroupElement(tuple((i + 1) % n for i in range(n)))
        gens = [swap, cycle]
    return elems, gens


def _embed(perm: tuple[int, ...], offset: int, total: int) -> GroupElement:
    image = list(range(total))
    for i, j in enumerate(perm):
        image[offset + i] = offset + j
    return GroupElement(tuple(image))


def construct_group(spec: dict) -> FiniteGroup:
    """Build a group from a descriptor dict.

    Descriptors: {"kind": "cyclic"|"dihedral"|"symmetric", "n": int} or
    {"kind": "product", "factors": [spec, spec]}.  The result acts faithfully
    on {0..degree-1}; products act on disjoint blocks.
    """
    kind = spec.get("kind")
    if kind == "cyclic":
        n = int(spec["n"])
        if n < 1:
            raise ValueError("cyclic groups need n >= 1")
        if n > ORDER_CAP:
            raise SizeCapError(f"cyclic order {n} exceeds cap {ORDER_CAP}")
        elems, gens = _cyclic_elements(n)
        return FiniteGroup(elems, gens, f"Z{n}")
    if kind == "dihedral":
        n = int(spec["n"])
        if n < 2:
            raise ValueError("dihedral groups need n >= 2")
        if 2 * n > ORDER_CAP:
            raise SizeCapError(f"dihedral order {2 * n} exceeds cap {ORDER_CAP}")
        elems, gens = _dihedral_elements(n)
        return FiniteGroup(elems, gens, f"D{n}")
    if kind == "symmetric":
        n = int(spec["n"])
        if n < 1:
            raise ValueError("symmetric groups need n >= 1")
        if math.factorial(n) > ORDER_CAP:
            raise SizeCapError(f"symmetric order {math.factorial(n)} exceeds cap {ORDER_CAP}")
        elems, gens = _symmetric_elements(n)
        return FiniteGroup(elems, gens, f"S{n}")
    if kind == "product":
        factors = spec.get("factors")
        if not factors or len(factors) != 2:
            raise ValueError("product descriptor needs exactly two factors")
        a = construct_group(factors[0])
        b = construct_group(factors[1])
        if a.order * b.order > ORDER_CAP:
            raise SizeCapError(f"product order {a.order * b.order} exceeds cap {ORDER_CAP}")
        total = a.degree + b.degree
        elems = [
            GroupElement(
                ea.perm + tuple(a.degree + p for p in eb.perm)
            )
            for ea in a.elements
            for eb in b.elements
        ]
        gens = [_embed(a.elements[g].perm, 0, total) for g in a.generators]
        gens += [_embed(b.elements[g].perm, a.degree, total) for g in b.generators]
        return FiniteGroup(elems, gens, f"{a.name}x{b.name}")
    raise ValueError(f"unknown group kind: {kind!r}")


def trivial_subgroup(group: FiniteGroup) -> Subgroup:
    return Subgroup(group, (0,))


def whole_group(group: FiniteGroup) -> Subgroup:
    return Subgroup(group, range(group.order))


def subgroup_generate(group: FiniteGroup, gens) -> Subgroup:
    """Closure of the given element indices under product and inverse."""
    for g in gens:
        if not 0 <= int(g) < group.order:
            raise ValueError(f"element index {g} out of range")
    return Subgroup(group, sorted(_closure(group.mult_table, group.inv_table, gens)))


def left_cosets(group: FiniteGroup, sub: Subgroup) -> CosetDecomposition:
    """Partition of the group into left cosets g*H, identity coset first."""
    if sub.parent is not group:
        raise GroupMismatchError("subgroup belongs to a different group")
    unassigned = set(range(group.order))
    cosets: list[tuple[int, ...]] = []
    reps: list[int] = []
    while unassigned:
        g = min(unassigned)
        coset = tuple(sorted(group.mult(g, h) for h in sub.member_indices))
        cosets.append(coset)
        reps.append(g)
        unassigned.difference_update(coset)
    return CosetDecomposition(sub, tuple(cosets), tuple(reps))


def conjugacy_class_of_subgroup(group: FiniteGroup, sub: Subgroup) -> list[Subgroup]:
    """All conjugates g H g^-1, deduplicated, sorted by member tuple."""
    if sub.parent is not group:
        raise GroupMismatchError("subgroup belongs to a different group")
    seen = set()
    out = []
    for g in range(group.order):
        members = tuple(sorted(group.conjugate(g, h) for h in sub.member_indices))
        if members not in seen:
            seen.add(members)
            out.append(members)
    return [Subgroup(group, members) for members in sorted(out)]
