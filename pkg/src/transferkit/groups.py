"""Finite groups on element indices 0..n-1, subgroup lattices, and double cosets.

Subgroups are bitmasks over element indices, so group order is capped at 64;
the lattice enumeration applies a lower public bound (default 24).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

MASK_CAP = 64
DEFAULT_ORDER_BOUND = 24


class GroupValidationError(ValueError):
    """A proposed multiplication table is not a group."""


class NonAssociative(GroupValidationError):
    def __init__(self, a: int, b: int, c: int):
        self.triple = (a, b, c)
        super().__init__(f"(a*b)*c != a*(b*c) for (a,b,c)={self.triple}")


class NoIdentity(GroupValidationError):
    def __init__(self):
        super().__init__("no two-sided identity element")


class NoInverse(GroupValidationError):
    def __init__(self, a: int):
        self.element = a
        super().__init__(f"element {a} has no two-sided inverse")


class OrderBoundExceeded(ValueError):
    def __init__(self, order: int, bound: int):
        super().__init__(f"group order {order} exceeds enumeration bound {bound}")


class Group:
    """Finite group given by a multiplication table on indices 0..order-1."""

    def __init__(self, table: Sequence[Sequence[int]], name: str = "G",
                 element_names: Optional[Sequence[str]] = None):
        self.order = len(table)
        if self.order == 0:
            raise NoIdentity()
        if self.order > MASK_CAP:
            raise OrderBoundExceeded(self.order, MASK_CAP)
        self.table = tuple(tuple(int(x) for x in row) for row in table)
        for i, row in enumerate(self.table):
            if len(row) != self.order or any(x < 0 or x >= self.order for x in row):
                raise GroupValidationError(f"row {i} is not a map into 0..{self.order - 1}")
        self.name = name
        self.identity = self._find_identity()
        self.inv = self._find_inverses()
        self._check_associative()
        self.element_names = list(element_names) if element_names else [str(i) for i in range(self.order)]
        self._lattice: Optional[SubgroupLattice] = None

    def _find_identity(self) -> int:
        for e in range(self.order):
            if all(self.table[e][x] == x and self.table[x][e] == x for x in range(self.order)):
                return e
        raise NoIdentity()

    def _find_inverses(self) -> tuple[int, ...]:
        inv = []
        for a in range(self.order):
            for b in range(self.order):
                if self.table[a][b] == self.identity and self.table[b][a] == self.identity:
                    inv.append(b)
                    break
            else:
                raise NoInverse(a)
        return tuple(inv)

    def _check_associative(self) -> None:
        t = self.table
        for a in range(self.order):
            for b in range(self.order):
                ab = t[a][b]
                row_b = t[b]
                for c in range(self.order):
                    if t[ab][c] != t[a][row_b[c]]:
                        raise NonAssociative(a, b, c)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def conj(self, a: int, x: int) -> int:
        """a * x * a^-1."""
        return self.table[self.table[a][x]][self.inv[a]]

    def elements(self) -> range:
        return range(self.order)

    def is_abelian(self) -> bool:
        return all(self.table[a][b] == self.table[b][a]
                   for a in range(self.order) for b in range(a))

    def lattice(self, bound: int = DEFAULT_ORDER_BOUND) -> "SubgroupLattice":
        if self._lattice is None:
            self._lattice = subgroup_lattice(self, bound)
        return self._lattice

    def element_name(self, a: int) -> str:
        return self.element_names[a]

    def to_json(self) -> dict:
        return {"name": self.name, "order": self.order,
                "table": [list(row) for row in self.table]}

    def __repr__(self) -> str:
        return f"Group({self.name!r}, order={self.order})"


class SubgroupGroup(Group):
    """A subgroup realized as a group in its own right.

    ``embed[i]`` is the parent element index of local element i; local indices
    follow the parent's element order.
    """

    def __init__(self, lattice: "SubgroupLattice", index: int):
        parent = lattice.group
        embed = sorted(_mask_elements(lattice.subgroups[index].mask))
        local = {p: i for i, p in enumerate(embed)}
        table = [[local[parent.table[a][b]] for b in embed] for a in embed]
        super().__init__(table, name=f"{parent.name}[sub{index}]",
                         element_names=[parent.element_names[p] for p in embed])
        self.lattice_ref = lattice
        self.subgroup_index = index
        self.embed = tuple(embed)
        self.local_of_parent = local


@dataclass(frozen=True)
class Subgroup:
    """Subgroup of a listed group, stored as an element-index bitmask."""

    mask: int
    group: Group
    index: int  # position in the canonical lattice order

    @property
    def size(self) -> int:
        return bin(self.mask).count("1")

    def members(self) -> list[int]:
        return _mask_elements(self.mask)

    def contains(self, other: "Subgroup") -> bool:
        return other.mask & ~self.mask == 0

    def __repr__(self) -> str:
        names = ",".join(self.group.element_names[x] for x in self.members())
        return f"Subgroup({{{names}}})"


def _mask_elements(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def close_subset(group: Group, elements: Iterable[int]) -> int:
    """Bitmask of the subgroup generated by ``elements``."""
    mask = 1 << group.identity
    frontier = [group.identity]
    for e in elements:
        if not (mask >> e) & 1:
            mask |= 1 << e
            frontier.append(e)
    while frontier:
        new = []
        members = _mask_elements(mask)
        for a in frontier:
            for b in members:
                for c in (group.table[a][b], group.table[b][a]):
                    if not (mask >> c) & 1:
                        mask |= 1 << c
                        new.append(c)
        frontier = new
    return mask


class SubgroupLattice:
    """All subgroups of a finite group in a canonical order.

    Order: by cardinality, then lexicographically on the sorted member list.
    Meet is intersection, join is the subgroup generated by the union, and
    conjugation permutes the list.
    """

    def __init__(self, group: Group, masks: list[int]):
        self.group = group
        keyed = sorted(masks, key=lambda m: (bin(m).count("1"), _mask_elements(m)))
        self.subgroups = [Subgroup(m, group, i) for i, m in enumerate(keyed)]
        self.index_of_mask = {s.mask: s.index for s in self.subgroups}
        n = len(self.subgroups)
        self.leq = [[(self.subgroups[i].mask & ~self.subgroups[j].mask) == 0
                     for j in range(n)] for i in range(n)]
        self.conj_table = self._conjugation_table()
        self.conjugacy_classes = self._conjugacy_classes()
        self.class_of = {i: c for c, cls in enumerate(self.conjugacy_classes) for i in cls}
        self.top = self.index_of_mask[(1 << group.order) - 1]
        self.bottom = self.index_of_mask[1 << group.identity]
        self._subgroup_groups: dict[int, SubgroupGroup] = {}

    def __len__(self) -> int:
        return len(self.subgroups)

    def _conjugation_table(self) -> list[list[int]]:
        g = self.group
        table = []
        for a in range(g.order):
            row = []
            for s in self.subgroups:
                m = 0
                for x in s.members():
                    m |= 1 << g.conj(a, x)
                row.append(self.index_of_mask[m])
            table.append(row)
        return table

    def _conjugacy_classes(self) -> list[list[int]]:
        seen = set()
        classes = []
        for i in range(len(self.subgroups)):
            if i in seen:
                continue
            orbit = sorted({self.conj_table[a][i] for a in self.group.elements()})
            seen.update(orbit)
            classes.append(orbit)
        return classes

    def meet(self, i: int, j: int) -> int:
        return self.index_of_mask[self.subgroups[i].mask & self.subgroups[j].mask]

    def join(self, i: int, j: int) -> int:
        m = close_subset(self.group, _mask_elements(self.subgroups[i].mask | self.subgroups[j].mask))
        return self.index_of_mask[m]

    def conjugate(self, i: int, a: int) -> int:
        return self.conj_table[a][i]

    def subgroup_group(self, index: int) -> SubgroupGroup:
        if index not in self._subgroup_groups:
            self._subgroup_groups[index] = SubgroupGroup(self, index)
        return self._subgroup_groups[index]

    def minimal_overgroups(self, k: int, h: int) -> list[int]:
        """Minimal subgroups strictly between k and h (inclusive of h)."""
        above = [l for l in range(len(self.subgroups))
                 if l != k and self.leq[k][l] and self.leq[l][h]]
        return [l for l in above
                if not any(m != l and self.leq[m][l] for m in above)]

    def subgroups_below(self, h: int) -> list[int]:
        return [i for i in range(len(self.subgroups)) if self.leq[i][h]]


def subgroup_lattice(group: Group, bound: int = DEFAULT_ORDER_BOUND) -> SubgroupLattice:
    """Enumerate every subgroup by closing single-element extensions."""
    if group.order > bound:
        raise OrderBoundExceeded(group.order, bound)
    trivial = 1 << group.identity
    masks = {trivial}
    frontier = [trivial]
    while frontier:
        new = []
        for mask in frontier:
            members = _mask_elements(mask)
            for x in group.elements():
                if (mask >> x) & 1:
                    continue
                closed = close_subset(group, members + [x])
                if closed not in masks:
                    masks.add(closed)
                    new.append(closed)
        frontier = new
    return SubgroupLattice(group, sorted(masks))


def conjugate(h: Subgroup, a: int) -> Subgroup:
    """The subgroup a H a^-1, as a listed subgroup of the same lattice."""
    lat = h.group.lattice()
    return lat.subgroups[lat.conjugate(h.index, a)]


@dataclass(frozen=True)
class DoubleCoset:
    representative: int
    size: int
    intersection: int  # subgroup index of H ∩ aKa^-1


def double_cosets(group: Group, h: Subgroup, k: Subgroup) -> list[DoubleCoset]:
    """The partition of G into double cosets HaK.

    Representatives are the minimal element index of each coset. Each entry
    records the subgroup H ∩ aKa^-1 as a lattice index.
    """
    lat = group.lattice()
    h_members = h.members()
    k_members = k.members()
    seen = [False] * group.order
    out = []
    for a in range(group.order):
        if seen[a]:
            continue
        coset = set()
        stack = [a]
        while stack:
            g = stack.pop()
            if g in coset:
                continue
            coset.add(g)
            for x in h_members:
                y = group.table[x][g]
                if y not in coset:
                    stack.append(y)
            for x in k_members:
                y = group.table[g][x]
                if y not in coset:
                    stack.append(y)
        for g in coset:
            seen[g] = True
        conj_k = lat.conjugate(k.index, a)
        inter = lat.meet(h.index, conj_k)
        out.append(DoubleCoset(a, len(coset), inter))
    return out


# ---------------------------------------------------------------------------
# Builders

def _perm_mul(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    # (a*b)(i) = a(b(i))
    return tuple(a[b[i]] for i in range(len(a)))


def group_from_permutations(generators: Sequence[Sequence[int]], name: str = "G") -> Group:
    """Close permutation generators under composition; elements sorted lexicographically."""
    degree = len(generators[0])
    gens = []
    for p in generators:
        if sorted(p) != list(range(degree)):
            raise GroupValidationError(f"{list(p)} is not a permutation of 0..{degree - 1}")
        gens.append(tuple(p))
    identity = tuple(range(degree))
    elems = {identity}
    frontier = [identity]
    while frontier:
        new = []
        for a in frontier:
            for g in gens:
                c = _perm_mul(a, g)
                if c not in elems:
                    elems.add(c)
                    new.append(c)
                if len(elems) > MASK_CAP:
                    raise OrderBoundExceeded(len(elems), MASK_CAP)
        frontier = new
    ordered = sorted(elems)
    idx = {p: i for i, p in enumerate(ordered)}
    table = [[idx[_perm_mul(a, b)] for b in ordered] for a in ordered]
    names = ["".join(map(str, p)) if degree <= 10 else str(p) for p in ordered]
    return Group(table, name=name, element_names=names)


def cyclic_group(n: int) -> Group:
    table = [[(a + b) % n for b in range(n)] for a in range(n)]
    return Group(table, name=f"C_{n}")


def symmetric_group(n: int) -> Group:
    if n > 5:
        raise OrderBoundExceeded(n, 5)
    if n <= 1:
        return Group([[0]], name=f"S_{n}")
    gens = [tuple([1, 0] + list(range(2, n)))]
    if n > 2:
        gens.append(tuple(list(range(1, n)) + [0]))
    return group_from_permutations(gens, name=f"S_{n}")


def dihedral_group(n: int) -> Group:
    """Order-2n dihedral group of maps x -> ±x + a on Z/n."""
    def enc(a: int, r: bool) -> int:
        return a + (n if r else 0)

    def mul(x: int, y: int) -> int:
        a, r = x % n, x >= n
        b, s = y % n, y >= n
        # (x∘y)(t) = ±(±t + b) + a
        return enc((a + (n - b if r else b)) % n, r != s)

    table = [[mul(x, y) for y in range(2 * n)] for x in range(2 * n)]
    return Group(table, name=f"D_{n}")


_BUILTIN_PREFIXES = {"C": cyclic_group, "S": symmetric_group, "D": dihedral_group,
                     "Sigma": symmetric_group}


@lru_cache(maxsize=None)
def builtin_group(name: str) -> Group:
    cleaned = name.replace(" ", "")
    for prefix, builder in _BUILTIN_PREFIXES.items():
        for sep in ("_", ""):
            tag = prefix + sep
            if cleaned.startswith(tag) and cleaned[len(tag):].isdigit():
                return builder(int(cleaned[len(tag):]))
    raise GroupValidationError(f"unknown builtin group {name!r}")


def builtin_groups_up_to(order: int) -> list[Group]:
    """The builtin library (cyclic, symmetric n<=5, dihedral) filtered by order."""
    groups = [cyclic_group(n) for n in range(1, order + 1)]
    groups += [symmetric_group(n) for n in (3, 4, 5) if _factorial(n) <= order]
    groups += [dihedral_group(n) for n in range(2, order // 2 + 1)]
    return groups


def _factorial(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def build_group(spec) -> Group:
    """Build a group from a builtin name, a Cayley table, or permutation generators.

    JSON forms: {"name":…, "order":n, "table":[[…]]} or
    {"name":…, "degree":n, "generators":[[perm],…]}.
    """
    if isinstance(spec, str):
        try:
            return builtin_group(spec)
        except GroupValidationError:
            spec = json.loads(spec)
    if isinstance(spec, Group):
        return spec
    if not isinstance(spec, dict):
        raise GroupValidationError(f"cannot build a group from {type(spec).__name__}")
    name = spec.get("name", "G")
    if "table" in spec:
        return Group(spec["table"], name=name)
    if "generators" in spec:
        return group_from_permutations(spec["generators"], name=name)
    raise GroupValidationError("group spec needs a 'table' or 'generators' field")


def group_hash(group: Group) -> str:
    import hashlib
    payload = json.dumps(group.to_json(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()[:16]
